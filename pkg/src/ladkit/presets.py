"""Named hyperparameter presets and the flat config-key space.

Presets expand to a flat ``key=value`` mapping; CLI/service overrides
are applied key-by-key on top, and the merged mapping builds the typed
detector configs. ``table4`` is the standard single-phase setup;
``table5_nyc``/``table5_tmrt`` are the two-phase setups for half-hourly
and hourly seasonal series (conversion look-back of one season).
"""

from __future__ import annotations

from typing import Optional

from .errors import ConfigError
from .lstm import BackendConfig, INIT_SCHEMES, OPTIMIZERS, SCALINGS
from .repad import DetectorConfig
from .salad import SaladConfig

REPAD = "repad"
SALAD = "salad"
ALGORITHMS = (REPAD, SALAD)

# key -> (type, applies_to)
_KEY_TYPES = {
    "look_back": int,
    "predict_forward": int,
    "hidden_size": int,
    "epsilon_denominator": float,
    "epochs": int,
    "learning_rate": float,
    "seed": int,
    "init_scheme": str,
    "optimizer": str,
    "adam_epsilon": float,
    "scaling": str,
    "activation": str,
    "conversion_look_back": int,
    "conversion_epochs": int,
    "conversion_learning_rate": float,
    "conversion_hidden_size": int,
}
_SALAD_ONLY = {
    "conversion_look_back", "conversion_epochs",
    "conversion_learning_rate", "conversion_hidden_size",
}
_ENUM_VALUES = {
    "init_scheme": INIT_SCHEMES,
    "optimizer": OPTIMIZERS,
    "scaling": SCALINGS,
    "activation": ("tanh",),  # informational; only the standard cell is built
}


def _base_flat() -> dict:
    return {
        "look_back": 3,
        "predict_forward": 1,
        "hidden_size": 10,
        "epsilon_denominator": 1e-4,
        "epochs": 50,
        "learning_rate": 0.005,
        "activation": "tanh",
        "seed": 140,
        "init_scheme": "uniform_scaled",
        "optimizer": "sgd",
        "adam_epsilon": 1e-8,
        "scaling": "window_minmax",
    }


def _salad_flat(conversion_look_back: int) -> dict:
    flat = _base_flat()
    flat.update({
        "learning_rate": 0.001,
        "conversion_look_back": conversion_look_back,
        "conversion_epochs": 100,
        "conversion_learning_rate": 0.001,
        "conversion_hidden_size": 10,
    })
    return flat


PRESETS = {
    "table4": (REPAD, _base_flat),
    "table5_nyc": (SALAD, lambda: _salad_flat(288)),
    "table5_tmrt": (SALAD, lambda: _salad_flat(63)),
}


def expand_preset(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r} (have: {', '.join(sorted(PRESETS))})")
    return PRESETS[name][1]()


def preset_algorithm(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}")
    return PRESETS[name][0]


def _coerce(key: str, value) -> object:
    if key not in _KEY_TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    want = _KEY_TYPES[key]
    try:
        if want is int:
            coerced = int(str(value))
        elif want is float:
            coerced = float(str(value))
        else:
            coerced = str(value)
    except ValueError:
        raise ConfigError(f"bad value {value!r} for {key}") from None
    if key in _ENUM_VALUES and coerced not in _ENUM_VALUES[key]:
        raise ConfigError(
            f"bad value {coerced!r} for {key} (have: {', '.join(_ENUM_VALUES[key])})"
        )
    return coerced


def effective_flat(algorithm: str, preset: Optional[str], overrides: dict,
                   seed: Optional[int] = None) -> dict:
    """Preset expansion (or algorithm defaults) with overrides applied
    key-by-key; ``seed`` is the shorthand override and wins last."""
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    if preset is not None:
        if preset_algorithm(preset) != algorithm:
            raise ConfigError(f"preset {preset!r} is a {preset_algorithm(preset)} preset")
        flat = expand_preset(preset)
    elif algorithm == REPAD:
        flat = _base_flat()
    else:
        # No default season length exists; require it explicitly.
        flat = _salad_flat(conversion_look_back=0)
        flat["conversion_look_back"] = None
    for key, value in overrides.items():
        if key in _SALAD_ONLY and algorithm != SALAD:
            raise ConfigError(f"{key} only applies to the salad algorithm")
        flat[key] = _coerce(key, value)
    if seed is not None:
        flat["seed"] = int(seed)
    if algorithm == SALAD and not flat.get("conversion_look_back"):
        raise ConfigError("salad requires conversion_look_back (preset or --set)")
    return flat


def _backend_from(flat: dict, epochs_key: str, lr_key: str) -> BackendConfig:
    return BackendConfig(
        init_scheme=flat["init_scheme"],
        optimizer=flat["optimizer"],
        learning_rate=flat[lr_key],
        epochs=flat[epochs_key],
        seed=flat["seed"],
        adam_epsilon=flat["adam_epsilon"],
        scaling=flat["scaling"],
    )


def detector_config_from(flat: dict) -> DetectorConfig:
    return DetectorConfig(
        look_back=flat["look_back"],
        predict_forward=flat["predict_forward"],
        hidden_size=flat["hidden_size"],
        epsilon_denominator=flat["epsilon_denominator"],
        backend=_backend_from(flat, "epochs", "learning_rate"),
    )


def salad_config_from(flat: dict) -> SaladConfig:
    return SaladConfig(
        conversion_look_back=flat["conversion_look_back"],
        conversion_hidden_size=flat["conversion_hidden_size"],
        conversion_backend=_backend_from(flat, "conversion_epochs", "conversion_learning_rate"),
        detection=detector_config_from(flat),
    )
