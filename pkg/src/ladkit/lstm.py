"""Single-hidden-layer LSTM regressor trained on the fly.

The network maps a window of ``b`` scalars to a one-step-ahead forecast:
scalar input per step, one hidden layer of ``H`` LSTM units (logistic
sigmoid gates, tanh candidate/cell output), and a linear head on the
hidden state. Training is teacher-forced backpropagation through time
over the window: inputs ``window[0..b-2]``, targets ``window[1..b-1]``,
mean-squared error over the ``b-1`` supervised steps.

Everything here is deterministic: weights are drawn from a seeded
numpy PCG64 generator (the seed lives in :class:`BackendConfig`), all
arithmetic is float64, and training a copy never mutates its input, so
identical config + identical data reproduce bit-identical models.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, ContractError, NumericOverflowError

# Gate rows in the stacked (4, H) parameter arrays. The first three use
# the logistic sigmoid, the candidate uses tanh, so activations apply to
# contiguous slices.
GATE_NAMES = ("input", "forget", "output", "candidate")
_GI, _GF, _GO, _GG = 0, 1, 2, 3

INIT_SCHEMES = ("uniform_scaled", "normal_scaled", "zero_bias_uniform")
OPTIMIZERS = ("sgd", "adam")
SCALINGS = ("none", "window_minmax")


@dataclass(frozen=True)
class BackendConfig:
    """Numeric-backend axes: everything that perturbs results without
    changing the detection algorithm (init family, optimizer, scaling).
    """

    init_scheme: str = "uniform_scaled"
    optimizer: str = "sgd"
    learning_rate: float = 0.005
    epochs: int = 50
    seed: int = 140
    adam_epsilon: float = 1e-8
    scaling: str = "window_minmax"

    def __post_init__(self):
        if self.init_scheme not in INIT_SCHEMES:
            raise ConfigError(f"unknown init_scheme {self.init_scheme!r}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        if self.scaling not in SCALINGS:
            raise ConfigError(f"unknown scaling {self.scaling!r}")
        if not (self.learning_rate > 0):
            raise ConfigError("learning_rate must be positive")
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0")
        if self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if not (self.adam_epsilon > 0):
            raise ConfigError("adam_epsilon must be positive")


@dataclass
class LstmModel:
    """All weights of the network plus the affine input map fitted at
    training time.

    ``wx``/``wh``/``b`` stack the four gates along axis 0 in the order
    input, forget, output, candidate. The input is a scalar per step, so
    each gate's input weights are a length-H vector. ``scale_mul`` and
    ``scale_add`` map raw values into the training range
    (``scaled = scale_mul * x + scale_add``); the identity map means no
    scaling was applied. ``scale_fallback`` records that a degenerate
    (constant) window forced the identity map.
    """

    hidden_size: int
    wx: np.ndarray        # (4, H) input weights per gate
    wh: np.ndarray        # (4, H, H) recurrent weights per gate
    b: np.ndarray         # (4, H) gate biases
    w_out: np.ndarray     # (H,) linear head
    b_out: float
    scale_mul: float = 1.0
    scale_add: float = 0.0
    scale_fallback: bool = False
    look_back: Optional[int] = None

    def copy(self) -> "LstmModel":
        return LstmModel(
            hidden_size=self.hidden_size,
            wx=self.wx.copy(),
            wh=self.wh.copy(),
            b=self.b.copy(),
            w_out=self.w_out.copy(),
            b_out=self.b_out,
            scale_mul=self.scale_mul,
            scale_add=self.scale_add,
            scale_fallback=self.scale_fallback,
            look_back=self.look_back,
        )

    def equals(self, other: "LstmModel") -> bool:
        """Bit-exact equality of all weights and metadata."""
        return (
            self.hidden_size == other.hidden_size
            and np.array_equal(self.wx, other.wx)
            and np.array_equal(self.wh, other.wh)
            and np.array_equal(self.b, other.b)
            and np.array_equal(self.w_out, other.w_out)
            and self.b_out == other.b_out
            and self.scale_mul == other.scale_mul
            and self.scale_add == other.scale_add
            and self.scale_fallback == other.scale_fallback
            and self.look_back == other.look_back
        )


@dataclass
class LstmGradients:
    """Loss gradients, same shapes as the model parameters."""

    wx: np.ndarray
    wh: np.ndarray
    b: np.ndarray
    w_out: np.ndarray
    b_out: float


@dataclass
class ForwardCache:
    """Per-step activations retained for backpropagation through time."""

    x: np.ndarray        # (T,) inputs
    i: np.ndarray        # (T, H) input gate
    f: np.ndarray        # (T, H) forget gate
    o: np.ndarray        # (T, H) output gate
    g: np.ndarray        # (T, H) candidate
    c: np.ndarray        # (T, H) cell state
    tanh_c: np.ndarray   # (T, H)
    h: np.ndarray        # (T, H) hidden state
    y: np.ndarray        # (T,) head output per step


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator, the package-wide PRNG.

    PCG64 is numpy's documented default bit generator; its stream for a
    given seed is identical across platforms, which is what makes every
    model init reproducible.
    """
    return np.random.Generator(np.random.PCG64(seed))


def init_model(config: BackendConfig, hidden_size: int) -> LstmModel:
    """Draw a fresh model from the seeded generator per the init scheme.

    Draw order is fixed (wx, wh, gate biases, head weights, head bias)
    so a given (seed, scheme, H) always yields the same weights.
    uniform_scaled draws every parameter from U(-s, s) with s = 1/sqrt(H);
    normal_scaled from N(0, s^2); zero_bias_uniform draws weights as
    uniform_scaled but pins gate biases to zero except the forget gate,
    which starts at 1 to keep the memory path open.
    """
    if hidden_size < 1:
        raise ConfigError("hidden_size must be >= 1")
    h = hidden_size
    s = 1.0 / math.sqrt(h)
    rng = make_rng(config.seed)

    if config.init_scheme == "normal_scaled":
        def draw(size):
            return rng.normal(0.0, s, size=size)
    else:
        def draw(size):
            return rng.uniform(-s, s, size=size)

    wx = draw((4, h))
    wh = draw((4, h, h))
    if config.init_scheme == "zero_bias_uniform":
        b = np.zeros((4, h))
        b[_GF, :] = 1.0
        w_out = draw(h)
        b_out = 0.0
    else:
        b = draw((4, h))
        w_out = draw(h)
        b_out = float(draw(1)[0])

    return LstmModel(hidden_size=h, wx=wx, wh=wh, b=b, w_out=w_out, b_out=b_out)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # Clipped against exp overflow warnings; sigmoid saturates anyway.
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))


def _run_steps(model: LstmModel, xs: np.ndarray) -> ForwardCache:
    """Run the recurrence over ``xs`` from zero initial h/c, caching all
    activations. Raises on the first non-finite step."""
    h_dim = model.hidden_size
    t_steps = len(xs)
    wx_flat = model.wx.reshape(4 * h_dim)
    wh_flat = model.wh.reshape(4 * h_dim, h_dim)
    b_flat = model.b.reshape(4 * h_dim)

    cache = ForwardCache(
        x=xs,
        i=np.empty((t_steps, h_dim)),
        f=np.empty((t_steps, h_dim)),
        o=np.empty((t_steps, h_dim)),
        g=np.empty((t_steps, h_dim)),
        c=np.empty((t_steps, h_dim)),
        tanh_c=np.empty((t_steps, h_dim)),
        h=np.empty((t_steps, h_dim)),
        y=np.empty(t_steps),
    )

    h_prev = np.zeros(h_dim)
    c_prev = np.zeros(h_dim)
    for t in range(t_steps):
        pre = wx_flat * xs[t] + wh_flat @ h_prev + b_flat
        sig = _sigmoid(pre[: 3 * h_dim])
        i_t = sig[:h_dim]
        f_t = sig[h_dim: 2 * h_dim]
        o_t = sig[2 * h_dim:]
        g_t = np.tanh(pre[3 * h_dim:])
        c_t = f_t * c_prev + i_t * g_t
        tc_t = np.tanh(c_t)
        h_t = o_t * tc_t
        y_t = float(model.w_out @ h_t) + model.b_out
        if not (np.isfinite(c_t).all() and np.isfinite(h_t).all() and math.isfinite(y_t)):
            raise NumericOverflowError("non-finite value in LSTM recurrence", step=t)
        cache.i[t] = i_t
        cache.f[t] = f_t
        cache.o[t] = o_t
        cache.g[t] = g_t
        cache.c[t] = c_t
        cache.tanh_c[t] = tc_t
        cache.h[t] = h_t
        cache.y[t] = y_t
        h_prev = h_t
        c_prev = c_t
    return cache


def forward(model: LstmModel, window: Sequence[float]) -> tuple[float, ForwardCache]:
    """Run the raw recurrence over the window (no scaling applied) and
    return the final-step head output plus the activation cache."""
    xs = np.asarray(window, dtype=np.float64)
    if xs.ndim != 1 or len(xs) < 2:
        raise ContractError("window must hold at least 2 values")
    cache = _run_steps(model, xs)
    return float(cache.y[-1]), cache


def _bptt(model: LstmModel, xs: np.ndarray, targets: np.ndarray) -> tuple[LstmGradients, float]:
    """One teacher-forced pass: forward over xs, MSE against targets at
    every step, full backpropagation through time."""
    h_dim = model.hidden_size
    t_steps = len(xs)
    cache = _run_steps(model, xs)

    residual = cache.y - targets
    loss = float(np.mean(residual ** 2))
    dy = (2.0 / t_steps) * residual

    wh_flat = model.wh.reshape(4 * h_dim, h_dim)
    g_wx = np.zeros(4 * h_dim)
    g_wh = np.zeros((4 * h_dim, h_dim))
    g_b = np.zeros(4 * h_dim)
    g_w_out = np.zeros(h_dim)
    g_b_out = 0.0

    dpre = np.empty(4 * h_dim)
    dh_carry = np.zeros(h_dim)
    dc_carry = np.zeros(h_dim)
    for t in range(t_steps - 1, -1, -1):
        i_t, f_t, o_t, g_t = cache.i[t], cache.f[t], cache.o[t], cache.g[t]
        tc_t = cache.tanh_c[t]
        h_prev = cache.h[t - 1] if t > 0 else np.zeros(h_dim)
        c_prev = cache.c[t - 1] if t > 0 else np.zeros(h_dim)

        g_w_out += dy[t] * cache.h[t]
        g_b_out += dy[t]

        dh = dy[t] * model.w_out + dh_carry
        do = dh * tc_t
        dc = dh * o_t * (1.0 - tc_t ** 2) + dc_carry
        dpre[:h_dim] = dc * g_t * i_t * (1.0 - i_t)
        dpre[h_dim: 2 * h_dim] = dc * c_prev * f_t * (1.0 - f_t)
        dpre[2 * h_dim: 3 * h_dim] = do * o_t * (1.0 - o_t)
        dpre[3 * h_dim:] = dc * i_t * (1.0 - g_t ** 2)

        g_wx += dpre * xs[t]
        g_wh += np.outer(dpre, h_prev)
        g_b += dpre
        dh_carry = wh_flat.T @ dpre
        dc_carry = dc * f_t

    grads = LstmGradients(
        wx=g_wx.reshape(4, h_dim),
        wh=g_wh.reshape(4, h_dim, h_dim),
        b=g_b.reshape(4, h_dim),
        w_out=g_w_out,
        b_out=g_b_out,
    )
    return grads, loss


def _scaled_pairs(model: LstmModel, window: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    raw = np.asarray(window, dtype=np.float64)
    if raw.ndim != 1 or len(raw) < 2:
        raise ContractError("window must hold at least 2 values")
    scaled = model.scale_mul * raw + model.scale_add
    return scaled[:-1], scaled[1:]


def backprop(model: LstmModel, window: Sequence[float]) -> LstmGradients:
    """Gradients of the single-pass training loss w.r.t. every parameter.

    The window is mapped through the model's stored scaling (identity on
    a fresh model), matching exactly what one epoch of :func:`train`
    differentiates.
    """
    xs, targets = _scaled_pairs(model, window)
    grads, _ = _bptt(model, xs, targets)
    return grads


def mse_loss(model: LstmModel, window: Sequence[float]) -> float:
    """Teacher-forced MSE of the model on the window (after the model's
    stored scaling map). The quantity :func:`train` minimizes."""
    xs, targets = _scaled_pairs(model, window)
    cache = _run_steps(model, xs)
    return float(np.mean((cache.y - targets) ** 2))


def _fit_scaling(window: np.ndarray) -> tuple[float, float, bool]:
    """Affine map onto [-1, 1] from the window's min/max; identity
    fallback when the window is constant."""
    lo = float(window.min())
    hi = float(window.max())
    if hi == lo:
        return 1.0, 0.0, True
    mul = 2.0 / (hi - lo)
    add = -(hi + lo) / (hi - lo)
    return mul, add, False


def train(model: LstmModel, window: Sequence[float], config: BackendConfig) -> LstmModel:
    """Train a copy of the model on one window and return it.

    Runs ``config.epochs`` full teacher-forced passes with the chosen
    optimizer. With window_minmax scaling the affine map is fitted once
    from the window before the first epoch and stored on the returned
    model so prediction can invert it. ``epochs == 0`` is a pure copy.
    """
    raw = np.asarray(window, dtype=np.float64)
    if raw.ndim != 1 or len(raw) < 2:
        raise ContractError("training window must hold at least 2 values")
    if config.epochs == 0:
        return model.copy()

    out = model.copy()
    if config.scaling == "window_minmax":
        out.scale_mul, out.scale_add, out.scale_fallback = _fit_scaling(raw)
    else:
        out.scale_mul, out.scale_add, out.scale_fallback = 1.0, 0.0, False

    scaled = out.scale_mul * raw + out.scale_add
    xs, targets = scaled[:-1], scaled[1:]

    params = [out.wx, out.wh, out.b, out.w_out]
    if config.optimizer == "adam":
        m = [np.zeros_like(p) for p in params] + [0.0]
        v = [np.zeros_like(p) for p in params] + [0.0]
        beta1, beta2 = 0.9, 0.999
        eps = config.adam_epsilon

    lr = config.learning_rate
    for epoch in range(config.epochs):
        grads, loss = _bptt(out, xs, targets)
        if not math.isfinite(loss):
            raise NumericOverflowError("non-finite training loss", step=epoch)
        g_list = [grads.wx, grads.wh, grads.b, grads.w_out, grads.b_out]
        if config.optimizer == "sgd":
            for p, g in zip(params, g_list):
                p -= lr * g
            out.b_out -= lr * grads.b_out
        else:
            t = epoch + 1
            corr1 = 1.0 - beta1 ** t
            corr2 = 1.0 - beta2 ** t
            for k, g in enumerate(g_list):
                m[k] = beta1 * m[k] + (1.0 - beta1) * g
                v[k] = beta2 * v[k] + (1.0 - beta2) * g * g
                step = lr * (m[k] / corr1) / (np.sqrt(v[k] / corr2) + eps)
                if k < 4:
                    params[k] -= step
                else:
                    out.b_out -= float(step)

    out.look_back = len(raw)
    return out


def predict_next(model: LstmModel, window: Sequence[float]) -> float:
    """One-step-ahead forecast: scale the window with the model's stored
    map, run the recurrence, invert the map on the head output. Pure."""
    raw = np.asarray(window, dtype=np.float64)
    if raw.ndim != 1 or len(raw) < 2:
        raise ContractError("window must hold at least 2 values")
    if model.look_back is not None and len(raw) != model.look_back:
        raise ContractError(
            f"window length {len(raw)} != trained look-back {model.look_back}"
        )
    scaled = model.scale_mul * raw + model.scale_add
    cache = _run_steps(model, scaled)
    return (float(cache.y[-1]) - model.scale_add) / model.scale_mul


def dump_model(model: LstmModel, config: Optional[BackendConfig] = None) -> dict:
    """JSON-ready dump for debugging: per-gate arrays (row-major) plus a
    config echo when one is supplied."""
    doc = {
        "hidden_size": model.hidden_size,
        "input_weights": {
            name: [[float(w)] for w in model.wx[k]] for k, name in enumerate(GATE_NAMES)
        },
        "recurrent_weights": {
            name: [[float(w) for w in row] for row in model.wh[k]]
            for k, name in enumerate(GATE_NAMES)
        },
        "gate_biases": {
            name: [float(w) for w in model.b[k]] for k, name in enumerate(GATE_NAMES)
        },
        "output_weights": [float(w) for w in model.w_out],
        "output_bias": model.b_out,
        "scale_mul": model.scale_mul,
        "scale_add": model.scale_add,
        "scale_fallback": model.scale_fallback,
        "look_back": model.look_back,
    }
    if config is not None:
        doc["config"] = dataclasses.asdict(config)
    return doc
