from pathlib import Path

import numpy as np
import pytest

from ladkit.lstm import backprop, mse_loss
from ladkit.metrics import LabelSet, merge_events

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def fd_gradient_check(model, window, h=1e-5):
    """Central-finite-difference oracle over every model parameter.

    Returns the components violating relative tolerance 1e-4 with an
    absolute floor of 1e-8 (empty list = gradients agree).
    """
    grads = backprop(model, window)
    failures = []
    arrays = [
        ("wx", model.wx, grads.wx), ("wh", model.wh, grads.wh),
        ("b", model.b, grads.b), ("w_out", model.w_out, grads.w_out),
    ]
    for name, arr, garr in arrays:
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = arr[idx]
            arr[idx] = orig + h
            loss_plus = mse_loss(model, window)
            arr[idx] = orig - h
            loss_minus = mse_loss(model, window)
            arr[idx] = orig
            fd = (loss_plus - loss_minus) / (2 * h)
            diff = abs(fd - garr[idx])
            if diff > max(1e-4 * max(abs(fd), abs(garr[idx])), 1e-8):
                failures.append((name, idx, fd, float(garr[idx])))
    orig = model.b_out
    model.b_out = orig + h
    loss_plus = mse_loss(model, window)
    model.b_out = orig - h
    loss_minus = mse_loss(model, window)
    model.b_out = orig
    fd = (loss_plus - loss_minus) / (2 * h)
    if abs(fd - grads.b_out) > max(1e-4 * max(abs(fd), abs(grads.b_out)), 1e-8):
        failures.append(("b_out", (), fd, grads.b_out))
    return failures


def brute_force_match(labels, events, k):
    """Exhaustive index-set intersection version of metrics.match."""
    windows = [set(range(z - k, z + k + 1)) for z in labels.point_anomalies]
    windows += [set(range(a - k, b + 1)) for a, b in labels.collective_anomalies]
    event_sets = [set(range(s, e + 1)) for s, e in events]
    tp = sum(1 for w in windows if any(w & es for es in event_sets))
    fp = sum(1 for es in event_sets if not any(w & es for w in windows))
    fn = len(windows) - tp
    return tp, fp, fn


def random_match_instance(rng, max_len=500):
    """Random labels + merged detection events over a short series."""
    n = int(rng.integers(20, max_len))
    points = sorted(rng.choice(n, size=int(rng.integers(0, min(4, n))), replace=False).tolist())
    collectives = []
    for _ in range(int(rng.integers(0, 3))):
        a = int(rng.integers(0, n - 1))
        b = min(n - 1, a + int(rng.integers(0, 30)))
        collectives.append((a, b))
    n_flags = int(rng.integers(0, min(25, n)))
    flags = sorted(rng.choice(n, size=n_flags, replace=False).tolist())
    labels = LabelSet(point_anomalies=points, collective_anomalies=collectives)
    return labels, merge_events(flags)
