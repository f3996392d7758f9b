"""Pure-Python Numerov recurrence, used when the compiled kernel is absent."""

import math

import numpy as np

BIG = 1e150
SMALL = 1e-150


def numerov(f, h, y0, y1):
    """March the three-term recurrence; returns (psi, log_scale)."""
    f = np.ascontiguousarray(f, dtype=np.float64).tolist()
    n = len(f)
    if n < 2:
        raise ValueError("need at least two grid points")
    c = h * h / 12.0
    y = [0.0] * n
    y[0], y[1] = y0, y1
    log_scale = 0.0
    # same operation order as the compiled kernel, so both round identically;
    # 2 + 10 c f keeps the small term exact where 12 - 10 (1 - c f) would not
    for i in range(1, n - 1):
        v = ((2.0 + 10.0 * c * f[i]) * y[i] - (1.0 - c * f[i - 1]) * y[i - 1]) / (1.0 - c * f[i + 1])
        y[i + 1] = v
        if abs(v) > BIG:
            for j in range(i + 2):
                y[j] *= SMALL
            log_scale += math.log(BIG)
    return np.array(y), log_scale
