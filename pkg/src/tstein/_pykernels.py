"""NumPy implementations of the grid kernels (fallback for ``_ckernels``).

Grid functions use local 4-point Lagrange cubics on a uniform grid and are
held constant outside the grid span.  Both backends must agree to rounding.
"""

import numpy as np

_CHUNK = 1 << 22


def _stencil(x0, dx, n, xs):
    pos = (xs - x0) / dx
    i = np.floor(pos).astype(np.int64)
    i = np.clip(i, 1, n - 3)
    tau = pos - i
    w_m1 = -tau * (tau - 1.0) * (tau - 2.0) / 6.0
    w_0 = (tau + 1.0) * (tau - 1.0) * (tau - 2.0) / 2.0
    w_1 = -(tau + 1.0) * tau * (tau - 2.0) / 2.0
    w_2 = (tau + 1.0) * tau * (tau - 1.0) / 6.0
    return i, (w_m1, w_0, w_1, w_2)


def cubic_eval(x0, dx, values, xs):
    values = np.ascontiguousarray(values, dtype=float)
    xs = np.asarray(xs, dtype=float)
    n = values.shape[0]
    flat = xs.ravel()
    i, (a, b, c, d) = _stencil(x0, dx, n, flat)
    out = a * values[i - 1] + b * values[i] + c * values[i + 1] + d * values[i + 2]
    xmax = x0 + (n - 1) * dx
    out = np.where(flat <= x0, values[0], out)
    out = np.where(flat >= xmax, values[-1], out)
    return out.reshape(xs.shape)


def shifted_sum(x0, dx, values, xs, shifts, weights):
    """out[i] = sum_k weights[k] * f(xs[i] + shifts[k]) for a grid-backed f."""
    xs = np.ascontiguousarray(xs, dtype=float).ravel()
    shifts = np.ascontiguousarray(shifts, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    out = np.empty(xs.shape[0])
    rows = max(1, _CHUNK // max(1, shifts.shape[0]))
    for start in range(0, xs.shape[0], rows):
        block = xs[start:start + rows, None] + shifts[None, :]
        out[start:start + rows] = cubic_eval(x0, dx, values, block) @ weights
    return out
