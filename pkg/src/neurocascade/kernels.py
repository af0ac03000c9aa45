"""Hot numeric loops.

Each kernel is written once in a numba-compatible subset of Python and
compiled by :func:`neurocascade._jit.njit` unless acceleration is disabled.
Activation codes: 0 = sign, 1 = tanh, 2 = synthetic piecewise map.
"""
import math

import numpy as np

from ._jit import njit

SIGN, TANH, SYNTHETIC = 0, 1, 2


@njit
def activate(code, z):
    if code == SIGN:
        # sign(0) = +1
        return 1.0 if z >= 0.0 else -1.0
    return math.tanh(z)


@njit
def preactivation(order, w, x, v):
    if order == 2:
        p = x * v
        # 0 * inf arises only for a zero state; the product is then zero
        if p != p:
            p = 0.0
        return w * p
    return w * x + v


@njit
def iterate(code, order, w, x0, vs):
    """States x_0..x_n of one sign/tanh neuron driven by inputs ``vs``."""
    n = vs.shape[0]
    xs = np.empty(n + 1)
    xs[0] = x0
    x = x0
    for t in range(n):
        x = activate(code, preactivation(order, w, x, vs[t]))
        xs[t + 1] = x
    return xs


@njit
def run_table(delta, letters, q0):
    """State indices visited by a table-driven semiautomaton."""
    n = letters.shape[0]
    out = np.empty(n + 1, dtype=np.int64)
    q = q0
    out[0] = q
    for t in range(n):
        q = delta[q, letters[t]]
        out[t + 1] = q
    return out


@njit
def interpret(lo, hi, count, x):
    for k in range(count):
        if lo[k] <= x <= hi[k]:
            return k
    return -1


@njit
def _nearest(lo, hi, count, x):
    best = 0
    best_d = math.inf
    for k in range(count):
        d = abs(x - 0.5 * (lo[k] + hi[k]))
        if d < best_d:
            best_d = d
            best = k
    return best


@njit
def synthetic_step(st_lo, st_hi, st_count, in_lo, in_hi, in_count, cayley, x, v):
    i = _nearest(st_lo, st_hi, st_count, x)
    j = _nearest(in_lo, in_hi, in_count, v)
    k = cayley[i, j]
    return 0.5 * (st_lo[k] + st_hi[k])


@njit
def rnc_run(codes, orders, ws, x0, st_lo, st_hi, st_count, in_lo, in_hi, in_count,
            cayley, read_ptr, reads, strides, letter_stride, tab_ptr, tables, letters):
    """Synchronously step every neuron of a compiled cascade.

    Neuron ``i`` at step ``t`` looks up its input in its flattened table
    using the letter and the interpretations of its read neurons at ``t-1``.
    Returns the state trace, the interpretation trace and the first
    ``(step, neuron)`` whose state fell outside every interval, or (-1, -1).
    """
    d = codes.shape[0]
    n = letters.shape[0]
    xs = np.empty((n + 1, d))
    ps = np.full((n + 1, d), -1, dtype=np.int64)
    for i in range(d):
        xs[0, i] = x0[i]
        ps[0, i] = interpret(st_lo[i], st_hi[i], st_count[i], x0[i])
        if ps[0, i] < 0:
            return xs[:1], ps[:1], 0, i
    for t in range(1, n + 1):
        sigma = letters[t - 1]
        for i in range(d):
            off = tab_ptr[i] + sigma * letter_stride[i]
            for k in range(read_ptr[i], read_ptr[i + 1]):
                off += ps[t - 1, reads[k]] * strides[k]
            v = tables[off]
            x = xs[t - 1, i]
            if codes[i] == SYNTHETIC:
                y = synthetic_step(st_lo[i], st_hi[i], st_count[i], in_lo[i], in_hi[i],
                                   in_count[i], cayley[i], x, v)
            else:
                y = activate(codes[i], preactivation(orders[i], ws[i], x, v))
            xs[t, i] = y
        for i in range(d):
            p = interpret(st_lo[i], st_hi[i], st_count[i], xs[t, i])
            ps[t, i] = p
            if p < 0:
                return xs[: t + 1], ps[: t + 1], t, i
    return xs, ps, -1, -1


@njit
def grid_violation_loop(code, order, w, xs, vs, lo, hi, tol):
    """First grid point whose image leaves ``[lo - tol, hi + tol]``."""
    for a in range(xs.shape[0]):
        for b in range(vs.shape[0]):
            y = activate(code, preactivation(order, w, xs[a], vs[b]))
            if y < lo - tol or y > hi + tol:
                return True, xs[a], vs[b], y
    return False, 0.0, 0.0, 0.0


def grid_violation_numpy(code, order, w, xs, vs, lo, hi, tol):
    """Vectorised twin of :func:`grid_violation_loop`."""
    X = xs[:, None]
    V = vs[None, :]
    if order == 2:
        with np.errstate(invalid="ignore"):
            p = X * V
        p = np.where(np.isnan(p), 0.0, p)
        z = w * p
    else:
        z = w * X + V
    y = np.where(z >= 0.0, 1.0, -1.0) if code == SIGN else np.tanh(z)
    bad = (y < lo - tol) | (y > hi + tol)
    if not bad.any():
        return False, 0.0, 0.0, 0.0
    a, b = np.unravel_index(np.argmax(bad), bad.shape)
    return True, float(xs[a]), float(vs[b]), float(y[a, b])


# numpy's vectorised tanh beats the compiled loop on full grids, so the
# numpy twin is used on both paths; the loop stays for benchmarking.
grid_violation = grid_violation_numpy
