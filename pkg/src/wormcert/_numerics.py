"""Small numerical primitives: adaptive Simpson, bisection, golden section,
threshold search over a monotone predicate, and a deterministic chunked
argmin reduction.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import optimize

from .errors import QuadratureError, SearchError

ROOT_XTOL = 1e-12
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def adaptive_simpson(f, a, b, tol, max_depth=60):
    """Integrate a scalar function over [a, b] by adaptive Simpson.

    Uses the classical Richardson-corrected recursion with error budget
    split in halves. Raises QuadratureError when the recursion depth is
    exhausted before the local error estimate drops below its share of `tol`.
    """
    if a == b:
        return 0.0
    worst = [0.0]

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol or m == a or m == b:
            return left + right + delta / 15.0
        if depth <= 0:
            worst[0] = max(worst[0], abs(delta) / 15.0)
            return left + right + delta / 15.0
        return (recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))

    # Seed with a few panels so narrow features are not skipped entirely.
    panels = 16
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        lo, hi = float(lo), float(hi)
        flo, fmid, fhi = f(lo), f(0.5 * (lo + hi)), f(hi)
        est = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
        total += recurse(lo, hi, flo, fmid, fhi, est, tol / panels, max_depth)
    if worst[0] > tol:
        raise QuadratureError("adaptive Simpson hit its depth limit", worst[0])
    return total


def bisect_root(f, a, b, xtol=ROOT_XTOL):
    """Root of a continuous scalar function bracketed by [a, b]."""
    return optimize.bisect(f, a, b, xtol=xtol, maxiter=400)


def expand_bracket(f, a, step, limit):
    """Scan right from `a` with doubling steps until `f` changes sign.

    Returns (lo, hi) with f(lo) and f(hi) of opposite sign.
    """
    fa = f(a)
    lo = a
    while step <= limit:
        hi = a + step
        if fa * f(hi) <= 0.0:
            return lo, hi
        lo = hi
        step *= 2.0
    raise SearchError(f"no sign change found within {limit} of {a}")


def golden_section_min(f, lo, hi, tol=1e-10, max_iter=200):
    """Vectorized golden-section minimization.

    `f` maps an array of abscissae to an array of values; `lo` and `hi` are
    arrays of per-problem bracket ends. Returns (argmin, min) arrays.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        left = fc < fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new_c = hi - _INV_PHI * (hi - lo)
        new_d = lo + _INV_PHI * (hi - lo)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        # one fresh evaluation per problem
        fresh = np.where(left, c_next, d_next)
        ff = f(fresh)
        fc_next = np.where(left, ff, fd)
        fd_next = np.where(left, fc, ff)
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    x = np.where(fc < fd, c, d)
    return x, np.minimum(fc, fd)


def largest_passing(predicate, lo, hi, tol, log=False, max_iter=200):
    """Largest value in (lo, hi] for which a monotone predicate holds.

    The predicate is assumed true below some threshold and false above it.
    `hi` is tried first; if it passes it is returned. Otherwise `lo` must
    pass, and bisection (in log space when `log` is set) narrows the
    threshold until the bracket is narrower than `tol` (relative width
    when `log` is set). Returns the passing end of the final bracket.
    """
    if predicate(hi):
        return hi
    if not predicate(lo):
        raise SearchError(f"predicate fails at the lower end {lo!r}")
    good, bad = lo, hi
    for _ in range(max_iter):
        if log:
            if math.log(bad / good) <= tol:
                break
            mid = math.sqrt(good * bad)
        else:
            if bad - good <= tol:
                break
            mid = 0.5 * (good + bad)
        if predicate(mid):
            good = mid
        else:
            bad = mid
    return good


def chunked_argmin(fn, n, chunk=65536, workers=1):
    """Evaluate `fn(start, stop)` over fixed chunks of range(n) and reduce.

    `fn` returns a 1-D array of margins for indices start..stop-1. Chunks
    are fixed by `chunk`, and the reduction walks them in index order with
    ties going to the smaller index, so the result does not depend on
    `workers`. Returns (global index of the minimum, minimum value).
    """
    bounds = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]

    def local(bound):
        vals = np.asarray(fn(*bound), dtype=float)
        k = int(np.argmin(vals))
        return bound[0] + k, float(vals[k])

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(local, bounds))
    else:
        parts = [local(b) for b in bounds]
    best_i, best_v = parts[0]
    for i, v in parts[1:]:
        if v < best_v:
            best_i, best_v = i, v
    return best_i, best_v
