"""The tilt estimate behind the half-plane containment, and the M-identity
used to prove it near psi = 0.
"""

import math

import numpy as np

from .._numerics import chunked_argmin, largest_passing
from ..errors import SearchError
from ..profiles import HALF_PI, g_eval, s_eval
from .report import CertReport, stopwatch

D1_CEILING = 0.249  # strictly below 1/4
D1_RESOLUTION = 1e-3


def tilt_angle(delta):
    """delta pi / (2 (1 - delta))."""
    return delta * math.pi / (2.0 * (1.0 - np.asarray(delta, dtype=float)))


def crucial_margin(p, delta, psi, root_s=None):
    """cos(delta (pi/2 - psi)) - sqrt(S(psi)) + sin(psi + delta (pi/2 - psi)) sin(tilt(delta))."""
    delta = np.asarray(delta, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if root_s is None:
        root_s = np.sqrt(np.maximum(s_eval(p, psi), 0.0))
    lag = delta * (HALF_PI - psi)
    return np.cos(lag) - root_s + np.sin(psi + lag) * np.sin(tilt_angle(delta))


def _delta_grid(delta_max, n):
    return delta_max * np.arange(1, n + 1) / n


def certify_crucial_estimate(p, delta_max, n_delta=512, n_psi=4096, chunk=1 << 18):
    """Minimum of the tilt estimate over (0, delta_max] x [-beta, pi + beta]."""
    if not 0.0 < delta_max < 1.0:
        raise ValueError(f"delta_max must lie in (0, 1), got {delta_max}")
    with stopwatch() as clock:
        deltas = _delta_grid(delta_max, n_delta)
        psis = np.linspace(-p.beta, math.pi + p.beta, n_psi)
        root_s = np.sqrt(np.maximum(s_eval(p, psis), 0.0))

        def block(start, stop):
            k = np.arange(start, stop)
            i, j = np.divmod(k, n_psi)
            return crucial_margin(p, deltas[i], psis[j], root_s[j])

        k, m = chunked_argmin(block, n_delta * n_psi, chunk)
    i, j = divmod(k, n_psi)
    grid = {"delta": [float(deltas[0]), float(delta_max), n_delta],
            "psi": [float(psis[0]), float(psis[-1]), n_psi]}
    return CertReport("crucial_estimate", {"delta_max": delta_max}, grid, m,
                      {"delta": float(deltas[i]), "psi": float(psis[j])}, 0.0, clock[0])


def find_d1(p, n_delta=512, n_psi=4096, lo=1e-4, hi=D1_CEILING, tol=D1_RESOLUTION):
    """Largest grid-certified delta_max in (0, 1/4), to resolution `tol`."""
    def ok(d):
        return certify_crucial_estimate(p, d, n_delta, n_psi).passed

    try:
        return largest_passing(ok, lo, hi, tol)
    except SearchError as exc:
        raise SearchError(f"crucial estimate fails already at delta_max={lo}; "
                          "the profile construction is suspect") from exc


def m_function(t, y):
    """M(t, y) = cos(tau)(cos ty - cos y) + sin(tau)(sin ty + sin((1-t)y) - sin y), tau = tilt(t)."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    tau = tilt_angle(t)
    return (np.cos(tau) * (np.cos(t * y) - np.cos(y))
            + np.sin(tau) * (np.sin(t * y) + np.sin((1.0 - t) * y) - np.sin(y)))


def phi_function(t, x):
    """phi(t, x) = x + tilt(t)."""
    return np.asarray(x, dtype=float) + tilt_angle(t)


def m_phi_identity_check(p, d1, n_delta=256, n_psi=256):
    """Check g(-psi) + M(delta, phi(delta, psi)) against the tilt estimate.

    On the open grid (0, d1) x (-alpha/2, 0) reports the identity
    discrepancy, the minimum of M(delta, phi) and the size of M(delta, 0).
    """
    with stopwatch() as clock:
        deltas = d1 * np.arange(1, n_delta + 1) / (n_delta + 1)
        psis = -0.5 * p.alpha * np.arange(1, n_psi + 1) / (n_psi + 1)
        dd, pp = np.meshgrid(deltas, psis, indexing="ij")
        m = m_function(dd, phi_function(dd, pp))
        lhs = g_eval(-pp) + m
        rhs = crucial_margin(p, dd, pp)
        gap = np.abs(lhs - rhs)
        at_zero = np.abs(m_function(deltas, 0.0))
    grid = {"delta": [float(deltas[0]), float(deltas[-1]), n_delta],
            "psi": [float(psis[0]), float(psis[-1]), n_psi]}

    def loc(arr, pick):
        i, j = np.unravel_index(pick(arr), arr.shape)
        return {"delta": float(deltas[i]), "psi": float(psis[j])}

    params = {"d1": d1}
    children = [
        CertReport("identity", params, grid, -float(gap.max()), loc(gap, np.argmax), -1e-12),
        CertReport("m_nonnegative", params, grid, float(m.min()), loc(m, np.argmin), -1e-15),
        CertReport("m_at_zero", params, {"delta": grid["delta"]}, -float(at_zero.max()),
                   {"delta": float(deltas[int(np.argmax(at_zero))]), "y": 0.0}, -1e-15),
    ]
    details = {"max_discrepancy": float(gap.max()), "min_m": float(m.min())}
    return CertReport.composite("m_phi_identity", params, children, details, clock[0])
