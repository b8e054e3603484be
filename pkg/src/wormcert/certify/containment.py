"""Sandwich Omega-bar in D^(delta,eta) in Omega(eps), keep Omega-bar inside
the rotated half-plane domain, and search the admissible parameters.
"""

import math

import numpy as np
from scipy.stats import qmc

from .._numerics import largest_passing
from ..errors import ProfileError, SearchError
from ..geometry import (PointCW, RotationParams, distance_to_omega, halfplane_margin,
                        rho_delta_eta_eval, rotation_angle)
from ..profiles import HALF_PI, build_smoothed, s_eta_eval, s_eval
from .report import CertReport, stopwatch

DISTANCE_WINDOW = 0.02
DISTANCE_GRID = 33
SEARCH_SAMPLES = 20_000


def _halton(d, n, seed):
    return qmc.Halton(d=d, scramble=True, seed=seed).random(n)


def sample_omega_closure(p, n, seed=0, extremal=None):
    """Boundary-biased low-discrepancy sample of the closed Omega.

    Points are (e^{s/2} e^{i phase}, e^{is} + u sqrt(S(s)) e^{i theta}).
    The first half sits on the boundary (u = 1), the next quarter in the
    interior with u = 1 - v^3 (so biased toward the rim). The last quarter
    is on the boundary with theta = extremal(s, z) when a callable is given,
    which lets a check place samples where its margin is smallest.
    """
    u = _halton(4, n, seed)
    s = -p.beta + (math.pi + 2.0 * p.beta) * u[:, 0]
    theta = 2.0 * math.pi * u[:, 1]
    z = np.exp(0.5 * s) * np.exp(2j * math.pi * u[:, 3])
    frac = np.ones(n)
    half, quarter = n // 2, n // 4
    frac[half:half + quarter] = 1.0 - u[half:half + quarter, 2] ** 3
    if extremal is not None:
        tail = slice(half + quarter, n)
        theta[tail] = extremal(s[tail], z[tail])
    else:
        frac[half + quarter:] = 1.0 - u[half + quarter:, 2] ** 3
    w = np.exp(1j * s) + frac * np.sqrt(np.maximum(s_eval(p, s), 0.0)) * np.exp(1j * theta)
    return PointCW(z, w), s


def sample_disc_boundary(rp, sp, n, seed=0, dims=3):
    """Low-discrepancy sample of the boundary of D^(delta,eta).

    Parameterized by the rotation angle gamma in [-beta_eta, pi + beta_eta],
    the disc angle theta and the z-phase; gamma is inverted to |z|.
    Returns (points, gamma, theta).
    """
    u = _halton(dims, n, seed)
    gamma = -sp.beta_eta + (math.pi + 2.0 * sp.beta_eta) * u[:, 0]
    theta = 2.0 * math.pi * u[:, 1] - math.pi
    return disc_boundary_points(rp, sp, gamma, theta, u[:, 2]), gamma, theta


def disc_boundary_points(rp, sp, gamma, theta, phase_u=None):
    """Points with rotation angle gamma and (w + i delta~) e^{-i gamma} = 1 + sqrt(S_eta) e^{i theta}."""
    gamma = np.asarray(gamma, dtype=float)
    radius = np.sqrt(np.maximum(s_eta_eval(sp, gamma), 0.0))
    a = 1.0 + radius * np.exp(1j * np.asarray(theta))
    w = a * np.exp(1j * gamma) - 1j * rp.delta_tilde
    modulus = np.exp((gamma - rp.delta * HALF_PI) / (2.0 * (1.0 - rp.delta)))
    phase = 1.0 if phase_u is None else np.exp(2j * math.pi * np.asarray(phase_u))
    return PointCW(modulus * phase, w)


def _worst(name, params, grid, margins, where, tolerance=0.0):
    k = int(np.argmin(margins))
    return CertReport(name, params, grid, float(margins[k]), where(k), tolerance)


def _point_record(pt, k, **extra):
    z, w = complex(np.ravel(pt.z)[k]), complex(np.ravel(pt.w)[k])
    return {"z": [z.real, z.imag], "w": [w.real, w.imag], **extra}


def _containment_inner(p, sp, rp, n, seed):
    """Side (a): rho_{delta,eta} < 0 on sampled points of the closed Omega."""
    def farthest(s, z):
        gamma = rotation_angle(rp, z)
        v = np.exp(1j * s) + 1j * rp.delta_tilde - np.exp(1j * gamma)
        return np.angle(v)

    pts, s = sample_omega_closure(p, n, seed, farthest)
    margin = -rho_delta_eta_eval(rp, sp, pts)
    grid = {"omega_closure_samples": n, "s": [-p.beta, math.pi + p.beta]}
    return _worst("omega_in_disc_domain", rp.as_dict(), grid, margin,
                  lambda k: _point_record(pts, k, s=float(s[k])))


def _containment_outer(p, sp, rp, n, seed):
    """Side (b): distance to Omega < eps on sampled boundary points of D^(delta,eta).

    The windowed distance is an upper bound, so a positive margin is conclusive.
    """
    pts, gamma, theta = sample_disc_boundary(rp, sp, n, seed + 1)
    dist = distance_to_omega(p, pts, n_grid=DISTANCE_GRID, window=DISTANCE_WINDOW)
    margin = rp.epsilon - dist
    grid = {"disc_boundary_samples": n, "gamma": [-sp.beta_eta, math.pi + sp.beta_eta]}
    return _worst("disc_domain_in_tube", rp.as_dict(), grid, margin,
                  lambda k: _point_record(pts, k, gamma=float(gamma[k]), theta=float(theta[k])))


def certify_containments(p, sp, rp, sample_n=100_000, seed=0, sides=("inner", "outer")):
    """Omega-bar in D^(delta,eta) in Omega(eps), checked on `sample_n` samples per side."""
    with stopwatch() as clock:
        children = []
        if "inner" in sides:
            children.append(_containment_inner(p, sp, rp, sample_n, seed))
        if "outer" in sides:
            children.append(_containment_outer(p, sp, rp, sample_n, seed))
    return CertReport.composite("containment", rp.as_dict(), children, wall_time=clock[0])


def halfplane_margins(p, rp, n=100_000, seed=0):
    """Sampled points of the closed Omega and their margins in H_0^(delta)."""
    zero = rp.with_t(0.0)

    def innermost(s, z):
        return rotation_angle(zero, z) + math.pi

    pts, s = sample_omega_closure(p, n, seed + 2, innermost)
    return pts, s, halfplane_margin(zero, pts)


def find_t_delta(p, sp, rp, sample_n=100_000, seed=0):
    """Half the smallest sampled margin of the closed Omega in H_0^(delta); must be positive."""
    _, _, margin = halfplane_margins(p, rp, sample_n, seed)
    low = float(margin.min())
    if not low > 0.0:
        raise SearchError(f"closed Omega leaves H_0 for delta={rp.delta} (margin {low:.3e}); "
                          "delta exceeds the crucial-estimate range")
    return 0.5 * low


def certify_halfplane_containment(p, rp, sample_n=100_000, seed=0):
    """Omega-bar inside H_t^(delta): margin Re((w + i delta~) e^{-i gamma}) - t > 0 on samples."""
    with stopwatch() as clock:
        pts, s, margin = halfplane_margins(p, rp, sample_n, seed)
        margin = margin - rp.t
    grid = {"omega_closure_samples": sample_n}
    rep = _worst("omega_in_halfplane", rp.as_dict(), grid, margin,
                 lambda k: _point_record(pts, k, s=float(s[k])))
    rep.wall_time = clock[0]
    return rep


# ---------------------------------------------------------------------------
# parameter searches


def find_eta1(p, eps, delta_probe=1e-6, lo=1e-7, hi=1e-2, sample_n=SEARCH_SAMPLES, seed=0,
              rel_tol=math.log(1.25)):
    """Largest eta (log-bisection) whose S_eta builds and whose D stays inside Omega(eps).

    Returns (eta1, smoothed profile built at eta1).
    """
    built = {}

    def ok(eta):
        try:
            sp = build_smoothed(p, eta)
        except ProfileError:
            return False
        rp = RotationParams(eps, eta, delta_probe)
        if not certify_containments(p, sp, rp, sample_n, seed, sides=("outer",)).passed:
            return False
        built[eta] = sp
        return True

    try:
        eta1 = largest_passing(ok, lo, hi, rel_tol, log=True)
    except SearchError as exc:
        raise SearchError(f"no admissible eta in [{lo}, {hi}]: build_smoothed or the "
                          f"D-in-Omega({eps}) containment fails") from exc
    return eta1, built[eta1]


def find_d2(p, sp, eps, d_max, lo=1e-10, sample_n=SEARCH_SAMPLES, seed=0, rel_tol=math.log(1.1)):
    """Largest delta in (0, d_max] for which both containments hold on samples."""
    def ok(delta):
        rp = RotationParams(eps, sp.eta, delta)
        return certify_containments(p, sp, rp, sample_n, seed).passed

    try:
        return largest_passing(ok, lo, d_max, rel_tol, log=True)
    except SearchError as exc:
        raise SearchError(f"no admissible delta in [{lo}, {d_max}]: the containment "
                          f"Omega-bar in D^(delta,eta) in Omega({eps}) fails") from exc
