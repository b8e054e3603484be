"""Sampled Levi-form certification on the two boundary pieces of D."""

import math

import numpy as np
from scipy.stats import qmc

from ..geometry import PointCW, halfplane_margin
from ..levi import (FD_STEP, case_gt1_bound, case_le1_bound, disc_levi_normalized, levi_disc,
                    levi_disc_decompose, levi_fd_check, levi_halfplane)
from ..profiles import HALF_PI
from .containment import disc_boundary_points
from .report import CertReport, stopwatch

DISC_TOL = -1e-9
HALFPLANE_TOL = -1e-12
DISC_FD_TOL = 1e-4
HALFPLANE_FD_TOL = 1e-5
HALFPLANE_SPAN = 3.0  # |Im| range of the sampled half-plane boundary lines


def disc_levi_samples(rp, sp, n, seed=0):
    """n boundary points of D^(delta,eta) with Re((w + i delta~) e^{-i gamma}) > 0.

    Draws a Halton sequence over (gamma, theta, phase) and keeps the first n
    points lying in H_0^(delta).
    """
    engine = qmc.Halton(d=3, scramble=True, seed=seed)
    kept = []
    total = 0
    while total < n:
        u = engine.random(2 * n)
        gamma = -sp.beta_eta + (math.pi + 2.0 * sp.beta_eta) * u[:, 0]
        theta = 2.0 * math.pi * u[:, 1] - math.pi
        pts = disc_boundary_points(rp, sp, gamma, theta, u[:, 2])
        good = halfplane_margin(rp.with_t(0.0), pts) > 0.0
        kept.append((pts.z[good], pts.w[good]))
        total += int(good.sum())
    z = np.concatenate([k[0] for k in kept])[:n]
    w = np.concatenate([k[1] for k in kept])[:n]
    return PointCW(z, w)


def halfplane_levi_samples(rp, sp, n, seed=0):
    """n points of the boundary of H_t^(delta): (w + i delta~) e^{-i gamma} = t + i y.

    ln|z|^2 ranges over the z-shadow of D^(delta,eta) and y over
    [-HALFPLANE_SPAN, HALFPLANE_SPAN]. Every such point lies in H_0^(delta) once t > 0.
    """
    u = qmc.Halton(d=3, scramble=True, seed=seed + 7).random(n)
    gamma = -sp.beta_eta + (math.pi + 2.0 * sp.beta_eta) * u[:, 0]
    y = HALFPLANE_SPAN * (2.0 * u[:, 1] - 1.0)
    w = (rp.t + 1j * y) * np.exp(1j * gamma) - 1j * rp.delta_tilde
    modulus = np.exp((gamma - rp.delta * HALF_PI) / (2.0 * (1.0 - rp.delta)))
    return PointCW(modulus * np.exp(2j * math.pi * u[:, 2]), w)


def flat_zone_disc_samples(rp, sp, n, seed=0):
    """Boundary points of D^(delta,eta) over the flat zone, where S_eta = 1 + eta."""
    u = qmc.Halton(d=3, scramble=True, seed=seed + 11).random(n)
    gamma = 0.1 + (math.pi - 0.2) * u[:, 0]
    theta = 0.9 * math.pi * (2.0 * u[:, 1] - 1.0)
    return disc_boundary_points(rp, sp, gamma, theta, u[:, 2])


def halfplane_closed_form(rp, pt):
    """(1 - delta)^2 t / (4 |z|^2)."""
    return (1.0 - rp.delta) ** 2 * rp.t / (4.0 * np.abs(np.asarray(pt.z)) ** 2)


def _record(pt, k, **extra):
    z, w = complex(pt.z[k]), complex(pt.w[k])
    return {"z": [z.real, z.imag], "w": [w.real, w.imag], **extra}


def _worst(name, params, grid, margins, pts, tolerance, idx=None, **extra):
    margins = np.asarray(margins, dtype=float)
    if margins.size == 0:
        return CertReport(name, params, grid, math.inf, {"empty": True}, tolerance)
    k = int(np.argmin(margins))
    where = _record(pts, int(idx[k]) if idx is not None else k, **extra)
    return CertReport(name, params, grid, float(margins[k]), where, tolerance)


def certify_levi(p, sp, rp, sample_n=100_000, fd_n=1000, seed=0, h=FD_STEP):
    """Levi nonnegativity on both boundary pieces of D, with the proof's case bounds.

    Children:
      disc_levi         levi_disc >= -1e-9 on disc boundary points in H_0
      case_le1          |z|^2 L/(1-delta)^2 >= theta-bound - 1e-9 where S_eta <= 1
      case_le1_bound    the theta-bound itself >= -1e-12
      case_gt1          |z|^2 L/(1-delta)^2 > 2|S_eta'|(50 - |w + i delta~|) - 1e-9 where S_eta > 1
      radius_50         |w + i delta~| < 50 where S_eta > 1
      halfplane_levi    levi_halfplane >= -1e-12 on the half-plane boundary
      disc_fd           |closed form - finite differences| <= 1e-4 on flat-zone disc points
      halfplane_fd      |closed form - finite differences| <= 1e-5 on half-plane points
    The relative gap between levi_halfplane and (1-delta)^2 t/(4|z|^2) is
    recorded in the details, not used as a pass condition.
    """
    params = rp.as_dict()
    with stopwatch() as clock:
        disc = disc_levi_samples(rp, sp, sample_n, seed)
        value = levi_disc(rp, sp, disc)
        normalized = disc_levi_normalized(rp, sp, disc)
        s_val, theta, tags = levi_disc_decompose(rp, sp, disc)
        le1 = np.flatnonzero(tags == "disc_le1")
        gt1 = np.flatnonzero(tags == "disc_gt1")
        bound_le1 = case_le1_bound(s_val[le1], theta[le1])
        bound_gt1 = case_gt1_bound(rp, sp, PointCW(disc.z[gt1], disc.w[gt1]))
        shifted = np.abs(disc.w[gt1] + 1j * rp.delta_tilde)

        half = halfplane_levi_samples(rp, sp, sample_n, seed)
        hvalue = levi_halfplane(rp, half)
        closed = halfplane_closed_form(rp, half)
        rel_gap = np.abs(hvalue - closed) / closed

        flat = flat_zone_disc_samples(rp, sp, fd_n, seed)
        disc_defect = np.abs(levi_disc(rp, sp, flat) - levi_fd_check("disc", rp, sp, flat, h))
        hsub = PointCW(half.z[:fd_n], half.w[:fd_n])
        half_defect = np.abs(hvalue[:fd_n] - levi_fd_check("halfplane", rp, sp, hsub, h))

    disc_grid = {"disc_boundary_samples": sample_n, "gamma": [-sp.beta_eta, math.pi + sp.beta_eta]}
    half_grid = {"halfplane_samples": sample_n, "im_span": HALFPLANE_SPAN}
    children = [
        _worst("disc_levi", params, disc_grid, value, disc, DISC_TOL),
        _worst("case_le1", params, disc_grid, normalized[le1] - bound_le1, disc, DISC_TOL, le1),
        _worst("case_le1_bound", params, disc_grid, bound_le1, disc, HALFPLANE_TOL, le1),
        _worst("case_gt1", params, disc_grid, normalized[gt1] - bound_gt1, disc, DISC_TOL, gt1),
        _worst("radius_50", params, disc_grid, 50.0 - shifted, disc, 0.0, gt1),
        _worst("halfplane_levi", params, half_grid, hvalue, half, HALFPLANE_TOL),
        _worst("disc_fd", params, {"flat_zone_samples": fd_n, "h": h}, -disc_defect, flat,
               -DISC_FD_TOL),
        _worst("halfplane_fd", params, {"halfplane_samples": fd_n, "h": h}, -half_defect, hsub,
               -HALFPLANE_FD_TOL),
    ]
    details = {
        "case_counts": {"disc_le1": int(le1.size), "disc_gt1": int(gt1.size),
                        "halfplane": int(sample_n)},
        "max_disc_fd_defect": float(disc_defect.max()),
        "max_halfplane_fd_defect": float(half_defect.max()),
        "halfplane_closed_form_max_rel_gap": float(rel_gap.max()),
    }
    return CertReport.composite("levi", params, children, details, clock[0])
