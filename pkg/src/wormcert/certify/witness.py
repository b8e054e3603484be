"""Failure of s-H-convexity: analytic annuli near the round-off and the
witness points p_eps that any pseudoconvex neighborhood of Omega(eps)
must contain.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from ..errors import ConfigError
from ..geometry import PointCW, distance_to_omega, rho_eval, rho_gradient
from ..profiles import DEFAULT_ALPHA, epsilon0, g_eval, s_eval
from .report import CertReport, stopwatch

DEFAULT_EPS_LIST = (1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12)
DEFAULT_S_LIST = (1.0, 2.0, 4.0)
DEFAULT_LIP_RADIUS = 0.05
INVERSE_TOL = 1e-12


def _default_epsilon0(alpha=DEFAULT_ALPHA):
    g = math.exp(-1.0 / alpha)
    return 0.9 * min(1.0 - (math.cos(alpha) - g), g)


def _eps0(p):
    return epsilon0(p) if p is not None else _default_epsilon0()


def x_epsilon(eps, p=None):
    """pi + 1/ln(2/eps), the angle where g(x - pi) = eps/2.

    Requires 0 < eps < eps0 (of `p`, or of the default profile).
    """
    eps0 = _eps0(p)
    if not 0.0 < eps < eps0:
        raise ValueError(f"eps must lie in (0, {eps0:.6g}), got {eps!r}")
    x = math.pi + 1.0 / (-math.log(eps / 2.0))
    residual = eps / 2.0 - g_eval(x - math.pi)
    if abs(residual) > INVERSE_TOL * eps / 2.0:
        raise ArithmeticError(f"g(x_eps - pi) misses eps/2 by {residual:.3e}")
    return x


def witness_point(eps, p=None):
    """p_eps = (e^{pi/4}, i sin x_eps)."""
    return PointCW(complex(math.exp(math.pi / 4.0)), 1j * math.sin(x_epsilon(eps, p)))


def certify_annuli(p, eps, phi_grid=256, phase_n=4):
    """Boundary circles of the annuli F_phi and the bottom annulus lie in Omega(eps).

    For phi in [pi, x_eps] the circles {|z|^2 = e^phi or e^{pi - phi},
    w = i sin phi} must be at distance < eps from Omega; the bottom annulus
    {1 <= |z|^2 <= e^pi, w = 0} lies in the boundary of Omega. The margin is
    eps minus the computed distance.
    """
    with stopwatch() as clock:
        x_eps = x_epsilon(eps, p)
        phi = np.linspace(math.pi, x_eps, phi_grid)
        phase = np.exp(2j * math.pi * np.arange(phase_n) / phase_n)
        mods = np.concatenate([np.exp(0.5 * phi), np.exp(0.5 * (math.pi - phi))])
        ws = np.concatenate([1j * np.sin(phi), 1j * np.sin(phi)])
        z = (mods[:, None] * phase[None, :]).ravel()
        w = np.repeat(ws, phase_n)
        circle_d = distance_to_omega(p, PointCW(z, w))
        bottom_mod = np.exp(0.5 * np.linspace(0.0, math.pi, phi_grid))
        bottom_d = distance_to_omega(p, PointCW(bottom_mod.astype(complex), np.zeros(phi_grid, complex)))
    k = int(np.argmax(circle_d))
    kb = int(np.argmax(bottom_d))
    params = {"eps": eps, "x_eps": x_eps}
    children = [
        CertReport("circles", params, {"phi": [math.pi, x_eps, phi_grid], "phase": phase_n},
                   eps - float(circle_d[k]),
                   {"phi": float(phi[(k // phase_n) % phi_grid]), "abs_z": float(abs(z[k])),
                    "which": "outer" if k < phi_grid * phase_n else "inner"}),
        CertReport("bottom", params, {"log_abs_z_sq": [0.0, math.pi, phi_grid]},
                   eps - float(bottom_d[kb]), {"abs_z": float(bottom_mod[kb])}),
    ]
    details = {"max_circle_distance": float(circle_d.max()),
               "max_bottom_distance": float(bottom_d.max())}
    return CertReport.composite(f"annuli_eps_{eps:.0e}", params, children, details, clock[0])


# ---------------------------------------------------------------------------
# Lipschitz constant of rho near Omega


@dataclass(frozen=True)
class WitnessConstants:
    lip_radius: float
    lip_L: float
    s_list: tuple = DEFAULT_S_LIST

    def __post_init__(self):
        if not (self.lip_radius > 0 and self.lip_L > 0):
            raise ValueError("lip_radius and lip_L must be positive")
        if any(s < 1 for s in self.s_list):
            raise ConfigError("every s must be >= 1")


def sample_neighborhood_closure(p, r, n, seed=0):
    """Low-discrepancy sample of the closure of Omega(r).

    A point of the closed Omega (angle s, disc angle theta, radius fraction
    u, biased to the rim) is pushed by a vector of the closed 4-ball of
    radius r. Half the points use the full radius r.
    """
    u = qmc.Halton(d=8, scramble=True, seed=seed).random(n)
    s = -p.beta + (math.pi + 2.0 * p.beta) * u[:, 0]
    theta = 2.0 * math.pi * u[:, 1]
    frac = 1.0 - u[:, 2] ** 3
    base_z = np.exp(0.5 * s) * np.exp(2j * math.pi * u[:, 3])
    base_w = np.exp(1j * s) + np.sqrt(np.maximum(s_eval(p, s), 0.0)) * frac * np.exp(1j * theta)
    gauss = ndtri(np.clip(u[:, 4:8], 1e-12, 1.0 - 1e-12))
    gauss /= np.linalg.norm(gauss, axis=1, keepdims=True)
    length = r * np.where(np.arange(n) % 2 == 0, 1.0, u[:, 7] ** 0.25)
    dz = (gauss[:, 0] + 1j * gauss[:, 1]) * length
    dw = (gauss[:, 2] + 1j * gauss[:, 3]) * length
    return PointCW(base_z + dz, base_w + dw)


def lipschitz_constants(p, lip_radius=DEFAULT_LIP_RADIUS, sample_n=100_000, s_list=DEFAULT_S_LIST,
                        seed=0):
    """1.05 times the largest sampled gradient norm of rho over the closure of Omega(lip_radius)."""
    closest = math.exp(-0.5 * p.beta)  # smallest |z| on the closure of Omega
    if not 0.0 < lip_radius < closest:
        raise ValueError(f"lip_radius too large: the closure of Omega({lip_radius}) reaches z = 0")
    pts = sample_neighborhood_closure(p, lip_radius, sample_n, seed)
    if np.min(np.abs(pts.z)) <= 0.0:
        raise ValueError("lip_radius too large: a sample reached z = 0")
    gz, gw = rho_gradient(p, pts)
    norm = np.sqrt(np.abs(gz) ** 2 + np.abs(gw) ** 2)
    return WitnessConstants(lip_radius, 1.05 * float(norm.max()), tuple(s_list))


def witness_table(p, wc, eps_list=DEFAULT_EPS_LIST):
    """One row per eps: (eps, x_eps - pi, rho(p_eps), d(p_eps, Omega), ratios (x_eps - pi)^s / eps)."""
    rows = []
    for eps in eps_list:
        x = x_epsilon(eps, p)
        pt = witness_point(eps, p)
        rows.append({
            "eps": eps,
            "x_minus_pi": x - math.pi,
            "rho": rho_eval(p, pt),
            "distance": distance_to_omega(p, pt),
            "ratios": {f"{s:g}": (x - math.pi) ** s / eps for s in wc.s_list},
        })
    return rows


def certify_witness(p, wc, eps_list=DEFAULT_EPS_LIST):
    """Witness suite: range, rho bound, distance bound and ratio divergence."""
    with stopwatch() as clock:
        eps_list = sorted(eps_list, reverse=True)
        rows = witness_table(p, wc, eps_list)
    eps0 = epsilon0(p)
    params = {"lip_radius": wc.lip_radius, "lip_L": wc.lip_L, "s_list": list(wc.s_list)}
    grid = {"eps": list(eps_list)}

    def worst(values, name):
        k = int(np.argmin(values))
        return CertReport(name, params, grid, float(values[k]), {"eps": eps_list[k]})

    in_range = [min(eps0 - r["eps"], p.alpha - r["x_minus_pi"]) for r in rows]
    rho_gap = [r["rho"] - r["x_minus_pi"] for r in rows]
    floor = [min(wc.lip_radius, r["x_minus_pi"] / wc.lip_L) for r in rows]
    dist_gap = [r["distance"] - f for r, f in zip(rows, floor)]
    children = [worst(in_range, "eps_range"), worst(rho_gap, "rho_bound"),
                worst(dist_gap, "distance_bound")]
    growth = []
    for s in wc.s_list:
        col = [r["ratios"][f"{s:g}"] for r in rows]
        growth.extend(b / a - 1.0 for a, b in zip(col, col[1:]))
    if growth:
        k = int(np.argmin(growth))
        n = len(rows) - 1
        children.append(CertReport("divergence", params, grid, float(growth[k]),
                                   {"s": wc.s_list[k // n], "eps": eps_list[k % n + 1]}))
    details = {"rows": rows}
    return CertReport.composite("witness", params, children, details, clock[0])
