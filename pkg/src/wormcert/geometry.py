"""Defining functions, membership tests and the distance to the closed domain.

Points of C^2 are carried as ``PointCW(z, w)`` where z and w are complex
scalars or equal-shaped complex arrays; every function here is vectorized
over them.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ._numerics import golden_section_min
from .errors import ChartError
from .profiles import HALF_PI, s_deriv, s_eta_eval, s_eval


class PointCW(NamedTuple):
    z: complex
    w: complex


@dataclass(frozen=True)
class RotationParams:
    """Neighborhood parameters: tube radius, smoothing, tilt and half-plane offset."""

    epsilon: float
    eta: float
    delta: float
    t: float = 0.0
    delta_tilde: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0.0 <= self.t < 1.0:
            raise ValueError(f"t must lie in [0, 1), got {self.t}")
        object.__setattr__(self, "delta_tilde", tilt_offset(self.delta))

    def with_t(self, t):
        return RotationParams(self.epsilon, self.eta, self.delta, t)

    def as_dict(self):
        return {"epsilon": self.epsilon, "eta": self.eta, "delta": self.delta,
                "t": self.t, "delta_tilde": self.delta_tilde}


def tilt_offset(delta):
    """sin(delta pi / (2 (1 - delta))): how far the rotation centre moves toward -i."""
    return math.sin(delta * math.pi / (2.0 * (1.0 - delta)))


def _chart(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ChartError("off chart: z = 0")
    return z


def _out(pt, value):
    return float(value) if np.ndim(pt.z) == 0 and np.ndim(pt.w) == 0 else value


def log_modulus(z):
    """ln |z|^2."""
    return 2.0 * np.log(np.abs(_chart(z)))


def rho_eval(p, pt):
    """|w - exp(i ln|z|^2)|^2 - S(ln|z|^2); negative exactly on Omega."""
    psi = log_modulus(pt.z)
    w = np.asarray(pt.w, dtype=complex)
    return _out(pt, np.abs(w - np.exp(1j * psi)) ** 2 - s_eval(p, psi))


def rho_gradient(p, pt):
    """Real gradient of rho as a complex pair (d/dx + i d/dy for z, same for w)."""
    z = _chart(pt.z)
    w = np.asarray(pt.w, dtype=complex)
    psi = 2.0 * np.log(np.abs(z))
    centre = np.exp(1j * psi)
    d_psi = 2.0 * np.real(np.conj(w - centre) * (-1j * centre)) - s_deriv(p, psi)
    grad_z = d_psi * 2.0 * z / np.abs(z) ** 2
    grad_w = 2.0 * (w - centre)
    return grad_z, grad_w


def rotation_angle(rp, z):
    """delta pi / 2 + (1 - delta) ln |z|^2."""
    return rp.delta * HALF_PI + (1.0 - rp.delta) * log_modulus(z)


def _rotated(rp, pt):
    gamma = rotation_angle(rp, pt.z)
    a = (np.asarray(pt.w, dtype=complex) + 1j * rp.delta_tilde) * np.exp(-1j * gamma)
    return gamma, a


def halfplane_margin(rp, pt):
    """Re((w + i delta~) exp(-i gamma(z))) - t; positive exactly on H_t."""
    _, a = _rotated(rp, pt)
    return _out(pt, np.real(a) - rp.t)


def rho_delta_eta_eval(rp, sp, pt):
    """|w + i delta~ - exp(i gamma(z))|^2 - S_eta(gamma(z)); negative exactly on D^(delta,eta)."""
    gamma = rotation_angle(rp, pt.z)
    w = np.asarray(pt.w, dtype=complex)
    val = np.abs(w + 1j * rp.delta_tilde - np.exp(1j * gamma)) ** 2 - s_eta_eval(sp, gamma)
    return _out(pt, val)


def in_domain_D(rp, sp, pt):
    """Membership in D = D^(delta,eta) intersected with H_t; False wherever z = 0."""
    z = np.asarray(pt.z, dtype=complex)
    w = np.asarray(pt.w, dtype=complex)
    ok = z != 0
    zs = np.where(ok, z, 1.0)
    inside = ok & (rho_delta_eta_eval(rp, sp, PointCW(zs, w)) < 0.0) \
        & (halfplane_margin(rp, PointCW(zs, w)) > 0.0)
    return bool(inside) if inside.ndim == 0 else inside


# ---------------------------------------------------------------------------
# distance to the closure of Omega


def _slice_distance(p, s, modulus, w):
    """Distance from (|z|, w) to the closed slice of Omega at angle s."""
    radius = np.sqrt(np.maximum(s_eval(p, s), 0.0))
    dz = modulus - np.exp(0.5 * s)
    dw = np.maximum(np.abs(w - np.exp(1j * s)) - radius, 0.0)
    return np.sqrt(dz * dz + dw * dw)


@lru_cache(maxsize=8)
def _angle_grid(p, n):
    s = np.linspace(-p.beta, math.pi + p.beta, n)
    return s, np.exp(0.5 * s), np.exp(1j * s), np.sqrt(np.maximum(s_eval(p, s), 0.0))


def distance_to_omega(p, pt, n_grid=20_000, window=None, chunk=64):
    """Euclidean distance from each point to the closure of Omega.

    Omega is rotation invariant in z and its slice at ln|z|^2 = s is the
    closed disc about exp(i s) of radius sqrt(S(s)), so the distance is the
    minimum over s in [-beta, pi + beta] of
    sqrt((|z| - e^{s/2})^2 + max(0, |w - e^{is}| - sqrt(S(s)))^2).
    The minimum is located on a uniform grid and polished by golden section.

    With `window` set, only angles within `window` of the (clamped) angle
    ln|z|^2 of each point are scanned, on a grid of `n_grid` points. The
    result is then an upper bound on the distance, which is what a
    containment check of the form "distance < r" needs.
    """
    z = np.atleast_1d(np.asarray(pt.z, dtype=complex))
    w = np.atleast_1d(np.asarray(pt.w, dtype=complex))
    z, w = np.broadcast_arrays(z, w)
    shape = z.shape
    z, w = z.ravel(), w.ravel()
    modulus = np.abs(z)
    lo_end, hi_end = -p.beta, math.pi + p.beta
    out = np.empty(z.shape)

    nonzero = modulus > 0
    inside = np.zeros(z.shape, dtype=bool)
    psi = np.full(z.shape, 0.5 * (lo_end + hi_end))
    psi[nonzero] = 2.0 * np.log(modulus[nonzero])
    inside[nonzero] = rho_eval(p, PointCW(z[nonzero], w[nonzero])) <= 0.0
    out[inside] = 0.0

    todo = np.flatnonzero(~inside)
    # The point's own angle is always a candidate; for points lying over a
    # slice of Omega it is often the exact minimizer.
    own = np.clip(psi, lo_end, hi_end)
    if window is None:
        grid, rad_z, centres, radii = _angle_grid(p, n_grid)
        step = grid[1] - grid[0]
        for start in range(0, todo.size, chunk):
            idx = todo[start:start + chunk]
            dz = modulus[idx, None] - rad_z[None, :]
            dw = np.maximum(np.abs(w[idx, None] - centres[None, :]) - radii[None, :], 0.0)
            vals = dz * dz + dw * dw
            k = np.argmin(vals, axis=1)
            seed = np.sqrt(vals[np.arange(idx.size), k])
            out[idx] = _polish(p, grid[k], step, lo_end, hi_end, modulus[idx], w[idx], seed, own[idx])
    else:
        offsets = np.linspace(-window, window, n_grid)
        step = offsets[1] - offsets[0]
        wide = max(chunk, 65536 // max(n_grid, 1))
        for start in range(0, todo.size, wide):
            idx = todo[start:start + wide]
            s = np.clip(own[idx, None] + offsets[None, :], lo_end, hi_end)
            vals = _slice_distance(p, s, modulus[idx, None], w[idx, None])
            k = np.argmin(vals, axis=1)
            best_s = s[np.arange(idx.size), k]
            seed = vals[np.arange(idx.size), k]
            out[idx] = _polish(p, best_s, step, lo_end, hi_end, modulus[idx], w[idx], seed, own[idx])
    out = out.reshape(shape)
    return float(out[0]) if np.ndim(pt.z) == 0 and np.ndim(pt.w) == 0 else out


def _polish(p, centre, step, lo_end, hi_end, modulus, w, seed, own):
    """Golden-section refinement around grid minimizers; never worse than the seeds."""
    def objective(s):
        return _slice_distance(p, s, modulus, w)

    lo = np.maximum(centre - step, lo_end)
    hi = np.minimum(centre + step, hi_end)
    _, val = golden_section_min(objective, lo, hi, tol=1e-10)
    return np.minimum(np.minimum(val, seed), objective(own))


def omega_neighborhood_contains(p, r, pt):
    """Membership in Omega(r), the open r-neighborhood of Omega."""
    if not r > 0.0:
        raise ValueError(f"r must be positive, got {r}")
    d = distance_to_omega(p, pt)
    return d < r
