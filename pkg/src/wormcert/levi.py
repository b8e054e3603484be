"""Levi forms of the half-plane and rotating-disc defining functions.

Complex derivatives follow d/dz = (d/dx - i d/dy) / 2. The Levi form of a
real function f at a point is sum_{j,k} f_{j kbar} v_j conj(v_k), taken in
the (unnormalized) complex tangent direction v = (-df/dw, df/dz).
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ChartError
from .geometry import PointCW, _chart, _rotated, halfplane_margin, rho_delta_eta_eval
from .profiles import s_eta_all, s_eta_deriv, s_eta_eval

BOUNDARY_TOL = 1e-9
FD_STEP = 1e-4
FD_STEP_RANGE = (1e-6, 1e-3)


class CaseTag(str, enum.Enum):
    DISC_LE1 = "disc_le1"
    DISC_GT1 = "disc_gt1"
    HALFPLANE = "halfplane"


@dataclass(frozen=True)
class LeviSample:
    point: PointCW
    value: float
    defect: float
    case_tag: CaseTag

    def __post_init__(self):
        if not self.defect >= 0.0:
            raise ValueError("defect must be non-negative")


def _scalar_out(pt, value):
    return float(value) if np.ndim(pt.z) == 0 and np.ndim(pt.w) == 0 else value


def levi_halfplane(rp, pt):
    """Levi form of r = t - Re((w + i delta~) e^{-i gamma(z)}).

    Equals (1 - delta)^2 (t - r) / (4 |z|^2); on the boundary r = 0 this is
    (1 - delta)^2 t / (4 |z|^2).
    """
    z = _chart(pt.z)
    r = -halfplane_margin(rp, pt)
    return _scalar_out(pt, (1.0 - rp.delta) ** 2 * (rp.t - r) / (4.0 * np.abs(z) ** 2))


def disc_levi_normalized(rp, sp, pt):
    """|z|^2 L / (1 - delta)^2 for the disc defining function, via the three-term expansion.

    The expansion uses rho_{delta,eta} = 0, so it is the Levi form only at
    boundary points.
    """
    gamma, a = _rotated(rp, pt)
    s, s1, s2 = s_eta_all(sp, gamma)
    val = s * (-s2 + 2.0 * np.real(a)) - s1 * 2.0 * np.real(1j * a) + s1 * s1
    return _scalar_out(pt, val)


def levi_disc(rp, sp, pt):
    """Levi form L(z, w) of rho_{delta,eta} at a boundary point of D^(delta,eta)."""
    z = _chart(pt.z)
    scale = (1.0 - rp.delta) ** 2 / np.abs(z) ** 2
    return _scalar_out(pt, scale * disc_levi_normalized(rp, sp, pt))


def levi_disc_decompose(rp, sp, pt):
    """Write (w + i delta~) e^{-i gamma} = 1 + sqrt(S_eta(gamma)) e^{i theta}.

    Returns (S_eta(gamma), theta, case tag). The point must lie on the
    boundary of D^(delta,eta) to within BOUNDARY_TOL in rho_{delta,eta}.
    Works elementwise on arrays, returning arrays and an array of tags.
    """
    rho = np.asarray(rho_delta_eta_eval(rp, sp, pt))
    if np.any(np.abs(rho) > BOUNDARY_TOL):
        worst = float(np.max(np.abs(rho)))
        raise ValueError(f"not a boundary point: |rho_delta_eta| = {worst:.3e}")
    gamma, a = _rotated(rp, pt)
    s_val = s_eta_eval(sp, gamma)
    theta = np.angle(a - 1.0)
    tags = np.where(np.asarray(s_val) <= 1.0, CaseTag.DISC_LE1.value, CaseTag.DISC_GT1.value)
    if np.ndim(tags) == 0:
        return float(s_val), float(theta), CaseTag(str(tags))
    return s_val, theta, tags


def case_le1_bound(s_val, theta):
    """S (1 - S + (cos theta + sqrt S)^2): the lower bound used where S_eta <= 1."""
    root = np.sqrt(np.maximum(s_val, 0.0))
    return s_val * (1.0 - s_val + (np.cos(theta) + root) ** 2)


def case_gt1_bound(rp, sp, pt):
    """2 |S_eta'(gamma)| (50 - |w + i delta~|): the lower bound used where S_eta > 1."""
    gamma, _ = _rotated(rp, pt)
    s1 = s_eta_deriv(sp, gamma)
    shifted = np.abs(np.asarray(pt.w, dtype=complex) + 1j * rp.delta_tilde)
    return _scalar_out(pt, 2.0 * np.abs(s1) * (50.0 - shifted))


# ---------------------------------------------------------------------------
# finite-difference cross-check


def _check_step(h):
    lo, hi = FD_STEP_RANGE
    if not lo <= h <= hi:
        raise ValueError(f"finite-difference step h must lie in [{lo:g}, {hi:g}], got {h!r}")


def _shift(pt, k, amount):
    z = np.asarray(pt.z, dtype=complex)
    w = np.asarray(pt.w, dtype=complex)
    unit = (1.0, 1j)[k % 2]
    if k < 2:
        return PointCW(z + amount * unit, w)
    return PointCW(z, w + amount * unit)


def real_hessian_fd(f, pt, h):
    """Central-difference gradient and Hessian of f in the real coordinates (x1, y1, x2, y2)."""
    f0 = np.asarray(f(pt), dtype=float)
    plus = [np.asarray(f(_shift(pt, k, h)), dtype=float) for k in range(4)]
    minus = [np.asarray(f(_shift(pt, k, -h)), dtype=float) for k in range(4)]
    grad = [(plus[k] - minus[k]) / (2.0 * h) for k in range(4)]
    hess = [[None] * 4 for _ in range(4)]
    for j in range(4):
        hess[j][j] = (plus[j] - 2.0 * f0 + minus[j]) / (h * h)
        for k in range(j + 1, 4):
            pp = f(_shift(_shift(pt, j, h), k, h))
            pm = f(_shift(_shift(pt, j, h), k, -h))
            mp = f(_shift(_shift(pt, j, -h), k, h))
            mm = f(_shift(_shift(pt, j, -h), k, -h))
            hess[j][k] = hess[k][j] = (np.asarray(pp) - pm - mp + mm) / (4.0 * h * h)
    return grad, hess


def levi_fd(f, pt, h=FD_STEP):
    """Levi form of an arbitrary real function by central differences.

    f maps a PointCW (possibly of arrays) to real values. The complex
    Hessian is f_{j kbar} = ((f_xx + f_yy) + i (f_xy - f_yx)) / 4 per
    coordinate pair, contracted with v = (-df/dw, df/dz).
    """
    _check_step(h)
    grad, hess = real_hessian_fd(f, pt, h)
    d_z = 0.5 * (grad[0] - 1j * grad[1])
    d_w = 0.5 * (grad[2] - 1j * grad[3])
    v = (-d_w, d_z)
    total = 0.0
    for j in range(2):
        for k in range(2):
            xj, yj, xk, yk = 2 * j, 2 * j + 1, 2 * k, 2 * k + 1
            c = 0.25 * ((hess[xj][xk] + hess[yj][yk]) + 1j * (hess[xj][yk] - hess[yj][xk]))
            total = total + c * v[j] * np.conj(v[k])
    return _scalar_out(pt, np.real(total))


def levi_fd_check(kind, rp, sp, pt, h=FD_STEP):
    """Finite-difference Levi value of the chosen defining function ("halfplane" or "disc")."""
    _check_step(h)
    if np.any(np.asarray(pt.z) == 0):
        raise ChartError("off chart: z = 0")
    kind = getattr(kind, "value", kind)
    if kind == "halfplane":
        def f(q):
            return -halfplane_margin(rp, q)
    elif kind == "disc":
        def f(q):
            return rho_delta_eta_eval(rp, sp, q)
    else:
        raise ValueError(f"unknown defining function {kind!r}; expected 'halfplane' or 'disc'")
    return levi_fd(f, pt, h)


def levi_sample(kind, rp, sp, pt, h=FD_STEP):
    """Closed-form Levi value with its finite-difference defect, as a LeviSample."""
    kind = getattr(kind, "value", kind)
    if kind == "halfplane":
        value = levi_halfplane(rp, pt)
        tag = CaseTag.HALFPLANE
    else:
        value = levi_disc(rp, sp, pt)
        tag = CaseTag.DISC_LE1 if s_eta_eval(sp, _rotated(rp, pt)[0]) <= 1.0 else CaseTag.DISC_GT1
    fd = levi_fd_check(kind, rp, sp, pt, h)
    return LeviSample(pt, float(value), abs(float(value) - float(fd)), tag)
