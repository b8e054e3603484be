"""Scalar radius profiles of the worm domain.

Four functions live here:

* ``g`` -- the flat function exp(-1/x) (zero for x <= 0);
* ``Phi_gamma`` -- a C-infinity step rising on [pi + gamma/4, pi + 3 gamma/4];
* ``S`` -- the concave C^{1,1} squared-radius profile, identically one on
  [0, pi], equal to (cos t - g(t))^2 for t = x - pi in [0, alpha], and
  continued past pi + alpha by a blended concave extension;
* ``S_eta`` -- the smooth concave approximant of S from above.

All evaluators are vectorized: they accept floats or arrays and return the
same kind. Everything is symmetric about pi/2 by construction, since every
evaluator first reflects x to pi/2 + |x - pi/2|.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BPoly
from scipy.special import expit

from ._numerics import adaptive_simpson, bisect_root, expand_bracket
from .errors import ProfileError, QuadratureError

HALF_PI = 0.5 * math.pi
DEFAULT_ALPHA = 0.07
DEFAULT_EXTENSION_C = 2.0
GAMMA_FLOOR = 1e-6
QUAD_TOL = 1e-11
CONCAVITY_TOL = 1e-6
CURVATURE_FACTOR = 100.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _out(x, value):
    return float(value) if np.ndim(x) == 0 else value


def _reflect(x):
    x = np.asarray(x, dtype=float)
    d = x - HALF_PI
    return HALF_PI + np.abs(d), np.where(d < 0.0, -1.0, 1.0)


# ---------------------------------------------------------------------------
# g and the smooth step


def g_eval(x):
    """exp(-1/x) for x > 0 and 0 otherwise."""
    xa = np.asarray(x, dtype=float)
    pos = xa > 0.0
    safe = np.where(pos, xa, 1.0)
    return _out(x, np.where(pos, np.exp(-1.0 / safe), 0.0))


def _g_derivs(t):
    """g, g', g'' on an array of t (zero for t <= 0)."""
    pos = t > 0.0
    s = np.where(pos, t, 1.0)
    g = np.where(pos, np.exp(-1.0 / s), 0.0)
    g1 = g / (s * s)
    g2 = g * (1.0 - 2.0 * s) / s**4
    return g, g1, g2


def _blend(u, width):
    """The g-quotient step g(u) / (g(u) + g(width - u)) and its derivative."""
    u = np.asarray(u, dtype=float)
    inside = (u > 0.0) & (u < width)
    us = np.where(inside, u, 0.5 * width)
    vs = width - us
    logit = 1.0 / vs - 1.0 / us
    val = expit(logit)
    slope = val * (1.0 - val) * (1.0 / (us * us) + 1.0 / (vs * vs))
    val = np.where(inside, val, np.where(u >= width, 1.0, 0.0))
    slope = np.where(inside, slope, 0.0)
    return val, slope


def smooth_step_eval(gamma, x):
    """Phi_gamma(x): 0 below pi + gamma/4, 1 above pi + 3 gamma/4."""
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    val, _ = _blend(np.asarray(x, dtype=float) - math.pi - 0.25 * gamma, 0.5 * gamma)
    return _out(x, val)


def smooth_step_deriv(gamma, x):
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    _, slope = _blend(np.asarray(x, dtype=float) - math.pi - 0.25 * gamma, 0.5 * gamma)
    return _out(x, slope)


# ---------------------------------------------------------------------------
# the round-off F(t) = (cos t - g(t))^2


def _round_off(t):
    """F, F', F'' for F(t) = (cos t - g(t))^2."""
    g, g1, g2 = _g_derivs(t)
    cg = np.cos(t) - g
    sg = np.sin(t) + g1
    f0 = cg * cg
    f1 = -2.0 * cg * sg
    f2 = 2.0 * sg * sg - 2.0 * cg * (np.cos(t) + g2)
    return f0, f1, f2


def _round_off_slope_scalar(t):
    """F'(t) with math-module calls (hot path of the quadrature)."""
    if t > 0.0:
        g = math.exp(-1.0 / t)
        g1 = g / (t * t)
    else:
        g = g1 = 0.0
    return -2.0 * (math.cos(t) - g) * (math.sin(t) + g1)


def _blend_scalar(u, width):
    if u <= 0.0:
        return 0.0
    if u >= width:
        return 1.0
    z = 1.0 / (width - u) - 1.0 / u
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


# ---------------------------------------------------------------------------
# alpha


def alpha_margins(alpha, n=100_001):
    """Minimum normalized slack of the three small-angle inequalities.

    On a symmetric grid of `n` points of [-alpha, alpha] (x = 0 excluded,
    where all three hold with equality) returns the minima of
    1 - |sin x - x| / |x|^3,  |sin x| / |x| - 3/4  and  2 - |tan x| / |x|.
    """
    x = np.linspace(-alpha, alpha, n)
    x = x[x != 0.0]
    ax = np.abs(x)
    cubic = 1.0 - np.abs(np.sin(x) - x) / ax**3
    lower = np.abs(np.sin(x)) / ax - 0.75
    tangent = 2.0 - np.abs(np.tan(x)) / ax
    return float(cubic.min()), float(lower.min()), float(tangent.min())


def select_alpha(candidate=DEFAULT_ALPHA, n=100_001):
    """Return a verified alpha < 1/(4 pi) satisfying the small-angle bounds."""
    if not 0.0 < candidate < 1.0 / (4.0 * math.pi):
        raise ProfileError(f"alpha={candidate} violates 0 < alpha < 1/(4 pi)")
    margins = alpha_margins(candidate, n)
    if min(margins) <= 0.0:
        raise ProfileError(f"small-angle inequalities fail for alpha={candidate}: {margins}")
    return candidate


# ---------------------------------------------------------------------------
# the profile S


@dataclass(frozen=True)
class ProfileS:
    """Concave C^{1,1} squared-radius profile S.

    Past pi + alpha the second derivative is prescribed as
    (1 - sigma) F'' - sigma * extension_c with sigma the g-quotient step of
    width `junction_blend_width`, and integrated twice from the value and
    slope of F at pi + alpha.
    """

    alpha: float
    beta: float
    extension_c: float
    junction_blend_width: float
    _corr: BPoly = field(repr=False, compare=False)
    _corr_slope: BPoly = field(repr=False, compare=False)
    _tail: tuple = field(repr=False, compare=False)  # value, slope at end of blend

    def eval(self, x):
        return s_eval(self, x)


def _blend_table(alpha, c, width, n=4096):
    """Node values of the extension correction C(u) and C'(u) on [0, width].

    With h(u) = sigma(u) (-c - F''(alpha + u)), C(u) = int_0^u (u - v) h(v) dv,
    so C' = int_0^u h and C'' = h. Cell integrals use 8-point Gauss-Legendre.
    """
    nodes = np.linspace(0.0, width, n + 1)

    def h(u):
        sig, _ = _blend(u, width)
        return sig * (-c - _round_off(alpha + u)[2])

    lo, hi = nodes[:-1, None], nodes[1:, None]
    v = 0.5 * (hi + lo) + 0.5 * (hi - lo) * _GL_NODES[None, :]
    wts = 0.5 * (hi - lo) * _GL_WEIGHTS[None, :]
    hv = h(v)
    k0 = np.concatenate([[0.0], np.cumsum((wts * hv).sum(axis=1))])
    k1 = np.concatenate([[0.0], np.cumsum((wts * v * hv).sum(axis=1))])
    corr = nodes * k0 - k1
    hn = h(nodes)
    return nodes, corr, k0, hn


def _s_core(p, r):
    """S, S', S'' at reflected abscissae r >= pi/2 (derivatives in r)."""
    t = r - math.pi
    alpha, width, c = p.alpha, p.junction_blend_width, p.extension_c
    s0 = np.ones_like(t)
    s1 = np.zeros_like(t)
    s2 = np.zeros_like(t)

    mid = (t > 0.0) & (t <= alpha + width)
    if np.any(mid):
        tm = t[mid]
        f0, f1, f2 = _round_off(tm)
        u = np.clip(tm - alpha, 0.0, width)
        ext = tm > alpha
        sig, _ = _blend(u, width)
        corr = np.where(ext, p._corr(u), 0.0)
        corr1 = np.where(ext, p._corr_slope(u), 0.0)
        s0[mid] = f0 + corr
        s1[mid] = f1 + corr1
        s2[mid] = np.where(ext, (1.0 - sig) * f2 - sig * c, f2)

    far = t > alpha + width
    if np.any(far):
        v = t[far] - alpha - width
        val, slope = p._tail
        s0[far] = val + slope * v - 0.5 * c * v * v
        s1[far] = slope - c * v
        s2[far] = -c
    return s0, s1, s2


def s_eval(p, x):
    r, _ = _reflect(x)
    return _out(x, _s_core(p, np.atleast_1d(r))[0].reshape(np.shape(r)))


def s_deriv(p, x):
    r, sign = _reflect(x)
    val = _s_core(p, np.atleast_1d(r))[1].reshape(np.shape(r)) * sign
    return _out(x, val)


def s_second(p, x):
    """Second derivative of S; at the junctions 0 and pi the outer one-sided value."""
    r, _ = _reflect(x)
    return _out(x, _s_core(p, np.atleast_1d(r))[2].reshape(np.shape(r)))


def s_all(p, x):
    """(S, S', S'') in one pass."""
    r, sign = _reflect(x)
    shape = np.shape(r)
    s0, s1, s2 = _s_core(p, np.atleast_1d(r))
    return (_out(x, s0.reshape(shape)), _out(x, (s1 * np.atleast_1d(sign)).reshape(shape)),
            _out(x, s2.reshape(shape)))


def _concavity_scan(f, lo, hi, h=1e-3):
    """Max second divided difference of f on a uniform grid of spacing <= h."""
    n = int(math.ceil((hi - lo) / h)) + 1
    x = np.linspace(lo, hi, n)
    step = x[1] - x[0]
    y = f(x)
    dd = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / step**2
    k = int(np.argmax(dd))
    return float(dd[k]), float(x[k + 1])


def build_profile(alpha=DEFAULT_ALPHA, extension_c=DEFAULT_EXTENSION_C, blend_width=None):
    """Construct and validate the profile S for the given parameters."""
    if not 0.0 < alpha < 1.0 / (4.0 * math.pi):
        raise ProfileError(f"alpha={alpha} violates 0 < alpha < 1/(4 pi)")
    if not extension_c > 0.0:
        raise ProfileError(f"extension_c must be positive, got {extension_c}")
    if blend_width is None:
        blend_width = 0.5 * alpha
    if not 0.0 < blend_width <= 0.5 * alpha:
        raise ProfileError(f"blend_width must lie in (0, alpha/2], got {blend_width}")

    nodes, corr, k0, hn = _blend_table(alpha, extension_c, blend_width)
    corr_poly = BPoly.from_derivatives(nodes, np.column_stack([corr, k0, hn]))
    slope_poly = corr_poly.derivative()
    f0, f1, _ = _round_off(np.array([alpha + blend_width]))
    tail = (float(f0[0] + corr[-1]), float(f1[0] + k0[-1]))

    proto = ProfileS(alpha, float("nan"), extension_c, blend_width,
                     corr_poly, slope_poly, tail)

    def shifted(t):
        return s_eval(proto, math.pi + t)

    lo, hi = expand_bracket(shifted, alpha, 0.05, 64.0)
    beta = bisect_root(shifted, lo, hi)
    if beta >= HALF_PI:
        raise ProfileError(f"extension too shallow; increase extension_c (beta={beta:.6f})")
    if beta <= alpha:
        raise ProfileError(f"beta={beta} does not exceed alpha={alpha}")
    p = ProfileS(alpha, beta, extension_c, blend_width, corr_poly, slope_poly, tail)
    validate_profile(p)
    return p


def validate_profile(p):
    """Check the ProfileS invariants; raises ProfileError on the first failure."""
    end = math.pi + p.beta
    if abs(s_eval(p, end)) > 1e-12:
        raise ProfileError(f"S(pi+beta)={s_eval(p, end):.3e} is not zero")
    if not s_deriv(p, end) < 0.0:
        raise ProfileError("S'(pi+beta) is not negative")
    dd, where = _concavity_scan(lambda x: s_eval(p, x), -p.beta - 1.0, end + 1.0)
    if dd > CONCAVITY_TOL:
        raise ProfileError(f"concavity fails: second difference {dd:.3e} at x={where:.6f}")
    x = np.linspace(-p.beta - 1.0, end + 1.0, 20_001)
    if np.max(s_eval(p, x)) > 1.0:
        raise ProfileError("S exceeds 1")
    flat = np.linspace(0.0, math.pi, 1001)
    if np.any(s_eval(p, flat) != 1.0):
        raise ProfileError("S is not identically 1 on [0, pi]")


def epsilon0(p):
    """Witness threshold 0.9 * min(1 - sqrt(S(pi+alpha)), g(alpha))."""
    root = math.sqrt(s_eval(p, math.pi + p.alpha))
    return 0.9 * min(1.0 - root, g_eval(p.alpha))


# ---------------------------------------------------------------------------
# the smoothed profile S_eta


@dataclass(frozen=True)
class SmoothedProfile:
    """S_eta(x) = 1 + eta + int_{pi/2}^{pi/2+|x-pi/2|} S'(t) Phi_gamma(t) dt.

    On the rising part of Phi the integral is tabulated: node-to-node
    integrals by adaptive Simpson, quintic Hermite in between (values and
    both derivatives are exact at the nodes). Past pi + 3 gamma/4 the
    integral is S(r) - S(pi + 3 gamma/4) plus the tabulated remainder.
    """

    profile: ProfileS = field(repr=False)
    eta: float
    gamma: float
    x_eta: float
    beta_eta: float
    quadrature_tol: float = QUAD_TOL
    _table: BPoly = field(default=None, repr=False, compare=False)
    _ramp_total: float = field(default=0.0, repr=False, compare=False)

    def eval(self, x):
        return s_eta_eval(self, x)


def _ramp_integrand(p, gamma):
    start = math.pi + 0.25 * gamma
    width = 0.5 * gamma

    def f(t):
        return _round_off_slope_scalar(t - math.pi) * _blend_scalar(t - start, width)

    if 0.75 * gamma > p.alpha:
        raise ProfileError("gamma too large: the ramp must sit inside [pi, pi + alpha]")
    return f


def s_eta_quad(p, eta, gamma, x, tol=QUAD_TOL):
    """Direct scalar evaluation of S_eta by adaptive Simpson (no table)."""
    r = HALF_PI + abs(float(x) - HALF_PI)
    a, b = math.pi + 0.25 * gamma, math.pi + 0.75 * gamma
    f = _ramp_integrand(p, gamma)
    if r <= a:
        return 1.0 + eta
    if r <= b:
        return 1.0 + eta + adaptive_simpson(f, a, r, tol)
    ramp = adaptive_simpson(f, a, b, tol)
    return 1.0 + eta + ramp + s_eval(p, r) - s_eval(p, b)


def _s_eta_core(sp, r):
    p, gamma = sp.profile, sp.gamma
    a, b = math.pi + 0.25 * gamma, math.pi + 0.75 * gamma
    s0, s1, s2 = _s_core(p, r)
    phi, dphi = _blend(r - a, 0.5 * gamma)
    v = np.full_like(r, 1.0 + sp.eta)
    ramp = (r > a) & (r < b)
    if np.any(ramp):
        if sp._table is not None:
            v[ramp] = 1.0 + sp.eta + sp._table(r[ramp])
        else:
            v[ramp] = [s_eta_quad(p, sp.eta, gamma, ri, sp.quadrature_tol) for ri in r[ramp]]
    tail = r >= b
    if np.any(tail):
        v[tail] = 1.0 + sp.eta + sp._ramp_total + s0[tail] - s_eval(p, b)
    return v, s1 * phi, s2 * phi + s1 * dphi


def s_eta_eval(sp, x):
    r, _ = _reflect(x)
    return _out(x, _s_eta_core(sp, np.atleast_1d(r))[0].reshape(np.shape(r)))


def s_eta_deriv(sp, x):
    r, sign = _reflect(x)
    return _out(x, (_s_eta_core(sp, np.atleast_1d(r))[1] * np.atleast_1d(sign)).reshape(np.shape(r)))


def s_eta_second(sp, x):
    r, _ = _reflect(x)
    return _out(x, _s_eta_core(sp, np.atleast_1d(r))[2].reshape(np.shape(r)))


def s_eta_all(sp, x):
    """(S_eta, S_eta', S_eta'') in one pass."""
    r, sign = _reflect(x)
    shape = np.shape(r)
    v, d1, d2 = _s_eta_core(sp, np.atleast_1d(r))
    return (_out(x, v.reshape(shape)), _out(x, (d1 * np.atleast_1d(sign)).reshape(shape)),
            _out(x, d2.reshape(shape)))


def _ramp_table(p, gamma, tol, n):
    a, b = math.pi + 0.25 * gamma, math.pi + 0.75 * gamma
    f = _ramp_integrand(p, gamma)
    nodes = np.linspace(a, b, n + 1)
    pieces = [adaptive_simpson(f, float(lo), float(hi), tol / n)
              for lo, hi in zip(nodes[:-1], nodes[1:])]
    vals = np.concatenate([[0.0], np.cumsum(pieces)])
    _, s1, s2 = _s_core(p, nodes)
    phi, dphi = _blend(nodes - a, 0.5 * gamma)
    table = BPoly.from_derivatives(nodes, np.column_stack([vals, s1 * phi, s2 * phi + s1 * dphi]))
    return table, float(vals[-1])


def curvature_margin(sp, n=10_000):
    """min over [pi/2, x_eta] of -S_eta'' - 100 |S_eta'| (grid plus a dense ramp grid)."""
    a = math.pi + 0.25 * sp.gamma
    b = min(math.pi + 0.75 * sp.gamma, sp.x_eta)
    x = np.concatenate([np.linspace(HALF_PI, sp.x_eta, n), np.linspace(a, b, n)])
    r = np.atleast_1d(x)
    _, s1, s2 = _s_core(sp.profile, r)
    phi, dphi = _blend(r - a, 0.5 * sp.gamma)
    d1 = s1 * phi
    d2 = s2 * phi + s1 * dphi
    m = -d2 - CURVATURE_FACTOR * np.abs(d1)
    k = int(np.argmin(m))
    return float(m[k]), float(x[k])


def _roots(p, eta, gamma, value_at):
    lo, hi = expand_bracket(lambda t: value_at(math.pi + t) - 1.0, 0.25 * gamma, 1e-4, 64.0)
    x_eta = math.pi + bisect_root(lambda t: value_at(math.pi + t) - 1.0, lo, hi)
    lo, hi = expand_bracket(lambda t: value_at(math.pi + t), x_eta - math.pi, 0.05, 64.0)
    beta_eta = bisect_root(lambda t: value_at(math.pi + t), lo, hi)
    return x_eta, beta_eta


def make_smoothed(p, eta, gamma, tol=QUAD_TOL, nodes=2048):
    """Build S_eta for an explicit gamma without checking the curvature property."""
    if not 0.0 < eta < 0.5:
        raise ProfileError(f"eta must lie in (0, 1/2), got {eta}")
    table, total = _ramp_table(p, gamma, tol, nodes)
    proto = SmoothedProfile(p, eta, gamma, float("nan"), float("nan"), tol, table, total)
    x_eta, beta_eta = _roots(p, eta, gamma, lambda x: s_eta_eval(proto, x))
    return SmoothedProfile(p, eta, gamma, x_eta, beta_eta, tol, table, total)


def smoothed_margins(sp, n=10_000):
    """Slack of each SmoothedProfile invariant on grids of `n` points.

    Keys: sandwich_lower, sandwich_upper, symmetry, flat, concavity,
    curvature, root_one, root_zero, root_slope, table. Each is >= 0 when the
    invariant holds (root_* and table are tolerance minus deviation).
    """
    p = sp.profile
    end = math.pi + sp.beta_eta
    x = np.linspace(-sp.beta_eta - 1.0, end + 1.0, n)
    ramp = np.linspace(math.pi, math.pi + sp.gamma, n)
    x = np.concatenate([x, ramp, math.pi - ramp])
    s = s_eval(p, x)
    se = s_eta_eval(sp, x)
    out = {
        "sandwich_lower": float(np.min(se - (s + 0.5 * sp.eta))),
        "sandwich_upper": float(np.min((s + 1.5 * sp.eta) - se)),
    }
    d = np.linspace(0.0, sp.beta_eta + 1.0, n)
    out["symmetry"] = -float(np.max(np.abs(s_eta_eval(sp, HALF_PI + d) - s_eta_eval(sp, HALF_PI - d))))
    flat = np.linspace(-0.125 * sp.gamma, math.pi + 0.125 * sp.gamma, n)
    out["flat"] = -float(np.max(np.abs(s_eta_eval(sp, flat) - (1.0 + sp.eta))))
    dd, _ = _concavity_scan(lambda t: s_eta_eval(sp, t), -sp.beta_eta - 1.0, end + 1.0)
    out["concavity"] = CONCAVITY_TOL - dd
    out["curvature"] = curvature_margin(sp, n)[0]
    out["root_one"] = 1e-10 - abs(s_eta_eval(sp, sp.x_eta) - 1.0)
    out["root_zero"] = 1e-10 - abs(s_eta_eval(sp, end))
    out["root_slope"] = -float(s_eta_deriv(sp, end))
    probes = np.linspace(math.pi + 0.25 * sp.gamma, math.pi + 0.75 * sp.gamma, 9)[1:-1]
    worst = 0.0
    for xp in probes:
        direct = s_eta_quad(p, sp.eta, sp.gamma, xp, sp.quadrature_tol)
        worst = max(worst, abs(direct - s_eta_eval(sp, xp)))
    out["table"] = 1e-10 - worst
    return out


def build_smoothed(p, eta, tol=QUAD_TOL, n=10_000):
    """Search gamma = alpha/2, alpha/4, ... until every S_eta invariant holds.

    Raises ProfileError("eta too large for factor-100 property") when the
    search reaches the gamma floor without success.
    """
    if not 0.0 < eta < 0.5:
        raise ProfileError(f"eta must lie in (0, 1/2), got {eta}")
    gamma = 0.5 * p.alpha
    last = None
    while gamma >= GAMMA_FLOOR:
        try:
            ramp = adaptive_simpson(_ramp_integrand(p, gamma), math.pi + 0.25 * gamma,
                                    math.pi + 0.75 * gamma, tol)
        except QuadratureError as exc:
            raise ProfileError(f"ramp integral failed for gamma={gamma}: {exc}") from exc

        probe = SmoothedProfile(p, eta, gamma, float("nan"), float("nan"), tol, None, ramp)
        x_eta, beta_eta = _roots(p, eta, gamma, lambda x: s_eta_eval(probe, x))
        probe = SmoothedProfile(p, eta, gamma, x_eta, beta_eta, tol, None, ramp)
        margin, _ = curvature_margin(probe, n)
        if margin >= 0.0:
            sp = make_smoothed(p, eta, gamma, tol)
            last = smoothed_margins(sp, n)
            if min(last.values()) >= 0.0:
                return sp
        gamma *= 0.5
    detail = f"; last margins {last}" if last else ""
    raise ProfileError(f"eta too large for factor-100 property (eta={eta}){detail}")


# ---------------------------------------------------------------------------
# serialization


def profile_to_dict(p, sp=None):
    doc = {
        "alpha": p.alpha,
        "beta": p.beta,
        "extension_c": p.extension_c,
        "blend_width": p.junction_blend_width,
        "eta": None, "gamma": None, "x_eta": None, "beta_eta": None,
    }
    if sp is not None:
        doc.update(eta=sp.eta, gamma=sp.gamma, x_eta=sp.x_eta, beta_eta=sp.beta_eta)
    return doc


def profile_from_dict(doc):
    """Rebuild (ProfileS, SmoothedProfile or None) and cross-check stored roots."""
    try:
        p = build_profile(float(doc["alpha"]), float(doc["extension_c"]), float(doc["blend_width"]))
    except KeyError as exc:
        raise ProfileError(f"profile document lacks field {exc}") from exc
    if doc.get("beta") is not None and abs(p.beta - float(doc["beta"])) > 1e-9:
        raise ProfileError(f"stored beta {doc['beta']} disagrees with rebuilt {p.beta}")
    sp = None
    if doc.get("eta") is not None:
        sp = make_smoothed(p, float(doc["eta"]), float(doc["gamma"]))
        margins = smoothed_margins(sp)
        if min(margins.values()) < 0.0:
            bad = {k: v for k, v in margins.items() if v < 0.0}
            raise ProfileError(f"stored smoothed profile fails invariants: {bad}")
        if doc.get("x_eta") is not None and abs(sp.x_eta - float(doc["x_eta"])) > 1e-9:
            raise ProfileError("stored x_eta disagrees with rebuilt value")
    return p, sp


def save_profile(path, p, sp=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(profile_to_dict(p, sp), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_profile(path):
    with open(path, encoding="utf-8") as fh:
        return profile_from_dict(json.load(fh))
