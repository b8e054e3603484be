"""End-to-end certification run: parameter selection and the ordered check list."""

import math
from dataclasses import dataclass, field

from ..geometry import RotationParams
from ..profiles import build_smoothed, epsilon0, smoothed_margins, validate_profile
from .containment import (SEARCH_SAMPLES, certify_containments, certify_halfplane_containment,
                          find_d2, find_eta1, find_t_delta)
from .crucial import certify_crucial_estimate, find_d1, m_phi_identity_check
from .levi_suite import certify_levi
from .report import CertReport, stopwatch
from .witness import (DEFAULT_EPS_LIST, DEFAULT_LIP_RADIUS, DEFAULT_S_LIST, certify_annuli,
                      certify_witness, lipschitz_constants)

DEFAULT_TUBE_EPS = 0.1


@dataclass
class RunSettings:
    tube_eps: float = DEFAULT_TUBE_EPS
    eps_list: tuple = DEFAULT_EPS_LIST
    s_list: tuple = DEFAULT_S_LIST
    grid_scale: float = 1.0
    seed: int = 0
    lip_radius: float = DEFAULT_LIP_RADIUS

    def count(self, n, floor=16):
        return max(floor, int(round(n * self.grid_scale)))


@dataclass
class Selection:
    """Parameters chosen by the searches, plus what they were derived from."""

    d1: float
    eta1: float
    d2: float
    t_delta: float
    sp: object = field(repr=False)
    rp: RotationParams = None

    def as_dict(self):
        return {"d1": self.d1, "eta1": self.eta1, "d2": self.d2, "t_delta": self.t_delta,
                "eta": self.sp.eta, "gamma": self.sp.gamma, "x_eta": self.sp.x_eta,
                "beta_eta": self.sp.beta_eta, **self.rp.as_dict()}


def select_parameters(p, settings, d1=None):
    """eta = eta1/2, delta = min(d1, d2)/2 and t = t_delta/2 at the tube radius settings.tube_eps."""
    search_n = settings.count(SEARCH_SAMPLES, 256)
    if d1 is None:
        d1 = find_d1(p, settings.count(512), settings.count(4096))
    eta1, _ = find_eta1(p, settings.tube_eps, sample_n=search_n, seed=settings.seed)
    sp = build_smoothed(p, 0.5 * eta1)
    d2 = find_d2(p, sp, settings.tube_eps, d1, sample_n=search_n, seed=settings.seed)
    delta = 0.5 * min(d1, d2)
    probe = RotationParams(settings.tube_eps, sp.eta, delta)
    t_delta = find_t_delta(p, sp, probe, settings.count(100_000), settings.seed)
    rp = probe.with_t(0.5 * t_delta)
    return Selection(d1, eta1, d2, t_delta, sp, rp)


def profile_report(p):
    """ProfileS invariants (validate_profile raises on failure) and eps0."""
    with stopwatch() as clock:
        validate_profile(p)
    params = {"alpha": p.alpha, "beta": p.beta, "extension_c": p.extension_c,
              "blend_width": p.junction_blend_width}
    margin = min(p.beta - p.alpha, 0.5 * math.pi - p.beta, epsilon0(p))
    return CertReport("profile_invariants", params, {"beta_root_tol": 1e-12}, margin,
                      {"beta": p.beta}, 0.0, clock[0], {"epsilon0": epsilon0(p)})


def smoothed_report(sp, n=10_000):
    with stopwatch() as clock:
        margins = smoothed_margins(sp, n)
    worst = min(margins, key=margins.get)
    params = {"eta": sp.eta, "gamma": sp.gamma, "x_eta": sp.x_eta, "beta_eta": sp.beta_eta}
    # the slacks are non-strict (the flat-zone one is exactly zero), so allow rounding
    return CertReport("smoothed_profile", params, {"points": n}, margins[worst],
                      {"invariant": worst}, -1e-15, clock[0], {"margins": margins})


def run_checks(p, settings):
    """Yield CertReports in pipeline order; the caller decides when to stop."""
    s = settings
    yield profile_report(p)
    with stopwatch() as clock:
        d1 = find_d1(p, s.count(512), s.count(4096))
    crucial = certify_crucial_estimate(p, d1, s.count(512), s.count(4096))
    crucial.details = {"d1": d1, "search_time_s": clock[0]}
    yield crucial
    with stopwatch() as clock:
        sel = select_parameters(p, s, d1)
    smooth = smoothed_report(sel.sp, s.count(10_000))
    smooth.details["selection"] = sel.as_dict()
    smooth.details["search_time_s"] = clock[0]
    yield smooth
    yield certify_containments(p, sel.sp, sel.rp, s.count(100_000), s.seed)
    yield certify_halfplane_containment(p, sel.rp, s.count(100_000), s.seed)
    yield certify_levi(p, sel.sp, sel.rp, s.count(100_000), s.count(1000), s.seed)
    yield m_phi_identity_check(p, d1, s.count(256), s.count(256))
    annuli = [certify_annuli(p, eps, s.count(256)) for eps in s.eps_list]
    yield CertReport.composite("annuli", {"eps_list": list(s.eps_list)}, annuli,
                               wall_time=sum(a.wall_time for a in annuli))
    wc = lipschitz_constants(p, s.lip_radius, s.count(100_000), s.s_list, s.seed)
    yield certify_witness(p, wc, s.eps_list)
