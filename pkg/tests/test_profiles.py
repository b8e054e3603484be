import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wormcert._numerics import adaptive_simpson
from wormcert.errors import ProfileError, QuadratureError
from wormcert.profiles import (CONCAVITY_TOL, HALF_PI, alpha_margins, build_profile,
                               build_smoothed, curvature_margin, epsilon0, g_eval, load_profile,
                               profile_from_dict, profile_to_dict, s_deriv, s_eta_deriv,
                               s_eta_eval, s_eta_quad, s_eta_second, s_eval, s_second, save_profile,
                               select_alpha, smooth_step_eval, smoothed_margins)

# Frozen high-precision values (40-digit mpmath evaluation).
G_AT_ALPHA = 6.248749509463090e-07             # exp(-1/0.07)
S_AT_PI_PLUS_005 = 0.9975020785218574530       # (cos 0.05 - exp(-20))^2
EPSILON0 = 5.623874558516781e-07               # 0.9 * g(0.07)


# -- g and the smooth step ---------------------------------------------------

def test_g_values():
    assert g_eval(-3.0) == 0.0
    assert g_eval(0.0) == 0.0
    assert g_eval(1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert g_eval(0.07) == pytest.approx(G_AT_ALPHA, rel=1e-13)


@pytest.mark.parametrize("k", range(1, 9))
def test_g_vanishes_to_infinite_order(k):
    assert g_eval(1e-2) / 1e-2 ** k < 1e-10


@given(st.floats(-50, 50, allow_nan=False))
def test_g_range(x):
    assert 0.0 <= g_eval(x) < 1.0


def test_smooth_step_values():
    assert smooth_step_eval(0.1, math.pi) == 0.0
    assert smooth_step_eval(0.1, math.pi + 0.1) == 1.0
    assert smooth_step_eval(0.1, math.pi + 0.05) == pytest.approx(0.5, abs=1e-12)


def test_smooth_step_monotone():
    x = np.linspace(math.pi, math.pi + 0.1, 20_001)
    phi = smooth_step_eval(0.1, x)
    assert np.all(np.diff(phi) >= 0.0)
    assert phi.min() == 0.0 and phi.max() == 1.0


@pytest.mark.parametrize("gamma", [0.0, -1.0])
def test_smooth_step_rejects_bad_gamma(gamma):
    with pytest.raises(ValueError):
        smooth_step_eval(gamma, 1.0)


# -- alpha and S -------------------------------------------------------------

def test_select_alpha():
    assert select_alpha() == 0.07
    assert 0.07 < 1.0 / (4.0 * math.pi)
    assert min(alpha_margins(0.07)) > 0.0


def test_select_alpha_rejects_large_alpha():
    with pytest.raises(ProfileError):
        select_alpha(0.2)


def test_profile_parameters(profile):
    assert profile.alpha < profile.beta < HALF_PI
    assert abs(s_eval(profile, math.pi + profile.beta)) <= 1e-12
    assert s_deriv(profile, math.pi + profile.beta) < 0.0
    assert profile.beta == pytest.approx(0.9991149844, abs=1e-9)


def test_s_values(profile):
    assert s_eval(profile, HALF_PI) == 1.0
    assert s_eval(profile, math.pi + 0.05) == pytest.approx(S_AT_PI_PLUS_005, rel=1e-14)
    assert s_eval(profile, -0.3) == s_eval(profile, math.pi + 0.3)
    assert np.all(s_eval(profile, np.linspace(0.0, math.pi, 1001)) == 1.0)


def test_s_bounded_by_one(profile):
    x = np.linspace(-3.0, 6.5, 100_001)
    assert s_eval(profile, x).max() <= 1.0


def test_s_round_off_matches_closed_form(profile):
    t = np.linspace(0.0, profile.alpha, 1001)
    closed = (np.cos(t) - np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)) ** 2
    assert np.max(np.abs(s_eval(profile, math.pi + t) - closed)) <= 1e-15


def _symmetric_pairs(rng, n):
    x = rng.uniform(-4.0, 4.0, n)
    a, b = HALF_PI + x, HALF_PI - x
    exact = (a - HALF_PI) == -(b - HALF_PI)
    return a, b, exact


def test_s_symmetry(profile):
    a, b, exact = _symmetric_pairs(np.random.default_rng(1), 100_000)
    diff = np.abs(s_eval(profile, a) - s_eval(profile, b))
    assert exact.mean() > 0.4
    assert np.all(diff[exact] == 0.0)
    # where rounding moved the reflected offsets apart by an ulp
    assert np.all(diff[~exact] <= 1e-15)


def test_s_eta_symmetry(smoothed):
    a, b, exact = _symmetric_pairs(np.random.default_rng(2), 100_000)
    diff = np.abs(s_eta_eval(smoothed, a) - s_eta_eval(smoothed, b))
    assert np.all(diff[exact] == 0.0)
    assert np.all(diff[~exact] <= 1e-15)


def _second_differences(f, lo, hi, h=1e-3):
    x = np.arange(lo, hi + h, h)
    v = f(x)
    return (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)


def test_s_concavity(profile):
    dd = _second_differences(lambda x: s_eval(profile, x), -profile.beta - 1.0, math.pi + profile.beta + 1.0)
    assert dd.max() <= CONCAVITY_TOL


def test_s_eta_concavity(smoothed):
    end = math.pi + smoothed.beta_eta + 1.0
    dd = _second_differences(lambda x: s_eta_eval(smoothed, x), -smoothed.beta_eta - 1.0, end)
    assert dd.max() <= CONCAVITY_TOL


def _away_from_junctions(x, gap=1e-3):
    return x[(np.abs(x) > gap) & (np.abs(x - math.pi) > gap)]


def test_s_derivative_consistency(profile):
    x = _away_from_junctions(np.random.default_rng(3).uniform(-1.5, math.pi + 1.5, 4000))
    h = 1e-6
    fd = (s_eval(profile, x + h) - s_eval(profile, x - h)) / (2 * h)
    d = s_deriv(profile, x)
    assert np.all(np.abs(fd - d) <= 1e-6 * np.maximum(1.0, np.abs(d)))
    h2 = 1e-5
    fd2 = (s_eval(profile, x + h2) - 2 * s_eval(profile, x) + s_eval(profile, x - h2)) / h2**2
    d2 = s_second(profile, x)
    assert np.all(np.abs(fd2 - d2) <= 1e-4 * np.maximum(1.0, np.abs(d2)))


def test_s_eta_derivative_consistency(smoothed):
    x = _away_from_junctions(np.random.default_rng(4).uniform(-1.5, math.pi + 1.5, 4000))
    h = 1e-6
    fd = (s_eta_eval(smoothed, x + h) - s_eta_eval(smoothed, x - h)) / (2 * h)
    d = s_eta_deriv(smoothed, x)
    assert np.all(np.abs(fd - d) <= 1e-6 * np.maximum(1.0, np.abs(d)))
    h2 = 1e-5
    fd2 = (s_eta_eval(smoothed, x + h2) - 2 * s_eta_eval(smoothed, x)
           + s_eta_eval(smoothed, x - h2)) / h2**2
    d2 = s_eta_second(smoothed, x)
    assert np.all(np.abs(fd2 - d2) <= 1e-4 * np.maximum(1.0, np.abs(d2)))


@pytest.mark.parametrize("junction", [0.0, math.pi])
def test_c11_junctions(profile, junction):
    eps = 1e-12
    left = s_deriv(profile, junction - eps)
    right = s_deriv(profile, junction + eps)
    assert abs(left - right) <= 1e-10
    for side in (-1e-9, 1e-9):
        assert abs(s_second(profile, junction + side)) <= 10.0


def test_shallow_extension_rejected():
    with pytest.raises(ProfileError, match="extension too shallow"):
        build_profile(0.07, 0.2)


def test_epsilon0(profile):
    e0 = epsilon0(profile)
    assert e0 == pytest.approx(EPSILON0, rel=1e-12)
    assert e0 < g_eval(profile.alpha)
    assert math.sqrt(s_eval(profile, math.pi + profile.alpha)) + e0 < 1.0


# -- S_eta -------------------------------------------------------------------

def test_s_eta_values(smoothed):
    assert s_eta_eval(smoothed, HALF_PI) == 1.0 + smoothed.eta
    assert s_eta_eval(smoothed, math.pi) == 1.0 + smoothed.eta
    assert abs(s_eta_eval(smoothed, smoothed.x_eta) - 1.0) <= 1e-10
    # the tabulated ramp agrees with direct adaptive quadrature
    direct = s_eta_quad(smoothed.profile, smoothed.eta, smoothed.gamma, smoothed.x_eta)
    assert abs(direct - 1.0) <= 1e-10


def test_s_eta_roots(smoothed):
    end = math.pi + smoothed.beta_eta
    assert math.pi < smoothed.x_eta < end
    assert abs(s_eta_eval(smoothed, end)) <= 1e-10
    assert s_eta_deriv(smoothed, end) != 0.0


def test_sandwich(profile, smoothed):
    x = np.linspace(-smoothed.beta_eta - 0.5, math.pi + smoothed.beta_eta + 0.5, 10_000)
    s, se = s_eval(profile, x), s_eta_eval(smoothed, x)
    assert np.all(s + smoothed.eta / 2 <= se)
    assert np.all(se <= s + 1.5 * smoothed.eta)


def test_factor_100(smoothed):
    margin, _ = curvature_margin(smoothed, 10_000)
    assert margin >= 0.0
    x = np.linspace(HALF_PI, smoothed.x_eta, 10_000)
    assert np.all(-s_eta_second(smoothed, x) >= 100.0 * np.abs(s_eta_deriv(smoothed, x)))


def test_all_smoothed_margins(smoothed):
    margins = smoothed_margins(smoothed)
    assert min(margins.values()) >= 0.0, margins


def test_admissible_eta_range(profile):
    # eta0 is operational: the factor-100 search succeeds at 5e-5 and fails at 1e-4
    assert build_smoothed(profile, 5e-5).gamma > 0.0
    with pytest.raises(ProfileError, match="eta too large for factor-100 property"):
        build_smoothed(profile, 1e-4)


def test_quadrature_error_carries_achieved_tolerance():
    with pytest.raises(QuadratureError) as info:
        adaptive_simpson(lambda t: math.sin(1.0 / t) if t > 0 else 0.0, 0.0, 1.0, 1e-14, max_depth=3)
    assert info.value.achieved > 1e-14


def test_serialization_round_trip(tmp_path, profile, smoothed):
    path = tmp_path / "profile.json"
    save_profile(path, profile, smoothed)
    p2, sp2 = load_profile(path)
    assert p2.beta == profile.beta
    assert sp2.x_eta == pytest.approx(smoothed.x_eta, abs=1e-12)
    doc = profile_to_dict(profile)
    assert set(doc) == {"alpha", "beta", "extension_c", "blend_width", "eta", "gamma", "x_eta",
                        "beta_eta"}


def test_corrupted_profile_document_rejected(profile):
    doc = profile_to_dict(profile)
    doc["beta"] = 2.0
    with pytest.raises(ProfileError):
        profile_from_dict(doc)


@settings(max_examples=200, deadline=None)
@given(st.floats(-2.0, math.pi + 2.0, allow_nan=False))
def test_s_eta_above_s(smoothed, x):
    s = s_eval(smoothed.profile, x)
    assert s + smoothed.eta / 2 <= s_eta_eval(smoothed, x) <= s + 1.5 * smoothed.eta
