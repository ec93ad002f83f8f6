"""Field constructors: registry, bounds, symmetry, exact values."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divlab.fields import (
    AUTO,
    RADIAL_BOUND_CONSTANT,
    REGISTRY_EXAMPLES,
    Ball,
    OutOfDomainError,
    constant_field,
    counterexample_potential,
    extrude_field_3d,
    field_to_potential,
    gamma_bounds,
    get_field,
    make_capillary_field,
    make_counterexample_field,
    make_twisting_field,
    potential_to_field,
    stream_bump_field,
    translate_field,
    zero_field,
    _twisting_balls,
)


# ---------------------------------------------------------------------------
# amplitude bounds

def test_gamma_bounds_n4_closed_forms():
    lo, hi = gamma_bounds(4)
    assert abs(lo - 2.0 / (math.pi + 3.0**0.75)) < 1e-13
    assert abs(hi - 2.0 ** (-8.0 / 3.0)) < 1e-13
    assert RADIAL_BOUND_CONSTANT == pytest.approx((math.pi + 3.0**0.75) / 2.0,
                                                  rel=1e-15)


def test_gamma_bounds_need_n_at_least_4():
    with pytest.raises(ValueError):
        gamma_bounds(3)


@pytest.mark.parametrize("n", [4, 5, 6, 8])
def test_gamma_bounds_positive_and_shrinking(n):
    lo, hi = gamma_bounds(n)
    assert lo > 0 and hi > 0
    if n > 4:
        assert hi < gamma_bounds(n - 1)[1]


def test_auto_gamma_is_the_smaller_bound():
    P = counterexample_potential(4, AUTO)
    assert P.gamma == min(gamma_bounds(4))


def test_field_constructor_names_the_violated_bound():
    with pytest.raises(ValueError, match="radial-slope"):
        make_counterexample_field(4, 1.0)
    with pytest.raises(ValueError, match="vertical-growth"):
        make_counterexample_field(4, 0.2)
    with pytest.raises(ValueError, match="positive"):
        make_counterexample_field(4, -0.5)


def test_potential_tolerates_inadmissible_gamma():
    # the potential itself stays well defined, so an out-of-bound amplitude
    # can still be certified downstream (and found wanting)
    P = counterexample_potential(4, 1.0)
    assert P.gamma == 1.0
    v = P.V(np.array([1.0]), np.array([2.0]))
    assert np.isfinite(v).all()


# ---------------------------------------------------------------------------
# half-space counterexample

def test_axis_speed_matches_arctan_limit(counterexample_auto):
    v = counterexample_auto.eval(np.array([[0.0, 0.0, 0.0, 1.0]]))[0]
    gamma = min(gamma_bounds(4))
    assert float(np.linalg.norm(v)) == pytest.approx(gamma * math.pi / 4.0,
                                                     abs=1e-15)


def test_counterexample_vanishes_below_interface(counterexample_auto, rng):
    pts = rng.uniform(-3.0, 3.0, size=(64, 4))
    pts[:, -1] = -np.abs(pts[:, -1]) - 1e-12
    assert np.all(counterexample_auto.eval(pts) == 0.0)


def test_counterexample_respects_sup_bound(counterexample_auto, rng):
    pts = rng.uniform(-5.0, 5.0, size=(512, 4))
    speeds = np.linalg.norm(counterexample_auto.eval(pts), axis=1)
    assert np.all(speeds <= counterexample_auto.sup_bound + 1e-12)


def test_potential_field_round_trip():
    P = counterexample_potential(4, AUTO)
    f = potential_to_field(P)
    Q = field_to_potential(f)
    rho = np.linspace(0.05, 8.0, 12)
    z = np.linspace(-1.0, 6.0, 12)
    RR, ZZ = np.meshgrid(rho, z)
    assert np.max(np.abs(Q.V(RR, ZZ) - P.V(RR, ZZ))) < 1e-10
    fr, fz = Q.dV(RR, ZZ)
    pr, pz = P.dV(RR, ZZ)
    assert np.max(np.abs(fr - pr)) < 1e-12
    assert np.max(np.abs(fz - pz)) < 1e-12


def test_field_to_potential_rejects_asymmetric_input():
    with pytest.raises(ValueError):
        field_to_potential(constant_field([1.0, 0.0, 0.0, 0.0]))


# ---------------------------------------------------------------------------
# twisting eddy stack

def test_twisting_ball_count():
    balls = _twisting_balls(8)
    assert len(balls) == 2**9 - 2 - 8
    assert all(isinstance(b, Ball) for b in balls)


def test_twisting_balls_stay_in_open_square():
    for b in _twisting_balls(6):
        assert b.center[0] - b.radius > 0.0
        assert b.center[0] + b.radius < 1.0
        assert b.center[1] - b.radius > 0.0
        assert b.center[1] + b.radius < 1.0


def test_twisting_vanishes_off_eddies(twisting8):
    # 0.33 lies in the vertical gap between the level-2 eddies (top 0.3125)
    # and the level-1 eddy (bottom 0.375)
    pts = np.array([[0.5, -0.25], [0.5, 2.0], [-1.0, 0.5], [0.5, 0.33]])
    assert np.all(twisting8.eval(pts) == 0.0)


def test_twisting_speed_calibration(twisting8):
    # per-ball speed profile is calibrated to peak exactly at 1
    b = twisting8.balls[0]
    s = np.linspace(1e-6, b.radius * (1 - 1e-9), 4001)
    pts = np.stack([b.center[0] + s, np.full_like(s, b.center[1])], axis=1)
    speeds = np.linalg.norm(twisting8.eval(pts), axis=1)
    assert speeds.max() == pytest.approx(1.0, abs=1e-6)
    assert np.all(speeds <= 1.0 + 1e-12)


@settings(max_examples=50, deadline=None)
@given(x=st.floats(-0.5, 1.5), y=st.floats(-0.5, 1.5))
def test_twisting_sup_bound_everywhere(x, y):
    f = make_twisting_field(4)
    speed = float(np.linalg.norm(f.eval(np.array([[x, y]]))[0]))
    assert speed <= 1.0 + 1e-12


def test_twisting_analytic_div_is_zero(twisting8, rng):
    pts = rng.uniform(0.0, 1.0, size=(32, 2))
    assert np.all(twisting8.analytic_div(pts) == 0.0)


def test_twisting_rejects_degenerate_level():
    with pytest.raises(ValueError):
        make_twisting_field(0)


# ---------------------------------------------------------------------------
# capillary disk field

def test_capillary_is_identity_over_radius(capillary, rng):
    ang = rng.uniform(0.0, 2.0 * math.pi, 16)
    rad = rng.uniform(0.0, 0.99, 16)
    pts = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    assert np.max(np.abs(capillary.eval(pts) - pts)) < 1e-15


def test_capillary_domain_is_the_open_disk(capillary):
    with pytest.raises(OutOfDomainError):
        capillary.eval(np.array([[1.5, 0.0]]))
    inside = capillary.domain(np.array([[0.3, 0.4], [0.8, 0.61], [1.0, 0.0]]))
    assert inside.tolist() == [True, False, False]


def test_capillary_constant_divergence(capillary, rng):
    pts = rng.uniform(-0.5, 0.5, size=(8, 2))
    assert np.allclose(capillary.analytic_div(pts), 2.0, atol=1e-15)


# ---------------------------------------------------------------------------
# stream bump and lifting

def test_stream_bump_support_and_bound(stream_bump, rng):
    pts = rng.uniform(-5.0, 5.0, size=(256, 2))
    vals = stream_bump.eval(pts)
    speeds = np.linalg.norm(vals, axis=1)
    assert np.all(speeds <= stream_bump.sup_bound + 1e-15)
    outside = (pts[:, 1] <= 1.0) | (pts[:, 1] >= 2.0)
    assert np.all(vals[outside] == 0.0)


def test_extrusion_matches_planar_slice(stream_bump, rng):
    f3 = extrude_field_3d(stream_bump)
    assert f3.dim == 3
    pts3 = rng.uniform(-3.0, 3.0, size=(32, 3))
    pts2 = pts3[:, [0, 2]]
    v2 = stream_bump.eval(pts2)
    v3 = f3.eval(pts3)
    assert np.all(v3[:, 0] == v2[:, 0])
    assert np.all(v3[:, 1] == 0.0)
    assert np.all(v3[:, 2] == v2[:, 1])
    assert np.all(f3.analytic_div(pts3) == 0.0)


@settings(max_examples=25, deadline=None)
@given(sx=st.floats(-2.0, 2.0), sz=st.floats(-2.0, 2.0),
       px=st.floats(-3.0, 3.0), pz=st.floats(-3.0, 3.0))
def test_translate_field_shifts_evaluation(sx, sz, px, pz):
    f = stream_bump_field()
    g = translate_field(f, (sx, sz))
    p = np.array([[px, pz]])
    assert np.array_equal(g.eval(p), f.eval(p - np.array([sx, sz])))


# ---------------------------------------------------------------------------
# registry

def test_registry_examples_all_construct():
    for name in REGISTRY_EXAMPLES:
        f = get_field(name)
        assert f.dim in (2, 3, 4)


def test_get_field_grammar():
    assert get_field("zero:dim=3").dim == 3
    c = get_field("constant:c=0.5,-2")
    assert np.array_equal(c.eval(np.zeros((1, 2))), [[0.5, -2.0]])
    assert get_field("stream:bump:3d").dim == 3
    assert get_field("twisting:levels=3").max_level == 3


def test_get_field_rejects_unknown():
    with pytest.raises(ValueError):
        get_field("vortex:sheet")


def test_zero_and_constant_fields(rng):
    z = zero_field(3)
    pts = rng.normal(size=(8, 3))
    assert np.all(z.eval(pts) == 0.0)
    c = constant_field([1.0, -2.0])
    assert np.all(c.analytic_div(pts[:, :2]) == 0.0)
    assert np.all(c.analytic_jacobian(pts[:, :2]) == 0.0)
