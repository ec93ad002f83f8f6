"""Interface geometry and the four weak-trace probes.

Frozen numerical values come from deterministic quadrature (no RNG), so
they are reproducible bit-for-bit up to libm differences; tolerances of
1e-12 leave room for that.
"""

import math

import numpy as np
import pytest

from divlab.calculus import RectRegion, bump_test
from divlab.fields import constant_field, make_capillary_field, \
    make_twisting_field, zero_field
from divlab.trace import (
    AP_LIM_CONFIRMED, AP_LIM_REJECTED,
    circle_interface, density, line_interface, one_sided_ap_lim,
    weak_trace_ball_average, weak_trace_curvilinear, weak_trace_pairing,
    weak_trace_sphere_flux, _tail_fit,
)

RADII = [2.0 ** -k for k in range(3, 9)]


# ---------------------------------------------------------------------------
# interfaces

class TestInterfaces:
    def test_line_default_normal_is_left_of_direction(self):
        S = line_interface((0.0, 0.0), (1.0, 0.0))
        assert np.allclose(S.normal_at((3.0, 0.0)), (0.0, 1.0))

    def test_line_frame_defects_vanish(self):
        S = line_interface((1.0, 2.0), (3.0, 4.0))
        nd, od = S.frame_defects(np.linspace(-5.0, 5.0, 41))
        assert nd <= 1e-15
        assert od <= 1e-15

    def test_line_rejects_non_orthogonal_normal(self):
        with pytest.raises(ValueError, match="orthogonal"):
            line_interface((0.0, 0.0), (1.0, 0.0), normal=(0.1, 1.0))

    def test_line_distance(self):
        S = line_interface((0.0, 1.0), (1.0, 0.0))
        assert S.distance((7.0, 3.5)) == pytest.approx(2.5, abs=1e-15)

    def test_circle_outward_and_inward_normals(self):
        out = circle_interface((0.0, 0.0), 2.0, outward=True)
        inn = circle_interface((0.0, 0.0), 2.0, outward=False)
        assert np.allclose(out.normal_at((2.0, 0.0)), (1.0, 0.0))
        assert np.allclose(inn.normal_at((2.0, 0.0)), (-1.0, 0.0))

    def test_circle_frame_defects_vanish(self):
        S = circle_interface((0.5, -0.5), 1.5)
        nd, od = S.frame_defects(np.linspace(0.0, 2.0 * math.pi * 1.5, 64))
        assert nd <= 1e-14
        assert od <= 1e-14

    def test_circle_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError, match="positive"):
            circle_interface((0.0, 0.0), 0.0)

    def test_require_on_accepts_and_rejects(self):
        S = circle_interface((0.0, 0.0), 1.0)
        S.require_on((1.0, 0.0))
        with pytest.raises(ValueError, match="from the interface"):
            S.require_on((1.01, 0.0))

    def test_probes_reject_off_interface_points(self):
        S = line_interface()
        f = constant_field((0.0, 1.0))
        with pytest.raises(ValueError, match="from the interface"):
            weak_trace_ball_average(f, S, (0.0, 0.5), RADII)


# ---------------------------------------------------------------------------
# constant fields: every probe must reproduce the normal component exactly

class TestConstantFieldExactness:
    C = (0.3, -0.8)

    def setup_method(self):
        self.f = constant_field(self.C)
        self.S = line_interface()  # y = 0, normal (0, 1)

    def test_ball_average(self):
        p = weak_trace_ball_average(self.f, self.S, (0.2, 0.0), RADII)
        assert max(abs(e - self.C[1]) for e in p.estimates) <= 1e-14
        assert p.extrapolated == pytest.approx(self.C[1], abs=1e-14)
        assert not p.oscillating

    def test_curvilinear(self):
        p = weak_trace_curvilinear(self.f, self.S, (0.2, 0.0), 0.25, RADII)
        assert max(abs(e - self.C[1]) for e in p.estimates) <= 1e-14
        assert p.extrapolated == pytest.approx(self.C[1], abs=1e-14)

    def test_sphere_flux(self):
        # the half-circle chord pairing balances the flux through the flat
        # diameter, so constants come out exact, not just in the limit
        p = weak_trace_sphere_flux(self.f, self.S, (0.2, 0.0), RADII)
        assert max(abs(e - self.C[1]) for e in p.estimates) <= 1e-14
        assert p.extrapolated == pytest.approx(self.C[1], abs=1e-14)

    def test_tilted_line(self):
        S = line_interface((0.0, 0.0), (1.0, 1.0))
        nu = S.normal_at((0.0, 0.0))
        want = float(np.asarray(self.C) @ nu)
        p = weak_trace_ball_average(self.f, S, (0.0, 0.0), RADII)
        assert p.extrapolated == pytest.approx(want, abs=1e-13)


# ---------------------------------------------------------------------------
# radial disk field on its rim: closed forms for all three probes

class TestCapillaryProbes:
    X0 = (1.0, 0.0)

    def setup_method(self):
        self.f = make_capillary_field(1.0)
        self.S = circle_interface((0.0, 0.0), 1.0, outward=True)

    def test_ball_average_normalizes_by_the_lens(self):
        # one-sided window: the average must head to 1, not to 1/2
        p = weak_trace_ball_average(self.f, self.S, self.X0, RADII)
        frozen = (0.9455660967716958, 0.9731254795275047, 0.9866495242692067,
                  0.9933466044804015, 0.9966787810594704, 0.9983407625111684)
        assert np.allclose(p.estimates, frozen, rtol=0.0, atol=1e-12)
        assert p.extrapolated == pytest.approx(1.0000184182316565, abs=1e-10)
        assert not p.oscillating

    def test_curvilinear_limit_is_the_arc_average(self):
        # fixed patch half-width rho on the unit circle: the r -> 0 limit
        # averages cos(theta) over [-rho, rho], which is sin(rho)/rho
        rho = 0.1
        p = weak_trace_curvilinear(self.f, self.S, self.X0, rho, RADII)
        assert p.extrapolated == pytest.approx(math.sin(rho) / rho,
                                               abs=1e-10)

    def test_sphere_flux_matches_the_chord_closed_form(self):
        p = weak_trace_sphere_flux(self.f, self.S, self.X0, RADII)
        for r, est in zip(RADII, p.estimates):
            want = math.sqrt(1.0 - r * r / 4.0) - r * math.acos(r / 2.0)
            assert est == pytest.approx(want, abs=1e-12)
        assert p.extrapolated == pytest.approx(0.9999228731867713, abs=1e-10)

    def test_flux_requires_rim_point(self):
        # (0, 0) sits on this probe circle but not on the field's rim
        with pytest.raises(ValueError, match="rim"):
            weak_trace_sphere_flux(self.f, circle_interface((0.5, 0.0), 0.5),
                                   (0.0, 0.0), RADII)


# ---------------------------------------------------------------------------
# twisting field: genuine oscillation at an off-center boundary point

class TestTwistingOscillation:
    def setup_method(self):
        self.S = line_interface((0.0, 0.0), (1.0, 0.0), normal=(0.0, -1.0))

    def test_ball_averages_alternate(self, twisting12):
        p = weak_trace_ball_average(twisting12, self.S, (1.0 / 3.0, 0.0),
                                    RADII)
        mag = 0.005223776617826563
        signs = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0]
        for est, s in zip(p.estimates, signs):
            assert est == pytest.approx(s * mag, abs=1e-12)
        assert p.oscillating
        assert p.oscillation == pytest.approx(0.011121588928275757, abs=1e-10)

    def test_mirror_point_cancels_exactly(self, twisting12):
        # x = 1/2 is a mirror axis of the eddy lattice: clipped patches come
        # in pairs whose closed-form contributions cancel bitwise
        p = weak_trace_ball_average(twisting12, self.S, (0.5, 0.0), RADII)
        assert all(e == 0.0 for e in p.estimates)
        assert not p.oscillating


# ---------------------------------------------------------------------------
# distributional pairing

class TestPairing:
    def test_twisting_pairings_vanish(self, twisting8):
        reg = RectRegion(((0.0, 1.0), (0.0, 1.0)))
        rng = np.random.default_rng(20260819)
        radius = 0.15
        lo = np.array([radius, radius])
        hi = np.array([1.0 - radius, 1.0 - radius])
        fam = [bump_test(lo + (hi - lo) * rng.uniform(size=2), radius)
               for _ in range(10)]
        vals = weak_trace_pairing(twisting8, reg, fam)
        assert len(vals) == 10
        assert max(abs(v) for v in vals) <= 1e-9

    def test_zero_field_pairs_to_zero(self):
        reg = RectRegion(((-1.0, 1.0), (-1.0, 1.0)))
        fam = [bump_test((0.0, 0.0), 0.5)]
        vals = weak_trace_pairing(zero_field(2), reg, fam)
        assert vals == [0.0]

    def test_pairing_needs_divergence_information(self):
        f = constant_field((1.0, 0.0))
        f = type(f)(dim=2, eval=f.eval, sup_bound=f.sup_bound, name="nodiv")
        reg = RectRegion(((-1.0, 1.0), (-1.0, 1.0)))
        with pytest.raises(ValueError, match="divergence"):
            weak_trace_pairing(f, reg, [bump_test((0.0, 0.0), 0.5)])


# ---------------------------------------------------------------------------
# densities

class TestDensity:
    def test_halfplane_has_density_one_half(self):
        def upper(pts):
            return pts[:, 1] > 0.0

        p = density(upper, (0.0, 0.0), RADII, samples=20000, seed=7)
        for ratio, err in zip(p.ratios, p.stderrs):
            assert abs(ratio - 0.5) <= 5.0 * err
        assert abs(p.theta - 0.5) <= 0.01

    def test_complement_ratios_sum_to_one_exactly(self):
        def upper(pts):
            return pts[:, 1] > 0.0

        a = density(upper, (0.0, 0.0), RADII, samples=20000, seed=7)
        b = density(lambda q: ~upper(q), (0.0, 0.0), RADII,
                    samples=20000, seed=7)
        # same Sobol cloud per radius, so the two counts split it exactly
        for ra, rb in zip(a.ratios, b.ratios):
            assert ra + rb == 1.0

    def test_full_and_empty_sets(self):
        ones = density(lambda q: np.ones(q.shape[0], dtype=bool),
                       (0.0, 0.0), RADII[:3], samples=4000, seed=1)
        zeros = density(lambda q: np.zeros(q.shape[0], dtype=bool),
                        (0.0, 0.0), RADII[:3], samples=4000, seed=1)
        assert ones.ratios == (1.0, 1.0, 1.0) and ones.theta == 1.0
        assert zeros.ratios == (0.0, 0.0, 0.0) and zeros.theta == 0.0

    def test_radii_must_strictly_decrease(self):
        ind = lambda q: np.ones(q.shape[0], dtype=bool)
        with pytest.raises(ValueError, match="decreasing"):
            density(ind, (0.0, 0.0), [0.1, 0.2], samples=1000)
        with pytest.raises(ValueError, match="decreasing"):
            density(ind, (0.0, 0.0), [0.1, 0.0], samples=1000)

    def test_rows_shape(self):
        p = density(lambda q: q[:, 0] > 0, (0.0, 0.0), RADII[:2],
                    samples=2000, seed=3)
        rows = p.rows()
        assert len(rows) == 2
        assert set(rows[0]) == {"radius", "estimate", "stderr"}


# ---------------------------------------------------------------------------
# approximate one-sided limits

class TestApLim:
    def test_capillary_normal_candidate_confirmed(self, capillary):
        S = circle_interface((0.0, 0.0), 1.0, outward=True)
        rep = one_sided_ap_lim(capillary, S, (1.0, 0.0), (1.0, 0.0),
                               (0.2, 0.1, 0.05), RADII,
                               samples=20000, seed=20260819)
        assert rep.classification == AP_LIM_CONFIRMED
        assert rep.verdict == "PASS"
        assert all(s == "confirmed" for _, s in rep.statuses)

    def test_twisting_zero_candidate_rejected(self, twisting12):
        S = line_interface((0.0, 0.0), (1.0, 0.0), normal=(0.0, -1.0))
        rep = one_sided_ap_lim(twisting12, S, (1.0 / 3.0, 0.0), (0.0, 0.0),
                               (0.5,), RADII, samples=20000, seed=20260819)
        assert rep.classification == AP_LIM_REJECTED
        assert rep.verdict == "FAIL"
        (_, probe), = rep.probes
        assert min(probe.ratios) >= 0.05  # deviation set keeps mass

    def test_wrong_candidate_on_capillary_rejected(self, capillary):
        S = circle_interface((0.0, 0.0), 1.0, outward=True)
        rep = one_sided_ap_lim(capillary, S, (1.0, 0.0), (-1.0, 0.0),
                               (0.5,), RADII[:4], samples=8000, seed=5)
        assert rep.classification == AP_LIM_REJECTED


# ---------------------------------------------------------------------------
# extrapolation internals

class TestTailFit:
    def test_linear_sequence_is_exact(self):
        r = np.array([0.4, 0.2, 0.1, 0.05])
        est = 2.0 - 3.0 * r
        intercept, osc, raw = _tail_fit(r, est)
        assert intercept == pytest.approx(2.0, abs=1e-12)
        assert osc <= 1e-12
        assert raw == pytest.approx(float(est.max() - est.min()), abs=1e-12)

    def test_alternation_survives_detrending(self):
        r = [0.4, 0.2, 0.1, 0.05]
        est = [0.01, -0.01, 0.01, -0.01]
        _, osc, raw = _tail_fit(r, est)
        assert osc > 0.25 * raw

    def test_single_radius_passthrough(self):
        intercept, osc, raw = _tail_fit([0.1], [3.5])
        assert (intercept, osc, raw) == (3.5, 0.0, 0.0)
