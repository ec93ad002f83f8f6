"""Grids, FD divergence, regions, mollification, convexity transport."""

import math

import numpy as np
import pytest

from divlab.calculus import (
    AnnulusRegion,
    DiskRegion,
    GridSpec,
    RectRegion,
    bump_test,
    gauss_green_residual,
    jensen_check,
    make_mollifier,
    mollify,
    numeric_divergence,
)
from divlab.fields import (
    constant_field,
    make_counterexample_field,
    phi_quadratic,
    stream_bump_field,
    translate_field,
)
from divlab.report import PASS


# ---------------------------------------------------------------------------
# grids

def test_gridspec_axes():
    g = GridSpec(box=((1e-3, 1e3), (-1.0, 10.0)), resolution=(7, 5),
                 spacing=("log", "uniform"))
    ax, az = g.axes()
    assert ax[0] == pytest.approx(1e-3) and ax[-1] == pytest.approx(1e3)
    assert np.allclose(np.diff(np.log(ax)), np.log(ax[1] / ax[0]))
    assert np.allclose(np.diff(az), az[1] - az[0])
    assert g.points().shape == (35, 2)


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(box=((-1.0, 1.0),), resolution=(4,), spacing=("log",))
    with pytest.raises(ValueError):
        GridSpec(box=((0.0, 1.0),), resolution=(4, 4))
    with pytest.raises(ValueError):
        GridSpec(box=((0.0, 1.0),), resolution=(4,), spacing=("cubic",))


# ---------------------------------------------------------------------------
# finite-difference divergence

def test_fd_divergence_zero_on_constant():
    f = constant_field([2.0, -3.0])
    pts = np.array([[0.1, 0.2], [5.0, -7.0]])
    assert np.all(numeric_divergence(f, pts, h=1e-4) == 0.0)


def test_fd_divergence_small_on_stream_bump(stream_bump, rng):
    pts = np.stack([rng.uniform(-2.0, 2.0, 64), rng.uniform(1.1, 1.9, 64)],
                   axis=1)
    res = np.max(np.abs(numeric_divergence(stream_bump, pts, h=1e-4)))
    assert res < 5e-6


def test_fd_divergence_is_second_order(stream_bump):
    pts = np.array([[0.3, 1.4], [-0.7, 1.6], [1.1, 1.3]])
    r1 = np.max(np.abs(numeric_divergence(stream_bump, pts, h=2e-3)))
    r2 = np.max(np.abs(numeric_divergence(stream_bump, pts, h=1e-3)))
    assert 2.5 < r1 / r2 < 6.0


def test_fd_divergence_refuses_non_smooth_neighborhoods():
    f = make_counterexample_field(4)
    near_interface = np.array([[1.0, 0.0, 0.0, 1e-6]])
    with pytest.raises(ValueError, match="non-smooth"):
        numeric_divergence(f, near_interface, h=1e-4)


# ---------------------------------------------------------------------------
# regions

def test_rect_region_integrals():
    reg = RectRegion(((0.0, 2.0), (-1.0, 1.0)))
    area = reg.volume_integral(lambda p: np.ones(p.shape[0]))
    assert area == pytest.approx(4.0, rel=1e-12)
    # boundary flux of the identity field equals 2 * area
    flux = reg.boundary_integral(
        lambda pts, nu: np.einsum("ij,ij->i", pts, nu))
    assert flux == pytest.approx(8.0, rel=1e-12)


def test_disk_region_integrals():
    reg = DiskRegion((1.0, -2.0), 1.5)
    area = reg.volume_integral(lambda p: np.ones(p.shape[0]))
    assert area == pytest.approx(math.pi * 2.25, rel=1e-10)
    flux = reg.boundary_integral(
        lambda pts, nu: np.einsum("ij,ij->i", pts - np.array([1.0, -2.0]), nu))
    assert flux == pytest.approx(2.0 * math.pi * 2.25, rel=1e-12)


def test_annulus_region_volume():
    reg = AnnulusRegion((0.0, 0.0), 0.5, 2.0)
    area = reg.volume_integral(lambda p: np.ones(p.shape[0]))
    assert area == pytest.approx(math.pi * (4.0 - 0.25), rel=1e-9)
    with pytest.raises(ValueError):
        AnnulusRegion((0.0, 0.0), 2.0, 0.5)


def test_gauss_green_residual_smooth(stream_bump):
    reg = RectRegion(((-1.0, 1.0), (1.2, 1.8)))
    psi = bump_test((0.0, 1.5), 0.25)
    assert abs(gauss_green_residual(stream_bump, reg, psi)) < 1e-8


# ---------------------------------------------------------------------------
# mollification

def test_mollifier_unit_mass():
    k = make_mollifier(0.05, 2)
    assert abs(k.mass_defect()) < 1e-12


def test_mollify_nearly_preserves_constants():
    f = constant_field([1.0, -2.0])
    k = make_mollifier(0.1, 2)
    vals = mollify(f, k).eval(np.array([[0.0, 0.0], [3.0, 4.0]]))
    assert np.max(np.abs(vals - np.array([1.0, -2.0]))) < 1e-8


def test_mollify_commutes_with_translation(stream_bump):
    k = make_mollifier(0.05, 2)
    shift = np.array([0.4, -0.3])
    a = mollify(translate_field(stream_bump, shift), k)
    b = translate_field(mollify(stream_bump, k), shift)
    pts = np.array([[0.3, 1.2], [1.0, 1.6], [-0.2, 0.9]])
    assert np.max(np.abs(a.eval(pts) - b.eval(pts))) < 1e-13


def test_mollify_rejects_mismatched_inputs(capillary):
    k3 = make_mollifier(0.1, 3)
    with pytest.raises(ValueError):
        mollify(constant_field([1.0, 0.0]), k3)
    k2 = make_mollifier(0.1, 2)
    with pytest.raises(ValueError):
        mollify(capillary, k2)


# ---------------------------------------------------------------------------
# convexity transport

def _unit_grid():
    return GridSpec(box=((-1.0, 1.0), (-1.0, 1.0)), resolution=(21, 21))


def test_jensen_check_constant_vertical_field():
    rep = jensen_check(constant_field([0.0, 1.0]), phi_quadratic(),
                       make_mollifier(0.05, 2), _unit_grid())
    assert rep.verdict == PASS
    by_name = {c.name: c for c in rep.checks}
    assert by_name["pointwise gauge domination"].margin == pytest.approx(0.5)
    assert by_name["mollified gauge domination"].margin == pytest.approx(
        0.5, abs=1e-7)


def test_jensen_check_precondition_failure():
    # a horizontal unit field never dominates phi(speed) = 1/2
    rep = jensen_check(constant_field([1.0, 0.0]), phi_quadratic(),
                       make_mollifier(0.05, 2), _unit_grid())
    names = [c.name for c in rep.checks]
    assert names == ["PRECONDITION_FAILED:pointwise gauge domination"]
    assert rep.checks[0].margin == pytest.approx(-0.5)
