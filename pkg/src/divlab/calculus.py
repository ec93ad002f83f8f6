"""Differential and integral kernels: mollification, divergence estimates,
Gauss-Green pairing residuals, and the convexity-transport audit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _quad
from .fields import (Exclusion, PhiFunction, VectorField, as_points, bump,
                     bump_d1, translate_field)
from .report import CheckResult, VerificationReport

DEFAULT_FD_STEP = 1e-4


# ---------------------------------------------------------------------------
# scalar test functions

@dataclass(frozen=True)
class ScalarTest:
    """C^1 test function with an exact gradient."""
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    label: str
    c1_norm: float = math.nan   # sup |psi| + sup |grad psi| when known


def constant_test(c: float, dim: int) -> ScalarTest:
    return ScalarTest(
        value=lambda pts: np.full(pts.shape[0], float(c)),
        gradient=lambda pts: np.zeros((pts.shape[0], dim)),
        label=f"constant:{c}", c1_norm=abs(float(c)))


def bump_test(center, radius: float, height: float = 1.0) -> ScalarTest:
    """Radial smooth bump: height * w(|p - c| / radius)."""
    c = np.asarray(center, dtype=float)
    from .fields import BUMP_PEAK, BUMP_SLOPE_PEAK

    def val(pts):
        s = np.linalg.norm(pts - c, axis=1) / radius
        return height * bump(s)

    def grad(pts):
        d = pts - c
        s = np.linalg.norm(d, axis=1) / radius
        out = np.zeros_like(pts)
        m = (s > 0.0) & (s < 1.0)
        out[m] = (height * bump_d1(s[m]) / (radius * s[m] * radius))[:, None] * d[m]
        return out

    c1 = abs(height) * (BUMP_PEAK + BUMP_SLOPE_PEAK / radius)
    return ScalarTest(val, grad, f"bump:c={c.tolist()}:r={radius}", c1)


def gaussian_test(center, sigma: float) -> ScalarTest:
    c = np.asarray(center, dtype=float)

    def val(pts):
        d2 = np.einsum("ij,ij->i", pts - c, pts - c)
        return np.exp(-0.5 * d2 / sigma**2)

    def grad(pts):
        d = pts - c
        d2 = np.einsum("ij,ij->i", d, d)
        return (-np.exp(-0.5 * d2 / sigma**2) / sigma**2)[:, None] * d

    c1 = 1.0 + math.exp(-0.5) / sigma
    return ScalarTest(val, grad, f"gaussian:c={c.tolist()}:sigma={sigma}", c1)


# ---------------------------------------------------------------------------
# grids

@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned evaluation grid; axes may be uniform or logarithmic."""
    box: Sequence[tuple[float, float]]
    resolution: Sequence[int]
    spacing: Sequence[str] = ()

    def __post_init__(self):
        if not self.spacing:
            object.__setattr__(self, "spacing", tuple("uniform" for _ in self.box))
        if len(self.resolution) != len(self.box) or len(self.spacing) != len(self.box):
            raise ValueError("box, resolution, spacing must align")
        for (lo, hi), n, mode in zip(self.box, self.resolution, self.spacing):
            if n < 1:
                raise ValueError("resolution must be >= 1 per axis")
            if mode == "log" and (lo <= 0 or hi <= 0):
                raise ValueError("log axes need positive bounds")
            if mode not in ("uniform", "log"):
                raise ValueError(f"unknown spacing mode {mode!r}")

    def axes(self) -> list[np.ndarray]:
        out = []
        for (lo, hi), n, mode in zip(self.box, self.resolution, self.spacing):
            if mode == "log":
                out.append(np.geomspace(lo, hi, n))
            else:
                out.append(np.linspace(lo, hi, n))
        return out

    def points(self) -> np.ndarray:
        grids = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)


# ---------------------------------------------------------------------------
# finite-difference divergence

def numeric_divergence(field: VectorField, x, h: float = DEFAULT_FD_STEP):
    """Centered-difference divergence; O(h^2) on C^3 fields.

    Rejects points within 2h of any declared non-smooth set, where the
    difference quotient has no business being trusted.
    """
    pts = as_points(x, field.dim)
    dist = field.exclusion_distance(pts)
    if np.any(dist <= 2.0 * h):
        bad = pts[dist <= 2.0 * h][0]
        labels = [e.label for e in field.smooth_exclusion
                  if e.distance(bad[None, :])[0] <= 2.0 * h]
        raise ValueError(
            f"point {bad.tolist()} within 2h of non-smooth set(s) {labels}")
    acc = np.zeros(pts.shape[0])
    for i in range(field.dim):
        step = np.zeros(field.dim)
        step[i] = h
        acc += (field.eval(pts + step)[:, i] - field.eval(pts - step)[:, i]) / (2.0 * h)
    if np.asarray(x).ndim == 1:
        return float(acc[0])
    return acc


def _divergence_values(field: VectorField, pts: np.ndarray,
                       h: float = DEFAULT_FD_STEP) -> np.ndarray:
    if field.analytic_div is not None:
        return field.analytic_div(pts)
    return numeric_divergence(field, pts, h)


# ---------------------------------------------------------------------------
# regions with oriented boundaries

class RectRegion:
    """Axis-aligned planar rectangle with outward normals."""

    def __init__(self, bounds):
        (self.ax, self.bx), (self.ay, self.by) = bounds
        if self.ax >= self.bx or self.ay >= self.by:
            raise ValueError("degenerate rectangle")

    def volume_integral(self, f, rtol=1e-9, atol=1e-12) -> float:
        return _quad.adaptive_gauss_2d(f, (self.ax, self.bx, self.ay, self.by),
                                       rtol=rtol, atol=atol)

    def boundary_integral(self, g, rtol=1e-9, atol=1e-12) -> float:
        ax, bx, ay, by = self.ax, self.bx, self.ay, self.by
        sides = [
            (ax, bx, lambda t: np.stack([t, np.full_like(t, ay)], 1), (0.0, -1.0)),
            (ax, bx, lambda t: np.stack([t, np.full_like(t, by)], 1), (0.0, 1.0)),
            (ay, by, lambda t: np.stack([np.full_like(t, ax), t], 1), (-1.0, 0.0)),
            (ay, by, lambda t: np.stack([np.full_like(t, bx), t], 1), (1.0, 0.0)),
        ]
        total = 0.0
        for lo, hi, path, nv in sides:
            normal = np.asarray(nv)

            def integrand(t, path=path, normal=normal):
                p = path(np.asarray(t, dtype=float))
                nn = np.broadcast_to(normal, p.shape)
                return g(p, nn)

            total += _quad.adaptive_gauss_1d(integrand, lo, hi, rtol=rtol, atol=atol)
        return total

    def sample_points(self, n: int = 256) -> np.ndarray:
        rng = np.random.default_rng(5150)
        pts = rng.uniform((self.ax, self.ay), (self.bx, self.by), size=(n, 2))
        return pts


class DiskRegion:
    def __init__(self, center, radius: float):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def volume_integral(self, f, rtol=1e-9, atol=1e-12) -> float:
        return _quad.adaptive_ball_quad(f, self.center, self.radius, 2,
                                        rtol=rtol, atol=atol)

    def boundary_integral(self, g, rtol=1e-9, atol=1e-12) -> float:
        return self._circle_adaptive(g, rtol, atol, +1.0)

    def _circle_adaptive(self, g, rtol, atol, sign) -> float:
        # trapezoid on the circle is spectrally accurate (periodic smooth)
        def summed(n):
            th = 2.0 * math.pi * np.arange(n) / n
            ring = np.stack([np.cos(th), np.sin(th)], axis=1)
            pts = self.center[None, :] + self.radius * ring
            vals = g(pts, sign * ring)
            return float(np.sum(vals) * 2.0 * math.pi * self.radius / n)

        n = 32
        prev = summed(n)
        for _ in range(10):
            n *= 2
            cur = summed(n)
            if abs(cur - prev) <= rtol * abs(cur) + atol:
                return cur
            prev = cur
        raise _quad.QuadratureError("circle quadrature failed to converge")

    def sample_points(self, n: int = 256) -> np.ndarray:
        rng = np.random.default_rng(5151)
        th = rng.uniform(0, 2 * math.pi, n)
        rr = self.radius * np.sqrt(rng.uniform(0, 1, n))
        return self.center[None, :] + np.stack([rr * np.cos(th), rr * np.sin(th)], 1)


class AnnulusRegion:
    """Disk with a concentric hole; used for punctured-ball diagnostics."""

    def __init__(self, center, r_inner: float, r_outer: float):
        if not 0 < r_inner < r_outer:
            raise ValueError("need 0 < r_inner < r_outer")
        self.center = np.asarray(center, dtype=float)
        self.r_inner = float(r_inner)
        self.r_outer = float(r_outer)

    def volume_integral(self, f, rtol=1e-9, atol=1e-12) -> float:
        def radial(r):
            # mean of f over each circle of radius r, times the circumference
            out = np.empty_like(r)
            n = 128
            th = 2.0 * math.pi * np.arange(n) / n
            ring = np.stack([np.cos(th), np.sin(th)], axis=1)
            for i, rr in enumerate(np.asarray(r, dtype=float)):
                pts = self.center[None, :] + rr * ring
                out[i] = np.mean(f(pts)) * 2.0 * math.pi * rr
            return out

        return _quad.adaptive_gauss_1d(radial, self.r_inner, self.r_outer,
                                       rtol=rtol, atol=atol)

    def boundary_integral(self, g, rtol=1e-9, atol=1e-12) -> float:
        outer = DiskRegion(self.center, self.r_outer)._circle_adaptive(
            g, rtol, atol, +1.0)
        inner = DiskRegion(self.center, self.r_inner)._circle_adaptive(
            g, rtol, atol, -1.0)
        return outer + inner


# ---------------------------------------------------------------------------
# Gauss-Green pairing residual

def gauss_green_residual(field: VectorField, region, psi: ScalarTest,
                         rtol: float = 1e-9, atol: float = 1e-12,
                         fd_step: float = DEFAULT_FD_STEP) -> float:
    """Residual of the boundary pairing:
    int psi div(field) + int field . grad psi - int_boundary psi (field . nu).
    """
    if field.analytic_div is None and field.smooth_exclusion:
        samples = region.sample_points()
        if np.any(field.exclusion_distance(samples) <= 2.0 * fd_step):
            raise ValueError(
                "region touches a non-smooth set and the field has no "
                "analytic divergence")

    def vol_term(pts):
        return psi.value(pts) * _divergence_values(field, pts, fd_step)

    def transport_term(pts):
        return np.einsum("ij,ij->i", field.eval(pts), psi.gradient(pts))

    def flux_term(pts, normals):
        return psi.value(pts) * np.einsum("ij,ij->i", field.eval(pts), normals)

    t1 = region.volume_integral(vol_term, rtol=rtol, atol=atol)
    t2 = region.volume_integral(transport_term, rtol=rtol, atol=atol)
    t3 = region.boundary_integral(flux_term, rtol=rtol, atol=atol)
    return t1 + t2 - t3


# ---------------------------------------------------------------------------
# mollification

@dataclass(frozen=True)
class MollifierKernel:
    """Radial unit-mass smoothing kernel supported in the epsilon-ball."""
    epsilon: float
    dim: int
    profile: Callable[[np.ndarray], np.ndarray]
    normalization: float
    nodes: np.ndarray       # fixed convolution nodes in the epsilon-ball
    weights: np.ndarray     # quadrature weights times kernel values

    def __call__(self, y) -> np.ndarray:
        pts = as_points(y, self.dim)
        s = np.linalg.norm(pts, axis=1) / self.epsilon
        return self.normalization * self.profile(s)

    def mass_defect(self) -> float:
        """Unit-mass audit by adaptive quadrature, independent of the
        fixed convolution rule."""
        total = _quad.adaptive_ball_quad(
            lambda pts: self(pts), np.zeros(self.dim), self.epsilon,
            self.dim, rtol=1e-10, atol=1e-14)
        return total - 1.0


def make_mollifier(epsilon: float, dim: int,
                   profile: Callable[[np.ndarray], np.ndarray] = bump,
                   radial_order: int = 14, angular_order: int = 12) -> MollifierKernel:
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    radial_mass = _quad.adaptive_gauss_1d(
        lambda t: profile(t) * t ** (dim - 1), 0.0, 1.0, rtol=1e-13, atol=1e-16)
    mass = _quad.sphere_area(dim) * radial_mass * epsilon**dim
    norm = 1.0 / mass
    nodes, wts = _quad.ball_rule(dim, np.zeros(dim), epsilon,
                                 radial_order, angular_order)
    s = np.linalg.norm(nodes, axis=1) / epsilon
    weights = wts * norm * profile(s)
    # snap the discrete rule to exact unit mass: the smoothing is then a
    # true convex average, so convexity transport needs no quadrature caveat
    weights = weights / float(np.sum(weights))
    return MollifierKernel(epsilon, dim, profile, norm, nodes, weights)


def mollify(field: VectorField, kernel: MollifierKernel,
            shift: bool = False, chunk: int = 2048) -> VectorField:
    """Convolve a field with a smoothing kernel.

    The convolution rule's nodes are fixed once, so finite differences of
    the mollified field difference the smooth integrand rather than the
    quadrature; divergence-freeness survives to FD accuracy.
    """
    if field.dim != kernel.dim:
        raise ValueError("kernel dimension does not match the field")
    if field.domain is not None:
        raise ValueError("mollification of domain-restricted fields "
                         "is not supported")
    nodes = kernel.nodes
    weights = kernel.weights

    def ev(pts):
        out = np.empty((pts.shape[0], field.dim))
        for start in range(0, pts.shape[0], chunk):
            block = pts[start:start + chunk]
            shifted = block[:, None, :] - nodes[None, :, :]
            vals = field.eval(shifted.reshape(-1, field.dim))
            vals = vals.reshape(block.shape[0], nodes.shape[0], field.dim)
            out[start:start + chunk] = np.einsum("k,mkd->md", weights, vals)
        return out

    smoothed = VectorField(
        dim=field.dim, eval=ev, sup_bound=field.sup_bound,
        name=f"mollified:eps={kernel.epsilon:g}:{field.name}")
    if shift:
        delta = np.zeros(field.dim)
        delta[-1] = kernel.epsilon
        return translate_field(smoothed, delta)
    return smoothed


# ---------------------------------------------------------------------------
# convexity transport audit

def jensen_check(field: VectorField, phi: PhiFunction, kernel: MollifierKernel,
                 grid: GridSpec, tol: float = 1e-6,
                 precondition_tol: float = 1e-12) -> VerificationReport:
    """Verify that smoothing preserves gauge domination.

    If the vertical component dominates phi(speed) pointwise, convexity of
    phi pushes the same bound through any unit-mass averaging.  The audit
    first confirms the pointwise hypothesis on the grid, then checks the
    mollified field there.
    """
    rep = VerificationReport(scenario=f"jensen:{field.name}")
    pts = grid.points()
    raw = field.eval(pts)
    raw_margin = raw[:, -1] - phi(np.linalg.norm(raw, axis=1))
    worst_raw = float(np.min(raw_margin))
    if worst_raw < -precondition_tol:
        idx = int(np.argmin(raw_margin))
        rep.add(CheckResult.from_margin(
            "PRECONDITION_FAILED:pointwise gauge domination",
            worst_raw, precondition_tol, worst_raw,
            detail=f"violated at {pts[idx].tolist()}"))
        return rep
    rep.add(CheckResult.from_margin(
        "pointwise gauge domination", worst_raw, precondition_tol, worst_raw))

    smoothed = mollify(field, kernel)
    vals = smoothed.eval(pts)
    margin = vals[:, -1] - phi(np.linalg.norm(vals, axis=1))
    worst = float(np.min(margin))
    idx = int(np.argmin(margin))
    rep.add(CheckResult.from_margin(
        "mollified gauge domination", worst, tol, worst,
        detail=f"worst at {pts[idx].tolist()}"))
    rep.add(CheckResult.info("kernel mass defect", kernel.mass_defect()))
    return rep
