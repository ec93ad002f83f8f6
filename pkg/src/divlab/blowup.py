"""Rescaling analysis around interface points: blow-up sequences, weak-star
averages against test densities, deviation-set densities, the quadratic
pointwise inequality, and per-scale trace consistency.

Everything here is per-scale evidence: finite sequences cannot certify a
limit, so probes report defects together with fitted decay exponents and
leave the limit statement to the reader.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _quad
from .calculus import GridSpec, AnnulusRegion, gauss_green_residual, constant_test
from .fields import Exclusion, VectorField, bump, bump_d1
from .report import CheckResult, VerificationReport
from .trace import OrientedInterface, DensityProbe, _tail_fit, density, \
    weak_trace_ball_average

__all__ = [
    "rescale", "BlowupSequence", "blowup_sequence",
    "TestDensity", "bump_density", "WeakStarProbe", "weak_star_average",
    "nalpha_density", "quadratic_inequality_check",
    "blowup_trace_consistency", "hash_unit_ball_field",
]


def hash_unit_ball_field(dim: int = 2) -> VectorField:
    """Deterministic rough field with values in the closed unit ball.

    A coordinate hash (fractional parts of large sine multiples) picks a
    direction and a radius at every point.  The result is measurable,
    reproducible without any RNG state, and discontinuous everywhere at
    macroscopic scales: a stress input for pointwise inequalities.
    """
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    coefs = 12.9898 + 78.233 * np.arange(dim)[None, :] \
        + 37.719 * np.arange(dim + 1)[:, None]

    def ev(pts):
        phases = np.sin(pts @ coefs.T + 0.1 * np.arange(dim + 1))
        u = (phases * 43758.5453123) % 1.0
        raw = 2.0 * u[:, :dim] - 1.0
        norms = np.linalg.norm(raw, axis=1)
        safe = np.where(norms > 1e-12, norms, 1.0)
        dirs = raw / safe[:, None]
        dirs[norms <= 1e-12] = 0.0
        radius = u[:, dim] ** (1.0 / dim) * (1.0 - 1e-12)
        return radius[:, None] * dirs

    return VectorField(dim=dim, eval=ev, sup_bound=1.0,
                       name=f"hash-ball:{dim}d")


def rescale(z: VectorField, x0, r: float) -> VectorField:
    """Zoom the field in on x0 at scale r: the rescaled field reads the
    original at x0 + r*y, so values (and the sup bound) are preserved."""
    if r <= 0:
        raise ValueError("scale must be positive")
    x0 = np.asarray(x0, dtype=float)
    if x0.size != z.dim:
        raise ValueError("center dimension mismatch")

    def ev(pts):
        return z.eval(x0 + r * pts)

    adiv = None
    if z.analytic_div is not None:
        adiv = lambda pts: r * z.analytic_div(x0 + r * pts)
    ajac = None
    if z.analytic_jacobian is not None:
        ajac = lambda pts: r * z.analytic_jacobian(x0 + r * pts)
    excl = tuple(
        Exclusion(e.label + " rescaled",
                  lambda pts, e=e: e.distance(x0 + r * pts) / r)
        for e in z.smooth_exclusion)
    dom = None if z.domain is None else (lambda pts: z.domain(x0 + r * pts))
    out = VectorField(dim=z.dim, eval=ev, sup_bound=z.sup_bound,
                      name=f"{z.name}:zoom(r={r:g})",
                      analytic_div=adiv, analytic_jacobian=ajac,
                      smooth_exclusion=excl, domain=dom,
                      domain_label=z.domain_label)
    object.__setattr__(out, "zoom_center", x0.copy())
    object.__setattr__(out, "zoom_scale", float(r))
    return out


@dataclass(frozen=True)
class BlowupSequence:
    base: VectorField
    x0: tuple
    radii: tuple
    fields: tuple

    def __len__(self) -> int:
        return len(self.radii)


def blowup_sequence(z: VectorField, x0, radii) -> BlowupSequence:
    radii = [float(r) for r in radii]
    if min(radii) <= 0 or any(b >= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly decreasing")
    x0 = np.asarray(x0, dtype=float)
    zs = tuple(rescale(z, x0, r) for r in radii)
    return BlowupSequence(base=z, x0=tuple(x0.tolist()),
                          radii=tuple(radii), fields=zs)


# ---------------------------------------------------------------------------
# test densities and weak-star averages

@dataclass(frozen=True)
class TestDensity:
    value: Callable[[np.ndarray], np.ndarray]
    center: tuple
    radius: float
    label: str

    def mass_defect(self, rtol: float = 1e-10) -> float:
        m = _quad.adaptive_ball_quad(self.value, np.asarray(self.center),
                                     self.radius, len(self.center),
                                     rtol=rtol, atol=1e-14)
        return abs(m - 1.0)


def bump_density(center, radius: float, dim: int = 2,
                 label: str = "") -> TestDensity:
    """Smooth nonnegative weight of unit mass, compactly supported in the
    ball of the given radius; normalization is by 1D radial quadrature and
    re-audited independently by the mass_defect method."""
    c = np.asarray(center, dtype=float)
    radial = _quad.adaptive_gauss_1d(
        lambda s: bump(s / radius) * s ** (dim - 1), 0.0, radius,
        rtol=1e-12, atol=1e-16)
    mass = _quad.sphere_area(dim) * radial

    def val(pts):
        s = np.linalg.norm(pts - c, axis=1)
        return bump(s / radius) / mass

    return TestDensity(value=val, center=tuple(c.tolist()), radius=radius,
                       label=label or f"bump at {c.tolist()} r={radius:g}")


@dataclass(frozen=True)
class WeakStarProbe:
    density_labels: tuple
    radii: tuple
    averages: tuple         # [density][k] -> vector tuple
    squares: tuple          # [density][k] -> scalar
    jensen_margins: tuple   # [density][k] -> scalar
    mass_defects: tuple
    limit_candidates: tuple  # [density] -> vector tuple

    def rows(self) -> list[dict]:
        out = []
        for d, label in enumerate(self.density_labels):
            for k, r in enumerate(self.radii):
                out.append({
                    "density": label, "k": k, "radius": r,
                    "average": list(self.averages[d][k]),
                    "jensen_margin": self.jensen_margins[d][k],
                })
        return out


def weak_star_average(seq: BlowupSequence, f_family,
                      rtol: float = 1e-9,
                      mass_tol: float = 1e-8) -> WeakStarProbe:
    """Averages of each rescaled field against fixed test densities, with
    the second-moment comparison that convexity forces."""
    labels, averages, squares, margins, defects, limits = \
        [], [], [], [], [], []
    for f in f_family:
        defect = f.mass_defect()
        if defect > mass_tol:
            raise ValueError(f"test density {f.label} has mass defect "
                             f"{defect:.3e}")
        c = np.asarray(f.center)
        dim = c.size
        per_avg, per_sq, per_margin = [], [], []
        for zk in seq.fields:
            comps = []
            for i in range(dim):
                comps.append(_quad.adaptive_ball_quad(
                    lambda pts, i=i: f.value(pts) * zk.eval(pts)[:, i],
                    c, f.radius, dim, rtol=rtol, atol=1e-13))
            sq = _quad.adaptive_ball_quad(
                lambda pts: f.value(pts) * np.sum(zk.eval(pts) ** 2, axis=1),
                c, f.radius, dim, rtol=rtol, atol=1e-13)
            avg = np.array(comps)
            per_avg.append(tuple(avg.tolist()))
            per_sq.append(sq)
            per_margin.append(sq - float(avg @ avg))
        labels.append(f.label)
        averages.append(tuple(per_avg))
        squares.append(tuple(per_sq))
        margins.append(tuple(per_margin))
        defects.append(defect)
        lim = []
        for i in range(dim):
            comp_series = [a[i] for a in per_avg]
            intercept, _, _ = _tail_fit(seq.radii, comp_series)
            lim.append(intercept)
        limits.append(tuple(lim))
    return WeakStarProbe(
        density_labels=tuple(labels), radii=seq.radii,
        averages=tuple(averages), squares=tuple(squares),
        jensen_margins=tuple(margins), mass_defects=tuple(defects),
        limit_candidates=tuple(limits))


# ---------------------------------------------------------------------------
# deviation-set densities

def _rotation_to_minus_e2(nu: np.ndarray) -> np.ndarray:
    # planar rotation taking the interface normal to (0, -1)
    ang = -0.5 * math.pi - math.atan2(nu[1], nu[0])
    ca, sa = math.cos(ang), math.sin(ang)
    return np.array([[ca, -sa], [sa, ca]])


def nalpha_density(xi: VectorField, S: OrientedInterface, x0, alpha: float,
                   radii, samples: int = 100_000, seed: int = 0,
                   normalization_tol: float = 1e-6) -> DensityProbe:
    """Density ratios of the deviation set: one-sided points where the
    field differs from the normal trace direction by at least alpha.

    Works in the rotated frame where the normal points down; the rotation
    is recorded on the probe.  Points where the field is undefined count
    as deviating.
    """
    if xi.dim != 2:
        raise ValueError("deviation densities are planar")
    x0 = np.asarray(x0, dtype=float)
    S.require_on(x0)
    nu = S.normal_at(x0)

    # normalization audit on a fixed sample cloud near x0
    rng = np.random.default_rng(424242)
    cloud = x0 + rng.uniform(-1.0, 1.0, size=(4096, 2))
    if xi.domain is not None:
        cloud = cloud[xi.domain(cloud)]
    if cloud.shape[0]:
        sup = float(np.max(np.linalg.norm(xi.eval(cloud), axis=1)))
        if sup > 1.0 + normalization_tol:
            raise ValueError(f"field is not normalized: sampled sup "
                             f"{sup:.6f} exceeds 1")

    Q = _rotation_to_minus_e2(nu)

    def indicator(pts):
        oneside = (pts - x0) @ (-nu) > 0.0
        out = np.zeros(pts.shape[0], dtype=bool)
        if not np.any(oneside):
            return out
        sel = pts[oneside]
        if xi.domain is None:
            dev = np.linalg.norm(xi.eval(sel) - nu, axis=1) >= alpha
        else:
            dom = xi.domain(sel)
            dev = np.ones(sel.shape[0], dtype=bool)
            if np.any(dom):
                dev[dom] = np.linalg.norm(xi.eval(sel[dom]) - nu,
                                          axis=1) >= alpha
        out[oneside] = dev
        return out

    probe = density(indicator, x0, radii, samples=samples, seed=seed)
    object.__setattr__(probe, "rotation", Q.tolist())
    object.__setattr__(probe, "alpha", float(alpha))
    return probe


# ---------------------------------------------------------------------------
# pointwise quadratic inequality

def quadratic_inequality_check(xi: VectorField, points,
                               tol: float = 1e-12) -> VerificationReport:
    """At every sample, the lifted field z = xi + e_n obeys
    z_n >= |z|^2 / 2; the margin has the closed form (1 - |xi|^2)/2, which
    doubles as an independent oracle for the computed margin.
    """
    if isinstance(points, GridSpec):
        pts = points.points()
    else:
        pts = np.asarray(points, dtype=float)
    vals = xi.eval(pts)
    norms = np.linalg.norm(vals, axis=1)
    sup = float(np.max(norms))
    rep = VerificationReport(scenario=f"quadratic-inequality:{xi.name}")
    if sup > 1.0 + tol:
        rep.add(CheckResult.from_margin(
            "normalization |xi| <= 1", sup, tol, 1.0 + tol - sup))
        return rep

    z = vals.copy()
    z[:, -1] += 1.0
    margin = z[:, -1] - 0.5 * np.sum(z * z, axis=1)
    worst = int(np.argmin(margin))
    rep.add(CheckResult.from_margin(
        "lifted quadratic margin", float(margin[worst]), tol,
        float(margin[worst]),
        detail=f"argmin at {pts[worst].tolist()}"))
    oracle = 0.5 * (1.0 - norms ** 2)
    ident = float(np.max(np.abs(margin - oracle)))
    rep.add(CheckResult.from_residual(
        "margin equals (1 - |xi|^2)/2", ident, tol))
    rep.add(CheckResult.info("sampled sup of |xi|", sup))
    return rep


# ---------------------------------------------------------------------------
# per-scale trace consistency

def _ball_rule_pairing(field2: VectorField, zk: VectorField, r_k: float,
                       x0: np.ndarray, psi) -> float:
    # rotational-eddy fields: the gradient pairing decomposes over eddies
    total = 0.0
    pc = np.asarray(psi.center)
    for b in field2.balls:
        yb = (b.center - x0) / r_k
        rb = b.radius / r_k
        if np.linalg.norm(yb - pc) > psi.radius + rb:
            continue
        pts, w = _quad.ball_rule(2, yb, rb, radial_order=16, angular_order=32)
        grads = psi.gradient(pts)
        total += float(np.sum(w * np.einsum("ij,ij->i", zk.eval(pts), grads)))
    return total


def _halfspace_lhs(seq: BlowupSequence, k: int, psi,
                   nu: np.ndarray, rtol: float) -> float:
    """integral over (rescaled domain) ∩ (inward half plane) ∩ supp psi of
    psi * div z_k + grad psi . z_k, in blow-up coordinates."""
    zk = seq.fields[k]
    r_k = seq.radii[k]
    x0 = np.asarray(seq.x0)
    base = seq.base
    tdir = np.array([-nu[1], nu[0]])
    pc = np.asarray(psi.center)
    t_c = float(pc @ tdir)
    s_c = float(pc @ (-nu))

    if hasattr(base, "balls"):
        # divergence-free eddies: the div term vanishes identically
        return _ball_rule_pairing(base, zk, r_k, x0, psi)

    def g(y):
        div = zk.analytic_div(y) if zk.analytic_div is not None \
            else np.zeros(y.shape[0])
        return psi.value(y) * div + np.einsum(
            "ij,ij->i", zk.eval(y), psi.gradient(y))

    if base.domain is None:
        def inner(t_arr):
            out = np.empty(t_arr.size)
            for i, t in enumerate(t_arr):
                lo = max(0.0, s_c - psi.radius)
                hi = s_c + psi.radius
                out[i] = _quad.adaptive_gauss_1d(
                    lambda s: g(np.outer(t * np.ones_like(s), tdir)
                                + np.outer(s, -nu)),
                    lo, hi, rtol=rtol, atol=1e-14)
            return out

        return _quad.adaptive_gauss_1d(inner, t_c - psi.radius,
                                       t_c + psi.radius,
                                       rtol=rtol, atol=1e-14)

    if hasattr(base, "disk_radius"):
        R = base.disk_radius
        if abs(np.linalg.norm(x0) - R) > 1e-9:
            raise ValueError("blow-up center must sit on the disk boundary")

        def inner(t_arr):
            out = np.empty(t_arr.size)
            for i, t in enumerate(t_arr):
                disc = 1.0 - (r_k * t / R) ** 2
                s_star = (R / r_k) * (1.0 - math.sqrt(max(disc, 0.0)))
                lo = max(s_star, s_c - psi.radius)
                hi = s_c + psi.radius
                if hi <= lo:
                    out[i] = 0.0
                    continue
                out[i] = _quad.adaptive_gauss_1d(
                    lambda s: g(np.outer(t * np.ones_like(s), tdir)
                                + np.outer(s, -nu)),
                    lo, hi, rtol=rtol, atol=1e-14)
            return out

        return _quad.adaptive_gauss_1d(inner, t_c - psi.radius,
                                       t_c + psi.radius,
                                       rtol=rtol, atol=1e-14)

    raise ValueError("domain-restricted field without a usable boundary "
                     "description")


def _off_interface_div_mass(seq: BlowupSequence, k: int, psi,
                            nu: np.ndarray, rtol: float) -> float:
    """integral of psi |div z_k| over the off-interface support of psi."""
    zk = seq.fields[k]
    if zk.analytic_div is None:
        raise ValueError("divergence information required")
    pc = np.asarray(psi.center)

    def g(y):
        return psi.value(y) * np.abs(zk.analytic_div(y))

    if seq.base.domain is not None:
        dom = zk.domain

        def g_masked(y):
            inside = dom(y)
            out = np.zeros(y.shape[0])
            if np.any(inside):
                out[inside] = g(y[inside])
            return out

        return _quad.adaptive_ball_quad(g_masked, pc, psi.radius, 2,
                                        rtol=max(rtol, 1e-8), atol=1e-13)
    return _quad.adaptive_ball_quad(g, pc, psi.radius, 2,
                                    rtol=max(rtol, 1e-8), atol=1e-13)


def _decay_exponent(radii, defects) -> float:
    r = np.asarray(radii, dtype=float)[-3:]
    d = np.abs(np.asarray(defects, dtype=float))[-3:]
    if np.any(d <= 0.0):
        return math.inf  # identically zero tail: faster than any power
    coef = np.polyfit(np.log(r), np.log(d), 1)
    return float(coef[0])


@dataclass(frozen=True)
class _OffsetBump:
    """Planar bump test function with closed-form gradient."""
    center: np.ndarray
    radius: float
    height: float = 1.0

    def value(self, pts):
        s = np.linalg.norm(pts - self.center, axis=1) / self.radius
        return self.height * bump(s)

    def gradient(self, pts):
        rel = pts - self.center
        s = np.linalg.norm(rel, axis=1)
        out = np.zeros_like(rel)
        pos = s > 0
        fac = np.zeros_like(s)
        fac[pos] = self.height * bump_d1(s[pos] / self.radius) \
            / (self.radius * s[pos])
        return rel * fac[:, None]


def blowup_trace_consistency(seq: BlowupSequence, S: OrientedInterface,
                             psi_family: Optional[Sequence] = None,
                             trace_value: Optional[float] = None,
                             rtol: float = 1e-8,
                             final_tol: float = 1e-2) -> VerificationReport:
    """Per-scale evidence for the blow-up trace identities.

    (a) off-interface divergence mass against each test bump,
    (b) half-space pairing against the trace value times the flat boundary
        term, with the rescaled-domain geometry handled exactly,
    (c) punctured-ball flux balance as a decay diagnostic (global fields
        only).
    Defect trends are summarized by fitted decay exponents; only the final
    defect of (b) gates the verdict.
    """
    x0 = np.asarray(seq.x0)
    S.require_on(x0)
    nu = S.normal_at(x0)
    tdir = np.array([-nu[1], nu[0]])
    rep = VerificationReport(
        scenario=f"blowup-consistency:{seq.base.name}:x0={list(seq.x0)}")

    if psi_family is None:
        offsets = np.linspace(-0.6, 0.6, 5)
        psi_family = [_OffsetBump(center=o * tdir, radius=0.5)
                      for o in offsets]

    if trace_value is None:
        probe = weak_trace_ball_average(
            seq.base, S, x0, [2.0 ** -m for m in range(3, 9)])
        trace_value = probe.extrapolated
    rep.add(CheckResult.info("trace value used", trace_value))

    rows = []

    # (a) off-interface divergence mass: bump translated inward
    defects_a = []
    for k in range(len(seq)):
        worst = 0.0
        for psi in psi_family:
            shifted = _OffsetBump(
                center=np.asarray(psi.center) + 2.0 * psi.radius * (-nu),
                radius=psi.radius, height=psi.height)
            worst = max(worst, abs(_off_interface_div_mass(
                seq, k, shifted, nu, rtol)))
        defects_a.append(worst)
    exp_a = _decay_exponent(seq.radii, defects_a)
    rep.add(CheckResult.info(
        "off-interface divergence mass, final", defects_a[-1],
        detail=f"decay exponent {exp_a:.3f} over last 3 scales"))

    # (b) half-space pairing vs trace * flat boundary term
    defects_b = []
    for k in range(len(seq)):
        worst = 0.0
        for psi in psi_family:
            lhs = _halfspace_lhs(seq, k, psi, nu, rtol)
            t_c = float(np.asarray(psi.center) @ tdir)
            bdry = _quad.adaptive_gauss_1d(
                lambda t: psi.value(np.outer(t, tdir)),
                t_c - psi.radius, t_c + psi.radius,
                rtol=1e-11, atol=1e-15)
            worst = max(worst, abs(lhs - trace_value * bdry))
        defects_b.append(worst)
    exp_b = _decay_exponent(seq.radii, defects_b)
    rep.add(CheckResult.from_residual(
        "half-space pairing defect, final", defects_b[-1], final_tol,
        detail=f"decay exponent {exp_b:.3f} over last 3 scales"))

    # (c) punctured-ball flux balance in original coordinates
    defects_c = []
    if seq.base.domain is None:
        one = constant_test(1.0, 2)
        for k, r in enumerate(seq.radii):
            region = AnnulusRegion(x0, 0.5 * r, r)
            defects_c.append(abs(gauss_green_residual(
                seq.base, region, one, rtol=1e-9)))
        exp_c = _decay_exponent(seq.radii, defects_c)
        rep.add(CheckResult.info(
            "punctured-ball flux residual, final", defects_c[-1],
            detail=f"decay exponent {exp_c:.3f}; diagnostic only"))
    else:
        rep.add(CheckResult.skipped(
            "punctured-ball flux residual",
            "domain-restricted field: annuli leave the domain"))

    for k, r in enumerate(seq.radii):
        rows.append({
            "k": k, "radius": r,
            "off_interface_div_mass": defects_a[k],
            "half_space_defect": defects_b[k],
            "punctured_ball_residual":
                defects_c[k] if defects_c else math.nan,
        })
    rep.csv_rows = rows
    return rep
