"""Concrete vector fields and scalar gauges, with closed-form evaluators.

Every field evaluates in batch: points are float64 arrays of shape
(m, dim) and evaluation returns (m, dim).  Fields are immutable after
construction and safe to evaluate concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np

AUTO = "auto"


class OutOfDomainError(ValueError):
    """Evaluation requested outside the field's domain of definition."""


def as_points(x, dim: int) -> np.ndarray:
    """Coerce a single point or a batch to shape (m, dim)."""
    a = np.asarray(x, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2 or a.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {a.shape}")
    return a


# ---------------------------------------------------------------------------
# smooth bump profile on (0, 1)

def bump(u) -> np.ndarray:
    """w(u) = exp(-1/(1-(2u-1)^2)) on (0,1), zero outside."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    m = (u > 0.0) & (u < 1.0)
    v = 2.0 * u[m] - 1.0
    out[m] = np.exp(-1.0 / (1.0 - v * v))
    return out


def bump_d1(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    m = (u > 0.0) & (u < 1.0)
    v = 2.0 * u[m] - 1.0
    g = 1.0 - v * v
    out[m] = np.exp(-1.0 / g) * (-4.0 * v / g**2)
    return out


def bump_d2(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    m = (u > 0.0) & (u < 1.0)
    v = 2.0 * u[m] - 1.0
    g = 1.0 - v * v
    out[m] = np.exp(-1.0 / g) * (16.0 * v * v / g**4 - 8.0 / g**2 - 32.0 * v * v / g**3)
    return out


def golden_max(f: Callable[[float], float], a: float, b: float,
               xtol: float = 1e-9) -> tuple[float, float]:
    """Golden-section maximization of a unimodal f on [a, b].

    Returns (argmax, max). The returned value never exceeds the true
    maximum, so calibration constants derived from it are conservative.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


# peak value and peak slope of the bump profile, golden-calibrated once
_BUMP_PEAK_ARG, BUMP_PEAK = golden_max(lambda u: float(bump(u)), 0.25, 0.75, 1e-12)
_BUMP_SLOPE_ARG, BUMP_SLOPE_PEAK = golden_max(
    lambda u: float(abs(bump_d1(u))), 0.5, 1.0 - 1e-12, 1e-12)


# ---------------------------------------------------------------------------
# gauges

@dataclass(frozen=True)
class PhiFunction:
    """Convex gauge: phi(0) = 0, phi > 0 off 0, midpoint-convex."""
    evaluator: Callable[[np.ndarray], np.ndarray]
    label: str
    convexity_samples: int = 64

    def __call__(self, t) -> np.ndarray:
        return self.evaluator(np.asarray(t, dtype=float))


def phi_linear(c: float) -> PhiFunction:
    if c <= 0:
        raise ValueError("linear gauge needs c > 0")
    return PhiFunction(lambda t: c * t, f"linear:c={c}")


def phi_quadratic() -> PhiFunction:
    return PhiFunction(lambda t: 0.5 * t * t, "quadratic:t^2/2")


# ---------------------------------------------------------------------------
# fields

@dataclass(frozen=True)
class Exclusion:
    """Lower-dimensional set where finite differencing is invalid."""
    label: str
    distance: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class VectorField:
    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    sup_bound: float
    name: str = "field"
    analytic_div: Optional[Callable[[np.ndarray], np.ndarray]] = None
    analytic_jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    smooth_exclusion: Sequence[Exclusion] = ()
    # open-domain membership test; None means the field is global
    domain: Optional[Callable[[np.ndarray], np.ndarray]] = None
    domain_label: str = ""

    def __call__(self, x) -> np.ndarray:
        pts = as_points(x, self.dim)
        out = self.eval(pts)
        if np.asarray(x).ndim == 1:
            return out[0]
        return out

    def check_domain(self, pts: np.ndarray) -> None:
        if self.domain is not None:
            ok = self.domain(pts)
            if not np.all(ok):
                bad = pts[~ok][0]
                raise OutOfDomainError(
                    f"{self.name}: point {bad.tolist()} outside {self.domain_label}")

    def exclusion_distance(self, pts: np.ndarray) -> np.ndarray:
        """Distance to the nearest excluded set (inf when there is none)."""
        if not self.smooth_exclusion:
            return np.full(pts.shape[0], np.inf)
        return np.min([e.distance(pts) for e in self.smooth_exclusion], axis=0)


def constant_field(vec, name: str = "") -> VectorField:
    v = np.asarray(vec, dtype=float)
    dim = v.shape[0]

    def ev(pts):
        return np.broadcast_to(v, (pts.shape[0], dim)).copy()

    def jac(pts):
        return np.zeros((pts.shape[0], dim, dim))

    return VectorField(dim=dim, eval=ev, sup_bound=float(np.linalg.norm(v)),
                       name=name or f"constant:{v.tolist()}",
                       analytic_div=lambda pts: np.zeros(pts.shape[0]),
                       analytic_jacobian=jac)


def zero_field(dim: int) -> VectorField:
    return constant_field(np.zeros(dim), name=f"zero:{dim}d")


# ---------------------------------------------------------------------------
# stream-function fields (2D, exactly divergence-free)

def make_stream_field(psi: Callable[[np.ndarray], np.ndarray],
                      analytic_grad: Callable[[np.ndarray], np.ndarray],
                      analytic_hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                      sup_bound: float = np.inf,
                      name: str = "stream") -> VectorField:
    """Rotate the gradient of a stream function: eta = (-d2 psi, d1 psi)."""

    def ev(pts):
        g = analytic_grad(pts)
        return np.stack([-g[:, 1], g[:, 0]], axis=1)

    jac = None
    if analytic_hessian is not None:
        def jac(pts):
            H = analytic_hessian(pts)
            J = np.empty((pts.shape[0], 2, 2))
            J[:, 0, 0] = -H[:, 0, 1]
            J[:, 0, 1] = -H[:, 1, 1]
            J[:, 1, 0] = H[:, 0, 0]
            J[:, 1, 1] = H[:, 0, 1]
            return J

    f = VectorField(dim=2, eval=ev, sup_bound=sup_bound, name=name,
                    analytic_div=lambda pts: np.zeros(pts.shape[0]),
                    analytic_jacobian=jac)
    object.__setattr__(f, "psi", psi)
    return f


def elliptic_bump_stream(center: tuple[float, float], rx: float, rz: float,
                         amplitude: float, name: str) -> VectorField:
    """Stream bump with elliptic level sets; sup |eta| calibrated to amplitude.

    The supremum of |grad psi| over the support ellipse is (a/min(rx,rz))
    times the peak slope of the profile, attained on the short axis.
    """
    a = amplitude * min(rx, rz) / BUMP_SLOPE_PEAK
    cx, cz = center
    d1, d2 = 1.0 / rx**2, 1.0 / rz**2

    def _s(pts):
        y1 = pts[:, 0] - cx
        y2 = pts[:, 1] - cz
        return y1, y2, np.sqrt(d1 * y1 * y1 + d2 * y2 * y2)

    def psi(pts):
        _, _, s = _s(pts)
        return a * bump(s)

    def grad(pts):
        y1, y2, s = _s(pts)
        out = np.zeros((pts.shape[0], 2))
        m = (s > 0.0) & (s < 1.0)
        w1 = bump_d1(s[m])
        out[m, 0] = a * w1 * d1 * y1[m] / s[m]
        out[m, 1] = a * w1 * d2 * y2[m] / s[m]
        return out

    def hess(pts):
        y1, y2, s = _s(pts)
        out = np.zeros((pts.shape[0], 2, 2))
        m = (s > 0.0) & (s < 1.0)
        sm = s[m]
        w1 = bump_d1(sm)
        w2 = bump_d2(sm)
        u1 = d1 * y1[m]
        u2 = d2 * y2[m]
        c2 = a * (w2 - w1 / sm) / sm**2
        c1 = a * w1 / sm
        out[m, 0, 0] = c2 * u1 * u1 + c1 * d1
        out[m, 0, 1] = c2 * u1 * u2
        out[m, 1, 0] = out[m, 0, 1]
        out[m, 1, 1] = c2 * u2 * u2 + c1 * d2
        return out

    return make_stream_field(psi, grad, hess, sup_bound=amplitude, name=name)


def radial_bump_stream(center: tuple[float, float], radius: float,
                       amplitude: float, name: str = "stream:radial") -> VectorField:
    return elliptic_bump_stream(center, radius, radius, amplitude, name)


# canonical stream bump: support strictly inside {1 < z < 2}, sup |eta| = 0.05
STREAM_BUMP_CENTER = (0.0, 1.5)
STREAM_BUMP_RX = 2.0
STREAM_BUMP_RZ = 0.5
STREAM_BUMP_SUP = 0.05


def stream_bump_field() -> VectorField:
    return elliptic_bump_stream(STREAM_BUMP_CENTER, STREAM_BUMP_RX,
                                STREAM_BUMP_RZ, STREAM_BUMP_SUP, "stream:bump")


def translate_field(f: VectorField, shift) -> VectorField:
    """Field x -> f(x - shift); divergence and Jacobian translate along."""
    sh = np.asarray(shift, dtype=float)
    if sh.shape != (f.dim,):
        raise ValueError("shift dimension mismatch")

    def ev(pts):
        return f.eval(pts - sh)

    adiv = None if f.analytic_div is None else (lambda pts: f.analytic_div(pts - sh))
    ajac = None if f.analytic_jacobian is None else (lambda pts: f.analytic_jacobian(pts - sh))
    excl = tuple(
        Exclusion(e.label + f" shifted", lambda pts, e=e: e.distance(pts - sh))
        for e in f.smooth_exclusion)
    dom = None if f.domain is None else (lambda pts: f.domain(pts - sh))
    return VectorField(dim=f.dim, eval=ev, sup_bound=f.sup_bound,
                       name=f.name + f":shift={sh.tolist()}",
                       analytic_div=adiv, analytic_jacobian=ajac,
                       smooth_exclusion=excl, domain=dom,
                       domain_label=f.domain_label)


def extrude_field_3d(f2: VectorField) -> VectorField:
    """Trivially extend a planar field along a new middle axis.

    (x1, x2, x3) -> (f1(x1, x3), 0, f2(x1, x3)); exactly divergence-free
    whenever the planar field is.
    """
    if f2.dim != 2:
        raise ValueError("extrusion expects a planar field")

    def proj(pts):
        return np.stack([pts[:, 0], pts[:, 2]], axis=1)

    def ev(pts):
        v = f2.eval(proj(pts))
        out = np.zeros((pts.shape[0], 3))
        out[:, 0] = v[:, 0]
        out[:, 2] = v[:, 1]
        return out

    adiv = None
    if f2.analytic_div is not None:
        adiv = lambda pts: f2.analytic_div(proj(pts))

    ajac = None
    if f2.analytic_jacobian is not None:
        def ajac(pts):
            J2 = f2.analytic_jacobian(proj(pts))
            J = np.zeros((pts.shape[0], 3, 3))
            J[:, 0, 0] = J2[:, 0, 0]
            J[:, 0, 2] = J2[:, 0, 1]
            J[:, 2, 0] = J2[:, 1, 0]
            J[:, 2, 2] = J2[:, 1, 1]
            return J

    return VectorField(dim=3, eval=ev, sup_bound=f2.sup_bound,
                       name=f2.name + ":3d", analytic_div=adiv,
                       analytic_jacobian=ajac)


# ---------------------------------------------------------------------------
# twisting field: dyadic stack of rotational eddies over the line {y = 0}

@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float
    level: int
    index: int


def _twisting_balls(max_level: int) -> list[Ball]:
    balls = []
    for i in range(1, max_level + 1):
        y = 2.0**-i
        r = 2.0**-(i + 2)
        for j in range(1, 2**i):
            balls.append(Ball(np.array([j * 2.0**-i, y]), r, i, j))
    return balls


def _assert_disjoint(max_level: int) -> None:
    # exact arithmetic: scale every length by 2^(max_level + 2); the scaled
    # integers and their squared sums stay far below 2**53, so float64
    # comparisons are exact
    L = max_level
    cx, cy, rad = [], [], []
    for i in range(1, L + 1):
        s = float(2 ** (L + 2 - i))
        j = np.arange(1, 2**i, dtype=np.float64)
        cx.append(j * s)
        cy.append(np.full(j.size, s))
        rad.append(np.full(j.size, float(2 ** (L - i))))
    cx = np.concatenate(cx)
    cy = np.concatenate(cy)
    rad = np.concatenate(rad)
    n = cx.size
    step = max(64, (1 << 22) // n)
    for a in range(0, n, step):
        b = min(n, a + step)
        dx = cx[a:b, None] - cx[None, :]
        dy = cy[a:b, None] - cy[None, :]
        rr = rad[a:b, None] + rad[None, :]
        bad = dx * dx + dy * dy < rr * rr
        bad[np.arange(b - a), np.arange(a, b)] = False  # self pairs
        if np.any(bad):
            p, q = np.argwhere(bad)[0]
            raise AssertionError(
                f"eddy supports overlap: indices {a + int(p)} and {int(q)}")


def make_twisting_field(max_level: int = 8,
                        profile: Callable[[np.ndarray], np.ndarray] = bump) -> VectorField:
    """Stack of disjoint rotational eddies accumulating on {y = 0}.

    Level i places balls of radius 2^-(i+2) at height 2^-i over the dyadic
    points j/2^i.  Inside each ball the field is f(s) (p - c)-perp with
    f(s) = cal * profile(s / r) / s, calibrated so the per-ball sup of the
    speed is exactly 1.  Eddies never overlap, so the field is smooth and
    divergence-free on the whole plane.
    """
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    _assert_disjoint(max_level)
    balls = _twisting_balls(max_level)

    # speed is cal * profile(s/r): sup over s equals cal * peak(profile)
    _, peak = golden_max(lambda u: float(profile(u)), 1e-12, 1.0 - 1e-12, 1e-12)
    cal = 1.0 / peak

    heights = np.array([2.0**-i for i in range(1, max_level + 1)])
    radii = np.array([2.0**-(i + 2) for i in range(1, max_level + 1)])

    def ev(pts):
        out = np.zeros((pts.shape[0], 2))
        x, y = pts[:, 0], pts[:, 1]
        for lev in range(1, max_level + 1):
            r = radii[lev - 1]
            cy = heights[lev - 1]
            # only the nearest dyadic center at this level can contain a point
            j = np.rint(x * 2.0**lev)
            inside_j = (j >= 1) & (j <= 2**lev - 1)
            if not np.any(inside_j):
                continue
            cx = j * 2.0**-lev
            dx = x - cx
            dy = y - cy
            s = np.hypot(dx, dy)
            m = inside_j & (s > 0.0) & (s < r)
            if not np.any(m):
                continue
            speed = cal * profile(s[m] / r) / s[m]
            out[m, 0] += speed * (-dy[m])
            out[m, 1] += speed * dx[m]
        return out

    f = VectorField(dim=2, eval=ev, sup_bound=1.0,
                    name=f"twisting:levels={max_level}",
                    analytic_div=lambda pts: np.zeros(pts.shape[0]))
    object.__setattr__(f, "balls", balls)
    object.__setattr__(f, "max_level", max_level)
    object.__setattr__(f, "calibration", cal)
    object.__setattr__(f, "profile", profile)
    return f


# ---------------------------------------------------------------------------
# capillary field on an open disk

def make_capillary_field(R: float) -> VectorField:
    """Normalized gradient-graph field of a lower hemisphere: x / R on |x| < R."""
    if R <= 0:
        raise ValueError("R must be positive")

    def inside(pts):
        return np.einsum("ij,ij->i", pts, pts) < R * R

    def ev(pts):
        f.check_domain(pts)
        return pts / R

    def jac(pts):
        J = np.zeros((pts.shape[0], 2, 2))
        J[:, 0, 0] = 1.0 / R
        J[:, 1, 1] = 1.0 / R
        return J

    f = VectorField(dim=2, eval=lambda pts: ev(pts), sup_bound=1.0,
                    name=f"capillary:R={_fmt_num(R)}",
                    analytic_div=lambda pts: np.full(pts.shape[0], 2.0 / R),
                    analytic_jacobian=jac,
                    domain=inside, domain_label=f"open disk of radius {R}")
    object.__setattr__(f, "disk_radius", R)
    return f


# ---------------------------------------------------------------------------
# cylindrical potentials and the rigidity counterexample

RADIAL_BOUND_CONSTANT = (math.pi + 3.0 ** 0.75) / 2.0
AXIS_CUTOFF = 1e-8


def gamma_bounds(n: int) -> tuple[float, float]:
    """The two admissibility bounds on the amplitude gamma for dimension n."""
    if n < 4:
        raise ValueError("construction requires n >= 4")
    return (1.0 / RADIAL_BOUND_CONSTANT, 2.0 ** ((4.0 - 3.0 * n) / (n - 1.0)))


@dataclass(frozen=True)
class CylindricalPotential:
    """Scalar potential V(rho, z) generating a cylindrically symmetric field.

    The field components are recovered as
        radial coefficient  f = -rho^(1-n) dV/dz
        vertical component  h = rho^(2-n) dV/drho.
    """
    dim: int
    gamma: float
    V: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dV: Optional[Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]] = None
    label: str = "potential"


def _stable_root_term(u: np.ndarray, n: int) -> np.ndarray:
    """(1 + u)^(1/(n-1)) - 1 without cancellation at small u."""
    return np.expm1(np.log1p(u) / (n - 1.0))


def counterexample_potential(n: int, gamma) -> CylindricalPotential:
    # the potential is well defined for any positive gamma; only the field
    # constructor insists on the admissibility bounds, so that a too-large
    # gamma can still be certified (and found VIOLATED) downstream
    g = _resolve_gamma(n, gamma, strict=False)

    def V(rho, z):
        rho = np.asarray(rho, dtype=float)
        z = np.asarray(z, dtype=float)
        rho, z = np.broadcast_arrays(rho, z)
        out = np.zeros(rho.shape)
        m = z > 0.0
        u = rho[m] ** (n - 1.0)
        out[m] = g * _stable_root_term(u, n) * np.arctan(z[m] ** 2)
        return out

    def dV(rho, z):
        rho = np.asarray(rho, dtype=float)
        z = np.asarray(z, dtype=float)
        rho, z = np.broadcast_arrays(rho, z)
        dr = np.zeros(rho.shape)
        dz = np.zeros(rho.shape)
        m = z > 0.0
        u = rho[m] ** (n - 1.0)
        root = (1.0 + u) ** ((2.0 - n) / (n - 1.0))
        dr[m] = g * rho[m] ** (n - 2.0) * root * np.arctan(z[m] ** 2)
        dz[m] = g * _stable_root_term(u, n) * 2.0 * z[m] / (1.0 + z[m] ** 4)
        return dr, dz

    return CylindricalPotential(dim=n, gamma=g, V=V, dV=dV,
                                label=f"counterexample:n={n}:gamma={_fmt_num(g)}")


def _resolve_gamma(n: int, gamma, strict: bool = True) -> float:
    b_radial, b_vertical = gamma_bounds(n)
    if isinstance(gamma, str):
        if gamma != AUTO:
            raise ValueError(f"gamma must be a number or '{AUTO}'")
        return min(b_radial, b_vertical)
    g = float(gamma)
    if g <= 0:
        raise ValueError("gamma must be positive")
    if strict and g > b_radial:
        raise ValueError(
            f"gamma={g} exceeds the radial-slope bound 1/C={b_radial:.12g}")
    if strict and g > b_vertical:
        raise ValueError(
            f"gamma={g} exceeds the vertical-growth bound "
            f"2^((4-3n)/(n-1))={b_vertical:.12g}")
    return g


def make_counterexample_field(n: int, gamma=AUTO) -> VectorField:
    """Bounded divergence-free field: zero below {z = 0}, nonzero above.

    Cylindrically symmetric with an explicit potential; the vertical
    component dominates the square of the speed, so the field defeats any
    linear lower bound of the vertical component by the speed while still
    vanishing on a half-space.
    """
    g = _resolve_gamma(n, gamma, strict=True)
    P = counterexample_potential(n, g)

    def ev(pts):
        r = pts[:, :-1]
        z = pts[:, -1]
        out = np.zeros((pts.shape[0], n))
        m = z > 0.0
        if not np.any(m):
            return out
        rho = np.linalg.norm(r[m], axis=1)
        zm = z[m]
        vert = np.empty(rho.shape)
        radial_coef = np.zeros(rho.shape)
        ax = rho < AXIS_CUTOFF
        vert[ax] = g * np.arctan(zm[ax] ** 2)
        off = ~ax
        u = rho[off] ** (n - 1.0)
        vert[off] = g * np.arctan(zm[off] ** 2) * (1.0 + u) ** ((2.0 - n) / (n - 1.0))
        # radial part: -2 gamma ((1+u)^(1/(n-1)) - 1)/u * z/(1+z^4) per unit r
        radial_coef[off] = (-2.0 * g * _stable_root_term(u, n) / u
                            * zm[off] / (1.0 + zm[off] ** 4))
        block = np.zeros((rho.shape[0], n))
        block[:, :-1] = radial_coef[:, None] * r[m]
        block[:, -1] = vert
        out[m] = block
        return out

    exclusions = (
        Exclusion("hyperplane z=0", lambda pts: np.abs(pts[:, -1])),
        Exclusion("axis r=0", lambda pts: np.linalg.norm(pts[:, :-1], axis=1)),
    )
    f = VectorField(dim=n, eval=ev, sup_bound=1.0,
                    name=f"counterexample:n={n}:gamma={_fmt_num(g)}",
                    analytic_div=lambda pts: np.zeros(pts.shape[0]),
                    smooth_exclusion=exclusions)
    object.__setattr__(f, "potential", P)
    object.__setattr__(f, "gamma", g)
    return f


def potential_to_field(P: CylindricalPotential) -> VectorField:
    """Assemble the cylindrically symmetric field from a potential gradient."""
    if P.dV is None:
        raise ValueError("potential carries no gradient")
    n = P.dim

    def ev(pts):
        r = pts[:, :-1]
        z = pts[:, -1]
        rho = np.linalg.norm(r, axis=1)
        # evaluate the radial limit just off the axis to avoid 0/0
        rho_safe = np.maximum(rho, AXIS_CUTOFF)
        dr, dz = P.dV(rho_safe, z)
        radial_coef = -(rho_safe ** (1.0 - n)) * dz
        vert = rho_safe ** (2.0 - n) * dr
        out = np.zeros((pts.shape[0], n))
        out[:, :-1] = radial_coef[:, None] * r
        out[:, -1] = vert
        return out

    return VectorField(dim=n, eval=ev, sup_bound=np.inf,
                       name=f"from-potential:{P.label}",
                       analytic_div=lambda pts: np.zeros(pts.shape[0]),
                       smooth_exclusion=(
                           Exclusion("hyperplane z=0", lambda pts: np.abs(pts[:, -1])),
                           Exclusion("axis r=0",
                                     lambda pts: np.linalg.norm(pts[:, :-1], axis=1)),
                       ))


def field_to_potential(eta: VectorField, quad=None,
                       symmetry_samples: int = 32,
                       symmetry_tol: float = 1e-8) -> CylindricalPotential:
    """Recover the potential by integrating the radial coefficient in z.

    V(rho, z) = -rho^(n-1) * integral of f(rho, s) ds over [0, z], where f
    is read off the field's radial part.  The gradient components come
    straight from field evaluations, so the round trip back to the field
    is exact up to quadrature in V itself.
    """
    from . import _quad
    if quad is None:
        # the z-integral is of size |V| / rho^(n-1) and gets scaled back up
        # by rho^(n-1), up to 1e9 on wide grids; keep its error relative
        def quad(f, a, b):
            return _quad.adaptive_gauss_1d(f, a, b, rtol=1e-12, atol=1e-20)
    n = eta.dim
    _audit_cylindrical(eta, symmetry_samples, symmetry_tol)

    def components(rho, z):
        rho = np.asarray(rho, dtype=float)
        z = np.asarray(z, dtype=float)
        rho, z = np.broadcast_arrays(rho, z)
        pts = np.zeros((rho.size, n))
        flat_rho = np.maximum(rho.ravel(), AXIS_CUTOFF)
        pts[:, 0] = flat_rho
        pts[:, -1] = z.ravel()
        vals = eta.eval(pts)
        fcoef = vals[:, 0] / flat_rho
        h = vals[:, -1]
        return fcoef.reshape(rho.shape), h.reshape(rho.shape)

    def V(rho, z):
        rho = np.asarray(rho, dtype=float)
        z = np.asarray(z, dtype=float)
        rho, z = np.broadcast_arrays(rho, z)
        out = np.zeros(rho.shape)
        it = np.nditer(rho, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            rr, zz = float(rho[idx]), float(z[idx])
            if zz <= 0.0:
                continue
            val = quad(lambda s: components(np.full_like(s, rr), s)[0], 0.0, zz)
            out[idx] = -(max(rr, AXIS_CUTOFF) ** (n - 1.0)) * val
        return out

    def dV(rho, z):
        rho = np.asarray(rho, dtype=float)
        z = np.asarray(z, dtype=float)
        rho, z = np.broadcast_arrays(rho, z)
        fcoef, h = components(rho, z)
        rr = np.maximum(rho, AXIS_CUTOFF)
        return rr ** (n - 2.0) * h, -(rr ** (n - 1.0)) * fcoef

    return CylindricalPotential(dim=n, gamma=math.nan, V=V, dV=dV,
                                label=f"recovered:{eta.name}")


def _audit_cylindrical(eta: VectorField, samples: int, tol: float) -> None:
    """Reject fields whose horizontal part is not radial or not symmetric."""
    rng = np.random.default_rng(873214)
    n = eta.dim
    rho = rng.uniform(0.2, 2.0, samples)
    z = rng.uniform(0.1, 2.0, samples)
    theta = rng.uniform(0.0, 2.0 * math.pi, samples)
    base = np.zeros((samples, n))
    base[:, 0] = rho
    base[:, -1] = z
    rot = np.zeros((samples, n))
    rot[:, 0] = rho * np.cos(theta)
    rot[:, 1] = rho * np.sin(theta)
    rot[:, -1] = z
    vb = eta.eval(base)
    vr = eta.eval(rot)
    # radial coefficient and vertical component must match across rotation
    fb = vb[:, 0] / rho
    fr = np.einsum("ij,ij->i", vr[:, :-1], rot[:, :-1]) / rho**2
    tangential = vr[:, :-1] - fr[:, None] * rot[:, :-1]
    defect = max(np.max(np.abs(fb - fr)), np.max(np.abs(vb[:, -1] - vr[:, -1])),
                 np.max(np.linalg.norm(tangential, axis=1)))
    if defect > tol:
        raise ValueError(f"field is not cylindrically symmetric: defect {defect:.3e}")


# ---------------------------------------------------------------------------
# registry

def _fmt_num(x: float) -> str:
    return f"{x:g}"


def _parse_params(parts: Sequence[str]) -> dict:
    params = {}
    for p in parts:
        if "=" not in p:
            raise ValueError(f"malformed field parameter {p!r}")
        k, v = p.split("=", 1)
        params[k] = v
    return params


def get_field(name: str) -> VectorField:
    """Resolve a registry name like 'twisting:levels=8' to a field."""
    parts = name.split(":")
    kind, rest = parts[0], parts[1:]
    if kind == "counterexample":
        params = _parse_params(rest)
        n = int(params.get("n", "4"))
        gamma = params.get("gamma", AUTO)
        if gamma != AUTO:
            gamma = float(gamma)
        return make_counterexample_field(n, gamma)
    if kind == "twisting":
        params = _parse_params(rest)
        return make_twisting_field(int(params.get("levels", "8")))
    if kind == "capillary":
        params = _parse_params(rest)
        return make_capillary_field(float(params.get("R", "1")))
    if kind == "stream":
        variant = rest[0] if rest else "bump"
        if variant == "bump":
            f = stream_bump_field()
            if len(rest) > 1 and rest[1] == "3d":
                return extrude_field_3d(f)
            return f
        raise ValueError(f"unknown stream variant {variant!r}")
    if kind == "zero":
        params = _parse_params(rest)
        return zero_field(int(params.get("dim", "2")))
    if kind == "constant":
        params = _parse_params(rest)
        vec = [float(v) for v in params.get("c", "0,-1").split(",")]
        return constant_field(vec)
    raise ValueError(f"unknown field {name!r}")


REGISTRY_EXAMPLES = (
    "counterexample:n=4:gamma=auto",
    "twisting:levels=8",
    "capillary:R=1",
    "stream:bump",
)
