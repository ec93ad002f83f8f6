"""Flow-tube machinery, strip identities, potential certification, and the
separable-ansatz blow-up demonstration.

The vertical lift X = eta + epsilon e_n has strictly positive last
component, so trajectories cross every height exactly once.  Transport of
the seed-plane Jacobian delta along the flow turns the divergence theorem
into the identity  integral_A (eta_n + epsilon) dq = epsilon * |L(A)|,
whose defect is measured against an independent quadrature of the left
side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from . import _ode, _quad
from .calculus import GridSpec
from .fields import (AUTO, CylindricalPotential, PhiFunction, VectorField,
                     extrude_field_3d, gamma_bounds)
from .report import CheckResult, VerificationReport

__all__ = [
    "MonotonicityViolation", "FlowState", "FlowTube", "RigidityCertificate",
    "lifted_field", "integrate_flow", "build_flow_tube", "strip_identity_2d",
    "certify_potential", "default_certification_grid", "gamma_bounds",
    "separable_demo", "flow_tube_trajectories", "CERTIFIED", "VIOLATED",
]


class MonotonicityViolation(RuntimeError):
    """The lifted field's vertical component was not positive."""


def lifted_field(eta: VectorField, epsilon: float) -> VectorField:
    """X = eta + epsilon * e_n; the Jacobian is unchanged."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    shift = np.zeros(eta.dim)
    shift[-1] = epsilon

    def ev(pts):
        return eta.eval(pts) + shift

    return VectorField(dim=eta.dim, eval=ev,
                       sup_bound=eta.sup_bound + epsilon,
                       name=f"lifted:eps={epsilon:g}:{eta.name}",
                       analytic_div=eta.analytic_div,
                       analytic_jacobian=eta.analytic_jacobian,
                       smooth_exclusion=eta.smooth_exclusion)


def _trace_shear(X: VectorField, pts: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """tr B for the height-parametrized flow Jacobian.

    B collects how horizontal velocity shear and vertical speed gradients
    tilt the transported volume element.
    """
    if X.analytic_jacobian is None:
        raise ValueError(f"{X.name} has no analytic Jacobian; "
                         "flow transport needs one")
    J = X.analytic_jacobian(pts)
    xn = vals[:, -1]
    horiz = vals[:, :-1]
    div_h = np.einsum("mii->m", J[:, :-1, :-1])
    shear = np.einsum("mi,mi->m", horiz, J[:, -1, :-1])
    return div_h / xn - shear / xn**2


@dataclass
class FlowState:
    p: np.ndarray
    t: float
    position: np.ndarray
    delta: float
    steps: int
    min_vertical_speed: float


def integrate_flow(X: VectorField, p, target_height: float,
                   rtol: float = 1e-9, atol: float = 1e-12,
                   t_max: Optional[float] = None) -> FlowState:
    """Flow a single point along X until it reaches the target height.

    Integrates in flow time with event detection on the height coordinate;
    the transported Jacobian rides along.  The vertical component is
    audited at every evaluation and must stay positive.
    """
    p = np.asarray(p, dtype=float)
    n = X.dim
    watch = {"min_xn": math.inf}

    def rhs(t, y):
        pos = y[:n][None, :]
        vals = X.eval(pos)
        xn = float(vals[0, -1])
        watch["min_xn"] = min(watch["min_xn"], xn)
        if xn <= 0.0:
            raise MonotonicityViolation(
                f"vertical speed {xn:.3e} <= 0 at {pos[0].tolist()}")
        tr = _trace_shear(X, pos, vals)[0]
        dy = np.empty_like(y)
        dy[:n] = vals[0]
        dy[n] = tr * xn * y[n]   # delta evolves per unit height
        return dy

    y0 = np.concatenate([p, [1.0]])
    start_xn = float(X.eval(p[None, :])[0, -1])
    if start_xn <= 0.0:
        raise MonotonicityViolation(f"vertical speed {start_xn:.3e} <= 0 at seed")
    if t_max is None:
        t_max = 1e4 * (abs(target_height - p[-1]) + 1.0) / start_xn
    if target_height < p[-1]:
        t_max = -t_max

    res = _ode.rk45_event(
        rhs, 0.0, y0, lambda t, y: y[n - 1] - target_height,
        t_max=t_max, rtol=rtol, atol=atol, event_tol=1e-13)
    if res.status != "event":
        raise MonotonicityViolation(
            f"trajectory failed to reach height {target_height} "
            f"within flow time {t_max}")
    delta = float(res.y[n])
    if delta <= 0.0:
        raise MonotonicityViolation(f"transported Jacobian {delta:.3e} <= 0")
    return FlowState(p=p, t=res.t, position=res.y[:n], delta=delta,
                     steps=res.naccepted, min_vertical_speed=watch["min_xn"])


@dataclass
class FlowTube:
    A: Sequence[tuple[float, float]]
    h0: float
    epsilon: float
    seeds_per_axis: int
    top_integral: float
    bottom_measure: float
    residual: float
    R_bound: float
    delta_min: float
    displacement_margin: Optional[float] = None
    displacement_bound: Optional[float] = None

    def to_report(self, tol: float = 1e-6) -> VerificationReport:
        rep = VerificationReport(scenario=f"flow-tube:h0={self.h0:g}:"
                                          f"seeds={self.seeds_per_axis}")
        rep.add(CheckResult.from_residual("transport identity residual",
                                          self.residual, tol))
        rep.add(CheckResult.from_margin(
            "transported Jacobian positivity", self.delta_min, 0.0,
            self.delta_min))
        cap = (2.0 * self.R_bound) ** len(self.A)
        rep.add(CheckResult.from_margin(
            "bottom measure bounded by enclosing box",
            self.bottom_measure, 1e-9, cap - self.bottom_measure))
        if self.displacement_margin is not None:
            rep.add(CheckResult.from_margin(
                "displacement bound", self.displacement_bound or 0.0,
                1e-9, self.displacement_margin))
        rep.add(CheckResult.info("top integral", self.top_integral))
        rep.add(CheckResult.info("bottom measure", self.bottom_measure))
        return rep


def _tube_field(eta: VectorField, A) -> VectorField:
    if eta.dim == len(A) + 1:
        return eta
    if eta.dim == 2 and len(A) == 2:
        return extrude_field_3d(eta)
    raise ValueError(f"seed box of dimension {len(A)} does not match "
                     f"a field of dimension {eta.dim}")


def _audit_tube_preconditions(eta: VectorField, epsilon: float,
                              A, h0: float) -> None:
    if eta.analytic_div is None:
        raise ValueError("flow tube needs a certified divergence-free field")
    rng = np.random.default_rng(20260819)
    n = eta.dim
    los = np.array([lo for lo, _ in A] + [0.0])
    his = np.array([hi for _, hi in A] + [h0])
    pts = los + (his - los) * rng.uniform(0.0, 1.0, size=(128, n))
    div = eta.analytic_div(pts)
    if np.max(np.abs(div)) > 1e-10:
        raise ValueError("field's declared divergence is not zero")
    below = pts.copy()
    below[:, -1] = -np.abs(below[:, -1]) - 1e-6
    if np.max(np.abs(eta.eval(below))) > 0.0:
        raise ValueError("field does not vanish below height zero")
    neg_part = np.maximum(-eta.eval(pts)[:, -1], 0.0)
    if epsilon <= float(np.max(neg_part)):
        raise ValueError(
            f"epsilon {epsilon} does not dominate the sampled downdraft "
            f"{float(np.max(neg_part)):.3e}")


def build_flow_tube(eta: VectorField, epsilon: float, A, h0: float,
                    seeds_per_axis: int = 64,
                    gauge: Optional[PhiFunction] = None,
                    gauge_constant: Optional[float] = None,
                    rtol: float = 1e-10) -> FlowTube:
    """Seed a midpoint grid on A x {h0}, flow down to height zero, and
    compare epsilon times the transported bottom measure with an
    independent adaptive quadrature of the top flux.
    """
    A = [tuple(map(float, ab)) for ab in A]
    field3 = _tube_field(eta, A)
    _audit_tube_preconditions(field3, epsilon, A, h0)
    X = lifted_field(field3, epsilon)
    n = X.dim
    m_axes = [seeds_per_axis] * (n - 1)
    seeds, cell = _quad.midpoint_grid(A, m_axes)
    nseeds = seeds.shape[0]

    watch = {"min_xn": math.inf, "min_delta": math.inf, "max_span": 0.0}

    def rhs(h, Y):
        pos = np.empty((nseeds, n))
        pos[:, :-1] = Y[:, :-1]
        pos[:, -1] = h
        vals = X.eval(pos)
        xn = vals[:, -1]
        mn = float(np.min(xn))
        watch["min_xn"] = min(watch["min_xn"], mn)
        if mn <= 0.0:
            bad = pos[np.argmin(xn)]
            raise MonotonicityViolation(
                f"vertical speed {mn:.3e} <= 0 at {bad.tolist()}")
        watch["max_span"] = max(watch["max_span"],
                                float(np.max(np.abs(Y[:, :-1]))))
        tr = _trace_shear(X, pos, vals)
        dY = np.empty_like(Y)
        dY[:, :-1] = vals[:, :-1] / xn[:, None]
        dY[:, -1] = tr * Y[:, -1]
        watch["min_delta"] = min(watch["min_delta"], float(np.min(Y[:, -1])))
        return dY

    Y0 = np.concatenate([seeds, np.ones((nseeds, 1))], axis=1)
    res = _ode.rk45(rhs, h0, Y0, 0.0, rtol=rtol, atol=1e-13)
    deltas = res.y[:, -1]
    bottom = float(cell * np.sum(deltas))

    # integrate only the field part; the constant epsilon contributes
    # epsilon * |A| exactly, so a vanishing field gives residual 0.0
    def top_flux_1d(q):
        pts = np.empty((q.size, n))
        pts[:, 0] = q
        pts[:, -1] = h0
        return field3.eval(pts)[:, -1]

    if n == 2:
        top_field = _quad.adaptive_gauss_1d(top_flux_1d, A[0][0], A[0][1],
                                            rtol=1e-11, atol=1e-13)
    else:
        def top_flux_2d(pts2):
            pts = np.empty((pts2.shape[0], 3))
            pts[:, :2] = pts2
            pts[:, 2] = h0
            return field3.eval(pts)[:, -1]

        top_field = _quad.adaptive_gauss_2d(
            top_flux_2d, (A[0][0], A[0][1], A[1][0], A[1][1]),
            rtol=1e-11, atol=1e-13)

    box_measure = 1.0
    for lo, hi in A:
        box_measure *= hi - lo
    top = top_field + epsilon * box_measure
    residual = abs(top - epsilon * bottom)
    corner = max(max(abs(lo), abs(hi)) for lo, hi in A)
    R = max(watch["max_span"], corner, h0)

    disp_margin = disp_bound = None
    if gauge_constant is not None:
        disp_bound = max(h0, h0 / gauge_constant)
        final_pos = res.y[:, :-1]
        disp = np.sqrt(np.sum((final_pos - seeds) ** 2, axis=1) + h0 * h0)
        disp_margin = float(disp_bound - np.max(disp))

    return FlowTube(A=A, h0=h0, epsilon=epsilon,
                    seeds_per_axis=seeds_per_axis,
                    top_integral=top, bottom_measure=bottom,
                    residual=residual, R_bound=R,
                    delta_min=min(watch["min_delta"], float(np.min(deltas))),
                    displacement_margin=disp_margin,
                    displacement_bound=disp_bound)


def flow_tube_trajectories(eta: VectorField, epsilon: float, A, h0: float,
                           seeds_per_axis: int = 8,
                           rtol: float = 1e-10) -> list[dict]:
    """Recorded trajectory samples (seed, height, position, delta) for
    plotting; a coarse seed grid keeps the output small."""
    A = [tuple(map(float, ab)) for ab in A]
    field3 = _tube_field(eta, A)
    X = lifted_field(field3, epsilon)
    n = X.dim
    seeds, _ = _quad.midpoint_grid(A, [seeds_per_axis] * (n - 1))
    nseeds = seeds.shape[0]

    def rhs(h, Y):
        pos = np.empty((nseeds, n))
        pos[:, :-1] = Y[:, :-1]
        pos[:, -1] = h
        vals = X.eval(pos)
        xn = vals[:, -1]
        if np.min(xn) <= 0.0:
            raise MonotonicityViolation("vertical speed not positive")
        tr = _trace_shear(X, pos, vals)
        dY = np.empty_like(Y)
        dY[:, :-1] = vals[:, :-1] / xn[:, None]
        dY[:, -1] = tr * Y[:, -1]
        return dY

    Y0 = np.concatenate([seeds, np.ones((nseeds, 1))], axis=1)
    res = _ode.rk45(rhs, h0, Y0, 0.0, rtol=rtol, atol=1e-13, record=True)
    rows = []
    for h, Y in zip(res.path_t, res.path_y):
        for i in range(nseeds):
            rows.append({
                "seed": seeds[i].tolist(),
                "h": h,
                "position": [*Y[i, :-1].tolist(), h],
                "delta": float(Y[i, -1]),
            })
    return rows


# ---------------------------------------------------------------------------
# planar strip identity

def strip_identity_2d(eta: VectorField, r: float, t: float,
                      gauge: Optional[PhiFunction] = None,
                      rtol: float = 1e-10) -> VerificationReport:
    """Box flux balance on the strip [-r, r] x [0, t].

    The top flux of the vertical component equals the net side influx of
    the horizontal component; nothing crosses the bottom where the field
    vanishes.
    """
    if eta.dim != 2:
        raise ValueError("strip identity is planar")
    if eta.analytic_div is None:
        raise ValueError("strip identity needs a certified divergence-free field")
    rep = VerificationReport(scenario=f"strip:r={r:g}:t={t:g}:{eta.name}")

    def top(x1):
        pts = np.stack([x1, np.full_like(x1, t)], axis=1)
        return eta.eval(pts)[:, 1]

    def side(x2, sign):
        pts = np.stack([np.full_like(x2, sign * r), x2], axis=1)
        return eta.eval(pts)[:, 0]

    lhs = _quad.adaptive_gauss_1d(top, -r, r, rtol=rtol, atol=1e-14)
    rhs = _quad.adaptive_gauss_1d(lambda s: side(s, -1.0) - side(s, +1.0),
                                  0.0, t, rtol=rtol, atol=1e-14)
    residual = lhs - rhs
    rep.add(CheckResult.from_residual("strip flux identity", residual, 1e-8,
                                      detail=f"lhs={lhs:.12e} rhs={rhs:.12e}"))

    l1 = _quad.adaptive_gauss_1d(lambda x1: np.abs(top(x1)), -r, r,
                                 rtol=1e-6, atol=1e-14)
    cap = 2.0 * t * eta.sup_bound
    rep.add(CheckResult.from_margin("L1 bound on the top flux", l1, 1e-12,
                                    cap - l1))
    if gauge is not None:
        edges = np.array([[-r, t], [r, t]])
        vals = eta.eval(edges)
        margins = vals[:, 1] - gauge(np.abs(vals[:, 0]))
        rep.add(CheckResult.from_margin(
            "gauge decay at strip edges", float(np.min(margins)), 1e-12,
            float(np.min(margins))))
    else:
        rep.add(CheckResult.skipped("gauge decay at strip edges",
                                    "no gauge supplied"))
    rep.add(CheckResult.info("lhs top flux", lhs))
    rep.add(CheckResult.info("rhs side flux", rhs))
    return rep


# ---------------------------------------------------------------------------
# potential certification

@dataclass
class RigidityCertificate:
    label: str
    grid: dict
    conditions: list
    constants: dict
    verdict: str
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {
            "label": self.label,
            "grid": self.grid,
            "conditions": self.conditions,
            "constants": self.constants,
            "verdict": self.verdict,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


CERTIFIED = "CERTIFIED_SAMPLED"
VIOLATED = "VIOLATED"


def default_certification_grid(resolution: int = 200) -> GridSpec:
    """Log axis in radius spanning six decades, uniform axis in height
    dipping below the interface."""
    return GridSpec(box=((1e-3, 1e3), (-1.0, 10.0)),
                    resolution=(resolution, resolution),
                    spacing=("log", "uniform"))


def certify_potential(P: CylindricalPotential, grid: GridSpec,
                      c: float = 1.0,
                      margin_tol: float = 1e-12) -> RigidityCertificate:
    """Sampled certification of the three potential-side conditions:

    (zero)     V = 0 below the interface,
    (slope)    |grad V| <= rho^(n-2),
    (balance)  rho dV/drho >= c rho^(3-n) (dV/dz)^2.
    """
    if P.dV is None:
        raise ValueError("certification needs the potential gradient")
    n = P.dim
    rho_ax, z_ax = grid.axes()
    RHO, Z = np.meshgrid(rho_ax, z_ax, indexing="ij")
    rho = RHO.ravel()
    z = Z.ravel()

    V = P.V(rho, z)
    dr, dz = P.dV(rho, z)

    neg = z <= 0.0
    zero_margin = -float(np.max(np.abs(V[neg]))) if np.any(neg) else 0.0
    zero_arg = None
    if np.any(neg):
        idx = np.flatnonzero(neg)[np.argmax(np.abs(V[neg]))]
        zero_arg = (float(rho[idx]), float(z[idx]))

    slope = np.hypot(dr, dz)
    slope_margin_all = rho ** (n - 2.0) - slope
    i1 = int(np.argmin(slope_margin_all))
    slope_margin = float(slope_margin_all[i1])

    balance_all = rho * dr - c * rho ** (3.0 - n) * dz**2
    i2 = int(np.argmin(balance_all))
    balance_margin = float(balance_all[i2])

    conditions = [
        {"name": "zero below interface", "min_margin": zero_margin,
         "argmin_point": zero_arg},
        {"name": "slope bounded by rho^(n-2)", "min_margin": slope_margin,
         "argmin_point": (float(rho[i1]), float(z[i1]))},
        {"name": "radial-vertical balance", "min_margin": balance_margin,
         "argmin_point": (float(rho[i2]), float(z[i2]))},
    ]
    worst = min(zero_margin, slope_margin, balance_margin)
    verdict = CERTIFIED if worst >= -margin_tol else VIOLATED
    witness = None
    if verdict == VIOLATED:
        # first violated condition in listing order, so a broken slope
        # bound is reported as such even when the balance is worse
        bad = next(cc for cc in conditions
                   if cc["min_margin"] < -margin_tol)
        pt = bad["argmin_point"]
        witness = {
            "condition": bad["name"],
            "point": pt,
            "margin": bad["min_margin"],
            "V": float(P.V(np.array([pt[0]]), np.array([pt[1]]))[0]),
        }
    return RigidityCertificate(
        label=P.label,
        grid={"box": [list(b) for b in grid.box],
              "resolution": list(grid.resolution),
              "spacing": list(grid.spacing)},
        conditions=conditions,
        constants={"gamma": P.gamma, "c": c, "n": n},
        verdict=verdict,
        witness=witness,
    )


# ---------------------------------------------------------------------------
# separable-ansatz obstruction

def separable_demo(gamma: float, rho0: float, psi0: float,
                   blowup_threshold: float = 1e12) -> VerificationReport:
    """Integrate the saturated radial profile ODE rho psi' = gamma psi^2.

    The profile explodes at finite radius rho* = rho0 exp(1/(gamma psi0));
    before that it must violate the slope cap |psi'| <= rho, which is the
    numerical content of the obstruction in three dimensions.
    """
    if min(gamma, rho0, psi0) <= 0:
        raise ValueError("gamma, rho0, psi0 must be positive")
    rep = VerificationReport(
        scenario=f"separable:gamma={gamma:g}:rho0={rho0:g}:psi0={psi0:g}")
    rho_star = rho0 * math.exp(1.0 / (gamma * psi0))

    def rhs(rho, y):
        return gamma * y * y / rho

    try:
        res = _ode.rk45_event(
            rhs, rho0, np.array([psi0]),
            lambda rho, y: float(y[0]) - blowup_threshold,
            t_max=2.0 * rho_star, rtol=1e-10, atol=1e-8)
        blow_rho = res.t if res.status == "event" else math.nan
    except _ode.StiffFailure as exc:
        # step underflow is itself a blow-up indicator
        blow_rho = float(str(exc).rsplit("t=", 1)[-1])

    rel = abs(blow_rho - rho_star) / rho_star
    rep.add(CheckResult.from_residual(
        "numeric blow-up radius vs closed form", rel, 1e-2,
        detail=f"numeric={blow_rho:.8g} analytic={rho_star:.8g}"))

    cap_radius = None
    if gamma * psi0 * psi0 / rho0 - rho0 >= 0.0:
        cap_radius = rho0
    else:
        try:
            slope = _ode.rk45_event(
                rhs, rho0, np.array([psi0]),
                lambda rho, y: gamma * float(y[0]) ** 2 / rho - rho,
                t_max=2.0 * rho_star, rtol=1e-10, atol=1e-12)
            if slope.status == "event":
                cap_radius = slope.t
        except _ode.StiffFailure:
            pass
    if cap_radius is not None:
        rep.add(CheckResult.info("slope cap first violated at radius",
                                 cap_radius))
        rep.add(CheckResult.from_margin(
            "slope cap breaks before blow-up", cap_radius, 1e-9,
            blow_rho - cap_radius))
    else:
        rep.add(CheckResult.info("slope cap never violated before blow-up",
                                 math.nan))
    rep.add(CheckResult.info("analytic blow-up radius", rho_star))
    return rep
