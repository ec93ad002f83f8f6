"""Embedded adaptive Runge-Kutta integration (Dormand-Prince 4(5)).

Supports batched states with a common adaptive step (error controlled by
the worst component across the batch) and single-trajectory integration
with bisection-refined event detection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class StiffFailure(RuntimeError):
    """Step size underflowed before reaching the target."""


_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                -92097 / 339200, 187 / 2100, 1 / 40])


def _stages(f: Callable, t: float, y: np.ndarray, h: float,
            k1: Optional[np.ndarray] = None) -> list[np.ndarray]:
    ks = [k1 if k1 is not None else np.asarray(f(t, y))]
    for i, arow in enumerate(_A):
        acc = arow[0] * ks[0]
        for j in range(1, len(arow)):
            acc = acc + arow[j] * ks[j]
        ks.append(np.asarray(f(t + _C[i + 1] * h, y + h * acc)))
    return ks


def _advance(y: np.ndarray, h: float, ks: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    y5 = y + h * sum(b * k for b, k in zip(_B5, ks) if b != 0.0)
    return y5, ks


def dp_step(f: Callable, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """One fixed fifth-order step; used by the event bisection."""
    ks = _stages(f, t, y, h)
    y5, _ = _advance(y, h, ks)
    return y5


@dataclass
class OdeResult:
    t: float
    y: np.ndarray
    naccepted: int
    nrejected: int
    path_t: list = field(default_factory=list)
    path_y: list = field(default_factory=list)


def rk45(f: Callable, t0: float, y0, t1: float, rtol: float = 1e-9,
         atol: float = 1e-12, max_steps: int = 200_000,
         record: bool = False) -> OdeResult:
    """Integrate dy/dt = f(t, y) from t0 to t1 with a shared adaptive step.

    y may have any shape; the error test takes the worst component, so a
    batch of trajectories advances in lockstep at the accuracy of its most
    demanding member.
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    span = t1 - t0
    if span == 0.0:
        return OdeResult(t, y, 0, 0)
    direction = 1.0 if span > 0 else -1.0
    h = span / 100.0
    res = OdeResult(t, y, 0, 0)
    if record:
        res.path_t.append(t)
        res.path_y.append(y.copy())
    k1 = np.asarray(f(t, y))
    for _ in range(max_steps):
        remaining = t1 - t
        if direction * remaining <= 0.0:
            break
        if direction * h > direction * remaining:
            h = remaining
        ks = _stages(f, t, y, h, k1=k1)
        y5 = y + h * sum(b * k for b, k in zip(_B5, ks) if b != 0.0)
        k7 = np.asarray(f(t + h, y5))
        ks.append(k7)
        y4 = y + h * sum(b * k for b, k in zip(_B4, ks) if b != 0.0)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.max(np.abs(y5 - y4) / scale)) if y5.size else 0.0
        if err <= 1.0:
            t += h
            y = y5
            k1 = k7  # first-same-as-last
            res.naccepted += 1
            if record:
                res.path_t.append(t)
                res.path_y.append(y.copy())
            grow = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
            h *= grow
        else:
            res.nrejected += 1
            h *= max(0.2, 0.9 * err ** -0.2)
        if abs(h) < 1e-14 * max(1.0, abs(span)):
            raise StiffFailure(f"step underflow at t={t}")
    else:
        raise StiffFailure(f"exceeded {max_steps} steps at t={t}")
    res.t = t
    res.y = y
    return res


@dataclass
class EventResult:
    status: str            # "event" or "final"
    t: float
    y: np.ndarray
    naccepted: int
    nrejected: int


def rk45_event(f: Callable, t0: float, y0, event: Callable,
               t_max: float, rtol: float = 1e-9, atol: float = 1e-12,
               event_tol: float = 1e-12, max_steps: int = 200_000) -> EventResult:
    """Integrate until event(t, y) crosses zero, refining by bisection.

    Stops at the first sign change of the event function along accepted
    steps; each bisection iteration replays a fixed fifth-order step from
    the bracketing state, so the located crossing inherits the
    integrator's accuracy.
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    g_prev = float(event(t, y))
    if abs(g_prev) <= event_tol:
        return EventResult("event", t, y, 0, 0)
    span = t_max - t0
    direction = 1.0 if span > 0 else -1.0
    h = span / 100.0
    nacc = nrej = 0
    k1 = np.asarray(f(t, y))
    for _ in range(max_steps):
        remaining = t_max - t
        if direction * remaining <= 0.0:
            return EventResult("final", t, y, nacc, nrej)
        if direction * h > direction * remaining:
            h = remaining
        ks = _stages(f, t, y, h, k1=k1)
        y5 = y + h * sum(b * k for b, k in zip(_B5, ks) if b != 0.0)
        k7 = np.asarray(f(t + h, y5))
        ks.append(k7)
        y4 = y + h * sum(b * k for b, k in zip(_B4, ks) if b != 0.0)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.max(np.abs(y5 - y4) / scale))
        if err <= 1.0:
            g_new = float(event(t + h, y5))
            if g_prev * g_new <= 0.0:
                tc, yc = _bisect_event(f, t, y, h, event, g_prev, event_tol)
                return EventResult("event", tc, yc, nacc + 1, nrej)
            t += h
            y = y5
            g_prev = g_new
            k1 = k7
            nacc += 1
            grow = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
            h *= grow
        else:
            nrej += 1
            h *= max(0.2, 0.9 * err ** -0.2)
        if abs(h) < 1e-14 * max(1.0, abs(span)):
            raise StiffFailure(f"step underflow at t={t}")
    raise StiffFailure(f"exceeded {max_steps} steps at t={t}")


def _bisect_event(f, t0, y0, h, event, g0, event_tol):
    # bisect the step fraction so the bracket works for either sign of h
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        ym = dp_step(f, t0, y0, mid * h)
        gm = float(event(t0 + mid * h, ym))
        if abs(gm) <= event_tol or (hi - lo) <= 1e-16:
            return t0 + mid * h, ym
        if g0 * gm <= 0.0:
            hi = mid
        else:
            lo = mid
    return t0 + mid * h, ym
