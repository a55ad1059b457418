"""Heat flows of functionals and the abelian Yang-Mills reduction.

Time dependence always comes from the exact spectral propagator of the Hodge
Laplacian, so the only discretization errors are spatial quadrature and the
finite-difference time derivative used in residual checks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .functionals import ThetaAtom, evaluate, eval_u, leaves, map_leaves
from .hodge import HodgeError, OneForm, harmonic_projection, heat_propagate
from .levy import levy_analytic, levy_analytic_u
from .pathspace import Curve

__all__ = [
    "FlowError",
    "heat_functional",
    "time_derivative",
    "levy_heat_residual",
    "LongTimeResult",
    "long_time_limit",
    "ym_u1_flow",
    "u1_transport_heat_check",
]

DEFAULT_DT = 1e-5
RATE_WINDOW_START = 0.05
RATE_FLOOR = 1e-12


class FlowError(ValueError):
    pass


def _check_time(t):
    t = float(t)
    if not t >= 0:
        raise FlowError(f"time must be >= 0, got {t}")
    return t


def heat_functional(template, t: float):
    """Replace every leaf form w by its heat evolution at time t."""
    t = _check_time(t)
    return map_leaves(template, lambda w: heat_propagate(w, t))


def time_derivative(fn, t: float, dt: float = DEFAULT_DT):
    """4th-order finite difference of fn at t; one-sided when t < 2 dt."""
    if t >= 2 * dt:
        f = [fn(t + k * dt) for k in (-2, -1, 1, 2)]
        w = (1, -8, 8, -1)
    else:
        f = [fn(t + k * dt) for k in range(5)]
        w = (-25, 48, -36, 16, -3)
    # the weights sum to zero; differencing against f[0] keeps constants exact
    return sum(wk * (fk - f[0]) for wk, fk in zip(w, f)) / (12 * dt)


def _needs_loop(template, c: Curve):
    if not c.closed and any(isinstance(leaf, ThetaAtom) for leaf in leaves(template)):
        raise FlowError("templates with Theta atoms need a closed curve (d delta a is only invisible on loops)")


def levy_heat_residual(template, c: Curve, t: float, dt: float = DEFAULT_DT) -> float:
    """|d/dt F_t(c) - Delta_L F_t(c)| for F_t = heat_functional(template, t)."""
    t = _check_time(t)
    _needs_loop(template, c)
    dF = time_derivative(lambda s: evaluate(heat_functional(template, s), c), t, dt)
    return abs(dF - levy_analytic(heat_functional(template, t), c))


@dataclass
class LongTimeResult:
    limit: float
    rate: float | None
    times: np.ndarray
    values: np.ndarray

    def summary(self) -> dict:
        return {"limit": self.limit, "rate": self.rate}


def long_time_limit(template, c: Curve, t_grid) -> LongTimeResult:
    """Values along ``t_grid``, the exact t -> infinity limit and a fitted decay rate.

    The limit evaluates the template with every leaf replaced by its harmonic
    projection.  The rate is the slope of log|F(t) - F(inf)| over grid times
    t >= 0.05 where the gap exceeds 1e-12 (None with fewer than two such points).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    for t in t_grid:
        _check_time(t)
    vals = np.array([evaluate(heat_functional(template, t), c) for t in t_grid])
    limit = evaluate(map_leaves(template, harmonic_projection), c)
    gap = np.abs(vals - limit)
    mask = (t_grid >= RATE_WINDOW_START) & (gap > RATE_FLOOR)
    rate = None
    if np.count_nonzero(mask) >= 2:
        rate = float(np.polyfit(t_grid[mask], np.log(gap[mask]), 1)[0])
    return LongTimeResult(limit, rate, t_grid, vals)


def ym_u1_flow(a0: OneForm, t: float) -> OneForm:
    """Abelian Yang-Mills flow d/dt a = -delta da.

    Only the coexact potential moves; exact and harmonic parts are fixed.
    """
    t = _check_time(t)
    if not isinstance(a0, OneForm):
        raise HodgeError("ym_u1_flow needs a OneForm")
    return OneForm(a0.manifold, a0.alpha, heat_propagate(a0.beta, t), a0.harmonic)


def u1_transport_heat_check(a0: OneForm, c: Curve, t_grid, dt: float = DEFAULT_DT) -> np.ndarray:
    """|d/dt U^{a(t)}(c) - Delta_L U^{a(t)}(c)| along t_grid, a(t) the Hodge heat flow."""
    if not c.closed:
        raise FlowError("the transport heat check is stated for loops")
    out = []
    for t in np.asarray(t_grid, dtype=float):
        t = _check_time(t)
        dU = time_derivative(lambda s: eval_u(heat_propagate(a0, s), c), t, dt)
        out.append(abs(dU - levy_analytic_u(heat_propagate(a0, t), c)))
    return np.array(out)
