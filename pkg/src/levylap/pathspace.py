"""Discretized H^1 curves, fields along them, and the path-space exponential.

A :class:`Curve` stores ``N + 1`` samples on the uniform grid ``tau_i = i/N``
(``N`` a power of two).  Constructors that know a closed form attach an
analytic position/velocity oracle; everything else falls back to 4th-order
finite differences.  All integrals over ``[0, 1]`` use the composite
trapezoidal rule (:func:`trapezoid`), which is spectrally accurate for smooth
periodic integrands on closed loops.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .geometry import FlatTorus, Manifold, Sphere2, Tangent, Point
from .geometry import manifold_from_dict

__all__ = [
    "PathError",
    "Curve",
    "VectorFieldAlongCurve",
    "TransportedFrame",
    "trapezoid",
    "velocity",
    "make_basis_field",
    "random_h1_field",
    "path_exp",
    "torus_winding",
    "sphere_latitude",
    "random_smooth_loop",
    "geodesic_segment",
    "constant_curve",
    "write_curve_csv",
    "read_curve_csv",
    "RESOLUTION_FACTOR",
]

#: sin(n pi tau) needs at least this many grid points per half-wave.
RESOLUTION_FACTOR = 16


class PathError(ValueError):
    pass


def trapezoid(values, axis=0):
    """Composite trapezoid rule on the uniform grid of [0, 1]."""
    v = np.moveaxis(np.asarray(values), axis, 0)
    n = v.shape[0] - 1
    return (np.sum(v, axis=0) - 0.5 * (v[0] + v[-1])) / n


@dataclass(frozen=True, eq=False)
class Curve:
    """Samples of an H^1 curve at tau_i = i/N.

    ``position``/``velocity_fn`` are optional analytic oracles mapping an
    array of parameters to ambient coordinates (torus positions may be
    unwrapped; they are reduced on use).  ``node_velocities`` holds exact
    velocities at the nodes when they are known without a full oracle (for
    instance after :func:`path_exp` along a field with known derivative).
    """

    manifold: Manifold
    samples: np.ndarray
    closed: bool = False
    position: Optional[Callable] = None
    velocity_fn: Optional[Callable] = None
    meta: dict = field(default_factory=dict)
    node_velocities: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        m = self.manifold
        x = np.array(self.samples, dtype=float)
        if x.ndim != 2 or x.shape[1] != m.ambient_dim:
            raise PathError(f"samples must have shape (N+1, {m.ambient_dim})")
        n = x.shape[0] - 1
        if n < 1 or n & (n - 1):
            raise PathError(f"grid size N must be a power of two, got {n}")
        m.check_points(x, tol=1e-10)
        x = m.normalize_points(x)
        if self.closed:
            if not m.same_point(x[0], x[-1], tol=1e-10):
                raise PathError("closed curve must satisfy samples[0] == samples[N]")
            x[-1] = x[0]
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        if self.node_velocities is not None:
            v = np.array(self.node_velocities, dtype=float)
            if v.shape != x.shape:
                raise PathError("node_velocities must match the samples shape")
            v.setflags(write=False)
            object.__setattr__(self, "node_velocities", v)

    @property
    def N(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def tau(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.N + 1)

    @property
    def dim(self) -> int:
        return self.manifold.dim

    def point(self, i: int) -> Point:
        return Point(self.manifold, self.samples[i])

    def node_index(self, tau: float) -> int:
        i = int(round(tau * self.N))
        if not 0 <= i <= self.N or abs(i - tau * self.N) > 1e-9:
            raise PathError(f"tau={tau} is not a grid node of N={self.N}")
        return i

    def unwrapped(self) -> np.ndarray:
        """Continuous ambient coordinates (torus: minimal-image accumulation)."""
        if not isinstance(self.manifold, FlatTorus):
            return np.array(self.samples)
        steps = self.manifold.displacement(self.samples[:-1], self.samples[1:])
        return np.vstack([self.samples[:1], self.samples[0] + np.cumsum(steps, axis=0)])

    def without_oracle(self) -> "Curve":
        return replace(self, position=None, velocity_fn=None, node_velocities=None)

    def velocities(self) -> np.ndarray:
        """Velocity at every node (analytic oracle if present)."""
        if self.velocity_fn is not None:
            v = np.asarray(self.velocity_fn(self.tau), dtype=float)
        elif self.node_velocities is not None:
            return self.node_velocities
        else:
            v = _fd_velocity(self.unwrapped(), self.closed)
        return self.manifold.project(self.samples, v)

    def half_step_states(self):
        """Positions and velocities at tau_{i+1/2}, i = 0..N-1 (for RK4)."""
        m = self.manifold
        th = (np.arange(self.N) + 0.5) / self.N
        if self.position is not None and self.velocity_fn is not None:
            x = m.normalize_points(np.asarray(self.position(th), dtype=float))
            v = np.asarray(self.velocity_fn(th), dtype=float)
        else:
            x = _interp_half(self.unwrapped(), self.closed)
            v = _interp_half(self.velocities(), self.closed)
            x = m.normalize_points(x)
        return x, m.project(x, v)

    @property
    def winding(self):
        return self.meta.get("winding")

    @property
    def one_sided_endpoints(self) -> bool:
        return (not self.closed) and self.velocity_fn is None and self.node_velocities is None


def _periodic_ext(x, closed, pad):
    """Pad node values by `pad` on each side, periodically when closed."""
    if closed:
        body = x[:-1]
        shift = x[-1] - x[0]
        left = body[-pad:] - shift
        right = x[1:pad + 1] + shift
        return np.vstack([left, x, right])
    return None


def _fd_velocity(x, closed):
    n = x.shape[0] - 1
    h = 1.0 / n
    if closed:
        e = _periodic_ext(x, True, 2)
        return (-e[4:] + 8 * e[3:-1] - 8 * e[1:-3] + e[:-4]) / (12 * h)
    if n < 4:
        return np.gradient(x, h, axis=0, edge_order=2)
    v = np.empty_like(x)
    v[2:-2] = (-x[4:] + 8 * x[3:-1] - 8 * x[1:-3] + x[:-4]) / (12 * h)
    v[0] = (-25 * x[0] + 48 * x[1] - 36 * x[2] + 16 * x[3] - 3 * x[4]) / (12 * h)
    v[1] = (-3 * x[0] - 10 * x[1] + 18 * x[2] - 6 * x[3] + x[4]) / (12 * h)
    v[-1] = (25 * x[-1] - 48 * x[-2] + 36 * x[-3] - 16 * x[-4] + 3 * x[-5]) / (12 * h)
    v[-2] = (3 * x[-1] + 10 * x[-2] - 18 * x[-3] + 6 * x[-4] - x[-5]) / (12 * h)
    return v


def _interp_half(x, closed):
    """4-point Lagrange interpolation to the midpoints of the grid."""
    n = x.shape[0] - 1
    if closed:
        e = _periodic_ext(x, True, 2)
        # e[k + 2] == x[k]
        return (-e[1:n + 1] + 9 * e[2:n + 2] + 9 * e[3:n + 3] - e[4:n + 4]) / 16
    if n < 3:
        return 0.5 * (x[:-1] + x[1:])
    out = np.empty((n,) + x.shape[1:])
    out[1:-1] = (-x[:-3] + 9 * x[1:-2] + 9 * x[2:-1] - x[3:]) / 16
    out[0] = (5 * x[0] + 15 * x[1] - 5 * x[2] + x[3]) / 16
    out[-1] = (x[-4] - 5 * x[-3] + 15 * x[-2] + 5 * x[-1]) / 16
    return out


def velocity(c: Curve, i: int) -> Tangent:
    if not 0 <= i <= c.N:
        raise PathError(f"node index {i} out of range 0..{c.N}")
    return Tangent(c.point(i), c.velocities()[i])


@dataclass(frozen=True, eq=False)
class VectorFieldAlongCurve:
    """Ambient vectors at the nodes; ``derivative`` optionally holds d/dtau of them."""

    curve: Curve
    values: np.ndarray
    derivative: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("values", "derivative"):
            v = getattr(self, name)
            if v is None:
                continue
            v = np.array(v, dtype=float)
            if v.shape != self.curve.samples.shape:
                raise PathError(f"field {name} must match the curve samples shape")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    def tangent(self, i: int) -> Tangent:
        return Tangent(self.curve.point(i), self.values[i])

    def pointwise_norm(self) -> np.ndarray:
        m = self.curve.manifold
        return np.sqrt(m.inner(self.curve.samples, self.values, self.values))

    def inner_g0(self, other: "VectorFieldAlongCurve") -> float:
        """L2 pairing G0(X, Y) = int_0^1 g(X, Y) dtau."""
        m = self.curve.manifold
        return float(trapezoid(m.inner(self.curve.samples, self.values, other.values)))

    @property
    def vanishes_at_ends(self) -> bool:
        return bool(np.all(self.values[0] == 0) and np.all(self.values[-1] == 0))

    def __add__(self, other):
        d = None
        if self.derivative is not None and other.derivative is not None:
            d = self.derivative + other.derivative
        return VectorFieldAlongCurve(self.curve, self.values + other.values, d)

    def __mul__(self, s):
        d = None if self.derivative is None else self.derivative * s
        return VectorFieldAlongCurve(self.curve, self.values * s, d)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class TransportedFrame:
    """Parallel frames Z_mu(tau_i) = Q_{tau_i,0} Z_mu, shape (N+1, dim, ambient)."""

    curve: Curve
    frames: np.ndarray
    drift: float = 0.0

    def field_from_components(self, comps) -> VectorFieldAlongCurve:
        """Field sum_mu h^mu(tau) Z_mu(tau) from components of shape (N+1, dim)."""
        comps = np.asarray(comps, dtype=float)
        return VectorFieldAlongCurve(self.curve, np.einsum("im,imk->ik", comps, self.frames))

    def components(self, values) -> np.ndarray:
        return np.einsum("ik,imk->im", np.asarray(values), self.frames)


def make_basis_field(frame: TransportedFrame, mu: int, n: int) -> VectorFieldAlongCurve:
    """sqrt(2) sin(n pi tau) Z_mu(tau), with mu 1-based."""
    c = frame.curve
    if not 1 <= mu <= c.dim:
        raise PathError(f"direction index mu={mu} outside 1..{c.dim}")
    if n < 1:
        raise PathError("mode number must be positive")
    if RESOLUTION_FACTOR * n > c.N:
        raise PathError(
            f"mode n={n} needs N >= {RESOLUTION_FACTOR * n} (N >= {RESOLUTION_FACTOR}*n); curve has N={c.N}"
        )
    i = np.arange(c.N + 1)
    phase = np.pi * ((n * i) % (2 * c.N)) / c.N
    s = np.sqrt(2.0) * np.sin(phase)
    s[0] = s[-1] = 0.0  # exact zeros at both ends
    ds = np.sqrt(2.0) * n * np.pi * np.cos(phase)
    Z = frame.frames[:, mu - 1, :]
    # a parallel field only changes along the normal: Z' = -Gamma(Z, gamma')
    dZ = -c.manifold.christoffel(c.samples, Z, c.velocities())
    return VectorFieldAlongCurve(c, s[:, None] * Z, ds[:, None] * Z + s[:, None] * dZ)


def random_h1_field(frame: TransportedFrame, rng, modes: int = 6, scale: float = 1.0) -> VectorFieldAlongCurve:
    """Random combination of basis fields sqrt(2) sin(n pi tau) Z_mu with 1/n decay.

    The result vanishes at both ends and has G0-norm ``scale``.
    """
    c = frame.curve
    X = VectorFieldAlongCurve(c, np.zeros_like(c.samples), np.zeros_like(c.samples))
    for n in range(1, modes + 1):
        for mu in range(1, c.dim + 1):
            X = X + make_basis_field(frame, mu, n) * (rng.normal() / n)
    norm = math.sqrt(X.inner_g0(X))
    return X * (scale / norm) if norm > 0 else X


def path_exp(c: Curve, X: VectorFieldAlongCurve, s: float) -> Curve:
    """Exp_c(sX)(tau) = exp_{c(tau)}(s X(tau)).

    The result carries no analytic oracle.  When ``X.derivative`` is known,
    exact node velocities follow from the chain rule through the exponential
    map; otherwise velocities fall back to finite differences.
    """
    if X.curve is not c and X.curve.samples.shape != c.samples.shape:
        raise PathError("vector field is not along this curve")
    m = c.manifold
    if isinstance(m, Sphere2):
        reach = abs(s) * float(np.max(X.pointwise_norm(), initial=0.0))
        if reach >= 0.5 * np.pi * m.radius:
            raise PathError(
                f"|s| max|X| = {reach:.3g} exceeds the sphere guard pi*rho/2 = {0.5 * np.pi * m.radius:.3g}"
            )
    new = m.exp(c.samples, s * X.values)
    closed = c.closed and np.array_equal(X.values[0], X.values[-1])
    meta = {k: v for k, v in c.meta.items() if k != "constructor"}
    meta["constructor"] = "path_exp"
    vel = None
    if X.derivative is not None:
        vel = _exp_velocity(m, c.samples, c.velocities(), s * X.values, s * X.derivative)
        vel = m.project(m.normalize_points(new), vel)
    return Curve(m, new, closed=closed, meta=meta, node_velocities=vel)


def _exp_velocity(m, x, dx, v, dv):
    """d/dtau exp_{x(tau)}(v(tau)) given dx/dtau and dv/dtau."""
    if not isinstance(m, Sphere2):
        return dx + dv
    rho = m.radius
    r = np.linalg.norm(v, axis=-1, keepdims=True)
    u = r / rho
    small = u < 1e-3
    safe = np.where(small, 1.0, r)
    A = np.cos(u)
    B = np.where(small, 1.0 - u**2 / 6.0, rho * np.sin(u) / safe)
    # C = (r cos u - rho sin u) / r^3, with its series near r = 0
    C = np.where(small, -(1.0 - u**2 / 10.0) / (3.0 * rho**2), (safe * np.cos(u) - rho * np.sin(u)) / safe**3)
    vdv = np.sum(v * dv, axis=-1, keepdims=True)
    return A * dx + B * dv + vdv * (-B / rho**2 * x + C * v)


# ---------------------------------------------------------------------------
# constructors

def _grid(N):
    return np.linspace(0.0, 1.0, N + 1)


def _perturbation(rng, amplitude, modes, width):
    """Coefficients for sum_m c_m sin(2 pi m tau), decaying like 1/m."""
    if modes <= 0 or amplitude == 0:
        return np.zeros((0, width))
    return amplitude * rng.standard_normal((modes, width)) / np.arange(1, modes + 1)[:, None]


def _sin_series(coef, t):
    t = np.asarray(t, dtype=float)
    if len(coef) == 0:
        return np.zeros(t.shape + (coef.shape[1],)), np.zeros(t.shape + (coef.shape[1],))
    m = np.arange(1, len(coef) + 1)
    arg = 2 * np.pi * np.multiply.outer(t, m)
    val = np.sin(arg) @ coef
    der = (np.cos(arg) * (2 * np.pi * m)) @ coef
    return val, der


def torus_winding(manifold: FlatTorus, p: int, q: int, N: int = 1024, base=(0.0, 0.0),
                  amplitude: float = 0.0, modes: int = 0, seed: int = 0) -> Curve:
    """Closed loop on the 2-torus with winding numbers (p, q).

    tau -> base + (p L1 tau, q L2 tau) + sum_m c_m sin(2 pi m tau), with the
    random coefficients c_m drawn from ``seed``.
    """
    if not isinstance(manifold, FlatTorus) or manifold.dim != 2:
        raise PathError("torus_winding needs a 2-dimensional FlatTorus")
    if p == 0 and q == 0 and (amplitude == 0 or modes == 0):
        raise PathError("winding (0, 0) without perturbation is a constant curve")
    L = manifold.period_array
    base = np.asarray(base, dtype=float)
    slope = np.array([p, q], dtype=float) * L
    coef = _perturbation(np.random.default_rng(seed), amplitude, modes, 2)

    def position(t):
        val, _ = _sin_series(coef, t)
        return base + np.multiply.outer(np.asarray(t, dtype=float), slope) + val

    def vel(t):
        _, der = _sin_series(coef, t)
        return slope + der

    t = _grid(N)
    speed = float(np.max(np.linalg.norm(vel(t), axis=-1)))
    meta = {"constructor": "torus_winding", "winding": (int(p), int(q)), "seed": int(seed),
            "amplitude": float(amplitude), "modes": int(modes), "base": base.tolist(),
            "resolution_constant": speed}
    return Curve(manifold, position(t), closed=True, position=position, velocity_fn=vel, meta=meta)


def sphere_latitude(manifold: Sphere2, theta0: float, N: int = 1024, amplitude: float = 0.0,
                    modes: int = 0, seed: int = 0, phi0: float = 0.0) -> Curve:
    """Latitude circle at polar angle theta0, traversed once with phi = phi0 + 2 pi tau.

    A nonzero ``amplitude`` perturbs the polar angle by a random sine series.
    """
    if not isinstance(manifold, Sphere2):
        raise PathError("sphere_latitude needs a Sphere2")
    if not 0 < theta0 < np.pi:
        raise PathError("theta0 must lie strictly between the poles")
    rho = manifold.radius
    coef = _perturbation(np.random.default_rng(seed), amplitude, modes, 1)

    def angles(t):
        val, der = _sin_series(coef, t)
        th = theta0 + val[..., 0]
        return th, der[..., 0], phi0 + 2 * np.pi * np.asarray(t, dtype=float)

    def position(t):
        th, _, ph = angles(t)
        return rho * np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)

    def vel(t):
        th, dth, ph = angles(t)
        dph = 2 * np.pi
        return rho * np.stack([
            np.cos(th) * np.cos(ph) * dth - np.sin(th) * np.sin(ph) * dph,
            np.cos(th) * np.sin(ph) * dth + np.sin(th) * np.cos(ph) * dph,
            -np.sin(th) * dth,
        ], axis=-1)

    th_all = angles(_grid(N))[0]
    if np.any(th_all <= 0) or np.any(th_all >= np.pi):
        raise PathError("perturbed latitude crosses a pole")
    t = _grid(N)
    meta = {"constructor": "sphere_latitude", "theta0": float(theta0), "seed": int(seed),
            "amplitude": float(amplitude), "modes": int(modes), "winding": (0,),
            "resolution_constant": float(np.max(np.linalg.norm(vel(t), axis=-1)))}
    return Curve(manifold, position(t), closed=True, position=position, velocity_fn=vel, meta=meta)


def random_smooth_loop(manifold: Manifold, seed: int, modes: int = 4, N: int = 1024,
                       amplitude: float = 0.2, center=None) -> Curve:
    """Contractible smooth loop built from a random trigonometric polynomial.

    Flat manifolds: center + sum_m (a_m cos 2 pi m tau + b_m sin 2 pi m tau) - (value at 0).
    Sphere: the same series added to a center direction, then normalized.
    """
    if modes < 1:
        raise PathError("random_smooth_loop needs at least one mode")
    rng = np.random.default_rng(seed)
    amb = manifold.ambient_dim
    scale = manifold.radius if isinstance(manifold, Sphere2) else 1.0
    a = amplitude * scale * rng.standard_normal((modes, amb)) / np.arange(1, modes + 1)[:, None]
    b = amplitude * scale * rng.standard_normal((modes, amb)) / np.arange(1, modes + 1)[:, None]
    if center is None:
        if isinstance(manifold, Sphere2):
            center = rng.standard_normal(3)
            center = manifold.radius * center / np.linalg.norm(center)
        elif isinstance(manifold, FlatTorus):
            center = rng.uniform(0, 1, manifold.dim) * manifold.period_array
        else:
            center = np.zeros(amb)
    center = np.asarray(center, dtype=float)
    m_idx = np.arange(1, modes + 1)

    def raw(t):
        arg = 2 * np.pi * np.multiply.outer(np.asarray(t, dtype=float), m_idx)
        val = np.cos(arg) @ a + np.sin(arg) @ b - a.sum(axis=0)
        der = (2 * np.pi * m_idx) * (-np.sin(arg)) @ a + (2 * np.pi * m_idx) * np.cos(arg) @ b
        return center + val, der

    if isinstance(manifold, Sphere2):
        def position(t):
            w, _ = raw(t)
            return manifold.radius * w / np.linalg.norm(w, axis=-1, keepdims=True)

        def vel(t):
            w, dw = raw(t)
            r = np.linalg.norm(w, axis=-1, keepdims=True)
            u = w / r
            return manifold.radius * (dw - np.sum(u * dw, axis=-1, keepdims=True) * u) / r

        if np.min(np.linalg.norm(raw(_grid(N))[0], axis=-1)) < 0.1 * manifold.radius:
            raise PathError("random loop passes too close to the sphere center; pick another seed")
    else:
        def position(t):
            return raw(t)[0]

        def vel(t):
            return raw(t)[1]

    t = _grid(N)
    winding = (0,) * manifold.dim if isinstance(manifold, FlatTorus) else (0,)
    meta = {"constructor": "random_smooth_loop", "seed": int(seed), "modes": int(modes),
            "amplitude": float(amplitude), "winding": winding,
            "resolution_constant": float(np.max(np.linalg.norm(vel(t), axis=-1)))}
    return Curve(manifold, position(t), closed=True, position=position, velocity_fn=vel, meta=meta)


def geodesic_segment(manifold: Manifold, p, v, N: int = 1024) -> Curve:
    """Open geodesic tau -> exp_p(tau v)."""
    p = np.asarray(p, dtype=float)
    v = manifold.project(p, np.asarray(v, dtype=float))
    if not np.linalg.norm(v) > 0:
        raise PathError("geodesic_segment needs a nonzero initial velocity")

    if isinstance(manifold, Sphere2):
        rho = manifold.radius
        speed = np.linalg.norm(v)
        u = v / speed

        def position(t):
            ang = np.multiply.outer(np.asarray(t, dtype=float), speed / rho)
            return np.cos(ang)[..., None] * p + rho * np.sin(ang)[..., None] * u

        def vel(t):
            ang = np.multiply.outer(np.asarray(t, dtype=float), speed / rho)
            return speed * (-np.sin(ang)[..., None] * p / rho + np.cos(ang)[..., None] * u)
    else:
        def position(t):
            return p + np.multiply.outer(np.asarray(t, dtype=float), v)

        def vel(t):
            return np.broadcast_to(v, np.shape(t) + v.shape).copy()

    meta = {"constructor": "geodesic_segment", "resolution_constant": float(np.linalg.norm(v))}
    return Curve(manifold, position(_grid(N)), closed=False, position=position, velocity_fn=vel, meta=meta)


def constant_curve(manifold: Manifold, p, N: int = 64, closed: bool = True) -> Curve:
    p = np.asarray(p, dtype=float)

    def position(t):
        return np.broadcast_to(p, np.shape(t) + p.shape).copy()

    def vel(t):
        return np.zeros(np.shape(t) + p.shape)

    winding = (0,) * manifold.dim if isinstance(manifold, FlatTorus) else (0,)
    meta = {"constructor": "constant_curve", "winding": winding, "resolution_constant": 0.0}
    return Curve(manifold, position(_grid(N)), closed=closed, position=position, velocity_fn=vel, meta=meta)


# ---------------------------------------------------------------------------
# serialization

def _jsonable(v):
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def write_curve_csv(c: Curve, path) -> Path:
    """Write ``path`` (tau + coordinate columns) and a ``.json`` metadata sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = ["x", "y", "z"] if c.manifold.ambient_dim <= 3 else [f"x{k}" for k in range(c.manifold.ambient_dim)]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tau"] + names[:c.manifold.ambient_dim])
        for t, row in zip(c.tau, c.samples):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in row])
    meta = {k: _jsonable(v) for k, v in c.meta.items()}
    sidecar = {"manifold": c.manifold.to_dict(), "closed": c.closed, "N": c.N, "meta": meta}
    path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return path


def read_curve_csv(path) -> Curve:
    path = Path(path)
    sidecar = json.loads(path.with_suffix(".json").read_text())
    m = manifold_from_dict(sidecar["manifold"])
    with path.open() as fh:
        rows = list(csv.reader(fh))[1:]
    samples = np.array([[float(x) for x in r[1:]] for r in rows])
    if samples.shape[0] != sidecar["N"] + 1:
        raise PathError("CSV row count does not match the recorded N")
    meta = dict(sidecar.get("meta", {}))
    if isinstance(meta.get("winding"), list):
        meta["winding"] = tuple(meta["winding"])
    return Curve(m, samples, closed=sidecar["closed"], meta=meta)
