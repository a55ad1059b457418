"""Concrete Riemannian manifolds used by the path-space machinery.

Three model spaces are supported: Euclidean space, the flat torus
(coordinates reduced modulo the periods) and the round 2-sphere of radius
``rho`` embedded in R^3.  Every manifold exposes vectorized methods acting on
arrays of ambient coordinates with shape ``(..., ambient_dim)``; the
:class:`Point`/:class:`Tangent` wrappers and the module-level functions give a
checked single-point interface on top of them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GeometryError",
    "Manifold",
    "Euclidean",
    "FlatTorus",
    "Sphere2",
    "Point",
    "Tangent",
    "manifold_from_dict",
    "metric_inner",
    "christoffel_apply",
    "curvature_apply",
    "exp_point",
]


class GeometryError(ValueError):
    """Raised for malformed points, tangents or manifold parameters."""


class Manifold:
    """Base class. Subclasses are immutable and safe to share."""

    kind: str = ""
    dim: int = 0

    @property
    def ambient_dim(self) -> int:
        return self.dim

    @property
    def is_flat(self) -> bool:
        return True

    # -- points and tangents -------------------------------------------------
    def normalize_points(self, x):
        return np.asarray(x, dtype=float)

    def check_points(self, x, tol=1e-12):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.ambient_dim:
            raise GeometryError(
                f"{self.kind}: expected coordinates of length {self.ambient_dim}, got {x.shape[-1]}"
            )
        return x

    def project(self, x, v):
        """Orthogonal projection of ambient vectors onto the tangent space at x."""
        return np.asarray(v, dtype=float)

    def tangent_basis(self, x) -> np.ndarray:
        """An orthonormal basis of T_x M as a (dim, ambient_dim) array."""
        return np.eye(self.dim)

    # -- Riemannian structure ------------------------------------------------
    def inner(self, x, u, v):
        return np.sum(np.asarray(u) * np.asarray(v), axis=-1)

    def christoffel(self, x, u, v):
        return np.zeros(np.broadcast_shapes(np.shape(u), np.shape(v)))

    def curvature(self, x, a, b, c):
        """R(a, b)c with R(a, b) = [nabla_a, nabla_b] - nabla_[a,b]."""
        return np.zeros(np.broadcast_shapes(np.shape(a), np.shape(b), np.shape(c)))

    def exp(self, x, v):
        return self.normalize_points(np.asarray(x, dtype=float) + np.asarray(v, dtype=float))

    def displacement(self, x, y):
        """Ambient difference y - x (minimal image on the torus)."""
        return np.asarray(y, dtype=float) - np.asarray(x, dtype=float)

    def distance(self, x, y):
        return np.linalg.norm(self.displacement(x, y), axis=-1)

    @property
    def injectivity_radius(self) -> float:
        return np.inf

    def same_point(self, x, y, tol=1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(x))))
        return bool(np.all(self.distance(x, y) <= tol * scale))

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Euclidean(Manifold):
    dim: int = 2
    kind: str = field(default="euclidean", init=False)

    def __post_init__(self):
        if int(self.dim) < 1:
            raise GeometryError("Euclidean dimension must be >= 1")

    def to_dict(self):
        return {"kind": "euclidean", "dim": self.dim}


@dataclass(frozen=True)
class FlatTorus(Manifold):
    dim: int = 2
    periods: tuple = None
    kind: str = field(default="torus", init=False)

    def __post_init__(self):
        if int(self.dim) < 1:
            raise GeometryError("torus dimension must be >= 1")
        periods = (1.0,) * self.dim if self.periods is None else tuple(float(p) for p in self.periods)
        if len(periods) != self.dim:
            raise GeometryError(f"torus needs {self.dim} periods, got {len(periods)}")
        if any(not p > 0 for p in periods):
            raise GeometryError("torus periods must be strictly positive")
        object.__setattr__(self, "periods", periods)

    @property
    def period_array(self) -> np.ndarray:
        return np.asarray(self.periods)

    @property
    def area(self) -> float:
        return float(np.prod(self.periods))

    def normalize_points(self, x):
        x = np.asarray(x, dtype=float)
        y = np.mod(x, self.period_array)
        # np.mod can return the period itself for tiny negative inputs
        return np.where(y >= self.period_array, 0.0, y)

    def displacement(self, x, y):
        d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
        p = self.period_array
        return d - p * np.round(d / p)

    @property
    def injectivity_radius(self) -> float:
        return 0.5 * min(self.periods)

    def to_dict(self):
        return {"kind": "torus", "dim": self.dim, "periods": list(self.periods)}


@dataclass(frozen=True)
class Sphere2(Manifold):
    radius: float = 1.0
    kind: str = field(default="sphere2", init=False)
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        if not float(self.radius) > 0:
            raise GeometryError("sphere radius must be > 0")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def ambient_dim(self) -> int:
        return 3

    @property
    def is_flat(self) -> bool:
        return False

    @property
    def area(self) -> float:
        return 4.0 * np.pi * self.radius**2

    def normalize_points(self, x):
        x = np.asarray(x, dtype=float)
        return self.radius * x / np.linalg.norm(x, axis=-1, keepdims=True)

    def check_points(self, x, tol=1e-12):
        x = super().check_points(x)
        r = np.linalg.norm(x, axis=-1)
        if np.any(np.abs(r - self.radius) > tol * self.radius):
            raise GeometryError(f"point(s) off the sphere of radius {self.radius}")
        return x

    def normal(self, x):
        x = np.asarray(x, dtype=float)
        return x / self.radius

    def project(self, x, v):
        n = self.normal(x)
        v = np.asarray(v, dtype=float)
        return v - np.sum(v * n, axis=-1, keepdims=True) * n

    def tangent_basis(self, x) -> np.ndarray:
        """Orthonormal (e1, e2) with e2 = n x e1, n the outward normal."""
        n = self.normal(x)
        trial = np.eye(3)[int(np.argmin(np.abs(n)))]
        e1 = trial - np.dot(trial, n) * n
        e1 /= np.linalg.norm(e1)
        return np.stack([e1, np.cross(n, e1)])

    def christoffel(self, x, u, v):
        # normal correction: d/ds of a tangent field = nabla - Gamma
        return (np.sum(np.asarray(u) * np.asarray(v), axis=-1, keepdims=True) / self.radius**2) * np.asarray(x)

    def curvature(self, x, a, b, c):
        a, b, c = (np.asarray(t, dtype=float) for t in (a, b, c))
        k = 1.0 / self.radius**2
        return k * (np.sum(b * c, axis=-1, keepdims=True) * a - np.sum(a * c, axis=-1, keepdims=True) * b)

    def exp(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        r = np.linalg.norm(v, axis=-1, keepdims=True)
        ang = r / self.radius
        safe = np.where(r > 0, r, 1.0)
        out = np.cos(ang) * x + self.radius * np.sin(ang) * v / safe
        return self.normalize_points(out)

    def distance(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        cross = np.linalg.norm(np.cross(x, y), axis=-1)
        dot = np.sum(x * y, axis=-1)
        return self.radius * np.arctan2(cross, dot)

    @property
    def injectivity_radius(self) -> float:
        return np.pi * self.radius

    def to_dict(self):
        return {"kind": "sphere2", "radius": self.radius}


def manifold_from_dict(d: dict) -> Manifold:
    kind = str(d.get("kind", "")).lower()
    if kind == "euclidean":
        return Euclidean(int(d.get("dim", 2)))
    if kind == "torus":
        dim = int(d.get("dim", len(d.get("periods", [1.0, 1.0]))))
        return FlatTorus(dim, tuple(d.get("periods", [1.0] * dim)))
    if kind == "sphere2":
        return Sphere2(float(d.get("radius", 1.0)))
    raise GeometryError(f"unknown manifold kind {d.get('kind')!r}")


@dataclass(frozen=True, eq=False)
class Point:
    manifold: Manifold
    coords: np.ndarray

    def __post_init__(self):
        m = self.manifold
        x = np.array(m.normalize_points(m.check_points(self.coords)), dtype=float)
        x.setflags(write=False)
        object.__setattr__(self, "coords", x)

    def __eq__(self, other):
        return (
            isinstance(other, Point)
            and other.manifold == self.manifold
            and np.array_equal(other.coords, self.coords)
        )

    def __hash__(self):
        return hash((self.manifold, self.coords.tobytes()))


@dataclass(frozen=True, eq=False)
class Tangent:
    base: Point
    vec: np.ndarray

    def __post_init__(self):
        m = self.base.manifold
        v = np.array(self.vec, dtype=float)
        if v.shape != (m.ambient_dim,):
            raise GeometryError(f"tangent vector must have length {m.ambient_dim}")
        if isinstance(m, Sphere2):
            off = abs(np.dot(v, self.base.coords))
            if off > 1e-12 * m.radius * max(np.linalg.norm(v), 1.0):
                raise GeometryError("sphere tangent must be orthogonal to its base point")
        v.setflags(write=False)
        object.__setattr__(self, "vec", v)


def _same_base(*tangents: Tangent) -> Point:
    p = tangents[0].base
    for t in tangents[1:]:
        if t.base != p:
            raise GeometryError("tangent vectors are based at different points")
    return p


def metric_inner(u: Tangent, v: Tangent) -> float:
    p = _same_base(u, v)
    return float(p.manifold.inner(p.coords, u.vec, v.vec))


def christoffel_apply(p: Point, u: Tangent, v: Tangent) -> np.ndarray:
    """Gamma(p)(u, v). On the sphere this is a normal vector, so an array is returned."""
    if _same_base(u, v) != p:
        raise GeometryError("tangent vectors are not based at p")
    return p.manifold.christoffel(p.coords, u.vec, v.vec)


def curvature_apply(p: Point, x: Tangent, y: Tangent, z: Tangent) -> Tangent:
    if _same_base(x, y, z) != p:
        raise GeometryError("tangent vectors are not based at p")
    return Tangent(p, p.manifold.curvature(p.coords, x.vec, y.vec, z.vec))


def exp_point(p: Point, v: Tangent) -> Point:
    if v.base != p:
        raise GeometryError("tangent vector is not based at p")
    return Point(p.manifold, p.manifold.exp(p.coords, v.vec))
