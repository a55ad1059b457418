"""Functionals on path and loop space generated by L_f and Theta_a atoms.

A functional is an immutable expression tree.  Leaves are

* ``LfAtom(f)``     gamma -> int_0^1 f(gamma(tau)) dtau
* ``ThetaAtom(a)``  gamma -> int_gamma a
* ``Constant(v)``

and inner nodes are ``Product`` and ``SmoothCompose`` (a smooth outer map
R^N -> R with a gradient, applied to N child functionals).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import Manifold
from .hodge import OneForm, ScalarForm, eigenvalue_of, line_integral
from .pathspace import Curve, trapezoid

__all__ = [
    "FunctionalError",
    "Constant",
    "LfAtom",
    "ThetaAtom",
    "Product",
    "SmoothCompose",
    "OuterMap",
    "outer_map",
    "OUTER_MAPS",
    "manifold_of",
    "evaluate",
    "eval_u",
    "homotopy_invariant_check",
    "build_eigenfunctional",
    "map_leaves",
    "leaves",
]


class FunctionalError(ValueError):
    """Raised for malformed trees, manifold mismatches and unsupported inputs."""


@dataclass(frozen=True)
class OuterMap:
    """A smooth map R^arity -> R with its gradient."""

    name: str
    arity: int
    value: Callable
    gradient: Callable
    params: tuple = ()

    def __call__(self, x):
        return float(self.value(np.asarray(x, dtype=float)))

    def grad(self, x) -> np.ndarray:
        return np.asarray(self.gradient(np.asarray(x, dtype=float)), dtype=float)

    def to_dict(self):
        return {"name": self.name, "arity": self.arity, "params": list(self.params)}


def _power(p: float = 2.0):
    p = float(p)
    return OuterMap("power", 1, lambda x: x[0] ** p, lambda x: [p * x[0] ** (p - 1)], (p,))


def _polynomial(*coeffs):
    """sum_k coeffs[k] x^k."""
    c = np.asarray(coeffs if coeffs else (0.0,), dtype=float)
    dc = c[1:] * np.arange(1, len(c))
    return OuterMap(
        "polynomial", 1,
        lambda x: np.polynomial.polynomial.polyval(x[0], c),
        lambda x: [np.polynomial.polynomial.polyval(x[0], dc) if dc.size else 0.0],
        tuple(c.tolist()),
    )


def _linear(*weights):
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        raise FunctionalError("linear map needs at least one weight")
    return OuterMap("linear", len(w), lambda x: float(w @ x), lambda x: w, tuple(w.tolist()))


def _scalar(name, f, df):
    return lambda: OuterMap(name, 1, lambda x: f(x[0]), lambda x: [df(x[0])])


def _sum_of_products():
    """x0 * x1, the bilinear map; handy for testing the chain rule against Product."""
    return OuterMap("product2", 2, lambda x: x[0] * x[1], lambda x: [x[1], x[0]])


OUTER_MAPS = {
    "power": _power,
    "polynomial": _polynomial,
    "linear": _linear,
    "exp": _scalar("exp", math.exp, math.exp),
    "sin": _scalar("sin", math.sin, math.cos),
    "cos": _scalar("cos", math.cos, lambda v: -math.sin(v)),
    "product2": _sum_of_products,
}


def outer_map(name: str, *params) -> OuterMap:
    try:
        factory = OUTER_MAPS[name]
    except KeyError:
        raise FunctionalError(f"unknown outer map {name!r}; known: {sorted(OUTER_MAPS)}") from None
    return factory(*params)


# ----------------------------------------------------------------------- nodes
@dataclass(frozen=True, eq=False)
class Constant:
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True, eq=False)
class LfAtom:
    f: ScalarForm

    def __post_init__(self):
        if not isinstance(self.f, ScalarForm):
            raise FunctionalError("LfAtom needs a ScalarForm")


@dataclass(frozen=True, eq=False)
class ThetaAtom:
    a: OneForm

    def __post_init__(self):
        if not isinstance(self.a, OneForm):
            raise FunctionalError("ThetaAtom needs a OneForm")


@dataclass(frozen=True, eq=False)
class Product:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        _check_tree(self)


@dataclass(frozen=True, eq=False)
class SmoothCompose:
    outer: OuterMap
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) != self.outer.arity:
            raise FunctionalError(
                f"outer map {self.outer.name!r} takes {self.outer.arity} argument(s), "
                f"got {len(self.children)}"
            )
        _check_tree(self)


_NODES = (Constant, LfAtom, ThetaAtom, Product, SmoothCompose)


def leaves(F):
    if isinstance(F, (Product, SmoothCompose)):
        for ch in F.children:
            yield from leaves(ch)
    elif isinstance(F, _NODES):
        yield F
    else:
        raise FunctionalError(f"unsupported functional node {type(F).__name__}")


def manifold_of(F) -> Manifold | None:
    """The common manifold of all form-bearing leaves (None for constant trees)."""
    found = None
    for leaf in leaves(F):
        m = leaf.f.manifold if isinstance(leaf, LfAtom) else leaf.a.manifold if isinstance(leaf, ThetaAtom) else None
        if m is None:
            continue
        if found is None:
            found = m
        elif m != found:
            raise FunctionalError("leaves reference forms on different manifolds")
    return found


def _check_tree(node):
    for ch in node.children:
        if not isinstance(ch, _NODES):
            raise FunctionalError(f"unsupported functional node {type(ch).__name__}")
    manifold_of(node)


def map_leaves(F, fn):
    """Rebuild the tree with every leaf form replaced by ``fn(form)``."""
    if isinstance(F, Constant):
        return F
    if isinstance(F, LfAtom):
        return LfAtom(fn(F.f))
    if isinstance(F, ThetaAtom):
        return ThetaAtom(fn(F.a))
    if isinstance(F, Product):
        return Product(tuple(map_leaves(ch, fn) for ch in F.children))
    if isinstance(F, SmoothCompose):
        return SmoothCompose(F.outer, tuple(map_leaves(ch, fn) for ch in F.children))
    raise FunctionalError(f"unsupported functional node {type(F).__name__}")


# ------------------------------------------------------------------ evaluation
def _check_curve(F, c: Curve):
    m = manifold_of(F)
    if m is not None and m != c.manifold:
        raise FunctionalError("functional and curve live on different manifolds")


def _eval(F, c: Curve) -> float:
    if isinstance(F, Constant):
        return F.value
    if isinstance(F, LfAtom):
        return float(trapezoid(F.f(c.samples)))
    if isinstance(F, ThetaAtom):
        return line_integral(F.a, c)
    if isinstance(F, Product):
        return float(np.prod([_eval(ch, c) for ch in F.children]))
    if isinstance(F, SmoothCompose):
        return F.outer([_eval(ch, c) for ch in F.children])
    raise FunctionalError(f"unsupported functional node {type(F).__name__}")


def evaluate(F, c: Curve) -> float:
    _check_curve(F, c)
    return _eval(F, c)


def eval_u(a: OneForm, c: Curve) -> complex:
    """U^a(c) = exp(-i Theta_a(c))."""
    if a.manifold != c.manifold:
        raise FunctionalError("form and curve live on different manifolds")
    return complex(np.exp(-1j * line_integral(a, c)))


def homotopy_invariant_check(a: OneForm, c1: Curve, c2: Curve, check_class: bool = True) -> float:
    """|Theta_a(c1) - Theta_a(c2)| for a closed form over two loops.

    With ``check_class`` the loops must carry equal winding metadata; pass
    False to run a negative control across classes.
    """
    if not a.is_closed():
        raise FunctionalError("homotopy invariance needs a closed form (da != 0)")
    if not (c1.closed and c2.closed):
        raise FunctionalError("homotopy invariance is stated for loops")
    if check_class:
        w1, w2 = c1.winding, c2.winding
        if w1 is None or w2 is None or tuple(w1) != tuple(w2):
            raise FunctionalError(f"loops are not in the same winding class ({w1} vs {w2})")
    return abs(line_integral(a, c1) - line_integral(a, c2))


def build_eigenfunctional(fs=(), as_=(), tol: float = 1e-12):
    """Product of L_f and Theta_a atoms built from Laplacian eigenforms.

    Returns ``(functional, predicted_eigenvalue)`` where the prediction is the
    sum of the input eigenvalues.
    """
    atoms, total, bad = [], 0.0, []
    for i, f in enumerate(fs):
        lam = eigenvalue_of(f, tol)
        if lam is None:
            bad.append(f"scalar #{i}")
        else:
            atoms.append(LfAtom(f))
            total += lam
    for i, a in enumerate(as_):
        mu = eigenvalue_of(a, tol)
        if mu is None:
            bad.append(f"1-form #{i}")
        else:
            atoms.append(ThetaAtom(a))
            total += mu
    if bad:
        raise FunctionalError("not single-eigenvalue forms: " + ", ".join(bad))
    if not atoms:
        return Constant(1.0), 0.0
    if len(atoms) == 1:
        return atoms[0], total
    return Product(tuple(atoms)), total
