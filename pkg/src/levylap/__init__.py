"""Levy Laplacian on path and loop spaces of the flat torus and the round sphere."""
from .geometry import Euclidean, FlatTorus, Point, Sphere2, Tangent
from .pathspace import Curve, VectorFieldAlongCurve, path_exp, sphere_latitude, torus_winding
from .hodge import OneForm, ScalarForm, heat_propagate, line_integral
from .functionals import Constant, LfAtom, Product, SmoothCompose, ThetaAtom, evaluate, outer_map
from .levy import h0_gradient, levy_analytic, levy_cesaro, levy_divergence, levy_kernel

__version__ = "0.1.0"

__all__ = [
    "Euclidean", "FlatTorus", "Point", "Sphere2", "Tangent",
    "Curve", "VectorFieldAlongCurve", "path_exp", "sphere_latitude", "torus_winding",
    "OneForm", "ScalarForm", "heat_propagate", "line_integral",
    "Constant", "LfAtom", "Product", "SmoothCompose", "ThetaAtom", "evaluate", "outer_map",
    "h0_gradient", "levy_analytic", "levy_cesaro", "levy_divergence", "levy_kernel",
]
