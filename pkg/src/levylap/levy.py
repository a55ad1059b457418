"""Three routes to the Levy Laplacian of a path functional.

* :func:`levy_analytic`  closed formulas for the atoms, Leibniz and chain rules.
* :func:`levy_kernel` / :func:`levy_divergence`  the metric trace of the
  diagonal second-derivative kernel K^L integrated along the curve.
* :func:`levy_cesaro`  Cesaro means of second central differences along the
  orthonormal fields sqrt(2) sin(k pi tau) Z_mu(tau), extrapolated in n.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .functionals import (
    Constant,
    LfAtom,
    Product,
    SmoothCompose,
    ThetaAtom,
    evaluate,
    eval_u,
    manifold_of,
)
from .geometry import FlatTorus, Sphere2
from .hodge import codifferential_2form, curl, hodge_laplacian, line_integral
from .pathspace import (
    RESOLUTION_FACTOR,
    Curve,
    PathError,
    TransportedFrame,
    VectorFieldAlongCurve,
    make_basis_field,
    path_exp,
    trapezoid,
)
from .transport import transport_frame

__all__ = [
    "LevyError",
    "h0_gradient",
    "h0_gradient_u",
    "LevyKernelSample",
    "levy_kernel",
    "levy_divergence",
    "levy_analytic",
    "levy_analytic_u",
    "CesaroReport",
    "levy_cesaro",
]

log = logging.getLogger(__name__)


class LevyError(ValueError):
    pass


def _check(F, c: Curve):
    m = manifold_of(F)
    if m is not None and m != c.manifold:
        raise LevyError("functional and curve live on different manifolds")


def _rotate_velocity(c: Curve, vel):
    """The vector w with g(w, X) = vol(X, gamma') for every tangent X."""
    m = c.manifold
    if isinstance(m, Sphere2):
        return np.cross(vel, m.normal(c.samples))
    if isinstance(m, FlatTorus) and m.dim == 2:
        return np.stack([vel[:, 1], -vel[:, 0]], axis=-1)
    raise LevyError("Theta atoms are supported on the 2-torus and the sphere")


# ------------------------------------------------------------------ gradient
def _grad(F, c: Curve, vel):
    """(value, nodal gradient) pairs, recursively."""
    x = c.samples
    if isinstance(F, Constant):
        return F.value, np.zeros_like(x)
    if isinstance(F, LfAtom):
        return float(trapezoid(F.f(x))), F.f.grad(x)
    if isinstance(F, ThetaAtom):
        Fda = curl(F.a)(x)
        return line_integral(F.a, c), Fda[:, None] * _rotate_velocity(c, vel)
    if isinstance(F, Product):
        parts = [_grad(ch, c, vel) for ch in F.children]
        vals = np.array([p[0] for p in parts])
        g = np.zeros_like(x)
        for i, (_, gi) in enumerate(parts):
            g += np.prod(np.delete(vals, i)) * gi
        return float(np.prod(vals)), g
    if isinstance(F, SmoothCompose):
        parts = [_grad(ch, c, vel) for ch in F.children]
        vals = np.array([p[0] for p in parts])
        dF = F.outer.grad(vals)
        g = sum(dF[k] * parts[k][1] for k in range(len(parts)))
        return F.outer(vals), g
    raise LevyError(f"unsupported functional node {type(F).__name__}")


def h0_gradient(F, c: Curve) -> VectorFieldAlongCurve:
    """H^0 gradient: the field G with G0(G, X) = dF(c)[X] for X vanishing at the ends."""
    _check(F, c)
    _, g = _grad(F, c, c.velocities())
    return VectorFieldAlongCurve(c, c.manifold.project(c.samples, g))


def h0_gradient_u(a, c: Curve) -> np.ndarray:
    """Complex nodal gradient of U^a = exp(-i Theta_a): -i U^a grad Theta_a."""
    g = h0_gradient(ThetaAtom(a), c).values
    return -1j * eval_u(a, c) * g


# -------------------------------------------------------------------- kernel
@dataclass(frozen=True, eq=False)
class LevyKernelSample:
    """Nodal kernels in the parallel frame: K^L symmetric, K^S antisymmetric.

    The Volterra part K^V is never materialized; it does not enter the trace.
    """

    curve: Curve
    KL: np.ndarray
    KS: np.ndarray
    frame: TransportedFrame = field(repr=False, default=None)

    def __post_init__(self):
        for name, K, sign in (("K^L", self.KL, 1), ("K^S", self.KS, -1)):
            err = float(np.max(np.abs(K - sign * np.swapaxes(K, -1, -2)), initial=0.0))
            scale = max(1.0, float(np.max(np.abs(K), initial=0.0)))
            if err > 1e-12 * scale:
                raise LevyError(f"{name} violates its symmetry by {err:.2e}")

    def trace(self) -> np.ndarray:
        return np.trace(self.KL, axis1=-2, axis2=-1)


def _kernel(F, c: Curve, Z, vel):
    """(value, K^L, K^S) with kernels in frame components."""
    x = c.samples
    n, d = Z.shape[0], Z.shape[1]
    if isinstance(F, Constant):
        return F.value, np.zeros((n, d, d)), np.zeros((n, d, d))
    if isinstance(F, LfAtom):
        H = F.f.hess(x)
        KL = np.einsum("iak,ikl,ibl->iab", Z, H, Z)
        return float(trapezoid(F.f(x))), 0.5 * (KL + np.swapaxes(KL, 1, 2)), np.zeros((n, d, d))
    if isinstance(F, ThetaAtom):
        Fs = curl(F.a)
        Fv = Fs(x)
        dF = np.einsum("iak,ik->ia", Z, Fs.grad(x))
        volv = np.einsum("iak,ik->ia", Z, _rotate_velocity(c, vel))  # vol(Z_mu, gamma')
        KL = 0.5 * (dF[:, :, None] * volv[:, None, :] + dF[:, None, :] * volv[:, :, None])
        vol_ZZ = _frame_volume(c, Z)
        KS = -Fv[:, None, None] * vol_ZZ
        return line_integral(F.a, c), KL, KS
    if isinstance(F, Product):
        parts = [_kernel(ch, c, Z, vel) for ch in F.children]
        vals = np.array([p[0] for p in parts])
        KL = np.zeros((n, d, d))
        KS = np.zeros((n, d, d))
        for i, (_, kl, ks) in enumerate(parts):
            w = np.prod(np.delete(vals, i))
            KL += w * kl
            KS += w * ks
        return float(np.prod(vals)), KL, KS
    if isinstance(F, SmoothCompose):
        parts = [_kernel(ch, c, Z, vel) for ch in F.children]
        vals = np.array([p[0] for p in parts])
        dF = F.outer.grad(vals)
        KL = sum(dF[k] * parts[k][1] for k in range(len(parts)))
        KS = sum(dF[k] * parts[k][2] for k in range(len(parts)))
        return F.outer(vals), KL, KS
    raise LevyError(f"unsupported functional node {type(F).__name__}")


def _frame_volume(c: Curve, Z):
    """vol(Z_a, Z_b) at every node."""
    m = c.manifold
    if isinstance(m, Sphere2):
        cross = np.cross(Z[:, :, None, :], Z[:, None, :, :])
        return np.einsum("ik,iabk->iab", m.normal(c.samples), cross)
    return Z[:, :, None, 0] * Z[:, None, :, 1] - Z[:, :, None, 1] * Z[:, None, :, 0]


def levy_kernel(F, c: Curve, frame: TransportedFrame | None = None) -> LevyKernelSample:
    _check(F, c)
    frame = transport_frame(c) if frame is None else frame
    _, KL, KS = _kernel(F, c, frame.frames, c.velocities())
    return LevyKernelSample(c, KL, KS, frame)


def levy_divergence(k: LevyKernelSample) -> float:
    """int_0^1 tr_g K^L(tau) dtau (the frame is orthonormal)."""
    return float(trapezoid(k.trace()))


# ------------------------------------------------------------------ analytic
def _theta_laplacian(a, c: Curve) -> float:
    if c.closed:
        return line_integral(hodge_laplacian(a), c)
    return -line_integral(codifferential_2form(curl(a)), c)


def _analytic(F, c: Curve):
    """(value, Levy Laplacian) pairs, recursively."""
    if isinstance(F, Constant):
        return F.value, 0.0
    if isinstance(F, LfAtom):
        x = c.samples
        return float(trapezoid(F.f(x))), float(trapezoid(F.f.laplacian_values(x)))
    if isinstance(F, ThetaAtom):
        return line_integral(F.a, c), _theta_laplacian(F.a, c)
    if isinstance(F, Product):
        parts = [_analytic(ch, c) for ch in F.children]
        vals = np.array([p[0] for p in parts])
        lap = sum(np.prod(np.delete(vals, i)) * parts[i][1] for i in range(len(parts)))
        return float(np.prod(vals)), float(lap)
    if isinstance(F, SmoothCompose):
        parts = [_analytic(ch, c) for ch in F.children]
        vals = np.array([p[0] for p in parts])
        laps = np.array([p[1] for p in parts])
        return F.outer(vals), float(F.outer.grad(vals) @ laps)
    raise LevyError(f"unsupported functional node {type(F).__name__}")


def levy_analytic(F, c: Curve) -> float:
    """Closed-form Levy Laplacian.

    Theta atoms use int_gamma Delta a on loops and -int_gamma delta da on
    open paths; the two agree on loops because d(delta a) is exact.
    """
    _check(F, c)
    return _analytic(F, c)[1]


def levy_analytic_u(a, c: Curve) -> complex:
    """Levy Laplacian of U^a = exp(-i Theta_a) by the chain rule: -i U^a Delta_L Theta_a.

    The second-derivative term of the chain rule drops out because the Levy
    Laplacian is a first-order operator on the algebra generated by atoms.
    """
    if a.manifold != c.manifold:
        raise LevyError("form and curve live on different manifolds")
    return complex(-1j * eval_u(a, c) * _theta_laplacian(a, c))


# -------------------------------------------------------------------- Cesaro
@dataclass
class CesaroReport:
    """Cesaro partial sums S_n and their extrapolated limit."""

    partial_sums: np.ndarray
    contributions: np.ndarray  # (n_max, dim) second differences per (k, mu)
    h: float
    N: int
    n_max: int
    limit: float
    fit_amplitude: float
    residual: float
    richardson_limit: float | None = None
    coarse_limit: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def best_limit(self) -> float:
        return self.richardson_limit if self.richardson_limit is not None else self.limit

    def summary(self) -> dict:
        return {
            "limit": self.limit,
            "richardson_limit": self.richardson_limit,
            "best_limit": self.best_limit,
            "fit_amplitude": self.fit_amplitude,
            "residual": self.residual,
            "h": self.h,
            "N": self.N,
            "n_max": self.n_max,
            **self.meta,
        }

    def write(self, directory, stem: str = "cesaro", header: str | None = None):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        csv_path = directory / f"{stem}.csv"
        with csv_path.open("w", newline="") as fh:
            if header:
                fh.write(f"# {header}\n")
            w = csv.writer(fh)
            w.writerow(["n", "S_n"])
            for n, s in enumerate(self.partial_sums, start=1):
                w.writerow([n, repr(float(s))])
        json_path = directory / f"{stem}.json"
        json_path.write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")
        return csv_path, json_path


def _tail_fit(S):
    """Least squares S_n = S_inf + A/n over n in [n_max/2, n_max]."""
    n_max = len(S)
    n = np.arange(n_max // 2, n_max + 1) if n_max >= 2 else np.array([1])
    y = S[n - 1]
    if len(n) < 2:
        return float(y[-1]), 0.0, 0.0
    A = np.stack([np.ones(len(n)), 1.0 / n], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return float(coef[0]), float(coef[1]), res


def _second_differences(fn, c: Curve, frame, n_max, h, jobs):
    # the unperturbed value goes through path_exp too, so that all three
    # evaluations share one velocity discretization
    f0 = fn(path_exp(c, make_basis_field(frame, 1, 1), 0.0))
    if not math.isfinite(f0):
        raise LevyError("functional is not finite on the base curve")
    tasks = [(k, mu) for k in range(1, n_max + 1) for mu in range(1, c.dim + 1)]

    def one(task):
        k, mu = task
        X = make_basis_field(frame, mu, k)
        fp = fn(path_exp(c, X, h))
        fm = fn(path_exp(c, X, -h))
        return (fp - 2.0 * f0 + fm) / h**2

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            vals = list(ex.map(one, tasks))
    else:
        vals = [one(t) for t in tasks]
    D = np.array(vals).reshape(n_max, c.dim)
    if not np.all(np.isfinite(D)):
        raise LevyError("non-finite second difference")
    return D


def levy_cesaro(F, c: Curve, n_max: int = 32, h: float = 1e-3, N: int | None = None,
                richardson: bool = False, jobs: int | None = None,
                frame: TransportedFrame | None = None) -> CesaroReport:
    """Cesaro estimate of the Levy Laplacian.

    ``F`` is a functional tree or any callable ``curve -> float``.  ``N``,
    when given, must match the curve resolution; it exists so that callers
    state the resolution they rely on.  With ``richardson`` the sweep is
    repeated at h/2 and the O(h^2) error is extrapolated away.
    """
    if N is not None and N != c.N:
        raise LevyError(f"requested N={N} but the curve has N={c.N}")
    if n_max < 1:
        raise LevyError("n_max must be >= 1")
    if RESOLUTION_FACTOR * n_max > c.N:
        raise LevyError(f"n_max={n_max} needs N >= {RESOLUTION_FACTOR}*n_max = {RESOLUTION_FACTOR * n_max}; "
                        f"curve has N={c.N}")
    if not h > 0:
        raise LevyError("step h must be positive")
    if isinstance(c.manifold, Sphere2) and h * math.sqrt(2) >= 0.5 * math.pi * c.manifold.radius:
        raise PathError("step h too large for the sphere exponential guard")
    if callable(F) and not isinstance(F, (Constant, LfAtom, ThetaAtom, Product, SmoothCompose)):
        fn = F
    else:
        _check(F, c)
        fn = lambda curve: evaluate(F, curve)  # noqa: E731
    frame = transport_frame(c) if frame is None else frame

    def sums(step):
        D = _second_differences(fn, c, frame, n_max, step, jobs)
        per_k = D.sum(axis=1)
        S = np.cumsum(per_k) / np.arange(1, n_max + 1)
        return D, S

    D, S = sums(h)
    lim, amp, res = _tail_fit(S)
    report = CesaroReport(S, D, h, c.N, n_max, lim, amp, res)
    if richardson:
        D2, S2 = sums(h / 2)
        lim2, amp2, res2 = _tail_fit(S2)
        report.coarse_limit = lim
        report.richardson_limit = lim2 + (lim2 - lim) / 3.0
        log.debug("Richardson: h=%g -> %.10g, h/2 -> %.10g", h, lim, lim2)
    return report
