"""Spectral exterior calculus for 0- and 1-forms on the flat 2-torus and the round sphere.

Scalars are stored as eigenfunction coefficients (Fourier modes or spherical
harmonics).  One-forms are stored Hodge-decomposed,

    a = d(alpha) + *d(beta) + h,

with scalar potentials alpha, beta (zero mean) and, on the torus, constant
harmonic coefficients h = (c1, c2) for c1 dx + c2 dy.  Every form is identified
with its metric dual vector field; ``*d(beta)`` is the rotated gradient
``n x grad(beta)`` (on the torus ``(-beta_y, beta_x)``).  The Laplacian is
``Delta = -(d delta + delta d)``, negative semidefinite, and acts diagonally.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _spectral as sp
from .geometry import FlatTorus, GeometryError, Manifold, Point, Sphere2, Tangent, manifold_from_dict

__all__ = [
    "HodgeError",
    "ScalarForm",
    "OneForm",
    "DEFAULT_TRUNCATION",
    "exterior_d",
    "codifferential",
    "codifferential_2form",
    "curl",
    "hodge_laplacian",
    "heat_propagate",
    "harmonic_projection",
    "eigenvalue_of",
    "eval_scalar",
    "eval_oneform",
    "line_integral",
    "inner_product",
    "project_scalar",
    "project_oneform",
    "scalar_from_modes",
    "torus_fourier",
    "sphere_harmonic",
    "sphere_coordinate",
    "oneform_from_potentials",
    "form_from_dict",
]

DEFAULT_TRUNCATION = 16


class HodgeError(ValueError):
    """Raised for unsupported manifolds, mismatched forms or bad arguments."""


def _check_manifold(m: Manifold):
    if isinstance(m, Sphere2):
        return "sphere"
    if isinstance(m, FlatTorus) and m.dim == 2:
        return "torus"
    raise HodgeError(f"spectral forms need the 2-torus or the 2-sphere, got {m!r}")


def _reflect(c, kind):
    """The coefficient array of conj(f) reindexed so that real f gives back c."""
    if kind == "torus":
        return np.conj(np.roll(np.flip(c, (0, 1)), 1, axis=(0, 1)))
    L = c.shape[0] - 1
    _, m = sp.sphere_degrees_orders(L)
    flipped = np.roll(np.flip(c, 1), 1, axis=1)
    return np.conj(flipped) * np.where(m % 2 == 0, 1.0, -1.0)


# --------------------------------------------------------------------- scalars
@dataclass(frozen=True, eq=False)
class ScalarForm:
    """Real function given by its (complex, conjugate-symmetric) spectral coefficients."""

    manifold: Manifold
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        kind = _check_manifold(self.manifold)
        c = np.array(self.coeffs, dtype=complex)
        if kind == "torus":
            if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] % 2 != 1:
                raise HodgeError("torus coefficients must be a (2K+1, 2K+1) array")
        else:
            if c.ndim != 2 or c.shape[1] != 2 * c.shape[0] - 1:
                raise HodgeError("sphere coefficients must be an (L+1, 2L+1) array")
            ell, m = sp.sphere_degrees_orders(c.shape[0] - 1)
            if np.any(np.abs(c[np.abs(m) > ell]) > 0):
                raise HodgeError("sphere coefficients with |m| > l must vanish")
        refl = _reflect(c, kind)
        scale = max(1.0, float(np.max(np.abs(c), initial=0.0)))
        err = float(np.max(np.abs(c - refl), initial=0.0))
        if err > 1e-10 * scale:
            raise HodgeError(f"coefficients are not those of a real function (asymmetry {err:.2e})")
        c = 0.5 * (c + refl)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- structure --------------------------------------------------------
    @property
    def kind(self) -> str:
        return _check_manifold(self.manifold)

    @property
    def truncation(self) -> int:
        c = self.coeffs
        return (c.shape[0] - 1) // 2 if self.kind == "torus" else c.shape[0] - 1

    def active_truncation(self) -> int:
        return sp.torus_active(self.coeffs) if self.kind == "torus" else sp.sphere_active(self.coeffs)

    def resized(self, K: int) -> "ScalarForm":
        if K == self.truncation:
            return self
        fn = sp.torus_resize if self.kind == "torus" else sp.sphere_resize
        return ScalarForm(self.manifold, fn(self.coeffs, K))

    def eigenvalues(self) -> np.ndarray:
        """Laplacian eigenvalue attached to each coefficient slot."""
        K = self.truncation
        if self.kind == "torus":
            kx, ky = sp.torus_wavevectors(K, self.manifold.periods)
            return -(kx**2 + ky**2)
        ell, _ = sp.sphere_degrees_orders(K)
        return -ell * (ell + 1) / self.manifold.radius**2

    def mean(self) -> float:
        if self.kind == "torus":
            return float(self.coeffs[0, 0].real)
        return float(self.coeffs[0, 0].real / np.sqrt(4 * np.pi))

    def without_mean(self) -> "ScalarForm":
        c = np.array(self.coeffs)
        c[0, 0] = 0
        return ScalarForm(self.manifold, c)

    def map_coeffs(self, fn) -> "ScalarForm":
        return ScalarForm(self.manifold, fn(np.array(self.coeffs)))

    def __add__(self, other):
        if isinstance(other, (int, float)):
            c = np.array(self.coeffs)
            c[0, 0] += other if self.kind == "torus" else other * np.sqrt(4 * np.pi)
            return ScalarForm(self.manifold, c)
        a, b = _common(self, other)
        return ScalarForm(self.manifold, a.coeffs + b.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return ScalarForm(self.manifold, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        return ScalarForm(self.manifold, float(s) * self.coeffs)

    __rmul__ = __mul__

    def is_zero(self, tol=0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    # -- pointwise synthesis ---------------------------------------------
    def _points(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.manifold.ambient_dim:
            raise GeometryError(f"points must have {self.manifold.ambient_dim} coordinates")
        return x.reshape(-1, x.shape[-1]), x.shape[:-1]

    def _synth(self, coeff_list, x):
        if self.kind == "torus":
            return sp.torus_synth(coeff_list, x, self.manifold.periods)
        return sp.sphere_synth(coeff_list, x)

    def __call__(self, x) -> np.ndarray:
        pts, shape = self._points(x)
        return self._synth([self.coeffs], pts)[0].reshape(shape)

    def _torus_derivative_coeffs(self):
        kx, ky = sp.torus_wavevectors(self.truncation, self.manifold.periods)
        return kx, ky

    def grad(self, x) -> np.ndarray:
        """Riemannian gradient as ambient vectors, shape (..., ambient_dim)."""
        pts, shape = self._points(x)
        if self.kind == "torus":
            kx, ky = self._torus_derivative_coeffs()
            g = self._synth([1j * kx * self.coeffs, 1j * ky * self.coeffs], pts)
            return np.stack(g, axis=-1).reshape(shape + (2,))
        rho = self.manifold.radius
        w = np.stack(self._synth(list(sp.ladder(self.coeffs)), pts), axis=-1)
        n = pts / np.linalg.norm(pts, axis=-1, keepdims=True)
        return (-np.cross(n, w) / rho).reshape(shape + (3,))

    def rotated_grad(self, x) -> np.ndarray:
        """The vector dual to *d f: n x grad f (torus: (-f_y, f_x))."""
        pts, shape = self._points(x)
        if self.kind == "torus":
            g = self.grad(pts)
            return np.stack([-g[:, 1], g[:, 0]], axis=-1).reshape(shape + (2,))
        w = np.stack(self._synth(list(sp.ladder(self.coeffs)), pts), axis=-1)
        return (w / self.manifold.radius).reshape(shape + (3,))

    def hess(self, x) -> np.ndarray:
        """Riemannian Hessian as a symmetric ambient matrix acting on tangent vectors."""
        pts, shape = self._points(x)
        if self.kind == "torus":
            kx, ky = self._torus_derivative_coeffs()
            c = self.coeffs
            hxx, hxy, hyy = self._synth([-kx * kx * c, -kx * ky * c, -ky * ky * c], pts)
            H = np.stack([np.stack([hxx, hxy], -1), np.stack([hxy, hyy], -1)], -2)
            return H.reshape(shape + (2, 2))
        rho = self.manifold.radius
        lad = list(sp.ladder(self.coeffs))
        w = np.stack(self._synth(lad, pts), axis=-1)
        n = pts / np.linalg.norm(pts, axis=-1, keepdims=True)
        # J[i, j, k] = k-th component of grad_S w_j
        J = np.stack([ScalarForm(self.manifold, cj).grad(pts) for cj in lad], axis=1)
        A = -(1.0 / rho) * (-_skew(w) / rho + np.einsum("iab,ibk->iak", _skew(n), J))
        P = np.eye(3) - np.einsum("ia,ib->iab", n, n)
        H = np.einsum("iab,ibc,icd->iad", P, A, P)
        H = 0.5 * (H + np.swapaxes(H, -1, -2))
        return H.reshape(shape + (3, 3))

    def laplacian_values(self, x) -> np.ndarray:
        return ScalarForm(self.manifold, self.eigenvalues() * self.coeffs)(x)

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "type": "scalar",
            "manifold": self.manifold.to_dict(),
            "truncation": self.truncation,
            "coefficients": _coeff_triples(self.coeffs, self.kind),
        }


def _skew(v):
    z = np.zeros(v.shape[:-1])
    return np.stack([
        np.stack([z, -v[..., 2], v[..., 1]], -1),
        np.stack([v[..., 2], z, -v[..., 0]], -1),
        np.stack([-v[..., 1], v[..., 0], z], -1),
    ], -2)


def _common(a: ScalarForm, b: ScalarForm):
    if not isinstance(b, ScalarForm):
        raise HodgeError("expected a ScalarForm")
    if a.manifold != b.manifold:
        raise HodgeError("forms live on different manifolds")
    K = max(a.truncation, b.truncation)
    return a.resized(K), b.resized(K)


def _coeff_triples(c, kind):
    out = []
    if kind == "torus":
        K = (c.shape[0] - 1) // 2
        for k1 in range(-K, K + 1):
            for k2 in range(-K, K + 1):
                v = c[k1, k2]
                if v != 0:
                    out.append([[k1, k2], float(v.real), float(v.imag)])
    else:
        L = c.shape[0] - 1
        for l in range(L + 1):
            for m in range(-l, l + 1):
                v = c[l, m]
                if v != 0:
                    out.append([[l, m], float(v.real), float(v.imag)])
    return out


def scalar_from_modes(manifold: Manifold, modes, truncation: int | None = None) -> ScalarForm:
    """Build a scalar from ``{(i, j): complex}``; (k1, k2) on the torus, (l, m) on the sphere."""
    kind = _check_manifold(manifold)
    modes = {tuple(int(v) for v in k): complex(c) for k, c in dict(modes).items()}
    if kind == "torus":
        need = max([max(abs(k1), abs(k2)) for k1, k2 in modes] + [0])
        K = need if truncation is None else truncation
        if need > K:
            raise HodgeError(f"mode beyond truncation {K}")
        c = np.zeros((2 * K + 1, 2 * K + 1), dtype=complex)
    else:
        need = max([l for l, _ in modes] + [0])
        K = need if truncation is None else truncation
        if need > K:
            raise HodgeError(f"degree beyond truncation {K}")
        if any(abs(m) > l for l, m in modes):
            raise HodgeError("spherical harmonic order must satisfy |m| <= l")
        c = np.zeros((K + 1, 2 * K + 1), dtype=complex)
    for (i, j), v in modes.items():
        c[i, j] += v
    return ScalarForm(manifold, c)


def torus_fourier(manifold: FlatTorus, k, kind: str = "sin", amplitude: float = 1.0,
                  truncation: int | None = None) -> ScalarForm:
    """amplitude * sin or cos of 2 pi (k1 x / L1 + k2 y / L2)."""
    k1, k2 = (int(v) for v in k)
    if (k1, k2) == (0, 0):
        val = {"sin": 0.0, "cos": amplitude}[kind]
        return scalar_from_modes(manifold, {(0, 0): val}, truncation)
    if kind == "sin":
        modes = {(k1, k2): -0.5j * amplitude, (-k1, -k2): 0.5j * amplitude}
    elif kind == "cos":
        modes = {(k1, k2): 0.5 * amplitude, (-k1, -k2): 0.5 * amplitude}
    else:
        raise HodgeError(f"unknown Fourier kind {kind!r}")
    return scalar_from_modes(manifold, modes, truncation)


def sphere_harmonic(manifold: Sphere2, l: int, m: int, amplitude: float = 1.0,
                    truncation: int | None = None) -> ScalarForm:
    """Real orthonormal harmonic: cos-type for m > 0, sin-type for m < 0."""
    l, m = int(l), int(m)
    if abs(m) > l:
        raise HodgeError("need |m| <= l")
    a = amplitude
    if m == 0:
        modes = {(l, 0): a}
    elif m > 0:
        modes = {(l, -m): a / np.sqrt(2), (l, m): a * (-1) ** m / np.sqrt(2)}
    else:
        mu = -m
        modes = {(l, -mu): 1j * a / np.sqrt(2), (l, mu): -1j * a * (-1) ** mu / np.sqrt(2)}
    return scalar_from_modes(manifold, modes, truncation)


def sphere_coordinate(manifold: Sphere2, axis: str, truncation: int | None = None) -> ScalarForm:
    """The restriction of an ambient coordinate function x, y or z."""
    rho = manifold.radius
    if axis == "z":
        modes = {(1, 0): rho * np.sqrt(4 * np.pi / 3)}
    elif axis == "x":
        s = rho * np.sqrt(2 * np.pi / 3)
        modes = {(1, -1): s, (1, 1): -s}
    elif axis == "y":
        s = 1j * rho * np.sqrt(2 * np.pi / 3)
        modes = {(1, -1): s, (1, 1): s}
    else:
        raise HodgeError(f"unknown axis {axis!r}")
    return scalar_from_modes(manifold, modes, truncation)


# -------------------------------------------------------------------- 1-forms
@dataclass(frozen=True, eq=False)
class OneForm:
    """a = d(alpha) + *d(beta) + h with zero-mean potentials."""

    manifold: Manifold
    alpha: ScalarForm
    beta: ScalarForm
    harmonic: tuple = ()

    def __post_init__(self):
        kind = _check_manifold(self.manifold)
        for p in (self.alpha, self.beta):
            if p.manifold != self.manifold:
                raise HodgeError("potentials live on a different manifold")
        a, b = _common(self.alpha, self.beta)
        object.__setattr__(self, "alpha", a.without_mean())
        object.__setattr__(self, "beta", b.without_mean())
        h = tuple(float(v) for v in self.harmonic)
        if kind == "sphere":
            if any(v != 0 for v in h):
                raise HodgeError("the sphere carries no harmonic 1-forms")
            h = ()
        else:
            h = h or (0.0, 0.0)
            if len(h) != 2:
                raise HodgeError("torus harmonic part needs two coefficients")
        object.__setattr__(self, "harmonic", h)

    @property
    def kind(self) -> str:
        return _check_manifold(self.manifold)

    @property
    def truncation(self) -> int:
        return self.alpha.truncation

    def harmonic_vector(self) -> np.ndarray:
        return np.asarray(self.harmonic, dtype=float) if self.harmonic else np.zeros(0)

    def exact_part(self) -> "OneForm":
        return OneForm(self.manifold, self.alpha, self.alpha * 0.0)

    def coexact_part(self) -> "OneForm":
        return OneForm(self.manifold, self.beta * 0.0, self.beta)

    def harmonic_part(self) -> "OneForm":
        z = self.alpha * 0.0
        return OneForm(self.manifold, z, z, self.harmonic)

    def __add__(self, other: "OneForm") -> "OneForm":
        if not isinstance(other, OneForm) or other.manifold != self.manifold:
            raise HodgeError("can only add 1-forms on the same manifold")
        h = tuple(np.add(self.harmonic_vector(), other.harmonic_vector())) if self.harmonic else ()
        return OneForm(self.manifold, self.alpha + other.alpha, self.beta + other.beta, h)

    def __mul__(self, s) -> "OneForm":
        s = float(s)
        return OneForm(self.manifold, self.alpha * s, self.beta * s,
                       tuple(s * v for v in self.harmonic))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self, tol=0.0) -> bool:
        return self.alpha.is_zero(tol) and self.beta.is_zero(tol) and all(abs(v) <= tol for v in self.harmonic)

    def is_closed(self, tol=1e-12) -> bool:
        """da = 0, i.e. the coexact potential vanishes."""
        return self.beta.is_zero(tol * max(1.0, float(np.max(np.abs(self.beta.coeffs)))))

    def vector(self, x) -> np.ndarray:
        """Metric dual vector field a^# at points x, shape (..., ambient_dim)."""
        x = np.asarray(x, dtype=float)
        v = self.alpha.grad(x) + self.beta.rotated_grad(x)
        if self.harmonic:
            v = v + self.harmonic_vector()
        return v

    def __call__(self, x, v) -> np.ndarray:
        return np.sum(self.vector(x) * np.asarray(v, dtype=float), axis=-1)

    def to_dict(self) -> dict:
        return {
            "type": "oneform",
            "manifold": self.manifold.to_dict(),
            "truncation": self.truncation,
            "exact": _coeff_triples(self.alpha.coeffs, self.kind),
            "coexact": _coeff_triples(self.beta.coeffs, self.kind),
            "harmonic": list(self.harmonic),
        }


def oneform_from_potentials(alpha: ScalarForm | None = None, beta: ScalarForm | None = None,
                            harmonic=(), manifold: Manifold | None = None) -> OneForm:
    ref = alpha if alpha is not None else beta
    m = manifold if manifold is not None else (ref.manifold if ref is not None else None)
    if m is None:
        raise HodgeError("need a manifold or at least one potential")
    zero = scalar_from_modes(m, {}, 0 if ref is None else ref.truncation)
    return OneForm(m, alpha if alpha is not None else zero, beta if beta is not None else zero, harmonic)


# ----------------------------------------------------------------- operators
def exterior_d(f: ScalarForm) -> OneForm:
    return OneForm(f.manifold, f, f * 0.0)


def codifferential(a: OneForm) -> ScalarForm:
    """delta a = -div a^# = -Delta(alpha)."""
    return ScalarForm(a.manifold, -a.alpha.eigenvalues() * a.alpha.coeffs)


def curl(a: OneForm) -> ScalarForm:
    """The scalar F = *da, so that da = F vol; equals Delta(beta)."""
    return ScalarForm(a.manifold, a.beta.eigenvalues() * a.beta.coeffs)


def codifferential_2form(F: ScalarForm) -> OneForm:
    """delta(F vol) = -*dF as a 1-form (coexact potential -F)."""
    return OneForm(F.manifold, F * 0.0, -F)


def hodge_laplacian(w):
    if isinstance(w, ScalarForm):
        return ScalarForm(w.manifold, w.eigenvalues() * w.coeffs)
    if isinstance(w, OneForm):
        return OneForm(w.manifold, hodge_laplacian(w.alpha), hodge_laplacian(w.beta),
                       tuple(0.0 for _ in w.harmonic))
    raise HodgeError(f"unsupported form {type(w).__name__}")


def _propagator(f: ScalarForm, t: float) -> ScalarForm:
    return ScalarForm(f.manifold, np.exp(f.eigenvalues() * t) * f.coeffs)


def heat_propagate(w, t: float):
    """Exact solution of d/dt w = Delta w at time t."""
    t = float(t)
    if not t >= 0:
        raise HodgeError(f"heat time must be >= 0, got {t}")
    if isinstance(w, ScalarForm):
        return _propagator(w, t)
    if isinstance(w, OneForm):
        return OneForm(w.manifold, _propagator(w.alpha, t), _propagator(w.beta, t), w.harmonic)
    raise HodgeError(f"unsupported form {type(w).__name__}")


def harmonic_projection(w):
    if isinstance(w, ScalarForm):
        c = np.zeros_like(w.coeffs)
        c[0, 0] = w.coeffs[0, 0]
        return ScalarForm(w.manifold, c)
    if isinstance(w, OneForm):
        return w.harmonic_part()
    raise HodgeError(f"unsupported form {type(w).__name__}")


def eigenvalue_of(w, tol: float = 1e-12):
    """The Laplacian eigenvalue of a single-eigenvalue form, or None."""
    if isinstance(w, ScalarForm):
        parts = [(w.eigenvalues(), w.coeffs)]
        harmonic_present = False
    elif isinstance(w, OneForm):
        parts = [(w.alpha.eigenvalues(), w.alpha.coeffs), (w.beta.eigenvalues(), w.beta.coeffs)]
        harmonic_present = any(v != 0 for v in w.harmonic)
    else:
        raise HodgeError(f"unsupported form {type(w).__name__}")
    scale = max([float(np.max(np.abs(c), initial=0.0)) for _, c in parts] + [1.0])
    lams = [lam[np.abs(c) > tol * scale] for lam, c in parts]
    lams = np.concatenate(lams + ([np.zeros(1)] if harmonic_present else []))
    if lams.size == 0:
        return 0.0
    lo, hi = float(np.min(lams)), float(np.max(lams))
    if hi - lo > 1e-12 * max(1.0, abs(lo)):
        return None
    return lo


def eval_scalar(f: ScalarForm, p: Point) -> float:
    if p.manifold != f.manifold:
        raise HodgeError("point and form live on different manifolds")
    return float(f(p.coords))


def eval_oneform(a: OneForm, v: Tangent) -> float:
    if v.base.manifold != a.manifold:
        raise HodgeError("tangent and form live on different manifolds")
    return float(a(v.base.coords, v.vec))


def line_integral(a: OneForm, c) -> float:
    """Trapezoid rule for the integral of a(gamma(tau)) gamma'(tau) over [0, 1]."""
    from .pathspace import trapezoid

    if c.manifold != a.manifold:
        raise HodgeError("curve and form live on different manifolds")
    return float(trapezoid(a(c.samples, c.velocities())))


def inner_product(a, b) -> float:
    """L2 inner product on the manifold, by Parseval."""
    if type(a) is not type(b) or a.manifold != b.manifold:
        raise HodgeError("inner product needs two forms of the same kind and manifold")
    m = a.manifold
    area_w = m.area if a.kind == "torus" else m.radius**2  # sphere harmonics are unit-sphere orthonormal
    if isinstance(a, ScalarForm):
        x, y = _common(a, b)
        return float(area_w * np.sum(x.coeffs * np.conj(y.coeffs)).real)
    ea, eb = _common(a.alpha, b.alpha)
    ca, cb = _common(a.beta, b.beta)
    total = np.sum(-ea.eigenvalues() * ea.coeffs * np.conj(eb.coeffs))
    total += np.sum(-ca.eigenvalues() * ca.coeffs * np.conj(cb.coeffs))
    val = float(area_w * total.real)
    if a.harmonic:
        val += m.area * float(np.dot(a.harmonic_vector(), b.harmonic_vector()))
    return val


# ----------------------------------------------------------------- projection
def _torus_grid(m: FlatTorus, K: int):
    n = 4 * K + 4
    gx = m.periods[0] * np.arange(n) / n
    gy = m.periods[1] * np.arange(n) / n
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    return n, np.stack([X, Y], -1)


def _torus_fft(values, n, K):
    F = np.fft.fft2(values) / n**2
    k = sp.torus_modes(K)
    return F[np.ix_(k % n, k % n)]


def _sphere_project(values, pts, w, L):
    Y = sp.sphere_table(L, pts)
    ell, m = sp.sphere_degrees_orders(L)
    c = np.einsum("lmi,i->lm", np.conj(Y), values * w)
    return np.where(np.abs(m) <= ell, c, 0)


def _sphere_grid(L):
    return sp.gauss_sphere_grid(L + 2, 2 * L + 4)


def project_scalar(manifold: Manifold, fn, truncation: int = DEFAULT_TRUNCATION) -> ScalarForm:
    """Quadrature projection of a real callable ``fn(points) -> values``."""
    kind = _check_manifold(manifold)
    K = int(truncation)
    if kind == "torus":
        n, grid = _torus_grid(manifold, K)
        vals = np.asarray(fn(grid.reshape(-1, 2)), dtype=float).reshape(n, n)
        return ScalarForm(manifold, _torus_fft(vals, n, K))
    pts, w = _sphere_grid(K)
    vals = np.asarray(fn(manifold.radius * pts), dtype=float)
    return ScalarForm(manifold, _sphere_project(vals, pts, w, K))


def project_oneform(manifold: Manifold, fn, truncation: int = DEFAULT_TRUNCATION) -> OneForm:
    """Hodge-decompose a pointwise 1-form given as ``fn(points) -> ambient vectors``."""
    kind = _check_manifold(manifold)
    K = int(truncation)
    if kind == "torus":
        n, grid = _torus_grid(manifold, K)
        A = np.asarray(fn(grid.reshape(-1, 2)), dtype=float).reshape(n, n, 2)
        ax = _torus_fft(A[..., 0], n, K)
        ay = _torus_fft(A[..., 1], n, K)
        kx, ky = sp.torus_wavevectors(K, manifold.periods)
        k2 = kx**2 + ky**2
        safe = np.where(k2 > 0, k2, 1.0)
        alpha = np.where(k2 > 0, -1j * (kx * ax + ky * ay) / safe, 0)
        beta = np.where(k2 > 0, -1j * (kx * ay - ky * ax) / safe, 0)
        h = (float(ax[0, 0].real), float(ay[0, 0].real))
        return OneForm(manifold, ScalarForm(manifold, alpha), ScalarForm(manifold, beta), h)
    rho = manifold.radius
    Lq = K + 1  # components of n x A and A carry one extra degree
    pts, w = _sphere_grid(Lq + 1)
    A = np.asarray(fn(rho * pts), dtype=float)
    A = A - np.sum(A * pts, axis=-1, keepdims=True) * pts
    nxA = np.cross(pts, A)
    ell, _ = sp.sphere_degrees_orders(Lq)
    denom = np.where(ell > 0, ell * (ell + 1), 1.0)

    def potential(field_):
        comps = [_sphere_project(field_[:, j], pts, w, Lq) for j in range(3)]
        total = sum(sp.ladder(comps[j])[j] for j in range(3))
        return np.where(ell > 0, -rho * total / denom, 0)

    alpha = sp.sphere_resize(potential(nxA), K)
    beta = sp.sphere_resize(potential(A), K)
    return OneForm(manifold, ScalarForm(manifold, alpha), ScalarForm(manifold, beta))


# -------------------------------------------------------------- serialization
def _coeffs_from_triples(manifold, triples, K):
    return scalar_from_modes(manifold, {tuple(k): complex(re, im) for k, re, im in triples}, K)


def form_from_dict(d: dict):
    """Inverse of ``to_dict`` for scalars and 1-forms."""
    m = manifold_from_dict(d["manifold"])
    K = int(d.get("truncation", 0))
    if d.get("type") == "scalar":
        return _coeffs_from_triples(m, d.get("coefficients", []), K)
    if d.get("type") == "oneform":
        return OneForm(m, _coeffs_from_triples(m, d.get("exact", []), K),
                       _coeffs_from_triples(m, d.get("coexact", []), K), tuple(d.get("harmonic", ())))
    raise HodgeError(f"unknown form type {d.get('type')!r}")
