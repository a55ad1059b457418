"""Levi-Civita parallel transport along sampled curves.

The transport equation ``V' + Gamma(gamma)(V, gamma') = 0`` is integrated with
the classical fixed-step RK4 scheme on the sample grid (step 1/N); midpoint
states come from the curve's analytic oracle when it has one.  On the sphere
the solution is re-projected onto the tangent plane after every step.
"""
from __future__ import annotations

import logging

import numpy as np

from .geometry import Tangent
from .pathspace import Curve, PathError, TransportedFrame, VectorFieldAlongCurve

__all__ = [
    "transport_nodes",
    "parallel_transport",
    "transport_frame",
    "holonomy",
    "holonomy_angle",
    "transport_differential",
]

log = logging.getLogger(__name__)


def _gram_schmidt(frame, manifold, x):
    out = np.array(frame)
    for a in range(out.shape[0]):
        for b in range(a):
            out[a] -= manifold.inner(x, out[a], out[b]) * out[b]
        out[a] /= np.sqrt(manifold.inner(x, out[a], out[a]))
    return out


def _orthonormality_error(frame, manifold, x):
    gram = np.array([[manifold.inner(x, u, v) for v in frame] for u in frame])
    return float(np.max(np.abs(gram - np.eye(len(frame)))))


def transport_nodes(c: Curve, vectors, start: int = 0, stop: int | None = None,
                    reorthonormalize: bool = False):
    """Transport ambient vectors given at node ``start`` to every node up to ``stop``.

    Returns an array of shape ``(|stop - start| + 1, k, ambient)`` ordered from
    ``start`` towards ``stop`` (backwards when stop < start), and the largest
    orthonormality drift seen before renormalization.
    """
    m = c.manifold
    stop = c.N if stop is None else stop
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    step = 1 if stop >= start else -1
    count = abs(stop - start)
    out = np.empty((count + 1,) + V.shape)
    out[0] = V
    if m.is_flat or count == 0:
        out[1:] = V
        return out, 0.0

    x = c.samples
    v = c.velocities()
    xh, vh = c.half_step_states()
    h = step / c.N
    drift = 0.0

    def rhs(p, pv, W):
        return -m.christoffel(p, W, pv)

    i = start
    for j in range(count):
        k = i if step > 0 else i - 1  # interval index
        nxt = i + step
        k1 = rhs(x[i], v[i], V)
        k2 = rhs(xh[k], vh[k], V + 0.5 * h * k1)
        k3 = rhs(xh[k], vh[k], V + 0.5 * h * k2)
        k4 = rhs(x[nxt], v[nxt], V + h * k3)
        V = V + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        V = m.project(x[nxt], V)
        if reorthonormalize:
            drift = max(drift, _orthonormality_error(V, m, x[nxt]))
            V = _gram_schmidt(V, m, x[nxt])
        out[j + 1] = V
        i = nxt
    return out, drift


def parallel_transport(c: Curve, v0: Tangent, tau_target: float, tau_start: float = 0.0) -> Tangent:
    """Q_{tau_target, tau_start}(c) v0; both parameters must be grid nodes."""
    i0 = c.node_index(tau_start)
    i1 = c.node_index(tau_target)
    if v0.base != c.point(i0):
        raise PathError("v0 must be based at c(tau_start)")
    vals, _ = transport_nodes(c, v0.vec, i0, i1)
    return Tangent(c.point(i1), vals[-1, 0])


def transport_frame(c: Curve, basis=None, reorthonormalize: bool = True) -> TransportedFrame:
    """Transport an orthonormal basis of T_{c(0)}M along c.

    ``basis`` defaults to ``manifold.tangent_basis(c(0))``.  With
    ``reorthonormalize`` the frame is Gram-Schmidt corrected after every step
    and the largest drift observed is logged and stored on the frame.
    """
    m = c.manifold
    x0 = c.samples[0]
    Z = m.tangent_basis(x0) if basis is None else np.asarray(basis, dtype=float)
    if Z.shape != (m.dim, m.ambient_dim):
        raise PathError(f"basis must have shape ({m.dim}, {m.ambient_dim})")
    err = _orthonormality_error(Z, m, x0)
    if err > 1e-10:
        raise PathError(f"initial basis is not orthonormal (error {err:.2e})")
    frames, drift = transport_nodes(c, Z, 0, c.N, reorthonormalize=reorthonormalize)
    frames[0] = Z
    if reorthonormalize and drift > 0:
        log.debug("frame orthonormality drift before renormalization: %.3e", drift)
    return TransportedFrame(c, frames, drift)


def holonomy(c: Curve, basis=None) -> np.ndarray:
    """Matrix of Q_{1,0}(c) in the initial frame: H[mu, nu] = g(Z_mu, Q Z_nu)."""
    if not c.closed:
        raise PathError("holonomy needs a closed curve")
    m = c.manifold
    x0 = c.samples[0]
    Z = m.tangent_basis(x0) if basis is None else np.asarray(basis, dtype=float)
    end, _ = transport_nodes(c, Z, 0, c.N)
    QZ = end[-1]
    return np.array([[m.inner(x0, Z[a], QZ[b]) for b in range(len(Z))] for a in range(len(Z))])


def holonomy_angle(H) -> float:
    """Rotation angle in [0, 2 pi) of a 2x2 holonomy matrix."""
    H = np.asarray(H)
    if H.shape != (2, 2):
        raise ValueError("holonomy_angle needs a 2x2 matrix")
    return float(np.mod(np.arctan2(H[1, 0], H[0, 0]), 2 * np.pi))


def transport_differential(c: Curve, h1: VectorFieldAlongCurve, h2, tau2: float,
                           frame: TransportedFrame | None = None) -> np.ndarray:
    """Derivative of Q_{tau2,0}(gamma) h2 when gamma moves along h1.

    Evaluates

        -int_0^tau2 Q_{tau2,tau1} R(h1(tau1), gamma'(tau1)) Q_{tau1,0} h2 dtau1
        - Gamma(gamma(tau2))(Q_{tau2,0} h2, h1(tau2))

    with R(a, b) = [nabla_a, nabla_b] - nabla_[a,b] and the integral by the
    trapezoid rule over the nodes in [0, tau2].  ``h2`` holds frame components
    (length dim, or an (N+1, dim) array sampled in tau whose row at tau2 is
    used).  The result is an ambient vector: the ordinary derivative of the
    embedded vector, whose normal part on the sphere is the Christoffel term.
    """
    m = c.manifold
    if h1.curve.samples.shape != c.samples.shape:
        raise PathError("h1 is not a field along c")
    i2 = c.node_index(tau2)
    h2 = np.asarray(h2, dtype=float)
    comps = h2[i2] if h2.ndim == 2 else h2
    if comps.shape != (m.dim,):
        raise PathError(f"h2 components must have length {m.dim}")
    frame = transport_frame(c) if frame is None else frame
    Z = frame.frames
    V = np.einsum("m,imk->ik", comps, Z[: i2 + 1])
    gamma_term = m.christoffel(c.samples[i2], V[i2], h1.values[i2])
    if m.is_flat or i2 == 0:
        return -gamma_term
    vel = c.velocities()[: i2 + 1]
    x = c.samples[: i2 + 1]
    R = m.curvature(x, h1.values[: i2 + 1], vel, V)
    # Q_{tau2,tau1} maps frame components at tau1 to the same components at tau2
    rc = np.einsum("ik,imk->im", R, Z[: i2 + 1])
    integral = np.einsum("m,mk->k", _trapezoid_partial(rc, c.N), Z[i2])
    return -integral - gamma_term


def _trapezoid_partial(values, N):
    """Trapezoid rule over nodes 0..i2 on the grid of spacing 1/N."""
    if values.shape[0] < 2:
        return np.zeros(values.shape[1:])
    return (np.sum(values, axis=0) - 0.5 * (values[0] + values[-1])) / N
