import math

import numpy as np
import pytest

from levylap.checks import fd_transport_derivative
from levylap.geometry import Euclidean, FlatTorus, Point, Sphere2, Tangent
from levylap.pathspace import (
    PathError,
    constant_curve,
    geodesic_segment,
    random_h1_field,
    random_smooth_loop,
    sphere_latitude,
    torus_winding,
)
from levylap.transport import (
    holonomy,
    holonomy_angle,
    parallel_transport,
    transport_differential,
    transport_frame,
    transport_nodes,
)

S1 = Sphere2(1.0)
T2 = FlatTorus(2, (1.0, 1.0))


def test_flat_transport_is_identity():
    c = torus_winding(T2, 1, 2, N=128, amplitude=0.1, modes=3, seed=0)
    v0 = Tangent(c.point(0), np.array([0.3, -1.2]))
    assert np.array_equal(parallel_transport(c, v0, 0.75).vec, v0.vec)
    fr = transport_frame(c)
    assert np.all(fr.frames == fr.frames[0])
    np.testing.assert_array_equal(holonomy(c), np.eye(2))


def test_constant_curve_transport_is_identity():
    c = constant_curve(S1, [0.0, 0.6, 0.8], N=64)
    v = S1.tangent_basis(c.samples[0])[0]
    out = parallel_transport(c, Tangent(c.point(0), v), 1.0)
    np.testing.assert_allclose(out.vec, v, atol=1e-15)


def test_latitude_loop_flips_vector():
    c = sphere_latitude(S1, math.pi / 3, N=1024)
    v0 = S1.tangent_basis(c.samples[0])[1]
    out = parallel_transport(c, Tangent(c.point(0), v0), 1.0)
    np.testing.assert_allclose(out.vec, -v0, atol=1e-6)


def test_equator_tangent_stays_tangent():
    c = sphere_latitude(S1, math.pi / 2, N=512)
    v0 = c.velocities()[0]
    Z = np.stack([v0 / np.linalg.norm(v0), np.cross(S1.normal(c.samples[0]), v0 / np.linalg.norm(v0))])
    fr = transport_frame(c, Z)
    unit_vel = c.velocities() / np.linalg.norm(c.velocities(), axis=1, keepdims=True)
    np.testing.assert_allclose(fr.frames[:, 0], unit_vel, atol=1e-8)
    np.testing.assert_allclose(holonomy(c), np.eye(2), atol=1e-8)


def test_drift_without_renormalization():
    c = sphere_latitude(S1, math.pi / 3, N=1024, amplitude=0.1, modes=3, seed=1)
    fr = transport_frame(c, reorthonormalize=False)
    gram = np.einsum("iak,ibk->iab", fr.frames, fr.frames)
    assert np.max(np.abs(gram - np.eye(2))) < 1e-7
    assert transport_frame(c).frames[0].tobytes() == fr.frames[0].tobytes()


@pytest.mark.parametrize("theta0", [math.pi / 6, math.pi / 3, math.pi / 2, 2.5])
def test_holonomy_gauss_bonnet(theta0):
    H = holonomy(sphere_latitude(S1, theta0, N=1024))
    np.testing.assert_allclose(H @ H.T, np.eye(2), atol=1e-8)
    expected = (2 * math.pi * (1 - math.cos(theta0))) % (2 * math.pi)
    gap = abs((holonomy_angle(H) - expected + math.pi) % (2 * math.pi) - math.pi)
    assert gap < 1e-6


def test_holonomy_convergence_order():
    Ns = np.array([16, 32, 64, 128, 256])
    errs = [abs(holonomy_angle(holonomy(sphere_latitude(S1, math.pi / 3, N=int(N)))) - math.pi) for N in Ns]
    slope = -np.polyfit(np.log(Ns), np.log(errs), 1)[0]
    assert 3.8 < slope < 4.2


def test_holonomy_needs_loop():
    with pytest.raises(PathError):
        holonomy(geodesic_segment(S1, [1.0, 0, 0], [0, 1.0, 0], N=64))


def test_isometry_and_composition():
    rng = np.random.default_rng(4)
    c = random_smooth_loop(S1, seed=11, N=1024)
    basis = S1.tangent_basis(c.samples[0])
    v, w = rng.normal(size=2) @ basis, rng.normal(size=2) @ basis
    V, _ = transport_nodes(c, np.stack([v, w]))
    g = np.einsum("ik,ik->i", V[:, 0], V[:, 1])
    assert np.max(np.abs(g - v @ w)) < 1e-8
    mid = c.N // 3
    direct = V[-1, 0]
    first = transport_nodes(c, v, 0, mid)[0][-1, 0]
    second = transport_nodes(c, first, mid, c.N)[0][-1, 0]
    np.testing.assert_allclose(second, direct, atol=1e-9)
    back = transport_nodes(c, direct, c.N, 0)[0][-1, 0]
    np.testing.assert_allclose(back, v, atol=1e-9)


def test_transport_start_base_checked():
    c = sphere_latitude(S1, 1.0, N=64)
    with pytest.raises(PathError):
        parallel_transport(c, Tangent(Point(S1, [0.0, 0.0, 1.0]), np.array([1.0, 0, 0])), 0.5)


def test_transport_differential_flat_is_zero():
    rng = np.random.default_rng(0)
    for c in (torus_winding(T2, 0, 1, N=256, amplitude=0.05, modes=2, seed=1),
              geodesic_segment(Euclidean(2), [0.0, 0.0], [1.0, 1.0], N=256)):
        fr = transport_frame(c)
        h1 = random_h1_field(fr, rng)
        assert np.all(transport_differential(c, h1, [1.0, 0.5], 0.5, fr) == 0)
        fd = fd_transport_derivative(c, h1, np.array([1.0, 0.5]), 0.5)
        assert np.max(np.abs(fd)) < 1e-9


def test_transport_differential_tau_zero_is_christoffel_term():
    c = sphere_latitude(S1, 1.0, N=256)
    fr = transport_frame(c)
    h1 = random_h1_field(fr, np.random.default_rng(1))
    out = transport_differential(c, h1, [0.4, -0.2], 0.0, fr)
    V = np.array([0.4, -0.2]) @ fr.frames[0]
    np.testing.assert_allclose(out, -S1.christoffel(c.samples[0], V, h1.values[0]))
    assert np.all(out == 0)  # h1 vanishes at tau = 0


def test_transport_differential_matches_fd_on_sphere():
    rng = np.random.default_rng(5)
    c = sphere_latitude(S1, 1.1, N=1024, amplitude=0.1, modes=2, seed=3)
    fr = transport_frame(c)
    h1 = random_h1_field(fr, rng, modes=3)
    comps = np.array([0.7, 0.2])
    for tau2 in (0.25, 0.625):
        an = transport_differential(c, h1, comps, tau2, fr)
        fd = fd_transport_derivative(c, h1, comps @ fr.frames[0], tau2)
        assert np.linalg.norm(an - fd) <= 1e-4 * np.linalg.norm(fd)
    # h2 may also be passed as a sampled array
    arr = np.tile(comps, (c.N + 1, 1))
    np.testing.assert_array_equal(transport_differential(c, h1, arr, 0.25, fr),
                                  transport_differential(c, h1, comps, 0.25, fr))
