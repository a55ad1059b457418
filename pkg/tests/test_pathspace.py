import numpy as np
import pytest

from levylap.geometry import Euclidean, FlatTorus, Sphere2
from levylap.pathspace import (
    Curve,
    PathError,
    VectorFieldAlongCurve,
    constant_curve,
    geodesic_segment,
    make_basis_field,
    path_exp,
    random_h1_field,
    random_smooth_loop,
    read_curve_csv,
    sphere_latitude,
    torus_winding,
    trapezoid,
    velocity,
    write_curve_csv,
)
from levylap.transport import transport_frame

S1 = Sphere2(1.0)
T2 = FlatTorus(2, (1.0, 1.0))


def test_torus_line_velocity():
    c = torus_winding(T2, 0, 1, N=64)
    np.testing.assert_allclose(c.samples[:, 0], 0.0)
    np.testing.assert_allclose(c.samples[:-1, 1], c.tau[:-1])
    np.testing.assert_allclose(c.without_oracle().velocities(), np.tile([0.0, 1.0], (65, 1)), atol=1e-12)
    np.testing.assert_allclose(velocity(c, 17).vec, [0, 1])


def test_constant_curve_velocity_zero():
    c = constant_curve(S1, [0, 0, 1.0])
    assert np.all(c.velocities() == 0)
    assert np.all(c.without_oracle().velocities() == 0)


@pytest.mark.parametrize("theta0", [np.pi / 6, np.pi / 3, 2.0])
def test_latitude_speed_finite_difference(theta0):
    c = sphere_latitude(S1, theta0, N=512).without_oracle()
    speed = np.linalg.norm(c.velocities(), axis=1)
    assert np.max(np.abs(speed / (2 * np.pi * np.sin(theta0)) - 1)) < 1e-4


def test_open_curve_flags_one_sided_endpoints():
    c = geodesic_segment(S1, [1.0, 0, 0], [0, 0.8, 0.6], N=256)
    assert not c.one_sided_endpoints
    bare = c.without_oracle()
    assert bare.one_sided_endpoints
    np.testing.assert_allclose(bare.velocities(), c.velocities(), atol=1e-7)


def test_curve_validation():
    with pytest.raises(PathError, match="power of two"):
        Curve(T2, np.zeros((12, 2)))
    with pytest.raises(PathError, match="closed"):
        Curve(T2, np.array([[0.0, 0.0], [0.5, 0.2], [0.3, 0.3]]), closed=True)
    # torus closure is modulo periods
    Curve(T2, np.array([[0.0, 0.0], [0.5, 0.5], [1.0, 1.0]]), closed=True)
    with pytest.raises(PathError):
        torus_winding(T2, 0, 0)
    with pytest.raises(PathError):
        sphere_latitude(S1, 0.0)


def test_resolution_bound_holds():
    for c in (torus_winding(T2, 2, 3, N=256, amplitude=0.05, modes=3, seed=4),
              sphere_latitude(S1, 1.0, N=256, amplitude=0.1, modes=3, seed=1),
              random_smooth_loop(S1, seed=5, N=256)):
        step = c.manifold.distance(c.samples[:-1], c.samples[1:])
        assert np.max(step) <= c.meta["resolution_constant"] / c.N * (1 + 1e-3)


def test_basis_field_values_and_guard():
    line = geodesic_segment(Euclidean(2), [0.0, 0.0], [1.0, 0.5], N=256)
    fr = transport_frame(line)
    e = make_basis_field(fr, 1, 2)
    assert np.all(e.values[0] == 0) and np.allclose(e.values[-1], 0, atol=1e-15)
    np.testing.assert_allclose(e.values[line.node_index(0.25)], np.sqrt(2) * fr.frames[0][0])
    with pytest.raises(PathError, match="N >= 272"):
        make_basis_field(fr, 1, 17)


def test_basis_field_norm_on_latitude():
    c = sphere_latitude(S1, np.pi / 3, N=512)
    fr = transport_frame(c)
    for mu in (1, 2):
        e = make_basis_field(fr, mu, 5)
        np.testing.assert_allclose(e.pointwise_norm(), np.sqrt(2) * np.abs(np.sin(5 * np.pi * c.tau)), atol=1e-8)


def test_basis_fields_orthonormal():
    c = sphere_latitude(S1, np.pi / 3, N=1024)
    fr = transport_frame(c)
    fields = [(mu, n, make_basis_field(fr, mu, n)) for mu in (1, 2) for n in (1, 2, 7, 64)]
    for mu, n, e in fields:
        for nu, m, f in fields:
            expected = 1.0 if (mu, n) == (nu, m) else 0.0
            assert abs(e.inner_g0(f) - expected) < 1e-10


def test_basis_field_derivative_matches_fd():
    c = sphere_latitude(S1, 1.0, N=2048, amplitude=0.1, modes=3, seed=1)
    e = make_basis_field(transport_frame(c), 1, 3)
    d = np.gradient(e.values, 1.0 / c.N, axis=0, edge_order=2)
    assert np.max(np.abs(d - e.derivative)[2:-2]) < 1e-3


def test_path_exp_identity_and_linear():
    c = random_smooth_loop(Euclidean(2), seed=3, N=128)
    X = VectorFieldAlongCurve(c, np.sin(np.pi * c.tau)[:, None] * np.array([1.0, -2.0]))
    assert np.array_equal(path_exp(c, X, 0.0).samples, c.samples)
    np.testing.assert_allclose(path_exp(c, X, 0.3).samples, c.samples + 0.3 * X.values)


def test_path_exp_equator_to_latitude():
    eq = sphere_latitude(S1, np.pi / 2, N=256)
    a = 0.4
    X = VectorFieldAlongCurve(eq, np.tile([0.0, 0.0, a], (257, 1)))
    lat = path_exp(eq, X, 1.0)
    polar = np.arccos(lat.samples[:, 2])
    np.testing.assert_allclose(polar, np.pi / 2 - a, atol=1e-10)
    assert lat.closed


def test_path_exp_guard():
    c = sphere_latitude(S1, 1.0, N=128)
    X = random_h1_field(transport_frame(c), np.random.default_rng(0))
    s = 0.6 * np.pi / np.max(X.pointwise_norm())
    with pytest.raises(PathError, match="guard"):
        path_exp(c, X, s)


def test_path_exp_first_order_and_exact_velocity():
    c = sphere_latitude(S1, 1.0, N=1024, amplitude=0.1, modes=3, seed=1)
    X = random_h1_field(transport_frame(c), np.random.default_rng(1), scale=0.5)
    errs = []
    for s in (1e-2, 5e-3):
        moved = path_exp(c, X, s)
        errs.append(np.max(np.linalg.norm(moved.samples - (c.samples + s * X.values), axis=1)))
    assert 3.5 < errs[0] / errs[1] < 4.5
    moved = path_exp(c, X, 0.05)
    fd = moved.without_oracle().velocities()
    # the moved loop has a corner at the base point, so compare away from it
    assert np.max(np.abs(moved.velocities() - fd)[3:-3]) < 1e-6


def test_path_exp_preserves_closure_and_winding():
    c = torus_winding(T2, 1, 2, N=256)
    X = random_h1_field(transport_frame(c), np.random.default_rng(2))
    moved = path_exp(c, X, 0.05)
    assert moved.closed and moved.winding == (1, 2)
    disp = moved.unwrapped()[-1] - moved.unwrapped()[0]
    np.testing.assert_allclose(disp, [1.0, 2.0], atol=1e-12)


def test_random_loop_deterministic():
    a = random_smooth_loop(S1, seed=7, modes=4, N=256)
    b = random_smooth_loop(S1, seed=7, modes=4, N=256)
    assert a.samples.tobytes() == b.samples.tobytes()
    assert not np.array_equal(a.samples, random_smooth_loop(S1, seed=8, modes=4, N=256).samples)


def test_equator_is_geodesic():
    eq = sphere_latitude(S1, np.pi / 2, N=256)
    seg = geodesic_segment(S1, eq.samples[0], eq.velocities()[0], N=256)
    np.testing.assert_allclose(seg.samples[-1], eq.samples[-1], atol=1e-12)


def test_trapezoid_spectral_on_loops():
    t = np.linspace(0, 1, 33)
    assert abs(trapezoid(np.cos(2 * np.pi * 3 * t) ** 2) - 0.5) < 1e-15


def test_csv_roundtrip(tmp_path):
    c = torus_winding(T2, 1, 1, N=64, amplitude=0.02, modes=2, seed=9)
    path = write_curve_csv(c, tmp_path / "loop.csv")
    back = read_curve_csv(path)
    assert np.array_equal(back.samples, c.samples)
    assert back.closed and back.winding == (1, 1) and back.meta["seed"] == 9
    assert path.read_text().splitlines()[0] == "tau,x,y"
