import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from levylap.geometry import FlatTorus, Point, Sphere2, Tangent
from levylap.hodge import (
    HodgeError,
    OneForm,
    ScalarForm,
    codifferential,
    codifferential_2form,
    curl,
    eigenvalue_of,
    eval_oneform,
    eval_scalar,
    exterior_d,
    form_from_dict,
    harmonic_projection,
    heat_propagate,
    hodge_laplacian,
    inner_product,
    line_integral,
    oneform_from_potentials,
    project_oneform,
    project_scalar,
    scalar_from_modes,
    sphere_coordinate,
    sphere_harmonic,
    torus_fourier,
)
from levylap.pathspace import random_smooth_loop, sphere_latitude, torus_winding

T2 = FlatTorus(2, (1.0, 1.0))
S1 = Sphere2(1.0)
TWO_PI = 2 * np.pi


def close(a, b, tol):
    """Coefficient-wise comparison of two forms of the same kind."""
    if isinstance(a, ScalarForm):
        K = max(a.truncation, b.truncation)
        return np.max(np.abs(a.resized(K).coeffs - b.resized(K).coeffs), initial=0) <= tol
    return (close(a.alpha, b.alpha, tol) and close(a.beta, b.beta, tol)
            and np.allclose(a.harmonic_vector(), b.harmonic_vector(), atol=tol, rtol=0))


def random_scalar(manifold, rng, K=4):
    if isinstance(manifold, FlatTorus):
        modes = {}
        for k1 in range(-K, K + 1):
            for k2 in range(0, K + 1):
                if k2 == 0 and k1 < 0:
                    continue
                z = complex(rng.normal(), rng.normal()) / (1 + k1 * k1 + k2 * k2)
                if (k1, k2) == (0, 0):
                    z = z.real
                modes[(k1, k2)] = modes.get((k1, k2), 0) + z
                if (k1, k2) != (0, 0):
                    modes[(-k1, -k2)] = modes.get((-k1, -k2), 0) + z.conjugate()
        return scalar_from_modes(manifold, modes, K)
    f = scalar_from_modes(manifold, {}, K)
    for l in range(K + 1):
        for m in range(-l, l + 1):
            f = f + sphere_harmonic(manifold, l, m, rng.normal() / (1 + l), K)
    return f


def random_oneform(manifold, rng, K=4):
    h = tuple(rng.normal(size=2)) if isinstance(manifold, FlatTorus) else ()
    return OneForm(manifold, random_scalar(manifold, rng, K), random_scalar(manifold, rng, K), h)


RNG = np.random.default_rng(12)
FORMS = [random_oneform(T2, RNG), random_oneform(S1, RNG), random_oneform(FlatTorus(2, (1.0, 2.5)), RNG),
         random_oneform(Sphere2(1.7), RNG)]


def test_d_examples():
    const = scalar_from_modes(T2, {(0, 0): 3.0}, 2)
    assert exterior_d(const).is_zero()
    f = torus_fourier(T2, (1, 0), "sin")
    df = exterior_d(f)
    x = np.random.default_rng(0).uniform(size=(50, 2))
    v = np.random.default_rng(1).normal(size=(50, 2))
    expected = TWO_PI * np.cos(TWO_PI * x[:, 0]) * v[:, 0]
    assert np.max(np.abs(df(x, v) - expected)) < 1e-12
    assert curl(df).is_zero(1e-12)


def test_codifferential_examples():
    dy = oneform_from_potentials(manifold=T2, harmonic=(0.0, 1.0))
    assert codifferential(dy).is_zero()
    a = oneform_from_potentials(beta=torus_fourier(T2, (1, 0), "cos", -1 / TWO_PI))
    assert codifferential(a).is_zero()
    # the pointwise a is sin(2 pi x) dy
    x = np.random.default_rng(2).uniform(size=(20, 2))
    np.testing.assert_allclose(a.vector(x), np.stack([0 * x[:, 0], np.sin(TWO_PI * x[:, 0])], -1), atol=1e-14)
    F = random_scalar(S1, np.random.default_rng(3))
    assert codifferential(codifferential_2form(F)).is_zero(1e-12)


def test_codifferential_coordinate_formula():
    # delta a = -(d_x a_x + d_y a_y), checked by finite differences
    a = FORMS[0]
    x = np.random.default_rng(4).uniform(size=(30, 2))
    h = 1e-5
    ex, ey = np.array([h, 0]), np.array([0, h])
    div = ((a.vector(x + ex)[:, 0] - a.vector(x - ex)[:, 0])
           + (a.vector(x + ey)[:, 1] - a.vector(x - ey)[:, 1])) / (2 * h)
    np.testing.assert_allclose(codifferential(a)(x), -div, atol=1e-6)


def test_laplacian_examples():
    f = torus_fourier(T2, (1, 0), "sin")
    assert close(hodge_laplacian(f), -4 * np.pi**2 * f, 1e-12)
    z = sphere_coordinate(S1, "z")
    assert close(hodge_laplacian(z), -2 * z, 1e-12)
    dy = oneform_from_potentials(manifold=T2, harmonic=(0.0, 1.0))
    assert hodge_laplacian(dy).is_zero()
    assert eigenvalue_of(torus_fourier(FlatTorus(2, (2.0, 1.0)), (1, 1))) == pytest.approx(
        -4 * np.pi**2 * (0.25 + 1), rel=1e-14)
    assert eigenvalue_of(sphere_harmonic(Sphere2(2.0), 3, -2)) == pytest.approx(-12 / 4, rel=1e-14)


def test_laplacian_matches_pointwise_fd():
    f = random_scalar(T2, np.random.default_rng(5), 3)
    x = np.random.default_rng(6).uniform(size=(10, 2))
    h = 1e-4
    lap = sum(f(x + e) + f(x - e) - 2 * f(x) for e in (np.array([h, 0]), np.array([0, h]))) / h**2
    np.testing.assert_allclose(hodge_laplacian(f)(x), lap, atol=1e-4)
    np.testing.assert_allclose(f.laplacian_values(x), hodge_laplacian(f)(x), atol=1e-11)


@pytest.mark.parametrize("a", FORMS, ids=["torus", "sphere", "torus_rect", "sphere_r"])
def test_laplacian_commutes_with_d_and_delta(a):
    f = a.alpha
    lhs, rhs = hodge_laplacian(exterior_d(f)), exterior_d(hodge_laplacian(f))
    assert close(lhs, rhs, 1e-12 * np.max(np.abs(lhs.alpha.coeffs)))
    lhs, rhs = hodge_laplacian(codifferential(a)), codifferential(hodge_laplacian(a))
    assert close(lhs, rhs, 1e-12 * np.max(np.abs(lhs.coeffs)))
    assert close(codifferential(exterior_d(f)), -hodge_laplacian(f), 1e-12 * np.max(np.abs(lhs.coeffs)))
    assert curl(exterior_d(f)).is_zero()
    assert codifferential(codifferential_2form(curl(a))).is_zero(1e-12)


@pytest.mark.parametrize("a", FORMS, ids=["torus", "sphere", "torus_rect", "sphere_r"])
def test_hodge_orthogonality(a):
    parts = [a.exact_part(), a.coexact_part(), a.harmonic_part()]
    for i in range(3):
        for j in range(i + 1, 3):
            assert abs(inner_product(parts[i], parts[j])) < 1e-12
    total = sum(inner_product(p, p) for p in parts)
    assert inner_product(a, a) == pytest.approx(total, rel=1e-13)


def test_inner_product_matches_quadrature():
    rng = np.random.default_rng(7)
    a, b = random_oneform(T2, rng, 3), random_oneform(T2, rng, 3)
    n = 64
    g = (np.stack(np.meshgrid(np.arange(n), np.arange(n), indexing="ij"), -1) / n).reshape(-1, 2)
    quad = np.mean(np.sum(a.vector(g) * b.vector(g), axis=1))
    assert inner_product(a, b) == pytest.approx(quad, rel=1e-12)
    f = random_scalar(S1, rng, 3)
    from levylap._spectral import gauss_sphere_grid

    pts, w = gauss_sphere_grid(10, 20)
    assert inner_product(f, f) == pytest.approx(float(np.sum(w * f(pts) ** 2)), rel=1e-12)


def test_heat_examples():
    a0 = oneform_from_potentials(beta=torus_fourier(T2, (1, 0), "cos", -1 / TWO_PI), harmonic=(0.0, 1.0))
    assert close(heat_propagate(a0, 0.0), a0, 0)
    t = 0.03
    at = heat_propagate(a0, t)
    assert close(at.coexact_part(), np.exp(-4 * np.pi**2 * t) * a0.coexact_part(), 1e-16)
    assert at.harmonic == (0.0, 1.0)
    dy = a0.harmonic_part()
    assert close(heat_propagate(dy, 5.0), dy, 0)
    with pytest.raises(HodgeError):
        heat_propagate(a0, -1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 0.2), st.floats(0, 0.2), st.sampled_from(range(len(FORMS))))
def test_heat_semigroup(t1, t2, idx):
    a = FORMS[idx]
    assert close(heat_propagate(heat_propagate(a, t1), t2), heat_propagate(a, t1 + t2), 1e-13)


@pytest.mark.parametrize("a", FORMS, ids=["torus", "sphere", "torus_rect", "sphere_r"])
def test_milgram_rosenbloom_bound(a):
    lam1 = max(v for v in np.concatenate([a.alpha.eigenvalues().ravel(), a.beta.eigenvalues().ravel()]) if v < 0)
    norm0 = np.sqrt(inner_product(a, a))
    for t in (0.01, 0.1, 1.0):
        diff = heat_propagate(a, t) - harmonic_projection(a)
        assert np.sqrt(inner_product(diff, diff)) <= norm0 * np.exp(lam1 * t) * (1 + 1e-12)


def test_harmonic_projection_examples():
    a = oneform_from_potentials(beta=torus_fourier(T2, (1, 0), "cos", -1 / TWO_PI), harmonic=(0.0, 3.0))
    p = harmonic_projection(a)
    assert p.harmonic == (0.0, 3.0) and p.alpha.is_zero() and p.beta.is_zero()
    assert harmonic_projection(FORMS[1]).is_zero()
    f = random_scalar(S1, np.random.default_rng(8))
    pts = S1.normalize_points(np.random.default_rng(9).normal(size=(5, 3)))
    np.testing.assert_allclose(harmonic_projection(f)(pts), f.mean(), atol=1e-14)


def test_pointwise_examples():
    zero = oneform_from_potentials(manifold=S1)
    north = Point(S1, [0.0, 0.0, 1.0])
    assert eval_oneform(zero, Tangent(north, np.array([1.0, 0, 0]))) == 0
    p = Point(T2, [0.3, 0.1])
    dy = oneform_from_potentials(manifold=T2, harmonic=(0.0, 1.0))
    assert eval_oneform(dy, Tangent(p, np.array([0.0, 1.0]))) == 1
    assert eval_scalar(sphere_coordinate(S1, "z"), north) == pytest.approx(1.0, abs=1e-14)
    x = S1.normalize_points(np.random.default_rng(10).normal(size=(20, 3)))
    for axis, k in zip("xyz", range(3)):
        np.testing.assert_allclose(sphere_coordinate(S1, axis)(x), x[:, k], atol=1e-14)


def test_sphere_gradient_matches_embedding():
    z = sphere_coordinate(Sphere2(2.0), "z")
    x = Sphere2(2.0).normalize_points(np.random.default_rng(11).normal(size=(20, 3)))
    n = x / 2.0
    expected = np.array([0, 0, 1.0]) - n[:, 2:3] * n
    np.testing.assert_allclose(z.grad(x), expected, atol=1e-13)


def test_line_integral_examples():
    a = oneform_from_potentials(beta=torus_fourier(T2, (1, 0), "cos", -1 / TWO_PI))
    loop = torus_winding(T2, 0, 1, N=256, base=(0.25, 0.0))
    assert abs(line_integral(a, loop) - 1.0) < 1e-12
    dy = oneform_from_potentials(manifold=T2, harmonic=(0.0, 1.0))
    for p, q in ((0, 1), (2, 3), (-1, 4)):
        assert abs(line_integral(dy, torus_winding(T2, p, q, N=256)) - q) < 1e-10
    exact = exterior_d(random_scalar(S1, np.random.default_rng(13)))
    for c in (sphere_latitude(S1, 1.0, N=512, amplitude=0.1, modes=3, seed=2), random_smooth_loop(S1, 3, N=512)):
        assert abs(line_integral(exact, c)) < 1e-10
    with pytest.raises(HodgeError):
        line_integral(exact, loop)


def test_stokes_orientation_on_latitude():
    # a loop integral equals the curl integrated over the cap it bounds
    a = FORMS[1]
    th = 1.1
    lhs = line_integral(a, sphere_latitude(S1, th, N=1024))
    u, wu = np.polynomial.legendre.leggauss(80)
    ct = np.cos(th) + (1 - np.cos(th)) * (u + 1) / 2
    phi = TWO_PI * np.arange(160) / 160
    C, P = np.meshgrid(ct, phi, indexing="ij")
    S = np.sqrt(1 - C**2)
    X = np.stack([S * np.cos(P), S * np.sin(P), C], -1).reshape(-1, 3)
    W = (np.outer(wu, np.ones(160)) * (1 - np.cos(th)) / 2 * TWO_PI / 160).ravel()
    rhs = float(np.sum(W * curl(a)(X)))
    assert lhs == pytest.approx(rhs, abs=1e-10)


@pytest.mark.parametrize("manifold", [T2, S1], ids=["torus", "sphere"])
def test_projection_recovers_forms(manifold):
    rng = np.random.default_rng(14)
    a = random_oneform(manifold, rng, 5)
    back = project_oneform(manifold, a.vector, truncation=8)
    assert close(back, a, 1e-11)
    f = random_scalar(manifold, rng, 5)
    assert close(project_scalar(manifold, f, truncation=8), f, 1e-12)


def test_projection_of_pointwise_torus_form():
    back = project_oneform(T2, lambda x: np.stack([0 * x[:, 0], np.sin(TWO_PI * x[:, 0]) + 3], -1))
    assert back.harmonic == pytest.approx((0.0, 3.0))
    assert back.alpha.is_zero(1e-14)
    assert close(back.beta, torus_fourier(T2, (1, 0), "cos", -1 / TWO_PI, 16), 1e-14)


@pytest.mark.parametrize("w", FORMS + [FORMS[0].alpha, FORMS[1].beta])
def test_serialization_roundtrip(w):
    import json

    back = form_from_dict(json.loads(json.dumps(w.to_dict())))
    assert type(back) is type(w) and back.manifold == w.manifold
    assert close(back, w, 1e-15)


def test_reality_enforced_and_sphere_has_no_harmonic_forms():
    c = np.zeros((3, 3), dtype=complex)
    c[2, 1] = 1.0
    with pytest.raises(HodgeError, match="real"):
        ScalarForm(T2, c)
    z = sphere_coordinate(S1, "z")
    with pytest.raises(HodgeError):
        OneForm(S1, z, z, (1.0, 0.0))
    with pytest.raises(HodgeError):
        scalar_from_modes(FlatTorus(3), {(0, 0): 1.0})


def test_eigenvalue_of_mixed_is_none():
    f = torus_fourier(T2, (1, 0)) + torus_fourier(T2, (1, 1))
    assert eigenvalue_of(f) is None
    assert eigenvalue_of(oneform_from_potentials(manifold=T2, harmonic=(1.0, 0.0))) == 0.0
