import json
import math

import numpy as np
import pytest

from levylap import fixtures as fx
from levylap.functionals import Constant, LfAtom, Product, SmoothCompose, ThetaAtom, eval_u, evaluate, outer_map
from levylap.hodge import eigenvalue_of, oneform_from_potentials, sphere_harmonic
from levylap.levy import (
    LevyError,
    h0_gradient,
    h0_gradient_u,
    levy_analytic,
    levy_analytic_u,
    levy_cesaro,
    levy_divergence,
    levy_kernel,
)
from levylap.pathspace import path_exp, random_h1_field, sphere_latitude
from levylap.transport import transport_frame

FOUR_PI2 = 4 * math.pi**2
THETA = ThetaAtom(fx.torus_theta_form())


@pytest.fixture(scope="module")
def torus_line():
    return fx.torus_loops(1024)[0]


@pytest.fixture(scope="module")
def latitude():
    return sphere_latitude(fx.SPHERE, math.pi / 3, N=1024)


def test_gradient_examples(latitude):
    assert np.all(h0_gradient(Constant(2.0), latitude).values == 0)
    g = h0_gradient(LfAtom(fx.sphere_z()), latitude).values
    n = latitude.samples
    np.testing.assert_allclose(g, np.array([0, 0, 1.0]) - n[:, 2:3] * n, atol=1e-13)


@pytest.mark.parametrize("F", [
    LfAtom(fx.torus_f10() + 0.3),
    Product((LfAtom(fx.torus_f10() + 0.3), ThetaAtom(fx.torus_heat_form()))),
    SmoothCompose(outer_map("sin"), (ThetaAtom(fx.torus_gauge_form()),)),
], ids=["Lf", "product", "sin_theta"])
def test_gradient_directional_derivative(F):
    c = fx.torus_loops(2048)[1]
    frame = transport_frame(c)
    G = h0_gradient(F, c)
    rng = np.random.default_rng(0)
    s = 1e-3
    for _ in range(3):
        X = random_h1_field(frame, rng)
        e = [evaluate(F, path_exp(c, X, u)) for u in (-2 * s, -s, s, 2 * s)]
        fd = (e[0] - 8 * e[1] + 8 * e[2] - e[3]) / (12 * s)
        assert abs(G.inner_g0(X) - fd) < 1e-5 * max(1.0, abs(fd))


def test_gradient_of_u_matches_fd():
    a = fx.sphere_mixed_form()
    c = fx.sphere_loops(2048)[1]
    X = random_h1_field(transport_frame(c), np.random.default_rng(3))
    gu = h0_gradient_u(a, c)
    pairing = np.sum(np.sum(gu * X.values, axis=1) * np.where((np.arange(c.N + 1) % c.N) == 0, 0.5, 1.0)) / c.N
    s = 1e-4
    fd = (eval_u(a, path_exp(c, X, s)) - eval_u(a, path_exp(c, X, -s))) / (2 * s)
    assert abs(pairing - fd) < 1e-5


def test_kernel_examples(torus_line, latitude):
    f = fx.torus_f10()
    c = fx.torus_loops(1024)[1]
    k = levy_kernel(LfAtom(f), c)
    np.testing.assert_allclose(k.trace(), -FOUR_PI2 * f(c.samples), atol=1e-10)
    np.testing.assert_allclose(k.KL, np.swapaxes(k.KL, 1, 2), atol=0)
    k0 = levy_kernel(Constant(1.0), latitude)
    assert np.all(k0.KL == 0) and np.all(k0.KS == 0)
    kz = levy_kernel(LfAtom(fx.sphere_z()), latitude)
    np.testing.assert_allclose(kz.trace(), -2 * latitude.samples[:, 2], atol=1e-13)
    kt = levy_kernel(ThetaAtom(fx.sphere_mixed_form()), fx.sphere_loops(512)[1])
    np.testing.assert_allclose(kt.KS, -np.swapaxes(kt.KS, 1, 2), atol=1e-15)
    assert np.max(np.abs(kt.KS)) > 0.1


def test_divergence_examples(torus_line, latitude):
    zero = levy_kernel(Constant(0.0), torus_line)
    assert levy_divergence(zero) == 0
    for th in (math.pi / 3, 0.7, 2.2):
        lat = sphere_latitude(fx.SPHERE, th, N=512)
        assert levy_divergence(levy_kernel(LfAtom(fx.sphere_z()), lat)) == pytest.approx(-2 * math.cos(th), abs=1e-8)
    assert levy_divergence(levy_kernel(THETA, torus_line)) == pytest.approx(-FOUR_PI2, abs=1e-8)


@pytest.mark.parametrize("name", ["theta_open", "product_open", "compose_loop"])
def test_kernel_route_matches_analytic(name):
    seg = fx.sphere_open_path(1024)
    a = ThetaAtom(fx.sphere_mixed_form())
    F, c = {
        "theta_open": (a, seg),
        "product_open": (Product((LfAtom(fx.sphere_z()), a)), seg),
        "compose_loop": (SmoothCompose(outer_map("exp"), (a,)), fx.sphere_loops(1024)[1]),
    }[name]
    assert levy_divergence(levy_kernel(F, c)) == pytest.approx(levy_analytic(F, c), abs=1e-8)


def test_analytic_examples(torus_line):
    assert levy_analytic(Constant(5.0), torus_line) == 0
    assert levy_analytic(THETA, torus_line) == pytest.approx(-FOUR_PI2, abs=1e-10)
    sq = SmoothCompose(outer_map("power", 2), (THETA,))
    assert levy_analytic(sq, torus_line) == pytest.approx(-2 * FOUR_PI2, abs=1e-9)


def test_leibniz_and_chain_rule():
    c = fx.torus_loops(1024)[1]
    p1, p2 = LfAtom(fx.torus_f10() + 0.2), ThetaAtom(fx.torus_gauge_form())
    v1, v2 = evaluate(p1, c), evaluate(p2, c)
    l1, l2 = levy_analytic(p1, c), levy_analytic(p2, c)
    assert abs(levy_analytic(Product((p1, p2)), c) - (v1 * l2 + v2 * l1)) < 1e-10
    cube = SmoothCompose(outer_map("power", 3), (p2,))
    assert abs(levy_analytic(cube, c) - 3 * v2**2 * l2) < 1e-10


def test_open_and_loop_formulas_agree_on_loops():
    from levylap.hodge import codifferential_2form, curl, line_integral

    a = fx.sphere_mixed_form()
    c = fx.sphere_loops(1024)[1]
    open_form = -line_integral(codifferential_2form(curl(a)), c)
    assert levy_analytic(ThetaAtom(a), c) == pytest.approx(open_form, abs=1e-10)


def test_unsupported_tree():
    c = fx.torus_loops(64)[0]
    for fn in (levy_analytic, h0_gradient, levy_kernel):
        with pytest.raises(ValueError, match="unsupported functional node"):
            fn(object(), c)


def test_u_examples(torus_line):
    zero = oneform_from_potentials(manifold=fx.TORUS)
    assert levy_analytic_u(zero, torus_line) == 0
    a = fx.torus_gauge_form()
    c = fx.torus_loops(1024)[1]
    cos_route = levy_analytic(SmoothCompose(outer_map("cos"), (ThetaAtom(a),)), c)
    sin_route = levy_analytic(SmoothCompose(outer_map("sin"), (ThetaAtom(a),)), c)
    assert abs(levy_analytic_u(a, c) - (cos_route - 1j * sin_route)) < 1e-10
    a = fx.torus_theta_form()
    mu = eigenvalue_of(a)
    assert abs(levy_analytic_u(a, torus_line)) == pytest.approx(abs(mu * evaluate(ThetaAtom(a), torus_line)), rel=1e-12)
    # on loops the chain rule gives -i U^a int Delta a
    expected = -1j * eval_u(a, torus_line) * (mu * evaluate(ThetaAtom(a), torus_line))
    assert abs(levy_analytic_u(a, torus_line) - expected) < 1e-9


def test_cesaro_constant_is_zero(torus_line):
    rep = levy_cesaro(Constant(4.0), torus_line, n_max=8)
    assert np.all(rep.partial_sums == 0) and rep.limit == 0


def test_cesaro_examples(torus_line, latitude):
    rep = levy_cesaro(THETA, torus_line, n_max=32, h=1e-3, N=1024)
    assert abs(rep.limit + FOUR_PI2) <= 0.02 * FOUR_PI2
    assert np.isfinite(rep.residual)
    rep = levy_cesaro(LfAtom(fx.sphere_z()), latitude, n_max=32, h=1e-3, N=1024)
    assert abs(rep.limit + 1.0) <= 0.02


def test_cesaro_richardson_and_jobs_deterministic():
    c = fx.sphere_loops(512)[1]
    F = LfAtom(fx.sphere_z() + sphere_harmonic(fx.SPHERE, 2, 1))
    serial = levy_cesaro(F, c, n_max=16, richardson=True)
    threaded = levy_cesaro(F, c, n_max=16, richardson=True, jobs=3)
    assert serial.partial_sums.tobytes() == threaded.partial_sums.tobytes()
    exact = levy_analytic(F, c)
    assert abs(serial.best_limit - exact) <= abs(serial.coarse_limit - exact) + 1e-9


def test_cesaro_opaque_callable(torus_line):
    rep = levy_cesaro(lambda curve: evaluate(THETA, curve) ** 2, torus_line, n_max=16)
    assert rep.limit == pytest.approx(-2 * FOUR_PI2, rel=0.02)


def test_cesaro_guards(torus_line):
    with pytest.raises(LevyError, match="N >= 16"):
        levy_cesaro(THETA, torus_line, n_max=128)
    with pytest.raises(LevyError, match="requested N"):
        levy_cesaro(THETA, torus_line, N=2048)
    with pytest.raises(LevyError):
        levy_cesaro(LfAtom(fx.sphere_z()), torus_line)
    with pytest.raises(LevyError, match="not finite"):
        levy_cesaro(lambda curve: float("nan"), torus_line, n_max=2)


def test_report_files(tmp_path, torus_line):
    rep = levy_cesaro(THETA, torus_line, n_max=4)
    csv_path, json_path = rep.write(tmp_path, "theta", header="scenario=x")
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "# scenario=x" and lines[1] == "n,S_n" and len(lines) == 6
    summary = json.loads(json_path.read_text())
    assert summary["n_max"] == 4 and summary["N"] == 1024 and "residual" in summary
