"""Default forms, curves and functionals used by the self-test and the examples."""
from __future__ import annotations

import numpy as np

from .functionals import LfAtom, Product, SmoothCompose, ThetaAtom, outer_map
from .geometry import FlatTorus, Sphere2
from .hodge import oneform_from_potentials, sphere_coordinate, sphere_harmonic, torus_fourier
from .pathspace import geodesic_segment, sphere_latitude, torus_winding

TORUS = FlatTorus(2, (1.0, 1.0))
SPHERE = Sphere2(1.0)
LATITUDE = np.pi / 3


def torus_f10():
    """sin(2 pi x), eigenvalue -4 pi^2."""
    return torus_fourier(TORUS, (1, 0), "sin")


def torus_theta_form():
    """sin(2 pi x) dy = *d(beta) with beta = -cos(2 pi x) / (2 pi)."""
    return oneform_from_potentials(beta=torus_fourier(TORUS, (1, 0), "cos", -1.0 / (2 * np.pi)))


def torus_heat_form():
    """sin(2 pi x) dy + dy."""
    return torus_theta_form() + oneform_from_potentials(manifold=TORUS, harmonic=(0.0, 1.0))


def torus_gauge_form():
    """The heat form plus an exact part, to separate Yang-Mills from Hodge flow."""
    return torus_heat_form() + oneform_from_potentials(alpha=torus_fourier(TORUS, (1, 1), "cos", 0.3))


def sphere_z():
    return sphere_coordinate(SPHERE, "z")


def sphere_coexact_form():
    """*d of a degree-2 potential (eigenvalue -6 on the unit sphere)."""
    return oneform_from_potentials(beta=sphere_harmonic(SPHERE, 2, 0) + 0.5 * sphere_harmonic(SPHERE, 2, 1))


def sphere_mixed_form():
    """Coexact parts of two degrees plus an exact part."""
    beta = sphere_harmonic(SPHERE, 2, 0) + 0.4 * sphere_harmonic(SPHERE, 3, -2)
    return oneform_from_potentials(alpha=0.5 * sphere_harmonic(SPHERE, 1, 1), beta=beta)


def torus_loops(N=1024):
    straight = torus_winding(TORUS, 0, 1, N=N, base=(0.25, 0.0))
    perturbed = torus_winding(TORUS, 0, 1, N=N, base=(0.25, 0.0), amplitude=0.05, modes=3, seed=2)
    return straight, perturbed


def sphere_loops(N=1024):
    straight = sphere_latitude(SPHERE, LATITUDE, N=N)
    perturbed = sphere_latitude(SPHERE, LATITUDE, N=N, amplitude=0.1, modes=3, seed=1)
    return straight, perturbed


def sphere_open_path(N=1024):
    return geodesic_segment(SPHERE, np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.8, 0.6]), N=N)


def equivalence_fixtures(N=1024):
    """(name, functional, curves) for the six definition-equivalence cases."""
    tl, sl = torus_loops(N), sphere_loops(N)
    theta = ThetaAtom(torus_theta_form())
    return [
        ("Lf_torus_mode10", LfAtom(torus_f10()), tl),
        ("Lz_sphere", LfAtom(sphere_z()), sl),
        ("theta_torus", theta, tl),
        ("theta_sphere_coexact", ThetaAtom(sphere_coexact_form()), sl),
        ("product_Lf_theta", Product((LfAtom(torus_f10()), theta)), tl),
        ("compose_square_theta", SmoothCompose(outer_map("power", 2), (theta,)), tl),
    ]


def heat_templates():
    """(name, template, loop) pairs for the heat-residual check."""
    tl, sl = torus_loops(), sphere_loops()
    a0 = ThetaAtom(torus_heat_form())
    f = torus_f10() + torus_fourier(TORUS, (1, 1), "cos", 0.5)
    sph = ThetaAtom(sphere_mixed_form())
    return [
        ("theta_torus", a0, tl[1]),
        ("square_theta_torus", SmoothCompose(outer_map("power", 2), (a0,)), tl[0]),
        ("Lf_torus", LfAtom(f), tl[1]),
        ("product_torus", Product((LfAtom(f), a0)), tl[1]),
        ("exp_theta_torus", SmoothCompose(outer_map("exp"), (a0,)), tl[1]),
        ("Lz_sphere", LfAtom(sphere_z() + sphere_harmonic(SPHERE, 2, 1)), sl[1]),
        ("theta_sphere", sph, sl[1]),
        ("cube_theta_sphere", SmoothCompose(outer_map("power", 3), (sph,)), sl[0]),
    ]
