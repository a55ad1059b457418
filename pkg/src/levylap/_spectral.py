"""Closed-form eigenbases: Fourier modes on the 2-torus, spherical harmonics on S^2.

Coefficient layouts
-------------------
torus:  complex array ``(2K+1, 2K+1)``, entry ``[k1 % (2K+1), k2 % (2K+1)]``
        multiplies ``exp(2 pi i (k1 x / L1 + k2 y / L2))``.
sphere: complex array ``(L+1, 2L+1)``, entry ``[l, m % (2L+1)]`` multiplies the
        orthonormal (Condon-Shortley) harmonic ``Y_l^m`` of the direction x/|x|.

Both layouts match numpy's negative-index wrapping, so ``c[l, -1]`` is m = -1.
"""
from __future__ import annotations

import numpy as np
from scipy.special import roots_legendre, sph_harm_y_all


def torus_modes(K):
    k = np.arange(2 * K + 1)
    return np.where(k > K, k - (2 * K + 1), k)


def sphere_degrees_orders(L):
    ell = np.arange(L + 1)[:, None] * np.ones((1, 2 * L + 1), dtype=int)
    m = torus_modes(L)[None, :] * np.ones((L + 1, 1), dtype=int)
    return ell, m


def torus_wavevectors(K, periods):
    k = torus_modes(K)
    kx = 2 * np.pi * k[:, None] / periods[0] * np.ones((1, 2 * K + 1))
    ky = 2 * np.pi * k[None, :] / periods[1] * np.ones((2 * K + 1, 1))
    return kx, ky


def torus_active(coeffs, tol=0.0):
    """Smallest K' such that all nonzero modes satisfy |k_j| <= K'."""
    K = (coeffs.shape[0] - 1) // 2
    k = torus_modes(K)
    nz = np.abs(coeffs) > tol
    if not nz.any():
        return 0
    return int(max(np.max(np.abs(k)[np.any(nz, axis=1)]), np.max(np.abs(k)[np.any(nz, axis=0)])))


def torus_resize(coeffs, K_new):
    K = (coeffs.shape[0] - 1) // 2
    out = np.zeros((2 * K_new + 1, 2 * K_new + 1), dtype=complex)
    k = torus_modes(min(K, K_new))
    out[np.ix_(k, k)] = coeffs[np.ix_(k, k)]
    return out


def torus_synth(coeff_list, x, periods):
    """Evaluate several torus coefficient arrays at points x of shape (n, 2)."""
    K = max(torus_active(c) for c in coeff_list)
    k = torus_modes(K)
    ex = np.exp(2j * np.pi * np.multiply.outer(x[:, 0], k) / periods[0])
    ey = np.exp(2j * np.pi * np.multiply.outer(x[:, 1], k) / periods[1])
    out = []
    for c in coeff_list:
        c = torus_resize(c, K)
        out.append(np.einsum("ia,ab,ib->i", ex, c, ey).real)
    return out


def sphere_active(coeffs, tol=0.0):
    nz = np.abs(coeffs) > tol
    rows = np.nonzero(np.any(nz, axis=1))[0]
    return int(rows[-1]) if rows.size else 0


def sphere_resize(coeffs, L_new):
    L = coeffs.shape[0] - 1
    out = np.zeros((L_new + 1, 2 * L_new + 1), dtype=complex)
    Lm = min(L, L_new)
    m = torus_modes(Lm)
    out[: Lm + 1][:, m] = coeffs[: Lm + 1][:, m]
    return out


def sphere_table(L, x):
    """Y_l^m(x/|x|) for all l, |m| <= L; shape (L+1, 2L+1, n)."""
    x = np.atleast_2d(x)
    r = np.linalg.norm(x, axis=-1)
    theta = np.arccos(np.clip(x[:, 2] / r, -1.0, 1.0))
    phi = np.arctan2(x[:, 1], x[:, 0])
    return sph_harm_y_all(L, L, theta, phi)


def sphere_synth(coeff_list, x):
    L = max(sphere_active(c) for c in coeff_list)
    Y = sphere_table(L, x)
    return [np.einsum("lm,lmi->i", sphere_resize(c, L), Y).real for c in coeff_list]


def ladder(coeffs):
    """Coefficients of (r x grad) f = i L f, component-wise (x, y, z).

    Uses L_z Y_l^m = m Y_l^m and L_{+-} Y_l^m = sqrt((l -+ m)(l +- m + 1)) Y_l^{m+-1}.
    """
    L = coeffs.shape[0] - 1
    ell, m = sphere_degrees_orders(L)
    valid = np.abs(m) <= ell
    c = np.where(valid, coeffs, 0)
    # (L+ f)_{l,m} = c_{l,m-1} sqrt((l - m + 1)(l + m))
    up = np.zeros_like(c)
    down = np.zeros_like(c)
    for mm in range(-L, L + 1):
        col = mm % (2 * L + 1)
        if mm - 1 >= -L:
            src = (mm - 1) % (2 * L + 1)
            fac = np.sqrt(np.clip((ell[:, 0] - mm + 1) * (ell[:, 0] + mm), 0, None))
            up[:, col] = c[:, src] * fac
        if mm + 1 <= L:
            src = (mm + 1) % (2 * L + 1)
            fac = np.sqrt(np.clip((ell[:, 0] + mm + 1) * (ell[:, 0] - mm), 0, None))
            down[:, col] = c[:, src] * fac
    up = np.where(valid, up, 0)
    down = np.where(valid, down, 0)
    Lx = 0.5 * (up + down)
    Ly = (up - down) / 2j
    Lz = m * c
    return 1j * Lx, 1j * Ly, 1j * Lz


def gauss_sphere_grid(n_theta, n_phi):
    """Gauss-Legendre in cos(theta) times equispaced phi; unit-sphere points and weights."""
    u, wu = roots_legendre(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    st = np.sqrt(1 - u**2)
    pts = np.stack([
        np.multiply.outer(st, np.cos(phi)),
        np.multiply.outer(st, np.sin(phi)),
        np.multiply.outer(u, np.ones(n_phi)),
    ], axis=-1).reshape(-1, 3)
    w = np.multiply.outer(wu, np.full(n_phi, 2 * np.pi / n_phi)).ravel()
    return pts, w
