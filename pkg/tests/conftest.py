"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own FFT/factorization
machinery: winding numbers come from dense unwrapped-argument tracking,
Schwarz integrals from direct trapezoid quadrature of the circle integral.
"""

import numpy as np
import pytest

from axirh import (
    AxialProblem,
    CircleData,
    JordanDomain,
    SolverConfig,
    affine_disk_map,
)
from axirh._fourier import circle_angles


def brute_winding(fn_or_values, n=4096):
    """Winding number about 0 by unwrapped-argument tracking."""
    if callable(fn_or_values):
        values = fn_or_values(circle_angles(n))
    else:
        values = np.asarray(fn_or_values)
    inc = np.angle(np.roll(values, -1) / values)
    return int(np.rint(np.sum(inc) / (2 * np.pi)))


def schwarz_quadrature(u_samples, gamma, n_quad=4096):
    """Direct trapezoid quadrature of the Schwarz integral at points gamma.

    S[u](gamma) = (1/2pi) integral u(theta) (tau + gamma)/(tau - gamma) dtheta,
    spectrally accurate for band-limited u and |gamma| bounded away from 1.
    """
    theta_src = circle_angles(len(u_samples))
    theta = circle_angles(n_quad)
    # resample u by trig interpolation through its own FFT-free formula:
    # direct Dirichlet-kernel evaluation to stay independent of the library
    u = np.zeros(n_quad)
    n_s = len(u_samples)
    for j, us in enumerate(u_samples):
        d = theta - theta_src[j]
        at_node = np.abs(np.sin(d / 2)) < 1e-14
        tan_safe = np.where(at_node, 1.0, np.tan(d / 2))
        kern = np.where(at_node, 1.0, np.sin(n_s * d / 2) / (n_s * tan_safe))
        u += us * kern
    tau = np.exp(1j * theta)
    gamma = np.atleast_1d(np.asarray(gamma, dtype=complex))
    out = np.empty(gamma.size, dtype=complex)
    for i, gm in enumerate(gamma):
        out[i] = np.mean(u * (tau + gm) / (tau - gm))
    return out


def kernel_pair(x0, r, n):
    """Closed-form axially monogenic reference (A, B) at (x0, r)."""
    rho = np.sqrt(np.asarray(x0) ** 2 + np.asarray(r) ** 2)
    return x0 / rho ** (n + 1), -r / rho ** (n + 1)


def kernel_trace_w(z, n):
    a, b = kernel_pair(np.real(z), np.imag(z), n)
    return a + 1j * b


def random_trig_coefficient(rng, degree, min_modulus, base_winding=0,
                            n_check=4096, scale=0.3):
    """Random trig-polynomial coefficient with |value| >= min_modulus.

    Rejection-samples smooth coefficients of the form
    e^{i k0 theta} (c0 + sum_k a_k e^{i k theta}); the base winding k0 sets
    the index.
    """
    theta = circle_angles(n_check)
    for _ in range(200):
        coeff = (rng.normal(size=2 * degree + 1)
                 + 1j * rng.normal(size=2 * degree + 1)) * scale
        ks = np.arange(-degree, degree + 1)
        vals = np.ones(n_check, dtype=complex)
        for k, c in zip(ks, coeff):
            vals = vals + c * np.exp(1j * k * theta) / (1 + abs(k))
        vals = vals * np.exp(1j * base_winding * theta)
        if np.min(np.abs(vals)) >= min_modulus:
            def fn(t, coeff=coeff, ks=ks, k0=base_winding):
                v = np.ones_like(t, dtype=complex)
                for k, c in zip(ks, coeff):
                    v = v + c * np.exp(1j * k * t) / (1 + abs(k))
                return v * np.exp(1j * k0 * t)

            return fn
    raise RuntimeError("rejection sampling failed to find a valid coefficient")


@pytest.fixture(scope="session")
def disk_at_2i():
    """The workhorse domain: unit disk centered at 2i, 256 boundary samples."""
    cmap = affine_disk_map(2j, 1.0)
    theta = circle_angles(256)
    boundary = cmap.forward(np.exp(1j * theta))
    domain = JordanDomain(boundary, check_simple=False)
    return domain, cmap


def make_disk_problem(n, g_values, lam_values=None, alpha=0.0, config=None,
                      domain_pair=None):
    if domain_pair is None:
        cmap = affine_disk_map(2j, 1.0)
        theta = circle_angles(len(np.atleast_1d(g_values)))
        domain = JordanDomain(cmap.forward(np.exp(1j * theta)),
                              check_simple=False)
    else:
        domain, cmap = domain_pair
    g = CircleData(np.asarray(g_values, dtype=float))
    if lam_values is None:
        lam = CircleData(np.ones(g.N, dtype=complex))
    else:
        lam = CircleData(np.asarray(lam_values, dtype=complex))
    cfg = config or SolverConfig(grid_K=48, grid_M=32, boundary_N=g.N)
    return AxialProblem(n, alpha, domain, cmap, lam, g, cfg)
