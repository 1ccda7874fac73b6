"""FFT helpers on equispaced unit-circle samples.

Conventions: samples live at theta_j = 2*pi*j/N.  "Coefficient" arrays
returned by `fourier_coeffs` follow numpy's fft bin ordering divided by N,
so bin k holds (1/2pi) * integral u(theta) exp(-ik theta) dtheta.
"""

import numpy as np

from .errors import AliasingError, DimensionError


def circle_angles(n):
    return 2.0 * np.pi * np.arange(n) / n


def fourier_coeffs(u):
    u = np.asarray(u)
    return np.fft.fft(u) / u.shape[-1]


def check_bandlimit(u, alias_tol, what="data"):
    """Reject samples whose top-frequency band is non-negligible."""
    b = fourier_coeffs(u)
    n = b.shape[-1]
    scale = np.max(np.abs(b))
    if scale == 0.0:
        return
    guard = max(1, n // 16)
    hi = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    band = np.abs(hi) >= n // 2 - guard + 1
    if np.max(np.abs(b[..., band])) > alias_tol * scale:
        raise AliasingError(
            f"{what}: top-frequency content exceeds {alias_tol:g} of peak; "
            "increase the sample count")


def analytic_completion_coeffs(u, alias_tol=None):
    """Taylor coefficients of the holomorphic function with boundary real part u.

    For real u = sum b_k exp(ik theta) this returns a_0 = b_0, a_k = 2 b_k
    (k >= 1), i.e. the Schwarz-integral completion normalized to vanishing
    imaginary part at the origin.
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[-1]
    if n < 16 or n % 2:
        raise DimensionError(f"need an even sample count >= 16, got {n}")
    if alias_tol is not None:
        check_bandlimit(u, alias_tol, what="Schwarz operator input")
    b = fourier_coeffs(u)
    a = np.zeros(n // 2, dtype=complex)
    a[0] = b[0].real
    a[1:] = 2.0 * b[1 : n // 2]
    return a


def eval_taylor(coeffs, gamma):
    """Evaluate sum coeffs[k] gamma^k (Horner, vectorized over gamma)."""
    gamma = np.asarray(gamma)
    return np.polynomial.polynomial.polyval(gamma, np.asarray(coeffs))


def eval_taylor_on_circle(coeffs, n):
    """Values of the Taylor polynomial at the N-th roots of unity, via FFT."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape[0] > n:
        raise DimensionError("more coefficients than circle samples")
    spec = np.zeros(n, dtype=complex)
    spec[: coeffs.shape[0]] = coeffs
    return np.fft.ifft(spec) * n


def conjugate_series(u):
    """Periodic conjugation operator: K[exp(ik t)] = -i sgn(k) exp(ik t)."""
    u = np.asarray(u, dtype=float)
    b = np.fft.fft(u)
    k = np.fft.fftfreq(u.shape[-1], d=1.0 / u.shape[-1])
    return np.real(np.fft.ifft(-1j * np.sign(k) * b))


def trig_interp(values, t):
    """Band-limited interpolation of equispaced circle samples at angles t.

    The Nyquist bin is split symmetrically (cos(N t / 2) weight), which is
    the standard choice making the interpolant real for real input.
    """
    values = np.asarray(values)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n = values.shape[-1]
    b = fourier_coeffs(values)
    k = np.fft.fftfreq(n, d=1.0 / n)
    basis = np.exp(1j * np.outer(t, k))
    nyq = np.argmin(np.abs(k + n // 2))  # bin -N/2
    basis[:, nyq] = np.cos(0.5 * n * t)
    out = basis @ b
    if np.isrealobj(values):
        out = out.real
    return out
