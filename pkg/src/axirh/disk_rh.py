"""The classical Riemann-Hilbert problem Re{lambda0 * Psi} = g on the unit disk.

Pipeline: the coefficient's winding determines the integer index m; the
single-valued phase branch q(theta) = unwrap(arg lambda0) + m*theta feeds a
Schwarz-integral completion chi = i*S[q] (analytic, Im chi = q on the
boundary), which reduces the problem to Re{gamma^{-m} e^{chi} Psi} = g1
with g1 = g e^p / |lambda0|.  For m >= 0 the general solution carries a
(2m+1)-real-parameter polynomial family; for m < 0 the first -m Fourier
moments of g1 must vanish.

The moment count is a deliberate departure from a common typo: the
condition list k = 0..-m+1 sometimes quoted for this problem overcounts by
two; the coefficient e^{i theta} with datum cos(theta) has the exact
solution Psi = 1 yet violates the k = 1 moment.  The correct range
k = 0..-m-1 is the default; the literal range stays available as
moment_range="paper" for comparison experiments.
"""

from dataclasses import dataclass, field

import numpy as np

from ._fourier import (
    analytic_completion_coeffs,
    check_bandlimit,
    circle_angles,
    eval_taylor,
    eval_taylor_on_circle,
    fourier_coeffs,
)
from .config import SolverConfig
from .errors import (
    DegenerateCoefficientError,
    DimensionError,
    UndersampledError,
)


@dataclass(frozen=True)
class CircleData:
    """Samples at the equispaced angles theta_j = 2*pi*j/N."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1:
            raise DimensionError("circle data must be a 1-d sample array")
        if v.size < 16 or v.size % 2:
            raise DimensionError(f"need an even sample count >= 16, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise DimensionError("circle data contains non-finite samples")
        object.__setattr__(self, "values", v)

    @property
    def N(self):
        return self.values.size

    def theta(self):
        return circle_angles(self.N)

    @classmethod
    def from_function(cls, fn, n):
        return cls(fn(circle_angles(n)))

    @classmethod
    def from_fourier(cls, coeff_map, n, real=False):
        """Synthesize samples from a {wavenumber: coefficient} mapping."""
        theta = circle_angles(n)
        vals = np.zeros(n, dtype=complex)
        for k, c in coeff_map.items():
            vals += complex(c) * np.exp(1j * int(k) * theta)
        if real:
            if np.max(np.abs(vals.imag)) > 1e-12 * max(1.0, np.max(np.abs(vals))):
                raise DimensionError("fourier coefficients do not describe real data")
            vals = vals.real
        return cls(vals)


def _as_values(data):
    return data.values if isinstance(data, CircleData) else np.asarray(data)


@dataclass
class DiskRHFactorization:
    """Index m plus the analytic factor chi = p + i q of the coefficient."""

    m: int
    q: np.ndarray            # single-valued phase branch on the boundary
    chi_coeffs: np.ndarray   # Taylor coefficients of chi
    p: np.ndarray            # Re chi on the boundary
    reconstruction_error: float


@dataclass
class DiskRHSolution:
    """Boundary samples and Taylor coefficients of the solved Psi."""

    psi_boundary: np.ndarray
    psi_coeffs: np.ndarray
    m: int
    free_constants: list
    moments: np.ndarray
    solvable: bool
    bc_residual: float
    factorization: DiskRHFactorization = None

    def eval_interior(self, gamma):
        return eval_taylor(self.psi_coeffs, gamma)


# ---------------------------------------------------------------------------


def _argument_increments(values, eps_coef):
    v = np.asarray(values, dtype=complex)
    mags = np.abs(v)
    scale = np.max(mags)
    if scale == 0.0 or np.min(mags) < eps_coef * scale:
        raise DegenerateCoefficientError(
            f"coefficient modulus drops to {np.min(mags):.3e} "
            f"(floor {eps_coef:g} relative)")
    inc = np.angle(np.roll(v, -1) / v)
    if np.max(np.abs(inc)) >= np.pi / 2:
        raise UndersampledError(
            "arg increment >= pi/2 between adjacent samples; refusing to "
            "guess the winding - increase the sample count")
    return inc


def winding_index(lambda0, eps_coef=1e-8):
    """Index m = -(winding number of lambda0 about 0).

    Sums principal-branch argument increments around the closed sample
    loop; exact whenever each increment stays below pi, which the pi/2
    adequacy guard enforces with margin.
    """
    inc = _argument_increments(_as_values(lambda0), eps_coef)
    total = np.sum(inc)
    wind = int(np.rint(total / (2 * np.pi)))
    if abs(total - 2 * np.pi * wind) > 1e-6:
        raise UndersampledError("argument increments do not close to 2*pi*k")
    return -wind


def schwarz_operator(u, alias_tol=1e-6):
    """Taylor coefficients of the holomorphic S[u] with Re S[u] = u on |z|=1.

    Fourier route: u = sum b_k e^{ik theta} gives a_0 = b_0, a_k = 2 b_k.
    The imaginary part at the origin is pinned to zero, matching the
    Schwarz-integral normalization.
    """
    return analytic_completion_coeffs(_as_values(u), alias_tol=alias_tol)


def factorize(lambda0, config=None):
    """Index + Schwarz factorization of a nonvanishing boundary coefficient."""
    config = config or SolverConfig()
    vals = np.asarray(_as_values(lambda0), dtype=complex)
    n = vals.size
    theta = circle_angles(n)
    inc = _argument_increments(vals, config.eps_coef)
    m = -int(np.rint(np.sum(inc) / (2 * np.pi)))
    q = np.empty(n)
    q[0] = np.angle(vals[0])
    q[1:] = q[0] + np.cumsum(inc[:-1])
    q += m * theta
    # q closes across the wrap exactly by the construction of m
    chi_coeffs = 1j * analytic_completion_coeffs(q, alias_tol=None)
    chi_boundary = eval_taylor_on_circle(chi_coeffs, n)
    p = chi_boundary.real
    recon = np.abs(vals) * np.exp(1j * (q - m * theta))
    err = float(np.max(np.abs(recon - vals))) / max(np.max(np.abs(vals)), 1e-300)
    return DiskRHFactorization(m=m, q=q, chi_coeffs=chi_coeffs, p=p,
                               reconstruction_error=err)


def solve_disk_rh(lambda0, g, config=None, policy=None):
    """Solve Re{lambda0(theta) Psi(e^{i theta})} = g(theta) on the unit disk.

    Returns a DiskRHSolution.  For index m < 0 an infeasible moment vector
    yields solvable=False with the offending moments attached rather than
    an exception; everything else about the call succeeds normally.
    """
    config = config or SolverConfig()
    policy = policy or config.constant_policy
    lam = np.asarray(_as_values(lambda0), dtype=complex)
    gv = np.asarray(_as_values(g), dtype=float)
    if lam.size != gv.size:
        raise DimensionError("coefficient and datum sample counts differ")
    n = lam.size
    theta = circle_angles(n)
    fact = factorize(lambda0, config)
    m = fact.m
    scale = max(float(np.max(np.abs(gv))), 1e-30)

    g1 = gv * np.exp(fact.p) / np.abs(lam)
    check_bandlimit(g1, config.alias_tol, what="reduced datum g1")
    s_coeffs = analytic_completion_coeffs(g1)
    chi_b = eval_taylor_on_circle(fact.chi_coeffs, n)
    emchi = np.exp(-chi_b)

    if m >= 0:
        consts = _free_constants(m, policy, s_coeffs, fact)
        poly = np.zeros(max(2 * m + 1, 1), dtype=complex)
        for k, c in enumerate(consts):
            poly[k] = c
        psi_b = (np.exp(1j * m * theta) * emchi * eval_taylor_on_circle(s_coeffs, n)
                 + emchi * eval_taylor_on_circle(poly, n))
        shifted = np.concatenate([np.zeros(m, dtype=complex), s_coeffs])
        psi_coeffs = _product_coeffs(shifted + _padded(poly, shifted.size),
                                     -fact.chi_coeffs, n)
        moments = np.array([], dtype=complex)
        solvable = True
    else:
        n_cond = -m - 1 if config.moment_range == "classical" else -m + 1
        b = fourier_coeffs(g1)
        moments = b[: n_cond + 1].copy()
        solvable = bool(np.all(np.abs(moments) <= config.tol_moment * scale))
        if not solvable:
            return DiskRHSolution(
                psi_boundary=np.zeros(n, dtype=complex),
                psi_coeffs=np.zeros(1, dtype=complex),
                m=m, free_constants=[], moments=moments, solvable=False,
                bc_residual=float("inf"), factorization=fact)
        # divide the Taylor series of S[g1] by gamma^{-m}: the leading
        # coefficients vanish (up to the moment tolerance), so the shift
        # is exact after zeroing them
        trunc = s_coeffs.copy()
        trunc[: -m] = 0.0
        shifted = trunc[-m:]
        psi_b = emchi * eval_taylor_on_circle(shifted, n)
        psi_coeffs = _product_coeffs(shifted, -fact.chi_coeffs, n)
        consts = []

    bc_res = float(np.max(np.abs(np.real(lam * psi_b) - gv))) / scale
    return DiskRHSolution(psi_boundary=psi_b, psi_coeffs=psi_coeffs, m=m,
                          free_constants=list(consts), moments=moments,
                          solvable=solvable, bc_residual=bc_res,
                          factorization=fact)


def homogeneous_basis(fact, n_samples=None, config=None):
    """Real basis of the homogeneous solutions for an index-m factorization.

    For m >= 0 returns the 2m+1 boundary-sampled functions
    e^{-chi} * pi_l(gamma) with pi_l spanning the constrained polynomial
    family c_{2m-k} = -conj(c_k); for m < 0 the list is empty.
    """
    config = config or SolverConfig()
    m = fact.m
    if m < 0:
        return []
    n = n_samples or fact.q.size
    theta = circle_angles(n)
    tau = np.exp(1j * theta)
    emchi = np.exp(-eval_taylor_on_circle(_padded(fact.chi_coeffs, n // 2), n))
    basis = []
    for k in range(m):
        basis.append(tau ** k - tau ** (2 * m - k))          # c_k = 1
        basis.append(1j * (tau ** k + tau ** (2 * m - k)))   # c_k = i
    basis.append(1j * tau ** m)                              # c_m = i
    return [emchi * h for h in basis]


# ---------------------------------------------------------------------------


def _padded(coeffs, size):
    out = np.zeros(size, dtype=complex)
    out[: min(len(coeffs), size)] = coeffs[:size]
    return out


def _product_coeffs(a_coeffs, chi_neg_coeffs, n):
    """Taylor coefficients of (sum a_k gamma^k) * exp(sum chi_neg_k gamma^k).

    Both factors are analytic, so the product's coefficients are read off a
    circle FFT with no negative-frequency leakage beyond roundoff.
    """
    vals = (eval_taylor_on_circle(_padded(a_coeffs, n), n)
            * np.exp(eval_taylor_on_circle(_padded(chi_neg_coeffs, n), n)))
    spec = np.fft.fft(vals) / n
    return spec[: n // 2]


def _free_constants(m, policy, s_coeffs, fact):
    """Constants c_0..c_{2m} satisfying c_{2m-k} = -conj(c_k)."""
    consts = np.zeros(2 * m + 1, dtype=complex)
    if policy == "zero":
        return consts
    if policy == "imag_zero_at_center":
        # adjust the one unconstrained imaginary direction so that
        # Im Psi(0) = 0; for m > 0 the particular part vanishes at 0
        echi0 = np.exp(-fact.chi_coeffs[0])
        psi0 = echi0 * (s_coeffs[0] if m == 0 else 0.0)
        denom = np.imag(1j * echi0)
        if abs(denom) > 1e-14:
            t = -np.imag(psi0) / denom
            consts[m] += 1j * t
            if m > 0:
                consts[m] = 1j * np.imag(consts[m])  # keep Re c_m = 0
        return consts
    raise DimensionError(f"unknown free-constant policy {policy!r}")
