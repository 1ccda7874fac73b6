"""Projected planar domains D in the upper half-plane and unit-disk maps.

Three concrete map sources cover the supported geometry: exact affine maps
for circular domains, user-supplied polynomial maps with sampling-certified
injectivity, and a Theodorsen boundary-correspondence construction for
star-shaped Jordan domains.  All quadrature lives on a tensor grid in the
disk (trapezoid in angle, Gauss-Legendre in radius) transplanted by |phi'|^2.
"""

from dataclasses import dataclass, field

import numpy as np

from ._fourier import (
    analytic_completion_coeffs,
    circle_angles,
    conjugate_series,
    eval_taylor,
    trig_interp,
)
from .config import SolverConfig
from .errors import (
    ConfigError,
    DomainError,
    DimensionError,
    InvalidMapError,
    InversionError,
    MapConsistencyError,
    MapConvergenceError,
    UnsupportedDomainError,
)

_DEFAULT_BOUNDARY_N = 256


# ---------------------------------------------------------------------------
# Jordan domains


class JordanDomain:
    """Closed boundary curve in the upper half-plane, positively oriented.

    `boundary` holds N complex samples at equispaced parameter values,
    treated cyclically.  `min_im` certifies the clearance from the real
    axis (the r = 0 singular line of the axial coefficient).
    """

    def __init__(self, boundary, delta_axis=1e-9, check_simple=True):
        b = np.asarray(boundary, dtype=complex)
        if b.ndim != 1 or b.size < 16:
            raise DimensionError("boundary needs >= 16 samples")
        self.boundary = b
        self.min_im = float(np.min(b.imag))
        if self.min_im <= delta_axis:
            raise DomainError(
                f"boundary reaches Im z = {self.min_im:g}; domains must stay "
                f"above the axis by more than {delta_axis:g}")
        if self.signed_area() <= 0:
            raise DomainError("boundary must be positively oriented (CCW)")
        if check_simple and self._self_intersects():
            raise DomainError("boundary polygon self-intersects")

    @property
    def N(self):
        return self.boundary.size

    def signed_area(self):
        z = self.boundary
        zn = np.roll(z, -1)
        return 0.5 * float(np.sum(z.real * zn.imag - zn.real * z.imag))

    def _self_intersects(self):
        # discrete check on the sample polygon; adjacent segments share an
        # endpoint and are skipped
        z = self.boundary
        n = z.size
        idx = np.arange(n)
        a, b = z, np.roll(z, -1)

        def cross(o, u, v):
            return ((u.real - o.real) * (v.imag - o.imag)
                    - (u.imag - o.imag) * (v.real - o.real))

        ai, bi = a[:, None], b[:, None]
        aj, bj = a[None, :], b[None, :]
        d1 = cross(ai, bi, aj)
        d2 = cross(ai, bi, bj)
        d3 = cross(aj, bj, ai)
        d4 = cross(aj, bj, bi)
        proper = (d1 * d2 < 0) & (d3 * d4 < 0)
        gap = (idx[:, None] - idx[None, :]) % n
        nonadjacent = (gap > 1) & (gap < n - 1)
        return bool(np.any(proper & nonadjacent))


# ---------------------------------------------------------------------------
# conformal maps


@dataclass
class ConformalMap:
    """Evaluators for z = fwd(gamma), gamma = inverse(z), and fwd'(gamma).

    `boundary_param(theta)` converts a disk angle into the parameter of the
    domain's boundary sampling (identity unless a boundary correspondence
    was computed numerically, as for Theodorsen maps).
    """

    forward: object
    inverse: object
    derivative: object
    kind: str
    tol: float
    boundary_param: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.boundary_param is None:
            self.boundary_param = lambda theta: np.asarray(theta, dtype=float)

    def check(self, n_theta=128, radii=(0.2, 0.5, 0.8, 1.0), boundary=None):
        """Round-trip, boundary-tracing and derivative diagnostics."""
        theta = circle_angles(n_theta)
        roundtrip = 0.0
        dmin = np.inf
        for s in radii:
            gam = s * np.exp(1j * theta)
            z = self.forward(gam)
            roundtrip = max(roundtrip, float(np.max(np.abs(self.inverse(z) - gam))))
            dmin = min(dmin, float(np.min(np.abs(self.derivative(gam)))))
        report = {"roundtrip": roundtrip, "min_abs_derivative": dmin}
        if boundary is not None:
            t = self.boundary_param(theta)
            target = trig_interp(boundary.boundary, t)
            image = self.forward(np.exp(1j * theta))
            report["boundary_error"] = float(np.max(np.abs(image - target)))
        return report


def _newton_inverse(fwd, dfwd, seeds_of, tol, max_iter=60):
    def inv(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        gam = seeds_of(z)
        scale = max(1.0, float(np.max(np.abs(z))))
        for _ in range(max_iter):
            f = fwd(gam) - z
            done = np.abs(f) <= tol * scale
            if np.all(done):
                break
            step = f / dfwd(gam)
            gam = gam - np.where(done, 0.0, step)
            # keep iterates in the closed disk; targets live in cl(D)
            mag = np.abs(gam)
            gam = np.where(mag > 1.0, gam / mag, gam)
        else:
            bad = z[np.abs(fwd(gam) - z) > tol * scale]
            raise InversionError(f"map inversion stalled at z = {bad[:3]}")
        return gam

    return inv


def affine_disk_map(center, radius, delta_axis=1e-9, tol=1e-10):
    """Exact map gamma -> center + radius*gamma for a circular domain."""
    center = complex(center)
    radius = float(radius)
    if radius <= 0:
        raise DomainError("radius must be positive")
    if center.imag - radius < delta_axis:
        raise DomainError(
            f"disk at {center} with radius {radius} touches the real axis")
    return ConformalMap(
        forward=lambda g: center + radius * np.asarray(g, dtype=complex),
        inverse=lambda z: (np.asarray(z, dtype=complex) - center) / radius,
        derivative=lambda g: np.full_like(np.asarray(g, dtype=complex), radius),
        kind="affine", tol=tol, meta={"center": center, "radius": radius})


def _poly_winding(values):
    inc = np.angle(np.roll(values, -1) / values)
    return int(np.rint(np.sum(inc) / (2 * np.pi)))


def supplied_map(coeffs, delta_axis=1e-9, tol=1e-10, n_check=512):
    """Polynomial map phi(gamma) = sum coeffs[k] gamma^k, injectivity-checked.

    Acceptance uses the argument principle: phi' must have no zeros in the
    closed disk (winding of phi' over |gamma|=1 equals 0) and the boundary
    image must wind exactly once around the image of the origin.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.size < 2:
        raise InvalidMapError("need at least a degree-1 map")
    dcoeffs = coeffs[1:] * np.arange(1, coeffs.size)
    theta = circle_angles(n_check)
    tau = np.exp(1j * theta)
    dvals = eval_taylor(dcoeffs, tau)
    if np.min(np.abs(dvals)) < 1e-12:
        raise InvalidMapError("phi' vanishes on the unit circle")
    if _poly_winding(dvals) != 0:
        raise InvalidMapError("phi' has zeros inside the disk (not injective)")
    bvals = eval_taylor(coeffs, tau)
    if _poly_winding(bvals - eval_taylor(coeffs, 0.0)) != 1:
        raise InvalidMapError("boundary winding != 1 (not injective)")
    if np.min(bvals.imag) < delta_axis:
        raise DomainError("mapped boundary reaches the real axis")

    fwd = lambda g: eval_taylor(coeffs, np.asarray(g, dtype=complex))
    dfwd = lambda g: eval_taylor(dcoeffs, np.asarray(g, dtype=complex))
    seed_r = np.concatenate([[0.0], np.linspace(0.15, 1.0, 8)])
    seed_g = (seed_r[:, None] * tau[None, ::8]).ravel()
    seed_z = fwd(seed_g)

    def seeds_of(z):
        return seed_g[np.argmin(np.abs(seed_z[None, :] - z[:, None]), axis=1)]

    return ConformalMap(forward=fwd, inverse=_newton_inverse(fwd, dfwd, seeds_of, tol),
                        derivative=dfwd, kind="supplied-analytic", tol=tol,
                        meta={"coeffs": coeffs})


def star_domain(center, radius_samples, delta_axis=1e-9):
    """JordanDomain from polar radius samples about a star center."""
    rho = np.asarray(radius_samples, dtype=float)
    if np.min(rho) <= 0:
        raise UnsupportedDomainError("radius samples must be positive")
    sigma = circle_angles(rho.size)
    return JordanDomain(complex(center) + rho * np.exp(1j * sigma),
                        delta_axis=delta_axis)


def theodorsen_map(domain, center, tol=1e-8, max_iter=200):
    """Numerical disk map for a domain star-shaped about `center`.

    Runs the classical fixed point for the boundary correspondence
    sigma(theta) = theta + K[log rho(sigma)], with K the circle conjugation
    operator, then evaluates the map through the analytic completion of
    log rho.  Requires the radius function to satisfy the usual contraction
    condition |d log rho / d sigma| < 1.
    """
    center = complex(center)
    rel = domain.boundary - center
    rho_s = np.abs(rel)
    sig_s = np.unwrap(np.angle(rel))
    n = rel.size
    theta = circle_angles(n)
    if np.any(np.diff(sig_s) <= 0):
        raise UnsupportedDomainError(
            "boundary is not star-shaped about the given center")
    if np.max(np.abs(sig_s - sig_s[0] - theta)) > 1e-9:
        raise UnsupportedDomainError(
            "star boundary must be sampled at equispaced polar angles")
    sig0 = sig_s[0]
    logrho_samples = np.log(rho_s)

    def logrho(sig):
        return trig_interp(logrho_samples, sig - sig0)

    slope = np.max(np.abs(np.gradient(logrho_samples, theta)))
    sigma = theta.copy()
    for it in range(max_iter):
        upd = theta + conjugate_series(logrho(sigma))
        delta = float(np.max(np.abs(upd - sigma)))
        sigma = upd
        if delta <= tol:
            break
    else:
        raise MapConvergenceError(
            f"boundary correspondence stalled (last update {delta:.2e}, "
            f"contraction estimate {slope:.2f})")

    u = logrho(sigma)
    lam_coeffs = analytic_completion_coeffs(u)
    dlam_coeffs = lam_coeffs[1:] * np.arange(1, lam_coeffs.size)

    def fwd(g):
        g = np.asarray(g, dtype=complex)
        return center + g * np.exp(eval_taylor(lam_coeffs, g))

    def dfwd(g):
        g = np.asarray(g, dtype=complex)
        lam = eval_taylor(lam_coeffs, g)
        return np.exp(lam) * (1.0 + g * eval_taylor(dlam_coeffs, g))

    seed_g = (np.linspace(0.0, 1.0, 9)[:, None]
              * np.exp(1j * theta[:: max(1, n // 64)])[None, :]).ravel()
    seed_z = fwd(seed_g)

    def seeds_of(z):
        return seed_g[np.argmin(np.abs(seed_z[None, :] - z[:, None]), axis=1)]

    sigma_dev = sigma - theta  # periodic part of the correspondence

    def boundary_param(th):
        # disk angle -> parameter of the domain's boundary sampling
        th = np.asarray(th, dtype=float)
        return th + trig_interp(sigma_dev, th) - sig0

    return ConformalMap(forward=fwd, inverse=_newton_inverse(fwd, dfwd, seeds_of, tol),
                        derivative=dfwd, kind="theodorsen", tol=tol,
                        boundary_param=boundary_param,
                        meta={"center": center, "iterations": it + 1,
                              "contraction_estimate": float(slope)})


# ---------------------------------------------------------------------------
# transplanted area quadrature


class AreaGrid:
    """Tensor quadrature nodes inside D with weights summing to area(D).

    Structure (K, M): K equispaced angles x M Gauss-Legendre radii on the
    unit disk, pushed forward through the map; weights carry the |phi'|^2
    transplantation factor, so sums against the weights approximate
    integrals dA over D.
    """

    def __init__(self, nodes, weights, gamma, cmap, structure):
        self.nodes = nodes
        self.weights = weights
        self.gamma = gamma
        self.cmap = cmap
        self.K, self.M = structure
        self._spacing = None

    @property
    def shape(self):
        return self.nodes.shape

    def node_spacing(self):
        """Local in-plane lattice scale per node (max of the two directions)."""
        if self._spacing is None:
            z = self.nodes
            rad = np.abs(np.diff(z, axis=1))
            radial = np.maximum(np.pad(rad, ((0, 0), (1, 0)), mode="edge"),
                                np.pad(rad, ((0, 0), (0, 1)), mode="edge"))
            angular = 0.5 * np.abs(np.roll(z, -1, axis=0) - np.roll(z, 1, axis=0))
            self._spacing = np.maximum(radial, angular)
        return self._spacing

    def boundary_points(self, n):
        theta = circle_angles(n)
        return self.cmap.forward(np.exp(1j * theta))


def area_grid(cmap, K, M, min_im=None):
    """Build the K x M transplanted quadrature grid for a mapped disk."""
    if K < 4 or M < 4:
        raise DimensionError("need K, M >= 4 quadrature points")
    x, wl = np.polynomial.legendre.leggauss(M)
    s = 0.5 * (x + 1.0)           # Gauss-Legendre radii on (0, 1)
    ws = 0.5 * wl
    beta = circle_angles(K)
    gamma = np.exp(1j * beta)[:, None] * s[None, :]
    nodes = cmap.forward(gamma)
    dphi = cmap.derivative(gamma)
    weights = (2 * np.pi / K) * (ws * s)[None, :] * np.abs(dphi) ** 2
    if min_im is not None and np.min(nodes.imag) < min_im - 1e-12:
        raise MapConsistencyError(
            "quadrature node below the domain's certified Im bound")
    if np.min(nodes.imag) <= 0:
        raise MapConsistencyError("quadrature node on or below the real axis")
    return AreaGrid(nodes, weights, gamma, cmap, (K, M))


# ---------------------------------------------------------------------------
# JSON domain specifications


def domain_from_spec(spec, boundary_n=_DEFAULT_BOUNDARY_N, config=None):
    """Build (JordanDomain, ConformalMap) from a JSON-style domain spec.

    Supported forms:
      {"type": "disk", "center": [x, y], "radius": r}
      {"type": "poly_map", "coeffs": [[re, im], ...]}
      {"type": "star", "center": [x, y], "radius_samples": [...]}
    """
    config = config or SolverConfig()
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError("domain spec must be an object with a 'type' key")
    kind = spec["type"]
    theta = circle_angles(boundary_n)

    def _complex(v):
        return complex(v[0], v[1])

    if kind == "disk":
        _require_keys(spec, {"type", "center", "radius"})
        cmap = affine_disk_map(_complex(spec["center"]), float(spec["radius"]),
                               delta_axis=config.delta_axis, tol=config.tol_map)
        boundary = cmap.forward(np.exp(1j * theta))
        return JordanDomain(boundary, delta_axis=config.delta_axis,
                            check_simple=False), cmap
    if kind == "poly_map":
        _require_keys(spec, {"type", "coeffs"})
        coeffs = [_complex(c) for c in spec["coeffs"]]
        cmap = supplied_map(coeffs, delta_axis=config.delta_axis,
                            tol=config.tol_map)
        boundary = cmap.forward(np.exp(1j * theta))
        return JordanDomain(boundary, delta_axis=config.delta_axis), cmap
    if kind == "star":
        _require_keys(spec, {"type", "center", "radius_samples"})
        center = _complex(spec["center"])
        domain = star_domain(center, spec["radius_samples"],
                             delta_axis=config.delta_axis)
        cmap = theodorsen_map(domain, center, tol=config.tol_map_theodorsen,
                              max_iter=config.map_max_iter)
        return domain, cmap
    raise ConfigError(f"unknown domain type {kind!r}")


def _require_keys(spec, allowed):
    extra = set(spec) - allowed
    if extra:
        raise ConfigError(f"unknown domain keys: {sorted(extra)}")
    missing = allowed - set(spec)
    if missing:
        raise ConfigError(f"missing domain keys: {sorted(missing)}")
