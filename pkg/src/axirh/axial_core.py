"""Paravector geometry and axial fields A + omega*B on the (x0, r) half-plane.

An axially symmetric function on R^{n+1} is determined by two real fields
A(x0, r), B(x0, r) with r = |underline-x| > 0.  Monogenicity is equivalent
to the coupled first-order system

    d(A)/dx0 - d(B)/dr = (n-1) B / r,      d(B)/dx0 + d(A)/dr = 0,

whose finite-difference residual is the certificate used throughout the
test suite.  The axis r = 0 is excluded from every grid: the coefficient
(n-1)/r is singular there.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from ._grid import plane_gradients
from .errors import (
    DimensionError,
    DomainError,
    ExtrapolationError,
    SingularityError,
)

_VECTOR_TOL = 1e-12


# ---------------------------------------------------------------------------
# paravectors and axial values


class Paravector:
    """Element x0 + sum_j x_j e_j of R + R^n."""

    __slots__ = ("x0", "xvec")

    def __init__(self, x0, xvec):
        self.x0 = float(x0)
        self.xvec = np.asarray(xvec, dtype=float)
        if self.xvec.ndim != 1 or self.xvec.size < 1:
            raise DimensionError("vector part must be a 1-d array with n >= 1")

    @property
    def n(self):
        return self.xvec.size

    def norm(self):
        return float(np.sqrt(self.x0 ** 2 + np.dot(self.xvec, self.xvec)))

    def conjugate(self):
        return Paravector(self.x0, -self.xvec)

    def inverse(self):
        nrm2 = self.x0 ** 2 + np.dot(self.xvec, self.xvec)
        if nrm2 == 0.0:
            raise SingularityError("zero paravector has no inverse")
        return Paravector(self.x0 / nrm2, -self.xvec / nrm2)

    def mul(self, other):
        """Product x*y, defined when the vector parts are parallel.

        The general paravector product leaves the span of {1, e_1..e_n}
        through a bivector term x ^ y; the pipeline only ever multiplies
        values sharing one radial direction, for which that term vanishes.
        """
        nu2 = np.dot(self.xvec, self.xvec)
        nv2 = np.dot(other.xvec, other.xvec)
        cross2 = nu2 * nv2 - np.dot(self.xvec, other.xvec) ** 2
        if cross2 > _VECTOR_TOL * max(nu2 * nv2, 1e-300):
            raise DomainError("paravector product with non-parallel vector parts")
        scalar = self.x0 * other.x0 - np.dot(self.xvec, other.xvec)
        vec = self.x0 * other.xvec + other.x0 * self.xvec
        return Paravector(scalar, vec)

    def components(self):
        return np.concatenate(([self.x0], self.xvec))

    def __repr__(self):
        return f"Paravector(x0={self.x0!r}, xvec={self.xvec!r})"


@dataclass(frozen=True)
class AxialPoint:
    """Point of R^{n+1} in axial coordinates (x0, r) with optional direction."""

    x0: float
    r: float
    omega: np.ndarray | None = None

    def __post_init__(self):
        if self.r < 0:
            raise DomainError(f"radial coordinate must be >= 0, got {self.r}")
        if self.omega is not None:
            om = np.asarray(self.omega, dtype=float)
            if abs(np.dot(om, om) - 1.0) > 1e-10:
                raise DomainError("omega must be a unit vector")
            object.__setattr__(self, "omega", om)

    def embed(self):
        if self.omega is None:
            raise DomainError("embedding requires an omega direction")
        return Paravector(self.x0, self.r * self.omega)


@dataclass(frozen=True)
class AxialValue:
    """Value a + omega*b in the span{1, omega} subalgebra (omega^2 = -1)."""

    a: float
    b: float

    def __mul__(self, other):
        return AxialValue(self.a * other.a - self.b * other.b,
                          self.a * other.b + self.b * other.a)

    def re(self):
        return self.a

    def as_complex(self):
        return complex(self.a, self.b)


AXIAL_ONE = AxialValue(1.0, 0.0)


# ---------------------------------------------------------------------------
# structured grids in the (x0, r) half-plane


class StructuredGrid:
    """Structured lattice of (x0, r) nodes; rectangular or conformally mapped.

    `x0` and `r` are (P, Q) coordinate arrays.  A mapped polar lattice wraps
    around in its angular index, flagged by `periodic_axis=0`.
    """

    def __init__(self, x0, r, periodic_axis=None, kind="rect", cmap=None,
                 gamma=None):
        self.x0 = np.asarray(x0, dtype=float)
        self.r = np.asarray(r, dtype=float)
        if self.x0.shape != self.r.shape or self.x0.ndim != 2:
            raise DimensionError("grid coordinate arrays must be 2-d and congruent")
        self.periodic_axis = periodic_axis
        self.kind = kind
        self.cmap = cmap
        self.gamma = gamma

    @classmethod
    def rectangular(cls, x0_vals, r_vals):
        x0v = np.asarray(x0_vals, dtype=float)
        rv = np.asarray(r_vals, dtype=float)
        x0, r = np.meshgrid(x0v, rv, indexing="ij")
        return cls(x0, r, kind="rect")

    @property
    def shape(self):
        return self.x0.shape

    def z(self):
        return self.x0 + 1j * self.r

    def gradients(self, u):
        return plane_gradients(self.x0, self.r, u,
                               periodic_axis=self.periodic_axis)


@dataclass
class AxialField:
    """Samples of an axial function phi = A + omega*B over a structured grid."""

    grid: StructuredGrid
    A: np.ndarray
    B: np.ndarray
    n: int

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.B = np.asarray(self.B, dtype=float)
        if self.A.shape != self.grid.shape or self.B.shape != self.grid.shape:
            raise DimensionError("A, B must be congruent with the grid")
        if self.n < 1:
            raise DimensionError(f"dimension parameter n must be >= 1, got {self.n}")

    def w(self):
        return self.A + 1j * self.B

    field = property(lambda self: self)  # convenience alias


def _validate_field_grid(fld):
    p, q = fld.grid.shape
    if p < 3 or q < 3:
        raise DimensionError(f"degenerate grid {p}x{q}: need >= 3 points per axis")
    if np.min(fld.grid.r) <= 0.0:
        raise DomainError("grid touches or crosses the axis r <= 0")


# ---------------------------------------------------------------------------
# residuals


def vesy_residual(fld):
    """Residual pair of the axial first-order system.

    Returns (res1, res2) with
        res1 = dA/dx0 - dB/dr - (n-1) B / r,
        res2 = dB/dx0 + dA/dr,
    evaluated with second-order differences (one-sided at open edges).
    Both vanish identically iff the sampled field is monogenic.
    """
    _validate_field_grid(fld)
    a_x0, a_r = fld.grid.gradients(fld.A)
    b_x0, b_r = fld.grid.gradients(fld.B)
    res1 = a_x0 - b_r - (fld.n - 1) * fld.B / fld.grid.r
    res2 = b_x0 + a_r
    return res1, res2


def planar_residual(fld):
    """Residual of the equivalent planar equation for w = A + iB.

    Computes dw/dz-bar + (n-1)i/(4r) (w - conj(w)) with the same difference
    stencils as `vesy_residual`; the two notions are algebraically locked:
    the planar residual equals (res1 + i*res2)/2 pointwise.
    """
    _validate_field_grid(fld)
    w = fld.w()
    wx, wy = fld.grid.gradients(w)
    coef = (fld.n - 1) * 1j / (4.0 * fld.grid.r)
    return 0.5 * (wx + 1j * wy) + coef * (w - np.conj(w))


# ---------------------------------------------------------------------------
# reference function and field constructors


def cauchy_kernel(x, n):
    """Fundamental-solution values conj(x)/|x|^(n+1) in axial coordinates.

    Returns the AxialValue (x0, -r) / rho^(n+1) with rho = sqrt(x0^2 + r^2).
    Used as the stock exactly-monogenic reference; left unnormalized since
    only its monogenicity is exercised.
    """
    rho2 = x.x0 ** 2 + x.r ** 2
    if rho2 == 0.0:
        raise SingularityError("kernel evaluated at the origin")
    scale = rho2 ** (0.5 * (n + 1))
    return AxialValue(x.x0 / scale, -x.r / scale)


def cauchy_kernel_field(grid, n):
    """Sample the kernel on a whole grid, returning an AxialField."""
    rho2 = grid.x0 ** 2 + grid.r ** 2
    if np.min(rho2) == 0.0:
        raise SingularityError("kernel grid contains the origin")
    scale = rho2 ** (0.5 * (n + 1))
    return AxialField(grid, grid.x0 / scale, -grid.r / scale, n)


def reconstruct_axial(w, grid, n):
    """Axial field with A = Re(w), B = Im(w) on the given grid."""
    w = np.asarray(w)
    if w.shape != grid.shape:
        raise DimensionError("w samples must be congruent with the grid")
    if np.min(grid.r) <= 0.0:
        raise DomainError("grid touches or crosses the axis r <= 0")
    return AxialField(grid, np.real(w), np.imag(w), n)


def eval_axial(fld, point):
    """Interpolate the field at an axial point and embed it in R^{n+1}.

    Bilinear interpolation on rectangular grids; mapped grids interpolate in
    the pulled-back polar index coordinates through the attached map.
    """
    if point.omega is None:
        raise DomainError("evaluation point needs an omega direction")
    if len(point.omega) != fld.n:
        raise DimensionError("omega dimension does not match the field")
    grid = fld.grid
    if grid.kind == "rect":
        x0v, rv = grid.x0[:, 0], grid.r[0, :]
        if not (x0v[0] <= point.x0 <= x0v[-1] and rv[0] <= point.r <= rv[-1]):
            raise ExtrapolationError(f"point ({point.x0}, {point.r}) outside grid")
        fi = np.interp(point.x0, x0v, np.arange(x0v.size))
        fj = np.interp(point.r, rv, np.arange(rv.size))
    elif grid.kind == "mapped" and grid.cmap is not None:
        gam = grid.cmap.inverse(np.array([point.x0 + 1j * point.r]))[0]
        s_nodes = np.abs(grid.gamma[0, :])
        s, beta = abs(gam), np.angle(gam) % (2 * np.pi)
        if s > s_nodes[-1] + 1e-12 or s < s_nodes[0] - 1e-12:
            raise ExtrapolationError("point outside the mapped grid's radial band")
        k = grid.shape[0]
        fi = (beta / (2 * np.pi)) * k
        fj = np.interp(s, s_nodes, np.arange(s_nodes.size))
    else:
        raise DomainError("grid kind does not support interpolation")

    def _bilinear(v):
        p, q = v.shape
        i0 = int(np.floor(fi)) % p if grid.kind == "mapped" else min(int(np.floor(fi)), p - 2)
        j0 = min(int(np.floor(fj)), q - 2)
        ti, tj = fi - np.floor(fi), fj - j0
        i1 = (i0 + 1) % p if grid.kind == "mapped" else i0 + 1
        return ((1 - ti) * (1 - tj) * v[i0, j0] + ti * (1 - tj) * v[i1, j0]
                + (1 - ti) * tj * v[i0, j0 + 1] + ti * tj * v[i1, j0 + 1])

    a, b = _bilinear(fld.A), _bilinear(fld.B)
    return Paravector(a, b * point.omega)


# ---------------------------------------------------------------------------
# field exchange format: CSV rows `x0,r,A,B` plus a JSON sidecar


def sidecar_path(csv_path):
    return str(csv_path) + ".meta.json"


def write_field_csv(fld, csv_path, extra_meta=None):
    """Write the field as `x0,r,A,B` rows (row-major) plus a metadata sidecar."""
    grid = fld.grid
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x0", "r", "A", "B"])
        cols = [grid.x0.ravel(), grid.r.ravel(), fld.A.ravel(), fld.B.ravel()]
        for row in zip(*cols):
            writer.writerow([f"{v:.17g}" for v in row])
    meta = {
        "n": int(fld.n),
        "shape": list(grid.shape),
        "kind": grid.kind,
        "periodic_axis": grid.periodic_axis,
        "extents": {
            "x0": [float(np.min(grid.x0)), float(np.max(grid.x0))],
            "r": [float(np.min(grid.r)), float(np.max(grid.r))],
        },
    }
    if extra_meta:
        meta.update(extra_meta)
    with open(sidecar_path(csv_path), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_field_csv(csv_path):
    """Load a field CSV plus sidecar; returns (AxialField, metadata dict)."""
    with open(sidecar_path(csv_path)) as fh:
        meta = json.load(fh)
    data = np.genfromtxt(csv_path, delimiter=",", names=True)
    shape = tuple(meta["shape"])
    grid = StructuredGrid(
        data["x0"].reshape(shape), data["r"].reshape(shape),
        periodic_axis=meta.get("periodic_axis"), kind=meta.get("kind", "rect"))
    fld = AxialField(grid, data["A"].reshape(shape), data["B"].reshape(shape),
                     int(meta["n"]))
    return fld, meta
