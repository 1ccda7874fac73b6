"""Finite differences on structured (possibly curvilinear) grids.

All derivatives are taken with respect to the integer grid index first
(second-order centered stencils inside, one-sided second-order at edges,
periodic wrap where requested) and converted to plane derivatives through
the inverse Jacobian of the node coordinates.  This keeps one code path
for rectangular (x0, r) lattices and conformally mapped polar lattices.
"""

import numpy as np

from .errors import DimensionError, DomainError


def index_derivative(u, axis, periodic=False):
    """d/d(index) along `axis`, unit index spacing, O(h^2) everywhere."""
    u = np.asarray(u)
    if u.shape[axis] < 3:
        raise DimensionError(
            f"need >= 3 samples along axis {axis}, got {u.shape[axis]}")
    out = np.empty(u.shape, dtype=np.result_type(u.dtype, np.float64))
    v = np.moveaxis(u, axis, 0)
    d = np.moveaxis(out, axis, 0)
    if periodic:
        d[:] = (np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)) / 2.0
    else:
        d[1:-1] = (v[2:] - v[:-2]) / 2.0
        d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / 2.0
        d[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / 2.0
    return out


def plane_gradients(x, y, u, periodic_axis=None):
    """Gradient (du/dx, du/dy) of samples `u` on a structured grid.

    Parameters
    ----------
    x, y : (P, Q) arrays
        Node coordinates.  The lattice may be curvilinear; it only needs a
        nonsingular index-to-plane Jacobian.
    u : (P, Q) array, real or complex
        Samples at the nodes.
    periodic_axis : int or None
        Index axis that wraps around (angular axis of a mapped polar grid).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = np.asarray(u)
    if x.shape != y.shape or x.shape != u.shape:
        raise DimensionError("coordinate and sample arrays must be congruent")

    def _d(a, axis):
        return index_derivative(a, axis, periodic=(periodic_axis == axis))

    xa, xb = _d(x, 0), _d(x, 1)
    ya, yb = _d(y, 0), _d(y, 1)
    ua, ub = _d(u, 0), _d(u, 1)
    jac = xa * yb - xb * ya
    scale = np.max(np.abs(jac)) if jac.size else 0.0
    if scale == 0.0 or np.min(np.abs(jac)) < 1e-14 * scale:
        raise DomainError("degenerate grid: index-to-plane Jacobian vanishes")
    ux = (ua * yb - ub * ya) / jac
    uy = (ub * xa - ua * xb) / jac
    return ux, uy


def wirtinger_dzbar(x, y, u, periodic_axis=None):
    """d/dz-bar = (d/dx + i d/dy)/2 of complex samples on a structured grid."""
    ux, uy = plane_gradients(x, y, u, periodic_axis=periodic_axis)
    return 0.5 * (ux + 1j * uy)


def wirtinger_dz(x, y, u, periodic_axis=None):
    """d/dz = (d/dx - i d/dy)/2 of complex samples on a structured grid."""
    ux, uy = plane_gradients(x, y, u, periodic_axis=periodic_axis)
    return 0.5 * (ux - 1j * uy)
