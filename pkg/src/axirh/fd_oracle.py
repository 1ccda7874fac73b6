"""Independent least-squares finite-difference solver for the planar BVP.

Discretizes d(w)/dz-bar + (n-1)i/(4 eta) (w - conj w) = 0 plus the boundary
condition Re{lambda w} = g directly on a uniform polar lattice in the
mapped disk and solves the stacked real system in the least-squares sense.
Deliberately low-order and sharing no machinery with the similarity
pipeline beyond the domain types: its role is to adjudicate solvability
(consistent systems leave a small residual, infeasible ones do not) and to
cross-check solutions.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ._fourier import circle_angles, trig_interp
from .errors import DimensionError, DomainError, SolverNumericsError


@dataclass
class FDSystem:
    """Sparse real least-squares system for the stacked (Re w, Im w) vector."""

    matrix: object            # scipy sparse, rows >= cols
    rhs: np.ndarray
    nodes: np.ndarray         # (K, M) complex nodes in the plane
    gamma: np.ndarray         # (K, M) disk preimages
    K: int
    M: int
    n_pde_rows: int
    n_bc_rows: int
    n_norm_rows: int
    n_smooth_rows: int = 0

    @property
    def n_unknowns(self):
        return 2 * self.nodes.size

    def unpack(self, x):
        half = self.nodes.size
        return (x[:half] + 1j * x[half:]).reshape(self.nodes.shape)


def _winding(values):
    inc = np.angle(np.roll(values, -1) / values)
    return int(np.rint(np.sum(inc) / (2 * np.pi)))


def _radial_stencil(m, M):
    """Second-order d/ds rows on the uniform radial index (1-based rings)."""
    if 0 < m < M - 1:
        return [(m - 1, -0.5), (m + 1, 0.5)]
    if m == 0:
        return [(0, -1.5), (1, 2.0), (2, -0.5)]
    return [(M - 1, 1.5), (M - 2, -2.0), (M - 3, 0.5)]


def assemble(problem, resolution, normalization="auto", smoothing=0.1,
             config=None):
    """Assemble the finite-difference least-squares system.

    Parameters
    ----------
    problem : PlanarVekuaProblem
    resolution : (K, M)
        Angular and radial counts of the uniform polar lattice; the ring
        s = 1 carries the boundary collocation rows.
    normalization : "auto" | "none" | int
        Number of point-constraint rows pinning the homogeneous family
        ("auto" = max(0, 2m+1) from the coefficient's winding).
    smoothing : float
        Weight of the second-difference stabilization rows.  Centered
        stencils for a first-order operator leave 2h sawtooth modes nearly
        invisible; these rows penalize them at O(1) while contributing only
        an O(h^2) residual for smooth solutions.
    """
    K, M = resolution
    if K < 16 or M < 16:
        raise DimensionError("need resolution >= 16 per direction")
    ds = 1.0 / M
    s = ds * np.arange(1, M + 1)
    beta = circle_angles(K)
    gamma = np.exp(1j * beta)[:, None] * s[None, :]
    cmap = problem.cmap
    nodes = cmap.forward(gamma)
    eta = nodes.imag
    if np.min(eta) <= 0:
        raise DomainError("lattice node on or below the real axis")
    dphi = cmap.derivative(gamma)

    npts = K * M
    idx = np.arange(npts).reshape(K, M)

    rows, cols, vals = [], [], []
    rhs = []
    nrow = 0

    def add(r, c, v):
        rows.append(r)
        cols.append(c)
        vals.append(v)

    def add_complex_row(entries, b):
        """Two real rows for sum_k (a_k w_k + b_k conj(w_k)) = rhs."""
        nonlocal nrow
        for node, a_k, b_k in entries:
            re, im = node, node + npts
            add(nrow, re, a_k.real + b_k.real)
            add(nrow, im, -a_k.imag + b_k.imag)
            add(nrow + 1, re, a_k.imag + b_k.imag)
            add(nrow + 1, im, a_k.real - b_k.real)
        rhs.extend([b.real, b.imag])
        nrow += 2

    # PDE rows at every node: conj(phi') phase folded in so the equation is
    # d/dgamma-bar in disk coordinates:
    #   e^{i beta}/2 (d/ds + i/s d/dbeta) w + conj(phi') c(z) (w - conj w) = 0
    dbeta = 2 * np.pi / K
    for j in range(K):
        phase = 0.5 * np.exp(1j * beta[j])
        for m in range(M):
            node = idx[j, m]
            entries = {}

            def bump(nd, a):
                entries[nd] = entries.get(nd, 0.0) + a

            for mm, wgt in _radial_stencil(m, M):
                bump(idx[j, mm], phase * wgt / ds)
            co = phase * 1j / (s[m] * 2 * dbeta)
            bump(idx[(j + 1) % K, m], co)
            bump(idx[(j - 1) % K, m], -co)
            coef = np.conj(dphi[j, m]) * (problem.n - 1) * 1j / (4.0 * eta[j, m])
            ent = [(nd, a, 0.0 + 0.0j) for nd, a in entries.items()]
            ent.append((node, coef, -coef))
            add_complex_row(ent, 0.0 + 0.0j)
    n_pde = nrow

    # second-difference smoothing rows (both index directions, both parts)
    n_smooth = 0
    if smoothing > 0:
        for j in range(K):
            jm, jp = (j - 1) % K, (j + 1) % K
            for m in range(M):
                for comp in (0, npts):
                    add(nrow, idx[jm, m] + comp, smoothing)
                    add(nrow, idx[j, m] + comp, -2.0 * smoothing)
                    add(nrow, idx[jp, m] + comp, smoothing)
                    rhs.append(0.0)
                    nrow += 1
                if 0 < m < M - 1:
                    for comp in (0, npts):
                        add(nrow, idx[j, m - 1] + comp, smoothing)
                        add(nrow, idx[j, m] + comp, -2.0 * smoothing)
                        add(nrow, idx[j, m + 1] + comp, smoothing)
                        rhs.append(0.0)
                        nrow += 1
        n_smooth = nrow - n_pde

    # boundary rows at the s = 1 ring: lambda_1 Re w - lambda_2 Im w = g
    theta = beta
    t = cmap.boundary_param(theta)
    lam_b = trig_interp(problem.lam.values.astype(complex), t)
    g_b = np.real(trig_interp(problem.g.values.astype(complex), t))
    for j in range(K):
        node = idx[j, M - 1]
        add(nrow, node, lam_b[j].real)
        add(nrow, node + npts, -lam_b[j].imag)
        rhs.append(g_b[j])
        nrow += 1
    n_bc = K

    # normalization point constraints matched to the solver's free-constant
    # count: max(0, 2m+1) rows for coefficient index m
    if normalization == "none":
        n_norm = 0
    elif normalization == "auto":
        n_norm = max(0, 2 * (-_winding(lam_b)) + 1)
    else:
        n_norm = int(normalization)
    pin_nodes = idx[:: max(1, K // max(n_norm, 1)), 0][:n_norm]
    for i in range(n_norm):
        node = pin_nodes[i % pin_nodes.size]
        comp = npts if i % 2 == 0 else 0    # pin Im first, then Re
        add(nrow, int(node) + comp, 1.0)
        rhs.append(0.0)
        nrow += 1

    mat = sp.csr_matrix((vals, (rows, cols)), shape=(nrow, 2 * npts))
    return FDSystem(matrix=mat, rhs=np.array(rhs), nodes=nodes, gamma=gamma,
                    K=K, M=M, n_pde_rows=n_pde, n_bc_rows=n_bc,
                    n_norm_rows=n_norm, n_smooth_rows=n_smooth)


def direct_solve(system, rcond=1e-10):
    """Least-squares solve; returns (w samples, normalized residual).

    The residual is ||A x - b|| / ||b|| (or the absolute norm for zero
    data); values at the feasibility scale signal a consistent problem,
    values far above it an inconsistent one.
    """
    a = system.matrix
    b = system.rhs
    ata = (a.T @ a).tocsc()
    atb = a.T @ b
    reg = rcond * np.mean(ata.diagonal())
    try:
        lu = spla.splu(ata + reg * sp.identity(ata.shape[0], format="csc"))
        x = lu.solve(atb)
    except RuntimeError as exc:
        raise SolverNumericsError(f"sparse factorization failed: {exc}")
    if not np.all(np.isfinite(x)):
        raise SolverNumericsError("least-squares solve produced non-finite values")
    resid = np.linalg.norm(a @ x - b)
    scale = np.linalg.norm(b)
    return system.unpack(x), float(resid / scale if scale > 0 else resid)


def null_direction(system, n_iter=40, seed=7):
    """Smallest-singular-vector estimate of the PDE+BC operator.

    Inverse iteration on the (regularized) normal matrix built without the
    normalization rows; the returned complex field spans the discrete
    homogeneous family when the underlying problem has one.
    """
    keep = system.n_pde_rows + system.n_smooth_rows + system.n_bc_rows
    a = system.matrix[:keep]
    ata = (a.T @ a).tocsc()
    reg = 1e-12 * np.mean(ata.diagonal())
    lu = spla.splu(ata + reg * sp.identity(ata.shape[0], format="csc"))
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(ata.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(n_iter):
        v = lu.solve(v)
        v /= np.linalg.norm(v)
    return system.unpack(v)


def matched_rel_l2(w_ref, w_other, family):
    """Relative L2 distance after matching over the real span of `family`.

    The reference is first shifted to the member of its solution family
    closest to `w_other`; the distance is then relative to that member, so
    the result does not depend on which member either solver happened to
    normalize to.
    """
    d = (w_other - w_ref).ravel()
    if not family:
        return float(np.linalg.norm(d) / np.linalg.norm(w_ref))
    h = np.stack([f.ravel() for f in family], axis=1)
    basis = np.concatenate([h.real, h.imag], axis=0)
    target = np.concatenate([d.real, d.imag])
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    matched = target - basis @ coef
    shifted_ref = w_ref.ravel() + h @ coef
    return float(np.linalg.norm(matched) / np.linalg.norm(shifted_ref))
