"""Problem objects and theorem-level entry points.

Four solves share one engine: the general boundary problem Re{lambda phi} = g
for axially monogenic phi, its Schwarz special case lambda = 1, and the two
shifted variants for null-solutions of (D - alpha).  The shifted problems
reduce to alpha = 0 through the substitution phi = e^{alpha x0} phi0 with
datum g0 = e^{-alpha x0} g; the code path is literally that reduction, so
the scaling identity holds to the last bit.
"""

from dataclasses import dataclass

import numpy as np

from ._fourier import circle_angles, trig_interp
from .axial_core import AxialField, StructuredGrid, vesy_residual
from .config import SolverConfig
from .disk_rh import CircleData
from .errors import CongruenceError, DimensionError, DomainError
from .plane_domain import ConformalMap, JordanDomain
from .vekua import PlanarVekuaProblem, VekuaSolution, similarity_solve


@dataclass
class AxialProblem:
    """Boundary value problem for an axially symmetric (meta-)monogenic field.

    The axially symmetric domain in R^{n+1} is specified by its projection
    D onto the (x0, r) half-plane; boundary data are sampled at equispaced
    values of the boundary parameter.
    """

    n: int
    alpha: float
    domain: JordanDomain
    cmap: ConformalMap
    lam: CircleData          # lambda_1 + i lambda_2 samples
    g: CircleData            # real datum samples
    config: SolverConfig = None

    def __post_init__(self):
        if self.config is None:
            self.config = SolverConfig()
        if self.n < 1:
            raise DimensionError(f"dimension parameter n must be >= 1, got {self.n}")
        if self.domain.min_im <= 0:
            raise DomainError("domain must lie strictly above the axis r = 0")
        lam = np.asarray(self.lam.values, dtype=complex)
        if np.min(np.abs(lam)) < self.config.eps_coef * max(np.max(np.abs(lam)),
                                                            1e-300):
            raise DomainError("boundary coefficient modulus not bounded away from 0")
        gv = np.asarray(self.g.values)
        if np.iscomplexobj(gv) and \
                np.max(np.abs(gv.imag)) > 1e-12 * max(1.0, np.max(np.abs(gv))):
            raise DimensionError("datum g must be real")

    def planar(self, g=None):
        return PlanarVekuaProblem(self.n, self.domain, self.cmap, self.lam,
                                  g if g is not None else self.g)

    def boundary_points(self, n_samples=None):
        n_b = n_samples or self.config.boundary_N
        return self.cmap.forward(np.exp(1j * circle_angles(n_b)))

    def data_points(self):
        """Boundary curve points at the data parametrization's samples."""
        if self.g.N == self.domain.N:
            return self.domain.boundary
        return trig_interp(self.domain.boundary, circle_angles(self.g.N))


@dataclass
class ResidualReport:
    """Verification evidence for a computed solution."""

    pde_residual_max: float
    pde_residual_rms: float
    bc_residual_max: float
    bc_residual_rms: float
    m: int
    solvable: bool
    moments: np.ndarray
    iterations: int
    converged: bool

    def as_dict(self):
        return {
            "pde_residual_max": self.pde_residual_max,
            "pde_residual_rms": self.pde_residual_rms,
            "bc_residual_max": self.bc_residual_max,
            "bc_residual_rms": self.bc_residual_rms,
            "m": int(self.m),
            "solvable": bool(self.solvable),
            "moments": [[c.real, c.imag] for c in np.atleast_1d(self.moments)],
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }


@dataclass
class AxialSolution:
    """Reconstructed axial field phi = A + omega B plus solve diagnostics."""

    field: AxialField
    planar: VekuaSolution
    report: ResidualReport
    alpha: float
    boundary_A: np.ndarray
    boundary_B: np.ndarray
    boundary_x0: np.ndarray
    boundary_r: np.ndarray

    @property
    def converged(self):
        return self.report.converged

    @property
    def solvable(self):
        return self.report.solvable


def _mapped_axial_grid(vsol, n):
    nodes = vsol.grid.nodes
    grid = StructuredGrid(nodes.real, nodes.imag, periodic_axis=0,
                          kind="mapped", cmap=vsol.grid.cmap,
                          gamma=vsol.grid.gamma)
    return AxialField(grid, np.real(vsol.w), np.imag(vsol.w), n)


def solve_rhbvp(problem):
    """Solve Re{lambda phi} = g for an axially monogenic phi (alpha = 0).

    Runs the planar similarity solver and reconstructs phi = Re(w) + omega
    Im(w) on the quadrature grid.  Non-convergence and moment-infeasibility
    are reported as flags on the returned solution, never silent defaults.
    """
    vsol = similarity_solve(problem.planar(), problem.config)
    field0 = _mapped_axial_grid(vsol, problem.n)
    bpts = problem.boundary_points(vsol.w_boundary.size)
    sol = AxialSolution(
        field=field0, planar=vsol, report=None, alpha=0.0,
        boundary_A=np.real(vsol.w_boundary), boundary_B=np.imag(vsol.w_boundary),
        boundary_x0=bpts.real, boundary_r=bpts.imag)
    sol.report = verify(sol, problem)
    return sol


def solve_schwarz(problem):
    """Schwarz problem Re{phi} = g: the coefficient is identically one."""
    lam = np.asarray(problem.lam.values, dtype=complex)
    if np.max(np.abs(lam - 1.0)) > 1e-14:
        raise DomainError("Schwarz problem requires lambda identically 1")
    return solve_rhbvp(problem)


def solve_meta(problem):
    """Solve Re{lambda phi} = g for (D - alpha) phi = 0.

    Reduces to the alpha = 0 problem with datum g0 = e^{-alpha x0} g and
    scales the result by e^{alpha x0}; with alpha = 0 this is bit-identical
    to solve_rhbvp (the reduction multiplies by exp(0) = 1).
    """
    alpha = problem.alpha
    data_x0 = np.real(problem.data_points())
    g0 = CircleData(np.exp(-alpha * data_x0) * problem.g.values)
    base = AxialProblem(problem.n, 0.0, problem.domain, problem.cmap,
                        problem.lam, g0, problem.config)
    sol0 = solve_rhbvp(base)
    scale = np.exp(alpha * sol0.field.grid.x0)
    field = AxialField(sol0.field.grid, scale * sol0.field.A,
                       scale * sol0.field.B, problem.n)
    bscale = np.exp(alpha * sol0.boundary_x0)
    sol = AxialSolution(
        field=field, planar=sol0.planar, report=None, alpha=alpha,
        boundary_A=bscale * sol0.boundary_A, boundary_B=bscale * sol0.boundary_B,
        boundary_x0=sol0.boundary_x0, boundary_r=sol0.boundary_r)
    sol.report = verify(sol, problem)
    return sol


def solve_meta_schwarz(problem):
    """Schwarz problem for (D - alpha) phi = 0."""
    lam = np.asarray(problem.lam.values, dtype=complex)
    if np.max(np.abs(lam - 1.0)) > 1e-14:
        raise DomainError("Schwarz problem requires lambda identically 1")
    return solve_meta(problem)


def residual_report(field, alpha, boundary_x0, boundary_A, boundary_B,
                    problem, interior_mask=None, planar_echo=None):
    """Residual evidence from raw field samples (no solver state needed).

    Computes (i) the first-order system residual of the unscaled field
    e^{-alpha x0} (A, B), (ii) the boundary condition residual
    |lambda_1 A - lambda_2 B - g| at the boundary samples, and echoes the
    planar-stage diagnostics when available.
    """
    descale = np.exp(-alpha * field.grid.x0)
    shifted = AxialField(field.grid, descale * field.A, descale * field.B,
                         field.n)
    res1, res2 = vesy_residual(shifted)
    pde = np.hypot(res1, res2)
    pde_in = pde[interior_mask] if interior_mask is not None else pde.ravel()

    n_b = boundary_A.size
    theta = circle_angles(n_b)
    t = problem.cmap.boundary_param(theta)
    lam_b = trig_interp(problem.lam.values.astype(complex), t)
    g_b = np.real(trig_interp(problem.g.values.astype(complex), t))
    bc = np.abs(lam_b.real * boundary_A - lam_b.imag * boundary_B - g_b)

    echo = planar_echo or {}
    return ResidualReport(
        pde_residual_max=float(np.max(pde_in)),
        pde_residual_rms=float(np.sqrt(np.mean(pde_in ** 2))),
        bc_residual_max=float(np.max(bc)),
        bc_residual_rms=float(np.sqrt(np.mean(bc ** 2))),
        m=echo.get("m", 0), solvable=echo.get("solvable", True),
        moments=np.atleast_1d(echo.get("moments", [])),
        iterations=echo.get("iterations", 0),
        converged=echo.get("converged", True))


def verify(solution, problem):
    """Recompute the ResidualReport for a solver-produced solution."""
    field = solution.field
    vsol = solution.planar
    if field.grid.shape != vsol.grid.nodes.shape:
        raise CongruenceError("solution field grid does not match its planar grid")
    # one-sided stencils at the radial edges are noisier; report the interior
    s = np.abs(vsol.grid.gamma)
    mask = (1.0 - s) >= 3.0 / vsol.grid.M
    if not np.any(mask):
        mask = None
    echo = {"m": vsol.m, "solvable": vsol.solvable,
            "moments": np.atleast_1d(vsol.moments),
            "iterations": vsol.iterations, "converged": vsol.converged}
    return residual_report(field, solution.alpha, solution.boundary_x0,
                           solution.boundary_A, solution.boundary_B,
                           problem, interior_mask=mask, planar_echo=echo)
