"""axirh: Riemann-Hilbert boundary value problems for axially symmetric
monogenic and meta-monogenic functions on R^{n+1}.

The solver reduces the boundary value problem to a planar equation for
w = A + iB on the projected domain in the upper half-plane, factorizes it
through the similarity representation w = Psi e^nu, and solves the
resulting classical Riemann-Hilbert problem on the unit disk by index
theory and Schwarz integrals.  An independent finite-difference
least-squares oracle cross-checks solutions and solvability verdicts.
"""

__version__ = "0.1.0"

from .axial_core import (
    AXIAL_ONE,
    AxialField,
    AxialPoint,
    AxialValue,
    Paravector,
    StructuredGrid,
    cauchy_kernel,
    cauchy_kernel_field,
    eval_axial,
    planar_residual,
    read_field_csv,
    reconstruct_axial,
    vesy_residual,
    write_field_csv,
)
from .config import SolverConfig
from .disk_rh import (
    CircleData,
    DiskRHFactorization,
    DiskRHSolution,
    factorize,
    homogeneous_basis,
    schwarz_operator,
    solve_disk_rh,
    winding_index,
)
from .fd_oracle import FDSystem, assemble, direct_solve, matched_rel_l2, null_direction
from .plane_domain import (
    AreaGrid,
    ConformalMap,
    JordanDomain,
    affine_disk_map,
    area_grid,
    domain_from_spec,
    star_domain,
    supplied_map,
    theodorsen_map,
)
from .solver_api import (
    AxialProblem,
    AxialSolution,
    ResidualReport,
    residual_report,
    solve_meta,
    solve_meta_schwarz,
    solve_rhbvp,
    solve_schwarz,
    verify,
)
from .vekua import (
    PlanarVekuaProblem,
    VekuaSolution,
    evaluate_solution,
    interior_mask,
    pompeiu_transform,
    similarity_solve,
    transplant,
    vekua_pde_residual,
    vekua_rhs,
)

__all__ = [name for name in dir() if not name.startswith("_")]
