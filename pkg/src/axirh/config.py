"""Solver configuration: numerical tolerances and iteration controls.

Physical problem parameters (n, alpha, domain, boundary data) are never
defaulted; everything here is a numerical knob with a documented default.
"""

import os
from dataclasses import dataclass, fields, replace

from .errors import ConfigError


@dataclass(frozen=True)
class SolverConfig:
    # similarity fixed point
    tol_fp: float = 1e-8          # relative update norm for convergence
    max_iter: int = 50
    damping: float = 0.7
    # discretization
    boundary_N: int = 256         # boundary samples on the unit circle
    grid_K: int = 128             # angular quadrature count
    grid_M: int = 64              # radial quadrature count
    # disk Riemann-Hilbert stage
    tol_fft: float = 1e-12        # Schwarz-operator boundary reconstruction
    tol_fact: float = 1e-10       # factorization reconstruction identity
    tol_rh: float = 1e-8          # boundary residual of the disk solve
    tol_moment: float = 1e-8      # solvability moments (relative to data scale)
    alias_tol: float = 1e-3       # relative top-frequency content guard
    eps_coef: float = 1e-8        # relative modulus floor for coefficients
    moment_range: str = "classical"   # "classical" (k=0..-m-1) or "paper" (k=0..-m+1)
    constant_policy: str = "zero"     # free-constant policy for index >= 0
    # conformal maps
    tol_map: float = 1e-10        # affine / supplied analytic maps
    tol_map_theodorsen: float = 1e-8
    map_max_iter: int = 200
    # geometry guards
    delta_axis: float = 1e-9      # required clearance from the real axis
    eps_w: float = 1e-12          # relative |w| floor in the Vekua right-hand side
    # verification / oracle
    tol_pde: float = 1e-3         # interior PDE residual for converged solutions
    tol_feas: float = 1e-3        # least-squares feasibility scale (oracle)

    def replace(self, **kw):
        return replace(self, **kw)

    @classmethod
    def from_dict(cls, d):
        """Build a config from a (possibly partial) dict, rejecting unknown keys."""
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown solver keys: {sorted(unknown)}")
        return cls(**d)


def thread_count():
    """Width cap for internal data-parallel loops.

    AXIRH_THREADS caps the width explicitly; unset, a small default is
    used.  Results are byte-identical at any width (chunks are assembled
    in deterministic order).
    """
    raw = os.environ.get("AXIRH_THREADS", "").strip()
    if not raw:
        return min(4, os.cpu_count() or 1)
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"AXIRH_THREADS must be an integer, got {raw!r}")
