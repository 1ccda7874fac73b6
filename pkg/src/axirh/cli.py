"""Command-line front end: JSON problem configs in, CSV fields + JSON reports out.

Commands
--------
solve           run the boundary value solver, write fields CSV + report JSON
verify          recompute residuals for a previously written solution
oracle-compare  run solver and finite-difference oracle, write agreement metrics
index           print the coefficient index m and solvability moments (nu = 0)
map-check       print conformal-map diagnostics for the configured domain

Exit status: 0 success, 1 usage/config error, 2 unsolvable problem,
3 non-convergent iteration.  Every error is also serialized into the report
with a machine-readable code when an output path is known.
"""

import argparse
import json
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from ._fourier import circle_angles, fourier_coeffs, trig_interp
from .axial_core import read_field_csv, sidecar_path, write_field_csv
from .config import SolverConfig
from .disk_rh import CircleData, factorize, solve_disk_rh
from .errors import AxirhError, ConfigError
from .fd_oracle import assemble, direct_solve, matched_rel_l2, null_direction
from .plane_domain import area_grid, domain_from_spec
from .solver_api import (
    AxialProblem,
    residual_report,
    solve_meta,
    solve_rhbvp,
)
from .vekua import evaluate_solution, transplant

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNSOLVABLE = 2
EXIT_NO_CONVERGENCE = 3

_TOP_KEYS = {"n", "alpha", "domain", "lambda", "g", "solver", "output", "oracle"}
_OUTPUT_KEYS = {"fields_csv", "report_json", "verify_report_json"}
_ORACLE_KEYS = {"K", "M"}
_SOLVER_EXTRA = {"grid", "boundary_N"}


def _check_keys(obj, allowed, where):
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _require(obj, key, where):
    if key not in obj:
        raise ConfigError(f"missing required key {key!r} in {where}")
    return obj[key]


def parse_boundary_data(spec, n_samples, real, what):
    """Boundary data from {"samples": [...]} or {"fourier": {k: [re, im]}}."""
    if not isinstance(spec, dict):
        raise ConfigError(f"{what} must be an object")
    _check_keys(spec, {"samples", "fourier"}, what)
    if ("samples" in spec) == ("fourier" in spec):
        raise ConfigError(f"{what} needs exactly one of 'samples' or 'fourier'")
    if "samples" in spec:
        raw = spec["samples"]
        vals = np.array([complex(v[0], v[1]) if isinstance(v, (list, tuple))
                         else float(v) for v in raw])
        if real:
            if np.max(np.abs(vals.imag)) > 1e-12 * max(1.0, np.max(np.abs(vals))):
                raise ConfigError(f"{what} samples must be real")
            vals = vals.real
        return CircleData(vals)
    coeff_map = {int(k): complex(v[0], v[1])
                 for k, v in spec["fourier"].items()}
    try:
        return CircleData.from_fourier(coeff_map, n_samples, real=real)
    except AxirhError as exc:
        raise ConfigError(f"{what}: {exc}")


def load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")


def build_problem(cfg_obj):
    """Strictly validated AxialProblem + SolverConfig from a config object."""
    _check_keys(cfg_obj, _TOP_KEYS, "config")
    n = int(_require(cfg_obj, "n", "config"))
    alpha = float(_require(cfg_obj, "alpha", "config"))
    solver_spec = dict(cfg_obj.get("solver", {}))
    _check_keys(solver_spec,
                {f.name for f in SolverConfig.__dataclass_fields__.values()}
                | _SOLVER_EXTRA, "solver")
    grid = solver_spec.pop("grid", None)
    if grid is not None:
        _check_keys(grid, {"K", "M"}, "solver.grid")
        solver_spec["grid_K"] = int(grid["K"])
        solver_spec["grid_M"] = int(grid["M"])
    if "boundary_N" in solver_spec:
        solver_spec["boundary_N"] = int(solver_spec["boundary_N"])
    config = SolverConfig.from_dict(solver_spec)
    n_b = config.boundary_N
    domain, cmap = domain_from_spec(_require(cfg_obj, "domain", "config"),
                                    boundary_n=n_b, config=config)
    lam = parse_boundary_data(_require(cfg_obj, "lambda", "config"), n_b,
                              real=False, what="lambda")
    g = parse_boundary_data(_require(cfg_obj, "g", "config"), n_b,
                            real=True, what="g")
    return AxialProblem(n, alpha, domain, cmap, lam, g, config)


def apply_overrides(cfg_obj, overrides):
    """Dot-path overrides like solver.damping=0.5 (values parsed as JSON)."""
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        path, raw = item.split("=", 1)
        keys = path.split(".")
        if keys[0] != "solver":
            raise ConfigError(f"only solver.* overrides are supported: {path}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg_obj
        for k in keys[:-1]:
            node = node.setdefault(k, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override path {path} crosses a non-object")
        node[keys[-1]] = value
    return cfg_obj


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def write_report(path, report):
    with open(path, "w") as fh:
        json.dump(_jsonable(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_outputs(cfg_obj, output_dir, command):
    out = dict(cfg_obj.get("output", {}))
    _check_keys(out, _OUTPUT_KEYS, "output")
    need_fields = command in ("solve", "verify")
    need_report = command in ("solve", "verify", "oracle-compare")
    paths = {}
    if need_fields:
        paths["fields_csv"] = _require(out, "fields_csv", "output")
    if need_report:
        paths["report_json"] = _require(out, "report_json", "output")
    if command == "verify":
        paths["verify_report_json"] = out.get(
            "verify_report_json",
            str(out["report_json"]).replace(".json", "") + ".verify.json")
    resolved = {}
    for key, p in paths.items():
        full = os.path.join(output_dir, p) if not os.path.isabs(p) else p
        parent = os.path.dirname(full) or "."
        os.makedirs(parent, exist_ok=True)
        if not os.access(parent, os.W_OK):
            raise ConfigError(f"output path not writable: {full}")
        resolved[key] = full
    return resolved


def _planar_echo_meta(sol):
    rep = sol.report
    return {
        "m": int(rep.m),
        "solvable": bool(rep.solvable),
        "moments": [[c.real, c.imag] for c in np.atleast_1d(rep.moments)],
        "iterations": int(rep.iterations),
        "converged": bool(rep.converged),
    }


def cmd_solve(cfg_obj, paths, seed):
    t0 = time.monotonic()
    problem = build_problem(cfg_obj)
    sol = solve_meta(problem) if problem.alpha != 0.0 else solve_rhbvp(problem)
    vsol = sol.planar
    extra = {
        "alpha": problem.alpha,
        "radial_s": np.abs(vsol.grid.gamma[0, :]).tolist(),
        "boundary": {
            "x0": sol.boundary_x0.tolist(),
            "r": sol.boundary_r.tolist(),
            "A": sol.boundary_A.tolist(),
            "B": sol.boundary_B.tolist(),
        },
        "planar": _planar_echo_meta(sol),
        "domain": cfg_obj["domain"],
    }
    write_field_csv(sol.field, paths["fields_csv"], extra_meta=extra)
    report = {
        "command": "solve",
        "version": __version__,
        "seed": seed,
        "problem": {"n": problem.n, "alpha": problem.alpha,
                    "domain": cfg_obj["domain"]},
        "solver": cfg_obj.get("solver", {}),
        "residuals": sol.report.as_dict(),
        "history": vsol.history,
        "outputs": {"fields_csv": os.path.basename(paths["fields_csv"])},
        "timestamps": {
            "started": datetime.now(timezone.utc).isoformat(),
            "wall_time_s": time.monotonic() - t0,
        },
        "error": None,
    }
    write_report(paths["report_json"], report)
    if not sol.solvable:
        return EXIT_UNSOLVABLE
    if not sol.converged:
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_verify(cfg_obj, paths, seed):
    t0 = time.monotonic()
    problem = build_problem(cfg_obj)
    field, meta = read_field_csv(paths["fields_csv"])
    boundary = meta.get("boundary")
    if boundary is None:
        raise ConfigError("solution sidecar lacks the boundary block")
    s = np.asarray(meta.get("radial_s", []))
    mask = None
    if s.size == field.grid.shape[1]:
        mask = np.broadcast_to((1.0 - s) >= 3.0 / s.size, field.grid.shape)
    rep = residual_report(
        field, float(meta.get("alpha", 0.0)),
        np.asarray(boundary["x0"]), np.asarray(boundary["A"]),
        np.asarray(boundary["B"]), problem,
        interior_mask=mask, planar_echo=meta.get("planar"))
    report = {
        "command": "verify",
        "version": __version__,
        "seed": seed,
        "fields_csv": os.path.basename(paths["fields_csv"]),
        "residuals": rep.as_dict(),
        "timestamps": {
            "started": datetime.now(timezone.utc).isoformat(),
            "wall_time_s": time.monotonic() - t0,
        },
        "error": None,
    }
    write_report(paths["verify_report_json"], report)
    return EXIT_OK


def cmd_oracle_compare(cfg_obj, paths, seed):
    t0 = time.monotonic()
    problem = build_problem(cfg_obj)
    oracle_spec = dict(cfg_obj.get("oracle", {}))
    _check_keys(oracle_spec, _ORACLE_KEYS, "oracle")
    res = (int(oracle_spec.get("K", 64)), int(oracle_spec.get("M", 64)))
    sol = solve_meta(problem) if problem.alpha != 0.0 else solve_rhbvp(problem)
    data_x0 = np.real(problem.data_points())
    g0 = CircleData(np.exp(-problem.alpha * data_x0) * problem.g.values)
    planar = problem.planar(g0)
    system = assemble(planar, res)
    w_fd, lsq_res = direct_solve(system)
    family = []
    if system.n_norm_rows > 0:
        family.append(null_direction(system))
    w_sim = evaluate_solution(sol.planar, system.nodes.ravel(),
                              target_gamma=system.gamma.ravel())
    rel = matched_rel_l2(w_fd, w_sim.reshape(system.nodes.shape), family)
    report = {
        "command": "oracle-compare",
        "version": __version__,
        "seed": seed,
        "residuals": sol.report.as_dict(),
        "oracle": {
            "rel_l2": rel,
            "lsq_residual": lsq_res,
            "resolution": list(res),
            "normalization_rows": int(system.n_norm_rows),
        },
        "timestamps": {
            "started": datetime.now(timezone.utc).isoformat(),
            "wall_time_s": time.monotonic() - t0,
        },
        "error": None,
    }
    write_report(paths["report_json"], report)
    if not sol.solvable:
        return EXIT_UNSOLVABLE
    if not sol.converged:
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_index(cfg_obj, seed):
    problem = build_problem(cfg_obj)
    n_b = problem.config.boundary_N
    lam0, g_disk = transplant(problem.planar(), np.zeros(n_b, complex), n_b)
    fact = factorize(lam0, problem.config)
    payload = {"m": int(fact.m), "moments": []}
    if fact.m < 0:
        disk = solve_disk_rh(lam0, g_disk, problem.config)
        payload["moments"] = [[c.real, c.imag] for c in disk.moments]
        payload["solvable"] = bool(disk.solvable)
    print(json.dumps(_jsonable(payload), sort_keys=True))
    return EXIT_OK


def cmd_map_check(cfg_obj, seed):
    spec = _require(cfg_obj, "domain", "config")
    config = SolverConfig()
    domain, cmap = domain_from_spec(spec, boundary_n=config.boundary_N,
                                    config=config)
    diag = cmap.check(boundary=domain)
    grid = area_grid(cmap, 64, 32, min_im=domain.min_im)
    diag["kind"] = cmap.kind
    diag["quadrature_area"] = float(np.sum(grid.weights))
    diag["polygon_area"] = float(domain.signed_area())
    diag["min_im"] = domain.min_im
    print(json.dumps(_jsonable(diag), sort_keys=True))
    return EXIT_OK


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="axirh",
        description="Riemann-Hilbert solver for axially symmetric monogenic fields")
    parser.add_argument("command",
                        choices=["solve", "verify", "oracle-compare", "index",
                                 "map-check"])
    parser.add_argument("--config", required=True, help="problem JSON path")
    parser.add_argument("--output-dir", default=".",
                        help="base directory for relative output paths")
    parser.add_argument("--override", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="dot-path solver override, e.g. solver.damping=0.5")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed recorded in reports (corpus generation)")
    args = parser.parse_args(argv)

    try:
        cfg_obj = apply_overrides(load_config(args.config), args.override)
        if args.command == "index":
            return cmd_index(cfg_obj, args.seed)
        if args.command == "map-check":
            return cmd_map_check(cfg_obj, args.seed)
        paths = _resolve_outputs(cfg_obj, args.output_dir, args.command)
        if args.command == "solve":
            return cmd_solve(cfg_obj, paths, args.seed)
        if args.command == "verify":
            return cmd_verify(cfg_obj, paths, args.seed)
        return cmd_oracle_compare(cfg_obj, paths, args.seed)
    except ConfigError as exc:
        print(f"axirh: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AxirhError as exc:
        print(f"axirh: error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        report_path = None
        try:
            out = cfg_obj.get("output", {})
            if "report_json" in out:
                report_path = os.path.join(args.output_dir, out["report_json"])
                write_report(report_path, {
                    "command": args.command,
                    "error": {"code": exc.__class__.__name__, "message": str(exc)},
                })
        except Exception:
            pass
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
