"""Command-line front end. All numerics live in the library modules.

Outputs are deterministic for a fixed config: CSV cells use 17 significant
digits, JSON is written with sorted keys, and nothing is written until the
computation has finished (a failed run leaves no partial files).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import wave_solver as ws
from .dispersion import BifurcationPoint, dispersion_value, find_bifurcation_points
from .errors import CapjetError, ConfigError
from .model import parse_profile_config
from .spectral import build_operator_K, compute_spectrum
from .trivial_flow import boundary_coefficients, make_profile_factory, solve_trivial
from .validation import format_table, run_paper_validation

FMT = "%.17g"


def _fmt(x) -> str:
    return FMT % float(x)


def _require(cfg: dict, key: str, kind=float):
    if key not in cfg:
        raise ConfigError(f"missing required key {key!r}")
    val = cfg[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(f"key {key!r} must be a number")
        return float(val)
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise ConfigError(f"key {key!r} must be an integer")
        return val
    if kind is str:
        if not isinstance(val, str):
            raise ConfigError(f"key {key!r} must be a string")
        return val
    raise AssertionError(kind)


def _optional(cfg: dict, key: str, default, kind=float):
    if key not in cfg or cfg[key] is None:
        return default
    return _require(cfg, key, kind)


def _check_keys(cfg: dict, allowed: set) -> None:
    extra = set(cfg) - allowed
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")


def _model(cfg: dict):
    if "model" not in cfg:
        raise ConfigError("missing required key 'model'")
    return parse_profile_config(cfg["model"])


def _write_csv(path: str, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _write_json(path: str, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_trivial(cfg: dict, out: str, verbose: bool) -> int:
    _check_keys(cfg, {"model", "lambda", "n_table"})
    params, gamma, swirl = _model(cfg)
    lam = _require(cfg, "lambda")
    n_table = _optional(cfg, "n_table", 201, int)
    prof = solve_trivial(params, gamma, swirl, lam)
    table = prof.table(n_table)
    summary = {
        "lambda": lam,
        "m": prof.m,
        "c": prof.c,
        "m_error_estimate": prof.m_error_estimate,
        "degenerate_c": prof.degenerate_c,
    }
    if not prof.degenerate_c:
        g, h = boundary_coefficients(prof)
        summary["g"] = g
        summary["h"] = h
    _write_csv(
        os.path.join(out, "trivial_profile.csv"),
        ["s", "psi", "psi_s", "q"],
        [tuple(map(float, row)) for row in table],
    )
    _write_json(os.path.join(out, "trivial_summary.json"), summary)
    if verbose:
        print(f"trivial profile: m={prof.m:.12g} c={prof.c:.12g}")
    return 0


def cmd_dispersion(cfg: dict, out: str, verbose: bool) -> int:
    _check_keys(cfg, {"model", "k", "lambda_min", "lambda_max", "n_scan"})
    params, gamma, swirl = _model(cfg)
    k = _require(cfg, "k", int)
    lo = _require(cfg, "lambda_min")
    hi = _require(cfg, "lambda_max")
    n_scan = _optional(cfg, "n_scan", 201, int)
    if not (hi > lo):
        raise ConfigError("lambda_max must exceed lambda_min")
    factory = make_profile_factory(params, gamma, swirl)
    mu = -((k * params.nu) ** 2)
    lams = np.linspace(lo, hi, n_scan)
    rows = []
    for lam in lams:
        prof = factory(float(lam))
        if prof.degenerate_c:
            rows.append((float(lam), prof.c, math.nan))
            continue
        val = dispersion_value(prof, mu)
        rows.append((float(lam), prof.c, val))
    scan = find_bifurcation_points(factory, params.nu, (k, k), (lo, hi), n_scan=n_scan)
    _write_csv(os.path.join(out, "dispersion_sweep.csv"), ["lambda", "c", "dispersion"], rows)
    _write_json(
        os.path.join(out, "dispersion_summary.json"),
        {
            "k": k,
            "mu": mu,
            "roots": [p.lam for p in scan.points],
            "pole_brackets": [list(b) for b in scan.pole_brackets],
        },
    )
    if verbose:
        print(f"dispersion sweep: {len(scan.points)} root(s)")
    return 0


def _point_payload(p: BifurcationPoint) -> dict:
    d = dataclasses.asdict(p)
    return d


def cmd_bifurcation_points(cfg: dict, out: str, verbose: bool) -> int:
    _check_keys(cfg, {"model", "k_min", "k_max", "lambda_min", "lambda_max", "n_scan"})
    params, gamma, swirl = _model(cfg)
    k_min = _require(cfg, "k_min", int)
    k_max = _require(cfg, "k_max", int)
    lo = _require(cfg, "lambda_min")
    hi = _require(cfg, "lambda_max")
    n_scan = _optional(cfg, "n_scan", 201, int)
    factory = make_profile_factory(params, gamma, swirl)
    scan = find_bifurcation_points(factory, params.nu, (k_min, k_max), (lo, hi), n_scan=n_scan)
    payload = {
        "points": [_point_payload(p) for p in scan.points],
        "pole_brackets": [list(b) for b in scan.pole_brackets],
        "c_zero_cells": [list(b) for b in scan.c_zero_cells],
        "model": cfg["model"],
    }
    _write_json(os.path.join(out, "bifurcation_points.json"), payload)
    _write_csv(
        os.path.join(out, "bifurcation_points.csv"),
        ["k", "lambda", "mu", "c", "dispersion_residual", "d_lambda",
         "transversal", "kernel_unique", "sl_condition_ok"],
        [
            (p.k, p.lam, p.mu, p.c, p.dispersion_residual, p.d_lambda,
             int(p.transversal), int(p.kernel_unique), int(p.sl_condition_ok))
            for p in scan.points
        ],
    )
    if verbose:
        print(f"found {len(scan.points)} certified point(s)")
    return 0


def cmd_spectrum(cfg: dict, out: str, verbose: bool) -> int:
    _check_keys(cfg, {"model", "lambda", "n"})
    params, gamma, swirl = _model(cfg)
    lam = _require(cfg, "lambda")
    n = _optional(cfg, "n", 32, int)
    prof = solve_trivial(params, gamma, swirl, lam)
    result = compute_spectrum(build_operator_K(prof, n), prof)
    payload = {
        "lambda": lam,
        "n": n,
        "threshold": result.threshold,
        "eigenvalues": [
            {"re": ev.real, "im": ev.imag, "residual": res}
            for ev, res in zip(result.eigenvalues, result.residuals)
        ],
        "n_below_threshold": result.n_below_threshold,
        "n_nonreal": result.n_nonreal,
    }
    _write_json(os.path.join(out, "spectrum.json"), payload)
    if verbose:
        print(
            f"spectrum: {len(result.eigenvalues)} eigenvalues, "
            f"{result.n_below_threshold} below threshold"
        )
    return 0


def _load_point(cfg: dict) -> BifurcationPoint:
    path = _require(cfg, "points_file", str)
    index = _optional(cfg, "point_index", 0, int)
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read points file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"points file {path!r} is not valid JSON: {exc}") from exc
    pts = payload.get("points", [])
    if not pts:
        raise ConfigError(f"points file {path!r} contains no bifurcation points")
    if not (0 <= index < len(pts)):
        raise ConfigError(f"point_index {index} out of range (file has {len(pts)})")
    raw = pts[index]
    try:
        return BifurcationPoint(**raw)
    except TypeError as exc:
        raise ConfigError(f"malformed bifurcation point entry: {exc}") from exc


def cmd_branch(cfg: dict, out: str, verbose: bool) -> int:
    _check_keys(
        cfg,
        {"model", "points_file", "point_index", "N_s", "N_z", "ds", "n_steps",
         "eps_dom", "newton_tol", "dump_states"},
    )
    params, gamma, swirl = _model(cfg)
    point = _load_point(cfg)
    n_s = _optional(cfg, "N_s", 24, int)
    n_z = _optional(cfg, "N_z", 12, int)
    ds = _require(cfg, "ds")
    n_steps = _require(cfg, "n_steps", int)
    eps_dom = _optional(cfg, "eps_dom", None)
    newton_tol = _optional(cfg, "newton_tol", ws.NEWTON_TOL)
    dump_states = bool(cfg.get("dump_states", False))
    factory = make_profile_factory(params, gamma, swirl)
    disc = ws.build_discretization(params, n_s, n_z)
    branch = ws.continue_branch(
        disc, factory, point, ds, n_steps, eps_dom=eps_dom, newton_tol=newton_tol
    )
    header = [
        "step", "lambda", "amplitude", "Q", "min_surface_radius", "vorticity_lp",
        "abs_lambda", "eta_norm_c2a", "abs_q", "surface_speed_sq_norm",
        "newton_iters", "ds",
    ] + [f"eta_mode_energy_{k}" for k in range(1, n_z + 1)]
    rows = []
    for r in branch.rows:
        rows.append(
            tuple(
                r[key] if key in ("step", "newton_iters") else float(r[key])
                for key in header[:12]
            )
            + tuple(float(e) for e in r["eta_mode_energies"])
        )
    _write_csv(os.path.join(out, "branch.csv"), header, rows)
    summary = {
        "termination": branch.termination,
        "n_accepted": len(branch.rows),
        "point": _point_payload(point),
        "config": {"N_s": n_s, "N_z": n_z, "ds": ds, "n_steps": n_steps},
    }
    _write_json(os.path.join(out, "branch_summary.json"), summary)
    if dump_states:
        states_payload = [
            {
                "lambda": st.lam,
                "q": st.q,
                "eta_hat": [float(v) for v in st.eta_hat],
                "phi": [[float(v) for v in row] for row in st.phi],
                "res_norm": st.res_norm,
                "newton_iters": st.newton_iters,
            }
            for st in branch.states
        ]
        _write_json(os.path.join(out, "branch_states.json"), states_payload)
    if verbose:
        print(f"branch: {len(branch.rows)} accepted step(s), termination={branch.termination}")
    return 0


def cmd_validate_paper(cfg: dict, out: str, verbose: bool) -> int:
    _check_keys(cfg, set())
    rows = run_paper_validation()
    print(format_table(rows))
    payload = [dataclasses.asdict(r) for r in rows]
    _write_json(os.path.join(out, "validate_paper.json"), payload)
    return 0 if all(r.ok for r in rows) else 1


_COMMANDS = {
    "trivial": cmd_trivial,
    "dispersion": cmd_dispersion,
    "bifurcation-points": cmd_bifurcation_points,
    "spectrum": cmd_spectrum,
    "branch": cmd_branch,
    "validate-paper": cmd_validate_paper,
}


def _error_json(exc: Exception) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="capjet",
        description="Axisymmetric capillary jet flows: laminar profiles, "
        "bifurcation points, spectra, and wave branches.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)

    cfg: dict = {}
    if args.config is not None:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except OSError as exc:
            print(_error_json(exc), file=sys.stderr)
            return 2
        except json.JSONDecodeError as exc:
            print(_error_json(exc), file=sys.stderr)
            return 2
        if not isinstance(cfg, dict):
            print(_error_json(ConfigError("config root must be a JSON object")), file=sys.stderr)
            return 2
    elif args.command != "validate-paper":
        print(_error_json(ConfigError("--config is required for this command")), file=sys.stderr)
        return 2

    try:
        os.makedirs(args.out, exist_ok=True)
        return _COMMANDS[args.command](cfg, args.out, args.verbose)
    except ConfigError as exc:
        print(_error_json(exc), file=sys.stderr)
        return 2
    except CapjetError as exc:
        print(_error_json(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
