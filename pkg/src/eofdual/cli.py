"""Batch-oriented command line front end.

Every run emits a machine-readable report (JSON by default, CSV for
spreadsheet aggregation) echoing the full configuration, the recorded seed,
and sha256 hashes of the input files, so any report can be reproduced
exactly. Exit status is 0 whenever the computation completed; conjecture
gaps and non-convergence are data in the report, not errors.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import secrets
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict

import click

from .conjugate import conjugate_value, duality_lower_bound
from .entanglement import (
    OptimizerConfig,
    concurrence,
    eof_minimize,
    von_neumann_entropy,
    wootters_eof,
)
from .harness import additivity_gap, strong_superadditivity_gap, theorem_pipeline
from .io import encode_state, load_state, save_state
from .states import (
    BipartiteDims,
    DensityMatrix,
    FourPartyDims,
    HermitianObservable,
    sample_density,
    sample_haar_pure,
    sample_hermitian,
)


def _sha256_file(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _optimizer_options(f):
    f = click.option("--restarts", type=int, default=16, show_default=True)(f)
    f = click.option("--max-iters", type=int, default=2000, show_default=True)(f)
    f = click.option("--tol", type=float, default=1e-7, show_default=True,
                     help="Gradient-norm convergence tolerance.")(f)
    f = click.option("--ensemble-size", type=int, default=None,
                     help="Decomposition cardinality (default min(rank^2, 16)).")(f)
    f = click.option("--seed", type=int, default=None,
                     help="Optimizer seed; generated and recorded if omitted.")(f)
    return f


def _output_options(f):
    f = click.option("--output", "-o", type=click.Path(), default=None,
                     help="Report destination (default stdout).")(f)
    f = click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
                     default="json", show_default=True)(f)
    f = click.option("--jobs", type=int, default=1, show_default=True,
                     help="Worker parallelism over batch inputs.")(f)
    return f


def _make_config(restarts, max_iters, tol, ensemble_size, seed) -> OptimizerConfig:
    if seed is None:
        seed = secrets.randbits(32)
    return OptimizerConfig(
        restarts=restarts,
        max_iters=max_iters,
        grad_tol=tol,
        ensemble_size=ensemble_size,
        seed=seed,
    )


def _flatten(d, prefix="", out=None):
    out = {} if out is None else out
    for k, v in d.items():
        key = f"{prefix}.{k}" if prefix else str(k)
        if isinstance(v, dict):
            _flatten(v, key, out)
        elif isinstance(v, (list, tuple)):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


def _emit(report: dict, output, fmt):
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    else:
        rows = [_flatten({**{"command": report["command"]}, **r})
                for r in report["results"]]
        fields = sorted({k for row in rows for k in row})
        buf = _io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _fail(command: str, message: str, output, fmt):
    report = {"command": command, "error": message}
    text = json.dumps(report, indent=2) + "\n"
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    click.echo(text, nl=False, err=True)
    sys.exit(1)


def _load_inputs(command, paths, output, fmt):
    loaded = []
    for p in paths:
        try:
            loaded.append(load_state(p))
        except (ValueError, OSError) as exc:
            _fail(command, f"{p}: {exc}", output, fmt)
    return loaded


def _run_batch(command, paths, worker, config_echo, output, fmt, jobs):
    objs = _load_inputs(command, paths, output, fmt)
    start = time.perf_counter()
    try:
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(worker, paths, objs))
        else:
            results = [worker(p, o) for p, o in zip(paths, objs)]
    except ValueError as exc:
        _fail(command, str(exc), output, fmt)
    report = {
        "command": command,
        "config": config_echo,
        "inputs": [{"path": p, "sha256": _sha256_file(p)} for p in paths],
        "results": results,
        "wall_time_s": time.perf_counter() - start,
    }
    _emit(report, output, fmt)


def _cfg_echo(cfg: OptimizerConfig) -> dict:
    return {
        "restarts": cfg.restarts,
        "max_iters": cfg.max_iters,
        "grad_tol": cfg.grad_tol,
        "ensemble_size": cfg.ensemble_size,
        "seed": cfg.seed,
    }


@click.group()
def main():
    """Entanglement of formation, its conjugate dual, and conjecture checks."""


@main.command()
@click.option("--kind", type=click.Choice(["pure", "mixed", "hermitian"]), required=True)
@click.option("--dims", required=True,
              help="Subsystem dimensions: 'A B' (bipartite) or 'd1A d1B d2A d2B'.")
@click.option("--rank", type=int, default=None, help="Rank for mixed states.")
@click.option("--seed", type=int, required=True)
@click.option("--output", "-o", type=click.Path(), required=True)
def sample(kind, dims, rank, seed, output):
    """Sample a random state/observable and write it as a canonical file."""
    try:
        parts = [int(x) for x in dims.replace(",", " ").split()]
    except ValueError:
        _fail("sample", f"cannot parse dims {dims!r}", None, "json")
    try:
        if len(parts) == 2:
            d = BipartiteDims(*parts)
        elif len(parts) == 4:
            d = FourPartyDims(*parts)
        else:
            raise ValueError("dims must have 2 or 4 entries")
        if kind == "pure":
            if not isinstance(d, BipartiteDims):
                raise ValueError("pure sampling needs bipartite dims")
            obj = sample_haar_pure(d, seed)
        elif kind == "mixed":
            obj = sample_density(d, rank if rank is not None else d.total, seed)
        else:
            if not isinstance(d, BipartiteDims):
                raise ValueError("hermitian sampling needs bipartite dims")
            obj = sample_hermitian(d, seed)
    except ValueError as exc:
        _fail("sample", str(exc), None, "json")
    save_state(obj, output)


@main.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True))
@_output_options
def entropy(inputs, output, fmt, jobs):
    """Von Neumann entropy of stored density matrices."""

    def worker(path, obj):
        if not isinstance(obj, DensityMatrix):
            raise ValueError(f"{path}: entropy expects a density file")
        return {"path": path, "entropy_bits": von_neumann_entropy(obj)}

    _run_batch("entropy", inputs, worker, {}, output, fmt, jobs)


@main.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True))
@_optimizer_options
@_output_options
def eof(inputs, restarts, max_iters, tol, ensemble_size, seed, output, fmt, jobs):
    """Entanglement of formation by convex-roof minimization."""
    cfg = _make_config(restarts, max_iters, tol, ensemble_size, seed)

    def worker(path, obj):
        if not isinstance(obj, DensityMatrix):
            raise ValueError(f"{path}: eof expects a density file")
        res = eof_minimize(obj, cfg)
        return {
            "path": path,
            "value": res.value,
            "best_restart_index": res.best_restart_index,
            "converged_gradient_norm": res.converged_gradient_norm,
            "converged": res.converged,
            "non_converged": not res.converged,
        }

    _run_batch("eof", inputs, worker, _cfg_echo(cfg), output, fmt, jobs)


@main.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True))
@_output_options
def wootters(inputs, output, fmt, jobs):
    """Closed-form two-qubit concurrence and EoF."""

    def worker(path, obj):
        if not isinstance(obj, DensityMatrix):
            raise ValueError(f"{path}: wootters expects a density file")
        return {
            "path": path,
            "concurrence": concurrence(obj),
            "eof": wootters_eof(obj),
        }

    _run_batch("wootters", inputs, worker, {}, output, fmt, jobs)


@main.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True))
@_optimizer_options
@_output_options
def conjugate(inputs, restarts, max_iters, tol, ensemble_size, seed, output, fmt, jobs):
    """Conjugate function E*(H) of stored observables."""
    cfg = _make_config(restarts, max_iters, tol, ensemble_size, seed)

    def worker(path, obj):
        if not isinstance(obj, HermitianObservable):
            raise ValueError(f"{path}: conjugate expects a hermitian file")
        res = conjugate_value(obj, cfg)
        return {
            "path": path,
            "value": res.value,
            "stationarity_residual": res.stationarity_residual,
            "multiplier": res.multiplier,
            "converged": res.converged,
            "non_converged": not res.converged,
        }

    _run_batch("conjugate", inputs, worker, _cfg_echo(cfg), output, fmt, jobs)


@main.command("duality-check")
@click.argument("rho_path", type=click.Path(exists=True))
@click.argument("h_path", type=click.Path(exists=True))
@_optimizer_options
@_output_options
def duality_check(rho_path, h_path, restarts, max_iters, tol, ensemble_size, seed,
                  output, fmt, jobs):
    """Lower bound Tr(rho H) - E*(H), compared to the two-qubit oracle."""
    cfg = _make_config(restarts, max_iters, tol, ensemble_size, seed)
    rho, h = _load_inputs("duality-check", [rho_path, h_path], output, fmt)
    if not isinstance(rho, DensityMatrix) or not isinstance(h, HermitianObservable):
        _fail("duality-check", "expects a density file then a hermitian file",
              output, fmt)
    start = time.perf_counter()
    bound = duality_lower_bound(rho, h, cfg)
    result = {"lower_bound": bound}
    if rho.bipartite == BipartiteDims(2, 2):
        oracle = wootters_eof(rho)
        result["oracle_eof"] = oracle
        result["weak_duality_ok"] = bound <= oracle + 1e-4
    report = {
        "command": "duality-check",
        "config": _cfg_echo(cfg),
        "inputs": [{"path": p, "sha256": _sha256_file(p)} for p in (rho_path, h_path)],
        "results": [result],
        "wall_time_s": time.perf_counter() - start,
    }
    _emit(report, output, fmt)


def _gap_result(report) -> dict:
    return {
        "kind": report.kind,
        "lhs": report.lhs,
        "rhs": report.rhs,
        "gap": report.gap,
        "diagnostics": report.diagnostics,
    }


@main.command()
@click.argument("rho1_path", type=click.Path(exists=True))
@click.argument("rho2_path", type=click.Path(exists=True))
@_optimizer_options
@_output_options
def additivity(rho1_path, rho2_path, restarts, max_iters, tol, ensemble_size, seed,
               output, fmt, jobs):
    """Additivity gap E_F(rho1)+E_F(rho2) - E_F(rho1 (x) rho2)."""
    cfg = _make_config(restarts, max_iters, tol, ensemble_size, seed)
    rho1, rho2 = _load_inputs("additivity", [rho1_path, rho2_path], output, fmt)
    if not isinstance(rho1, DensityMatrix) or not isinstance(rho2, DensityMatrix):
        _fail("additivity", "expects two density files", output, fmt)
    start = time.perf_counter()
    try:
        rep = additivity_gap(rho1, rho2, cfg)
    except ValueError as exc:
        _fail("additivity", str(exc), output, fmt)
    report = {
        "command": "additivity",
        "config": _cfg_echo(cfg),
        "inputs": [{"path": p, "sha256": _sha256_file(p)}
                   for p in (rho1_path, rho2_path)],
        "results": [_gap_result(rep)],
        "wall_time_s": time.perf_counter() - start,
    }
    _emit(report, output, fmt)


@main.command()
@click.argument("rho_path", type=click.Path(exists=True))
@_optimizer_options
@_output_options
def superadditivity(rho_path, restarts, max_iters, tol, ensemble_size, seed,
                    output, fmt, jobs):
    """Strong-superadditivity gap of a stored four-party state."""
    cfg = _make_config(restarts, max_iters, tol, ensemble_size, seed)
    (rho,) = _load_inputs("superadditivity", [rho_path], output, fmt)
    if not isinstance(rho, DensityMatrix) or not isinstance(rho.dims, FourPartyDims):
        _fail("superadditivity", "expects a four-party density file", output, fmt)
    start = time.perf_counter()
    try:
        rep = strong_superadditivity_gap(rho, cfg)
    except ValueError as exc:
        _fail("superadditivity", str(exc), output, fmt)
    report = {
        "command": "superadditivity",
        "config": _cfg_echo(cfg),
        "inputs": [{"path": rho_path, "sha256": _sha256_file(rho_path)}],
        "results": [_gap_result(rep)],
        "wall_time_s": time.perf_counter() - start,
    }
    _emit(report, output, fmt)


@main.command("theorem-check")
@click.argument("rho_path", type=click.Path(exists=True))
@_optimizer_options
@_output_options
def theorem_check(rho_path, restarts, max_iters, tol, ensemble_size, seed,
                  output, fmt, jobs):
    """Full additivity => strong-superadditivity pipeline on one state."""
    cfg = _make_config(restarts, max_iters, tol, ensemble_size, seed)
    (rho,) = _load_inputs("theorem-check", [rho_path], output, fmt)
    if not isinstance(rho, DensityMatrix) or not isinstance(rho.dims, FourPartyDims):
        _fail("theorem-check", "expects a four-party density file", output, fmt)
    start = time.perf_counter()
    try:
        rep = theorem_pipeline(rho, cfg)
    except ValueError as exc:
        _fail("theorem-check", str(exc), output, fmt)
    report = {
        "command": "theorem-check",
        "config": _cfg_echo(cfg),
        "inputs": [{"path": rho_path, "sha256": _sha256_file(rho_path)}],
        "results": [asdict(rep)],
        "wall_time_s": time.perf_counter() - start,
    }
    _emit(report, output, fmt)


if __name__ == "__main__":
    main()
