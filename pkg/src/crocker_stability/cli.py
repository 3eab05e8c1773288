"""Command-line entry point: ``crocker-stab <command> ...``.

JSON reports go to stdout (or ``report.json`` in the output directory),
human summaries to stderr. Exit codes: 0 ok, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .churn import ChurnEvent, apply_event, churn_budget, global_churn_bound, worst_case_betti_budget
from .crocker import ScaleGrid, build_crocker, diff_map
from .formats import (
    crocker_to_dict,
    emit_heatmap_svg,
    parse_crocker,
    parse_point_cloud_csv,
    serialize_crocker,
    serialize_point_cloud_csv,
)
from .geometry import DEFAULT_DEDUP_TOL, DomainError
from .models import BreathingPolygonSpec, FeasibilitySpec, breathing_polygon, epithelial_feasibility, pentagon_insertion_scenario
from .noise import NoiseModel, global_prob_bound, mc_stability_experiment, required_tau_for_confidence, tau_star
from .stability import certify_exact, clearance_report, global_change_budget, local_density, saturate

OUT_DIR_ENV = "CROCKER_OUT_DIR"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def _read_input(path: str | None) -> bytes:
    if path is None or path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise DomainError(f"cannot read input {path!r}: {exc.strerror}") from None


def _series(args):
    return parse_point_cloud_csv(_read_input(args.input), name=args.input or "stdin")


def _grid(args) -> ScaleGrid:
    try:
        return ScaleGrid.parse(args.grid)
    except ValueError as exc:
        raise DomainError(f"bad --grid {args.grid!r}: {exc}") from None


def _out_dir(args) -> Path | None:
    d = getattr(args, "out_dir", None) or os.environ.get(OUT_DIR_ENV)
    if not d:
        return None
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _emit(args, report: dict, summary: str) -> None:
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    out = _out_dir(args)
    if out is None:
        sys.stdout.write(text)
    else:
        (out / "report.json").write_text(text, encoding="utf-8")
        summary += f"\nreport written to {out / 'report.json'}"
    print(summary, file=sys.stderr)


def _emit_bytes(data: bytes, path: str | None) -> None:
    if path:
        Path(path).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


# commands


def cmd_crocker(args):
    series = _series(args)
    grid = _grid(args)
    diagrams = build_crocker(series, grid, args.k_max)
    out = _out_dir(args)
    if out is not None:
        for dg in diagrams:
            if "csv" in args.emit:
                (out / f"crocker_b{dg.k}.csv").write_bytes(serialize_crocker(dg, "csv"))
            if "json" in args.emit:
                (out / f"crocker_b{dg.k}.json").write_bytes(serialize_crocker(dg, "json"))
            if "svg" in args.emit:
                (out / f"crocker_b{dg.k}.svg").write_bytes(emit_heatmap_svg(dg))
    report = {
        "command": "crocker",
        "input": args.input,
        "grid": list(grid.thresholds),
        "k_max": args.k_max,
        "n_t": len(series),
        "diagrams": [crocker_to_dict(dg) for dg in diagrams],
    }
    _emit(args, report, f"built {len(diagrams)} diagrams on {len(grid)} scales x {len(series)} frames")


def cmd_clearance(args):
    series = _series(args)
    grid = _grid(args)
    rep = clearance_report(series, grid, args.dedup_tol)
    report = {"command": "clearance", "input": args.input, **rep.to_dict()}
    _emit(args, report, f"gamma={rep.gamma:.6g} gamma_grid={rep.gamma_grid:.6g} in_gap_ok={rep.in_gap_ok}")


def cmd_certify(args):
    series = _series(args)
    grid = _grid(args)
    rep = clearance_report(series, grid, args.dedup_tol)
    cert = certify_exact(rep, args.delta)
    report = {
        "command": "certify",
        "input": args.input,
        "grid": list(grid.thresholds),
        "dedup_tol": args.dedup_tol,
        "in_gap_ok": rep.in_gap_ok,
        **cert.to_dict(),
    }
    _emit(args, report, f"{cert.verdict}: delta={args.delta:g}, gamma/2={cert.threshold:.6g}")


def cmd_budget(args):
    series = _series(args)
    grid = _grid(args)
    m_star = args.m_star if args.m_star is not None else max(f.m for f in series)
    prof = local_density(series, grid, args.delta)
    raw = global_change_budget(series, grid, args.delta, m_star, args.k)
    value, overflow = saturate(raw)
    report = {
        "command": "budget",
        "input": args.input,
        "grid": list(grid.thresholds),
        "delta": args.delta,
        "m_star": m_star,
        "k": args.k,
        "n_t": len(series),
        "lambdas": prof.values,
        "budget": value,
        "budget_exact": str(raw),
        "overflow": overflow,
    }
    _emit(args, report, f"l1 budget for beta_{args.k}: {raw}")


def cmd_noise_bound(args):
    if args.input is not None or args.gamma_grid is None:
        series = _series(args)
        grid = _grid(args)
        gamma_grid = clearance_report(series, grid, args.dedup_tol).gamma_grid
        m = args.m if args.m is not None else max(f.m for f in series)
        n_t = args.nt if args.nt is not None else len(series)
        d = args.d if args.d is not None else series.dim
    else:
        gamma_grid = args.gamma_grid
        if args.m is None or args.nt is None:
            raise DomainError("--gamma-grid mode needs --m and --nt")
        m, n_t, d = args.m, args.nt, args.d or 2
    tau = tau_star(gamma_grid, args.sigma, d)
    rep = global_prob_bound(m, n_t, tau, gamma_grid)
    report = {"command": "noise-bound", "sigma": args.sigma, "d": d, "m": m, "n_t": n_t, **rep.to_dict()}
    if args.target is not None:
        report["target"] = args.target
        report["required_tau"] = required_tau_for_confidence(m, n_t, args.target)
    _emit(args, report, f"tau*={tau:.4f} bound={rep.global_bound:.3g} vacuous={rep.vacuous}")


def cmd_mc(args):
    series = _series(args)
    grid = _grid(args)
    model = NoiseModel(sigma=args.sigma, d=series.dim, seed=args.seed)
    rep = mc_stability_experiment(series, grid, model, args.trials, args.k_max)
    report = {"command": "mc", "input": args.input, **rep}
    _emit(args, report, f"change_rate={rep['change_rate']:.4g} over {args.trials} trials, bound={rep['theoretical_bound']:.3g}")


def _load_event(path: str) -> ChurnEvent:
    try:
        return ChurnEvent.from_json(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DomainError(f"cannot read event {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"event file is not valid JSON: {exc}") from None


def cmd_churn_bound(args):
    if args.event is not None:
        series = _series(args)
        grid = _grid(args)
        event = _load_event(args.event)
        budget = churn_budget(series, event, grid, args.k)
        report = {
            "command": "churn-bound",
            "input": args.input,
            "grid": list(grid.thresholds),
            "k": args.k,
            "event": event.to_dict(),
            **budget.to_dict(),
        }
        _emit(args, report, f"global churn bound for beta_{args.k}: {budget.global_l1}")
        return
    needed = ("nt", "event_index", "q", "lambdas")
    if any(getattr(args, n) is None for n in needed):
        raise DomainError("churn-bound needs --event with input, or --nt --event-index --q --lambdas")
    lams = [int(x) for x in args.lambdas.split(",")]
    bound = global_churn_bound(args.nt, args.event_index, args.q, lams, args.k)
    report = {
        "command": "churn-bound",
        "n_t": args.nt,
        "event_index": args.event_index,
        "q": args.q,
        "lambdas": lams,
        "k": args.k,
        "global_l1": bound,
    }
    if args.m is not None:
        report["worst_case_betti"] = worst_case_betti_budget(args.q, args.m, args.k, args.kind)
    _emit(args, report, f"global churn bound for beta_{args.k}: {bound}")


def cmd_churn_apply(args):
    series = _series(args)
    event = _load_event(args.event)
    after = apply_event(series, event)
    _emit_bytes(serialize_point_cloud_csv(after), args.output)
    print(f"applied {event.kind} of {event.q} point(s) from time index {event.time_index}", file=sys.stderr)


def cmd_gen(args):
    if args.model == "polygon":
        series = breathing_polygon(BreathingPolygonSpec(m=args.m, n_t=args.nt, closed=args.closed))
        _emit_bytes(serialize_point_cloud_csv(series), args.output)
        print(f"breathing {args.m}-gon, {args.nt} frames", file=sys.stderr)
        return
    sc = pentagon_insertion_scenario(n_t=args.nt)
    _emit_bytes(serialize_point_cloud_csv(sc.base), args.output)
    if args.event_out:
        Path(args.event_out).write_text(sc.event.to_json() + "\n", encoding="utf-8")
    print(f"pentagon base cloud; event: {sc.event.to_json()}", file=sys.stderr)


def cmd_feasibility(args):
    spec = FeasibilitySpec(
        m=args.m,
        n_t=args.nt,
        rings=tuple(range(1, args.rings + 1)),
        pixel_size=args.pixel_size,
        pixel_error=args.pixel_error,
        k=args.k,
    )
    rep = epithelial_feasibility(spec)
    _emit(args, {"command": "feasibility", **rep}, f"global budget {rep['global_budget']:,}, per cell {rep['per_cell_average']:.4g}")


def cmd_diff(args):
    a = parse_crocker(_read_input(args.a), k=args.k)
    b = parse_crocker(_read_input(args.b), k=args.k)
    delta = diff_map(a, b)
    if args.svg:
        Path(args.svg).write_bytes(emit_heatmap_svg(delta, signed=True, scales=a.grid.thresholds, times=a.time_values, title="diff"))
    report = {
        "command": "diff",
        "a": args.a,
        "b": args.b,
        "scales": list(a.grid.thresholds),
        "times": list(a.time_values),
        "diff": delta.tolist(),
        "l1": int(np.abs(delta).sum()),
        "nonzero_cells": int((delta != 0).sum()),
    }
    _emit(args, report, f"l1 distance {report['l1']} over {report['nonzero_cells']} cells")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crocker-stab", description="Crocker diagrams and their stability guarantees.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(sp, grid=True):
        sp.add_argument("--input", "-i", help="point-cloud CSV (default: stdin)")
        if grid:
            sp.add_argument("--grid", default="0.1:1.5:15", help="start:stop:count or a comma list")
        sp.add_argument("--dedup-tol", type=float, default=DEFAULT_DEDUP_TOL)
        sp.add_argument("--out-dir", help=f"write report.json here (env {OUT_DIR_ENV})")
        return sp

    sp = with_input(sub.add_parser("crocker", help="build Crocker diagrams"))
    sp.add_argument("--k-max", type=int, default=1)
    sp.add_argument("--emit", default="csv,json,svg", help="files to write with --out-dir")
    sp.set_defaults(func=cmd_crocker)

    sp = with_input(sub.add_parser("clearance", help="grid clearance report"))
    sp.set_defaults(func=cmd_clearance)

    sp = with_input(sub.add_parser("certify", help="exact-stability certificate for a displacement bound"))
    sp.add_argument("--delta", type=float, required=True)
    sp.set_defaults(func=cmd_certify)

    sp = with_input(sub.add_parser("budget", help="geometry-aware l1 change budget"))
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--m-star", type=int, help="number of moved points (default: all)")
    sp.add_argument("--k", type=int, default=1)
    sp.set_defaults(func=cmd_budget)

    sp = with_input(sub.add_parser("noise-bound", help="Gaussian-noise probability bound"))
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--gamma-grid", type=float, help="skip input and use this clearance")
    sp.add_argument("--m", type=int)
    sp.add_argument("--nt", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--target", type=float, help="also report the tau needed for this probability")
    sp.set_defaults(func=cmd_noise_bound)

    sp = with_input(sub.add_parser("mc", help="Monte Carlo noise experiment"))
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--k-max", type=int, default=1)
    sp.set_defaults(func=cmd_mc)

    sp = with_input(sub.add_parser("churn-bound", help="insertion/deletion budgets"))
    sp.add_argument("--event", help="event JSON file")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--nt", type=int)
    sp.add_argument("--event-index", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--kind", default="INSERT", choices=["INSERT", "DELETE"])
    sp.add_argument("--lambdas", help="comma list of local densities")
    sp.set_defaults(func=cmd_churn_bound)

    sp = sub.add_parser("churn-apply", help="apply an event and write the new CSV")
    sp.add_argument("--input", "-i")
    sp.add_argument("--event", required=True)
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_churn_apply)

    sp = sub.add_parser("gen", help="generate a model point cloud")
    sp.add_argument("model", choices=["polygon", "pentagon-insertion"])
    sp.add_argument("--m", type=int, default=5)
    sp.add_argument("--nt", type=int, default=51)
    sp.add_argument("--closed", action="store_true", help="sample both t=0 and t=2pi")
    sp.add_argument("--event-out", help="pentagon-insertion: write the event JSON here")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("feasibility", help="epithelial sheet budget arithmetic")
    sp.add_argument("--m", type=int, default=500)
    sp.add_argument("--nt", type=int, default=51)
    sp.add_argument("--rings", type=int, default=6)
    sp.add_argument("--pixel-size", type=float, default=0.44)
    sp.add_argument("--pixel-error", type=float, default=3.0)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--out-dir")
    sp.set_defaults(func=cmd_feasibility)

    sp = sub.add_parser("diff", help="signed difference of two Crocker diagrams")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--k", type=int, default=0, help="homology dimension for CSV inputs (JSON carries its own)")
    sp.add_argument("--svg", help="write a diverging heat map here")
    sp.add_argument("--out-dir")
    sp.set_defaults(func=cmd_diff)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
