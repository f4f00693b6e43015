"""Command-line interface.

Subcommands: ``simulate`` (one tessellation run, JSON/SVG output),
``palm`` (batch typical-segment samples, CSV), ``analytic`` (count
probabilities and moments, CSV), ``mecke`` (two-sided identity check),
``verify`` (acceptance suite) and ``export-svg`` (render a saved state).

Exit codes: 0 success, 1 configuration/validation error, 2 runtime error,
3 acceptance-suite failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import acceptance, analytics, palm, tessio
from .analytics import DistributionSpec, QuadratureSettings
from .config import config_hash, load_toml, validate, window_from_spec
from .engine import run_local_stit
from .errors import ConfigError, StitLabError
from .geometry import rectangle
from .measure import (
    axis_parallel_measure,
    isotropic_measure,
    measure_from_config,
)
from .parallel import default_threads
from .streams import stream
from .verify import (
    BoundedExpOfMeasure,
    NestedFunctional,
    SimpleFunctional,
    SinSquaredProfile,
    ci_overlap_report,
    mecke_lhs,
    mecke_rhs,
)


def _parse_n_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    if "," in text:
        return [int(x) for x in text.split(",")]
    return [int(text)]


def _measure_flag(name: str, dim: int):
    if name == "axis":
        return axis_parallel_measure(dim)
    if name in ("iso", "isotropic"):
        return isotropic_measure(dim)
    raise ConfigError(f"unknown measure {name!r}; use a config file for discrete atoms")


def _cmd_simulate(args) -> int:
    if args.config:
        cfg = load_toml(args.config)
        validate(cfg, "simulate")
        sim = cfg["simulate"]
        dim = sim["dimension"]
        window = window_from_spec(sim["window"])
        measure = measure_from_config(cfg["measure"], dim)
        t_end, seed = sim["t"], sim["seed"]
        out, svg = sim.get("out", args.out), sim.get("svg", args.svg)
        max_cells = sim.get("max_cells", 10_000_000)
        chash = config_hash(cfg)
    else:
        dim = args.d
        if args.window:
            window = window_from_spec(args.window)
        else:
            window = rectangle(0, 0, 20, 20)
        measure = _measure_flag(args.measure, dim)
        t_end, seed, out, svg = args.t, args.seed, args.out, args.svg
        max_cells = args.max_cells
        chash = config_hash({"measure": args.measure, "t": t_end,
                             "window": [float(x) for x in window.vertices.ravel()],
                             "d": dim})
    rng = stream(seed, "simulate")
    state = run_local_stit(window, measure, t_end, rng, max_cells=max_cells)
    print(f"cells={len(state.live_ids)} faces={len(state.ledger)} "
          f"t={state.time} config_hash={chash}")
    if out:
        doc = tessio.state_to_dict(state)
        doc["config_hash"] = chash
        doc["meta"] = {"timestamp": time.time()}
        with open(out, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")
    if svg:
        tessio.save_svg(state, svg)
    return 0


def _cmd_palm(args) -> int:
    if args.config:
        cfg = load_toml(args.config)
        validate(cfg, "palm")
        p = cfg["palm"]
        d, j, t, samples, seed = p["d"], p["j"], p["t"], p["samples"], p["seed"]
        out = p.get("out", args.out)
    else:
        d, j, t, samples, seed, out = (args.d, args.j, args.t, args.samples,
                                       args.seed, args.out)
    rng = stream(seed, "palm-batch")
    s, length, counts = palm.sample_batch(d, j, t, samples, rng)
    if out:
        with open(out, "w", newline="") as fh:
            palm.write_csv(fh, d, s, length, counts)
    else:
        palm.write_csv(sys.stdout, d, s, length, counts)
    return 0


def _cmd_analytic(args) -> int:
    quad = QuadratureSettings(abs_tol=args.abs_tol, rel_tol=args.abs_tol)
    spec = DistributionSpec(args.d, args.j, quadrature=quad)
    rows = []
    if args.what == "p1j":
        for n in _parse_n_range(args.n):
            value, err = analytics.p1j(n, spec, with_error=True)
            rows.append((n, value, err))
        header = "n,probability,error_bound"
    elif args.what == "mean":
        value = analytics.mean_internal_vertices(args.d, args.j)
        rows.append(("mean", value, 0.0))
        header = "quantity,value,error_bound"
    else:
        raise ConfigError(f"unknown analytic quantity {args.what!r}")
    lines = [header] + [f"{a},{b!r},{c!r}" for a, b, c in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_mecke(args) -> int:
    cfg = load_toml(args.config)
    validate(cfg, "mecke")
    m = cfg["mecke"]
    window = window_from_spec(m["window"])
    inner = window_from_spec(m["inner"])
    measure = measure_from_config(cfg["measure"], 2)
    horizon = float(m["horizon"])
    reps = int(m["reps"])
    seed = int(m["seed"])
    grid = np.linspace(0.0, horizon, int(m.get("grid_points", 33)))
    inner_mc = int(m.get("inner_mc", 1))
    threads = args.threads
    if m["variant"] == "simple":
        functional = SimpleFunctional(horizon=horizon,
                                      phi=SinSquaredProfile(horizon),
                                      psi=BoundedExpOfMeasure(), region=inner)
    else:
        functional = NestedFunctional(horizon=horizon,
                                      target_count=int(m.get("target_count", 0)),
                                      region=inner)
    lhs = mecke_lhs(functional, window, inner, measure, reps, seed,
                    name=f"mecke-{m['variant']}-lhs", threads=threads)
    rhs = mecke_rhs(functional, window, inner, measure, reps, seed,
                    s_grid=grid, inner_mc=inner_mc,
                    name=f"mecke-{m['variant']}-rhs", threads=threads)
    report = ci_overlap_report(f"identity, {m['variant']} functional", lhs, rhs,
                               seed=seed)
    doc = {"config_hash": config_hash(cfg), "report": report.to_dict(),
           "meta": {"timestamp": time.time()}}
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if m.get("out"):
        with open(m["out"], "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


def _cmd_verify(args) -> int:
    seed = args.seed
    criteria = None
    out_json, out_md = args.out, args.markdown
    chash = None
    if args.config:
        cfg = load_toml(args.config)
        validate(cfg, "verify")
        v = cfg.get("verify", {})
        seed = v.get("seed", seed)
        criteria = v.get("criteria")
        out_json = v.get("out", out_json)
        out_md = v.get("markdown", out_md)
        chash = config_hash(cfg)
    if args.criteria:
        criteria = _parse_n_range(args.criteria)
    result = acceptance.run_acceptance(master_seed=seed, threads=args.threads,
                                       criteria=criteria)
    meta = {"timestamp": time.time()}
    if chash:
        meta["config_hash"] = chash
    acceptance.write_reports(result, json_path=out_json, md_path=out_md,
                             extra_meta=meta)
    print(result.to_markdown())
    return 0 if result.passed else 3


def _cmd_export_svg(args) -> int:
    state = tessio.load_state(args.infile)
    tessio.save_svg(state, args.out, size=args.size)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stitlab",
        description="Iteration-stable tessellation laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one tessellation and export it")
    p.add_argument("--config")
    p.add_argument("--d", type=int, default=2, choices=(2, 3))
    p.add_argument("--measure", default="axis")
    p.add_argument("--window", type=float, nargs="+")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-cells", type=int, default=10_000_000)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("palm", help="sample typical maximal segments to CSV")
    p.add_argument("--config")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--j", type=int, default=0, choices=(0, 1))
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_palm)

    p = sub.add_parser("analytic", help="evaluate count probabilities / moments")
    p.add_argument("what", choices=("p1j", "mean"))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--j", type=int, required=True, choices=(0, 1))
    p.add_argument("--n", default="0")
    p.add_argument("--abs-tol", type=float, default=1e-8)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_analytic)

    p = sub.add_parser("mecke", help="two-sided division-record identity check")
    p.add_argument("--config", required=True)
    p.add_argument("--threads", type=int, default=default_threads())
    p.set_defaults(fn=_cmd_mecke)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=acceptance.DEFAULT_MASTER_SEED)
    p.add_argument("--criteria", help="subset like 1..3 or 1,4,9")
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--markdown", help="Markdown summary path")
    p.add_argument("--threads", type=int, default=default_threads())
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("export-svg", help="render a saved tessellation")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--size", type=int, default=640)
    p.set_defaults(fn=_cmd_export_svg)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except StitLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
