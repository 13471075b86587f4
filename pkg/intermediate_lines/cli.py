"""
命令行入口 - Command-line front end.

    python main.py invariants --curve ellipse:2,1
    python main.py envelope --curve bean --alpha 0.5,0.6 --out out/
    python main.py sweep --config config.yaml
    python main.py classify jets.json

Exit codes: 0 ok, 2 configuration or invariant error, 3 numerical failure.
"""

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

from .affine import invariant_table
from .config import ConfigError, ConfigManager, CurveSpec, RunConfig
from .curves import ParamCurve, curve_from_spec
from .envelope import EnvelopeOptions, build_envelope
from .errors import EILError, InputError
from .event_tracker import GapTracker
from .models import EnvelopeBranch, MongeJetPair, SingularityClass, SingularityVerdict, Tag
from .output import (
    envelope_report,
    write_envelope_csv,
    write_invariants_csv,
    write_json,
    write_pairs_csv,
    write_svg,
)
from .pair_locus import NoBranchFound, parallel_pairs
from .run_logger import get_run_logger
from .singularities import (
    EQUALITY_TOL,
    classify_nonparallel,
    classify_parallel,
    classify_parallel_inflection,
    default_alpha_grid,
    disjointness_report,
    scan_branches,
    sweep_report,
    versality_report,
)

logger = logging.getLogger(__name__)


def parse_curve(text: str) -> CurveSpec:
    """'bean' or 'ellipse:2,1' -> CurveSpec."""
    name, _, params = text.partition(":")
    try:
        values = [float(p) for p in params.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"Invalid curve parameters: {params}")
    return CurveSpec(name=name.strip(), params=values)


def parse_alphas(text: str) -> list[float]:
    try:
        return [float(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise ConfigError(f"Invalid alpha list: {text}")


def load_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the YAML file, then command-line flags."""
    config = ConfigManager(args.config).load() if args.config else RunConfig()
    config = config.merge({
        "grid_n": args.grid,
        "alphas": parse_alphas(args.alpha) if args.alpha else None,
        "output_dir": args.out,
        "workers": args.workers,
        "curve": parse_curve(args.curve) if args.curve else None,
    })
    errors = config.validate()
    if errors:
        raise ConfigError(f"Invalid configuration: {'; '.join(errors)}")
    return config


def _output_dir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _alpha_tag(alpha: float) -> str:
    return f"{alpha:.6g}"


def envelope_options(config: RunConfig, tracker: GapTracker | None = None) -> EnvelopeOptions:
    return EnvelopeOptions(
        grid_n=config.grid_n,
        samples=config.samples,
        tol_refine=config.tolerances.refine,
        online_tol=config.tolerances.online,
        detm_tol=config.tolerances.detm,
        tracker=tracker,
    )


# Subcommands

def cmd_invariants(config: RunConfig) -> dict[str, Any]:
    curve = curve_from_spec(config.curve.to_mapping())
    rows = invariant_table(curve, config.samples)
    out = _output_dir(config)
    if config.emit.csv:
        write_invariants_csv(out / f"invariants_{curve.label}.csv", rows)
    return {"curve": curve.label, "points": len(rows)}


def _envelope_for(curve: ParamCurve, alpha: float, options: EnvelopeOptions) -> tuple[list[EnvelopeBranch], float]:
    branches = build_envelope(curve, alpha, options)
    scan_branches(branches, options.tracker, alpha)
    return branches, disjointness_report(branches, alpha)


def cmd_envelope(config: RunConfig) -> dict[str, Any]:
    curve = curve_from_spec(config.curve.to_mapping())
    if not curve.closed:
        raise InputError(f"[{curve.label}] the envelope command requires a closed curve")
    tracker = GapTracker()
    options = envelope_options(config, tracker)
    try:
        options.parallel = parallel_pairs(curve, config.grid_n, tol_refine=config.tolerances.refine)
    except NoBranchFound as e:
        logger.warning("[%s] %s", curve.label, e)
        options.parallel = []

    if config.workers > 1 and len(config.alphas) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda a: _envelope_for(curve, a, options), config.alphas))
    else:
        results = [_envelope_for(curve, a, options) for a in config.alphas]

    # single writer, alpha order
    out = _output_dir(config)
    if config.emit.csv and options.parallel:
        write_pairs_csv(out / f"pairs_{curve.label}_parallel.csv", options.parallel)
    branch_count = cusp_count = 0
    for alpha, (branches, disjointness) in zip(config.alphas, results):
        stem = f"{curve.label}_a{_alpha_tag(alpha)}"
        if config.emit.csv:
            write_envelope_csv(out / f"envelope_{stem}.csv", branches)
            transversal = [b.pairs for b in branches if b.tag is Tag.AEIL and b.pairs is not None]
            if transversal:
                write_pairs_csv(out / f"pairs_{stem}_transversal.csv", transversal)
        if config.emit.json:
            gaps = [e for e in tracker.get_stats().events if e.alpha == alpha]
            summary = {"total_gaps": len(gaps), "by_kind": {}}
            for event in gaps:
                summary["by_kind"][event.kind] = summary["by_kind"].get(event.kind, 0) + 1
            summary["by_kind"] = dict(sorted(summary["by_kind"].items()))
            write_json(out / f"envelope_{stem}.json", envelope_report(curve, alpha, branches, disjointness, summary))
        if config.emit.svg:
            write_svg(out / f"envelope_{stem}.svg", curve, branches, alpha)
        branch_count += len(branches)
        cusp_count += sum(len(b.cusp_markers) for b in branches)
    return {"curve": curve.label, "branches": branch_count, "cusps": cusp_count, "gaps": tracker.count()}


def cmd_sweep(config: RunConfig) -> dict[str, Any]:
    curve = curve_from_spec(config.curve.to_mapping())
    tracker = GapTracker()
    alphas = config.sweep.alphas
    if alphas is None:
        alphas = default_alpha_grid(config.sweep.points)
    result = sweep_report(curve, alphas, envelope_options(config, tracker),
                          config.sweep.bisect_tol, config.workers)
    out = _output_dir(config)
    if config.emit.json:
        write_json(out / f"sweep_{curve.label}.json", {
            "curve": curve.label,
            "grid_n": config.grid_n,
            "alphas": alphas,
            "events": [e.to_dict() for e in result.events],
            "inventory": result.inventory,
            "gaps": tracker.get_stats().get_summary(),
        })
    return {"curve": curve.label, "events": len(result.events), "gaps": tracker.count()}


def classify_jets(entry: dict[str, Any], tol: float = EQUALITY_TOL) -> SingularityVerdict:
    """
    Classify one jet pair. The optional "case" key picks the classifier
    ("nonparallel", "parallel" or "parallel_inflection"); otherwise b1 and
    p1_inflection decide. tol is the equality tolerance of every test.
    """
    entry = dict(entry)
    case = entry.pop("case", None)
    try:
        m = MongeJetPair(**entry)
    except TypeError as e:
        raise ConfigError(f"Invalid jet pair: {e}")
    if case is None:
        if m.b1 != 0.0:
            case = "nonparallel"
        else:
            case = "parallel_inflection" if m.p1_inflection else "parallel"
    if case == "nonparallel":
        verdict = classify_nonparallel(m, tol)
        if verdict.klass is SingularityClass.ORDINARY_CUSP:
            report = versality_report(m, tol)
            verdict.versal = report["rank_versal"]
            verdict.witness.update({k: report[k] for k in ("m11", "m12", "m13", "rank", "a3_critical")})
        return verdict
    if case == "parallel":
        return classify_parallel(m, tol)
    if case == "parallel_inflection":
        return classify_parallel_inflection(m, tol)
    raise ConfigError(f"Unknown classification case: {case}")


def cmd_classify(path: str, config: RunConfig) -> dict[str, Any]:
    source = Path(path)
    try:
        document = json.loads(source.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"Jet file not found: {source}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in jet file: {e}")
    entries = document if isinstance(document, list) else [document]
    if not all(isinstance(e, dict) for e in entries):
        raise ConfigError("Jet file must hold an object or a list of objects")
    verdicts = [classify_jets(e, config.tolerances.equality).to_dict() for e in entries]
    payload = {"source": source.name, "verdicts": verdicts}
    if config.emit.json:
        write_json(_output_dir(config) / f"classify_{source.stem}.json", payload)
    print(json.dumps(verdicts if len(verdicts) > 1 else verdicts[0], indent=2, default=str))
    return {"verdicts": len(verdicts)}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML configuration file")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--grid", type=int, help="Tracing grid size (>= 64)")
    common.add_argument("--alpha", help="Comma-separated alpha values in (0, 1)")
    common.add_argument("--curve", help="Built-in curve, e.g. bean or ellipse:2,1")
    common.add_argument("--workers", type=int, help="Threads used across alpha values")
    common.add_argument("-v", "--verbose", action="store_true", help="Log progress to stderr")

    parser = argparse.ArgumentParser(prog="intermediate-lines",
                                     description="Envelopes of intermediate lines of plane curves.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("invariants", parents=[common], help="Affine invariants table (CSV)")
    sub.add_parser("envelope", parents=[common], help="AEIL / IPTL / CTL per alpha (CSV, JSON, SVG)")
    sub.add_parser("sweep", parents=[common], help="Cusp births and deaths over alpha (JSON)")
    classify = sub.add_parser("classify", parents=[common], help="Classify Monge jet pairs (JSON)")
    classify.add_argument("jets", help="JSON file with one jet pair or a list of them")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    run_logger = get_run_logger(args.command)
    start = time.perf_counter()
    config: RunConfig | None = None
    try:
        config = load_config(args)
        if args.command == "invariants":
            counts = cmd_invariants(config)
        elif args.command == "envelope":
            counts = cmd_envelope(config)
        elif args.command == "sweep":
            counts = cmd_sweep(config)
        else:
            counts = cmd_classify(args.jets, config)
    except EILError as e:
        print(f"error: {e}", file=sys.stderr)
        run_logger.log_run(
            config.curve.name if config else None, config.alphas if config else None,
            config.grid_n if config else None, (time.perf_counter() - start) * 1000, False, str(e),
        )
        return getattr(e, "exit_code", 3)
    run_logger.log_run(
        counts.pop("curve", config.curve.name), config.alphas, config.grid_n,
        (time.perf_counter() - start) * 1000, True, **counts,
    )
    return 0
