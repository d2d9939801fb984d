"""Command line interface: the pipeline as file-based subcommands.

All inter-stage state flows through JSON and N-Triples files; every
subcommand is deterministic for fixed inputs, flags and seed, and JSON
outputs embed the tool version and the effective configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .aggregate import (
    DEFAULT_BOUNDARIES,
    bin_concepts_into_regions,
    estimate_probabilities,
    load_profiles,
    load_regionset,
    profiles_to_rows,
    regionset_to_dict,
    aggregate_transitions,
)
from .diff import DEFAULT_THETA, changeset_to_dict, diff_versions, load_changeset
from .errors import BadConfigError, ToolkitError
from .evaluate import evaluate_moves, load_gold_standard
from .ntriples import parse_ntriples
from .plots import render_report
from .scheduling import (
    DEFAULT_EPSILON,
    STRATEGIES,
    STRATEGY_REGION,
    FetchHistory,
    baseline_plan,
    load_history,
    region_plan,
)
from .simulate import DETECTION_DIFF, DETECTION_MODELS, run_simulation
from .synth import SyntheticConfig, generate_synthetic_corpus, read_corpus, write_corpus

_STRATEGY_FLAGS = {name.replace("_", "-"): name for name in STRATEGIES}

_DEFAULTS = {
    "theta": DEFAULT_THETA,
    "bins": DEFAULT_BOUNDARIES,
    "epsilon": DEFAULT_EPSILON,
    "budget": None,
    "weights": None,
    "seed": 0,
    "strategy": STRATEGY_REGION,
    "strict": False,
    "detection": DETECTION_DIFF,
    "warmup": 1,
    "listing": True,
}


def _parse_bins(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated boundaries, e.g. 0.01,0.1")
    return float(parts[0]), float(parts[1])


def _parse_weights(text: str) -> dict[str, float]:
    weights: dict[str, float] = {}
    for item in text.split(","):
        if not item:
            continue
        try:
            name, value = item.split("=")
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"bad weight {item!r}; expected e.g. move=1,update=0.5"
            ) from None
        weights[name.strip()] = float(value)
    return weights


def _add_common(parser: argparse.ArgumentParser, *names: str) -> None:
    if "theta" in names:
        parser.add_argument(
            "--theta", type=float, default=None,
            help=f"move/renew matching threshold in (0, 1] (default {_DEFAULTS['theta']})",
        )
    if "bins" in names:
        parser.add_argument(
            "--bins", type=_parse_bins, default=None, metavar="T1,T2",
            help="region rate boundaries (default 0.01,0.1)",
        )
    if "epsilon" in names:
        parser.add_argument(
            "--epsilon", type=float, default=None,
            help=f"exploration fraction of the budget (default {_DEFAULTS['epsilon']})",
        )
    if "budget" in names:
        parser.add_argument(
            "--budget", type=int, default=None,
            help="resources fetchable per monitoring cycle (required)",
        )
    if "weights" in names:
        parser.add_argument(
            "--weights", type=_parse_weights, default=None, metavar="TYPE=W,...",
            help="use-case weights, e.g. move=1,update=0.5; unmentioned types get 0 "
                 "(default: uniform over all five types)",
        )
    if "seed" in names:
        parser.add_argument(
            "--seed", type=int, default=None,
            help=f"random seed (default {_DEFAULTS['seed']})",
        )
    if "strategy" in names:
        parser.add_argument(
            "--strategy", choices=sorted(_STRATEGY_FLAGS), default=None,
            help=f"scheduling strategy (default {_DEFAULTS['strategy']})",
        )
    if "strict" in names:
        parser.add_argument(
            "--strict", action="store_true", default=None,
            help="abort on the first malformed N-Triples line (default: skip and count)",
        )
    if "detection" in names:
        parser.add_argument(
            "--detection", choices=DETECTION_MODELS, default=None,
            help=f"detection model (default {_DEFAULTS['detection']})",
        )
    parser.add_argument(
        "--config", default=None, metavar="CFG.JSON",
        help="JSON config file; explicit flags override file values",
    )


class _Resolver:
    """Flag > config file > built-in default, recording the effective values."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file_config = {}
        if getattr(args, "config", None):
            with open(args.config, "r", encoding="utf-8") as fh:
                self.file_config = json.load(fh)
        self.effective: dict = {}

    def get(self, name: str, required: bool = False):
        value = getattr(self.args, name, None)
        if value is None:
            value = self.file_config.get(name)
        if value is None:
            value = _DEFAULTS.get(name)
        if name == "bins" and isinstance(value, (list, tuple)):
            value = (float(value[0]), float(value[1]))
        if name == "strategy" and isinstance(value, str):
            value = _STRATEGY_FLAGS.get(value, value)
        if required and value is None:
            raise BadConfigError(f"--{name} is required")
        self.effective[name] = list(value) if isinstance(value, tuple) else value
        return value


def _dump_json(payload: dict, out_path: str | Path, config: dict) -> None:
    document = {"tool_version": __version__, "config": config}
    document.update(payload)
    text = json.dumps(document, sort_keys=True, indent=2) + "\n"
    Path(out_path).write_text(text, encoding="utf-8")


def _load_json(path: str | Path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# --- subcommands -------------------------------------------------------------


def cmd_diff(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    theta = resolver.get("theta")
    strict = bool(resolver.get("strict"))
    v1 = parse_ntriples(args.v1, Path(args.v1).stem, strict=strict)
    v2 = parse_ntriples(args.v2, Path(args.v2).stem, strict=strict)
    changeset = diff_versions(v1, v2, theta)
    _dump_json(changeset_to_dict(changeset), args.out, resolver.effective)

    counts = changeset.count_by_type()
    print(
        "changes: "
        + " ".join(f"{name}={counts[name]}" for name in ("create", "remove", "update", "move", "renew"))
    )
    print(
        f"triples: added={len(changeset.triples_added)} "
        f"deleted={len(changeset.triples_deleted)}"
    )
    for label, version in (("v1", v1), ("v2", v2)):
        report = version.parse_report
        if report and report.skipped():
            print(
                f"warning: {label}: skipped {report.malformed_count} malformed and "
                f"{report.blank_subject_count} blank-subject line(s)",
                file=sys.stderr,
            )
    print(f"wrote {args.out}")
    return 0


def cmd_aggregate(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    strict = bool(resolver.get("strict"))
    changesets = [load_changeset(path) for path in args.changesets]
    versions = [parse_ntriples(path, Path(path).stem, strict=strict) for path in args.versions]
    records = aggregate_transitions(changesets, versions)
    profiles = estimate_probabilities(records)
    _dump_json(
        {"profiles": profiles_to_rows(profiles), "transitions": len(records)},
        args.out,
        resolver.effective,
    )
    print(f"wrote {args.out} ({len(profiles)} concept profiles over {len(records)} transitions)")
    return 0


def cmd_regions(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    bins = resolver.get("bins")
    strict = bool(resolver.get("strict"))
    profiles = load_profiles(args.profiles)
    reference = parse_ntriples(args.reference, Path(args.reference).stem, strict=strict)
    regions = bin_concepts_into_regions(
        profiles, bins, reference, no_evidence_bin=args.no_evidence_bin
    )
    resolver.effective["no_evidence_bin"] = args.no_evidence_bin
    _dump_json(regionset_to_dict(regions), args.out, resolver.effective)
    print(f"wrote {args.out} ({len(regions.all_regions())} regions)")
    return 0


def cmd_schedule(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    budget = resolver.get("budget", required=True)
    epsilon = resolver.get("epsilon")
    weights = resolver.get("weights")
    strategy = resolver.get("strategy")
    seed = resolver.get("seed")
    regions = load_regionset(args.regions)
    profiles = load_profiles(args.profiles)
    history = load_history(args.history) if args.history else FetchHistory()
    resolver.effective["cycle"] = args.cycle

    if strategy == STRATEGY_REGION:
        plan = region_plan(
            regions, profiles, weights, budget, epsilon, history, cycle_index=args.cycle
        )
    else:
        universe = sorted(
            {r for members in regions.concept_members.values() for r in members}
        )
        plan = baseline_plan(
            strategy, universe, history, budget, seed=seed, cycle_index=args.cycle
        )
    _dump_json(plan.to_dict(), args.out, resolver.effective)
    print(f"wrote {args.out} (quota {plan.total_quota()} across {len(plan.allocations)} allocations)")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    budget = resolver.get("budget", required=True)
    theta = resolver.get("theta")
    epsilon = resolver.get("epsilon")
    bins = resolver.get("bins")
    weights = resolver.get("weights")
    seed = resolver.get("seed")
    strategy = resolver.get("strategy")
    detection = resolver.get("detection")
    warmup = args.warmup if args.warmup is not None else _DEFAULTS["warmup"]
    resolver.effective["warmup"] = warmup
    listing = not args.no_listing
    resolver.effective["listing"] = listing

    if args.corpus:
        versions, truth = read_corpus(args.corpus)
    else:
        config = SyntheticConfig.from_dict(_load_json(args.synthetic))
        versions, truth = generate_synthetic_corpus(config)
        if args.emit_corpus:
            write_corpus(versions, truth, args.emit_corpus)

    result = run_simulation(
        versions,
        truth,
        strategy,
        budget,
        epsilon=epsilon,
        weights=weights,
        boundaries=bins,
        warmup=warmup,
        detection=detection,
        theta=theta,
        seed=seed,
        listing=listing,
    )
    _dump_json(result.to_dict(), args.out, resolver.effective)
    overall = result.cumulative.overall
    print(
        f"strategy={strategy} cumulative "
        f"P={overall.precision:.4f} R={overall.recall:.4f} F={overall.f_measure:.4f} "
        f"optimal_reference_f={result.optimal_reference_f:.4f}"
    )
    print(f"wrote {args.out}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    changeset = load_changeset(args.changeset)
    gold = load_gold_standard(args.gold)
    report = evaluate_moves(changeset, gold)
    _dump_json(
        {
            "report": report.to_dict(),
            "detected": len(changeset.move_like_pairs()),
            "gold": len(gold.move_pairs),
        },
        args.out,
        resolver.effective,
    )
    print(f"P={report.precision:.4f} R={report.recall:.4f} F={report.f_measure:.4f}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    config = SyntheticConfig.from_dict(_load_json(args.config_file))
    versions, truth = generate_synthetic_corpus(config)
    out = write_corpus(versions, truth, args.out_dir)
    print(f"wrote corpus with {len(versions)} versions to {out}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    results = [_load_json(path) for path in args.results]
    created = render_report(results, args.out_dir)
    for path in created:
        print(f"wrote {path}")
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ldregions",
        description="Detect and classify changes between RDF dataset versions, "
        "mine change regions, and schedule budget-constrained monitoring.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diff", help="classify the changes between two N-Triples snapshots")
    p.add_argument("v1", help="source .nt file (optionally gzipped)")
    p.add_argument("v2", help="target .nt file (optionally gzipped)")
    p.add_argument("--out", default="changeset.json", help="output path (default changeset.json)")
    _add_common(p, "theta", "strict")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("aggregate", help="pool changesets into per-concept change profiles")
    p.add_argument("--changesets", nargs="+", required=True, help="changeset JSON files, in order")
    p.add_argument("--versions", nargs="+", required=True, help="the chained .nt snapshots, in order")
    p.add_argument("--out", default="profiles.json", help="output path (default profiles.json)")
    _add_common(p, "strict")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("regions", help="bin concepts into static/low/high regions per change type")
    p.add_argument("profiles", help="profiles.json from the aggregate step")
    p.add_argument("reference", help=".nt snapshot the regions are materialized against")
    p.add_argument("--no-evidence-bin", choices=("static", "low", "high"), default="high",
                   help="bin for concepts with no exposure at all (default high)")
    p.add_argument("--out", default="regions.json", help="output path (default regions.json)")
    _add_common(p, "bins", "strict")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("schedule", help="turn regions into a budgeted fetch plan for one cycle")
    p.add_argument("regions", help="regions.json")
    p.add_argument("profiles", help="profiles.json")
    p.add_argument("--history", default=None, help="optional history.json with fetch bookkeeping")
    p.add_argument("--cycle", type=int, default=0, help="cycle index recorded in the plan (default 0)")
    p.add_argument("--out", default="plan.json", help="output path (default plan.json)")
    _add_common(p, "budget", "epsilon", "weights", "strategy", "seed")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("simulate", help="replay a corpus under a strategy and score detections")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--corpus", default=None, help="corpus directory with manifest.json")
    source.add_argument("--synthetic", default=None, help="synthetic config JSON")
    p.add_argument("--emit-corpus", default=None, help="also write the generated corpus here")
    p.add_argument("--warmup", type=int, default=None,
                   help=f"bootstrap transitions before scoring (default {_DEFAULTS['warmup']})")
    p.add_argument("--no-listing", action="store_true",
                   help="disable the new-resource listing channel")
    p.add_argument("--out", default="result.json", help="output path (default result.json)")
    _add_common(p, "budget", "theta", "epsilon", "bins", "weights", "strategy", "seed", "detection")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="score a changeset's move+renew pairs against a gold TSV")
    p.add_argument("changeset", help="changeset.json from the diff step")
    p.add_argument("gold", help="gold standard TSV: old<TAB>new per line, # comments")
    p.add_argument("--out", default="report.json", help="output path (default report.json)")
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic evolving corpus to files")
    p.add_argument("config_file", help="synthetic config JSON")
    p.add_argument("--out-dir", required=True, help="corpus output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="render figures and CSV tables from simulation results")
    p.add_argument("results", nargs="+", help="result.json files, one per strategy")
    p.add_argument("--out-dir", required=True, help="report output directory")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ToolkitError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
