"""Command-line entry point.

Exit codes: 0 success, 1 domain error (bad machine file, unknown cohort,
undefined factor, unwritable path...), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from . import __version__, metrics, study
from .dsl import MachineSource, SchemeSyntaxError, parse_machine_with_diagnostics, parse_scheme, serialize_scheme
from .errors import CogAugError
from .gim import DEFAULT_MAX_STEPS, batch_run
from .outputs import OutputSet, randomness

DEFAULT_SEED = 42
DEFAULT_TRIALS = 1000


class UsageError(Exception):
    """Problem with how the tool was invoked (exit 2)."""


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _unsigned_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {value}")
    return value


def _nonnegative_real(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value >= 0 or value == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a finite nonnegative number, got {text}")
    return value


def _threshold(text: str) -> float:
    value = _nonnegative_real(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"must be in (0, 1), got {text}")
    return value


def envelope(subcommand: str, parameters: dict[str, Any], body: dict[str, Any]) -> str:
    doc = {
        "tool": "cogaug",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": parameters,
        "body": body,
    }
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_simulate(args: argparse.Namespace) -> str:
    machine, diagnostics = parse_machine_with_diagnostics(MachineSource.from_path(args.machine_file))
    for d in diagnostics:
        print(d, file=sys.stderr)
    if machine is None:
        raise CogAugError(f"{args.machine_file}: machine file has errors")
    result = batch_run(machine, args.input, args.trials, args.seed, args.max_steps, workers=args.workers)
    lam = randomness(result)
    freqs = result.frequencies()
    if args.format == "csv":
        rows = [(out, n, freqs[out], result.cardinality, lam) for out, n in result.counts.items()]
        return _csv(("output", "count", "frequency", "cardinality", "randomness"), rows)
    params = {
        "machine_file": args.machine_file,
        "input": args.input,
        "trials": args.trials,
        "seed": args.seed,
        "max_steps": args.max_steps,
        "format": args.format,
    }
    body = {
        "input": result.input,
        "trials": result.trials,
        "master_seed": result.master_seed,
        "counts": result.counts,
        "frequencies": freqs,
        "cardinality": result.cardinality,
        "randomness": lam,
    }
    return envelope("simulate", params, body)


def _read_outputs(path: str) -> tuple[dict[str, int], float | None]:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
            counts = doc["body"]["counts"] if "body" in doc else doc["counts"]
            counts = {str(k): int(v) for k, v in counts.items() if int(v) > 0}
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise CogAugError(f"{path}: not a simulate report or counts object ({exc})") from exc
        trials = sum(counts.values())
        lam = randomness(OutputSet("", counts, trials, 0)) if counts else None
        return counts, lam
    counts: dict[str, int] = {}
    rows = csv.reader(io.StringIO(text))
    header = [h.strip() for h in next(rows, [])]
    if header[:2] != ["output", "count"]:
        raise CogAugError(f"{path}: counts CSV must start with header 'output,count'")
    for row in rows:
        if not row:
            continue
        try:
            counts[row[0]] = counts.get(row[0], 0) + int(row[1])
        except (IndexError, ValueError) as exc:
            raise CogAugError(f"{path}:{rows.line_num}: bad counts row") from exc
    return counts, None


def cmd_measure(args: argparse.Namespace) -> str:
    try:
        scheme = parse_scheme(Path(args.scheme_file).read_text(encoding="utf-8"), args.scheme_file)
    except SchemeSyntaxError as exc:
        raise UsageError(str(exc)) from exc
    counts_in, lam = _read_outputs(args.outputs_file)
    counts = metrics.classify(counts_in, scheme)
    report = metrics.measure(counts, scheme.preferred, lam, args.accuracy_threshold, args.concentration_threshold)
    if args.format == "csv":
        rows = [
            (
                cid,
                n,
                report.proportions[cid],
                int(cid == scheme.preferred),
                report.accuracy,
                report.miss_rate,
                report.concentration,
                report.quadrant.value,
                "" if lam is None else lam,
            )
            for cid, n in counts.counts.items()
        ]
        header = (
            "category", "count", "proportion", "preferred",
            "accuracy", "miss_rate", "concentration", "quadrant", "randomness",
        )
        return _csv(header, rows)
    params = {
        "outputs_file": args.outputs_file,
        "scheme_file": args.scheme_file,
        "accuracy_threshold": args.accuracy_threshold,
        "concentration_threshold": args.concentration_threshold,
        "format": args.format,
    }
    body = {"preferred": scheme.preferred, "counts": dict(counts.counts), "total": counts.total, **report.as_dict()}
    return envelope("measure", params, body)


def cmd_compare(args: argparse.Namespace) -> str:
    scheme = study.SKEET_SCHEME
    if args.scheme:
        try:
            scheme = parse_scheme(Path(args.scheme).read_text(encoding="utf-8"), args.scheme)
        except SchemeSyntaxError as exc:
            raise UsageError(str(exc)) from exc
    with open(args.dataset_csv, newline="", encoding="utf-8") as fh:
        dataset = study.ingest_csv(fh, scheme)
    report = study.compare_cohorts(dataset, args.baseline, args.treatment)
    doc = report.as_dict()
    if args.format == "csv":
        cats = scheme.ids
        header = ["cohort", "accuracy", "miss_rate", "accuracy_gain", "precision_gain"]
        header += [f"proportion_{c}" for c in cats]
        rows = [
            [t["cohort"], t["accuracy"], t["miss_rate"], t["accuracy_gain"], t["precision_gain"]]
            + [t["proportions"][c] for c in cats]
            for t in doc["treatments"]
        ]
        return _csv(header, rows)
    params = {
        "dataset_csv": args.dataset_csv,
        "scheme": args.scheme,
        "preferred": scheme.preferred,
        "baseline": args.baseline,
        "treatments": list(args.treatment),
        "format": args.format,
    }
    return envelope("compare", params, doc)


def _factor_value(x: float) -> float | str:
    return "unbounded" if x == metrics.UNBOUNDED else x


def cmd_ledger(args: argparse.Namespace) -> str:
    ledger = metrics.CognitiveLedger(args.wh, args.wc, args.gh, args.gc)
    factors = metrics.augmentation_factors(ledger)
    body = {
        "work_total": factors.work_total,
        "gain_total": factors.gain_total,
        "work_augmentation": _factor_value(factors.work_factor),
        "gain_augmentation": _factor_value(factors.gain_factor),
    }
    if args.format == "csv":
        keys = ("work_human", "work_cog", "gain_human", "gain_cog", *body)
        return _csv(keys, [(args.wh, args.wc, args.gh, args.gc, *body.values())])
    params = {"wh": args.wh, "wc": args.wc, "gh": args.gh, "gc": args.gc, "format": args.format}
    return envelope("ledger", params, body)


def cmd_fixture(args: argparse.Namespace) -> str:
    dataset, scheme = study.case_study_fixture()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cohorts = {
        "problem": study.SKEET_PROBLEM,
        "cohorts": [
            {"id": c.id, "description": c.description, "operators_shown": list(c.operators_shown)}
            for c in dataset.cohorts
        ],
    }
    files = {
        "skeet.csv": study.fixture_csv(),
        "skeet.scheme": serialize_scheme(scheme),
        "cohorts.json": json.dumps(cohorts, indent=2, ensure_ascii=False) + "\n",
    }
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8", newline="\n")
    params = {"out": args.out}
    body = {"files": sorted(str(out / name) for name in files), "records": len(dataset.records)}
    return envelope("fixture", params, body)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cogaug",
        description="Simulate stochastic Turing machines and measure cognitive accuracy and precision.",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def fmt(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("simulate", help="run a machine repeatedly and report its output set", allow_abbrev=False)
    p.add_argument("machine_file")
    p.add_argument("--input", default="", help="input tape contents (default: empty)")
    p.add_argument("--trials", type=_positive_int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=_unsigned_int, default=DEFAULT_SEED)
    p.add_argument("--max-steps", type=_positive_int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--workers", type=_positive_int, default=1, help="threads; does not change results")
    fmt(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("measure", help="classify an output set and report accuracy/precision metrics", allow_abbrev=False)
    p.add_argument("outputs_file", help="simulate JSON report or CSV with header output,count")
    p.add_argument("scheme_file")
    p.add_argument("--accuracy-threshold", type=_threshold, default=0.5)
    p.add_argument("--concentration-threshold", type=_threshold, default=0.5)
    fmt(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("compare", help="compare treatment cohorts against a baseline", allow_abbrev=False)
    p.add_argument("dataset_csv")
    p.add_argument("--baseline", required=True)
    p.add_argument("--treatment", action="append", required=True)
    p.add_argument("--scheme", help="scheme file (default: the built-in F/T/G case-study scheme)")
    fmt(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("ledger", help="totals and augmentation factors from human/artificial work and gain", allow_abbrev=False)
    for flag in ("--wh", "--wc", "--gh", "--gc"):
        p.add_argument(flag, type=_nonnegative_real, required=True)
    fmt(p)
    p.set_defaults(func=cmd_ledger)

    p = sub.add_parser("fixture", help="write the built-in case-study dataset, scheme and operator lists", allow_abbrev=False)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.func(args)
    except UsageError as exc:
        print(f"cogaug {args.subcommand}: usage error: {exc}", file=sys.stderr)
        return 2
    except (CogAugError, OSError) as exc:
        print(f"cogaug {args.subcommand}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
