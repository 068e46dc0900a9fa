"""Command-line interface: hipar fit | eval | predict.

Exit codes: 0 success, 1 input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import sys
import traceback

from .data import NUMERICAL, DataError, load_csv
from .pipeline import RunConfig, cross_validate, deserialize_rules, run_hipar, serialize_rules
from .prediction import predict


def _add_fit_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="input CSV file")
    parser.add_argument("--target", required=True, help="target column name")
    parser.add_argument("--categorical", default="", metavar="a,b",
                        help="comma-separated columns to force categorical")
    parser.add_argument("--min-support", type=float, default=0.1, dest="theta")
    parser.add_argument("--support-bias", type=float, default=1.0, dest="sigma")
    parser.add_argument("--overlap-bias", type=float, default=1.0, dest="omega")
    parser.add_argument("--metric", choices=["rmse", "meae"], default="rmse")
    parser.add_argument("--variant", choices=["standard", "f", "sd"], default="standard")
    parser.add_argument("--sd-q", type=int, default=None, help="rule count for variant sd")
    parser.add_argument("--seed", type=int, default=0)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hipar",
        description="Mine compact sets of hybrid rules (pattern => sparse linear model) "
        "from mixed categorical/numerical tabular data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="mine rules and write a rule file")
    _add_fit_flags(fit)
    fit.add_argument("--rules-out", required=True, help="output rule file (JSON)")

    ev = sub.add_parser("eval", help="cross-validated evaluation report")
    _add_fit_flags(ev)
    ev.add_argument("--folds", type=int, default=10)
    ev.add_argument("--report-out", required=True, help="output report file (JSON)")
    ev.add_argument("--rules-out", default=None,
                    help="optionally also fit on all rows and write a rule file")

    pr = sub.add_parser("predict", help="predict a feature CSV with a rule file")
    pr.add_argument("--rules", required=True, help="rule file written by fit")
    pr.add_argument("--input", required=True, help="feature CSV (same schema minus target)")
    pr.add_argument("--out", required=True, help="output file, one prediction per line")
    return parser


def _config(args: argparse.Namespace, folds: int = 10) -> RunConfig:
    overrides = tuple(x.strip() for x in args.categorical.split(",") if x.strip())
    return RunConfig(
        target=args.target,
        input_path=args.input,
        categorical_overrides=overrides,
        theta=args.theta,
        sigma=args.sigma,
        omega=args.omega,
        metric=args.metric,
        variant=args.variant,
        sd_q=args.sd_q,
        folds=folds,
        seed=args.seed,
    )


def _cmd_fit(args: argparse.Namespace) -> int:
    cfg = _config(args)
    d = load_csv(args.input, args.target, cfg.categorical_overrides)
    selected, predictor = run_hipar(d, cfg)
    serialize_rules(predictor, args.rules_out)
    print(f"wrote {len(selected.chosen)} rules to {args.rules_out}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    cfg = _config(args, folds=args.folds)
    d = load_csv(args.input, args.target, cfg.categorical_overrides)
    report = cross_validate(d, cfg)
    with open(args.report_out, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    if args.rules_out:
        _, predictor = run_hipar(d, cfg)
        serialize_rules(predictor, args.rules_out)
    print(
        f"{cfg.metric} mean reduction {report.mean_reduction:.2f}% / "
        f"median {report.median_reduction:.2f}% over {len(report.folds)} folds"
    )
    return 0


def _read_observations(path: str, predictor) -> list[dict]:
    feature_names = [a.name for a in predictor.schema if a.role == "feature"]
    numeric = {a.name for a in predictor.schema if a.kind == NUMERICAL}
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise DataError(f"{path}: empty file, header row required")
            missing = [n for n in feature_names if n not in reader.fieldnames]
            if missing:
                raise DataError(f"{path}: missing feature columns {missing}")
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    observations = []
    for i, row in enumerate(rows):
        obs: dict[str, object] = {}
        for name in feature_names:
            cell = (row[name] or "").strip()
            if cell == "":
                raise DataError(f"{path}: row {i + 1} has a missing value in column {name!r}")
            if name in numeric:
                try:
                    obs[name] = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: row {i + 1}, column {name!r}: {cell!r} is not numeric"
                    ) from None
            else:
                obs[name] = cell
        observations.append(obs)
    return observations


def _cmd_predict(args: argparse.Namespace) -> int:
    predictor = deserialize_rules(args.rules)
    observations = _read_observations(args.input, predictor)
    with open(args.out, "w", encoding="utf-8") as fh:
        for obs in observations:
            fh.write(repr(predict(predictor, obs)))
            fh.write("\n")
    print(f"wrote {len(observations)} predictions to {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors; that's an input error here
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "eval":
            return _cmd_eval(args)
        return _cmd_predict(args)
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:  # internal invariant violation
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
