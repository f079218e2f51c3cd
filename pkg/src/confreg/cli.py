"""Command-line front end.

Three commands:

* `reproduce` runs the suboptimality demonstration end to end and verifies
  every closed-form and Monte Carlo claim in it;
* `eval` runs the coverage / expected-size / dominance grid described by a
  config file or flags;
* `sweep` tabulates the closed-form quantities along a parameter axis into
  CSV for external plotting.

Exit codes: 0 success, 1 verification failure, 2 regime conditions not
satisfied, 64 usage or validation error. Reports are still written on
exit 1 so failures can be inspected. All randomness comes from the seed
(flag, then config file, then CONFREG_SEED, then 1); nothing reads system
entropy, so fixed inputs give byte-identical reports at any worker count.
"""

import argparse
import os
import sys

from .config import (
    config_from_mapping,
    load_config_file,
    parse_count,
    parse_decimal,
    parse_seed,
)
from .evaluation import (
    coverage,
    dominance,
    expected_size,
    reproduce_counterexample,
    sweep_rows,
)
from .exceptions import (
    BracketError,
    ConfigError,
    DegenerateEvidenceError,
    DomainError,
    InfeasibleConstructionError,
    ParameterError,
)
from .specfun import RandomStream
from .reporting import dump_csv, dump_json, dump_text

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_REGIME = 2
EXIT_USAGE = 64

SEED_ENV_VAR = "CONFREG_SEED"


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common_flags(parser):
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    parser.add_argument("--seed", metavar="U64", help="64-bit stream seed")
    parser.add_argument("--n", metavar="COUNT", help="Monte Carlo sample count")
    parser.add_argument("--delta", metavar="DEC", help="symmetric band tail (delta, 1-delta)")
    parser.add_argument("--alpha", metavar="DEC", help="band lower edge")
    parser.add_argument("--beta", metavar="DEC", help="band upper edge")
    parser.add_argument("--sigma0", metavar="DEC", help="label-0 scale (two_point model)")
    parser.add_argument("--sigma1", metavar="DEC", help="label-1 scale (two_point model)")
    parser.add_argument("--sigma", metavar="DEC", help="scale (location model)")
    parser.add_argument(
        "--format",
        dest="out_format",
        choices=("json", "csv", "text"),
        help="report format (default json)",
    )
    parser.add_argument("--out", metavar="DIR", help="report directory (default ./reports)")
    parser.add_argument(
        "--workers",
        metavar="N",
        default="1",
        help="evaluation worker threads; cannot change any reported number",
    )


def build_parser():
    parser = _Parser(prog="confreg", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    reproduce = commands.add_parser(
        "reproduce",
        help="run and verify the suboptimality demonstration",
        description="Run the two-point suboptimality demonstration and verify its claims.",
    )
    _add_common_flags(reproduce)

    evaluate = commands.add_parser(
        "eval",
        help="coverage / expected-size / dominance grid",
        description="Evaluate configured estimators at each theta; compare all pairs.",
    )
    _add_common_flags(evaluate)

    sweep = commands.add_parser(
        "sweep",
        help="closed-form table along a parameter axis (CSV)",
        description="Tabulate regime flags, cross mass, and analytic sizes per sweep point.",
    )
    _add_common_flags(sweep)
    sweep.add_argument("--axis", choices=("delta", "sigma0", "sigma1"), help="sweep axis")
    sweep.add_argument("--values", metavar="DEC[,DEC...]", help="comma-separated sweep values")

    return parser


def _default_seed_from_env():
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 1
    try:
        return parse_seed(raw)
    except ConfigError:
        raise ConfigError(f"{SEED_ENV_VAR} must be a 64-bit unsigned integer, got {raw!r}")


def _build_config(args):
    raw = load_config_file(args.config) if args.config else {}
    overrides = {
        "seed": args.seed,
        "n": args.n,
        "delta": args.delta,
        "alpha": args.alpha,
        "beta": args.beta,
        "sigma0": args.sigma0,
        "sigma1": args.sigma1,
        "sigma": args.sigma,
        "format": args.out_format,
    }
    config = config_from_mapping(raw, overrides, default_seed=_default_seed_from_env())
    if args.sigma is not None and config.model.kind != "location":
        raise ConfigError("--sigma applies to the location model only")
    return config


def _write_report(payload, config, command, out_dir, rows=None, fieldnames=None):
    """Write the report in the configured format; returns the file path.

    `rows`/`fieldnames` provide the flat table used for the csv format.
    """
    out_dir = out_dir or os.path.join(".", "reports")
    os.makedirs(out_dir, exist_ok=True)
    extension = {"json": "json", "text": "txt", "csv": "csv"}[config.out_format]
    name = f"{command}_seed{config.seed}_{config.digest()}.{extension}"
    path = os.path.join(out_dir, name)
    if config.out_format == "json":
        dump_json(payload, path)
    elif config.out_format == "text":
        dump_text(payload, path)
    else:
        dump_csv(rows or [], fieldnames or [], path)
    return path


_CHECK_FIELDS = ("name", "passed", "observed", "expected", "relation", "tolerance")


def cmd_reproduce(args):
    config = _build_config(args)
    if config.model.kind != "two_point":
        raise ConfigError("reproduce runs on the two_point model")
    if config.delta is None:
        raise ConfigError("reproduce needs the delta band form")
    workers = parse_count(args.workers, "workers", minimum=1)
    report = reproduce_counterexample(
        sigma0=config.model.sigma0,
        sigma1=config.model.sigma1,
        delta=config.delta,
        n=config.n,
        seed=config.seed,
        workers=workers,
    )
    report["config"] = config.to_mapping()
    check_rows = [
        {
            "name": c.name,
            "passed": c.passed,
            "observed": c.observed,
            "expected": c.expected,
            "relation": c.relation,
            "tolerance": c.tolerance,
        }
        for c in report.get("checks", ())
    ]
    path = _write_report(report, config, "reproduce", args.out, check_rows, _CHECK_FIELDS)
    print(f"status: {report['status']}")
    print(f"verified: {'true' if report['verified'] else 'false'}")
    print(f"report: {path}")
    if report["status"] == "outside_regime":
        return EXIT_REGIME
    return EXIT_OK if report["verified"] else EXIT_VERIFICATION


_EVAL_FIELDS = (
    "estimator",
    "theta",
    "nominal",
    "coverage_analytic",
    "coverage_mc",
    "coverage_stderr",
    "size_analytic",
    "size_mc",
    "size_stderr",
    "n_samples",
)


def _estimator_names(estimators):
    """Stable unique names: the kind, suffixed on repeats."""
    names = []
    seen = {}
    for estimator in estimators:
        count = seen.get(estimator.name, 0)
        seen[estimator.name] = count + 1
        names.append(estimator.name if count == 0 else f"{estimator.name}#{count + 1}")
    return names


def cmd_eval(args):
    config = _build_config(args)
    workers = parse_count(args.workers, "workers", minimum=1)
    model = config.build_model()
    estimators = config.build_estimators(model)
    names = _estimator_names(estimators)
    stream = RandomStream(seed=config.seed)

    results = []
    rows = []
    for name, estimator in zip(names, estimators):
        for theta in config.thetas:
            cov = coverage(model, estimator, theta, config.n, stream, workers)
            size = expected_size(model, estimator, theta, config.n, stream, workers)
            results.append({"estimator": name, "coverage": cov, "size": size})
            rows.append(
                {
                    "estimator": name,
                    "theta": theta,
                    "nominal": cov.nominal,
                    "coverage_analytic": cov.analytic,
                    "coverage_mc": cov.mc_estimate,
                    "coverage_stderr": cov.mc_stderr,
                    "size_analytic": size.analytic,
                    "size_mc": size.mc_estimate,
                    "size_stderr": size.mc_stderr,
                    "n_samples": cov.n_samples,
                }
            )

    verdicts = []
    for i, (name_a, est_a) in enumerate(zip(names, estimators)):
        for j, (name_b, est_b) in enumerate(zip(names, estimators)):
            if i == j:
                continue
            verdict = dominance(model, est_a, est_b, config.thetas, config.n, stream, workers)
            verdicts.append({"a": name_a, "b": name_b, "verdict": verdict})

    report = {"config": config.to_mapping(), "results": results, "dominance": verdicts}
    path = _write_report(report, config, "eval", args.out, rows, _EVAL_FIELDS)
    print(f"report: {path}")
    return EXIT_OK


_SWEEP_FIELDS = (
    "sigma0",
    "sigma1",
    "delta",
    "regime_nesting",
    "regime_mass_condition",
    "cross_acceptance_mass",
    "fiducial_size_label0",
    "fiducial_size_label1",
    "improved_size_label0",
    "improved_size_label1",
)


def cmd_sweep(args):
    config = _build_config(args)
    if config.model.kind != "two_point":
        raise ConfigError("sweep runs on the two_point model")
    axis = args.axis or (config.sweep.axis if config.sweep else None)
    if args.values is not None:
        values = tuple(
            parse_decimal(v, "sweep value") for v in args.values.split(",") if v.strip()
        )
    elif config.sweep is not None:
        values = config.sweep.values
    else:
        values = ()
    if axis is None:
        raise ConfigError("sweep needs an axis (--axis or config sweep.axis)")
    if not values:
        raise ConfigError("sweep needs at least one value (--values or config sweep.values)")
    if config.delta is None and axis != "delta":
        raise ConfigError("sweeping a sigma needs the delta band form as base")
    rows = sweep_rows(
        sigma0=config.model.sigma0,
        sigma1=config.model.sigma1,
        delta=config.delta if config.delta is not None else values[0],
        axis=axis,
        values=values,
    )
    # Sweep output is tabular by nature; it is always written as CSV.
    out_dir = args.out or os.path.join(".", "reports")
    os.makedirs(out_dir, exist_ok=True)
    name = f"sweep_seed{config.seed}_{config.digest()}.csv"
    path = os.path.join(out_dir, name)
    dump_csv(rows, _SWEEP_FIELDS, path)
    print(f"report: {path}")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"reproduce": cmd_reproduce, "eval": cmd_eval, "sweep": cmd_sweep}
    try:
        return handlers[args.command](args)
    except (ConfigError, DomainError, BracketError, ParameterError) as exc:
        print(f"confreg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleConstructionError as exc:
        print(f"confreg: regime not satisfied: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except DegenerateEvidenceError as exc:
        print(f"confreg: evaluation failed: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
