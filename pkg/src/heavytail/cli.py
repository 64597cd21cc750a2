"""Command-line entry points.

Subcommands:

* ``simulate``        run a configured experiment (fig1..fig6)
* ``estimate``        p-stable mean/criticality interval for a data file or
                      a synthetic generator
* ``compare``         p-stable vs CLT (and optionally bootstrap) intervals
                      on one synthetic data set
* ``abelian``         tabulate an Abelian pmf and its exact moments
* ``stirling-check``  run the exact combinatorial identity suite
* ``plot``            re-render an SVG figure from CSV artifacts

Exit codes: 0 success, 2 configuration/input error, 3 numerical
instability, 1 anything unexpected.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np
import yaml

from . import experiments, plotting
from .abelian import AbelianParams, abelian_moments, abelian_pmf_vector
from .baselines import (
    ComparisonSpec,
    compare_methods,
    distribution_mean,
    sample_distribution,
)
from .errors import ConfigError, HeavytailError, InstabilityError
from .estimator import pstable_estimate, split_pilot
from .rng import STREAM_Y, RandomSource, StableParams, sample_stable
from .stirling import run_lemma_suite


def _add_common(parser: argparse.ArgumentParser, out_default=None) -> None:
    parser.add_argument("--seed", type=int, default=None, help="override the base seed")
    parser.add_argument("--out", default=out_default, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heavytail",
        description="mean and criticality estimation for heavy-tailed data via p-stable resampling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a configured experiment")
    sim.add_argument("--config", required=True, help="YAML experiment config")
    sim.add_argument("--workers", type=int, default=1, help="thread count for replications")
    _add_common(sim)

    est = sub.add_parser("estimate", help="estimate a mean interval from data")
    est.add_argument("--input", help="CSV/text file, one observation per line")
    est.add_argument(
        "--generator",
        help="synthetic source, e.g. pareto_like:a=2,x_min=3,transform=true",
    )
    est.add_argument("--count", type=int, default=None, help="observations to draw (generator)")
    est.add_argument("--p", type=float, required=True, help="stability order in (1, 2]")
    est.add_argument("--level-lo", type=float, default=0.05)
    est.add_argument("--level-hi", type=float, default=0.95)
    est.add_argument("--burn-in", type=int, default=0)
    est.add_argument("--perms", type=int, default=1, help="permutation replicates to average")
    est.add_argument("--mu", type=float, default=None, help="known centering value")
    est.add_argument("--pilot-count", type=int, default=None)
    est.add_argument(
        "--pilot-fraction", type=float, default=0.1,
        help="pilot share when no count or known mean is given",
    )
    _add_common(est, out_default=".")

    cmp_ = sub.add_parser("compare", help="compare interval methods on synthetic data")
    cmp_.add_argument("--config", required=True, help="YAML comparison config")
    _add_common(cmp_, out_default=".")

    abl = sub.add_parser("abelian", help="tabulate an Abelian pmf")
    abl.add_argument("--n-size", type=int, required=True, help="system size N")
    group = abl.add_mutually_exclusive_group(required=True)
    group.add_argument("--alpha", type=float, help="criticality parameter in [0, 1)")
    group.add_argument("--p-raw", type=float, help="raw branching parameter in (0, 1/N]")
    abl.add_argument("--b-max", type=int, default=None, help="truncate the table at this size")
    _add_common(abl, out_default=".")

    stl = sub.add_parser("stirling-check", help="run the exact identity suite")
    stl.add_argument("--oracle-i", type=int, default=12)
    stl.add_argument("--rising-i", type=int, default=30)
    stl.add_argument("--decomposition-n", type=int, default=50)
    stl.add_argument("--product-n", type=int, default=10_000)
    stl.add_argument("--degree4-i", type=int, default=30)

    plt = sub.add_parser("plot", help="re-render a figure from CSV artifacts")
    plt.add_argument("csv", nargs="+", help="input CSV files")
    plt.add_argument("--kind", required=True, choices=("ecdf", "intervals"))
    plt.add_argument("--out", required=True, help="output SVG path")
    plt.add_argument("--title", default=None)
    plt.add_argument("--target", default="alpha", help="interval plots: mean or alpha")
    plt.add_argument("--labels", default=None, help="comma-separated curve labels")

    return parser


def _parse_generator(text: str):
    """kind:key=value,... into a distribution params object."""
    kind, _, rest = text.partition(":")
    fields: dict[str, object] = {"kind": kind.strip()}
    if rest.strip():
        for piece in rest.split(","):
            key, sep, value = piece.partition("=")
            if not sep:
                raise ConfigError(f"generator field {piece!r} is not key=value")
            value = value.strip()
            if value.lower() in ("true", "false"):
                fields[key.strip()] = value.lower() == "true"
            else:
                try:
                    fields[key.strip()] = float(value)
                except ValueError as exc:
                    raise ConfigError(f"generator field {piece!r}: {exc}") from exc
    return experiments.build_distribution(fields)


def _read_observations(path: str) -> np.ndarray:
    values: list[float] = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or not row[0].strip():
                    continue
                cell = row[0].strip()
                try:
                    values.append(float(cell))
                except ValueError:
                    if lineno == 1:
                        continue  # header line
                    raise ConfigError(f"{path}:{lineno}: non-numeric observation {cell!r}")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not values:
        raise ConfigError(f"{path}: no observations")
    return np.asarray(values, dtype=np.float64)


def _cmd_simulate(args) -> int:
    cfg = experiments.load_config(args.config)
    updates = {}
    if args.seed is not None:
        updates["seed"] = int(args.seed)
    if args.out is not None:
        updates["out_dir"] = args.out
    if updates:
        from dataclasses import replace

        cfg = replace(cfg, **updates)
    report = experiments.run_experiment(cfg, workers=args.workers)
    print(f"{cfg.experiment}: wrote {len(report.files)} files to {cfg.out_dir}")
    for key, value in sorted(report.summary.items()):
        print(f"  {key}: {value}")
    return 0


def _interval_line(label: str, ci) -> str:
    lo = "undefined" if ci.lower is None else f"{ci.lower:.6g}"
    hi = "undefined" if ci.upper is None else f"{ci.upper:.6g}"
    return f"{label}: [{lo}, {hi}] at levels ({ci.level_lo}, {ci.level_hi})"


def _cmd_estimate(args) -> int:
    if bool(args.input) == bool(args.generator):
        raise ConfigError("give exactly one of --input or --generator")
    seed = 0 if args.seed is None else int(args.seed)
    src = RandomSource(seed)
    if args.input:
        x = _read_observations(args.input)
    else:
        if not args.count or args.count < 2:
            raise ConfigError("--generator needs --count >= 2")
        dist = _parse_generator(args.generator)
        x = sample_distribution(dist, src.substream(experiments.ROLE_GLOBAL, 1), args.count)

    if args.mu is not None:
        mu_hat, x_est = float(args.mu), x
    elif args.pilot_count is not None:
        mu_hat, x_est = split_pilot(x, pilot_count=args.pilot_count)
    else:
        mu_hat, x_est = split_pilot(x, pilot_fraction=args.pilot_fraction)

    y = sample_stable(
        StableParams(p=args.p, beta=0.0, gamma=1.0, delta=1.0),
        src.substream(experiments.ROLE_GLOBAL, STREAM_Y),
        x_est.size,
    )
    est = pstable_estimate(
        x_est, y, mu_hat, args.p, (args.level_lo, args.level_hi),
        burn_in=args.burn_in, n_perms=args.perms,
        src=src.substream(experiments.ROLE_GLOBAL, 3),
    )

    os.makedirs(args.out, exist_ok=True)
    tn_path = os.path.join(args.out, "tn.csv")
    experiments.write_csv(
        tn_path, ["n", "t_n"],
        zip(range(1, est.tn.values.size + 1), est.tn.values.tolist()),
    )
    ecdf_path = os.path.join(args.out, "ecdf.csv")
    experiments.write_csv(
        ecdf_path, ["t", "G"],
        zip(est.ecdf.points.tolist(), est.ecdf.cum_weights.tolist()),
    )
    ci_path = os.path.join(args.out, "ci.csv")
    header = ["target", "level_lo", "level_hi", "lower", "upper", "lower_defined", "upper_defined"]
    experiments.write_csv(
        ci_path, header,
        [
            [ci.target, ci.level_lo, ci.level_hi, ci.lower, ci.upper,
             ci.lower_defined, ci.upper_defined]
            for ci in (est.ci_mu, est.ci_alpha)
        ],
    )
    print(f"n={x_est.size} mu_hat={mu_hat:.6g} quantiles=({est.quantile_lo:.6g}, {est.quantile_hi:.6g})")
    print(_interval_line("mean", est.ci_mu))
    print(_interval_line("alpha", est.ci_alpha))
    print(f"wrote {tn_path}, {ecdf_path}, {ci_path}")
    return 0


def _load_yaml(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return raw


def _cmd_compare(args) -> int:
    raw = _load_yaml(args.config)
    known = {
        "distribution", "n", "p", "levels", "y_stable", "reference_count",
        "mu_mode", "pilot_count", "seed", "methods", "bootstrap",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown comparison keys: {sorted(unknown)}")
    for key in ("distribution", "n", "p", "levels"):
        if key not in raw:
            raise ConfigError(f"comparison config needs {key}")
    dist = experiments.build_distribution(raw["distribution"])
    p = float(raw["p"])
    y_raw = raw.get("y_stable", {}) or {}
    try:
        y_params = StableParams(
            p=p,
            beta=float(y_raw.get("beta", 0.0)),
            gamma=float(y_raw.get("gamma", 1.0)),
            delta=float(y_raw.get("delta", 1.0)),
        )
        levels = (float(raw["levels"][0]), float(raw["levels"][1]))
        spec = ComparisonSpec(
            distribution=dist,
            n=int(raw["n"]),
            p=p,
            y_params=y_params,
            reference_count=int(raw.get("reference_count", 900_000)),
            mu_mode=str(raw.get("mu_mode", "full")),
            pilot_count=raw.get("pilot_count"),
        )
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"invalid comparison config: {exc}") from exc
    methods = frozenset(raw.get("methods", ("pstable", "clt")))
    seed = int(raw.get("seed", 0)) if args.seed is None else int(args.seed)
    report = compare_methods(spec, levels, methods=methods, src=RandomSource(seed))

    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "compare.csv")
    header = [
        "method", "target", "lower", "upper",
        "lower_defined", "upper_defined", "reference_value",
    ]
    experiments.write_csv(out_path, header, report.rows())
    for method, target, lo, hi, lo_def, hi_def, ref in report.rows():
        lo_s = f"{lo:.6g}" if lo_def else "undefined"
        hi_s = f"{hi:.6g}" if hi_def else "undefined"
        ref_s = "n/a" if ref is None else f"{ref:.6g}"
        print(f"{method:10s} {target:5s} [{lo_s}, {hi_s}]  reference {ref_s}")
    print(f"wrote {out_path}")
    return 0


def _cmd_abelian(args) -> int:
    if args.alpha is not None:
        params = AbelianParams(N=args.n_size, alpha=args.alpha)
    else:
        params = AbelianParams.from_p(N=args.n_size, p=args.p_raw)
    pmf = abelian_pmf_vector(params)
    moments = abelian_moments(params)
    b_max = params.N if args.b_max is None else min(args.b_max, params.N)

    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "abelian.csv")
    experiments.write_csv(
        out_path, ["b", "pmf"],
        zip(range(1, b_max + 1), pmf[:b_max].tolist()),
    )
    print(
        f"N={params.N} alpha={params.alpha:.6g} p={params.p:.6g} "
        f"mean={moments.mean:.10g} variance={moments.variance:.10g}"
    )
    print(f"wrote {out_path} ({b_max} rows)")
    return 0


def _cmd_stirling(args) -> int:
    results = run_lemma_suite(
        oracle_i=args.oracle_i,
        rising_i=args.rising_i,
        decomposition_n=args.decomposition_n,
        product_n=args.product_n,
        degree4_i=args.degree4_i,
    )
    all_pass = True
    for res in results:
        mark = "PASS" if res.passed else "FAIL"
        print(f"[{mark}] {res.name}: {res.detail}")
        all_pass = all_pass and res.passed
    return 0 if all_pass else 1


def _cmd_plot(args) -> int:
    spec: dict = {"kind": args.kind, "target": args.target}
    if args.title:
        spec["title"] = args.title
    if args.labels:
        spec["labels"] = [lbl.strip() for lbl in args.labels.split(",")]
    document = plotting.emit_plot(args.csv, spec)
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(document)
    print(f"wrote {args.out}")
    return 0


_DISPATCH = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "compare": _cmd_compare,
    "abelian": _cmd_abelian,
    "stirling-check": _cmd_stirling,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except InstabilityError as exc:
        print(f"error: numerical instability: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        # ValueError covers parameter/domain/input violations from the library
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HeavytailError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
