"""Command-line front end.

Subcommands:

* ``simulate`` — draw one observed field Y = X + theta and write it as CSV.
* ``estimate`` — run the deconvolution estimator on a simulated field.
* ``clt``      — run the Monte Carlo CLT experiment and write reports.
* ``check``    — validate a config (A3, A5, conditions (7)/(8)) and exit.

Exit codes: 0 success, 2 config error, 3 data error, 4 verdict failure.
All commands are deterministic given identical inputs and seeds.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys

import numpy as np

from . import __version__
from .asymptotics import check_lemma_limits
from .config import ConfigError, RunManifest, config_digest, config_to_dict, load_config
from .deconv import estimate as run_estimate
from .fields import add_noise, simulate_field
from .harness import (
    joint_diagonality,
    mixing_profile_for,
    dependence_profile_for,
    run_experiment,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_VERDICT = 4


def _manifest(config_raw: dict, seed: int, outputs) -> RunManifest:
    return RunManifest(
        config_digest=config_digest(config_raw),
        tool_version=__version__,
        base_seed=seed,
        timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        outputs=tuple(outputs),
    )


def _load(args):
    config = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        from dataclasses import replace

        config = replace(config, base_seed=int(args.seed))
    if getattr(args, "threads", None) is not None:
        from dataclasses import replace

        config = replace(config, threads=int(args.threads))
    return config


def _raw_config(args) -> dict:
    with open(args.config) as fh:
        return json.load(fh)


def cmd_simulate(args) -> int:
    config = _load(args)
    config.validate()
    region = config.regions[0]
    x = simulate_field(region, config.field_spec, config.base_seed)
    y = add_noise(x, config.noise, config.base_seed)
    d = region.dimension
    header = ",".join(f"i{k + 1}" for k in range(d)) + ",x,y"
    with open(args.out, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for site, xv, yv in zip(region.sites, x.values, y.values):
            coords = ",".join(str(c) for c in site)
            fh.write(f"{coords},{float(xv)!r},{float(yv)!r}\n")
    _manifest(_raw_config(args), config.base_seed, [os.path.basename(args.out)]).write(
        args.out + ".manifest.json"
    )
    return EXIT_OK


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, count = spec.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError as e:
        raise ConfigError(f"grid spec must be min:max:count, got {spec!r}") from e
    if count < 1 or hi <= lo:
        raise ConfigError("grid spec needs max > min and count >= 1")
    return np.linspace(lo, hi, count)


def cmd_estimate(args) -> int:
    config = _load(args)
    region = config.regions[0]
    grid = _parse_grid(args.grid)
    data = np.genfromtxt(args.data, delimiter=",", names=True)
    if data.size != region.n_sites:
        print(
            f"error: data has {data.size} rows but the region has {region.n_sites} sites",
            file=sys.stderr,
        )
        return EXIT_DATA
    if "y" not in (data.dtype.names or ()):
        print("error: data file has no 'y' column", file=sys.stderr)
        return EXIT_DATA
    y = np.asarray(data["y"], dtype=float)
    b = config.schedule.b(region.n_sites)
    est = run_estimate(y, config.kernel, config.noise, b, grid, form=args.form)
    est.to_csv(args.out)
    _manifest(_raw_config(args), config.base_seed, [os.path.basename(args.out)]).write(
        args.out + ".manifest.json"
    )
    return EXIT_OK


def _run_checks(config) -> list:
    """Admissibility checks shared by ``check`` and ``clt``; raises on violation."""
    config.validate()
    lines = []
    d = config.regions[0].dimension
    sizes = [r.n_sites for r in config.regions]
    if len(sizes) >= 4:
        n_list = sizes
    else:
        n_list = sorted(set(sizes + [10 * max(sizes), 100 * max(sizes), 1000 * max(sizes)]))[:6]
        while len(n_list) < 4:
            n_list.append(n_list[-1] * 10)
    if config.theorem == "mixing":
        profile = mixing_profile_for(config.field_spec)
    else:
        profile = dependence_profile_for(config.field_spec)
    report = check_lemma_limits(config.schedule, profile, d, config.theorem, n_list)
    lines.append(f"lemma check ({report.kind}):")
    for row in report.rows:
        lines.append(
            f"  n = {row.n_sites}: b = {row.b:.6g}, m = {row.m}, "
            f"m^d b = {row.m_d_b:.6g}, tail ratio = {row.tail_ratio:.6g}"
        )
    lines.append(
        f"  m increasing: {report.m_increasing}; m^d b vanishing: {report.m_d_b_decreasing}; "
        f"tail ratio vanishing: {report.tail_ratio_vanishing}"
    )
    return lines


def cmd_check(args) -> int:
    config = _load(args)
    for line in _run_checks(config):
        print(line)
    print("config valid")
    return EXIT_OK


def cmd_clt(args) -> int:
    config = _load(args)
    check_lines = _run_checks(config)
    report = run_experiment(config)

    os.makedirs(args.out, exist_ok=True)
    rep_path = os.path.join(args.out, "replicates.csv")
    sum_path = os.path.join(args.out, "summary.txt")
    lemma_path = os.path.join(args.out, "lemma_check.txt")
    report.to_csv(rep_path)
    with open(sum_path, "w", newline="\n") as fh:
        fh.write(report.summary_text())
    with open(lemma_path, "w", newline="\n") as fh:
        fh.write("\n".join(check_lines) + "\n")
    _manifest(
        _raw_config(args),
        config.base_seed,
        ["replicates.csv", "summary.txt", "lemma_check.txt"],
    ).write(os.path.join(args.out, "manifest.json"))

    failed = []
    for (d, p), x in zip(report.ks, report.eval_points):
        if p <= 0.01:
            failed.append(f"KS normality at x = {x:g} (D = {d:.4g}, p = {p:.4g})")
    if len(report.eval_points) >= 2:
        verdict = joint_diagonality(report)
        if not verdict.passed:
            failed.append(
                f"joint diagonality (max |corr| = {verdict.max_abs_correlation:.4g} "
                f">= {verdict.threshold:.4g})"
            )
    if failed:
        for f in failed:
            print(f"verdict failed: {f}", file=sys.stderr)
        return EXIT_VERDICT
    print(f"all verdicts passed; reports written to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticedeconv",
        description="Deconvolution density estimation on lattice fields, with a Monte Carlo CLT harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate one observed field and write it as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="run the deconvolution estimator on a data file")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--grid", required=True, help="evaluation grid as min:max:count")
    p.add_argument("--form", choices=("direct", "cf"), default="direct")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("clt", help="run the Monte Carlo CLT experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_clt)

    p = sub.add_parser("check", help="validate a config without running anything")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
