"""Command-line interface.

Subcommands: ``estimate`` (CIF curves, optionally restricted, JSON/CSV/SVG),
``test`` (ordered-alternative test with asymptotic p-value), ``ci``
(tightened pointwise confidence intervals), and ``simulate`` (Monte Carlo
validation studies).

Exit codes: 0 success, 1 a simulation study's checks failed, 2 usage or
validation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import Sample
from .errors import OrdcifError
from .estimators import estimate_cifs
from .htest import ordered_test
from .inference import pointwise_ci, tighten_bands
from .isotonic import restrict_cifs
from .plot import svg_step_plot
from .report import render_json, sha256_file
from .simulate import (
    SimConfig,
    mc_consistency,
    mc_dominance,
    mc_fixed_t_limit,
    mc_null_distribution,
)

__all__ = ["main"]


class CliError(Exception):
    """Usage or input validation error (exit code 2)."""


def _read_dataset(path: str, k_flag: int | None) -> Sample:
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot open {path}: {exc}") from exc
    times: list[float] = []
    causes: list[int] = []
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header] != ["time", "cause"]:
            raise CliError(f"{path}: expected header 'time,cause'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise CliError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
            raw_time, raw_cause = row[0].strip(), row[1].strip()
            try:
                time = float(raw_time)
            except ValueError:
                raise CliError(f"{path}: line {lineno}: bad time {raw_time!r}") from None
            if not np.isfinite(time) or time <= 0:
                raise CliError(f"{path}: line {lineno}: time must be finite and > 0")
            try:
                cause = int(raw_cause)
            except ValueError:
                raise CliError(f"{path}: line {lineno}: bad cause {raw_cause!r}") from None
            if cause < 0:
                raise CliError(f"{path}: line {lineno}: cause must be >= 0")
            if k_flag is not None and cause > k_flag:
                raise CliError(
                    f"{path}: line {lineno}: cause {cause} exceeds --k {k_flag}"
                )
            times.append(time)
            causes.append(cause)
    if not times:
        raise CliError(f"{path}: no data rows")
    if not any(c >= 1 for c in causes):
        raise CliError(f"{path}: needs at least one non-censored row")
    k = k_flag if k_flag is not None else max(causes)
    try:
        return Sample.from_arrays(np.array(times), np.array(causes), k)
    except OrdcifError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _provenance(input_hash: str | None, seed: int | None) -> dict:
    return {"seed": seed, "version": __version__, "input_hash": input_hash}


def _cifs_section(cifset) -> list[dict]:
    return [
        {
            "cause": idx,
            "knots": list(map(float, f.knots)),
            "values": list(map(float, f.values)),
        }
        for idx, f in enumerate(cifset.cifs, start=1)
    ]


def _emit(args, document: dict, text_summary: str | None = None) -> None:
    payload = render_json(document)
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)
    if text_summary:
        print(text_summary, file=sys.stderr)


def cmd_estimate(args) -> int:
    sample = _read_dataset(args.input, args.k)
    unrestricted = estimate_cifs(sample)
    restricted = restrict_cifs(unrestricted) if args.restricted else None
    document = {
        "command": "estimate",
        "k": sample.k,
        "n": sample.n,
        "censored": sample.has_censoring,
        "cifs": {
            "unrestricted": _cifs_section(unrestricted),
            "restricted": None if restricted is None else _cifs_section(restricted),
        },
        "provenance": _provenance(sha256_file(args.input), None),
    }
    if args.format == "csv":
        _emit_estimate_csv(args, unrestricted, restricted)
    else:
        _emit(args, document)
    if args.plot:
        plotted = restricted if restricted is not None else unrestricted
        flavor = "restricted" if restricted is not None else "unrestricted"
        svg = svg_step_plot(
            [(f"cause {idx}", f) for idx, f in enumerate(plotted.cifs, start=1)],
            title=f"{flavor} cumulative incidence estimates",
        )
        Path(args.plot).write_text(svg, encoding="utf-8")
    return 0


def _emit_estimate_csv(args, unrestricted, restricted) -> None:
    grid = unrestricted.grid()
    rows = ["cause,time,unrestricted,restricted"]
    restricted_values = (
        restricted.values_matrix(grid) if restricted is not None else None
    )
    unrestricted_values = unrestricted.values_matrix(grid)
    for idx in range(unrestricted.k):
        for m, time in enumerate(grid):
            restr = (
                "" if restricted_values is None else repr(float(restricted_values[idx, m]))
            )
            rows.append(
                f"{idx + 1},{float(time)!r},{float(unrestricted_values[idx, m])!r},{restr}"
            )
    payload = "\n".join(rows)
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)


def cmd_test(args) -> int:
    sample = _read_dataset(args.input, args.k)
    result = ordered_test(sample)
    document = {
        "command": "test",
        "k": sample.k,
        "n": sample.n,
        "censored": result.censored,
        "test": {
            "statistic": result.statistic,
            "p_value": result.p_value,
            "subtests": [
                {"j": sub.j, "sup": sub.sup, "argmax": sub.argmax}
                for sub in result.subtests
            ],
        },
        "provenance": _provenance(sha256_file(args.input), None),
    }
    _emit(args, document, f"T = {result.statistic:.6g}, p = {result.p_value:.6g}")
    return 0


def cmd_ci(args) -> int:
    if not 0.0 < args.level < 1.0:
        raise CliError(f"--level must be in (0, 1), got {args.level}")
    sample = _read_dataset(args.input, args.k)
    restricted = restrict_cifs(estimate_cifs(sample))
    grid = restricted.grid()
    if grid.size == 0:
        raise CliError("no event times; nothing to compute intervals at")
    band = pointwise_ci(restricted, sample, args.level, grid)
    tightened = tighten_bands(band)
    causes = []
    for idx in range(sample.k):
        causes.append(
            {
                "cause": idx + 1,
                "estimate": list(map(float, restricted.cifs[idx](grid))),
                "lower": list(map(float, band.lower[idx](grid))),
                "upper": list(map(float, band.upper[idx](grid))),
                "lower_tightened": list(map(float, tightened.lower[idx](grid))),
                "upper_tightened": list(map(float, tightened.upper[idx](grid))),
            }
        )
    document = {
        "command": "ci",
        "k": sample.k,
        "n": sample.n,
        "censored": sample.has_censoring,
        "level": args.level,
        "times": list(map(float, grid)),
        "bands": causes,
        "provenance": _provenance(sha256_file(args.input), None),
    }
    _emit(args, document)
    return 0


_STUDIES = {
    "consistency": (mc_consistency, {"n_ladder"}),
    "null": (mc_null_distribution, {"kolmogorov_tol"}),
    "dominance": (mc_dominance, {"cause", "t", "u_grid", "se_multiplier"}),
    "fixed-t": (
        mc_fixed_t_limit,
        {"cause", "t", "se_multiplier", "cov_pairs", "censored_reference", "calibration_n"},
    ),
}

_CONFIG_KEYS = {
    "k",
    "cause_hazards",
    "n",
    "replicates",
    "seed",
    "censor_rate",
    "eval_times",
}


def cmd_simulate(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot open {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.config}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise CliError(f"{args.config}: config must be a JSON object")
    study_fn, option_keys = _STUDIES[args.study]
    unknown = set(raw) - _CONFIG_KEYS - option_keys
    if unknown:
        raise CliError(f"{args.config}: unknown keys {sorted(unknown)}")
    config_kwargs = {key: raw[key] for key in _CONFIG_KEYS if key in raw}
    if args.seed is not None:
        config_kwargs["seed"] = args.seed
    if "cause_hazards" in config_kwargs:
        config_kwargs["cause_hazards"] = tuple(config_kwargs["cause_hazards"])
    if "eval_times" in config_kwargs and config_kwargs["eval_times"] is not None:
        config_kwargs["eval_times"] = tuple(config_kwargs["eval_times"])
    options = {key: raw[key] for key in option_keys if key in raw}
    if "cov_pairs" in options:
        options["cov_pairs"] = [tuple(p) for p in options["cov_pairs"]]
    config = SimConfig(**config_kwargs)
    report = study_fn(config, **options)
    document = {
        "command": "simulate",
        "study": args.study,
        "report": report.to_dict(),
        "provenance": _provenance(sha256_file(args.config), config.seed),
    }
    _emit(args, document, f"study {args.study}: {'pass' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordcif",
        description=(
            "Estimate ordered cumulative incidence functions for competing "
            "risks, test for their equality, and validate the asymptotics "
            "by simulation."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="estimate CIF curves from a CSV dataset")
    p_est.add_argument("input", help="CSV file with header 'time,cause'")
    p_est.add_argument("--k", type=int, default=None, help="number of causes")
    group = p_est.add_mutually_exclusive_group()
    group.add_argument(
        "--restricted", dest="restricted", action="store_true", default=True,
        help="include order-restricted estimates (default)",
    )
    group.add_argument(
        "--unrestricted", dest="restricted", action="store_false",
        help="emit unrestricted estimates only",
    )
    p_est.add_argument("--format", choices=["json", "csv"], default="json")
    p_est.add_argument("--out", default=None, help="write output here (default stdout)")
    p_est.add_argument("--plot", default=None, help="write an SVG step plot here")
    p_est.set_defaults(func=cmd_estimate)

    p_test = sub.add_parser("test", help="ordered-alternative test of CIF equality")
    p_test.add_argument("input")
    p_test.add_argument("--k", type=int, default=None)
    p_test.add_argument("--out", default=None)
    p_test.set_defaults(func=cmd_test)

    p_ci = sub.add_parser("ci", help="tightened pointwise confidence intervals")
    p_ci.add_argument("input")
    p_ci.add_argument("--k", type=int, default=None)
    p_ci.add_argument("--level", type=float, required=True)
    p_ci.add_argument("--out", default=None)
    p_ci.set_defaults(func=cmd_ci)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo validation study")
    p_sim.add_argument("--study", choices=sorted(_STUDIES), required=True)
    p_sim.add_argument("--config", required=True, help="JSON study configuration")
    p_sim.add_argument("--seed", type=int, default=None, help="override config seed")
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OrdcifError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
