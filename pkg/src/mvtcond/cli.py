"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from .conditioning import Partition, condition, independence_residual, marginal
from .distribution import MVTParams, load_params, log_pdf, make_rng, params_to_dict, pdf, sample
from .exceptions import MVTError
from .verification.suites import BATTERY, SUITES, run_suites

SUITE_CHOICES = (*SUITES, "all")


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _reals(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None
    if not values or not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"expected finite comma-separated reals, got {text!r}")
    return values


def _indices(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated indices, got {text!r}") from None


def _given(text: str) -> dict[int, float]:
    pairs: dict[int, float] = {}
    for tok in text.split(","):
        if not tok.strip():
            continue
        idx, sep, val = tok.partition(":")
        try:
            i, v = int(idx), float(val)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected idx:value pairs, got {tok!r}") from None
        if not sep or not math.isfinite(v):
            raise argparse.ArgumentTypeError(f"expected idx:value with a finite value, got {tok!r}")
        if i in pairs:
            raise argparse.ArgumentTypeError(f"index {i} given twice")
        pairs[i] = v
    if not pairs:
        raise argparse.ArgumentTypeError("--given needs at least one idx:value pair")
    return pairs


def _seed(text: str) -> int:
    try:
        s = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return s


def _count(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return n


def _split(params: MVTParams, given: dict[int, float]) -> tuple[Partition, np.ndarray]:
    observed = sorted(given)
    bad = [i for i in observed if not 0 <= i < params.dim]
    if bad:
        raise UsageError(f"--given index {bad[0]} out of range for dimension {params.dim}")
    if len(observed) == params.dim:
        raise UsageError("--given covers every coordinate; nothing left to condition")
    return Partition.from_observed(observed, params.dim), np.array([given[i] for i in observed])


def cmd_pdf(args) -> int:
    params = load_params(args.params)
    point = np.array(args.point)
    if point.size != params.dim:
        raise UsageError(f"--point has {point.size} values, distribution has dimension {params.dim}")
    print(fmt(log_pdf(params, point) if args.log else pdf(params, point)))
    return 0


def cmd_sample(args) -> int:
    params = load_params(args.params)
    draws = sample(params, args.n, make_rng(args.seed))
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([f"x{j}" for j in range(params.dim)])
        writer.writerows([fmt(v) for v in row] for row in draws)
    finally:
        if args.out:
            out.close()
    return 0


def cmd_marginal(args) -> int:
    params = load_params(args.params)
    print(json.dumps(params_to_dict(marginal(params, args.keep))))
    return 0


def cmd_condition(args) -> int:
    params = load_params(args.params)
    part, x1 = _split(params, args.given)
    spec, law = condition(params, part, x1)
    doc = {"free": list(part.block2), "conditional": spec.to_dict(), "params": params_to_dict(law)}
    print(json.dumps(doc))
    return 0


def cmd_residual(args) -> int:
    params = load_params(args.params)
    part, x1 = _split(params, args.given)
    x2 = np.array(args.point)
    if x2.size != part.p2:
        raise UsageError(
            f"--point must list the {part.p2} free coordinates {list(part.block2)}, got {x2.size} values"
        )
    print(",".join(fmt(v) for v in independence_residual(params, part, x1, x2)))
    return 0


def cmd_verify(args) -> int:
    targets = [("params", load_params(args.params))] if args.params else BATTERY
    names = list(SUITES) if args.suite == "all" else [args.suite]
    report = run_suites(names, targets, args.seed, args.n)
    print(json.dumps(report, indent=2))
    return 0 if report["pass"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvtcond",
        description="Multivariate t densities, samples, marginals and conditionals from JSON parameters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_params(p: argparse.ArgumentParser, required: bool = True) -> argparse.ArgumentParser:
        p.add_argument("--params", required=required, help='JSON file {"mu": [...], "sigma": [[...]], "nu": ...}')
        return p

    p = with_params(sub.add_parser("pdf", help="evaluate the density at a point"))
    p.add_argument("--point", type=_reals, required=True)
    p.add_argument("--log", action="store_true", help="print the log density")
    p.set_defaults(func=cmd_pdf)

    p = with_params(sub.add_parser("sample", help="draw samples to CSV"))
    p.add_argument("--n", type=_count, required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", help="output CSV path (default: standard output)")
    p.set_defaults(func=cmd_sample)

    p = with_params(sub.add_parser("marginal", help="marginal law of a subset of coordinates"))
    p.add_argument("--keep", type=_indices, required=True)
    p.set_defaults(func=cmd_marginal)

    p = with_params(sub.add_parser("condition", help="conditional law given observed coordinates"))
    p.add_argument("--given", type=_given, required=True, help="idx:value pairs, e.g. 0:2.0,3:-1.5")
    p.set_defaults(func=cmd_condition)

    p = with_params(sub.add_parser("residual", help="scaled regression residual of the free block"))
    p.add_argument("--given", type=_given, required=True)
    p.add_argument("--point", type=_reals, required=True, help="values of the free coordinates, ascending index")
    p.set_defaults(func=cmd_residual)

    p = with_params(sub.add_parser("verify", help="run verification suites"), required=False)
    p.add_argument("--suite", choices=SUITE_CHOICES, default="all")
    p.add_argument("--seed", type=_seed, default=42)
    p.add_argument("--n", type=_count, default=100_000, help="Monte Carlo draws per seed")
    p.set_defaults(func=cmd_verify)
    return parser


def _diagnose(msg: str) -> None:
    color = sys.stderr.isatty() and "NO_COLOR" not in os.environ
    prefix = "\033[31merror:\033[0m" if color else "error:"
    print(f"mvtcond {prefix} {msg}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, MVTError, OSError) as exc:
        _diagnose(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
