"""Named verification suites run by ``mvtcond verify``.

Each suite checks one family of invariants on a list of named targets (a
user-supplied distribution or the built-in battery) and returns plain dicts
ready for JSON output. Everything is a deterministic function of the seed.
"""

from __future__ import annotations

import math
from typing import Any, Callable, Sequence

import numpy as np

from ..conditioning import Partition, condition, conditional_sample_augmented, marginal, unnormalized_conditional_logpdf
from ..distribution import MVTParams, log_pdf, sample
from ..exceptions import DofTooSmall
from .gof import GofReport, independence_check, ks_statistic, majority, moment_suite
from .quadrature import conditional_pdf_quadrature
from .special import student_t_cdf

__all__ = ["BATTERY", "SUITES", "Target", "battery", "run_suites"]

Target = tuple[str, MVTParams]

CHAIN_RULE_TOL = 1e-10
PROPORTIONALITY_TOL = 1e-10
QUADRATURE_RTOL = 1e-6
N_SEEDS = 3


def battery() -> list[Target]:
    """Built-in distributions covering Cauchy, sub-Cauchy and near-normal tails."""
    heavy = np.array([[1.5, 0.4, -0.3], [0.4, 1.0, 0.2], [-0.3, 0.2, 2.0]])
    light = np.array([
        [2.0, 0.5, 0.3, 0.0],
        [0.5, 1.5, -0.4, 0.2],
        [0.3, -0.4, 1.0, 0.1],
        [0.0, 0.2, 0.1, 0.8],
    ])
    return [
        ("univariate-t3", MVTParams([0.0], [[1.0]], 3.0)),
        ("worked-2d", MVTParams([0.0, 0.0], [[2.0, 1.0], [1.0, 3.0]], 5.0)),
        ("cauchy-2d", MVTParams([1.0, -1.0], [[1.0, 0.5], [0.5, 1.0]], 1.0)),
        ("heavy-3d", MVTParams([1.0, -1.0, 0.5], heavy, 0.5)),
        ("light-4d", MVTParams([0.5, 0.0, -0.5, 2.0], light, 30.0)),
    ]


BATTERY = battery()


def _rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng([seed, *keys])


def _random_split(params: MVTParams, rng: np.random.Generator) -> tuple[Partition, np.ndarray]:
    p = params.dim
    k = int(rng.integers(1, p))
    part = Partition.from_observed([int(i) for i in rng.permutation(p)[:k]], p)
    x = sample(params, 1, rng)[0]
    return part, x


def _chain_rule(params: MVTParams, seed: int, n: int) -> GofReport:
    rng = _rng(seed, 1)
    worst = 0.0
    count = 200
    for _ in range(count):
        part, x = _random_split(params, rng)
        x1, x2 = x[list(part.block1)], x[list(part.block2)]
        _, law = condition(params, part, x1)
        err = abs(log_pdf(params, x) - log_pdf(marginal(params, part), x1) - log_pdf(law, x2))
        worst = max(worst, err)
    return GofReport(worst, CHAIN_RULE_TOL, count, seed, "chain_rule_max_abs_error")


def _proportionality(params: MVTParams, seed: int, n: int) -> GofReport:
    rng = _rng(seed, 2)
    worst = 0.0
    count = 20
    for _ in range(count):
        part, x = _random_split(params, rng)
        x1 = x[list(part.block1)]
        _, law = condition(params, part, x1)
        grid = sample(law, 1000, rng)
        diff = unnormalized_conditional_logpdf(params, part, x1, grid) - log_pdf(law, grid)
        worst = max(worst, float(np.ptp(diff)))
    return GofReport(worst, PROPORTIONALITY_TOL, count, seed, "proportionality_max_spread")


def _quadrature(params: MVTParams, seed: int, n: int) -> GofReport:
    rng = _rng(seed, 3)
    worst = 0.0
    count = 50
    for _ in range(count):
        part, x = _random_split(params, rng)
        x1, x2 = x[list(part.block1)], x[list(part.block2)]
        _, law = condition(params, part, x1)
        closed = math.exp(log_pdf(law, x2))
        worst = max(worst, abs(conditional_pdf_quadrature(params, part, x1, x2) - closed) / closed)
    return GofReport(worst, QUADRATURE_RTOL, count, seed, "quadrature_max_rel_error")


def _sampling_gof(params: MVTParams, seed: int, n: int) -> GofReport:
    parts: list[GofReport] = []
    nu = params.nu
    for j in range(params.dim):
        scale = math.sqrt(params.sigma[j, j])
        runs = []
        for k in range(N_SEEDS):
            x = sample(params, n, _rng(seed, 4, j, k))[:, j]
            runs.append(ks_statistic((x - params.mu[j]) / scale, lambda t: student_t_cdf(t, nu)))
        parts.append(majority(runs, name=f"marginal_ks[{j}]"))
    if params.dim >= 2:
        part, x = _random_split(params, _rng(seed, 5))
        x1 = x[list(part.block1)]
        spec, law = condition(params, part, x1)
        for j in range(part.p2):
            scale = math.sqrt(law.sigma[j, j])
            runs = []
            for k in range(N_SEEDS):
                y = conditional_sample_augmented(params, part, x1, n, _rng(seed, 6, j, k))[:, j]
                z = (y - spec.location[j]) / scale
                runs.append(ks_statistic(z, lambda t: student_t_cdf(t, law.nu)))
            parts.append(majority(runs, name=f"conditional_ks[{j}]"))
    failed = sum(not r.passed for r in parts)
    return GofReport(float(failed), 0.0, n, seed, "sampling_gof", tuple(parts))


def _first_split(params: MVTParams) -> Partition:
    return Partition.from_observed([0], params.dim)


def _independence(params: MVTParams, seed: int, n: int) -> GofReport:
    runs = [
        independence_check(params, _first_split(params), max(n, 10_000), _rng(seed, 7, k), seed=seed)
        for k in range(N_SEEDS)
    ]
    return majority(runs, name="independence")


def _moments(params: MVTParams, seed: int, n: int) -> GofReport:
    runs = [
        moment_suite(params, _first_split(params), max(n, 100_000), _rng(seed, 8, k), seed=seed)
        for k in range(N_SEEDS)
    ]
    return majority(runs, name="moments")


# name -> (check, needs a split into two non-empty blocks)
SUITES: dict[str, tuple[Callable[[MVTParams, int, int], GofReport], bool]] = {
    "chain-rule": (_chain_rule, True),
    "eq4-proportionality": (_proportionality, True),
    "quadrature": (_quadrature, True),
    "sampling-gof": (_sampling_gof, False),
    "independence": (_independence, True),
    "moments": (_moments, True),
}


def run_suites(names: Sequence[str], targets: Sequence[Target], seed: int, n: int) -> dict[str, Any]:
    """Run each suite on each target; a skipped combination does not fail the run."""
    results = []
    for name in names:
        check, needs_split = SUITES[name]
        for label, params in targets:
            entry: dict[str, Any] = {"suite": name, "target": label}
            if needs_split and params.dim < 2:
                entry.update({"skipped": "needs at least two coordinates", "pass": True})
            else:
                try:
                    entry.update(check(params, seed, n).to_dict())
                except DofTooSmall as exc:
                    entry.update({"skipped": f"DofTooSmall: {exc}", "pass": True})
            results.append(entry)
    return {
        "suite": list(names),
        "seed": seed,
        "n": n,
        "pass": all(r["pass"] for r in results),
        "results": results,
    }
