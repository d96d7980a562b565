"""Bootstrap resampling for annotation-budget sizing, plus rank correlations.

The bootstrap draws B resamples of size N with replacement from a per-query
score vector and records the absolute deviation of each resample mean from
the full-sample mean; the 95th percentile of that distribution is the score
difference detectable at 95% confidence with N annotations.

RNG contract: each resample i uses its own generator derived from
numpy's SeedSequence(entropy=seed, spawn_key=(i,)) over the PCG64 bit
generator. Results are therefore independent of execution order and thread
count, and reproducible for a given (seed, numpy) pair. Reimplementations on
other stacks share seeds at the contract level (same distribution), not
stream-for-stream.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

FORMAT_VERSION = 1

DEFAULT_N_GRID = (500, 1000, 3000)
DEFAULT_RESAMPLES = 10_000


@dataclass(frozen=True)
class BootstrapResult:
    sample_size: int
    resamples: int
    rng_seed: int
    deviations: tuple[float, ...]
    percentile_95: float

    def to_dict(self, max_deviations: int | None = None) -> dict:
        devs = list(self.deviations)
        if max_deviations is not None and len(devs) > max_deviations:
            step = math.ceil(len(devs) / max_deviations)
            devs = devs[::step]
        return {
            "format_version": FORMAT_VERSION,
            "report": "bootstrap",
            "sample_size": self.sample_size,
            "resamples": self.resamples,
            "rng_seed": self.rng_seed,
            "percentile_95": self.percentile_95,
            "deviations": devs,
        }


def nearest_rank_percentile(values, q: float) -> float:
    """Empirical percentile by the nearest-rank rule: the ceil(q*n)-th
    smallest value, with no interpolation."""
    ordered = sorted(values)
    if not ordered:
        raise ValueError("cannot take a percentile of no values")
    if not 0.0 < q <= 1.0:
        raise ValueError(f"percentile fraction must be in (0, 1], got {q}")
    rank = math.ceil(q * len(ordered))
    return ordered[max(rank, 1) - 1]


def _resample_deviation(resid: np.ndarray, resid_mean: float, n: int, seed: int, i: int) -> float:
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(i,)))
    idx = rng.integers(0, resid.size, size=n)
    return abs(float(resid[idx].sum() / n) - resid_mean)


def bootstrap_deviation(
    per_query_scores, n: int, b: int = DEFAULT_RESAMPLES, seed: int = 0, threads: int = 1
) -> BootstrapResult:
    """Deviation distribution of size-``n`` resample means over ``b`` draws.

    Resampling happens at the query level: each element of
    ``per_query_scores`` is one query's score. Identical seeds produce
    identical results regardless of ``threads``. Deviations are computed on
    residuals about the full mean (the same quantity, shifted), which kills
    the cancellation error of subtracting two large means; a constant score
    vector yields exactly zero deviations.
    """
    scores = np.asarray(list(per_query_scores), dtype=float)
    if scores.size == 0:
        raise ValueError("score vector is empty")
    if n < 1 or b < 1:
        raise ValueError(f"sample size and resample count must be >= 1, got {n}, {b}")
    resid = scores - float(scores.sum() / scores.size)
    resid_mean = float(resid.sum() / resid.size)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            devs = list(
                pool.map(
                    lambda i: _resample_deviation(resid, resid_mean, n, seed, i),
                    range(b),
                )
            )
    else:
        devs = [_resample_deviation(resid, resid_mean, n, seed, i) for i in range(b)]
    return BootstrapResult(
        sample_size=n,
        resamples=b,
        rng_seed=seed,
        deviations=tuple(devs),
        percentile_95=nearest_rank_percentile(devs, 0.95),
    )


def average_ranks(values) -> list[float]:
    """1-based ranks with ties assigned the average of their positions."""
    values = list(values)
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def _check_lengths(x, y) -> tuple[list[float], list[float]]:
    x, y = list(x), list(y)
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("correlation needs at least two observations")
    return x, y


def spearman(x, y) -> float | None:
    """Spearman rank correlation: Pearson correlation of average ranks.

    Returns None when either rank vector has zero variance.
    """
    x, y = _check_lengths(x, y)
    rx, ry = average_ranks(x), average_ranks(y)
    n = len(rx)
    mx = sum(rx) / n
    my = sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    var_x = sum((a - mx) ** 2 for a in rx)
    var_y = sum((b - my) ** 2 for b in ry)
    if var_x == 0.0 or var_y == 0.0:
        return None
    return cov / math.sqrt(var_x * var_y)


def kendall(x, y) -> float | None:
    """Kendall's tau with the tau-b tie correction.

    Returns None when every pair is tied in one of the coordinates.
    """
    x, y = _check_lengths(x, y)
    n = len(x)
    concordant = discordant = ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0 and dy == 0:
                ties_x += 1
                ties_y += 1
            elif dx == 0:
                ties_x += 1
            elif dy == 0:
                ties_y += 1
            elif (dx > 0) == (dy > 0):
                concordant += 1
            else:
                discordant += 1
    n0 = n * (n - 1) // 2
    denom = math.sqrt((n0 - ties_x) * (n0 - ties_y))
    if denom == 0.0:
        return None
    return (concordant - discordant) / denom
