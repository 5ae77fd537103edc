"""Reproducible Monte-Carlo estimation of spectral statistics, tails and bound verdicts.

Trial ``i`` always draws from the stream ``trial_generator(seed, i, tag)``, and
trials are split into contiguous blocks across worker threads, so the
per-trial values depend only on ``(seed, trials, statistic)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.stats import binomtest

from .bounds import BoundReport
from .rng import trial_generator

__all__ = [
    "MCConfig",
    "MCResult",
    "TailEstimate",
    "Verdict",
    "run_trials",
    "summarize",
    "estimate_statistic",
    "estimate_tail",
    "tail_from_values",
    "validate_bound",
    "validate_expectation",
    "validate_tail",
    "write_trials_csv",
    "QUANTILE_LEVELS",
]

QUANTILE_LEVELS = (0.5, 0.9, 0.99)

STATISTICS = ("lambda_max", "lambda_min", "lambda_2", "norm")

HOLDS_WITH_MARGIN = "holds_with_margin"
HOLDS_WITHIN_CI = "holds_within_ci"
VIOLATED = "violated"


@dataclass(frozen=True)
class MCConfig:
    trials: int
    seed: int = 0
    workers: int = 1
    statistic: str = "lambda_max"
    keep_trials: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}")


@dataclass
class MCResult:
    mean: float
    stderr: float
    quantiles: dict
    trials: int
    seed: int
    statistic: str = ""
    values: np.ndarray | None = None

    def to_json(self, include_values: bool = False) -> dict:
        out = {
            "mean": self.mean,
            "stderr": self.stderr,
            "quantiles": {str(k): v for k, v in self.quantiles.items()},
            "trials": self.trials,
            "seed": self.seed,
            "statistic": self.statistic,
        }
        if include_values and self.values is not None:
            out["values"] = [float(v) for v in self.values]
        return out


def run_trials(fn, trials: int, seed: int, workers: int = 1, tag: int = 0) -> np.ndarray:
    """Evaluate ``fn(rng, i)`` for ``i < trials`` with per-trial generators.

    The index range is split into `workers` contiguous blocks run on threads.
    """
    out = np.empty(int(trials))

    def block(idx):
        for i in idx:
            out[i] = fn(trial_generator(seed, i, tag), i)

    blocks = [b for b in np.array_split(np.arange(trials), max(1, workers)) if b.size]
    if workers <= 1 or len(blocks) <= 1:
        for b in blocks:
            block(b)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(block, blocks))
    return out


def summarize(values, seed: int = 0, statistic: str = "", keep: bool = True) -> MCResult:
    v = np.asarray(values, dtype=float)
    n = v.size
    se = float(v.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    qs = np.quantile(v, QUANTILE_LEVELS, method="midpoint")
    return MCResult(float(v.mean()), se, {q: float(x) for q, x in zip(QUANTILE_LEVELS, qs)},
                    n, seed, statistic, v if keep else None)


def estimate_statistic(ensemble, cfg: MCConfig, *, tag: int = 0) -> MCResult:
    """Monte-Carlo mean, standard error and quantiles of ``cfg.statistic`` over `ensemble`."""
    if cfg.statistic not in ensemble.statistics:
        raise ValueError(f"statistic {cfg.statistic!r} does not apply to a {ensemble.kind} ensemble")
    stat = cfg.statistic

    def one(rng, i):
        return ensemble.statistic(ensemble.sample(rng), stat)

    vals = run_trials(one, cfg.trials, cfg.seed, cfg.workers, tag)
    return summarize(vals, cfg.seed, stat, cfg.keep_trials)


@dataclass
class TailEstimate:
    p_hat: float
    ci_low: float
    ci_high: float
    exceedances: int
    trials: int
    level: float
    side: str

    def __iter__(self):
        return iter((self.p_hat, self.ci_low, self.ci_high))

    def to_json(self) -> dict:
        return asdict(self)


def tail_from_values(values, level: float, side: str = "upper",
                     confidence: float = 0.95) -> TailEstimate:
    """Exceedance frequency with an exact Clopper-Pearson interval.

    ``side='upper'`` counts ``value >= level``; ``side='lower'`` counts
    ``value <= level``.
    """
    v = np.asarray(values, dtype=float)
    if side == "upper":
        k = int(np.sum(v >= level))
    elif side == "lower":
        k = int(np.sum(v <= level))
    else:
        raise ValueError("side must be 'upper' or 'lower'")
    n = v.size
    ci = binomtest(k, n).proportion_ci(confidence, method="exact")
    return TailEstimate(k / n, float(ci.low), float(ci.high), k, n, float(level), side)


def estimate_tail(ensemble, level: float, cfg: MCConfig, side: str = "upper", *,
                  tag: int = 0) -> TailEstimate:
    """Estimate ``P(stat >= level)`` (or ``<=`` for ``side='lower'``) with a 95% interval."""
    if cfg.trials < 100:
        raise ValueError("tail estimation needs at least 100 trials")
    res = estimate_statistic(ensemble, cfg, tag=tag)
    return tail_from_values(res.values, level, side)


@dataclass
class Verdict:
    verdict: str
    margin: float
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict != VIOLATED

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "margin": self.margin, **self.details}


_UPPER_KINDS = {"maxeig": ("lambda_max", "lambda_2"), "bernstein": ("lambda_max", "lambda_2"),
                "norm": ("norm",)}
_LOWER_KINDS = {"mineig": ("lambda_min",), "psd-iid": ("lambda_min",)}


def validate_expectation(mc: MCResult, bound: float, upper: bool = True) -> Verdict:
    """Compare an MC mean with a one-sided expectation bound."""
    margin = (bound - mc.mean) if upper else (mc.mean - bound)
    if margin >= 0:
        v = HOLDS_WITH_MARGIN
    elif margin >= -3 * mc.stderr:
        v = HOLDS_WITHIN_CI
    else:
        v = VIOLATED
    return Verdict(v, float(margin), {"mc_mean": mc.mean, "mc_stderr": mc.stderr,
                                      "bound": float(bound), "side": "upper" if upper else "lower"})


def validate_tail(tail: TailEstimate, prob_bound: float) -> Verdict:
    """Compare an exceedance interval with a tail probability bound."""
    if tail.ci_high <= prob_bound:
        v = HOLDS_WITH_MARGIN
    elif tail.ci_low <= prob_bound:
        v = HOLDS_WITHIN_CI
    else:
        v = VIOLATED
    return Verdict(v, float(prob_bound - tail.p_hat), {"tail": tail.to_json(),
                                                      "prob_bound": float(prob_bound)})


def validate_bound(ensemble, bound: BoundReport, cfg: MCConfig, *,
                   mc: MCResult | None = None) -> Verdict:
    """Verdict for `bound` against Monte-Carlo draws of `ensemble`.

    Expectation bounds compare the MC mean, tail bounds compare the
    Clopper-Pearson interval of the exceedance frequency with the bound's
    probability.
    """
    if bound.kind in _UPPER_KINDS:
        upper, allowed = True, _UPPER_KINDS[bound.kind]
    elif bound.kind in _LOWER_KINDS:
        upper, allowed = False, _LOWER_KINDS[bound.kind]
    else:
        raise ValueError(f"unknown bound kind {bound.kind!r}")
    if cfg.statistic not in allowed:
        raise ValueError(f"a {bound.kind} bound cannot be checked with statistic {cfg.statistic!r}")
    if mc is None:
        mc = estimate_statistic(ensemble, cfg)
    if bound.prob_bound is None:
        return validate_expectation(mc, bound.value, upper)
    tail = tail_from_values(mc.values, bound.value, "upper" if upper else "lower")
    return validate_tail(tail, bound.prob_bound)


def write_trials_csv(path, values) -> None:
    """Write per-trial values as ``trial,value`` rows with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        fh.write("trial,value\n")
        for i, v in enumerate(np.asarray(values, dtype=float)):
            fh.write(f"{i},{v:.17g}\n")
