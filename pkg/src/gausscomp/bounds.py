r"""Closed-form Gaussian-comparison bounds for spectral statistics of independent sums.

With ``Y = sum_i W_i`` and its Gaussian proxy ``Z``, the basic comparison is

.. math::

    \mathbb{E}\lambda_{\max}(Y) \le \mu + \sqrt{(R_+\varphi/3 + \sigma_*^2)\,2\log d}
        + \tfrac{R_+}{3}\log d,

where ``mu = E lambda_max(Z)``, ``phi`` is the matrix fluctuation and
``sigma_*^2`` the weak variance of ``Z``. The tail version replaces ``log d``
by ``s >= log d`` and holds with probability at least ``1 - d e^{-s}``.
Minimum eigenvalue and spectral norm variants, the matrix Bernstein baseline,
the iid psd comparison, and the Bennett and Bernstein tail families are also
provided. All evaluators are direct formula transcriptions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, asdict, replace
from typing import NamedTuple

__all__ = [
    "BoundInputs",
    "BoundReport",
    "RegimeWarning",
    "Tail",
    "maxeig_expect_bound",
    "maxeig_tail_level",
    "mineig_expect_bound",
    "mineig_tail_level",
    "norm_expect_bound",
    "norm_tail_level",
    "unbounded_tail",
    "bernstein_baseline",
    "psd_iid_bounds",
    "g_R",
    "bennett_tail",
    "bennett_level",
    "bernstein_tail",
    "invert_tail",
    "evaluate",
]


class RegimeWarning(UserWarning):
    """A formula was evaluated outside the range where its guarantee applies."""


class Tail(NamedTuple):
    level: float
    prob: float


@dataclass(frozen=True)
class BoundInputs:
    """Statistics entering a comparison bound.

    ``d`` is the dimension (``d1 + d2`` for spectral norms of rectangular
    matrices). ``mu`` is ``E lambda_max(Z)``, ``E lambda_min(Z)`` or ``E||Z||``
    depending on the bound. ``r`` is the matching summand bound ``R_+``,
    ``R_-`` or ``R_pm``. ``provenance`` maps input names to one of
    ``closed_form``, ``computed_exact``, ``mc``, ``lower_bound`` or ``user``.
    """

    d: int
    mu: float
    phi: float
    sigma_star2: float
    r: float
    s: float | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be at least 1")
        for name in ("phi", "sigma_star2", "r"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {v}")
        if not math.isfinite(self.mu):
            raise ValueError("mu must be finite")
        if self.s is not None and (math.isnan(self.s) or self.s < 0):
            raise ValueError("s must be nonnegative")

    def with_s(self, s: float) -> "BoundInputs":
        return replace(self, s=float(s))

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class BoundReport:
    kind: str
    inputs: BoundInputs
    value: float
    prob_bound: float | None = None
    out_of_regime: bool = False
    notes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "inputs": self.inputs.to_json(),
            "value": self.value,
            "prob_bound": self.prob_bound,
            "out_of_regime": self.out_of_regime,
        }
        if self.notes:
            out["notes"] = dict(self.notes)
        return out


def _deviation(phi, sigma_star2, r, x):
    return math.sqrt((r * phi / 3 + sigma_star2) * 2 * x) + r / 3 * x


def _check_s(s, floor, what):
    if s is None:
        raise ValueError("tail evaluation needs the parameter s")
    out = s < floor - 1e-12
    if out:
        warnings.warn(f"s = {s:g} is below {what} = {floor:g}; the tail guarantee does not apply",
                      RegimeWarning, stacklevel=3)
    return out


def maxeig_expect_bound(inp: BoundInputs) -> float:
    """``mu + sqrt((R phi/3 + sigma_*^2) 2 log d) + (R/3) log d``."""
    return inp.mu + _deviation(inp.phi, inp.sigma_star2, inp.r, math.log(inp.d))


def maxeig_tail_level(inp: BoundInputs) -> Tail:
    """Level exceeded by ``lambda_max(Y)`` with probability at most ``d e^{-s}``."""
    _check_s(inp.s, math.log(inp.d), "log d")
    return Tail(inp.mu + _deviation(inp.phi, inp.sigma_star2, inp.r, inp.s),
                inp.d * math.exp(-inp.s))


def mineig_expect_bound(inp: BoundInputs) -> float:
    """Lower bound ``mu - [sqrt((R_- phi/3 + sigma_*^2) 2 log d) + (R_-/3) log d]``."""
    return inp.mu - _deviation(inp.phi, inp.sigma_star2, inp.r, math.log(inp.d))


def mineig_tail_level(inp: BoundInputs) -> Tail:
    """Level undershot by ``lambda_min(Y)`` with probability at most ``d e^{-s}``."""
    _check_s(inp.s, math.log(inp.d), "log d")
    return Tail(inp.mu - _deviation(inp.phi, inp.sigma_star2, inp.r, inp.s),
                inp.d * math.exp(-inp.s))


def norm_expect_bound(inp: BoundInputs) -> float:
    """Spectral norm bound; ``inp.d`` is ``d1 + d2`` and ``inp.phi`` is ``phi_pm``."""
    return maxeig_expect_bound(inp)


def norm_tail_level(inp: BoundInputs) -> Tail:
    _check_s(inp.s, math.log(inp.d), "log(d1 + d2)")
    return Tail(inp.mu + _deviation(inp.phi, inp.sigma_star2, inp.r, inp.s),
                inp.d * math.exp(-inp.s))


def unbounded_tail(inp: BoundInputs, prob_M_exceeds_R: float) -> Tail:
    """Tail bound when ``lambda_max(W_i - E W_i) <= R`` only holds off an event of probability `prob_M_exceeds_R`."""
    if not 0 <= prob_M_exceeds_R <= 1:
        raise ValueError("prob_M_exceeds_R must lie in [0, 1]")
    level, prob = maxeig_tail_level(inp)
    return Tail(level, prob_M_exceeds_R + prob)


def bernstein_baseline(sigma2: float, r_plus: float, d: int, lam_max_mean: float) -> float:
    """Matrix Bernstein: ``lambda_max(EY) + sqrt(2 sigma^2 log d) + (R_+/3) log d``."""
    if sigma2 < 0 or r_plus < 0 or d < 1:
        raise ValueError("sigma2 and r_plus must be nonnegative and d positive")
    ld = math.log(d)
    return lam_max_mean + math.sqrt(2 * sigma2 * ld) + r_plus / 3 * ld


def psd_iid_bounds(mu_min: float, sigma_star2: float, d: int, s: float) -> tuple[float, float, float]:
    """Lower bounds for the minimum eigenvalue of a sum of iid psd matrices.

    Returns ``(expect_bound, tail_level, prob)`` with
    ``expect_bound = mu_min - sqrt(2 sigma_*^2 log 2d)``,
    ``tail_level = mu_min - sqrt(2 sigma_*^2 s)`` and ``prob = 2d e^{-s}``.
    """
    if sigma_star2 < 0 or d < 1:
        raise ValueError("sigma_star2 must be nonnegative and d positive")
    _check_s(s, math.log(2 * d), "log 2d")
    expect = mu_min - math.sqrt(sigma_star2 * 2 * math.log(2 * d))
    level = mu_min - math.sqrt(sigma_star2 * 2 * s)
    return expect, level, 2 * d * math.exp(-s)


def g_R(theta: float, R: float) -> float:
    """``sqrt((e^{theta R} - theta R - 1) / (R^2 / 2))``; equals `theta` at ``R = 0``."""
    if theta < 0 or R < 0:
        raise ValueError("theta and R must be nonnegative")
    x = theta * R
    if x == 0:
        return float(theta)
    if x < 1e-4:
        ratio = 1 + x / 3 + x * x / 12 + x ** 3 / 60
    else:
        ratio = (math.expm1(x) - x) / (x * x / 2)
    return theta * math.sqrt(ratio)


def bennett_level(phi: float, sigma_star2: float, r: float, mu: float, t: float) -> float:
    """Level ``mu + (phi/3 + sigma_*^2/R) t`` paired with :func:`bennett_tail`."""
    if r <= 0:
        raise ValueError("the Bennett form needs R > 0")
    return mu + (phi / 3 + sigma_star2 / r) * t


def bennett_tail(phi: float, sigma_star2: float, r: float, d: int, mu: float, t: float) -> float:
    """``d (e^t / (1+t)^{1+t})^{phi/(3R) + sigma_*^2/R^2}``, the probability of exceeding :func:`bennett_level`."""
    if r <= 0:
        raise ValueError("the Bennett form needs R > 0")
    if t < 0:
        raise ValueError("t must be nonnegative")
    expo = phi / (3 * r) + sigma_star2 / r ** 2
    h = (1 + t) * math.log1p(t) - t
    return d * math.exp(-expo * h)


def bernstein_tail(phi: float, sigma_star2: float, r: float, d: int, mu: float, t: float) -> float:
    """``d exp(-(t^2/2) / (R phi/3 + sigma_*^2 + R t/3))``, the probability of exceeding ``mu + t``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return float(d)
    denom = r * phi / 3 + sigma_star2 + r * t / 3
    if denom == 0:
        return 0.0
    return d * math.exp(-t * t / 2 / denom)


_FAMILIES = {
    "maxeig": (1, maxeig_tail_level),
    "mineig": (1, mineig_tail_level),
    "norm": (1, norm_tail_level),
    "psd-iid": (2, None),
}


def invert_tail(target_prob: float, bound_kind: str, inp: BoundInputs) -> tuple[float, float]:
    """Parameter ``s`` whose tail probability equals `target_prob`, and the resulting level.

    ``s = log(m d / p)`` with ``m = 2`` for the psd-iid family and ``m = 1``
    otherwise, clamped below at ``log(m d)``.
    """
    if not 0 < target_prob <= 1:
        raise ValueError("target probability must lie in (0, 1]")
    if bound_kind not in _FAMILIES:
        raise ValueError(f"unknown bound kind {bound_kind!r}")
    mult, fn = _FAMILIES[bound_kind]
    s = max(math.log(mult * inp.d / target_prob), math.log(mult * inp.d))
    if fn is None:
        level = psd_iid_bounds(inp.mu, inp.sigma_star2, inp.d, s)[1]
    else:
        level = fn(inp.with_s(s)).level
    return s, level


def evaluate(kind: str, inp: BoundInputs, *, sigma2: float | None = None) -> BoundReport:
    """Evaluate bound `kind` as a :class:`BoundReport`.

    Kinds are ``maxeig``, ``mineig``, ``norm``, ``psd-iid`` and ``bernstein``.
    With ``inp.s`` set, the report holds the tail level and its probability;
    otherwise the expectation bound.
    """
    notes = dict(inp.provenance)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        if kind == "bernstein":
            if sigma2 is None:
                raise ValueError("the Bernstein baseline needs sigma2")
            value = bernstein_baseline(sigma2, inp.r, inp.d, inp.mu)
            return BoundReport(kind, inp, value, notes=notes | {"sigma2": sigma2})
        if kind == "psd-iid":
            s = inp.s if inp.s is not None else math.log(2 * inp.d)
            expect, level, prob = psd_iid_bounds(inp.mu, inp.sigma_star2, inp.d, s)
            if inp.s is None:
                return BoundReport(kind, inp, expect, notes=notes)
            return BoundReport(kind, inp, level, prob, s < math.log(2 * inp.d) - 1e-12, notes)
        expect_fn = {"maxeig": maxeig_expect_bound, "mineig": mineig_expect_bound,
                     "norm": norm_expect_bound}
        if kind not in expect_fn:
            raise ValueError(f"unknown bound kind {kind!r}")
        if inp.s is None:
            return BoundReport(kind, inp, expect_fn[kind](inp), notes=notes)
        level, prob = _FAMILIES[kind][1](inp)
        return BoundReport(kind, inp, level, prob, inp.s < math.log(inp.d) - 1e-12, notes)
