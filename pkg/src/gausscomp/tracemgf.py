r"""Trace exponentials and numerical checks of the trace-mgf comparison machinery.

The line function ``f(t) = Tr exp(A + tH)`` is the Laplace transform of a
positive measure, so its even derivatives are nonnegative, its odd derivatives
are increasing, and for ``t >= 0``

.. math::  e^{t\lambda_{\min}(H)} f''(0) \le f''(t) \le e^{t\lambda_{\max}(H)} f''(0).

:func:`check_stahl_structure` verifies these facts by finite differences.
:func:`check_one_step` and :func:`check_exchange` estimate both sides of the
trace-mgf comparisons

.. math::

    \mathbb{E}\operatorname{Tr} e^{A + W} \le \mathbb{E}\operatorname{Tr} e^{A + g X},
    \qquad
    \mathbb{E}\operatorname{Tr} e^{\theta(Y + \Delta)}
        \le \mathbb{E}\operatorname{Tr} e^{g_R(\theta) Z + \theta\Delta}

by Monte Carlo, where ``X`` and ``Z`` are Gaussian with the variance of the
centered summand ``W`` and the centered sum ``Y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .bounds import g_R
from .core import as_hermitian
from .gaussian import GaussianModel, covariance_proxy
from .rng import as_generator

__all__ = [
    "trace_exp",
    "trace_exp_batch",
    "laplace_upper",
    "LineFunction",
    "line_derivatives",
    "StahlReport",
    "ComparisonReport",
    "check_stahl_structure",
    "check_one_step",
    "check_exchange",
]


def trace_exp(a) -> float:
    """``Tr exp(A) = e^{lambda_max} sum_j e^{lambda_j - lambda_max}`` (overflow safe)."""
    ev = np.linalg.eigvalsh(as_hermitian(a))
    top = ev[-1]
    return float(math.exp(top) * np.sum(np.exp(ev - top)))


def trace_exp_batch(stack) -> np.ndarray:
    """:func:`trace_exp` over a ``(n, d, d)`` stack of self-adjoint matrices."""
    ev = np.linalg.eigvalsh(np.asarray(stack))
    top = ev[:, -1]
    return np.exp(top) * np.sum(np.exp(ev - top[:, None]), axis=1)


def laplace_upper(y, theta: float) -> float:
    """``(1/theta) log Tr exp(theta Y)``, an upper bound for ``lambda_max(Y)``."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    ev = theta * np.linalg.eigvalsh(as_hermitian(y))
    top = ev[-1]
    return float((top + math.log(np.sum(np.exp(ev - top)))) / theta)


class LineFunction:
    """``f(t) = Tr exp(A + t H)`` for self-adjoint ``A`` and ``H``."""

    def __init__(self, base, direction, grid=None):
        self.base = as_hermitian(base)
        self.direction = as_hermitian(direction)
        if self.base.shape != self.direction.shape:
            raise ValueError("base and direction must have the same shape")
        self.grid = None if grid is None else np.asarray(grid, dtype=float)
        self.h_norm = float(np.abs(np.linalg.eigvalsh(self.direction)).max(initial=0.0))

    def __call__(self, t: float) -> float:
        return trace_exp(self.base + t * self.direction)

    def values(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return trace_exp_batch(self.base[None] + ts[:, None, None] * self.direction[None])


# fourth-order central stencils: offsets and weights, divided by h^k * denom
_STENCILS = {
    0: ((0,), (1,), 1),
    1: ((-2, -1, 1, 2), (1, -8, 8, -1), 12),
    2: ((-2, -1, 0, 1, 2), (-1, 16, -30, 16, -1), 12),
    3: ((-3, -2, -1, 1, 2, 3), (1, -8, 13, -13, 8, -1), 8),
    4: ((-3, -2, -1, 0, 1, 2, 3), (-1, 12, -39, 56, -39, 12, -1), 6),
}

# base step multipliers; third and fourth differences need a wider step to
# keep roundoff (which grows like eps / h^k) below truncation error
_STEP = {0: 1e-3, 1: 1e-3, 2: 1e-3, 3: 2e-2, 4: 5e-2}


def _stencil(lf, t, k, h):
    offs, wts, denom = _STENCILS[k]
    vals = lf.values([t + o * h for o in offs])
    return float(np.dot(wts, vals) / (denom * h ** k))


def line_derivatives(lf: LineFunction, t: float, k: int, h: float | None = None) -> float:
    """Finite-difference estimate of ``f^{(k)}(t)`` for ``k <= 4``.

    Fourth-order central stencils at steps ``h`` and ``h/2`` are combined by
    one Richardson extrapolation. The default step is ``c_k (1 + ||H||)``
    with ``c_k = 1e-3`` for ``k <= 2``.
    """
    if k not in _STENCILS:
        raise ValueError("order must be between 0 and 4")
    if k == 0:
        return lf(t)
    if lf.h_norm == 0:
        return 0.0
    if h is None:
        h = _STEP[k] * (1 + lf.h_norm)
    if h <= 0:
        raise ValueError("step must be positive")
    coarse = _stencil(lf, t, k, h)
    fine = _stencil(lf, t, k, h / 2)
    return (16 * fine - coarse) / 15


@dataclass
class StahlReport:
    grid: list
    f2: list
    f3: list
    lambda_min_h: float
    lambda_max_h: float
    checks: dict
    passed: bool

    def to_json(self) -> dict:
        return asdict(self)


def check_stahl_structure(lf: LineFunction, grid=None, h: float | None = None, *,
                          tol: float = 1e-6, rel_tol: float = 1e-4) -> StahlReport:
    """Check derivative signs, monotonicity of ``f'''``, and the ``f''`` sandwich on `grid`.

    `grid` must lie in ``[0, 2]``; defaults to ten equispaced points.
    """
    if grid is None:
        grid = lf.grid if lf.grid is not None else np.linspace(0.0, 2.0, 10)
    grid = np.sort(np.asarray(grid, dtype=float))
    if grid.size == 0 or grid[0] < 0 or grid[-1] > 2:
        raise ValueError("grid must be a nonempty subset of [0, 2]")
    lo, hi = (float(x) for x in np.linalg.eigvalsh(lf.direction)[[0, -1]])
    f2 = np.array([line_derivatives(lf, t, 2, h) for t in grid])
    f3 = np.array([line_derivatives(lf, t, 3) for t in grid])
    f2_0 = line_derivatives(lf, 0.0, 2, h)
    lower = np.exp(grid * lo) * f2_0
    upper = np.exp(grid * hi) * f2_0
    slack = rel_tol * np.maximum(np.abs(f2), np.abs(upper)) + tol
    f3_tol = tol + rel_tol * float(np.abs(f3).max(initial=0.0))
    checks = {
        "second_nonneg": bool(np.all(f2 >= -tol)),
        "third_increasing": bool(np.all(np.diff(f3) >= -f3_tol)),
        "sandwich_lower": bool(np.all(lower <= f2 + slack)),
        "sandwich_upper": bool(np.all(f2 <= upper + slack)),
    }
    return StahlReport(grid.tolist(), f2.tolist(), f3.tolist(), lo, hi, checks,
                       all(checks.values()))


@dataclass
class ComparisonReport:
    lhs: float
    rhs: float
    lhs_stderr: float
    rhs_stderr: float
    stderr: float
    margin: float
    passed: bool
    g: float
    trials: int
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return float(x.mean()), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def _report(lhs_vals, rhs_vals, g, details):
    lm, ls = _mean_se(lhs_vals)
    rm, rs = _mean_se(rhs_vals)
    se = math.hypot(ls, rs)
    return ComparisonReport(lm, rm, ls, rs, se, rm - lm, lm <= rm + 3 * se + 1e-12 * abs(rm),
                            g, len(lhs_vals), details)


def _check_centered(ws, rng, n_probes=5):
    d = ws.shape[1]
    for _ in range(n_probes):
        m = rng.standard_normal((d, d))
        m = m + m.T
        ips = np.einsum("tij,ij->t", ws.conj(), m).real
        mean, se = _mean_se(ips)
        if abs(mean) > 5 * se + 1e-12 * (1 + np.abs(ips).max()):
            raise ValueError(f"summand is not centered: probe mean {mean:.3g} vs stderr {se:.3g}")


def check_one_step(a, summand_sampler, R: float, trials: int, rng, *,
                   proxy: GaussianModel | None = None, batch: int = 4096) -> ComparisonReport:
    """Monte-Carlo check of ``E Tr e^{A+W} <= E Tr e^{A+gX}`` with ``g = g_R(1)``.

    `summand_sampler(rng)` draws one centered summand ``W`` with
    ``lambda_max(W) <= R``. ``X`` is Gaussian with the variance of ``W``; when
    `proxy` is not given it is fitted from the drawn summands.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    if trials < 2:
        raise ValueError("need at least two trials")
    rng = as_generator(rng)
    a = as_hermitian(a)
    ws = np.array([as_hermitian(summand_sampler(rng)) for _ in range(trials)])
    top = np.linalg.eigvalsh(ws[:100])[:, -1].max()
    if top > R + 1e-12:
        raise ValueError(f"summand has lambda_max {top:.6g} > R = {R:g}")
    _check_centered(ws, rng)
    if proxy is None:
        proxy = covariance_proxy(ws, mean=np.zeros_like(ws[0]))
    g = g_R(1.0, R)
    lhs = trace_exp_batch(a + ws)
    rhs = np.concatenate([
        trace_exp_batch(a + g * proxy.sample_centered(rng, min(batch, trials - i)))
        for i in range(0, trials, batch)
    ])
    return _report(lhs, rhs, g, {"R": R, "dim": a.shape[0]})


def check_exchange(ensemble, theta: float, trials: int, rng, *,
                   batch: int = 4096) -> ComparisonReport:
    """Monte-Carlo check of ``E Tr e^{theta(Y+Delta)} <= E Tr e^{g_R(theta) Z + theta Delta}``.

    ``Y`` is the centered sum of `ensemble`, ``Delta = E Y`` its mean, ``Z`` the
    centered Gaussian proxy, and ``R = ensemble.r_plus``.
    """
    if ensemble.r_plus is None:
        raise ValueError(f"{ensemble.kind} ensemble declares no R_+")
    if ensemble.proxy is None:
        raise ValueError(f"{ensemble.kind} ensemble has no Gaussian proxy")
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    rng = as_generator(rng)
    delta = as_hermitian(ensemble.mean)
    g = g_R(theta, ensemble.r_plus)
    ys = np.array([as_hermitian(np.asarray(ensemble.sample(rng))) for _ in range(trials)])
    lhs = trace_exp_batch(theta * ys)
    rhs = np.concatenate([
        trace_exp_batch(g * ensemble.proxy.sample_centered(rng, min(batch, trials - i))
                        + theta * delta)
        for i in range(0, trials, batch)
    ])
    return _report(lhs, rhs, g, {"theta": theta, "R": ensemble.r_plus, "kind": ensemble.kind})
