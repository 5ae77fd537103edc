"""Parameter calculators and end-to-end experiments for the applications.

Each experiment builds an ensemble, evaluates the relevant comparison bounds
with explicit provenance for every input, runs Monte Carlo, and returns an
:class:`ExperimentReport` holding verdicts for the guaranteed inequalities
and pass/fail flags for the (non-guaranteed) numerical predictions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import bounds as bd
from . import ensembles as en
from . import gaussian as gm
from . import montecarlo as mc

__all__ = [
    "GraphBound",
    "ExperimentReport",
    "graph_lambda2_bound",
    "pauli_required_k",
    "covariance_required_n",
    "sparsestack_params",
    "subspace_fixture",
    "run_experiment",
    "EXPERIMENTS",
]


def _ceil(x: float) -> int:
    # guard against values like 229.00000000000003 from rounding
    return math.ceil(x - 1e-9 * max(1.0, abs(x)))


def _unit_interval(name, x, closed_right=False):
    ok = 0 < x <= 1 if closed_right else 0 < x < 1
    if not ok:
        raise ValueError(f"{name} must lie in (0, 1{']' if closed_right else ')'}, got {x}")


# ---------------------------------------------------------------------- calculators


@dataclass
class GraphBound:
    """Second-eigenvalue bound for the permutation model of a regular graph."""

    n: int
    degree: int
    expect_bound: float
    regime: dict

    def tail(self, s: float) -> bd.Tail:
        """Level exceeded by ``lambda_2`` with probability at most ``n e^{-s}``."""
        if not math.log(self.n) - 1e-12 <= s <= math.sqrt(self.degree) + 1e-12:
            warnings.warn(f"s = {s:g} lies outside [log n, sqrt(degree)]", bd.RegimeWarning,
                          stacklevel=2)
        return bd.Tail(self._level(s * s), self.n * math.exp(-s))

    def _level(self, x2):
        d = self.degree
        return 2 * math.sqrt(d - 1) * (1 + 4 * (x2 / d) ** 0.25)

    @property
    def in_regime(self) -> bool:
        return all(self.regime.values())


def graph_lambda2_bound(n: int, degree: int) -> GraphBound:
    """``E lambda_2 <= 2 sqrt(d-1) [1 + 4 (log^2 n / d)^{1/4}]`` for even degree ``d``.

    The guarantee needs ``log^2 n <= d <= n``; ``regime`` records both checks.
    """
    if degree % 2:
        raise ValueError("degree must be even")
    if degree < 2 or n < 2:
        raise ValueError("need n >= 2 and degree >= 2")
    ln = math.log(n)
    regime = {"log2n_le_degree": ln * ln <= degree, "degree_le_n": degree <= n}
    gb = GraphBound(n, degree, 0.0, regime)
    gb.expect_bound = gb._level(ln * ln)
    return gb


def pauli_required_k(n_qubits: int, alpha: float, p: float) -> tuple[int, bool]:
    """Smallest ``k >= [((n+1) + log(1/p)) / alpha^2]^2``, and whether ``k <= N^2/9``."""
    _unit_interval("alpha", alpha, closed_right=True)
    _unit_interval("p", p, closed_right=True)
    k = _ceil((((n_qubits + 1) + math.log(1 / p)) / alpha ** 2) ** 2)
    return k, k <= 4 ** n_qubits / 9


def covariance_required_n(d: int, beta: float, eps: float, p: float) -> int:
    """Sample size ``27 beta^2 max(d, log(d/p)) / eps^2`` (rounded up)."""
    if beta < 1:
        raise ValueError("beta must be at least 1")
    _unit_interval("eps", eps, closed_right=True)
    _unit_interval("p", p, closed_right=True)
    return _ceil(27 * beta ** 2 * max(d, math.log(d / p)) / eps ** 2)


def sparsestack_params(d: int, alpha: float, p: float) -> tuple[int, int, int]:
    """``(zeta, k, b)`` with ``zeta = ceil(6 log(d/p) / alpha)`` and ``k = zeta b``.

    ``k`` is the smallest multiple of ``zeta`` that is at least
    ``16 max(d, log(d/p)) / alpha^2``.
    """
    _unit_interval("alpha", alpha, closed_right=True)
    _unit_interval("p", p, closed_right=True)
    ld = math.log(d / p)
    zeta = max(1, _ceil(6 * ld / alpha))
    k_min = 16 * max(d, ld) / alpha ** 2
    b = max(1, _ceil(k_min / zeta))
    return zeta, zeta * b, b


def subspace_fixture(kind: str, n: int, d: int, rng=None) -> np.ndarray:
    """Orthonormal ``n x d`` test subspaces.

    ``random`` is the Q factor of a Gaussian matrix; ``coordinate`` spans the
    first ``d`` standard basis vectors; ``aligned`` has flat columns supported
    on ``d`` disjoint contiguous blocks, so every coordinate a sketch row
    hashes together carries equal weight.
    """
    if kind == "random":
        g = np.random.default_rng(rng).standard_normal((n, d))
        return np.linalg.qr(g)[0]
    if kind == "coordinate":
        return np.eye(n, d)
    if kind == "aligned":
        u = np.zeros((n, d))
        for j, blk in enumerate(np.array_split(np.arange(n), d)):
            u[blk, j] = 1 / math.sqrt(blk.size)
        return u
    raise ValueError(f"unknown subspace fixture {kind!r}")


# ---------------------------------------------------------------------- reports


@dataclass
class ExperimentReport:
    name: str
    params: dict
    bound_inputs: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    mc_results: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    regime_flags: dict = field(default_factory=dict)
    seed: int = 0
    trial_values: dict = field(default_factory=dict, repr=False)

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts.values())

    def to_json(self, include_values: bool = False) -> dict:
        out = {
            "name": self.name,
            "params": self.params,
            "bound_inputs": self.bound_inputs,
            "bounds": self.bounds,
            "mc_results": {k: r.to_json(include_values) for k, r in self.mc_results.items()},
            "verdicts": {k: v.to_json() for k, v in self.verdicts.items()},
            "checks": self.checks,
            "regime_flags": self.regime_flags,
            "seed": self.seed,
            "ok": self.ok,
        }
        return out


def _inputs_json(inp: bd.BoundInputs) -> dict:
    return inp.to_json()


def _success_verdict(tail: mc.TailEstimate, target: float) -> mc.Verdict:
    """Verdict for a guarantee ``P(success) >= target``."""
    if tail.ci_low >= target:
        v = mc.HOLDS_WITH_MARGIN
    elif tail.ci_high >= target:
        v = mc.HOLDS_WITHIN_CI
    else:
        v = mc.VIOLATED
    return mc.Verdict(v, tail.p_hat - target, {"success": tail.to_json(), "target": target})


def _run(ens, cfg, statistic, tag=0):
    return mc.estimate_statistic(ens, replace(cfg, statistic=statistic), tag=tag)


def _proxy_norm_mc(model: gm.GaussianModel, cfg: mc.MCConfig, trials: int) -> mc.MCResult:
    def one(rng, i):
        x = model.sample_centered(rng)
        ev = np.linalg.eigvalsh(x)
        return max(-ev[0], ev[-1])

    vals = mc.run_trials(one, trials, cfg.seed, cfg.workers, tag=1)
    return mc.summarize(vals, cfg.seed, "norm")


# ---------------------------------------------------------------------- experiments


def _wigner(p, cfg):
    d = int(p.get("d", 100))
    ens = en.wigner_rademacher(d)
    wv = gm.weak_variance(ens.proxy)
    mu = 2 * math.sqrt(d)
    prov = {"mu": "closed_form", "phi": "closed_form", "sigma_star2": wv.exactness, "r": "closed_form"}
    inp = bd.BoundInputs(d, mu, mu, wv.value, ens.r_plus, provenance=prov)
    s = 2 * math.log(d)
    expect = bd.evaluate("maxeig", inp)
    tail = bd.evaluate("maxeig", inp.with_s(s))
    bern = bd.evaluate("bernstein", replace(inp, mu=0.0), sigma2=gm.matrix_variance(ens.proxy))
    res = _run(ens, cfg, "lambda_max")
    rep = ExperimentReport("wigner", {"d": d}, seed=cfg.seed)
    rep.bound_inputs = _inputs_json(inp)
    rep.bounds = {"maxeig_expect": expect.to_json(), "maxeig_tail": tail.to_json(),
                  "bernstein": bern.to_json(), "ratio_to_2sqrt_d": expect.value / mu}
    rep.mc_results["lambda_max"] = res
    rep.verdicts["maxeig_expect"] = mc.validate_expectation(res, expect.value)
    rep.verdicts["maxeig_tail"] = mc.validate_tail(
        mc.tail_from_values(res.values, tail.value), tail.prob_bound)
    rep.checks["mean_above_0.9_edge"] = res.mean >= 0.9 * mu
    rep.checks["sharper_than_bernstein"] = expect.value < bern.value
    return rep


def _bai_yin(p, cfg):
    d, n = int(p.get("d", 500)), int(p.get("n", 2000))
    ens = en.rademacher_covariance(d, n)
    rho = d / n
    wv = gm.weak_variance(ens.proxy)
    mu = 1 - 2 * math.sqrt(rho)
    prov = {"mu": "closed_form", "phi": "closed_form", "sigma_star2": wv.exactness, "r": "closed_form"}
    inp = bd.BoundInputs(d, mu, 2 * math.sqrt(rho), wv.value, ens.r_minus, provenance=prov)
    expect = bd.evaluate("mineig", inp)
    res = _run(ens, cfg, "lambda_min")
    edge = (1 - math.sqrt(rho)) ** 2
    rep = ExperimentReport("bai_yin", {"d": d, "n": n, "rho": rho}, seed=cfg.seed)
    rep.bound_inputs = _inputs_json(inp)
    rep.bounds = {"mineig_expect": expect.to_json(), "bai_yin_edge": edge}
    rep.mc_results["lambda_min"] = res
    rep.verdicts["mineig_expect"] = mc.validate_expectation(res, expect.value, upper=False)
    rep.checks["near_bai_yin_edge"] = abs(res.mean - edge) <= 0.05
    return rep


def _rect_norm(p, cfg):
    d, n = int(p.get("d", 500)), int(p.get("n", 2000))
    ens = en.rademacher_rect(d, n)
    rho = d / n
    wv = gm.weak_variance(ens.proxy)
    mu = 1 + math.sqrt(rho)
    prov = {"mu": "closed_form", "phi": "closed_form", "sigma_star2": wv.exactness, "r": "closed_form"}
    inp = bd.BoundInputs(d + n, mu, mu, wv.value, ens.r_pm, provenance=prov)
    expect = bd.evaluate("norm", inp)
    res = _run(ens, cfg, "norm")
    rep = ExperimentReport("rect_norm", {"d": d, "n": n, "rho": rho}, seed=cfg.seed)
    rep.bound_inputs = _inputs_json(inp)
    rep.bounds = {"norm_expect": expect.to_json(), "limit": mu}
    rep.mc_results["norm"] = res
    rep.verdicts["norm_expect"] = mc.validate_expectation(res, expect.value)
    rep.checks["near_limit"] = abs(res.mean - mu) <= 0.05
    return rep


def _graph(p, cfg):
    n = int(p.get("n", 1000))
    degree = int(p.get("degree", 64))
    flags = {}
    if degree % 2:
        warnings.warn(f"degree {degree} is odd; using {degree + 1}", UserWarning, stacklevel=3)
        flags["degree_rounded_up"] = True
        degree += 1
    gb = graph_lambda2_bound(n, degree)
    flags.update(gb.regime)
    ens = en.permutation_graph(n, degree).compressed
    mu = 2 * math.sqrt(degree)
    prov = {"mu": "closed_form", "phi": "closed_form", "sigma_star2": "closed_form", "r": "closed_form"}
    inp = bd.BoundInputs(n - 1, mu, mu, 2 * degree / (n - 1), ens.r_plus, provenance=prov)
    direct = bd.evaluate("maxeig", inp)
    res = _run(ens, cfg, "lambda_max")
    rep = ExperimentReport("graph", {"n": n, "degree": degree}, seed=cfg.seed, regime_flags=flags)
    rep.bound_inputs = _inputs_json(inp)
    rep.bounds = {"lambda2_expect": gb.expect_bound, "maxeig_expect_perp": direct.to_json()}
    rep.mc_results["lambda_2"] = res
    rep.verdicts["lambda2_expect"] = mc.validate_expectation(res, gb.expect_bound)
    rep.verdicts["maxeig_expect_perp"] = mc.validate_expectation(res, direct.value)
    s = math.log(n)
    if s <= math.sqrt(degree):
        s2 = min(2 * s, math.sqrt(degree))
        level2, prob2 = gb.tail(s2)
        rep.bounds["lambda2_tail"] = {"s": s2, "level": level2, "prob": prob2}
        rep.verdicts["lambda2_tail"] = mc.validate_tail(
            mc.tail_from_values(res.values, level2), prob2)
    return rep


def _pauli(p, cfg):
    nq = int(p.get("n_qubits", 8))
    alpha = float(p.get("alpha", 0.8))
    pf = float(p.get("p", 0.5))
    k_req, feasible = pauli_required_k(nq, alpha, pf)
    k = int(p.get("k", k_req))
    ens = en.pauli_model(nq, k)
    z_trials = int(p.get("proxy_trials", 200))
    znorm = _proxy_norm_mc(ens.proxy, cfg, z_trials)
    res = _run(ens, cfg, "norm")
    target = (1 + alpha) * znorm.mean
    big_n = 2 ** nq
    prov = {"mu": "mc", "phi": "mc", "sigma_star2": "closed_form", "r": "closed_form"}
    inp = bd.BoundInputs(2 * big_n, znorm.mean, znorm.mean, gm.weak_variance(ens.proxy).value,
                         ens.r_pm, provenance=prov)
    s = math.log(2 * big_n / pf)
    norm_expect = bd.evaluate("norm", inp)
    norm_tail = bd.evaluate("norm", inp.with_s(s))
    rep = ExperimentReport("pauli", {"n_qubits": nq, "alpha": alpha, "p": pf, "k": k},
                           seed=cfg.seed,
                           regime_flags={"k_meets_requirement": k >= k_req, "k_feasible": feasible,
                                         "k_le_N2_over_9": k <= big_n ** 2 / 9})
    rep.bound_inputs = _inputs_json(inp)
    rep.bounds = {"required_k": k_req, "edge_target": target,
                  "norm_expect": norm_expect.to_json(), "norm_tail": norm_tail.to_json()}
    rep.mc_results["norm_Y"] = res
    rep.mc_results["norm_Z"] = znorm
    # both sides are estimated; the comparison target carries the proxy's stderr
    combined = mc.MCResult(res.mean, math.hypot(res.stderr, (1 + alpha) * znorm.stderr),
                           res.quantiles, res.trials, res.seed, "norm")
    rep.verdicts["edge_expect"] = mc.validate_expectation(combined, target)
    rep.verdicts["edge_tail"] = mc.validate_tail(mc.tail_from_values(res.values, target), pf)
    rep.verdicts["norm_expect"] = mc.validate_expectation(combined, norm_expect.value)
    return rep


def _covariance(p, cfg):
    d = int(p.get("d", 16))
    vec = p.get("vectors", "gaussian")
    beta = float(p.get("beta", math.sqrt(2)))
    eps = float(p.get("eps", 0.5))
    pf = float(p.get("p", 0.1))
    n = int(p.get("n", covariance_required_n(d, beta, eps, pf)))
    sampler = {"gaussian": en.gaussian_vectors, "rademacher": en.rademacher_vectors}[vec]
    ens = en.isotropic_covariance(sampler, d, n, beta)
    beta2_hat = en.estimate_beta2(sampler, d, np.random.default_rng([cfg.seed, 7]))
    phi = math.sqrt(12 * beta ** 2 * d / n)
    ss2 = beta ** 2 / n
    prov = {"mu": "closed_form", "phi": "closed_form", "sigma_star2": "closed_form", "r": "closed_form"}
    # lambda_min(Z) >= 1 - phi on average, so mu = 1 - phi is a valid lower input
    inp = bd.BoundInputs(d, 1 - phi, phi, ss2, ens.r_minus, provenance=prov)
    s = math.log(d / pf)
    tail = bd.evaluate("mineig", inp.with_s(max(s, math.log(d))))
    res = _run(ens, cfg, "lambda_min")
    succ = mc.tail_from_values(res.values, 1 - eps, "upper")
    rep = ExperimentReport("covariance", {"d": d, "n": n, "beta": beta, "eps": eps, "p": pf,
                                          "vectors": vec}, seed=cfg.seed,
                           regime_flags={"beta_ge_1": beta >= 1,
                                         "beta2_empirical_le_declared": beta2_hat <= beta ** 2 * 1.1})
    rep.bound_inputs = _inputs_json(inp)
    rep.bounds = {"required_n": covariance_required_n(d, beta, eps, pf),
                  "mineig_tail": tail.to_json(), "beta2_empirical": beta2_hat}
    rep.mc_results["lambda_min"] = res
    rep.verdicts["success_probability"] = _success_verdict(succ, 1 - pf)
    rep.verdicts["mineig_tail"] = mc.validate_tail(
        mc.tail_from_values(res.values, tail.value, "lower"), tail.prob_bound)
    rep.checks["tail_level_meets_eps"] = tail.value >= 1 - eps
    return rep


def _sparsestack(p, cfg):
    d = int(p.get("d", 20))
    alpha = float(p.get("alpha", 0.5))
    pf = float(p.get("p", 0.1))
    n = int(p.get("n", 5000))
    fixture = p.get("subspace", "random")
    zeta, k, b = sparsestack_params(d, alpha, pf)
    zeta = int(p.get("zeta", zeta))
    b = int(p.get("b", b))
    k = zeta * b
    u = subspace_fixture(fixture, n, d, np.random.default_rng([cfg.seed, 11]))
    ens = en.sparsestack_embedding(u, b, zeta)
    s = max(math.log(d / pf), math.log(d))
    phi = 2 * math.sqrt(d / k)
    prov = {"mu": "closed_form", "phi": "closed_form", "sigma_star2": "closed_form", "r": "closed_form"}
    inp = bd.BoundInputs(d, 1 - phi, phi, 1 / k, ens.r_minus, provenance=prov)
    tail = bd.evaluate("mineig", inp.with_s(s))
    expect = bd.evaluate("mineig", inp)
    res = _run(ens, cfg, "lambda_min")
    # the guarantee is the strict event phi^2_min > 1 - alpha
    succ = mc.tail_from_values(res.values, np.nextafter(1 - alpha, np.inf), "upper")
    rep = ExperimentReport("sparsestack", {"d": d, "alpha": alpha, "p": pf, "n": n, "zeta": zeta,
                                           "k": k, "b": b, "subspace": fixture}, seed=cfg.seed)
    rep.bound_inputs = _inputs_json(inp)
    rep.bounds = {"mineig_tail": tail.to_json(), "mineig_expect": expect.to_json(),
                  "target": 1 - alpha}
    rep.mc_results["phi2_min"] = res
    rep.verdicts["injectivity_probability"] = _success_verdict(succ, 1 - pf)
    rep.verdicts["injectivity_expect"] = mc.validate_expectation(res, 1 - alpha, upper=False)
    rep.verdicts["mineig_tail"] = mc.validate_tail(
        mc.tail_from_values(res.values, tail.value, "lower"), tail.prob_bound)
    rep.checks["tail_level_meets_target"] = tail.value >= 1 - alpha
    # each trial's sketch is the first draw from its stream, so it can be rebuilt exactly
    def sparsity_ok(rng, i):
        csc = en.sparsestack(b, zeta, n, rng).tocsr().tocsc()
        return float(np.all(np.diff(csc.indptr) == zeta))

    ok = mc.run_trials(sparsity_ok, cfg.trials, cfg.seed, cfg.workers)
    rep.checks["column_sparsity_equals_zeta"] = bool(np.all(ok == 1.0))
    return rep


EXPERIMENTS: dict[str, tuple[Callable, int]] = {
    "wigner": (_wigner, 200),
    "bai_yin": (_bai_yin, 50),
    "rect_norm": (_rect_norm, 50),
    "graph": (_graph, 100),
    "pauli": (_pauli, 100),
    "covariance": (_covariance, 200),
    "sparsestack": (_sparsestack, 200),
}


def run_experiment(name: str, overrides: dict | None = None,
                   cfg: mc.MCConfig | None = None) -> ExperimentReport:
    """Run a named experiment.

    `overrides` replaces default model parameters; `cfg` sets trials, seed and
    workers (its statistic field is ignored). Per-trial values are kept in
    the report's ``mc_results``.
    """
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    fn, default_trials = EXPERIMENTS[name]
    if cfg is None:
        cfg = mc.MCConfig(trials=default_trials)
    return fn(dict(overrides or {}), cfg)
