import math

import numpy as np
import pytest

from gausscomp import bounds as bd
from gausscomp import ensembles as en
from gausscomp import montecarlo as mc


def scalar_ensemble(sampler):
    return en.SummandEnsemble(kind="scalar", params={}, dim=1, mean=np.zeros((1, 1)),
                              sampler=lambda rng: np.array([[sampler(rng)]]))


CONST = scalar_ensemble(lambda rng: 1.25)
NORMAL = scalar_ensemble(lambda rng: rng.standard_normal())


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            mc.MCConfig(trials=0)
        with pytest.raises(ValueError):
            mc.MCConfig(trials=10, workers=0)
        with pytest.raises(ValueError):
            mc.MCConfig(trials=10, statistic="trace")

    def test_statistic_mismatch(self):
        with pytest.raises(ValueError):
            mc.estimate_statistic(en.wigner_rademacher(4), mc.MCConfig(10, statistic="lambda_2"))
        with pytest.raises(ValueError):
            mc.estimate_statistic(en.rademacher_rect(2, 3), mc.MCConfig(10))


class TestEstimate:
    def test_deterministic(self):
        res = mc.estimate_statistic(CONST, mc.MCConfig(20))
        assert res.mean == 1.25
        assert res.stderr == 0

    def test_stderr_and_quantiles(self):
        res = mc.estimate_statistic(NORMAL, mc.MCConfig(500, seed=3))
        v = res.values
        assert res.stderr == pytest.approx(v.std(ddof=1) / math.sqrt(500))
        qs = [res.quantiles[q] for q in mc.QUANTILE_LEVELS]
        assert qs == sorted(qs)
        assert res.quantiles[0.5] == pytest.approx(np.median(v))

    def test_wigner_100(self):
        res = mc.estimate_statistic(en.wigner_rademacher(100), mc.MCConfig(400, seed=1))
        assert 18 - 3 * res.stderr <= res.mean <= 20.6 + 3 * res.stderr

    def test_rect_norm(self):
        res = mc.estimate_statistic(en.rademacher_rect(500, 2000),
                                    mc.MCConfig(50, seed=2, statistic="norm"))
        assert res.mean == pytest.approx(1.5, abs=0.05)

    @pytest.mark.parametrize("workers", [2, 4])
    def test_worker_invariance(self, workers):
        ens = en.wigner_rademacher(20)
        a = mc.estimate_statistic(ens, mc.MCConfig(37, seed=9))
        b = mc.estimate_statistic(ens, mc.MCConfig(37, seed=9, workers=workers))
        assert np.array_equal(a.values, b.values)

    def test_seed_changes_values(self):
        ens = en.wigner_rademacher(10)
        a = mc.estimate_statistic(ens, mc.MCConfig(10, seed=1))
        b = mc.estimate_statistic(ens, mc.MCConfig(10, seed=2))
        assert not np.array_equal(a.values, b.values)

    def test_json(self):
        res = mc.estimate_statistic(NORMAL, mc.MCConfig(5, seed=1))
        obj = res.to_json(include_values=True)
        assert len(obj["values"]) == 5
        assert set(obj["quantiles"]) == {"0.5", "0.9", "0.99"}


class TestTail:
    def test_infinite_levels(self):
        cfg = mc.MCConfig(100)
        p, lo, hi = mc.estimate_tail(NORMAL, -math.inf, cfg)
        assert p == 1 and hi == 1 and lo > 0.95
        assert mc.estimate_tail(NORMAL, math.inf, cfg).p_hat == 0

    def test_needs_trials(self):
        with pytest.raises(ValueError):
            mc.estimate_tail(NORMAL, 0.0, mc.MCConfig(99))

    def test_lower_side(self):
        est = mc.tail_from_values([0, 1, 2, 3], 1, side="lower")
        assert est.exceedances == 2

    def test_coverage(self):
        covered = 0
        for rep in range(50):
            _, lo, hi = mc.estimate_tail(NORMAL, 1.64485, mc.MCConfig(400, seed=1000 + rep))
            covered += lo <= 0.05 <= hi
        assert covered >= 45

    def test_wigner_levels(self):
        d = 100
        ens = en.wigner_rademacher(d)
        res = mc.estimate_statistic(ens, mc.MCConfig(400, seed=5))
        inp = bd.BoundInputs(d, 2 * math.sqrt(d), 2 * math.sqrt(d), 2 * (1 - 1 / d), 1.0)
        level1, prob1 = bd.maxeig_tail_level(inp.with_s(math.log(d)))
        assert mc.tail_from_values(res.values, level1).ci_low <= prob1
        level2, prob2 = bd.maxeig_tail_level(inp.with_s(2 * math.log(d)))
        tail = mc.tail_from_values(res.values, level2)
        assert tail.p_hat <= prob2 + (tail.ci_high - tail.ci_low)


class TestVerdicts:
    def test_zero_variance(self):
        inp = bd.BoundInputs(1, 1.25, 0.0, 0.0, 0.0)
        v = mc.validate_bound(CONST, bd.evaluate("maxeig", inp), mc.MCConfig(10))
        assert v.verdict == mc.HOLDS_WITH_MARGIN
        assert v.margin == 0

    def test_within_ci_and_violated(self):
        res = mc.MCResult(1.0, 0.1, {}, 100, 0)
        assert mc.validate_expectation(res, 0.95).verdict == mc.HOLDS_WITHIN_CI
        assert mc.validate_expectation(res, 0.5).verdict == mc.VIOLATED
        assert not mc.validate_expectation(res, 0.5).ok
        assert mc.validate_expectation(res, 1.05, upper=False).verdict == mc.HOLDS_WITHIN_CI

    def test_tail_verdicts(self):
        tail = mc.tail_from_values(np.r_[np.ones(5), np.zeros(95)], 0.5)
        assert mc.validate_tail(tail, 0.5).verdict == mc.HOLDS_WITH_MARGIN
        assert mc.validate_tail(tail, 0.04).verdict == mc.HOLDS_WITHIN_CI
        assert mc.validate_tail(tail, 0.001).verdict == mc.VIOLATED

    def test_wigner_expectation(self):
        d = 100
        inp = bd.BoundInputs(d, 2 * math.sqrt(d), 2 * math.sqrt(d), 2 * (1 - 1 / d), 1.0)
        rep = bd.evaluate("maxeig", inp)
        assert rep.value == pytest.approx(2 * math.sqrt(d) + 11, abs=1.0)
        v = mc.validate_bound(en.wigner_rademacher(d), rep, mc.MCConfig(100, seed=4))
        assert v.verdict == mc.HOLDS_WITH_MARGIN

    def test_covariance_min(self):
        d, n = 500, 2000
        inp = bd.BoundInputs(d, 0.0, 1.0, 1e-3, 5e-4)
        rep = bd.evaluate("mineig", inp)
        cfg = mc.MCConfig(10, seed=6, statistic="lambda_min")
        v = mc.validate_bound(en.rademacher_covariance(d, n), rep, cfg)
        assert v.ok
        assert v.details["mc_mean"] == pytest.approx(0.25, abs=0.05)

    def test_kind_statistic_mismatch(self):
        rep = bd.evaluate("mineig", bd.BoundInputs(1, 0.0, 0.0, 0.0, 0.0))
        with pytest.raises(ValueError):
            mc.validate_bound(CONST, rep, mc.MCConfig(10, statistic="lambda_max"))


def test_csv(tmp_path):
    path = tmp_path / "t.csv"
    mc.write_trials_csv(path, [0.1, 1 / 3])
    lines = path.read_text().splitlines()
    assert lines[0] == "trial,value"
    assert float(lines[2].split(",")[1]) == 1 / 3
