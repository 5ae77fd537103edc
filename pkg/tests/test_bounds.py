import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gausscomp import bounds as bd

WIG = dict(d=1000, mu=2 * math.sqrt(1000), phi=2 * math.sqrt(1000), sigma_star2=2.0, r=1.0)

pos = st.floats(0, 50, allow_nan=False)


def inputs(**kw):
    return bd.BoundInputs(**{**WIG, **kw})


class TestInputs:
    @pytest.mark.parametrize("field", ["phi", "sigma_star2", "r"])
    def test_rejects_negative(self, field):
        with pytest.raises(ValueError):
            inputs(**{field: -1.0})

    def test_rejects_bad_dim(self):
        with pytest.raises(ValueError):
            inputs(d=0)

    def test_json_keeps_provenance(self):
        inp = inputs(provenance={"mu": "closed_form"})
        rep = bd.evaluate("maxeig", inp)
        obj = rep.to_json()
        assert obj["inputs"]["provenance"] == {"mu": "closed_form"}
        assert obj["notes"] == {"mu": "closed_form"}


class TestMaxEig:
    def test_dim_one(self):
        assert bd.maxeig_expect_bound(inputs(d=1)) == WIG["mu"]

    def test_deterministic_proxy(self):
        assert bd.maxeig_expect_bound(inputs(r=0.0, sigma_star2=0.0)) == WIG["mu"]

    def test_wigner_value(self):
        mu = 2 * math.sqrt(1000)
        oracle = mu + math.sqrt((mu / 3 + 2) * 2 * math.log(1000)) + math.log(1000) / 3
        val = bd.maxeig_expect_bound(inputs())
        assert val == pytest.approx(oracle, rel=1e-15)
        assert val == pytest.approx(83.41, abs=5e-3)

    def test_wigner_tail(self):
        tail = bd.maxeig_tail_level(inputs(s=2 * math.log(1000)))
        assert tail.prob == pytest.approx(1e-3, rel=1e-12)
        assert tail.level == pytest.approx(93.11, abs=0.01)

    def test_tail_at_log_d_is_vacuous_and_equals_expectation(self):
        inp = inputs(s=math.log(1000))
        tail = bd.maxeig_tail_level(inp)
        assert tail.prob == pytest.approx(1.0)
        assert tail.level == bd.maxeig_expect_bound(inp)

    def test_doubling_s(self):
        s = 9.0
        a = bd.maxeig_tail_level(inputs(s=s))
        b = bd.maxeig_tail_level(inputs(s=2 * s))
        assert b.level > a.level
        assert b.prob == pytest.approx(a.prob * math.exp(-s))

    def test_out_of_regime_warns(self):
        with pytest.warns(bd.RegimeWarning):
            bd.maxeig_tail_level(inputs(s=1.0))
        rep = bd.evaluate("maxeig", inputs(s=1.0))
        assert rep.out_of_regime
        assert math.isfinite(rep.value)

    @settings(max_examples=60, deadline=None)
    @given(pos, pos, pos, st.floats(7, 40))
    def test_monotone(self, phi, ss2, r, s):
        base = dict(d=1000, mu=0.0, phi=phi, sigma_star2=ss2, r=r, s=s)
        for key in ("phi", "sigma_star2", "r", "s"):
            hi = bd.BoundInputs(**{**base, key: base[key] + 1.0})
            lo = bd.BoundInputs(**base)
            assert bd.maxeig_tail_level(hi).level >= bd.maxeig_tail_level(lo).level
            assert bd.mineig_tail_level(hi).level <= bd.mineig_tail_level(lo).level
            assert bd.maxeig_expect_bound(hi) >= bd.maxeig_expect_bound(lo)


class TestMinEigAndNorm:
    def test_dim_one(self):
        assert bd.mineig_expect_bound(inputs(d=1)) == WIG["mu"]

    def test_deterministic(self):
        assert bd.mineig_expect_bound(inputs(r=0.0, sigma_star2=0.0)) == WIG["mu"]

    def test_covariance_value(self):
        inp = bd.BoundInputs(500, 0.0, 1.0, 1e-3, 5e-4, s=math.log(500))
        level = bd.mineig_tail_level(inp).level
        assert level == pytest.approx(bd.mineig_expect_bound(inp), rel=1e-15)
        assert level == pytest.approx(-0.1214, abs=2e-4)

    def test_mirror_image(self):
        inp = inputs(mu=3.0, s=8.0)
        up = bd.maxeig_tail_level(inp).level
        down = bd.mineig_tail_level(inp).level
        assert up - 3.0 == pytest.approx(3.0 - down)

    def test_norm_deterministic(self):
        assert bd.norm_expect_bound(bd.BoundInputs(7, 1.5, 1.5, 0.0, 0.0)) == 1.5

    def test_norm_rect_value(self):
        n, d = 2000, 500
        r = n ** -0.5
        inp = bd.BoundInputs(d + n, 1.5, 1.5, 1 / n, r)
        ld = math.log(d + n)
        oracle = 1.5 + math.sqrt((r * 1.5 / 3 + 1 / n) * 2 * ld) + r / 3 * ld
        assert bd.norm_expect_bound(inp) == pytest.approx(oracle, rel=1e-15)
        assert round(bd.norm_expect_bound(inp), 6) == round(oracle, 6)

    def test_norm_prob_at_log(self):
        inp = bd.BoundInputs(2500, 1.5, 1.5, 5e-4, 0.02, s=math.log(2500))
        assert bd.norm_tail_level(inp).prob == pytest.approx(1.0)


class TestUnbounded:
    def test_reduces(self):
        inp = inputs(s=10.0)
        assert bd.unbounded_tail(inp, 0.0) == bd.maxeig_tail_level(inp)

    def test_vacuous(self):
        assert bd.unbounded_tail(inputs(s=10.0), 1.0).prob >= 1

    def test_rejects_bad_prob(self):
        with pytest.raises(ValueError):
            bd.unbounded_tail(inputs(s=10.0), 1.5)

    def test_gaussian_summands_mc(self, rng):
        # sum of n independent GOE(d)/sqrt(n): truncate each summand at R = 3 sigma
        from gausscomp import gaussian as gm
        d, n, trials = 6, 50, 2000
        c = 1 / math.sqrt(n)
        goe = gm.goe(d)
        r = 3 * c * 2 * math.sqrt(d)
        vals, exceed_r = [], 0
        for _ in range(trials):
            ws = c * goe.sample_centered(rng, n)
            exceed_r += np.linalg.eigvalsh(ws)[:, -1].max() > r
            vals.append(np.linalg.eigvalsh(ws.sum(axis=0))[-1])
        p_m = min(1.0, n * 2 * d * math.exp(-(r / c - 2 * math.sqrt(d)) ** 2 / 4))
        mu = np.mean(vals)
        inp = bd.BoundInputs(d, mu, mu, 2.0, r, s=math.log(d) + 2)
        tail = bd.unbounded_tail(inp, p_m)
        assert exceed_r / trials <= p_m + 0.01
        assert np.mean(np.array(vals) >= tail.level) <= tail.prob


class TestBernstein:
    def test_dim_one(self):
        assert bd.bernstein_baseline(10.0, 1.0, 1, 2.5) == 2.5

    def test_wigner_value(self):
        val = bd.bernstein_baseline(999, 1.0, 1000, 0.0)
        assert val == pytest.approx(math.sqrt(2 * 999 * math.log(1000)) + math.log(1000) / 3)
        assert val == pytest.approx(119.78, abs=5e-3)

    def test_wigner_sharper(self):
        assert bd.maxeig_expect_bound(inputs()) < bd.bernstein_baseline(999, 1.0, 1000, 0.0)

    @pytest.mark.parametrize("d,s2,ss2,r,mu", [
        (400, 399, 2 * (1 - 1 / 400), 1.0, 40.0),
        (1000, 999, 2 * (1 - 1 / 1000), 1.0, 2 * math.sqrt(1000)),
        (256, 1.0, 1 / 256, 230 ** -0.5, 2.0),
    ])
    def test_sharper_at_suite_scale(self, d, s2, ss2, r, mu):
        phi = math.sqrt(2 * s2 * math.log(d))
        new = bd.maxeig_expect_bound(bd.BoundInputs(d, mu, phi, ss2, r))
        assert new <= bd.bernstein_baseline(s2, r, d, 0.0)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 10**6), st.floats(1e-3, 1e3), st.floats(0, 1), st.floats(0, 10),
           st.floats(-5, 5), st.floats(0, 1))
    def test_sharper_modulo_constants(self, d, s2, frac, r, lam, mu_frac):
        # mu <= lambda_max(EY) + phi and sigma_*^2 <= sigma^2, phi at its Khinchin value
        phi = math.sqrt(2 * s2 * math.log(d))
        mu = lam + mu_frac * phi
        new = bd.maxeig_expect_bound(bd.BoundInputs(d, mu, phi, frac * s2, r))
        base = bd.bernstein_baseline(s2, r, d, lam)
        assert new - lam <= 2.5 * (base - lam) * (1 + 1e-12)


class TestPsdIid:
    def test_no_variance(self):
        e, lvl, _ = bd.psd_iid_bounds(0.7, 0.0, 10, 5.0)
        assert e == lvl == 0.7

    def test_value(self):
        e, _, _ = bd.psd_iid_bounds(0.0, 1e-3, 500, math.log(1000))
        assert e == pytest.approx(-math.sqrt(0.002 * math.log(1000)))
        assert e == pytest.approx(-0.11754, abs=1e-5)

    def test_prob_at_log_2d(self):
        assert bd.psd_iid_bounds(0.0, 1e-3, 500, math.log(1000))[2] == pytest.approx(1.0)


class TestGR:
    def test_zero_theta(self):
        for r in (0.0, 0.5, 3.0):
            assert bd.g_R(0.0, r) == 0

    def test_unit(self):
        assert bd.g_R(1.0, 1.0) == pytest.approx(math.sqrt(2 * (math.e - 2)), rel=1e-15)
        assert bd.g_R(1.0, 1.0) == pytest.approx(1.1985673, abs=1e-7)

    def test_r_zero_limit(self):
        assert bd.g_R(2.3, 0.0) == 2.3
        assert bd.g_R(2.3, 1e-9) == pytest.approx(2.3, rel=1e-8)

    def test_series_branch_continuity(self):
        x = 1e-4
        a = bd.g_R(1.0, x * (1 - 1e-9))
        b = bd.g_R(1.0, x * (1 + 1e-9))
        assert a == pytest.approx(b, rel=1e-10)

    @pytest.mark.parametrize("r", [0.1, 1.0, 3.0])
    def test_proof_inequalities(self, r):
        for theta in np.linspace(0.01, 3, 60):
            g = bd.g_R(theta, r)
            assert g >= theta
            assert g - theta <= (math.exp(theta * r) - theta * r - 1) / r / 3 + 1e-12


class TestTailFamilies:
    def test_t_zero(self):
        assert bd.bennett_tail(1.0, 1.0, 1.0, 50, 0.0, 0.0) == 50
        assert bd.bernstein_tail(1.0, 1.0, 1.0, 50, 0.0, 0.0) == 50

    def test_bernstein_wigner(self):
        p = bd.bernstein_tail(2 * math.sqrt(1000), 2.0, 1.0, 1000, 0.0, 25.0)
        assert p == pytest.approx(0.0478, abs=5e-4)

    def test_bennett_needs_r(self):
        with pytest.raises(ValueError):
            bd.bennett_tail(1.0, 1.0, 0.0, 10, 0.0, 1.0)

    @pytest.mark.parametrize("phi,ss2,r", [(63.2, 2.0, 1.0), (1.0, 1e-3, 5e-4), (5.0, 0.5, 2.0)])
    def test_bennett_dominates_at_matched_level(self, phi, ss2, r):
        for t in np.linspace(0.05, 20, 20):
            tau = bd.bennett_level(phi, ss2, r, 0.0, t)
            assert bd.bennett_tail(phi, ss2, r, 100, 0.0, t) <= \
                bd.bernstein_tail(phi, ss2, r, 100, 0.0, tau) * (1 + 1e-12)


class TestInvert:
    def test_p_one(self):
        s, _ = bd.invert_tail(1.0, "maxeig", inputs(d=10))
        assert s == pytest.approx(math.log(10))

    def test_value(self):
        s, _ = bd.invert_tail(0.1, "maxeig", inputs(d=500))
        assert s == pytest.approx(math.log(5000))
        assert s == pytest.approx(8.517, abs=1e-3)

    def test_psd_family(self):
        s, lvl = bd.invert_tail(0.1, "psd-iid", bd.BoundInputs(500, 0.0, 0.0, 1e-3, 0.0))
        assert s == pytest.approx(math.log(10_000))
        assert lvl == pytest.approx(-math.sqrt(2e-3 * s))

    def test_level_monotone_in_p(self):
        levels = [bd.invert_tail(p, "maxeig", inputs())[1] for p in (1e-4, 1e-3, 0.01, 0.1, 1)]
        assert np.all(np.diff(levels) < 0)

    def test_rejects(self):
        with pytest.raises(ValueError):
            bd.invert_tail(0.0, "maxeig", inputs())
        with pytest.raises(ValueError):
            bd.invert_tail(0.5, "nope", inputs())

    def test_matches_forward_probability(self):
        s, lvl = bd.invert_tail(0.05, "norm", inputs(d=300))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            tail = bd.norm_tail_level(inputs(d=300, s=s))
        assert tail.prob == pytest.approx(0.05)
        assert tail.level == lvl


class TestEvaluate:
    def test_kinds(self):
        assert bd.evaluate("maxeig", inputs()).value == bd.maxeig_expect_bound(inputs())
        rep = bd.evaluate("bernstein", inputs(mu=0.0), sigma2=999)
        assert rep.value == pytest.approx(119.78, abs=5e-3)
        rep = bd.evaluate("psd-iid", bd.BoundInputs(500, 0.0, 0.0, 1e-3, 0.0, s=10.0))
        assert rep.prob_bound == pytest.approx(1000 * math.exp(-10))

    def test_prob_bound_range(self):
        rep = bd.evaluate("mineig", inputs(s=20.0))
        assert 0 <= rep.prob_bound <= rep.inputs.d

    def test_errors(self):
        with pytest.raises(ValueError):
            bd.evaluate("bernstein", inputs())
        with pytest.raises(ValueError):
            bd.evaluate("bogus", inputs())
