import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gausscomp import gaussian as gm
from gausscomp.core import spectral_norm

from conftest import random_sym


def herm_basis(d, field="real"):
    """Orthonormal basis of the real space of self-adjoint d x d matrices."""
    out = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex if field == "complex" else float)
        e[i, i] = 1
        out.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex if field == "complex" else float)
            e[i, j] = e[j, i] = 1 / math.sqrt(2)
            out.append(e)
            if field == "complex":
                f = np.zeros((d, d), dtype=complex)
                f[i, j], f[j, i] = 1j / math.sqrt(2), -1j / math.sqrt(2)
                out.append(f)
    return out


def materialize(model):
    return gm.generic(model.mean, model.coefficients())


class TestSampling:
    def test_no_coeffs_returns_mean(self, rng):
        mean = np.diag([1.0, 2.0])
        model = gm.generic(mean, np.zeros((0, 2, 2)))
        assert np.array_equal(model.sample(rng), mean)

    def test_goe_entry_variances(self, rng):
        z = gm.goe(100).sample_centered(rng, 10_000)
        off = z[:, 0, 1]
        diag = z[:, 3, 3]
        assert off.var() == pytest.approx(1.0, rel=0.05)
        assert diag.var() == pytest.approx(2.0, rel=0.05)

    def test_shift_moves_mean_only(self, rng):
        base = gm.goe(3)
        delta = np.eye(3)
        shifted = gm.shift(base, delta)
        a = base.sample(np.random.default_rng(1))
        b = shifted.sample(np.random.default_rng(1))
        assert np.allclose(b - a, delta)

    def test_scale_multiplies_coefficients(self):
        m = gm.scale(gm.gue(3), 2.5)
        assert np.allclose(m.coefficients(), 2.5 * gm.gue(3).coefficients())

    @pytest.mark.parametrize("ctor", [lambda: gm.goe(4), lambda: gm.gue(3),
                                      lambda: gm.offdiag_wigner(4), lambda: gm.iid_rect(2, 3)])
    def test_variance_reproduction_on_basis(self, rng, ctor):
        model = ctor()
        field = "complex" if np.iscomplexobj(model.coefficients()) else "real"
        z = model.sample_centered(rng, 10_000)
        for m in herm_basis(model.dim, field)[:12]:
            ips = np.einsum("tij,ij->t", z.conj(), m).real
            analytic = gm.variance(model, m)
            oracle = float(np.sum(np.einsum("kij,ij->k", model.coefficients().conj(), m).real ** 2))
            assert analytic == pytest.approx(oracle, abs=1e-12)
            se = math.sqrt(2 / (len(ips) - 1)) * max(analytic, 1e-12)
            assert abs(ips.var(ddof=1) - analytic) <= 5 * se + 1e-12

    def test_generic_variance_matches_sum_of_squares(self, rng):
        coeffs = np.array([random_sym(rng, 3) for _ in range(4)])
        model = gm.generic(np.zeros((3, 3)), coeffs)
        m = herm_basis(3)[4]
        ips = np.einsum("tij,ij->t", model.sample_centered(rng, 20_000), m)
        oracle = sum(float(np.sum(a * m)) ** 2 for a in coeffs)
        se = math.sqrt(2 / (len(ips) - 1)) * oracle
        assert abs(ips.var(ddof=1) - oracle) <= 3 * se

    def test_json_roundtrip(self, rng):
        model = gm.shift(gm.scale(gm.gue(3), 0.5), np.eye(3))
        back = gm.GaussianModel.from_json(json.loads(json.dumps(model.to_json())))
        assert np.allclose(back.coefficients(), model.coefficients())
        assert np.allclose(back.mean, model.mean)
        assert gm.matrix_variance(back) == pytest.approx(gm.matrix_variance(model))


class TestClosedForms:
    def test_goe_table(self):
        m = gm.goe(100)
        assert gm.matrix_variance(m) == 101
        assert gm.weak_variance(m) == (2, gm.CLOSED_FORM, 2)
        assert gm.interaction_energy(m) == 2

    def test_gue_table(self):
        m = gm.gue(64)
        assert gm.matrix_variance(m) == 64
        assert gm.weak_variance(m).value == 1
        assert gm.interaction_energy(m) == 1

    def test_iid_rect_sigma2(self):
        assert gm.matrix_variance(gm.iid_rect(3, 5)) == 5

    @pytest.mark.parametrize("ctor", [lambda: gm.goe(5), lambda: gm.gue(4),
                                      lambda: gm.offdiag_wigner(5), lambda: gm.iid_rect(3, 4),
                                      lambda: gm.scale(gm.goe(4), 1.7),
                                      lambda: gm.direct_sum(gm.goe(3), gm.scale(gm.gue(2), 2))])
    def test_closed_forms_equal_materialized(self, ctor):
        model = ctor()
        gen = materialize(model)
        a = gen.coefficients()
        oracle_s2 = np.linalg.eigvalsh(np.einsum("kij,kjl->il", a, a))[-1]
        assert gm.matrix_variance(model) == pytest.approx(oracle_s2, rel=1e-12)
        assert gm.interaction_energy(model) == pytest.approx(gm.interaction_energy(gen), rel=1e-12)
        lb = gm.weak_variance(gen, np.random.default_rng(0))
        assert lb.value <= gm.weak_variance(model).value * (1 + 1e-9)
        assert lb.value == pytest.approx(gm.weak_variance(model).value, rel=1e-6)

    @pytest.mark.parametrize("d", [2, 5, 30])
    def test_sandwich_inequalities(self, d):
        for model in (gm.goe(d), gm.gue(d), gm.offdiag_wigner(d), gm.iid_rect(d, d + 2)):
            s2 = gm.matrix_variance(model)
            ss2 = gm.weak_variance(model).value
            w = gm.interaction_energy(model)
            dim = model.dim
            assert ss2 <= s2 <= dim * ss2
            assert ss2 <= w <= dim * ss2

    def test_offdiag_weak_variance_below_two(self):
        for d in (2, 10, 1000):
            assert gm.weak_variance(gm.offdiag_wigner(d)).value < 2


class TestGenericStatistics:
    def test_single_coefficient_weak_variance(self):
        model = gm.generic(np.zeros((2, 2)), np.diag([3.0, 1.0])[None])
        wv = gm.weak_variance(model)
        assert wv.exactness == gm.LOWER_BOUND
        assert wv.value >= 9 - 1e-6
        assert wv.upper == pytest.approx(10.0)

    def test_orthonormal_family_w_is_one(self):
        basis = herm_basis(3)
        model = gm.generic(np.zeros((3, 3)), np.array(basis[:4]))
        assert gm.interaction_energy(model) == pytest.approx(1.0)

    def test_generic_matrix_variance_oracle(self, rng):
        coeffs = np.array([random_sym(rng, 4, "complex") for _ in range(3)])
        model = gm.generic(np.zeros((4, 4)), coeffs)
        sq = sum(a @ a for a in coeffs)
        assert gm.matrix_variance(model) == pytest.approx(spectral_norm(sq), rel=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 5), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_weak_variance_bracket(self, d, m, seed):
        r = np.random.default_rng(seed)
        coeffs = np.array([random_sym(r, d) for _ in range(m)])
        model = gm.generic(np.zeros((d, d)), coeffs)
        wv = gm.weak_variance(model, r)
        u = r.standard_normal((d, 50))
        u /= np.linalg.norm(u, axis=0)
        probe = np.max(np.sum(np.einsum("di,kde,ei->ki", u, coeffs, u) ** 2, axis=0))
        assert probe <= wv.upper * (1 + 1e-12)
        assert wv.value <= wv.upper * (1 + 1e-12)
        top = max(np.abs(np.linalg.eigvalsh(a)).max() ** 2 for a in coeffs)
        assert wv.value >= top * (1 - 1e-9)


class TestFluctuation:
    def test_empty_model(self, rng):
        assert gm.fluctuation_mc(gm.generic(np.eye(2), np.zeros((0, 2, 2))), 10, rng) == (0, 0)

    def test_rejects_few_trials(self, rng):
        with pytest.raises(ValueError):
            gm.fluctuation_mc(gm.goe(3), 1, rng)

    def test_goe_100(self, rng):
        est, se = gm.fluctuation_mc(gm.goe(100), 400, rng)
        assert 15 <= est <= 20 + 3 * se

    def test_gue_64_norm(self, rng):
        est, se = gm.fluctuation_mc(gm.gue(64), 400, rng, "norm")
        assert math.sqrt(2 / math.pi * 64) - 3 * se <= est <= 16 + 3 * se

    def test_phi_below_phi_pm(self, rng):
        st_ = gm.gaussian_stats(gm.goe(20), mc_trials=200, rng=rng)
        assert st_.phi <= st_.phi_pm
        assert st_.exactness["phi"] == gm.MC_ESTIMATE

    def test_monotonicity_in_scale(self, rng):
        a, sa = gm.fluctuation_mc(gm.goe(50), 200, rng)
        b, sb = gm.fluctuation_mc(gm.scale(gm.goe(50), 2), 200, rng)
        assert b >= a - 3 * math.hypot(sa, sb)

    @pytest.mark.parametrize("d", [16, 64, 256])
    def test_khinchin_bracket(self, rng, d):
        models = (gm.goe(d), gm.gue(d), gm.iid_rect(d, d)) if d < 256 else (gm.iid_rect(d, d),)
        for model in models:
            _, up, lo = gm.khinchin_bounds(model)
            est, se = gm.fluctuation_mc(model, 200, rng, "norm")
            assert lo - 3 * se <= est <= up + 3 * se

    def test_concentration_variance(self, rng):
        vals = gm.fluctuation_samples(gm.goe(100), 10_000, rng)
        v = vals.var(ddof=1)
        n = len(vals)
        m4 = np.mean((vals - vals.mean()) ** 4)
        se = math.sqrt(max(m4 - v * v, 0.0) / n)
        assert v <= 2 + 5 * se


class TestKhinchinAndFreeness:
    def test_dim_one(self):
        assert gm.khinchin_bounds(gm.goe(1))[0] == 0

    def test_goe_100_values(self):
        up_eig, up_pm, lo_pm = gm.khinchin_bounds(gm.goe(100))
        assert up_eig == pytest.approx(math.sqrt(2 * 101 * math.log(100)))
        assert up_eig == pytest.approx(30.50, abs=0.01)
        assert lo_pm == pytest.approx(8.018, abs=1e-3)
        assert up_pm == pytest.approx(math.sqrt(2 * 101 * math.log(200)))

    def test_intrinsic_freeness_deterministic(self):
        model = gm.generic(np.zeros((3, 3)), np.zeros((0, 3, 3)))
        assert gm.intrinsic_freeness_upper(model, 1.0) == 0

    def test_intrinsic_freeness_goe(self):
        val = gm.intrinsic_freeness_upper(gm.goe(100), 1.0)
        oracle = 2 * math.sqrt(101) + (101 * 2 * math.log(100) ** 3) ** 0.25
        assert val == pytest.approx(oracle, rel=1e-14)
        assert val == pytest.approx(31.95, abs=0.01)

    def test_intrinsic_freeness_monotone_and_validated(self):
        m = gm.goe(10)
        vals = [gm.intrinsic_freeness_upper(m, c) for c in (0.5, 1, 2, 4)]
        assert np.all(np.diff(vals) > 0)
        with pytest.raises(ValueError):
            gm.intrinsic_freeness_upper(m, 0.0)


class TestEmpiricalProxy:
    def test_equal_samples(self):
        a = np.eye(3)
        p = gm.empirical_proxy([a, a, a])
        assert np.all(p.coefficients() == 0)
        assert gm.matrix_variance(p) == 0

    def test_goe_recovery(self, rng):
        samples = gm.goe(20).sample(rng, 2000)
        p = gm.empirical_proxy(samples)
        assert gm.matrix_variance(p) == pytest.approx(21, rel=0.1)

    def test_two_sample_formula(self, rng):
        a = random_sym(rng, 3)
        p = gm.empirical_proxy([a, -a], mean_override=np.zeros((3, 3)))
        for m in herm_basis(3):
            assert gm.variance(p, m) == pytest.approx(float(np.sum(a * m)) ** 2, abs=1e-12)

    def test_rejects_inconsistent_dims(self):
        with pytest.raises(ValueError):
            gm.empirical_proxy([np.eye(2), np.eye(3)])

    def test_covariance_proxy_matches_empirical(self, rng):
        samples = gm.gue(3).sample(rng, 50)
        a = gm.empirical_proxy(samples)
        b = gm.covariance_proxy(samples)
        for m in herm_basis(3, "complex"):
            assert gm.variance(b, m) == pytest.approx(gm.variance(a, m), abs=1e-10)
