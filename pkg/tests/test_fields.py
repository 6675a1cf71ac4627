import math

import numpy as np
import pytest

from latticedeconv.fields import (
    InnovationSpec,
    LinearFieldSpec,
    MixingProfile,
    NoiseModel,
    VolterraFieldSpec,
    add_noise,
    check_dependence_summability,
    check_mixing_summability,
    decay_dependence_profile,
    dependence_linear,
    dependence_volterra,
    field_spec_from_dict,
    field_spec_to_dict,
    noise_from_dict,
    simulate_linear,
    simulate_volterra,
    stream_rng,
)
from latticedeconv.lattice import make_rect_region


class TestInnovations:
    def test_variances(self):
        assert InnovationSpec("normal").variance == 1.0
        assert InnovationSpec("uniform").variance == pytest.approx(1.0)
        assert InnovationSpec("laplace", scale=2.0).variance == 8.0

    def test_uniform_samples_unit_variance(self):
        rng = np.random.default_rng(0)
        x = InnovationSpec("uniform").sample(rng, 200_000)
        assert abs(x.mean()) < 0.01
        assert abs(x.var() - 1.0) < 0.01

    def test_fourth_moments_match_samples(self):
        rng = np.random.default_rng(1)
        for spec in (InnovationSpec("normal"), InnovationSpec("uniform"), InnovationSpec("laplace", 0.7)):
            x = spec.sample(rng, 400_000)
            m4 = spec.central_moment(4)
            se = np.std(x**4) / math.sqrt(x.size)
            assert abs(np.mean(x**4) - m4) < 4 * se

    def test_coupling_norm_p2(self):
        # ||eps - eps'||_2 = sqrt(2 Var)
        assert InnovationSpec("normal").coupling_norm(2) == pytest.approx(math.sqrt(2))
        assert InnovationSpec("uniform").coupling_norm(2) == pytest.approx(math.sqrt(2))

    def test_coupling_norm_p4_monte_carlo(self):
        rng = np.random.default_rng(2)
        spec = InnovationSpec("normal")
        diff = spec.sample(rng, 2_000_000) - spec.sample(rng, 2_000_000)
        assert np.mean(diff**4) ** 0.25 == pytest.approx(spec.coupling_norm(4), rel=0.01)


class TestLinearSimulation:
    def test_identity_coefficients_iid(self):
        region = make_rect_region([64, 64])
        spec = LinearFieldSpec.iid(2)
        x = simulate_linear(region, spec, seed=3)
        assert abs(x.values.mean()) < 3 / 64
        assert abs(x.values.var() - 1.0) < 0.1

    def test_half_half_variance(self):
        region = make_rect_region([256, 256])
        spec = LinearFieldSpec(2, (((0, 0), 0.5), ((0, 1), 0.5)))
        x = simulate_linear(region, spec, seed=4)
        se = 3 * math.sqrt(2.0) * 0.5 / 256  # rough 3-sigma band for the variance
        assert abs(x.values.var() - 0.5) < max(se, 0.01)

    def test_zero_coefficients(self):
        region = make_rect_region([5, 5])
        spec = LinearFieldSpec(2, (((0, 0), 0.0),))
        assert np.all(simulate_linear(region, spec, seed=0).values == 0.0)

    def test_determinism(self):
        region = make_rect_region([17, 9])
        spec = LinearFieldSpec(2, (((0, 0), 0.8), ((1, -1), 0.6)))
        a = simulate_linear(region, spec, seed=11)
        b = simulate_linear(region, spec, seed=11)
        assert np.array_equal(a.values, b.values)
        c = simulate_linear(region, spec, seed=12)
        assert not np.array_equal(a.values, c.values)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            simulate_linear(make_rect_region([4]), LinearFieldSpec.iid(2), seed=0)

    def test_stationarity_across_translates(self):
        big = make_rect_region([300, 300])
        spec = LinearFieldSpec(2, (((0, 0), 0.6), ((1, 0), 0.8)))
        x = simulate_linear(big, spec, seed=8)
        vals = x.values.reshape(300, 300)
        a, b = vals[:100, :100].ravel(), vals[180:280, 180:280].ravel()
        se = 3 / math.sqrt(a.size)
        assert abs(a.mean() - b.mean()) < 3 * se
        assert abs(a.var() - b.var()) < 0.1

    def test_m_dependence_beyond_support(self):
        # correlation at lags beyond twice the support radius is noise-level
        side = 400
        spec = LinearFieldSpec(1, (((0,), 0.7), ((1,), 0.7)))
        x = simulate_linear(make_rect_region([side]), spec, seed=9).values
        lag = 3
        corr = np.corrcoef(x[:-lag], x[lag:])[0, 1]
        assert abs(corr) < 4 / math.sqrt(side - lag)

    def test_from_decay_truncation_deficit(self):
        spec = LinearFieldSpec.from_decay(1, amplitude=1.0, rate=2.0, radius=10)
        # sum_{|s|>10} 2 s^-4, small and positive
        expect = 2 * sum(m**-4.0 for m in range(11, 4000))
        assert spec.truncation_deficit == pytest.approx(expect, rel=1e-3)


class TestVolterra:
    def test_rejects_diagonal(self):
        with pytest.raises(ValueError):
            VolterraFieldSpec(1, (((0,), (0,), 1.0),))

    def test_zero_field(self):
        spec = VolterraFieldSpec(1, (((0,), (1,), 0.0),))
        x = simulate_volterra(make_rect_region([10]), spec, seed=0)
        assert np.all(x.values == 0.0)

    def test_single_pair_moments(self):
        spec = VolterraFieldSpec(1, (((0,), (1,), 1.0),))
        x = simulate_volterra(make_rect_region([100_000]), spec, seed=5).values
        assert abs(x.mean()) < 3 / math.sqrt(x.size) * 2
        assert abs(x.var() - 1.0) < 0.05

    def test_symmetric_pair_expansion(self):
        # X_i = 2 eps_i eps_{i-1}, variance 4
        spec = VolterraFieldSpec(1, (((0,), (1,), 1.0), ((1,), (0,), 1.0)))
        x = simulate_volterra(make_rect_region([100_000]), spec, seed=6).values
        assert abs(x.var() - 4.0) < 0.2


class TestNoise:
    def test_none_returns_input(self):
        region = make_rect_region([8])
        x = simulate_linear(region, LinearFieldSpec.iid(1), seed=1)
        assert add_noise(x, NoiseModel.none(), seed=1) is x

    def test_laplace_variance(self):
        region = make_rect_region([100_000])
        zero = simulate_linear(region, LinearFieldSpec(1, (((0,), 0.0),)), seed=0)
        y = add_noise(zero, NoiseModel.laplace(1.0), seed=2).values
        assert abs(y.var() - 2.0) < 0.05

    def test_noise_determinism_and_stream_separation(self):
        region = make_rect_region([50])
        x = simulate_linear(region, LinearFieldSpec.iid(1), seed=7)
        y1 = add_noise(x, NoiseModel.laplace(1.0), seed=7)
        y2 = add_noise(x, NoiseModel.laplace(1.0), seed=7)
        assert np.array_equal(y1.values, y2.values)
        # noise comes from its own stream, not the innovation stream
        theta = y1.values - x.values
        assert not np.allclose(theta, x.values)

    def test_laplace_a3_limit(self):
        noise = NoiseModel.laplace(1.0)
        t = np.linspace(1e3, 1e4, 50)
        assert np.max(np.abs(t**2 * noise.cf(t) - 1.0)) < 1e-4

    def test_symmetrized_gamma_params(self):
        noise = NoiseModel.symmetrized_gamma(2.0, 0.5)
        assert noise.beta == 4.0
        assert noise.limit_constant == pytest.approx(0.5**-4)
        t = np.array([5e2, 1e3])
        assert np.allclose(t**4 * noise.cf(t), noise.limit_constant, rtol=1e-4)

    def test_symmetrized_gamma_density_integrates(self):
        noise = NoiseModel.symmetrized_gamma(1.0, 1.0)
        xs = np.linspace(-30, 30, 1201)
        mass = np.trapezoid(noise.density(xs), xs)
        assert mass == pytest.approx(1.0, abs=1e-3)

    def test_gaussian_rejected(self):
        with pytest.raises(ValueError, match="noise violates A3"):
            NoiseModel.from_tag("gaussian")

    def test_cf_at_zero(self):
        for noise in (NoiseModel.laplace(2.0), NoiseModel.symmetrized_gamma(1.5)):
            assert noise.cf(np.array([0.0]))[0] == pytest.approx(1.0)


class TestDependenceProfiles:
    def test_linear_exact(self):
        spec = LinearFieldSpec(2, (((0, 0), 0.5), ((1, 0), -0.25)))
        prof = dependence_linear(spec, 2)
        assert prof((0, 0)) == pytest.approx(0.5 * math.sqrt(2))
        assert prof((1, 0)) == pytest.approx(0.25 * math.sqrt(2))
        assert prof((5, 5)) == 0.0
        assert prof.exact

    def test_linear_uniform_same_norm(self):
        spec = LinearFieldSpec(1, (((0,), 2.0),), InnovationSpec("uniform"))
        assert dependence_linear(spec, 2)((0,)) == pytest.approx(2 * math.sqrt(2))

    def test_volterra_bound(self):
        spec = VolterraFieldSpec(1, (((0,), (1,), 1.0),))
        prof = dependence_volterra(spec, 2)
        assert not prof.exact
        # A_i = 1, B_i = 1 at both index sites, 0 elsewhere
        expect = 2.0 * 1.0 * 1.0 * 1.0 + 2.0 * 1.0 * 1.0
        assert prof((1,)) == pytest.approx(expect)
        assert prof((7,)) == 0.0

    def test_volterra_requires_p_ge_2(self):
        spec = VolterraFieldSpec(1, (((0,), (1,), 1.0),))
        with pytest.raises(ValueError):
            dependence_volterra(spec, 1)

    def test_summability_finite_support(self):
        spec = LinearFieldSpec(1, (((0,), 1.0), ((2,), 0.5)))
        v = check_dependence_summability(dependence_linear(spec, 2), d=1)
        assert v.finite
        assert v.partial_sum == pytest.approx(2.0**2.5 * 0.5 * math.sqrt(2))

    def test_summability_decay_rates(self):
        fine = decay_dependence_profile(1, 1.0, 4.0)
        coarse = decay_dependence_profile(1, 1.0, 3.0)
        assert check_dependence_summability(fine, d=1, cutoff=100).finite
        assert not check_dependence_summability(coarse, d=1, cutoff=100).finite


class TestMixingProfiles:
    def test_m_dependent_always_summable(self):
        prof = MixingProfile(tag="m_dependent", cutoff=4)
        assert check_mixing_summability(prof, d=3).finite

    def test_polynomial_threshold(self):
        assert check_mixing_summability(MixingProfile(tag="polynomial", rate=5.0), d=2).finite
        assert not check_mixing_summability(MixingProfile(tag="polynomial", rate=4.0), d=2).finite

    def test_alpha_shape(self):
        prof = MixingProfile(tag="m_dependent", cutoff=2)
        assert prof.alpha(1) == 0.25 and prof.alpha(2) == 0.25 and prof.alpha(3) == 0.0
        poly = MixingProfile(tag="polynomial", amplitude=10.0, rate=2.0)
        assert poly.alpha(1) == 0.25  # capped
        vals = [poly.alpha(m) for m in range(1, 30)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_from_linear_spec_cutoff(self):
        spec = LinearFieldSpec(2, (((0, 0), 1.0), ((3, -1), 0.5)))
        assert MixingProfile.from_linear_spec(spec).cutoff == 3


class TestSerialization:
    def test_linear_roundtrip(self):
        spec = LinearFieldSpec(2, (((0, 0), 0.8), ((0, 1), 0.6)), InnovationSpec("uniform"))
        assert field_spec_from_dict(field_spec_to_dict(spec)) == spec

    def test_volterra_roundtrip(self):
        spec = VolterraFieldSpec(1, (((0,), (1,), 0.3),), InnovationSpec("laplace", 0.5))
        assert field_spec_from_dict(field_spec_to_dict(spec)) == spec

    def test_noise_from_dict_gaussian_rejected(self):
        with pytest.raises(ValueError, match="A3"):
            noise_from_dict({"tag": "normal"})


class TestStreams:
    def test_roles_disjoint(self):
        a = stream_rng(0, 0, 0).standard_normal(8)
        b = stream_rng(0, 0, 1).standard_normal(8)
        c = stream_rng(0, 1, 0).standard_normal(8)
        assert not np.allclose(a, b)
        assert not np.allclose(a, c)

    def test_reproducible(self):
        assert np.array_equal(stream_rng(5, 2, 1).integers(0, 1 << 30, 16), stream_rng(5, 2, 1).integers(0, 1 << 30, 16))
