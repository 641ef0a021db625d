"""
Unit tests for noise statistics, decay integrals and samplers.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from bell_decoherence.core.exceptions import UnsupportedNoiseError
from bell_decoherence.core.interfaces import Geometry, NoiseKind
from bell_decoherence.core.noise_models import (
    NoiseSpec, autocorrelation, decay_functions, dephasing_decay, markovian_rates,
    ou_shape, sample_batch, sample_pair, spectral_density, trajectory_seed,
    transverse_decay, transverse_decay_quadrature,
)

N_SAMPLES = 4000


def ou_spec(geometry=Geometry.ISOTROPIC, sigma=1.0, tc=1.0, gamma=0.0, **kwargs):
    return NoiseSpec.for_geometry(geometry, kind=NoiseKind.OU, sigma=sigma, tc=tc, gamma=gamma, **kwargs)


def white_spec(geometry=Geometry.DEPHASING, T=1.0, gamma=0.0, **kwargs):
    return NoiseSpec.for_geometry(geometry, kind=NoiseKind.WHITE, T=T, gamma=gamma, **kwargs)


class TestNoiseSpec:
    """Validation of noise parameters."""

    def test_ou_requires_tc(self):
        """OU noise without a correlation time is rejected."""
        with pytest.raises(ValidationError):
            NoiseSpec(kind=NoiseKind.OU, sigma=1.0)

    def test_white_requires_T(self):
        """White noise without a timescale is rejected."""
        with pytest.raises(ValidationError):
            NoiseSpec(kind=NoiseKind.WHITE)

    @pytest.mark.parametrize("gamma", [-0.1, 1.5])
    def test_gamma_range(self, gamma):
        """gamma outside [0, 1] is rejected."""
        with pytest.raises(ValidationError):
            ou_spec(gamma=gamma)

    def test_negative_sigma(self):
        """Negative amplitudes are rejected."""
        with pytest.raises(ValidationError):
            ou_spec(sigma=-1.0)

    def test_geometry_round_trip(self):
        """Axis flags map back to the geometry."""
        for geometry in Geometry:
            assert ou_spec(geometry).geometry == geometry

    def test_pair_weights(self):
        """Cross weights scale by gamma times both amplitudes."""
        spec = ou_spec(sigma=2.0, sigma2=3.0, gamma=0.5)
        np.testing.assert_allclose(spec.pair_weights(0), [[4.0, 3.0], [3.0, 9.0]])
        assert np.all(ou_spec(Geometry.TRANSVERSE).pair_weights(2) == 0)


class TestCorrelators:
    """Autocorrelation, spectrum and Markovian rates."""

    def test_autocorrelation(self):
        """kappa(0) = sigma^2 and kappa(tc) = sigma^2 / e."""
        spec = ou_spec(sigma=2.0, tc=3.0)
        assert autocorrelation(spec, 0.0) == pytest.approx(4.0)
        assert autocorrelation(spec, -3.0) == pytest.approx(4.0 / math.e)

    def test_white_autocorrelation_unsupported(self):
        """White-noise kernels are not point-evaluable."""
        with pytest.raises(UnsupportedNoiseError):
            autocorrelation(white_spec(), 0.0)

    def test_spectral_density_at_zero(self):
        """S(0) = 1/T2."""
        spec = ou_spec(sigma=5.0, tc=10.0)
        assert spectral_density(spec, 0.0) == pytest.approx(markovian_rates(spec)[0])

    def test_markovian_rates(self):
        """1/T2 = sigma^2 tc and 1/T2x = gamma sigma^2 tc."""
        assert markovian_rates(ou_spec(sigma=1.0, tc=1.0)) == pytest.approx((1.0, 0.0))
        assert markovian_rates(ou_spec(sigma=5.0, tc=10.0, gamma=0.4)) == pytest.approx((250.0, 100.0))
        with pytest.raises(UnsupportedNoiseError):
            markovian_rates(white_spec())


class TestDecayFunctions:
    """Closed-form decay integrals."""

    def test_ou_shape_series_matches_direct(self):
        """The small-argument series joins the direct formula smoothly."""
        x = np.array([0.999e-3, 1.001e-3])
        np.testing.assert_allclose(ou_shape(x), x**2 / 2 - x**3 / 6 + x**4 / 24, rtol=1e-9)

    def test_vanishes_at_zero(self):
        """Gamma(0) = 0."""
        assert dephasing_decay(ou_spec(), 0.0) == 0.0
        assert dephasing_decay(white_spec(), 0.0) == 0.0

    def test_gaussian_short_time(self):
        """Gamma(t) = sigma^2 t^2 / 2 for t << tc."""
        spec = ou_spec(sigma=3.0, tc=2.0)
        t = spec.tc / 100
        assert dephasing_decay(spec, t) == pytest.approx(0.5 * 9.0 * t**2, rel=0.01)

    def test_markovian_long_time(self):
        """Gamma(t) -> sigma^2 tc t - sigma^2 tc^2 for t >> tc."""
        spec = ou_spec(sigma=2.0, tc=0.5)
        t = 40.0
        assert dephasing_decay(spec, t) == pytest.approx(4.0 * 0.5 * t - 4.0 * 0.25, rel=1e-12)

    def test_white(self):
        """Gamma(T) = 1 for white noise; the cross version scales by gamma."""
        spec = white_spec(T=2.0, gamma=0.3)
        assert dephasing_decay(spec, 2.0) == pytest.approx(1.0)
        assert dephasing_decay(spec, 2.0, correlator="cross") == pytest.approx(0.3)

    def test_monotone(self):
        """Decay functions are non-decreasing."""
        values = dephasing_decay(ou_spec(sigma=1.5, tc=0.7), np.linspace(0, 5, 200))
        assert np.all(np.diff(values) >= 0)

    def test_negative_time(self):
        """Negative times are rejected."""
        with pytest.raises(ValueError):
            dephasing_decay(ou_spec(), -1.0)

    def test_transverse_at_zero_frequency(self):
        """At Omega = 0 the transverse integral reduces to the dephasing one."""
        spec = ou_spec(sigma=1.3, tc=0.8)
        t = np.linspace(0, 4, 9)
        gamma_perp, shift = transverse_decay(spec, 0.0, t)
        np.testing.assert_allclose(gamma_perp, dephasing_decay(spec, t), rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(shift, 0.0, atol=1e-15)

    def test_transverse_quadrature_agreement(self):
        """Closed form agrees with adaptive quadrature for sigma=4, tc=10, Omega=40."""
        spec = ou_spec(Geometry.TRANSVERSE, sigma=4.0, tc=10.0)
        t = np.linspace(0, 50, 11)
        closed = transverse_decay(spec, 40.0, t)
        quadrature = transverse_decay_quadrature(spec, 40.0, t)
        np.testing.assert_allclose(closed[0], quadrature[0], atol=1e-9)
        np.testing.assert_allclose(closed[1], quadrature[1], atol=1e-9)

    def test_transverse_fast_rotation_scaling(self):
        """For Omega tc >> 1 and t << tc, Gamma_perp stays of order sigma^2/Omega^2."""
        spec = ou_spec(Geometry.TRANSVERSE, sigma=4.0, tc=10.0)
        gamma_perp, _ = transverse_decay(spec, 40.0, 0.5)
        assert 0 < gamma_perp < 4 * 16.0 / 40.0**2

    def test_decay_functions_record(self):
        """decay_functions bundles the integrals at one time."""
        spec = ou_spec(sigma=1.0, tc=1.0, gamma=0.5)
        record = decay_functions(spec, 2.0, omega=1.0)
        assert record.gamma_cross == pytest.approx(0.5 * record.gamma_1)
        assert record.gamma_mean == pytest.approx(record.gamma_1)
        assert record.gamma_perp > 0


class TestSampling:
    """Stationary Gaussian sampling with cross-correlation."""

    def test_ou_stationary_variance(self):
        """Variance stays sigma^2 at every step."""
        spec = ou_spec(Geometry.DEPHASING, sigma=1.0, tc=1.0)
        fields = sample_batch(spec, 50, 0.1, master_seed=11, indices=range(N_SAMPLES))
        variance = fields[:, 0, :, 2].var(axis=0)
        assert np.all(np.abs(variance - 1.0) < 5 * math.sqrt(2 / N_SAMPLES))

    def test_ou_autocorrelation_at_tc(self):
        """Lag-tc autocorrelation is sigma^2 / e."""
        spec = ou_spec(Geometry.DEPHASING, sigma=1.0, tc=1.0)
        fields = sample_batch(spec, 40, 0.1, master_seed=12, indices=range(N_SAMPLES))
        lagged = np.mean(fields[:, 0, 5, 2] * fields[:, 0, 15, 2])
        assert lagged == pytest.approx(math.exp(-1.0), abs=5 * math.sqrt(1.2 / N_SAMPLES))

    def test_cross_covariance(self):
        """Cov(w1, w2) = gamma sigma^2."""
        spec = ou_spec(Geometry.DEPHASING, sigma=1.0, tc=1.0, gamma=0.5)
        fields = sample_batch(spec, 5, 0.1, master_seed=13, indices=range(N_SAMPLES))
        cross = np.mean(fields[:, 0, 2, 2] * fields[:, 1, 2, 2])
        assert cross == pytest.approx(0.5, abs=5 * math.sqrt(1.25 / N_SAMPLES))

    def test_fully_correlated_identical(self):
        """gamma = 1 gives the same field on both qubits."""
        pair = sample_pair(ou_spec(sigma=2.0, gamma=1.0), 100, 0.05, seed=3)
        np.testing.assert_array_equal(pair.qubit(1), pair.qubit(2))

    def test_disabled_axes_are_zero(self):
        """Transverse noise has no z component."""
        pair = sample_pair(ou_spec(Geometry.TRANSVERSE), 20, 0.1, seed=4)
        assert np.all(pair.samples[..., 2] == 0)
        assert np.any(pair.samples[..., 0] != 0)

    def test_white_variance(self):
        """Piecewise-constant white noise has variance 2/(T dt)."""
        spec = white_spec(T=2.0)
        fields = sample_batch(spec, 3, 0.01, master_seed=5, indices=range(N_SAMPLES))
        variance = fields[:, 0, 1, 2].var() / 100.0
        assert variance == pytest.approx(1.0, abs=5 * math.sqrt(2 / N_SAMPLES))

    def test_seed_discipline(self):
        """A trajectory depends only on (master seed, index)."""
        spec = ou_spec(sigma=1.0, tc=0.5, gamma=0.3)
        single = sample_pair(spec, 30, 0.1, seed=trajectory_seed(7, 3)).samples
        batch = sample_batch(spec, 30, 0.1, master_seed=7, indices=[0, 3, 9])
        other = sample_batch(spec, 30, 0.1, master_seed=7, indices=[3])
        np.testing.assert_allclose(batch[1], single, rtol=0, atol=1e-14)
        np.testing.assert_allclose(other[0], single, rtol=0, atol=1e-14)
        assert not np.allclose(batch[0], batch[1])

    def test_invalid_grid(self):
        """Non-positive step counts and steps are rejected."""
        with pytest.raises(ValueError):
            sample_pair(ou_spec(), 0, 0.1, seed=1)
        with pytest.raises(ValueError):
            sample_pair(ou_spec(), 10, 0.0, seed=1)
