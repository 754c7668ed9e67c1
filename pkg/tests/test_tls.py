import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import central_difference, column_relative_errors
from resoloss.config import FitConfig
from resoloss.exceptions import InsufficientData, UnidentifiableSaturation
from resoloss.model import PowerSweepPoint, TLSModelParams, tls_loss
from resoloss.synth import NoiseModel, synth_power_sweep
from resoloss.tls import fit_power_sweep, tls_jacobian_log, tls_model_log

THIN = TLSModelParams(2.8e-5, 3.7e-6, 100.0, 1.0, 5e9, 0.01)
GRID = np.logspace(-1, 6, 141)  # 20 points per decade


def test_noiseless_recovery():
    fit = fit_power_sweep(synth_power_sweep(THIN, GRID), 5e9, 0.01)
    assert fit.converged
    assert fit.params.F_delta0 == pytest.approx(2.8e-5, rel=1e-8)
    assert fit.params.delta_other == pytest.approx(3.7e-6, rel=1e-8)
    assert fit.params.n_c == pytest.approx(100.0, rel=1e-8)
    assert fit.delta_LP == pytest.approx(tls_loss(0.0, THIN), rel=1e-8)
    assert fit.Q_max == pytest.approx(1 / 3.7e-6, rel=1e-8)


def test_noisy_recovery_small_batch():
    errs = []
    for seed in range(30):
        sweep = synth_power_sweep(THIN, GRID, NoiseModel.relative(0.05, seed))
        fit = fit_power_sweep(sweep, 5e9, 0.01)
        errs.append((abs(fit.params.F_delta0 / 2.8e-5 - 1), abs(fit.params.delta_other / 3.7e-6 - 1)))
    med = np.median(errs, axis=0)
    assert med[0] < 0.05 and med[1] < 0.10


def test_free_beta():
    p = TLSModelParams(2.8e-5, 3.7e-6, 100.0, 0.6, 5e9, 0.01)
    fit = fit_power_sweep(synth_power_sweep(p, GRID), 5e9, 0.01, FitConfig(beta_mode="free"))
    assert fit.parameter_names == ("F_delta0", "delta_other", "n_c", "beta")
    assert fit.covariance.shape == (4, 4)
    assert fit.params.beta == pytest.approx(0.6, rel=1e-6)


def test_four_points_is_insufficient():
    sweep = synth_power_sweep(THIN, [0.1, 10, 1e3, 1e5])
    with pytest.raises(InsufficientData):
        fit_power_sweep(sweep, 5e9, 0.01)


def test_narrow_sweep_is_insufficient():
    sweep = synth_power_sweep(THIN, np.linspace(1, 50, 10))
    with pytest.raises(InsufficientData):
        fit_power_sweep(sweep, 5e9, 0.01)


def test_plateau_only_sweep_is_unidentifiable():
    p = TLSModelParams(2.8e-5, 3.7e-6, 1e8, 1.0, 5e9, 0.01)
    sweep = synth_power_sweep(p, np.logspace(-1, 2, 30), NoiseModel.relative(0.05, 3))
    with pytest.raises(UnidentifiableSaturation) as info:
        fit_power_sweep(sweep, 5e9, 0.01)
    assert info.value.n_c_lower_bound == pytest.approx(100.0)


def test_weight_invariance():
    sweep = synth_power_sweep(THIN, GRID, NoiseModel.relative(0.05, 9))
    scaled = [PowerSweepPoint(p.photon_number, p.delta_i, 7.0 * p.sigma) for p in sweep]
    a = fit_power_sweep(sweep, 5e9, 0.01)
    b = fit_power_sweep(scaled, 5e9, 0.01)
    for x, y in zip((a.params.F_delta0, a.params.delta_other, a.params.n_c),
                    (b.params.F_delta0, b.params.delta_other, b.params.n_c)):
        assert y == pytest.approx(x, rel=1e-7)
    np.testing.assert_allclose(b.covariance, 49.0 * a.covariance, rtol=1e-5)


def test_uniform_weighting_when_any_sigma_zero():
    sweep = synth_power_sweep(THIN, GRID, NoiseModel.relative(0.02, 4))
    sweep[3] = PowerSweepPoint(sweep[3].photon_number, sweep[3].delta_i, 0.0)
    fit = fit_power_sweep(sweep, 5e9, 0.01)
    assert not fit.weighted
    assert fit.params.F_delta0 == pytest.approx(2.8e-5, rel=0.05)


@settings(max_examples=25)
@given(
    st.floats(1e-6, 1e-4), st.floats(1e-7, 1e-5), st.floats(1.0, 1e4), st.integers(0, 2**31),
)
def test_converged_fits_are_monotone_and_bounded(F, other, nc, seed):
    p = TLSModelParams(F, other, nc, 1.0, 5e9, 0.01)
    sweep = synth_power_sweep(p, GRID, NoiseModel.relative(0.03, seed))
    fit = fit_power_sweep(sweep, 5e9, 0.01)
    if not fit.converged:
        return
    n = np.concatenate([[0.0], np.logspace(-3, 9, 200)])
    d = fit.predict(n)
    assert np.all(np.diff(d) <= 0)
    assert np.all(d >= fit.params.delta_other)


@pytest.mark.parametrize("free_beta", [False, True])
def test_jacobian_matches_central_differences(free_beta):
    rng = np.random.default_rng(5 + free_beta)
    for _ in range(100):
        x = [10 ** rng.uniform(-6, -4), 10 ** rng.uniform(-7, -5), math.log(10 ** rng.uniform(-1, 5))]
        if free_beta:
            x.append(rng.uniform(0.2, 2.0))
        x = np.array(x)
        n = np.logspace(-1, 6, 50)
        tf = rng.uniform(0.2, 1.0)
        beta = None if free_beta else 1.0
        fun = lambda v: tls_model_log(v, n, tf, beta)  # noqa: E731
        steps = [1e-6 * x[0], 1e-6 * x[1], 1e-6] + ([1e-6 * x[3]] if free_beta else [])
        J_num = central_difference(fun, x, steps)
        assert column_relative_errors(tls_jacobian_log(x, n, tf, beta), J_num).max() < 1e-6
