import math

import numpy as np
import pytest

from resoloss.fitting import fit_resonance
from resoloss.model import BackgroundModel, ResonanceParams, TLSModelParams
from resoloss.synth import NoiseModel, linewidth_grid, synth_power_sweep, synth_trace
from resoloss.tls import fit_power_sweep
from resoloss.uncertainty import delta_method, propagate_uncertainty, sigmas


def test_sigmas_of_diagonal():
    np.testing.assert_allclose(sigmas(np.diag([4.0, 9.0])), [2.0, 3.0])


def test_delta_method_reciprocal():
    # Q = 1/delta: sigma_Q = sigma_delta / delta^2
    delta, s = 2e-5, 3e-7
    assert delta_method([-1 / delta**2], np.array([[s**2]])) == pytest.approx(s / delta**2, rel=1e-12)


def test_resonance_fields_and_reciprocal_relation():
    res = ResonanceParams(5e9, 5e4, 1e5, 0.2)
    tr = synth_trace(res, BackgroundModel(0.9, 0.1, 30e-9), linewidth_grid(res, 8, 801), NoiseModel.isotropic(0.02, 2))
    fit = fit_resonance(tr)
    s = propagate_uncertainty(fit)
    for name in ("f_r", "Q_l", "Qc_mag", "phi", "a", "alpha", "tau", "delta_i", "Q_i"):
        assert s[name] > 0 and math.isfinite(s[name])
    assert s["Q_i"] == pytest.approx(s["delta_i"] / fit.delta_i**2, rel=1e-12)


def test_tls_fields():
    p = TLSModelParams(2.8e-5, 3.7e-6, 100.0)
    fit = fit_power_sweep(synth_power_sweep(p, np.logspace(-1, 6, 141), NoiseModel.relative(0.05, 1)), 5e9, 0.01)
    s = propagate_uncertainty(fit)
    assert s["Q_max"] == pytest.approx(s["delta_other"] / fit.params.delta_other**2, rel=1e-12)
    assert s["delta_LP"] > 0


def test_rejects_other_types():
    with pytest.raises(TypeError):
        propagate_uncertainty(object())


def test_qi_sigma_matches_monte_carlo_scatter():
    res = ResonanceParams(5e9, 5e4, 1e5, 0.2)
    bg = BackgroundModel(0.9, 0.1, 30e-9)
    grid = linewidth_grid(res, 8, 801)
    sigma = 0.05 * res.Q_l / res.Qc_mag
    q, predicted = [], []
    for seed in range(500):
        fit = fit_resonance(synth_trace(res, bg, grid, NoiseModel.isotropic(sigma, seed)))
        q.append(fit.Q_i)
        predicted.append(propagate_uncertainty(fit)["Q_i"])
    empirical = np.std(q, ddof=1)
    assert np.median(predicted) == pytest.approx(empirical, rel=0.20)
