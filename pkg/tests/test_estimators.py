import numpy as np
import pytest
from sklearn.base import clone

from resoloss.estimators import NotchResonatorRegressor, TLSLossRegressor
from resoloss.exceptions import InputError
from resoloss.model import BackgroundModel, ResonanceParams, TLSModelParams, s21_forward, tls_loss
from resoloss.synth import linewidth_grid


def test_notch_params_and_clone():
    est = NotchResonatorRegressor(wing_fraction=0.2, strict=True)
    assert est.get_params()["wing_fraction"] == 0.2
    other = clone(est).set_params(max_iterations=50)
    assert other.max_iterations == 50 and est.max_iterations == 200


def test_notch_fit_predict_score():
    res = ResonanceParams(6e9, 3e4, 6e4, -0.2)
    bg = BackgroundModel(0.8, 1.0, 1e-8)
    f = np.linspace(*linewidth_grid(res, 8, 401))
    z = s21_forward(f, res, bg)
    est = NotchResonatorRegressor().fit(f[:, None], z)
    assert est.converged_
    assert est.f_r_ == pytest.approx(6e9, rel=1e-9)
    assert est.score(f, z) == pytest.approx(1.0, abs=1e-9)
    bare = est.normalize(f, z)
    assert np.allclose(bare, s21_forward(f, res), atol=1e-7)


def test_notch_validation():
    with pytest.raises(InputError):
        NotchResonatorRegressor().fit(np.ones((5, 2)), np.ones(5))
    with pytest.raises(ValueError):
        NotchResonatorRegressor().fit(np.linspace(1, 2, 20), np.ones(19, complex))


def test_tls_estimator():
    p = TLSModelParams(2.8e-5, 3.7e-6, 100.0, 1.0, 5e9, 0.01)
    n = np.logspace(-1, 6, 71)
    est = TLSLossRegressor(frequency=5e9, temperature=0.01).fit(n, tls_loss(n, p))
    assert est.n_c_ == pytest.approx(100.0, rel=1e-6)
    assert np.allclose(est.predict(n), tls_loss(n, p), rtol=1e-8)
    assert est.score(n, tls_loss(n, p)) == pytest.approx(1.0)
    assert clone(est).get_params()["beta"] == "fixed:1"
