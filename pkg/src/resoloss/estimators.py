"""scikit-learn style wrappers around the resonance and TLS fits."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_consistent_length, check_is_fitted, column_or_1d

from .config import FitConfig, parse_beta_mode
from .exceptions import InputError
from .fitting import fit_resonance
from .model import FrequencyTrace, PowerSweepPoint, s21_forward
from .tls import fit_power_sweep


def check_real_1d(X):
    """Accept a 1-D array or an (n, 1) column (frequencies, photon numbers); return float64 1-D."""
    X = np.asarray(X)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    if np.iscomplexobj(X):
        raise InputError("expected real values")
    if X.ndim != 1:
        raise InputError(f"expected a 1-D array or a single column, got shape {X.shape}")
    return column_or_1d(X, dtype=np.float64)


def check_transmission(y):
    """Complex 1-D transmission; sklearn's own checks reject complex input."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise InputError(f"transmission must be 1-D, got shape {y.shape}")
    y = y.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(y)):
        raise InputError("transmission contains NaN or inf")
    return y


def check_sweep(X, y, sigma=None):
    n = check_real_1d(X)
    delta = column_or_1d(np.asarray(y), dtype=np.float64)
    s = np.zeros_like(delta) if sigma is None else column_or_1d(np.asarray(sigma), dtype=np.float64)
    check_consistent_length(n, delta, s)
    return n, delta, s


class NotchResonatorRegressor(RegressorMixin, BaseEstimator):
    """Fit ``S21(f)`` of a notch resonator; ``X`` holds frequencies, ``y`` complex S21."""

    def __init__(self, wing_fraction=0.1, max_iterations=200, gradient_tolerance=1e-10,
                 step_tolerance=1e-12, strict=False):
        self.wing_fraction = wing_fraction
        self.max_iterations = max_iterations
        self.gradient_tolerance = gradient_tolerance
        self.step_tolerance = step_tolerance
        self.strict = strict

    def _config(self):
        return FitConfig(
            max_iterations=self.max_iterations,
            gradient_tolerance=self.gradient_tolerance,
            step_tolerance=self.step_tolerance,
            wing_fraction=self.wing_fraction,
        )

    def fit(self, X, y):
        f = check_real_1d(X)
        z = check_transmission(y)
        check_consistent_length(f, z)
        self.fit_result_ = fit_resonance(FrequencyTrace(f, z), self._config(), strict=self.strict)
        self.params_ = self.fit_result_.params
        self.background_ = self.fit_result_.background
        self.f_r_ = self.params_.f_r
        self.Q_i_ = self.fit_result_.Q_i
        self.converged_ = self.fit_result_.converged
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_result_")
        return s21_forward(check_real_1d(X), self.params_, self.background_)

    def normalize(self, X, y):
        """Divide out the fitted background, leaving the bare resonance circle."""
        check_is_fitted(self, "fit_result_")
        f = check_real_1d(X)
        z = check_transmission(y)
        check_consistent_length(f, z)
        return z / self.background_.evaluate(f)

    def score(self, X, y, sample_weight=None):
        """Complex coefficient of determination."""
        z = check_transmission(y)
        resid = z - self.predict(X)
        w = np.ones(z.size) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        ss_res = np.sum(w * np.abs(resid) ** 2)
        ss_tot = np.sum(w * np.abs(z - np.average(z, weights=w)) ** 2)
        return 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0


class TLSLossRegressor(RegressorMixin, BaseEstimator):
    """Fit loss versus photon number; ``X`` holds photon numbers, ``y`` internal loss."""

    def __init__(self, frequency=5e9, temperature=0.01, beta="fixed:1", weighting="inverse_variance",
                 max_iterations=200, strict=False):
        self.frequency = frequency
        self.temperature = temperature
        self.beta = beta
        self.weighting = weighting
        self.max_iterations = max_iterations
        self.strict = strict

    def fit(self, X, y, sigma=None):
        n, delta, s = check_sweep(X, y, sigma)
        mode, beta = parse_beta_mode(self.beta)
        cfg = FitConfig(max_iterations=self.max_iterations, beta_mode=mode, beta=beta, weighting=self.weighting)
        sweep = [PowerSweepPoint(float(a), float(b), float(c)) for a, b, c in zip(n, delta, s)]
        self.fit_ = fit_power_sweep(sweep, self.frequency, self.temperature, cfg, strict=self.strict)
        p = self.fit_.params
        self.F_delta0_ = p.F_delta0
        self.delta_other_ = p.delta_other
        self.n_c_ = p.n_c
        self.beta_ = p.beta
        self.delta_LP_ = self.fit_.delta_LP
        self.Q_max_ = self.fit_.Q_max
        self.converged_ = self.fit_.converged
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        return self.fit_.predict(check_real_1d(X))
