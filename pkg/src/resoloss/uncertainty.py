"""First-order (delta method) uncertainties from fit covariances."""
from __future__ import annotations

import math

import numpy as np

from .fitting import FitResult
from .model import thermal_factor
from .tls import TLSFit


def sigmas(covariance):
    """Per-parameter 1-sigma from the covariance diagonal (negative rounding clipped)."""
    return np.sqrt(np.clip(np.diag(np.asarray(covariance, dtype=float)), 0.0, None))


def delta_method(gradient, covariance):
    g = np.asarray(gradient, dtype=float)
    return float(math.sqrt(max(g @ np.asarray(covariance) @ g, 0.0)))


def propagate_uncertainty(fit):
    """Map a :class:`FitResult` or :class:`TLSFit` to ``{name: sigma}``.

    Besides the fitted parameters, the result carries ``delta_i``/``Q_i``
    (resonance fits) or ``delta_LP``/``Q_max`` (TLS fits).
    """
    if not isinstance(fit, (FitResult, TLSFit)):
        raise TypeError(f"cannot propagate uncertainty for {type(fit).__name__}")
    cov = np.asarray(fit.covariance, dtype=float)
    out = dict(zip(fit.parameter_names, sigmas(cov).tolist()))
    if isinstance(fit, FitResult):
        p = fit.params
        # delta_i = 1/Q_l - cos(phi)/|Q_c|
        grad = np.zeros(cov.shape[0])
        grad[1] = -1.0 / p.Q_l**2
        grad[2] = math.cos(p.phi) / p.Qc_mag**2
        grad[3] = math.sin(p.phi) / p.Qc_mag
        s_delta = delta_method(grad, cov)
        delta_i = fit.delta_i
        out["delta_i"] = s_delta
        out["Q_i"] = s_delta / delta_i**2
    else:
        grad = np.zeros(cov.shape[0])
        grad[0] = thermal_factor(fit.params.f, fit.params.T)
        grad[1] = 1.0
        out["delta_LP"] = delta_method(grad, cov)
        other = fit.params.delta_other
        out["Q_max"] = out["delta_other"] / other**2 if other > 0 else math.inf
    return out
