"""Power-sweep extraction of the saturable TLS loss parameters."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import FitConfig
from .exceptions import InsufficientData, NotConverged, UnidentifiableSaturation
from .lm import lm_minimize
from .model import PowerSweepPoint, TLSModelParams, thermal_factor, tls_loss

MIN_SWEEP_POINTS = 6
MIN_SWEEP_DECADES = 2.0
TLS_PARAMETER_NAMES = ("F_delta0", "delta_other", "n_c", "beta")


@dataclass(frozen=True, eq=False)
class TLSFit:
    """Fitted loss law plus derived low-/high-power figures.

    ``covariance`` spans ``parameter_names`` (``beta`` only when it was free).
    """

    params: TLSModelParams
    covariance: np.ndarray
    delta_LP: float
    Q_max: float
    residual_norm: float
    converged: bool
    iterations: int
    parameter_names: tuple = TLS_PARAMETER_NAMES[:3]
    weighted: bool = True
    label: str = ""

    def predict(self, n):
        return tls_loss(n, self.params)


def tls_model_log(x, n, tf, beta=None):
    """Loss law in fit coordinates ``x = (F_delta0, delta_other, log n_c[, beta])``.

    ``tf`` is the thermal factor; ``beta`` is the fixed exponent, or None when
    it is the fourth entry of ``x``.
    """
    b = x[3] if beta is None else beta
    return x[0] * tf * (1.0 + n / math.exp(x[2])) ** (-b / 2.0) + x[1]


def tls_jacobian_log(x, n, tf, beta=None):
    """Analytic Jacobian of :func:`tls_model_log` with respect to ``x``."""
    F = x[0]
    nc = math.exp(x[2])
    b = x[3] if beta is None else beta
    u = 1.0 + n / nc
    g = u ** (-b / 2.0)
    cols = [
        tf * g,
        np.ones_like(n),
        # d/d(log n_c) = n_c * d/d n_c
        F * tf * (b / 2.0) * g * (n / nc) / u,
    ]
    if beta is None:
        cols.append(-0.5 * F * tf * g * np.log(u))
    return np.column_stack(cols)


def _arrays(sweep):
    pts = sorted(sweep, key=lambda p: p.photon_number)
    n = np.array([p.photon_number for p in pts])
    d = np.array([p.delta_i for p in pts])
    s = np.array([p.sigma for p in pts])
    return n, d, s


def _noise_scale(d, s):
    if np.all(s > 0):
        return s
    # robust per-point scatter from successive differences
    mad = np.median(np.abs(np.diff(d) - np.median(np.diff(d))))
    return np.full(d.size, max(1.4826 * mad / math.sqrt(2.0), 1e-15 * np.max(d)))


def _check_saturation(n, d, s):
    scale = _noise_scale(d, s)
    k = max(1, min(3, n.size // 6))
    plateau = float(np.mean(d[:k]))
    departure = (plateau - d) / scale
    if not np.any(departure > 3.0):
        raise UnidentifiableSaturation(
            "loss never drops more than 3 sigma below the low-power plateau; "
            f"n_c is only bounded below by {n[-1]:.3g}",
            n_c_lower_bound=float(n[-1]),
        )


def fit_power_sweep(
    sweep: Sequence[PowerSweepPoint],
    f: float,
    T: float,
    cfg: Optional[FitConfig] = None,
    strict: bool = False,
    label: str = "",
) -> TLSFit:
    """Fit the TLS loss law to loss-vs-photon-number data.

    Free parameters are ``F_delta0``, ``delta_other`` and ``n_c`` (plus
    ``beta`` when ``cfg.beta_mode == "free"``). ``n_c`` is fitted on a log
    scale. With ``weighting="inverse_variance"`` and every sigma positive the
    residuals are divided by sigma and the covariance is absolute; otherwise
    the fit is unweighted and the covariance is scaled by the residual
    variance.
    """
    cfg = cfg or FitConfig()
    if len(sweep) < MIN_SWEEP_POINTS:
        raise InsufficientData(f"{len(sweep)} sweep points; need at least {MIN_SWEEP_POINTS}")
    n, d, s = _arrays(sweep)
    if math.log10(n[-1] / n[0]) < MIN_SWEEP_DECADES:
        raise InsufficientData(
            f"sweep spans {math.log10(n[-1] / n[0]):.2f} decades of photon number; need {MIN_SWEEP_DECADES}"
        )
    _check_saturation(n, d, s)

    weighted = cfg.weighting == "inverse_variance" and bool(np.all(s > 0))
    w = 1.0 / s if weighted else np.ones_like(d)
    tf = thermal_factor(f, T)
    if tf == 0:
        raise InsufficientData("thermal factor vanishes; TLS term is unobservable")
    free_beta = cfg.beta_mode == "free"

    fixed_beta = None if free_beta else cfg.beta

    def unpack(x):
        F, other, log_nc = x[0], x[1], x[2]
        beta = x[3] if free_beta else cfg.beta
        return F, other, math.exp(log_nc), beta

    def resid(x):
        return (tls_model_log(x, n, tf, fixed_beta) - d) * w

    def jac(x):
        return tls_jacobian_log(x, n, tf, fixed_beta) * w[:, None]

    # starting point: plateau and tail levels, n_c where the loss is halfway
    k = max(1, min(3, n.size // 6))
    high = float(np.mean(d[:k]))
    low = float(np.mean(d[-k:]))
    span = max(high - low, 1e-3 * high)
    mid = low + 0.5 * span
    below = np.nonzero(d <= mid)[0]
    n_mid = float(n[below[0]]) if below.size else float(n[-1])
    beta0 = cfg.beta
    # (1 + n/n_c)^(-beta/2) = 1/2 at the halfway point
    nc0 = n_mid / max(2.0 ** (2.0 / beta0) - 1.0, 1e-6)
    x0 = [span / tf, max(low, 0.0), math.log(nc0)]
    if free_beta:
        x0.append(beta0)

    exact = 1e-11 * float(np.linalg.norm(d * w))
    best = None
    for start_scale in (1.0, 0.1, 10.0):
        x_start = np.array(x0, dtype=float)
        x_start[2] += math.log(start_scale)
        result = lm_minimize(resid, x_start, cfg, jacobian=jac, absolute_sigma=weighted, strict=False, exact_tolerance=exact)
        if best is None or result.diagnostics.residual_norm < best.diagnostics.residual_norm * (1 - 1e-12):
            best = result
        if result.diagnostics.converged and _physical(unpack(result.solution)):
            best = result
            break
    sol, cov_int, diag = best

    F, other, nc, beta = unpack(sol)
    # covariance of (F, other, log n_c[, beta]) -> (F, other, n_c[, beta])
    T_mat = np.eye(len(sol))
    T_mat[2, 2] = nc
    cov = T_mat @ cov_int @ T_mat.T
    cov = 0.5 * (cov + cov.T)

    names = TLS_PARAMETER_NAMES if free_beta else TLS_PARAMETER_NAMES[:3]
    converged = diag.converged and _physical((F, other, nc, beta))
    params = TLSModelParams(
        F_delta0=float(max(F, 0.0)),
        delta_other=float(max(other, 0.0)),
        n_c=float(nc),
        beta=float(min(max(beta, 1e-6), 2.0)),
        f=f,
        T=T,
    )
    delta_lp = tls_loss(0.0, params)
    q_max = 1.0 / params.delta_other if params.delta_other > 0 else math.inf
    fit = TLSFit(
        params=params,
        covariance=cov,
        delta_LP=delta_lp,
        Q_max=q_max,
        residual_norm=float(diag.residual_norm),
        converged=bool(converged),
        iterations=diag.iterations,
        parameter_names=names,
        weighted=weighted,
        label=label,
    )
    if strict and not converged:
        raise NotConverged("TLS power-sweep fit did not converge", fit)
    return fit


def _physical(p):
    F, other, nc, beta = p
    return F >= 0 and other >= 0 and nc > 0 and 0 < beta <= 2
