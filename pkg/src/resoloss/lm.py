"""Levenberg-Marquardt nonlinear least squares.

Damping uses Marquardt's diagonal scaling (running maximum of the Jacobian
column norms), so the iteration is insensitive to the units of individual
parameters. Each damped step is solved as an augmented linear least-squares
problem rather than through the normal equations.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .config import FitConfig
from .exceptions import NotConverged, SingularNormalMatrix

_LAMBDA_MAX = 1e16
_RCOND = 1e-13


@dataclass(frozen=True)
class LMDiagnostics:
    residual_norm: float
    gradient_cosine: float
    iterations: int
    n_evaluations: int
    converged: bool
    reason: str
    singular: bool
    variance_scale: float


class LMResult(NamedTuple):
    solution: np.ndarray
    covariance: np.ndarray
    diagnostics: LMDiagnostics


def numerical_jacobian(fun, x, rel_step=1e-6, abs_step=1e-12):
    """Central-difference Jacobian with step ``max(rel_step*|x_k|, abs_step)``."""
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(x.size):
        h = max(rel_step * abs(x[k]), abs_step)
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        cols.append((np.asarray(fun(xp)) - np.asarray(fun(xm))) / (xp[k] - xm[k]))
    return np.column_stack(cols)


def _gradient_cosine(J, r, rnorm):
    if rnorm == 0:
        return 0.0
    colnorm = np.linalg.norm(J, axis=0)
    g = np.abs(J.T @ r)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos = np.where(colnorm > 0, g / (colnorm * rnorm), 0.0)
    return float(np.max(cos)) if cos.size else 0.0


def covariance_from_jacobian(J, variance_scale=1.0):
    """(J^T J)^-1 * scale via SVD; returns ``(cov, singular)``.

    Near-singular directions are dropped (pseudo-inverse) and flagged.
    """
    _, s, vt = np.linalg.svd(J, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        p = J.shape[1]
        return np.full((p, p), np.inf), True
    keep = s > _RCOND * s[0]
    singular = not bool(np.all(keep)) or s.size < J.shape[1]
    inv_s2 = np.where(keep, 1.0 / np.where(keep, s, 1.0) ** 2, 0.0)
    cov = (vt.T * inv_s2) @ vt * variance_scale
    cov = 0.5 * (cov + cov.T)
    return cov, singular


def lm_minimize(
    residual_fn: Callable[[np.ndarray], np.ndarray],
    initial,
    cfg: Optional[FitConfig] = None,
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    absolute_sigma: bool = False,
    strict: bool = True,
    raise_on_singular: bool = False,
    exact_tolerance: float = 0.0,
) -> LMResult:
    """Minimise ``sum(residual_fn(x)**2)`` starting from ``initial``.

    Parameters
    ----------
    residual_fn : callable
        Maps a parameter vector to a real residual vector (already weighted).
    initial : array_like
        Starting parameters; residuals must be finite there.
    cfg : FitConfig, optional
        Supplies ``max_iterations``, ``gradient_tolerance`` and ``step_tolerance``.
    jacobian : callable, optional
        Analytic Jacobian. Central differences are used when omitted.
    absolute_sigma : bool
        If False the covariance is scaled by the residual variance
        ``|r|^2 / (m - p)``; if True residuals are taken to be in units of
        their standard deviation and no rescaling happens.
    strict : bool
        Raise :class:`NotConverged` (with the result attached) instead of
        returning a flagged result.
    exact_tolerance : float
        Residual norm at or below which the fit counts as exact. The
        gradient cosine is meaningless once residuals are pure rounding.

    Returns
    -------
    LMResult
        ``(solution, covariance, diagnostics)``.
    """
    cfg = cfg or FitConfig()
    jac = jacobian or (lambda x: numerical_jacobian(residual_fn, x))

    x = np.array(initial, dtype=float)
    r = np.asarray(residual_fn(x), dtype=float)
    if not np.all(np.isfinite(r)):
        raise ValueError("residuals are not finite at the initial point")
    nfev = 1
    cost = float(r @ r)
    J = np.asarray(jac(x), dtype=float)
    scale = np.linalg.norm(J, axis=0)
    scale[scale == 0] = 1.0
    lam = 1e-3
    reason = "max_iterations"
    iterations = 0
    small_steps = 0

    while iterations < cfg.max_iterations:
        rnorm = np.sqrt(cost)
        if rnorm <= exact_tolerance or _gradient_cosine(J, r, rnorm) <= cfg.gradient_tolerance:
            reason = "gradient_tolerance"
            break
        iterations += 1
        scale = np.maximum(scale, np.linalg.norm(J, axis=0))
        accepted = False
        while lam <= _LAMBDA_MAX:
            # solve in column-scaled variables z = scale * step
            A = np.vstack([J / scale, np.sqrt(lam) * np.eye(x.size)])
            b = np.concatenate([-r, np.zeros(x.size)])
            step = np.linalg.lstsq(A, b, rcond=None)[0] / scale
            x_new = x + step
            r_new = np.asarray(residual_fn(x_new), dtype=float)
            nfev += 1
            cost_new = float(r_new @ r_new) if np.all(np.isfinite(r_new)) else np.inf
            # tolerate rounding-level increases so the iteration can still
            # polish the gradient once the cost has stopped changing
            if cost_new <= cost * (1.0 + 1e-13):
                accepted = True
                break
            lam *= 4.0
        if not accepted:
            reason = "no_further_decrease"
            break
        step_small = np.linalg.norm(scale * step) <= cfg.step_tolerance * (
            np.linalg.norm(scale * x) + cfg.step_tolerance
        )
        x, r, cost = x_new, r_new, cost_new
        J = np.asarray(jac(x), dtype=float)
        lam = max(lam / 8.0, 1e-12)
        small_steps = small_steps + 1 if step_small else 0
        if small_steps >= 8:
            reason = "step_tolerance"
            break

    rnorm = float(np.sqrt(cost))
    cosine = _gradient_cosine(J, r, rnorm)
    converged = rnorm <= exact_tolerance or cosine <= cfg.gradient_tolerance
    m, p = J.shape
    if absolute_sigma:
        vscale = 1.0
    else:
        vscale = cost / max(m - p, 1)
    cov, singular = covariance_from_jacobian(J, vscale)
    diag = LMDiagnostics(
        residual_norm=rnorm,
        gradient_cosine=cosine,
        iterations=iterations,
        n_evaluations=nfev,
        converged=converged,
        reason=reason,
        singular=singular,
        variance_scale=vscale,
    )
    result = LMResult(x, cov, diag)
    if singular and raise_on_singular:
        raise SingularNormalMatrix("normal matrix is singular; covariance is a pseudo-inverse")
    if strict and not converged:
        raise NotConverged(f"Levenberg-Marquardt stopped ({reason}) without converging", result)
    return result
