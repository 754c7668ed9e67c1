"""Staged notch-resonance fitting with asymmetry (diameter) correction.

Pipeline: cable delay / background from the sweep wings, background removal,
algebraic circle fit, phase-vs-frequency fit around the circle centre,
asymmetry angle from the circle geometry, then a joint Levenberg-Marquardt
refinement of all seven parameters against the complex residuals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .circle import circle_fit
from .config import FitConfig
from .exceptions import (
    DegenerateGeometry,
    InsufficientWings,
    NoResonance,
    NonPhysicalFit,
    NotConverged,
)
from .lm import lm_minimize
from .model import (
    BackgroundModel,
    FrequencyTrace,
    ResonanceParams,
    internal_loss,
    wrap_angle,
)

PARAMETER_NAMES = ("f_r", "Q_l", "Qc_mag", "phi", "a", "alpha", "tau")
MIN_WING_POINTS = 4
# residual norm, relative to the data norm, treated as an exact fit
_EXACT_RTOL = 1e-11


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of :func:`fit_resonance`.

    ``covariance`` is 7x7 over :data:`PARAMETER_NAMES`, in natural units
    (Hz, -, -, rad, -, rad, s).
    """

    params: ResonanceParams
    background: BackgroundModel
    covariance: np.ndarray
    residual_norm: float
    converged: bool
    iterations: int
    reason: str = ""
    label: str = ""
    n_points: int = 0
    parameter_names: Tuple[str, ...] = field(default=PARAMETER_NAMES)

    @property
    def delta_i(self):
        return internal_loss(self.params)[0]

    @property
    def Q_i(self):
        return internal_loss(self.params)[1]

    @property
    def Qc_real(self):
        """Effective coupling Q, |Q_c| / cos(phi)."""
        return self.params.Qc_mag / math.cos(self.params.phi)

    def vector(self):
        p, b = self.params, self.background
        return np.array([p.f_r, p.Q_l, p.Qc_mag, p.phi, b.a, b.alpha, b.tau])


def _wing_slices(n, cfg):
    nw = int(math.floor(cfg.wing_fraction * n))
    if nw < MIN_WING_POINTS:
        raise InsufficientWings(
            f"{nw} wing points per side (wing_fraction={cfg.wing_fraction}, {n} points); "
            f"need at least {MIN_WING_POINTS}"
        )
    return slice(0, nw), slice(n - nw, n)


def estimate_background(trace: FrequencyTrace, cfg: Optional[FitConfig] = None) -> BackgroundModel:
    """Environment estimate from the off-resonant edges of the sweep.

    The cable delay is the common slope of a straight-line fit to the
    unwrapped phase on both wings (each wing gets its own intercept, which
    absorbs any full phase turn through the resonance). The amplitude is the
    median wing magnitude and the phase offset is the wing intercept
    extrapolated to zero frequency.
    """
    cfg = cfg or FitConfig()
    f = trace.frequencies
    z = trace.s21
    lo, hi = _wing_slices(f.size, cfg)
    f_ref = 0.5 * (f[0] + f[-1])
    phase = np.unwrap(np.angle(z))

    fl, fh = f[lo] - f_ref, f[hi] - f_ref
    design = np.zeros((fl.size + fh.size, 3))
    design[: fl.size, 0] = fl
    design[fl.size :, 0] = fh
    design[: fl.size, 1] = 1.0
    design[fl.size :, 2] = 1.0
    rhs = np.concatenate([phase[lo], phase[hi]])
    slope, c_lo, c_hi = np.linalg.lstsq(design, rhs, rcond=None)[0]
    turns = round((c_hi - c_lo) / (2 * math.pi))
    c_ref = 0.5 * (c_lo + c_hi - 2 * math.pi * turns)

    tau = -slope / (2 * math.pi)
    alpha = c_ref + 2 * math.pi * f_ref * tau
    a = float(np.median(np.abs(np.concatenate([z[lo], z[hi]]))))
    return BackgroundModel(a=a, alpha=alpha, tau=tau)


# Detunings are formed as differences of offsets from a reference frequency;
# 1 - f/f_r at GHz carriers loses ~5 digits to cancellation.

def _phase_model(df, dr, f_r, Q_l, theta0):
    return theta0 + 2.0 * np.arctan(2.0 * Q_l * (dr - df) / f_r)


def _phase_jacobian(df, dr, f_r, Q_l):
    x = (dr - df) / f_r
    w = 2.0 * Q_l * x
    g = 2.0 / (1.0 + w * w)
    f = f_r - (dr - df)
    return np.column_stack([g * 2.0 * Q_l * f / f_r**2, g * 2.0 * x, np.ones_like(df)])


def _smooth(y, width):
    if width <= 1:
        return y
    kernel = np.ones(width) / width
    pad = width // 2
    ypad = np.concatenate([np.full(pad, y[0]), y, np.full(width - 1 - pad, y[-1])])
    return np.convolve(ypad, kernel, mode="valid")


def phase_fit(frequencies, phases, cfg: Optional[FitConfig] = None):
    """Fit ``theta(f) = theta0 + 2 arctan(2 Q_l (1 - f/f_r))`` to unwrapped phases.

    Returns ``(f_r, Q_l, theta0)``. The starting resonance frequency is taken
    at the steepest (smoothed) phase slope.
    """
    cfg = cfg or FitConfig()
    f = np.asarray(frequencies, dtype=float)
    theta = np.asarray(phases, dtype=float)
    if np.ptp(theta) < math.pi / 2:
        raise NoResonance(f"total phase winding {np.ptp(theta):.3f} rad is below pi/2")

    width = max(1, f.size // 64)
    sm = _smooth(theta, width)
    slope = np.gradient(sm, f)
    k = int(np.argmin(slope))  # phase falls through resonance
    if slope[k] >= 0:
        raise NoResonance("phase never decreases through the sweep")
    f_r0 = f[k]
    Q_l0 = max(-slope[k] * f_r0 / 4.0, 1.0)
    theta0 = sm[k]

    # resonance frequency is carried as an offset from f_r0
    x = np.array([0.0, Q_l0, theta0])
    df = f - f_r0
    exact = _EXACT_RTOL * float(np.linalg.norm(theta)) + 1e-300
    lin = f_r0 / Q_l0

    def fit_subset(x, free):
        free = np.asarray(free)

        def resid(u):
            y = x.copy()
            y[free] = u
            return _phase_model(df, y[0], f_r0 + y[0], y[1], y[2]) - theta

        def jac(u):
            y = x.copy()
            y[free] = u
            return _phase_jacobian(df, y[0], f_r0 + y[0], y[1])[:, free]

        res = lm_minimize(resid, x[free], cfg, jacobian=jac, strict=False, exact_tolerance=exact)
        y = x.copy()
        y[free] = res.solution
        return y, res

    x, _ = fit_subset(x, [1, 2])
    x, _ = fit_subset(x, [0, 2])
    x, res = fit_subset(x, [0, 1, 2])
    if not (x[1] > 0 and abs(x[0]) < 50 * lin + np.ptp(f)):
        raise NoResonance("phase fit diverged")
    return float(f_r0 + x[0]), float(x[1]), float(x[2])


def _s21_internal(f, f_ref, x):
    df_r, Q_l, Qc, phi, a, alpha_ref, tau = x
    f_r = f_ref + df_r
    df = f - f_ref
    D = 1.0 + 2j * Q_l * (df - df_r) / f_r
    eiphi = np.exp(1j * phi)
    B = a * np.exp(1j * (alpha_ref - 2.0 * np.pi * df * tau))
    core = 1.0 - (Q_l / Qc) * eiphi / D
    return B, D, eiphi, core


def _jacobian_internal(f, f_ref, x):
    """Complex derivative columns of S21 w.r.t. the internal parameter vector.

    Internal vector: (f_r - f_ref, Q_l, Qc_mag, phi, a, alpha - 2 pi f_ref tau, tau).
    """
    df_r, Q_l, Qc, phi, a, alpha_ref, tau = x
    f_r = f_ref + df_r
    B, D, eiphi, core = _s21_internal(f, f_ref, x)
    S = B * core
    R = Q_l / Qc
    D2 = D * D
    return np.column_stack(
        [
            -B * R * eiphi * 2j * Q_l * f / (f_r**2 * D2),
            -B * eiphi / (Qc * D2),
            B * R * eiphi / (Qc * D),
            -1j * B * R * eiphi / D,
            S / a,
            1j * S,
            -2j * np.pi * (f - f_ref) * S,
        ]
    )


def s21_jacobian(f, res: ResonanceParams, bg: BackgroundModel):
    """Analytic d S21 / d(f_r, Q_l, Qc_mag, phi, a, alpha, tau), complex, shape (n, 7)."""
    f = np.asarray(f, dtype=float)
    x = np.array([0.0, res.Q_l, res.Qc_mag, res.phi, bg.a, bg.alpha - 2 * math.pi * res.f_r * bg.tau, bg.tau])
    J = _jacobian_internal(f, res.f_r, x)
    # back to natural (alpha, tau): d/dtau|alpha = d/dtau|alpha_ref - 2 pi f_ref d/dalpha_ref
    J[:, 6] -= 2 * math.pi * res.f_r * J[:, 5]
    return J


def _initial_guess(trace, cfg):
    f = trace.frequencies
    bg0 = estimate_background(trace, cfg)
    z1 = trace.s21 / bg0.evaluate(f)
    try:
        center, radius = circle_fit(z1)
    except DegenerateGeometry as exc:
        raise NoResonance(f"no resonance circle in trace: {exc}") from exc
    theta = np.unwrap(np.angle(z1 - center))
    f_r, Q_l, theta0 = phase_fit(f, theta, cfg)

    off_res = center + radius * np.exp(1j * (theta0 - math.pi))
    if abs(off_res) == 0:
        raise NoResonance("degenerate off-resonant point")
    c_norm = center / off_res
    phi = float(np.angle(1.0 - c_norm))
    diameter = 2.0 * radius / abs(off_res)
    if abs(phi) >= math.pi / 2:
        raise NonPhysicalFit(f"asymmetry angle {phi:.3f} rad outside (-pi/2, pi/2)")
    Qc = Q_l / diameter
    a = bg0.a * abs(off_res)
    alpha = bg0.alpha + float(np.angle(off_res))
    return np.array([f_r, Q_l, Qc, phi, a, alpha, bg0.tau])


def fit_resonance(
    trace: FrequencyTrace, cfg: Optional[FitConfig] = None, strict: bool = False
) -> FitResult:
    """Fit the seven-parameter notch model to ``trace``.

    A result whose refinement did not meet the convergence tests is returned
    with ``converged=False``; pass ``strict=True`` to raise
    :class:`NotConverged` instead (the partial result rides on the
    exception).
    """
    cfg = cfg or FitConfig()
    trace.check_fittable()
    f = trace.frequencies
    z = trace.s21
    f_ref = 0.5 * (f[0] + f[-1])

    x0 = _initial_guess(trace, cfg)
    # offsets referenced to mid-sweep: keeps the step test meaningful and
    # decouples the phase offset from the delay
    x0[0] -= f_ref
    x0[5] = wrap_angle(x0[5] - 2 * math.pi * f_ref * x0[6])
    exact = _EXACT_RTOL * float(np.linalg.norm(z))

    def resid(x):
        B, _, _, core = _s21_internal(f, f_ref, x)
        d = B * core - z
        return np.concatenate([d.real, d.imag])

    def jac(x):
        Jc = _jacobian_internal(f, f_ref, x)
        return np.vstack([Jc.real, Jc.imag])

    sol, cov_int, diag = lm_minimize(resid, x0, cfg, jacobian=jac, strict=False, exact_tolerance=exact)

    T = np.eye(7)
    T[5, 6] = 2 * math.pi * f_ref
    cov = T @ cov_int @ T.T
    cov = 0.5 * (cov + cov.T)

    df_r, Q_l, Qc, phi, a, alpha_ref, tau = sol
    f_r = f_ref + df_r
    if not (f_r > 0 and Q_l > 0 and Qc > 0 and a > 0):
        raise NonPhysicalFit("refinement produced non-positive f_r, Q_l, |Q_c| or a")
    phi = wrap_angle(phi)
    if abs(phi) >= math.pi / 2:
        raise NonPhysicalFit(f"asymmetry angle {phi:.3f} rad outside (-pi/2, pi/2)")
    params = ResonanceParams(float(f_r), float(Q_l), float(Qc), float(phi))
    background = BackgroundModel(float(a), float(alpha_ref + 2 * math.pi * f_ref * tau), float(tau))
    internal_loss(params)

    result = FitResult(
        params=params,
        background=background,
        covariance=cov,
        residual_norm=diag.residual_norm,
        converged=diag.converged,
        iterations=diag.iterations,
        reason=diag.reason,
        label=trace.label,
        n_points=f.size,
    )
    if strict and not result.converged:
        raise NotConverged(f"resonance fit of '{trace.label}' did not converge ({diag.reason})", result)
    return result
