"""Forward models for notch resonators and two-level-system loss.

All quantities are SI. Conversion from dBm happens only in the I/O layer
(:func:`dbm_to_watt` / :func:`watt_to_dbm` live here so both sides share one
definition).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import constants
from .exceptions import InvalidTrace, NonPhysicalFit

MIN_TRACE_POINTS = 16


def wrap_angle(x):
    """Map an angle (or array of angles) into (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    y = np.where(y <= -np.pi, y + 2 * np.pi, y)
    if np.ndim(y) == 0:
        return float(y)
    return y


def _frozen_array(values, dtype):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FrequencyTrace:
    """One complex S21 sweep with its drive/temperature metadata.

    ``applied_power`` (W) and ``temperature`` (K) may be ``None`` when the
    source format cannot carry them (Touchstone); they must be filled in with
    :meth:`with_metadata` before a campaign can use the trace.
    """

    frequencies: np.ndarray
    s21: np.ndarray
    applied_power: Optional[float] = None
    temperature: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        f = _frozen_array(self.frequencies, float)
        z = _frozen_array(self.s21, complex)
        if f.ndim != 1 or z.shape != f.shape:
            raise InvalidTrace("frequencies and s21 must be 1-D arrays of equal length")
        if not np.all(np.isfinite(f)) or not np.all(np.isfinite(z)):
            raise InvalidTrace("trace contains non-finite values")
        if f.size > 1 and not np.all(np.diff(f) > 0):
            raise InvalidTrace("frequencies must be strictly increasing")
        if f.size and f[0] <= 0:
            raise InvalidTrace("frequencies must be positive")
        if self.applied_power is not None and not self.applied_power > 0:
            raise InvalidTrace("applied_power must be > 0 W")
        if self.temperature is not None and not self.temperature > 0:
            raise InvalidTrace("temperature must be > 0 K")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "s21", z)

    def __len__(self):
        return self.frequencies.size

    @property
    def points(self):
        return list(zip(self.frequencies.tolist(), self.s21.tolist()))

    def with_metadata(self, applied_power=None, temperature=None, label=None):
        return FrequencyTrace(
            self.frequencies,
            self.s21,
            applied_power=self.applied_power if applied_power is None else applied_power,
            temperature=self.temperature if temperature is None else temperature,
            label=self.label if label is None else label,
        )

    def check_fittable(self):
        if len(self) < MIN_TRACE_POINTS:
            raise InvalidTrace(
                f"trace '{self.label}' has {len(self)} points; at least {MIN_TRACE_POINTS} are needed"
            )


@dataclass(frozen=True)
class BackgroundModel:
    """Environment factor ``a * exp(i*alpha) * exp(-2*pi*i*f*tau)``."""

    a: float = 1.0
    alpha: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("background amplitude must be > 0")
        object.__setattr__(self, "alpha", wrap_angle(self.alpha))

    def evaluate(self, f):
        f = np.asarray(f, dtype=float)
        return self.a * np.exp(1j * (self.alpha - 2 * np.pi * f * self.tau))


@dataclass(frozen=True)
class ResonanceParams:
    f_r: float
    Q_l: float
    Qc_mag: float
    phi: float = 0.0

    def __post_init__(self):
        if not (self.f_r > 0 and self.Q_l > 0 and self.Qc_mag > 0):
            raise ValueError("f_r, Q_l and Qc_mag must all be positive")
        if not abs(self.phi) < math.pi / 2:
            raise ValueError("|phi| must be below pi/2")

    @property
    def linewidth(self):
        return self.f_r / self.Q_l

    @property
    def diameter(self):
        return self.Q_l / self.Qc_mag


@dataclass(frozen=True)
class TLSModelParams:
    """Saturable TLS loss law parameters at drive frequency ``f`` and bath ``T``.

    ``F_delta0`` is the filling-factor-weighted TLS loss; it is never split
    into its two factors.
    """

    F_delta0: float
    delta_other: float
    n_c: float
    beta: float = 1.0
    f: float = 5e9
    T: float = 0.01

    def __post_init__(self):
        if self.F_delta0 < 0 or self.delta_other < 0:
            raise ValueError("loss terms must be non-negative")
        if not self.n_c > 0:
            raise ValueError("n_c must be > 0")
        if not 0 < self.beta <= 2:
            raise ValueError("beta must lie in (0, 2]")
        if not self.f > 0 or self.T < 0:
            raise ValueError("f must be > 0 and T >= 0")


@dataclass(frozen=True)
class PowerSweepPoint:
    photon_number: float
    delta_i: float
    sigma: float = 0.0

    def __post_init__(self):
        if not self.photon_number > 0:
            raise ValueError("photon_number must be > 0")
        if not self.delta_i > 0:
            raise ValueError("delta_i must be > 0")
        if not self.sigma >= 0:
            raise ValueError("sigma must be >= 0")


def s21_forward(f, res: ResonanceParams, bg: BackgroundModel = BackgroundModel()):
    """Complex notch transmission at frequency ``f`` (scalar or array, Hz)."""
    f = np.asarray(f, dtype=float)
    denom = 1 + 2j * res.Q_l * (f / res.f_r - 1)
    core = 1 - (res.Q_l / res.Qc_mag) * np.exp(1j * res.phi) / denom
    out = bg.evaluate(f) * core
    if out.ndim == 0:
        return complex(out)
    return out


def internal_loss(res: ResonanceParams):
    """Return ``(delta_i, Q_i)`` with the asymmetry-corrected coupling term.

    Raises NonPhysicalFit when delta_i <= 0.
    """
    delta_i = 1.0 / res.Q_l - math.cos(res.phi) / res.Qc_mag
    if not delta_i > 0:
        raise NonPhysicalFit(f"internal loss {delta_i:.3e} is not positive")
    return delta_i, 1.0 / delta_i


def thermal_factor(f, T):
    """tanh(h f / (2 k_B T)); equals 1 at T = 0."""
    f = np.asarray(f, dtype=float)
    T = np.asarray(T, dtype=float)
    with np.errstate(divide="ignore"):
        arg = np.where(T > 0, constants.h * f / (2 * constants.k_B * np.where(T > 0, T, 1.0)), np.inf)
    out = np.tanh(arg)
    if out.ndim == 0:
        return float(out)
    return out


def tls_loss(n, p: TLSModelParams):
    """Intrinsic loss at mean photon number ``n``.

    delta(n) = F_delta0 * tanh(hf/2k_BT) * (1 + n/n_c)^(-beta/2) + delta_other
    """
    n = np.asarray(n, dtype=float)
    if np.any(n < 0):
        raise ValueError("photon number must be >= 0")
    sat = (1 + n / p.n_c) ** (-p.beta / 2)
    out = p.F_delta0 * thermal_factor(p.f, p.T) * sat + p.delta_other
    if out.ndim == 0:
        return float(out)
    return out


def photon_number(P_feed, f_r, Q_l, Qc_mag):
    """Mean intracavity photon number for a notch resonator.

    Convention: <n> = 2 P Q_l^2 / (|Q_c| hbar omega_r^2). Every report that
    carries photon numbers uses this convention.
    """
    omega = 2 * np.pi * np.asarray(f_r, dtype=float)
    out = 2 * np.asarray(P_feed, dtype=float) * np.asarray(Q_l, dtype=float) ** 2 / (
        np.asarray(Qc_mag, dtype=float) * constants.hbar * omega**2
    )
    if out.ndim == 0:
        return float(out)
    return out


def feed_power_for_photon_number(n, f_r, Q_l, Qc_mag):
    """Inverse of :func:`photon_number`: feedline power (W) giving ``n`` photons."""
    omega = 2 * np.pi * f_r
    return n * Qc_mag * constants.hbar * omega**2 / (2 * Q_l**2)


def resonance_frequency(L, C_L, C_C):
    """f_r = 1 / (2 pi sqrt(L (C_C + C_L)))."""
    if not (L > 0 and C_L >= 0 and C_C > 0):
        raise ValueError("need L > 0, C_L >= 0, C_C > 0")
    return 1.0 / (2 * math.pi * math.sqrt(L * (C_C + C_L)))


def dbm_to_watt(p_dbm):
    out = 10.0 ** ((np.asarray(p_dbm, dtype=float) - 30.0) / 10.0)
    return float(out) if out.ndim == 0 else out


def watt_to_dbm(p_w):
    out = 10.0 * np.log10(np.asarray(p_w, dtype=float)) + 30.0
    return float(out) if out.ndim == 0 else out


PHOTON_NUMBER_CONVENTION = "<n> = 2 P Q_l^2 / (|Q_c| hbar omega_r^2) (notch geometry)"
