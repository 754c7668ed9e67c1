"""Seeded synthetic data with known ground truth.

Random numbers come from numpy's ``Generator`` on the PCG64 bit generator
(``numpy.random.PCG64``, numpy >= 2.0), seeded directly with the integer in
the :class:`NoiseModel`. Same seed, same numpy major version: bit-identical
output.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .exceptions import GridTooNarrow
from .model import (
    MIN_TRACE_POINTS,
    BackgroundModel,
    FrequencyTrace,
    PowerSweepPoint,
    ResonanceParams,
    TLSModelParams,
    s21_forward,
    tls_loss,
)

RNG_ALGORITHM = "numpy.random.PCG64"

NOISE_KINDS = ("none", "isotropic", "relative")


@dataclass(frozen=True)
class NoiseModel:
    """Additive or multiplicative Gaussian noise.

    ``isotropic``: circular complex Gaussian with RMS modulus ``sigma``
    (each quadrature carries ``sigma/sqrt(2)``); for real data, plain
    Gaussian with standard deviation ``sigma``.
    ``relative``: value * (1 + e) with e of RMS ``fraction``.
    """

    kind: str = "none"
    sigma: float = 0.0
    fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {NOISE_KINDS}")
        if self.sigma < 0 or self.fraction < 0:
            raise ValueError("noise scales must be >= 0")

    @classmethod
    def isotropic(cls, sigma, seed=0):
        return cls("isotropic", sigma=sigma, seed=seed)

    @classmethod
    def relative(cls, fraction, seed=0):
        return cls("relative", fraction=fraction, seed=seed)

    def with_seed(self, seed):
        return replace(self, seed=seed)

    def rng(self):
        return np.random.Generator(np.random.PCG64(self.seed))


def _complex_normal(rng, size):
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)


def synth_trace(
    res: ResonanceParams,
    bg: BackgroundModel,
    grid,
    noise: NoiseModel = NoiseModel(),
    power: Optional[float] = None,
    T: Optional[float] = None,
    label: str = "",
) -> FrequencyTrace:
    """Sample :func:`s21_forward` on a linear grid ``(f_start, f_stop, count)`` and add noise."""
    f_start, f_stop, count = grid
    count = int(count)
    span = f_stop - f_start
    if count < MIN_TRACE_POINTS:
        raise GridTooNarrow(f"grid has {count} points; need at least {MIN_TRACE_POINTS}")
    if span < 6 * res.linewidth:
        raise GridTooNarrow(f"span {span:.4g} Hz is under 6 linewidths ({6 * res.linewidth:.4g} Hz)")
    if abs(0.5 * (f_start + f_stop) - res.f_r) > 0.25 * span:
        raise GridTooNarrow("resonance is not within the middle half of the sweep")
    f = np.linspace(f_start, f_stop, count)
    z = s21_forward(f, res, bg)
    rng = noise.rng()
    if noise.kind == "isotropic" and noise.sigma > 0:
        z = z + noise.sigma * _complex_normal(rng, count)
    elif noise.kind == "relative" and noise.fraction > 0:
        z = z * (1.0 + noise.fraction * _complex_normal(rng, count))
    return FrequencyTrace(f, z, applied_power=power, temperature=T, label=label)


def linewidth_grid(res: ResonanceParams, half_span_linewidths=10.0, count=401):
    """Grid tuple centred on ``f_r`` spanning +-``half_span_linewidths`` linewidths."""
    half = half_span_linewidths * res.linewidth
    return (res.f_r - half, res.f_r + half, count)


def synth_power_sweep(p: TLSModelParams, n_grid, noise: NoiseModel = NoiseModel()):
    """Loss-vs-photon-number points from :func:`tls_loss` with optional noise.

    ``sigma`` on each point is the noise scale used for it (0 without noise).
    A noisy draw that lands at or below zero is reflected to keep the loss
    positive.
    """
    n = np.asarray(n_grid, dtype=float)
    if np.any(n <= 0) or np.any(np.diff(n) <= 0):
        raise ValueError("n_grid must be positive and increasing")
    clean = tls_loss(n, p)
    rng = noise.rng()
    if noise.kind == "isotropic" and noise.sigma > 0:
        sigma = np.full(n.size, noise.sigma)
        noisy = clean + noise.sigma * rng.standard_normal(n.size)
    elif noise.kind == "relative" and noise.fraction > 0:
        sigma = noise.fraction * clean
        noisy = clean * (1.0 + noise.fraction * rng.standard_normal(n.size))
    else:
        sigma = np.zeros(n.size)
        noisy = clean
    noisy = np.abs(noisy)
    return [PowerSweepPoint(float(a), float(b), float(s)) for a, b, s in zip(n, noisy, sigma)]


def synth_temperature_sweep(p: TLSModelParams, T_grid, n_fixed):
    """Ideal-model loss versus bath temperature at fixed photon number.

    Only the tanh thermal factor varies; the intermediate-temperature plateau
    seen in real LEPPC data is not part of this model and is not emulated.
    Returns a list of ``(T, delta_i)``.
    """
    T = np.asarray(T_grid, dtype=float)
    if np.any(T <= 0) or np.any(np.diff(T) <= 0):
        raise ValueError("T_grid must be positive and increasing")
    return [(float(t), float(tls_loss(n_fixed, replace(p, T=float(t))))) for t in T]
