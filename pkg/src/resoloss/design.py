"""Inverse design of lumped-element resonators with parallel-plate capacitors.

Inductance ``L`` and shunt capacitance ``C_L`` come from an external
electromagnetic simulation; this module only composes closed-form relations
on top of them.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np

from . import constants
from .exceptions import EmptyBand, Unreachable
from .model import resonance_frequency

DEFAULT_EPS_R = 9.8  # placeholder permittivity for gamma-Al2O3; override per material
DEFAULT_GRID_POINTS = 9


def required_capacitance(L, C_L, f_target):
    """Parallel-plate capacitance that puts the resonance at ``f_target``."""
    if not (L > 0 and C_L >= 0 and f_target > 0):
        raise ValueError("need L > 0, C_L >= 0, f_target > 0")
    total = 1.0 / (L * (2 * math.pi * f_target) ** 2)
    C_C = total - C_L
    if not C_C > 0:
        raise Unreachable(
            f"shunt capacitance {C_L:.4g} F already exceeds the {total:.4g} F needed for {f_target:.4g} Hz"
        )
    return C_C


def ppc_geometry(C_C, d, eps_r=DEFAULT_EPS_R):
    """Plate area (m^2) and equivalent disc radius (m); fringing fields ignored."""
    if not (C_C > 0 and d > 0 and eps_r > 0):
        raise ValueError("C_C, d and eps_r must be positive")
    area = C_C * d / (constants.epsilon_0 * eps_r)
    return area, math.sqrt(area / math.pi)


def participation(C_C, C_L):
    if not (C_C > 0 and C_L >= 0):
        raise ValueError("need C_C > 0 and C_L >= 0")
    return C_C / (C_C + C_L)


def misattribution_error(p, inductor_loss_bound, delta_measured):
    """Loss from the shunt capacitance wrongly booked to the dielectric.

    Returns ``(additive, relative)`` with additive = (1 - p) * F_L tan(delta_L)
    and relative = additive / delta_measured.
    """
    if not 0 < p <= 1:
        raise ValueError("participation must lie in (0, 1]")
    if inductor_loss_bound < 0 or not delta_measured > 0:
        raise ValueError("need inductor_loss_bound >= 0 and delta_measured > 0")
    additive = (1.0 - p) * inductor_loss_bound
    return additive, additive / delta_measured


def participation_for_misattribution(max_relative, inductor_loss_bound, delta_measured):
    """Smallest participation that keeps the relative misattribution at or below ``max_relative``."""
    if inductor_loss_bound == 0:
        return 0.0
    return 1.0 - max_relative * delta_measured / inductor_loss_bound


@dataclass(frozen=True)
class LumpedDesign:
    L: float
    C_L: float
    C_C: float
    d: float
    eps_r: float
    area: float
    disc_radius: float
    participation: float
    f_r: float
    inductor_loss_bound: float
    misattribution_additive: float
    misattribution_relative: float
    feasible: bool = True
    note: str = ""
    f_target: float = math.nan

    def check(self, rtol=1e-12):
        """Re-derive the dependent fields and confirm they agree."""
        ok = (
            0 < self.participation <= 1
            and math.isclose(self.participation, self.C_C / (self.C_C + self.C_L), rel_tol=rtol)
            and math.isclose(self.f_r, resonance_frequency(self.L, self.C_L, self.C_C), rel_tol=rtol)
            and math.isclose(self.area, self.C_C * self.d / (constants.epsilon_0 * self.eps_r), rel_tol=rtol)
        )
        if not ok:
            raise AssertionError("LumpedDesign fields are inconsistent")
        return True

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class DesignReport:
    designs: List[LumpedDesign]
    p_min: float
    max_misattribution: Optional[float]
    delta_expected: float
    p_for_ceiling: float

    @property
    def feasible(self):
        return [d for d in self.designs if d.feasible]

    @property
    def verdict(self):
        n = len(self.feasible)
        if n == len(self.designs):
            return "feasible"
        return "partial" if n else "infeasible"


def band_grid(band, points=DEFAULT_GRID_POINTS):
    lo, hi = band
    if lo > hi or lo <= 0:
        raise ValueError("band must satisfy 0 < lower <= upper")
    if lo == hi:
        return np.array([lo], dtype=float)
    return np.linspace(lo, hi, points)


def design_report(
    L,
    C_L,
    d,
    eps_r=DEFAULT_EPS_R,
    band=(4e9, 8e9),
    p_min=0.99,
    loss_bound=1e-4,
    delta_expected=3.2e-5,
    max_misattribution=None,
    grid_points=DEFAULT_GRID_POINTS,
    ceiling_for_p=0.02,
):
    """Design one resonator per grid frequency across ``band``.

    A grid point is feasible when the capacitance is reachable, the
    participation is at least ``p_min`` and, if ``max_misattribution`` is
    given, the relative misattribution stays under it. Raises
    :class:`EmptyBand` (report attached) when nothing is feasible.
    ``p_for_ceiling`` is the participation needed to hold the relative
    misattribution to ``ceiling_for_p``.
    """
    if not 0 < p_min < 1:
        raise ValueError("p_min must lie in (0, 1)")
    designs = []
    for f_target in band_grid(band, grid_points):
        try:
            C_C = required_capacitance(L, C_L, f_target)
        except Unreachable as exc:
            designs.append(
                LumpedDesign(L, C_L, math.nan, d, eps_r, math.nan, math.nan, math.nan, float(f_target),
                             loss_bound, math.nan, math.nan, feasible=False, note=str(exc),
                             f_target=float(f_target))
            )
            continue
        area, radius = ppc_geometry(C_C, d, eps_r)
        p = participation(C_C, C_L)
        additive, relative = misattribution_error(p, loss_bound, delta_expected)
        notes = []
        if p < p_min:
            notes.append(f"participation {p:.4f} < p_min {p_min}")
        if max_misattribution is not None and relative > max_misattribution:
            notes.append(f"misattribution {relative:.2%} > {max_misattribution:.2%}")
        design = LumpedDesign(
            L=L, C_L=C_L, C_C=C_C, d=d, eps_r=eps_r, area=area, disc_radius=radius,
            participation=p, f_r=resonance_frequency(L, C_L, C_C), inductor_loss_bound=loss_bound,
            misattribution_additive=additive, misattribution_relative=relative,
            feasible=not notes, note="; ".join(notes), f_target=float(f_target),
        )
        design.check()
        designs.append(design)
    report = DesignReport(
        designs=designs,
        p_min=p_min,
        max_misattribution=max_misattribution,
        delta_expected=delta_expected,
        p_for_ceiling=participation_for_misattribution(ceiling_for_p, loss_bound, delta_expected),
    )
    if not report.feasible:
        raise EmptyBand("no frequency in the band yields a feasible design", report)
    return report
