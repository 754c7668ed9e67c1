import math

import pytest
import scipy.constants as sc
from hypothesis import given
from hypothesis import strategies as st

from resoloss.design import (
    band_grid,
    design_report,
    misattribution_error,
    participation,
    participation_for_misattribution,
    ppc_geometry,
    required_capacitance,
)
from resoloss.exceptions import EmptyBand, Unreachable
from resoloss.model import resonance_frequency


def test_required_capacitance_example():
    C_C = required_capacitance(1e-9, 10e-15, 5e9)
    oracle = 1 / (1e-9 * (2 * math.pi * 5e9) ** 2) - 10e-15
    assert C_C == pytest.approx(oracle, rel=1e-14)
    assert C_C == pytest.approx(1.0032e-12, abs=5e-17)
    assert participation(C_C, 10e-15) == pytest.approx(0.9901, abs=5e-5)
    assert resonance_frequency(1e-9, 10e-15, C_C) == pytest.approx(5e9, rel=1e-12)


def test_unreachable():
    with pytest.raises(Unreachable):
        required_capacitance(1e-9, 2e-12, 5e9)


def test_geometry():
    area, radius = ppc_geometry(1e-12, 20e-9, 9.0)
    assert area == pytest.approx(1e-12 * 20e-9 / (sc.epsilon_0 * 9.0), rel=1e-9)
    assert radius == pytest.approx(math.sqrt(area / math.pi), rel=1e-15)


@pytest.mark.parametrize("d, area_um2", [(58.3e-9, 681.0), (13.5e-9, 157.7)])
def test_geometry_examples(d, area_um2):
    area, radius = ppc_geometry(1.0132e-12, d, 9.8)
    oracle = 1.0132e-12 * d / (sc.epsilon_0 * 9.8)
    assert area == pytest.approx(oracle, rel=1e-9)
    assert area * 1e12 == pytest.approx(area_um2, rel=2e-3)
    if d == 58.3e-9:
        assert radius * 1e6 == pytest.approx(14.7, abs=0.05)


def test_lossless_inductor():
    assert misattribution_error(0.99, 0.0, 3.2e-5) == (0.0, 0.0)


def test_misattribution_values():
    add, rel = misattribution_error(0.995, 1e-4, 3.2e-5)
    assert add == pytest.approx(5e-7, rel=1e-9)
    assert rel == pytest.approx(0.015625, rel=1e-9)
    _, rel99 = misattribution_error(0.99, 1e-4, 3.2e-5)
    assert rel99 == pytest.approx(0.03125, rel=1e-9)
    assert participation_for_misattribution(0.02, 1e-4, 3.2e-5) == pytest.approx(0.9936, rel=1e-12)


@given(st.floats(1e-10, 1e-8), st.floats(0, 1e-13), st.floats(1e9, 1e10))
def test_design_round_trip(L, C_L, f):
    try:
        C_C = required_capacitance(L, C_L, f)
    except Unreachable:
        assert C_L >= 1 / (L * (2 * math.pi * f) ** 2)
        return
    assert resonance_frequency(L, C_L, C_C) == pytest.approx(f, rel=1e-12)
    assert 0 < participation(C_C, C_L) <= 1


def test_report_over_band():
    rep = design_report(1e-9, 10e-15, 20e-9, band=(4e9, 8e9), p_min=0.99)
    assert len(rep.designs) == 9
    feasible = [d.f_target for d in rep.designs if d.feasible]
    # participation drops below 0.99 just above 5 GHz for this inductor
    assert feasible == [4e9, 4.5e9, 5e9]
    assert rep.verdict == "partial"
    five = rep.designs[2]
    assert five.C_C == pytest.approx(1.0032e-12, abs=5e-17)
    assert five.participation == pytest.approx(0.9901, abs=5e-5)
    assert five.misattribution_relative == pytest.approx(0.0309, abs=5e-4)
    assert rep.p_for_ceiling == pytest.approx(0.9936, rel=1e-12)
    for d in rep.designs:
        assert d.check()


def test_single_frequency_band():
    rep = design_report(1e-9, 10e-15, 20e-9, band=(5e9, 5e9))
    assert len(rep.designs) == 1
    assert rep.verdict == "feasible"


def test_misattribution_ceiling_filters():
    rep = design_report(1e-9, 10e-15, 20e-9, band=(3e9, 5e9), max_misattribution=0.02, grid_points=5)
    for d in rep.designs:
        assert d.feasible == (d.participation >= 0.99 and d.misattribution_relative <= 0.02)


def test_empty_band():
    with pytest.raises(EmptyBand) as info:
        design_report(1e-9, 1e-12, 20e-9, band=(4e9, 8e9))
    rep = info.value.report
    assert rep.verdict == "infeasible"
    assert max(d.participation for d in rep.designs if not math.isnan(d.participation)) <= 0.61


def test_band_validation():
    with pytest.raises(ValueError):
        band_grid((8e9, 4e9))
