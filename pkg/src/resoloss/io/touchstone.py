"""Touchstone v1 two-port (.s2p) reader/writer, S-parameters only."""
from __future__ import annotations

import math
from typing import List, Optional

import numpy as np

from ..exceptions import MalformedOptionLine, RowArityError, UnsupportedFormat
from ..model import FrequencyTrace

FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
DATA_FORMATS = ("RI", "MA", "DB")
_OTHER_PARAMETERS = ("Y", "Z", "H", "G")


def _parse_options(tokens, line_no):
    opts = {"unit": "GHZ", "parameter": "S", "format": "MA", "reference": 50.0}
    it = iter(tokens)
    for tok in it:
        t = tok.upper()
        if t in FREQ_UNITS:
            opts["unit"] = t
        elif t == "S":
            opts["parameter"] = "S"
        elif t in _OTHER_PARAMETERS:
            raise UnsupportedFormat(f"{t}-parameters are not supported; only S", line_no)
        elif t in DATA_FORMATS:
            opts["format"] = t
        elif t == "R":
            try:
                opts["reference"] = float(next(it))
            except (StopIteration, ValueError):
                raise MalformedOptionLine("'R' must be followed by a reference impedance", line_no) from None
        else:
            raise MalformedOptionLine(f"unrecognised option token {tok!r}", line_no)
    return opts


def _to_complex(x, y, fmt):
    if fmt == "RI":
        return complex(x, y)
    mag = 10.0 ** (x / 20.0) if fmt == "DB" else x
    ang = math.radians(y)
    return complex(mag * math.cos(ang), mag * math.sin(ang))


def parse_touchstone(text: str, ports: Optional[int] = None, label: str = "") -> List[FrequencyTrace]:
    """Extract S21 from a two-port Touchstone v1 document.

    Returns a one-element list (the format holds a single sweep). Power and
    temperature are left unset; supply them from a manifest or CLI flags.
    ``ports`` may carry the count implied by the file extension.
    """
    if ports is not None and ports != 2:
        raise UnsupportedFormat(f"{ports}-port data is not supported; only 2-port")
    opts = None
    freqs, s21 = [], []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if opts is None:
                opts = _parse_options(line[1:].split(), line_no)
            continue  # later option lines are ignored, as in the v1 standard
        if line.startswith("["):
            raise UnsupportedFormat("Touchstone v2 keywords are not supported", line_no)
        if opts is None:
            raise MalformedOptionLine("data row before the '#' option line", line_no)
        tokens = line.split()
        if not freqs and len(tokens) == 3:
            raise UnsupportedFormat("row has one-port arity (3 numbers); only 2-port is supported", line_no)
        if len(tokens) != 9:
            raise RowArityError(f"expected 9 numbers, found {len(tokens)}", line_no)
        try:
            values = [float(t) for t in tokens]
        except ValueError:
            raise RowArityError(f"non-numeric value in {line!r}", line_no) from None
        freqs.append(values[0] * FREQ_UNITS[opts["unit"]])
        s21.append(_to_complex(values[3], values[4], opts["format"]))
    if opts is None:
        raise MalformedOptionLine("missing '#' option line")
    return [FrequencyTrace(np.array(freqs), np.array(s21, dtype=complex), label=label)]


def _encode(z, fmt):
    if fmt == "RI":
        return z.real, z.imag
    mag = abs(z)
    ang = math.degrees(math.atan2(z.imag, z.real))
    if fmt == "MA":
        return mag, ang
    return (20.0 * math.log10(mag) if mag > 0 else -999.0), ang


def write_touchstone(trace: FrequencyTrace, fmt: str = "RI", unit: str = "HZ", reference: float = 50.0) -> str:
    """Serialise a trace as a notch two-port: S21 = S12, S11 = S22 = S21 - 1."""
    fmt = fmt.upper()
    unit = unit.upper()
    if fmt not in DATA_FORMATS or unit not in FREQ_UNITS:
        raise ValueError("unsupported format or frequency unit")
    scale = FREQ_UNITS[unit]
    lines = ["! notch resonator transmission", f"# {unit} S {fmt} R {reference:g}"]
    for f, z in zip(trace.frequencies, trace.s21):
        z = complex(z)
        refl = z - 1.0
        cols = [f / scale, *_encode(refl, fmt), *_encode(z, fmt), *_encode(z, fmt), *_encode(refl, fmt)]
        lines.append(" ".join(repr(float(c)) for c in cols))
    return "\n".join(lines) + "\n"
