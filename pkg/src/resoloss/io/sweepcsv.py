"""Power-sweep CSV files and the campaign manifest."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import List, Optional

from ..exceptions import InputError, MissingHeader, NonPositiveValue, RowArityError
from ..model import PowerSweepPoint, dbm_to_watt, photon_number

PHOTON_HEADER = ("photon_number", "delta_i", "sigma")
POWER_HEADER = ("power_dbm", "delta_i", "sigma")
MANIFEST_HEADER = ("file", "label", "power_dbm", "temperature_k")


def _rows(text):
    """Yield (line_number, fields) for non-blank, non-comment CSV rows."""
    reader = csv.reader(io.StringIO(text))
    for fields in reader:
        line_no = reader.line_num
        if not fields or all(not f.strip() for f in fields) or fields[0].lstrip().startswith("#"):
            continue
        yield line_no, [f.strip() for f in fields]


def _float(value, line_no, column):
    try:
        x = float(value)
    except ValueError:
        raise NonPositiveValue(f"column {column!r}: {value!r} is not a number", line_no) from None
    if not math.isfinite(x):
        raise NonPositiveValue(f"column {column!r}: value must be finite", line_no)
    return x


def parse_sweep_csv(text: str, f_r: Optional[float] = None, Q_l: Optional[float] = None,
                    Qc_mag: Optional[float] = None) -> List[PowerSweepPoint]:
    """Read a loss-vs-drive table and return points sorted by photon number.

    Rows keyed by ``power_dbm`` are converted to photon numbers with
    :func:`~resoloss.model.photon_number`; that needs ``f_r``, ``Q_l`` and
    ``Qc_mag`` of the device.
    """
    rows = _rows(text)
    try:
        line_no, header = next(rows)
    except StopIteration:
        raise MissingHeader("empty sweep file", 1) from None
    header = tuple(h.lower() for h in header)
    if header not in (PHOTON_HEADER, POWER_HEADER):
        raise MissingHeader(
            f"expected header '{','.join(PHOTON_HEADER)}' or '{','.join(POWER_HEADER)}', got '{','.join(header)}'",
            line_no,
        )
    dbm = header == POWER_HEADER
    if dbm and None in (f_r, Q_l, Qc_mag):
        raise InputError("power_dbm sweeps need f_r, Q_l and Qc_mag to convert to photon number")

    points = []
    for line_no, fields in rows:
        if len(fields) != 3:
            raise RowArityError(f"expected 3 columns, found {len(fields)}", line_no)
        x = _float(fields[0], line_no, header[0])
        delta = _float(fields[1], line_no, "delta_i")
        sigma = _float(fields[2], line_no, "sigma")
        n = photon_number(dbm_to_watt(x), f_r, Q_l, Qc_mag) if dbm else x
        if not n > 0:
            raise NonPositiveValue(f"photon number must be > 0 (got {n!r})", line_no)
        if not delta > 0:
            raise NonPositiveValue(f"delta_i must be > 0 (got {delta!r})", line_no)
        if sigma < 0:
            raise NonPositiveValue(f"sigma must be >= 0 (got {sigma!r})", line_no)
        points.append(PowerSweepPoint(n, delta, sigma))
    return sorted(points, key=lambda p: p.photon_number)


def write_sweep_csv(points) -> str:
    out = [",".join(PHOTON_HEADER)]
    for p in points:
        out.append(f"{p.photon_number!r},{p.delta_i!r},{p.sigma!r}")
    return "\n".join(out) + "\n"


def write_temperature_csv(rows) -> str:
    out = ["temperature_k,delta_i"]
    out.extend(f"{float(t)!r},{float(d)!r}" for t, d in rows)
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class ManifestEntry:
    file: str
    label: str
    power_dbm: float
    temperature_k: float


def parse_manifest(text: str) -> List[ManifestEntry]:
    """Read ``file,label,power_dbm,temperature_k`` rows."""
    rows = _rows(text)
    try:
        line_no, header = next(rows)
    except StopIteration:
        raise MissingHeader("empty manifest", 1) from None
    if tuple(h.lower() for h in header) != MANIFEST_HEADER:
        raise MissingHeader(f"manifest header must be '{','.join(MANIFEST_HEADER)}'", line_no)
    entries = []
    for line_no, fields in rows:
        if len(fields) != 4:
            raise RowArityError(f"expected 4 columns, found {len(fields)}", line_no)
        temp = _float(fields[3], line_no, "temperature_k")
        if not temp > 0:
            raise NonPositiveValue("temperature_k must be > 0", line_no)
        if not fields[0] or not fields[1]:
            raise RowArityError("file and label must be non-empty", line_no)
        entries.append(ManifestEntry(fields[0], fields[1], _float(fields[2], line_no, "power_dbm"), temp))
    return entries
