"""Bundled benchmark of dielectric loss measurements in parallel-plate geometries.

Each numeric cell keeps its source text (so a dump reproduces the bundled
file exactly) alongside a parsed :class:`Quantity`. Column scale factors:
``delta_LP`` and ``F_delta0`` are in units of 1e-5, ``Q_max`` in 1e5 and
``area`` in 1e5 um^2.
"""
from __future__ import annotations

import csv
import io
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources
from typing import List, Optional

COLUMNS = (
    "material", "reference", "deposition", "crystallinity", "geometry",
    "delta_LP", "F_delta0", "Q_max", "area",
)
NUMERIC_COLUMNS = ("delta_LP", "F_delta0", "Q_max", "area")
COLUMN_SCALE = {"delta_LP": 1e-5, "F_delta0": 1e-5, "Q_max": 1e5, "area": 1e5}
THIS_WORK = "This work"

_NUM = r"\d+(?:\.\d+)?"
_CELL = re.compile(
    rf"^(?P<fill>F × )?(?P<paren>\()?(?P<le>≤ )?(?P<lo>{_NUM})(?:–(?P<hi>{_NUM}))?(?: ± (?P<unc>{_NUM}))?(?(paren)\))(?P<star>\*)?$"
)


@dataclass(frozen=True)
class Quantity:
    """One table cell.

    ``low``/``high`` are in the column's display units (equal for a single
    value). ``upper_bound`` marks "≤" entries, ``times_filling`` marks values
    quoted as a multiple of an unknown filling factor F, ``estimated`` is the
    asterisk and ``incomparable`` the dagger.
    """

    text: str
    low: Optional[float] = None
    high: Optional[float] = None
    uncertainty: Optional[float] = None
    upper_bound: bool = False
    times_filling: bool = False
    estimated: bool = False
    incomparable: bool = False

    @property
    def present(self):
        return self.low is not None

    @property
    def is_range(self):
        return self.present and self.high != self.low

    @property
    def value(self):
        """Central value in display units (range midpoint)."""
        if not self.present:
            return None
        return 0.5 * (self.low + self.high)

    def __str__(self):
        return self.text


def parse_quantity(text: str) -> Quantity:
    text = text.strip()
    if text == "":
        return Quantity("")
    if text == "†":
        return Quantity(text, incomparable=True)
    m = _CELL.match(text)
    if not m:
        raise ValueError(f"unparseable catalog cell {text!r}")
    low = float(m["lo"])
    high = float(m["hi"]) if m["hi"] else low
    if high < low:
        raise ValueError(f"range {text!r} has low > high")
    if m["paren"] and not m["fill"]:
        raise ValueError(f"unexpected parentheses in {text!r}")
    return Quantity(
        text,
        low=low,
        high=high,
        uncertainty=float(m["unc"]) if m["unc"] else None,
        upper_bound=bool(m["le"]),
        times_filling=bool(m["fill"]),
        estimated=bool(m["star"]),
    )


@dataclass(frozen=True)
class CatalogEntry:
    material: str
    reference: str
    deposition: str
    crystallinity: str
    geometry: str
    delta_LP: Quantity
    F_delta0: Quantity
    Q_max: Quantity
    area: Quantity

    def __post_init__(self):
        if not (self.delta_LP.present or self.F_delta0.present or self.Q_max.present or self.incomparable_flag):
            raise ValueError(f"catalog row {self.material}/{self.reference} has no loss figure")

    @property
    def estimated_flag(self):
        return any(q.estimated for q in self._quantities())

    @property
    def incomparable_flag(self):
        return any(q.incomparable for q in self._quantities())

    @property
    def this_work(self):
        return self.reference == THIS_WORK

    def _quantities(self):
        return (self.delta_LP, self.F_delta0, self.Q_max, self.area)

    def absolute(self, column):
        """``(low, high)`` of a numeric column in absolute units, or None."""
        q = getattr(self, column)
        if not q.present:
            return None
        s = COLUMN_SCALE[column]
        return q.low * s, q.high * s

    def cells(self):
        return [getattr(self, c) if c not in NUMERIC_COLUMNS else getattr(self, c).text for c in COLUMNS]


def load_catalog_text() -> str:
    return resources.files("resoloss.data").joinpath("table1.csv").read_text(encoding="utf-8")


def parse_catalog(text: str) -> List[CatalogEntry]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != COLUMNS:
        raise ValueError("catalog header does not match the expected columns")
    entries = []
    for row in reader:
        if not row:
            continue
        fields = dict(zip(COLUMNS, row))
        for c in NUMERIC_COLUMNS:
            fields[c] = parse_quantity(fields[c])
        entries.append(CatalogEntry(**fields))
    return entries


def load_catalog() -> List[CatalogEntry]:
    return parse_catalog(load_catalog_text())


def dump_catalog(entries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for e in entries:
        writer.writerow(e.cells())
    return buf.getvalue()


_SUBSCRIPTS = str.maketrans("₀₁₂₃₄₅₆₇₈₉ₓ", "0123456789x")


def fold(text: str) -> str:
    """Loose matching key: subscripts to ASCII, 'gamma' to γ, no spaces/underscores, casefolded."""
    t = unicodedata.normalize("NFC", text).translate(_SUBSCRIPTS)
    t = re.sub(r"(?i)gamma", "γ", t)
    return re.sub(r"[\s_]", "", t).casefold()


def catalog_query(
    material: Optional[str] = None,
    reference: Optional[str] = None,
    crystallinity: Optional[str] = None,
    geometry: Optional[str] = None,
    deposition: Optional[str] = None,
    max_delta_LP: Optional[float] = None,
    include_incomparable: bool = True,
    entries: Optional[List[CatalogEntry]] = None,
) -> List[CatalogEntry]:
    """Conjunctive filter over the catalog, in table order.

    ``reference`` must match exactly (after folding); the other text filters
    are case-insensitive substring matches on :func:`fold`-ed
    strings (so ``"Al2O3"`` finds ``"γ-Al₂O₃"``). ``max_delta_LP`` is an
    absolute loss; a row passes only if its whole reported delta_LP range lies
    at or below it. Rows without a delta_LP value never pass that filter.
    """
    rows = load_catalog() if entries is None else entries
    text_filters = {
        "material": material,
        "crystallinity": crystallinity,
        "geometry": geometry,
        "deposition": deposition,
    }
    out = []
    for e in rows:
        if not include_incomparable and e.incomparable_flag:
            continue
        if reference is not None and fold(reference) != fold(e.reference):
            continue
        if any(v is not None and fold(v) not in fold(getattr(e, k)) for k, v in text_filters.items()):
            continue
        if max_delta_LP is not None:
            rng = e.absolute("delta_LP")
            if rng is None or e.delta_LP.times_filling or rng[1] > max_delta_LP:
                continue
        out.append(e)
    return out
