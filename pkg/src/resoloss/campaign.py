"""Batch processing: many traces -> per-resonator power sweeps -> TLS fits.

Fits run in a bounded thread pool; results are gathered on the calling thread
and keyed by (label, power, file), so the report does not depend on the
order in which files are listed or finish.
"""
from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from .config import FitConfig
from .exceptions import FitError, InputError, UnidentifiableSaturation
from .fitting import fit_resonance
from .io.report import (
    Report,
    failed_resonance_record,
    failed_tls_record,
    resonance_record,
    tls_record,
)
from .io.sweepcsv import ManifestEntry, parse_manifest
from .io.touchstone import parse_touchstone
from .model import PowerSweepPoint, dbm_to_watt, photon_number
from .tls import fit_power_sweep
from .uncertainty import propagate_uncertainty

DEFAULT_MANIFEST = "manifest.csv"
DEFAULT_WORKERS = 4


@dataclass
class CampaignResult:
    report: Report
    n_traces: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def all_converged(self):
        return all(r["converged"] for r in self.report.records)


def load_trace(path: Path, entry: ManifestEntry):
    text = path.read_text(encoding="utf-8")
    (trace,) = parse_touchstone(text, label=entry.label)
    return trace.with_metadata(
        applied_power=dbm_to_watt(entry.power_dbm), temperature=entry.temperature_k, label=entry.label
    )


def _fit_one(entry, trace, cfg):
    try:
        fit = fit_resonance(trace, cfg)
    except FitError as exc:
        return entry, trace, None, f"{type(exc).__name__}: {exc}"
    return entry, trace, fit, None


def run_campaign(
    directory,
    manifest: Optional[str] = None,
    cfg: Optional[FitConfig] = None,
    workers: int = DEFAULT_WORKERS,
) -> CampaignResult:
    """Fit every trace listed in the manifest and extract TLS parameters per label.

    Input problems (bad manifest, unreadable or malformed traces) raise
    :class:`InputError` before any fitting starts. Individual fit failures
    are recorded in the report with a non-``ok`` status.
    """
    cfg = cfg or FitConfig()
    if workers < 1:
        raise InputError("workers must be >= 1")
    root = Path(directory)
    manifest_path = root / (manifest or DEFAULT_MANIFEST)
    if not manifest_path.is_file():
        raise InputError(f"manifest {manifest_path} not found")
    entries = parse_manifest(manifest_path.read_text(encoding="utf-8"))

    traces = []
    for entry in entries:
        path = root / entry.file
        if not path.is_file():
            raise InputError(f"trace file {path} listed in the manifest does not exist")
        try:
            traces.append((entry, load_trace(path, entry)))
        except InputError as exc:
            raise type(exc)(f"{entry.file}: {exc}") from exc

    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(lambda et: _fit_one(et[0], et[1], cfg), traces))
    outcomes.sort(key=lambda o: (o[0].label, o[0].power_dbm, o[0].file))

    records, failures = [], []
    by_label = {}
    for entry, trace, fit, error in outcomes:
        if fit is None:
            records.append(failed_resonance_record(entry.label, entry.file, error, trace))
            failures.append(f"{entry.file}: {error}")
            continue
        p = fit.params
        n = photon_number(trace.applied_power, p.f_r, p.Q_l, p.Qc_mag)
        records.append(resonance_record(fit, trace, source=entry.file, photon_number=n))
        if not fit.converged:
            failures.append(f"{entry.file}: not converged ({fit.reason})")
            continue
        by_label.setdefault(entry.label, []).append((fit, trace, n))

    labels = sorted({e.label for e, _ in traces})
    for label in labels:
        records.append(_sweep_record(label, by_label.get(label, []), cfg, failures))
    return CampaignResult(Report(records), n_traces=len(traces), failures=failures)


def _sweep_record(label, fits, cfg, failures):
    if not fits:
        failures.append(f"{label}: no converged resonance fits")
        return failed_tls_record(label, "no converged resonance fits", n_points=0)
    f_r = statistics.median(fit.params.f_r for fit, _, _ in fits)
    T = statistics.median(trace.temperature for _, trace, _ in fits)
    sweep = []
    for fit, _, n in fits:
        s = propagate_uncertainty(fit)["delta_i"]
        sweep.append(PowerSweepPoint(n, fit.delta_i, s if math.isfinite(s) else 0.0))
    try:
        tls = fit_power_sweep(sweep, f_r, T, cfg, label=label)
    except UnidentifiableSaturation as exc:
        failures.append(f"{label}: {exc}")
        return failed_tls_record(label, "unidentifiable_saturation", f_r, T, len(sweep), exc.n_c_lower_bound)
    except (InputError, FitError) as exc:
        failures.append(f"{label}: {exc}")
        return failed_tls_record(label, f"{type(exc).__name__}: {exc}", f_r, T, len(sweep))
    if not tls.converged:
        failures.append(f"{label}: TLS fit not converged")
    return tls_record(tls, n_points=len(sweep))
