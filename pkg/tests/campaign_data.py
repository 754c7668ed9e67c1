"""Builds a small synthetic measurement campaign on disk."""
from pathlib import Path

import numpy as np

from resoloss.io.touchstone import write_touchstone
from resoloss.model import BackgroundModel, ResonanceParams, TLSModelParams, dbm_to_watt, photon_number, tls_loss
from resoloss.synth import NoiseModel, linewidth_grid, synth_trace

DEVICES = {
    "resA": (TLSModelParams(2.8e-5, 3.7e-6, 100.0, 1.0, 5e9, 0.01), 1e5, 0.1),
    "resB": (TLSModelParams(3.5e-5, 1.6e-6, 100.0, 1.0, 5.2e9, 0.01), 2e5, -0.15),
}
POWERS_DBM = np.arange(-160.0, -70.0, 5.0)


def self_consistent_resonance(p, Qc, phi, dbm):
    """Resonance whose internal loss matches the TLS law at its own photon number."""
    P = dbm_to_watt(dbm)
    d = tls_loss(0.0, p)
    for _ in range(60):
        Q_l = 1.0 / (d + np.cos(phi) / Qc)
        d = float(tls_loss(photon_number(P, p.f, Q_l, Qc), p))
    return ResonanceParams(p.f, 1.0 / (d + np.cos(phi) / Qc), Qc, phi)


def build(directory, order=None, noise=0.005):
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    rows = []
    seed = 0
    for label, (p, Qc, phi) in DEVICES.items():
        for dbm in POWERS_DBM:
            res = self_consistent_resonance(p, Qc, phi, dbm)
            tr = synth_trace(res, BackgroundModel(0.9, 0.2, 2e-8), linewidth_grid(res, 8, 801),
                             NoiseModel.isotropic(noise * res.Q_l / Qc, seed))
            name = f"{label}_{int(-dbm):03d}.s2p"
            (root / name).write_text(write_touchstone(tr, fmt="MA", unit="GHZ"))
            rows.append(f"{name},{label},{float(dbm)!r},0.01")
            seed += 1
    if order is not None:
        rows = [rows[i] for i in order]
    (root / "manifest.csv").write_text("file,label,power_dbm,temperature_k\n" + "\n".join(rows) + "\n")
    return root
