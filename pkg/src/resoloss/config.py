from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class FitConfig:
    """Knobs shared by every fitting routine.

    ``gradient_tolerance`` bounds the largest cosine between the residual
    vector and any Jacobian column; ``step_tolerance`` bounds the scaled
    relative step. ``beta_mode`` is ``"fixed"`` (use ``beta``) or ``"free"``.
    """

    max_iterations: int = 200
    gradient_tolerance: float = 1e-10
    step_tolerance: float = 1e-12
    wing_fraction: float = 0.1
    beta_mode: str = "fixed"
    beta: float = 1.0
    weighting: str = "inverse_variance"
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.wing_fraction <= 0.25:
            raise ValueError("wing_fraction must be in (0, 0.25]")
        if not (self.gradient_tolerance > 0 and self.step_tolerance > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.beta_mode not in ("fixed", "free"):
            raise ValueError("beta_mode must be 'fixed' or 'free'")
        if not 0 < self.beta <= 2:
            raise ValueError("beta must lie in (0, 2]")
        if self.weighting not in ("inverse_variance", "uniform"):
            raise ValueError("weighting must be 'inverse_variance' or 'uniform'")

    def replace(self, **changes):
        return replace(self, **changes)

    def task_seed(self, label):
        """Per-task seed derived from (seed, label); stable across runs and platforms."""
        digest = hashlib.sha256(f"{self.seed}:{label}".encode()).digest()
        return int.from_bytes(digest[:8], "little")


def parse_beta_mode(text):
    """Parse ``"fixed:1"`` / ``"free"`` into ``(beta_mode, beta)``."""
    text = text.strip().lower()
    if text == "free":
        return "free", 1.0
    if text.startswith("fixed"):
        _, _, value = text.partition(":")
        return "fixed", float(value) if value else 1.0
    raise ValueError(f"unrecognised beta mode {text!r}; use 'fixed:<beta>' or 'free'")
