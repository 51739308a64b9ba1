from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PairingEstimate:
    """A value with its Monte-Carlo standard error (zero for deterministic evaluations)."""

    value: float
    std_error: float = 0.0
    n_samples: int = 0
    resampled: int = 0

    @classmethod
    def from_samples(cls, x, resampled: int = 0) -> "PairingEstimate":
        x = np.asarray(x, dtype=float)
        n = len(x)
        se = float(np.std(x, ddof=1) / np.sqrt(n)) if n > 1 else float("inf")
        return cls(float(np.mean(x)), se, n, resampled)

    def to_json(self) -> dict:
        return {"value": self.value, "std_error": self.std_error, "n_samples": self.n_samples,
                "resampled": self.resampled}
