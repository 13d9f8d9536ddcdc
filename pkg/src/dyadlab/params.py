"""Model parameters shared across the package."""

from __future__ import annotations

import math
from dataclasses import dataclass


class UnsupportedConfigurationError(ValueError):
    """Raised when a routine is asked for something outside its domain."""


class FitFailureError(RuntimeError):
    """Not enough usable data for a least-squares fit."""


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the dyadic shell model.

    lam is the shell spacing ratio (lam > 1), beta the backscatter
    coefficient (beta >= 0), forcing the constant injection into shell 0,
    and shells, when set, the number of retained shell amplitudes
    a_0 .. a_{shells-1} in a truncated system.
    """

    lam: float = 2.0
    beta: float = 0.0
    forcing: float = 0.0
    shells: int | None = None

    def __post_init__(self) -> None:
        if not (self.lam > 1.0) or not math.isfinite(self.lam):
            raise ValueError(f"lam must be a finite number > 1, got {self.lam}")
        if not (self.beta >= 0.0) or not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if not (self.forcing >= 0.0) or not math.isfinite(self.forcing):
            raise ValueError(f"forcing must be finite and >= 0, got {self.forcing}")
        if self.shells is not None:
            if not isinstance(self.shells, int) or isinstance(self.shells, bool):
                raise ValueError(f"shells must be an int or None, got {self.shells!r}")
            if self.shells < 2:
                raise ValueError(f"need at least 2 shells, got {self.shells}")

    @property
    def log_lam(self) -> float:
        return math.log(self.lam)
