"""Thresholding point estimators for the Gaussian location model.

Three estimators of the location from the sample mean `ybar`, all sharing
one threshold `eta`:

* hard:  keep `ybar` when |ybar| > eta, else 0,
* soft:  shrink toward 0 by eta (the lasso solution in this model),
* scad:  soft near 0, identity far out, linear blend on (2*eta, a*eta].

All three return exactly 0 iff |ybar| <= eta, which is what makes their
model-selection behavior identical.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EstimatorKind",
    "TuningPlan",
    "estimate",
    "penalized_objective",
    "zero_event_threshold",
]

DEFAULT_SCAD_A = 3.7


class EstimatorKind(enum.Enum):
    HARD = "hard"
    SOFT = "soft"
    SCAD = "scad"

    @classmethod
    def parse(cls, name: str) -> "EstimatorKind":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown estimator kind {name!r}; expected hard, soft, or scad") from None


@dataclass(frozen=True)
class TuningPlan:
    """User-set knobs: threshold eta > 0 and scad shape a > 2."""

    eta: float
    scad_a: float = DEFAULT_SCAD_A

    def __post_init__(self):
        if not (np.isfinite(self.eta) and self.eta > 0.0):
            raise ValueError(f"invalid tuning: eta > 0 required (got {self.eta})")
        if not (np.isfinite(self.scad_a) and self.scad_a > 2.0):
            raise ValueError(f"invalid tuning: scad_a > 2 required (got {self.scad_a})")


def estimate(kind: EstimatorKind, ybar, tuning: TuningPlan):
    """Evaluate the estimator at sample mean `ybar` (scalar or array).

    Boundary convention: |ybar| == eta maps to 0 for every kind, and the
    scad branch intervals are (-inf, 2*eta], (2*eta, a*eta], (a*eta, inf).
    """
    y = np.asarray(ybar, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("ybar must be finite")
    eta = tuning.eta
    if kind is EstimatorKind.HARD:
        out = np.where(np.abs(y) > eta, y, 0.0)
    elif kind is EstimatorKind.SOFT:
        out = np.sign(y) * np.maximum(np.abs(y) - eta, 0.0)
    elif kind is EstimatorKind.SCAD:
        a = tuning.scad_a
        soft = np.sign(y) * np.maximum(np.abs(y) - eta, 0.0)
        blend = ((a - 1.0) * y - np.sign(y) * a * eta) / (a - 2.0)
        out = np.where(np.abs(y) <= 2.0 * eta, soft, np.where(np.abs(y) <= a * eta, blend, y))
    else:
        raise ValueError(f"unknown estimator kind {kind!r}")
    if y.ndim == 0:
        return float(out)
    return out


def penalized_objective(kind: EstimatorKind, theta: float, ybar: float, n: int, tuning: TuningPlan) -> float:
    """Penalized least-squares objective in sufficient-statistic form.

    The residual sum of squares enters as n*(ybar - theta)^2; the additive
    constant independent of theta is dropped.  The scad penalty has no
    usable closed form here, so requesting it raises: the scad estimator is
    checked against its explicit solution formula only.
    """
    theta = float(theta)
    ybar = float(ybar)
    if not (np.isfinite(theta) and np.isfinite(ybar)):
        raise ValueError("theta and ybar must be finite")
    if n < 1:
        raise ValueError("n must be a positive integer")
    fit = n * (ybar - theta) ** 2
    eta = tuning.eta
    if kind is EstimatorKind.HARD:
        shortfall = (abs(theta) - eta) ** 2 if abs(theta) < eta else 0.0
        return fit + n * (eta**2 - shortfall)
    if kind is EstimatorKind.SOFT:
        return fit + 2.0 * n * eta * abs(theta)
    if kind is EstimatorKind.SCAD:
        raise ValueError("scad objective unavailable; argmin verified against closed form only")
    raise ValueError(f"unknown estimator kind {kind!r}")


def zero_event_threshold(tuning: TuningPlan) -> float:
    """Radius of the common zero set: estimate(kind, y) == 0 iff |y| <= eta."""
    return tuning.eta
