"""Model-selection probabilities and their moving-parameter limits.

The estimators select the zero model exactly when the sample mean falls
inside [-eta, eta]; the probability of that event and its limit along
sequences (theta_n, eta_n) are fully described by four extended reals:

    e    = lim sqrt(n) * eta_n        (finite: conservative, inf: consistent)
    nu   = lim sqrt(n) * theta_n
    zeta = lim theta_n / eta_n
    r    = lim sqrt(n) * (eta_n - zeta * theta_n)        (|zeta| = 1), or
           lim sqrt(n) * (a*eta_n - sign(zeta)*theta_n)  (scad, |zeta| = a).

`RegimeSpec` carries exactly these, with infinities as exact states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .estimators import TuningPlan
from .finite_dist import ModelPoint, atom_weight
from .normal_kernel import ExtReal, NEG_INF, POS_INF, norm_cdf
from .report import ExperimentReport

__all__ = [
    "RegimeError",
    "RegimeSpec",
    "PowerTuningPath",
    "ThetaRule",
    "derive_regime",
    "selection_probability",
    "limit_selection_probability",
    "selection_convergence_table",
]


class RegimeError(ValueError):
    """An invalid or underdetermined moving-parameter regime."""


@dataclass(frozen=True)
class RegimeSpec:
    e: ExtReal
    nu: Optional[ExtReal] = None
    zeta: Optional[ExtReal] = None
    r: Optional[ExtReal] = None

    def __post_init__(self):
        for name in ("e", "nu", "zeta", "r"):
            v = getattr(self, name)
            if v is not None and not isinstance(v, ExtReal):
                object.__setattr__(self, name, ExtReal.of(v))
        if self.e.sign() < 0:
            raise RegimeError("e must lie in [0, +inf]")
        if self.consistent and self.zeta is not None and self.zeta.sign() != 0:
            forced = POS_INF if self.zeta.sign() > 0 else NEG_INF
            if self.nu is None:
                object.__setattr__(self, "nu", forced)
            elif self.nu != forced:
                raise RegimeError(
                    "with e = +inf and zeta nonzero, nu is forced to sign(zeta)*inf"
                )

    @property
    def consistent(self) -> bool:
        return self.e == POS_INF

    def require_nu(self) -> ExtReal:
        if self.nu is None:
            raise RegimeError("regime underdetermined: nu is required")
        return self.nu

    def require_zeta(self) -> ExtReal:
        if self.zeta is None:
            raise RegimeError("regime underdetermined: zeta is required")
        return self.zeta

    def require_r(self) -> ExtReal:
        if self.r is None:
            raise RegimeError("regime underdetermined: r is required at a boundary case")
        return self.r


@dataclass(frozen=True)
class PowerTuningPath:
    """Canonical tuning family eta_n = scale * n**(-exponent).

    exponent = 1/2 gives conservative selection with e = scale; any
    exponent in (0, 1/2) gives consistent selection (e = +inf).
    """

    scale: float
    exponent: float

    def __post_init__(self):
        if not (np.isfinite(self.scale) and self.scale > 0.0):
            raise ValueError("scale must be positive")
        if not (0.0 < self.exponent <= 0.5):
            raise ValueError("exponent must lie in (0, 1/2]")

    def eta(self, n: int) -> float:
        return self.scale * float(n) ** (-self.exponent)

    @property
    def e_limit(self) -> ExtReal:
        return ExtReal(self.scale) if self.exponent == 0.5 else POS_INF


@dataclass(frozen=True)
class ThetaRule:
    """Parameter sequences theta_n matched to the regime quantities.

    kinds:
      local        theta_n = nu/sqrt(n) + perturb * n**(-3/4)
      eta_multiple theta_n = zeta * eta_n
      boundary     theta_n = zeta*eta_n - sign(zeta)*r/sqrt(n) + perturb * n**(-3/4),
                   hitting the |zeta| in {1, a} boundary with offset limit r
      fixed        theta_n = value

    The optional n**(-3/4) perturbation vanishes in every regime quantity
    but keeps the sequence off the exact limit, so convergence checks see a
    genuinely moving parameter.
    """

    kind: str
    nu: float = 0.0
    zeta: float = 0.0
    r: float = 0.0
    value: float = 0.0
    perturb: float = 0.0

    @classmethod
    def local(cls, nu: float, perturb: float = 0.0) -> "ThetaRule":
        return cls(kind="local", nu=float(nu), perturb=float(perturb))

    @classmethod
    def eta_multiple(cls, zeta: float) -> "ThetaRule":
        return cls(kind="eta_multiple", zeta=float(zeta))

    @classmethod
    def boundary(cls, zeta: float, r: float, perturb: float = 0.0) -> "ThetaRule":
        if zeta == 0.0:
            raise ValueError("boundary rule needs zeta != 0")
        return cls(kind="boundary", zeta=float(zeta), r=float(r), perturb=float(perturb))

    @classmethod
    def fixed(cls, value: float) -> "ThetaRule":
        return cls(kind="fixed", value=float(value))

    def theta(self, n: int, eta_n: float) -> float:
        rn = float(n)
        if self.kind == "local":
            return self.nu / math.sqrt(rn) + self.perturb * rn**-0.75
        if self.kind == "eta_multiple":
            return self.zeta * eta_n
        if self.kind == "boundary":
            return self.zeta * eta_n - math.copysign(1.0, self.zeta) * self.r / math.sqrt(rn) + self.perturb * rn**-0.75
        if self.kind == "fixed":
            return self.value
        raise ValueError(f"unknown theta rule {self.kind!r}")


def derive_regime(path: PowerTuningPath, rule: ThetaRule) -> RegimeSpec:
    """Exact regime reached by a canonical path and theta rule."""
    e = path.e_limit
    consistent = e == POS_INF
    if rule.kind == "local":
        # theta/eta ~ n**(exponent - 1/2) -> 0 unless conservative
        zeta = ExtReal(0.0) if consistent else ExtReal(rule.nu / path.scale)
        return RegimeSpec(e=e, nu=ExtReal(rule.nu), zeta=zeta)
    if rule.kind == "eta_multiple":
        z = rule.zeta
        if z == 0.0:
            nu = ExtReal(0.0)
        elif consistent:
            nu = POS_INF if z > 0 else NEG_INF
        else:
            nu = ExtReal(z * path.scale)
        # sqrt(n)(eta - zeta*theta) = (1 - zeta^2) sqrt(n) eta; exact 0 at |zeta| = 1
        r = ExtReal(0.0) if abs(z) == 1.0 and consistent else None
        return RegimeSpec(e=e, nu=nu, zeta=ExtReal(z), r=r)
    if rule.kind == "boundary":
        z = rule.zeta
        if consistent:
            nu = POS_INF if z > 0 else NEG_INF
        else:
            nu = ExtReal(z * path.scale - math.copysign(1.0, z) * rule.r)
        return RegimeSpec(e=e, nu=nu, zeta=ExtReal(z), r=ExtReal(rule.r))
    if rule.kind == "fixed":
        v = rule.value
        if v == 0.0:
            return RegimeSpec(e=e, nu=ExtReal(0.0), zeta=ExtReal(0.0))
        inf = POS_INF if v > 0 else NEG_INF
        return RegimeSpec(e=e, nu=inf, zeta=inf)
    raise ValueError(f"unknown theta rule {rule.kind!r}")


def selection_probability(point: ModelPoint, tuning: TuningPlan) -> float:
    """P_{n,theta}(zero model selected); shared with the mixture atom weight."""
    return atom_weight(point, tuning)


def limit_selection_probability(regime: RegimeSpec) -> float:
    """Limit of the zero-selection probability under the given regime."""
    if not regime.consistent:
        nu = float(regime.require_nu())
        e = float(regime.e)
        return norm_cdf(-nu + e) - norm_cdf(-nu - e)
    zeta = regime.require_zeta()
    az = abs(float(zeta))
    if az < 1.0:
        return 1.0
    if az > 1.0:
        return 0.0
    return norm_cdf(float(regime.require_r()))


def selection_convergence_table(path: PowerTuningPath, theta_rule: ThetaRule, n_list) -> ExperimentReport:
    """Exact probability along the path versus its regime limit, per n."""
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    regime = derive_regime(path, theta_rule)
    limit = limit_selection_probability(regime)
    report = ExperimentReport(columns=("n", "theta", "eta", "prob", "limit", "gap"))
    for n in n_list:
        eta_n = path.eta(n)
        theta_n = theta_rule.theta(n, eta_n)
        prob = selection_probability(ModelPoint(n, theta_n), TuningPlan(eta_n))
        report.append(int(n), theta_n, eta_n, prob, limit, prob - limit)
    return report
