"""Limit distributions of the thresholding estimators under moving parameters.

Three families of limits, all emitted as `LimitLaw` values wrapping a
`MixtureDistribution` whose atoms may sit at exact infinities:

* conservative tuning (finite e): atom at -nu plus excised / shifted /
  blended normal pieces, mirroring the finite-sample law with
  sqrt(n)*eta -> e and sqrt(n)*theta -> nu;
* consistent tuning (e = inf), sqrt(n) scaling: point masses, truncated
  normals at the selection boundary, or a standard normal, with mass
  escaping to an infinity in the degenerate directions;
* consistent tuning, 1/eta scaling: purely atomic laws with at most two
  atoms, all located inside [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import DEFAULT_SCAD_A, EstimatorKind, TuningPlan
from .finite_dist import (
    Atom,
    GaussPiece,
    MixtureDistribution,
    ModelPoint,
    finite_sample_dist,
    rescaled_dist,
    _hard_mixture,
    _scad_mixture,
    _soft_mixture,
)
from .normal_kernel import ExtReal, NEG_INF, POS_INF, norm_cdf
from .report import ExperimentReport
from .selection import PowerTuningPath, RegimeError, RegimeSpec, ThetaRule, derive_regime

__all__ = [
    "LimitLaw",
    "conservative_limit",
    "consistent_limit",
    "rescaled_limit",
    "weak_convergence_check",
    "ConvergenceScenario",
    "canonical_scenarios",
]

WEAK = "weak"
TOTAL_VARIATION = "total-variation"
MASS_ESCAPE = "mass-escape"


@dataclass(frozen=True)
class LimitLaw:
    dist: MixtureDistribution
    mode: str

    def __post_init__(self):
        if self.mode not in (WEAK, TOTAL_VARIATION, MASS_ESCAPE):
            raise ValueError(f"unknown convergence mode {self.mode!r}")
        escaped = any(not a.loc.is_finite and a.weight > 0.0 for a in self.dist.atoms)
        if escaped and self.mode != MASS_ESCAPE:
            raise ValueError("positive mass at an infinity requires mass-escape mode")

    def cdf(self, x):
        return self.dist.cdf(x)

    def to_json(self) -> dict:
        out = self.dist.to_json()
        out["mode"] = self.mode
        return out

    @classmethod
    def from_json(cls, obj) -> "LimitLaw":
        mode = obj["mode"]
        dist = MixtureDistribution.from_json({"atoms": obj["atoms"], "pieces": obj["pieces"]})
        return cls(dist, mode)


def _std_normal() -> MixtureDistribution:
    return MixtureDistribution(atoms=(), pieces=(GaussPiece(1.0, 1.0, 0.0, NEG_INF, POS_INF),))


def _normal_mean(mu: float) -> MixtureDistribution:
    return MixtureDistribution(atoms=(), pieces=(GaussPiece(1.0, 1.0, -mu, NEG_INF, POS_INF),))


def _pointmass(loc: ExtReal) -> LimitLaw:
    dist = MixtureDistribution(atoms=(Atom(loc, 1.0),), pieces=())
    return LimitLaw(dist, WEAK if loc.is_finite else MASS_ESCAPE)


def conservative_limit(kind: EstimatorKind, nu, e: float, scad_a: float = DEFAULT_SCAD_A) -> LimitLaw:
    """Limit of the sqrt(n) law when sqrt(n)*eta_n -> e < inf and sqrt(n)*theta_n -> nu."""
    nu = ExtReal.of(nu)
    e = float(e)
    if not (np.isfinite(e) and e >= 0.0):
        raise ValueError("conservative limits require finite e >= 0")
    if not nu.is_finite or e == 0.0:
        if kind is EstimatorKind.SOFT:
            mu = 0.0 if e == 0.0 else -nu.sign() * e
            return LimitLaw(_normal_mean(mu), TOTAL_VARIATION)
        return LimitLaw(_std_normal(), TOTAL_VARIATION)
    loc = -nu.finite
    if kind is EstimatorKind.HARD:
        return LimitLaw(_hard_mixture(loc, e), WEAK)
    if kind is EstimatorKind.SOFT:
        return LimitLaw(_soft_mixture(loc, e), WEAK)
    if kind is EstimatorKind.SCAD:
        return LimitLaw(_scad_mixture(loc, e, scad_a), WEAK)
    raise ValueError(f"unknown estimator kind {kind!r}")


def _hard_boundary_law(zeta_sign: int, r: ExtReal) -> LimitLaw:
    if r == POS_INF:
        return _pointmass(NEG_INF if zeta_sign > 0 else POS_INF)
    if r == NEG_INF:
        return LimitLaw(_std_normal(), TOTAL_VARIATION)
    rf = r.finite
    w = norm_cdf(rf)
    if zeta_sign > 0:
        piece = GaussPiece(1.0, 1.0, 0.0, ExtReal(rf), POS_INF)
        escape = NEG_INF
    else:
        piece = GaussPiece(1.0, 1.0, 0.0, NEG_INF, ExtReal(-rf))
        escape = POS_INF
    dist = MixtureDistribution(atoms=(Atom(escape, w),), pieces=(piece,))
    return LimitLaw(dist, MASS_ESCAPE)


def _scad_boundary_law(zeta_sign: int, rf: float, a: float) -> LimitLaw:
    """Blend-plus-tail law at |zeta| = a; total mass one, no atom."""
    ratio = (a - 2.0) / (a - 1.0)
    if zeta_sign > 0:
        pieces = (
            GaussPiece(ratio, ratio, rf / (a - 1.0), NEG_INF, ExtReal(rf)),
            GaussPiece(1.0, 1.0, 0.0, ExtReal(rf), POS_INF),
        )
    else:
        pieces = (
            GaussPiece(1.0, 1.0, 0.0, NEG_INF, ExtReal(-rf)),
            GaussPiece(ratio, ratio, -rf / (a - 1.0), ExtReal(-rf), POS_INF),
        )
    return LimitLaw(MixtureDistribution(atoms=(), pieces=pieces), TOTAL_VARIATION)


def consistent_limit(kind: EstimatorKind, regime: RegimeSpec, scad_a: float = DEFAULT_SCAD_A) -> LimitLaw:
    """Limit of the sqrt(n) law when sqrt(n)*eta_n -> inf.

    Below the selection boundary all mass collapses onto (or escapes with)
    the atom at -nu; exactly at the boundary the escape weight is
    cdf(r) and the remainder is a one-sided truncated normal (hard) or a
    blend-plus-tail density (scad); above the boundary the standard normal
    reappears.
    """
    if not regime.consistent:
        raise RegimeError("consistent limits require e = +inf")
    if kind is EstimatorKind.SOFT:
        return _pointmass(-regime.require_nu())
    zeta = regime.require_zeta()
    az = abs(float(zeta))
    boundary = 1.0 if kind is EstimatorKind.HARD else float(scad_a)
    if az < boundary:
        return _pointmass(-regime.require_nu())
    if az > boundary:
        return LimitLaw(_std_normal(), TOTAL_VARIATION)
    r = regime.require_r()
    if kind is EstimatorKind.HARD:
        return _hard_boundary_law(zeta.sign(), r)
    if r == POS_INF:
        return _pointmass(-regime.require_nu())
    if r == NEG_INF:
        return LimitLaw(_std_normal(), TOTAL_VARIATION)
    return _scad_boundary_law(zeta.sign(), r.finite, scad_a)


def rescaled_limit(kind: EstimatorKind, regime: RegimeSpec, scad_a: float = DEFAULT_SCAD_A) -> LimitLaw:
    """Limit of the 1/eta law: at most two atoms, all inside [-1, 1]."""
    if not regime.consistent:
        raise RegimeError("rescaled limits require e = +inf")
    zeta = regime.require_zeta()
    zf = float(zeta)
    az = abs(zf)
    sgn = zeta.sign()
    clipped = -sgn * min(1.0, az)
    if kind is EstimatorKind.SOFT:
        return _pointmass(ExtReal(clipped))
    if kind is EstimatorKind.HARD:
        if az < 1.0:
            return _pointmass(ExtReal(-zf))
        if az > 1.0:
            return _pointmass(ExtReal(0.0))
        w = norm_cdf(float(regime.require_r()))
        dist = MixtureDistribution(
            atoms=(Atom(ExtReal(-zf), w), Atom(ExtReal(0.0), 1.0 - w)), pieces=()
        )
        return LimitLaw(dist, WEAK)
    if kind is EstimatorKind.SCAD:
        a = float(scad_a)
        if az <= 2.0:
            return _pointmass(ExtReal(clipped))
        if az < a:
            return _pointmass(ExtReal(-sgn * (a - az) / (a - 2.0)))
        return _pointmass(ExtReal(0.0))
    raise ValueError(f"unknown estimator kind {kind!r}")


def weak_convergence_check(finite_law_seq, limit: LimitLaw, grid, n_probe) -> ExperimentReport:
    """Sup over the grid of |F_n - F_limit| for each probed n.

    The grid must keep a distance of at least 1e-6 from every finite atom of
    the limit (cdf discontinuity points).  For mass-escape limits the limit
    cdf is the constant the finite-sample cdfs drift to, so the same sup
    measures the escape.
    """
    grid = np.asarray(grid, dtype=float)
    for a in limit.dist.atoms:
        if a.loc.is_finite and np.min(np.abs(grid - a.loc.finite)) < 1e-6:
            raise ValueError(f"grid point collides with limit atom at {a.loc.finite}")
    limit_vals = limit.cdf(grid)
    report = ExperimentReport(columns=("n", "sup_gap"))
    for n in n_probe:
        fn = finite_law_seq(int(n))
        gap = float(np.max(np.abs(fn.cdf(grid) - limit_vals)))
        report.append(int(n), gap)
    return report


@dataclass(frozen=True)
class ConvergenceScenario:
    """One named moving-parameter regime wired to a canonical tuning family."""

    name: str
    kind: EstimatorKind
    path: PowerTuningPath
    rule: ThetaRule
    scaling: str = "sqrt_n"  # or "inv_eta"
    scad_a: float = DEFAULT_SCAD_A
    grid_span: float = 8.0
    grid_margin: float = 0.25
    grid_points: int = 57
    extra_grid: tuple = ()

    def regime(self) -> RegimeSpec:
        return derive_regime(self.path, self.rule)

    def limit(self) -> LimitLaw:
        regime = self.regime()
        if self.scaling == "inv_eta":
            return rescaled_limit(self.kind, regime, self.scad_a)
        if regime.consistent:
            return consistent_limit(self.kind, regime, self.scad_a)
        return conservative_limit(self.kind, regime.require_nu(), float(regime.e), self.scad_a)

    def finite_law(self, n: int) -> MixtureDistribution:
        eta_n = self.path.eta(n)
        theta_n = self.rule.theta(n, eta_n)
        point = ModelPoint(n, theta_n)
        tuning = TuningPlan(eta_n, self.scad_a)
        if self.scaling == "inv_eta":
            return rescaled_dist(self.kind, point, tuning)
        return finite_sample_dist(self.kind, point, tuning)

    def grid(self) -> np.ndarray:
        pts = np.linspace(-self.grid_span, self.grid_span, self.grid_points)
        if self.extra_grid:
            pts = np.unique(np.concatenate([pts, np.asarray(self.extra_grid, dtype=float)]))
        for a in self.limit().dist.atoms:
            if a.loc.is_finite:
                pts = pts[np.abs(pts - a.loc.finite) >= self.grid_margin]
        return pts

    def check(self, n_probe) -> ExperimentReport:
        return weak_convergence_check(self.finite_law, self.limit(), self.grid(), n_probe)


def canonical_scenarios(scad_a: float = DEFAULT_SCAD_A) -> list:
    """Named scenarios spanning every limit-theorem case, one per branch."""
    conservative = lambda c: PowerTuningPath(c, 0.5)
    consistent = PowerTuningPath(1.0, 0.25)
    hard, soft, scad = EstimatorKind.HARD, EstimatorKind.SOFT, EstimatorKind.SCAD
    mk = ConvergenceScenario
    return [
        mk("hard-conservative-local", hard, conservative(1.96), ThetaRule.local(1.0, perturb=0.5)),
        # the soft cdf feels theta only through the atom's switch point, so a
        # probe must sit inside the small-n drift zone yet outside the large-n one
        mk("soft-conservative-local", soft, conservative(1.0), ThetaRule.local(1.0, perturb=0.5),
           grid_margin=0.03, extra_grid=(-1.05,)),
        mk("scad-conservative-local", scad, conservative(1.0), ThetaRule.local(1.0, perturb=0.5), scad_a=scad_a),
        mk("hard-consistent-subboundary", hard, consistent, ThetaRule.eta_multiple(0.5)),
        mk("hard-consistent-boundary", hard, consistent, ThetaRule.boundary(1.0, 0.5, perturb=0.5)),
        mk("hard-consistent-superboundary", hard, consistent, ThetaRule.eta_multiple(2.0)),
        mk("soft-consistent-local", soft, consistent, ThetaRule.local(2.0)),
        mk("scad-consistent-local", scad, consistent, ThetaRule.local(1.0), scad_a=scad_a),
        mk("scad-consistent-boundary", scad, consistent, ThetaRule.boundary(scad_a, 1.0, perturb=0.5), scad_a=scad_a),
        mk("scad-consistent-superboundary", scad, consistent, ThetaRule.eta_multiple(5.0), scad_a=scad_a),
        mk("hard-rescaled-subboundary", hard, consistent, ThetaRule.eta_multiple(0.5), scaling="inv_eta", grid_span=3.0),
        mk("hard-rescaled-boundary", hard, consistent, ThetaRule.boundary(1.0, 0.0, perturb=0.5), scaling="inv_eta", grid_span=3.0),
        mk("soft-rescaled-saturated", soft, consistent, ThetaRule.eta_multiple(3.0), scaling="inv_eta", grid_span=3.0),
        mk("scad-rescaled-blend", scad, consistent, ThetaRule.eta_multiple(3.0), scaling="inv_eta", scad_a=scad_a, grid_span=3.0),
        mk("scad-rescaled-identity", scad, consistent, ThetaRule.eta_multiple(4.0), scaling="inv_eta", scad_a=scad_a, grid_span=3.0),
    ]
