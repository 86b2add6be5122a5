"""Seeded simulation of the location experiment and uniform-rate checks.

The sampler draws the sufficient statistic ybar ~ N(theta, 1/n) directly:
one uniform per replication through a counter-based (Philox) stream mapped
by the normal inverse cdf, so batches are reproducible and splittable
without shared state, and merged output does not depend on scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .estimators import EstimatorKind, TuningPlan, estimate
from .finite_dist import MixtureDistribution, ModelPoint, finite_sample_dist
from .normal_kernel import norm_cdf
from .report import ExperimentReport

__all__ = [
    "SimConfig",
    "EmpiricalCdf",
    "sample_ybar",
    "simulate_estimates",
    "ks_distance",
    "uniform_rate_experiment",
    "default_adversarial_grid",
]

_BATCH = 1 << 19
_U_DENOM = float(1 << 53)


@dataclass(frozen=True)
class SimConfig:
    seed: int
    replications: int
    point: ModelPoint
    tuning: TuningPlan

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous step function through a sorted sample."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("values must be a nonempty 1-d array")
        if np.any(np.diff(v) < 0):
            raise ValueError("values must be sorted ascending")
        object.__setattr__(self, "values", v)

    @property
    def count(self) -> int:
        return int(self.values.size)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = np.searchsorted(self.values, x, side="right") / self.count
        if x.ndim == 0:
            return float(out)
        return out

    def fraction_at(self, x: float) -> float:
        """Fraction of sample points exactly equal to x."""
        lo = np.searchsorted(self.values, x, side="left")
        hi = np.searchsorted(self.values, x, side="right")
        return (hi - lo) / self.count

    def quantiles(self, probs=None) -> ExperimentReport:
        probs = np.arange(0.01, 1.0, 0.01) if probs is None else np.asarray(probs)
        report = ExperimentReport(columns=("prob", "quantile"))
        qs = np.quantile(self.values, probs, method="inverted_cdf")
        for p, q in zip(probs, qs):
            report.append(float(p), float(q))
        return report


def _uniform_open(gen: np.random.Generator, size: int) -> np.ndarray:
    # integers in [1, 2^53) scaled down: strictly inside (0, 1)
    return gen.integers(1, 1 << 53, size=size).astype(np.float64) / _U_DENOM


def sample_ybar(cfg: SimConfig) -> np.ndarray:
    """Deterministic stream of ybar draws, in batch order (unsorted)."""
    root = np.random.SeedSequence(int(cfg.seed))
    n_batches = (cfg.replications + _BATCH - 1) // _BATCH
    children = root.spawn(n_batches)
    scale = 1.0 / cfg.point.sqrt_n
    chunks = []
    remaining = cfg.replications
    for child in children:
        gen = np.random.Generator(np.random.Philox(child))
        size = min(_BATCH, remaining)
        z = ndtri(_uniform_open(gen, size))
        chunks.append(cfg.point.theta + scale * z)
        remaining -= size
    return np.concatenate(chunks)


def simulate_estimates(kind: EstimatorKind, cfg: SimConfig) -> EmpiricalCdf:
    """Empirical law of sqrt(n)*(estimate - theta) from seeded replications."""
    ybar = sample_ybar(cfg)
    vals = cfg.point.sqrt_n * (estimate(kind, ybar, cfg.tuning) - cfg.point.theta)
    return EmpiricalCdf(np.sort(vals))


def ks_distance(emp: EmpiricalCdf, dist: MixtureDistribution) -> float:
    """Kolmogorov-Smirnov distance, atom-aware.

    Sup over the sample points of both one-sided gaps: the model cdf and its
    left limit against the empirical step heights on either side.
    """
    uniq, counts = np.unique(emp.values, return_counts=True)
    cum = np.cumsum(counts) / emp.count
    emp_right = cum
    emp_left = np.concatenate(([0.0], cum[:-1]))
    model_right = dist.cdf(uniq)
    atom_w = np.array([dist.atom_mass_at(float(u)) for u in uniq]) if dist.atoms else 0.0
    model_left = model_right - atom_w
    return float(
        max(np.max(np.abs(model_right - emp_right)), np.max(np.abs(model_left - emp_left)))
    )


def default_adversarial_grid(n: int, eta_n: float, M: float, a_n: float) -> np.ndarray:
    """Theta values where the uniform-rate bound is tightest.

    Always contains +-eta_n, +-eta_n*(1 +- 0.01), +-M/(2*a_n), zero, and a
    few bracketing points.
    """
    base = [
        0.0,
        eta_n,
        eta_n * 1.01,
        eta_n * 0.99,
        M / (2.0 * a_n),
        M / a_n,
        2.0 * M / a_n,
        0.5 * eta_n,
        10.0,
    ]
    grid = sorted({t for v in base for t in (v, -v)})
    return np.asarray(grid)


def _exceedance_probability(kind, n, theta, tuning, cut: float) -> float:
    """P_{n,theta}(|sqrt(n)(estimate - theta)| > cut), exact from the mixture."""
    dist = finite_sample_dist(kind, ModelPoint(n, theta), tuning)
    inside = dist.cdf(cut) - dist.cdf_left(-cut)
    return 1.0 - inside


def uniform_rate_experiment(
    kind: EstimatorKind,
    path,
    M: float,
    n_list,
    theta_grid_rule=default_adversarial_grid,
    scaling: str = "a_n",
    scad_a: float = 3.7,
) -> ExperimentReport:
    """Worst-case exceedance of the scaled estimation error over a theta grid.

    With the native rate a_n = min(sqrt(n), 1/eta_n), the sup is compared
    against the bound 2*cdf(-M/2) + cdf(-M/2 + 1), valid for M > 2.  With
    scaling='sqrt_n' the same sup is reported without a bound; under
    consistent tuning it tends to one, which is the rate-sharpness
    counterexample.
    """
    if M <= 2.0:
        raise ValueError("the exceedance bound requires M > 2")
    bound = 2.0 * norm_cdf(-M / 2.0) + norm_cdf(-M / 2.0 + 1.0)
    report = ExperimentReport(
        columns=("n", "eta", "rate", "sup_prob", "worst_theta", "bound", "within_bound"),
        meta={"kind": kind.value, "M": M, "scaling": scaling},
    )
    for n in n_list:
        n = int(n)
        eta_n = path.eta(n)
        a_n = min(math.sqrt(n), 1.0 / eta_n)
        rate = a_n if scaling == "a_n" else math.sqrt(n)
        cut = M * math.sqrt(n) / rate
        tuning = TuningPlan(eta_n, scad_a)
        grid = np.asarray(theta_grid_rule(n, eta_n, M, a_n), dtype=float)
        probs = [_exceedance_probability(kind, n, float(t), tuning, cut) for t in grid]
        worst = int(np.argmax(probs))
        sup_prob = float(probs[worst])
        ok = sup_prob <= bound if scaling == "a_n" else True
        report.append(n, eta_n, rate, sup_prob, float(grid[worst]), bound, bool(ok))
    return report
