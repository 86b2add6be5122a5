"""Why the estimators' cdf cannot be estimated uniformly well.

The obstruction is a two-point argument: the parameter pair
theta(+-delta) = -(t +- delta)/sqrt(n) produces experiments whose total
variation distance vanishes as delta -> 0 while the estimands
F_{n,theta(-delta)}(t) and F_{n,theta(delta)}(t) stay an atom's weight
apart.  Any estimator of F_{n,theta}(t) therefore carries worst-case error
probability at least (1 - TV)/2 -> 1/2 for every error margin below half
the atom weight.

This module computes the gap, the finite-sample lower bounds (on both the
sqrt(n) and the 1/eta scale), and Monte Carlo worst-case error curves for
concrete cdf estimators measured against those bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import ndtri

from .estimators import EstimatorKind, TuningPlan, estimate
from .finite_dist import ModelPoint, finite_sample_dist
from .limits import conservative_limit
from .normal_kernel import gaussian_tv, norm_cdf
from .report import ExperimentReport

__all__ = [
    "TwoPointProblem",
    "PretestPlugin",
    "MOutOfNBootstrap",
    "OracleCheat",
    "estimand_gap",
    "minimax_lower_bound",
    "rescaled_lower_bound",
    "estimator_worst_case",
]


@dataclass(frozen=True)
class TwoPointProblem:
    """A cdf-estimation target F_{n,theta}(t) with its adversarial pair."""

    n: int
    t: float
    delta: float
    tuning: TuningPlan
    kind: EstimatorKind

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if not (np.isfinite(self.t) and np.isfinite(self.delta) and self.delta > 0.0):
            raise ValueError("t must be finite and delta positive")

    def theta_pair(self, delta: Optional[float] = None):
        d = self.delta if delta is None else delta
        s = math.sqrt(self.n)
        return -(self.t + d) / s, -(self.t - d) / s


def estimand_gap(problem: TwoPointProblem, delta: Optional[float] = None):
    """(gap, leading_term, remainder) for the two-point estimand difference.

    gap = F at theta(-delta) minus F at theta(+delta), both evaluated at t;
    the leading term is the atom weight of the theta(-delta) law, and the
    remainder (the absolutely continuous contribution) vanishes with delta.
    """
    d = problem.delta if delta is None else float(delta)
    th_plus, th_minus = problem.theta_pair(d)
    f_minus = finite_sample_dist(problem.kind, ModelPoint(problem.n, th_minus), problem.tuning).cdf(problem.t)
    f_plus = finite_sample_dist(problem.kind, ModelPoint(problem.n, th_plus), problem.tuning).cdf(problem.t)
    gap = f_minus - f_plus
    se = math.sqrt(problem.n) * problem.tuning.eta
    leading = norm_cdf(problem.t - d + se) - norm_cdf(problem.t - d - se)
    return gap, leading, gap - leading


def minimax_lower_bound(problem: TwoPointProblem, epsilon: Optional[float] = None, sweep_steps: int = 14):
    """(epsilon_range, bound): error margins that defeat every estimator.

    epsilon_range is half the limiting estimand gap; for any target margin
    below it, shrinking delta drives the two-point bound (1 - TV)/2 to 1/2.
    The returned bound is the best value along a delta sweep restricted to
    deltas whose gap still exceeds 2*epsilon.
    """
    se = math.sqrt(problem.n) * problem.tuning.eta
    eps_range = 0.5 * (norm_cdf(problem.t + se) - norm_cdf(problem.t - se))
    eps = 0.9 * eps_range if epsilon is None else float(epsilon)
    best = 0.0
    d = problem.delta
    for _ in range(sweep_steps):
        gap, _, _ = estimand_gap(problem, d)
        if eps < abs(gap) / 2.0:
            th_plus, th_minus = problem.theta_pair(d)
            tv = gaussian_tv(problem.n, th_plus, th_minus)
            best = max(best, 0.5 * (1.0 - tv))
        d /= 4.0
    return eps_range, best


def rescaled_lower_bound(kind: EstimatorKind, n: int, t: float, tuning: TuningPlan,
                         delta: float = 0.1, epsilon: Optional[float] = None):
    """Same bound for the cdf of (estimate - theta)/eta, by exact reduction.

    G_{n,theta}(t) = F_{n,theta}(sqrt(n)*eta*t), so the rescaled problem at
    t is the plain problem at s = sqrt(n)*eta*t; for |t| > 1 the range
    collapses and trivial estimators become uniformly consistent.
    """
    s = math.sqrt(n) * tuning.eta * t
    problem = TwoPointProblem(n=n, t=s, delta=delta, tuning=tuning, kind=kind)
    return minimax_lower_bound(problem, epsilon=epsilon)


class OracleCheat:
    """Diagnostic estimator that returns the true cdf value; harness soundness check."""

    name = "oracle-cheat"

    def estimate_cdf(self, ybar, ctx) -> np.ndarray:
        return np.full_like(np.asarray(ybar, dtype=float), ctx.true_value)


@dataclass(frozen=True)
class PretestPlugin:
    """Plug the pretest outcome into the fixed-parameter limit formulas.

    Tests theta = 0 by |ybar| > n**(-cutoff_exponent); the accepted branch
    uses the zero-parameter limit law, the rejected branch the nonzero one.
    Conservative tuning substitutes sqrt(n)*eta_n for its limit e.
    """

    cutoff_exponent: float = 0.25
    consistent: bool = True

    @property
    def name(self) -> str:
        return "pretest-plugin"

    def estimate_cdf(self, ybar, ctx) -> np.ndarray:
        y = np.asarray(ybar, dtype=float)
        reject = np.abs(y) > float(ctx.n) ** (-self.cutoff_exponent)
        t = ctx.t
        if self.consistent:
            accept_val = 1.0 if t >= 0.0 else 0.0
            if ctx.kind is EstimatorKind.SOFT:
                reject_val = np.where(y > 0, 1.0, 0.0)
            else:
                reject_val = norm_cdf(t)
        else:
            e_sub = math.sqrt(ctx.n) * ctx.tuning.eta
            accept_val = conservative_limit(ctx.kind, 0.0, e_sub, ctx.tuning.scad_a).cdf(t)
            if ctx.kind is EstimatorKind.SOFT:
                reject_val = np.where(y > 0, norm_cdf(t + e_sub), norm_cdf(t - e_sub))
            else:
                reject_val = norm_cdf(t)
        return np.where(reject, reject_val, accept_val)


@dataclass(frozen=True)
class MOutOfNBootstrap:
    """Parametric m-out-of-n bootstrap on the sufficient statistic.

    Draws ybar* ~ N(ybar, 1/m) and recomputes the estimator at scale m with
    the tuning path evaluated at m; consistency requires m -> inf and
    m/n -> 0, and m = n recovers the ordinary (inconsistent) bootstrap.
    """

    path: object  # anything with .eta(m)
    m_rule: Callable[[int], int] = field(default=lambda n: int(math.ceil(math.sqrt(n))))
    n_boot: int = 200

    @property
    def name(self) -> str:
        return "m-out-of-n-bootstrap"

    def estimate_cdf(self, ybar, ctx) -> np.ndarray:
        y = np.asarray(ybar, dtype=float)
        m = int(self.m_rule(ctx.n))
        if m < 1:
            raise ValueError("m rule produced a non-positive resample size")
        tuning_m = TuningPlan(self.path.eta(m), ctx.tuning.scad_a)
        theta_hat = estimate(ctx.kind, y, ctx.tuning)
        z = ndtri(_uniform_open(ctx.rng, (y.size, self.n_boot)))
        ystar = y[:, None] + z / math.sqrt(m)
        boot_vals = math.sqrt(m) * (estimate(ctx.kind, ystar, tuning_m) - theta_hat[:, None])
        return (boot_vals <= ctx.t).mean(axis=1)


@dataclass
class _HarnessContext:
    kind: EstimatorKind
    n: int
    t: float
    tuning: TuningPlan
    true_value: float
    rng: np.random.Generator


def _uniform_open(gen: np.random.Generator, size) -> np.ndarray:
    return gen.integers(1, 1 << 53, size=size).astype(np.float64) / float(1 << 53)


def adversarial_theta_grid(n: int, t: float, c: float, size: int = 9) -> np.ndarray:
    """Uniform grid over |theta| < c/sqrt(n) plus the two-point witnesses."""
    s = math.sqrt(n)
    width = c - abs(t)
    witnesses = []
    for frac in (0.5, 0.1, 0.02):
        d = frac * width
        witnesses.extend([-(t + d) / s, -(t - d) / s])
    base = np.linspace(-0.95 * c / s, 0.95 * c / s, size)
    return np.asarray(sorted(set(np.concatenate([base, witnesses, [0.0]]))))


def estimator_worst_case(
    spec,
    kind: EstimatorKind,
    n: int,
    t: float,
    tuning: TuningPlan,
    c: float,
    seed: int,
    replications: int = 10_000,
    theta_grid_size: int = 9,
    epsilon: Optional[float] = None,
) -> ExperimentReport:
    """Monte Carlo error-probability curve of a cdf estimator over a theta grid.

    For each theta in the grid (which always contains the two-point
    witnesses), estimates P_{n,theta}(|Fhat(t) - F_{n,theta}(t)| > eps) with
    eps = 0.9 * epsilon_range by default.  The report metadata records the
    grid supremum, the witness theta, and the theoretical lower bound.
    """
    if not c > abs(t):
        raise ValueError("the neighborhood radius must satisfy c > |t|")
    problem = TwoPointProblem(n=n, t=t, delta=0.5 * (c - abs(t)), tuning=tuning, kind=kind)
    eps_range, bound = minimax_lower_bound(problem)
    eps = 0.9 * eps_range if epsilon is None else float(epsilon)
    grid = adversarial_theta_grid(n, t, c, size=theta_grid_size)
    root = np.random.SeedSequence(int(seed))
    children = root.spawn(len(grid))
    report = ExperimentReport(
        columns=("theta", "err_prob"),
        meta={"estimator": spec.name, "kind": kind.value, "n": n, "t": t,
              "epsilon": eps, "epsilon_range": eps_range, "bound": bound},
    )
    sup_prob = -1.0
    witness = None
    for child, theta in zip(children, grid):
        theta = float(theta)
        rng = np.random.Generator(np.random.Philox(child))
        truth = finite_sample_dist(kind, ModelPoint(n, theta), tuning).cdf(t)
        ctx = _HarnessContext(kind=kind, n=n, t=t, tuning=tuning, true_value=truth, rng=rng)
        ybar = theta + ndtri(_uniform_open(rng, replications)) / math.sqrt(n)
        fhat = np.asarray(spec.estimate_cdf(ybar, ctx), dtype=float)
        err_prob = float(np.mean(np.abs(fhat - truth) > eps))
        report.append(theta, err_prob)
        if err_prob > sup_prob:
            sup_prob, witness = err_prob, theta
    report.meta["sup"] = sup_prob
    report.meta["witness_theta"] = witness
    return report
