"""Statistical verification harness.

Goodness-of-fit tests against the analytic laws, two-sample machinery for
distributional identities of the division process, a Poisson dispersion
test for line sections, and the two-sided Monte Carlo estimators for the
division-record identity (the Mecke-type formula): the expectation of a
sum over birth-time-marked cut faces equals a time integral over cell
states, splitting hyperplanes and two independent continuations.

Both sides of the identity are localized by the same rule (parent cell
closure inside an inner window), which makes the two estimands equal
exactly rather than up to boundary effects; acceptance is overlap of the
95% confidence intervals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Callable

import numpy as np
from scipy import stats

from .analytics import DistributionSpec, last_birth_cdf, p1j_table
from .engine import (
    TessellationState,
    _contains_polytope,
    run_local_stit,
)
from .errors import InsufficientSamples
from .geometry import ConvexPolytope, Polygon, Segment, point_on_segment_interior
from .measure import HyperplaneMeasure
from .parallel import parallel_map
from .streams import stream

MIN_SAMPLES = 1000


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class TestReport:
    """Outcome of one statistical check, reproducible from (config, seed)."""

    name: str
    statistic: float
    p_value: float | None
    passed: bool
    threshold: float
    n_samples: int
    seed: int | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "passed": bool(self.passed),
            "threshold": self.threshold,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "details": self.details,
        }


def _require(samples, minimum: int = MIN_SAMPLES) -> np.ndarray:
    arr = np.asarray(samples)
    if arr.shape[0] < minimum:
        raise InsufficientSamples(f"need at least {minimum} samples, got {arr.shape[0]}")
    return arr


# ---------------------------------------------------------------------------
# Goodness-of-fit tests
# ---------------------------------------------------------------------------

def gof_birth_times(last_birth_times, d: int, j: int, t: float,
                    alpha: float = 0.01, seed: int | None = None,
                    min_samples: int = MIN_SAMPLES) -> TestReport:
    """KS test of last birth times against the analytic CDF (s/t)^(d-j)."""
    arr = _require(last_birth_times, min_samples)
    res = stats.kstest(arr, lambda x: last_birth_cdf(x, d, j, t))
    return TestReport(
        name=f"birth-time-ks(d={d},j={j},t={t})",
        statistic=float(res.statistic), p_value=float(res.pvalue),
        passed=bool(res.pvalue >= alpha), threshold=alpha,
        n_samples=len(arr), seed=seed)


def gof_internal_vertices(counts, d: int, j: int, alpha: float = 0.01,
                          min_expected: float = 5.0, seed: int | None = None,
                          min_samples: int = MIN_SAMPLES) -> TestReport:
    """Chi-square test of internal-vertex counts against the analytic law.

    Bins 0,1,2,... are kept while their expected count stays above
    ``min_expected``; the remainder is pooled into one tail bin.
    """
    arr = _require(counts, min_samples).astype(int)
    n = len(arr)
    table = p1j_table(max(4000, int(arr.max()) + 1), DistributionSpec(d, j))
    k = 0
    while k < len(table) and table[k] * n >= min_expected:
        k += 1
    k = max(k, 2)
    observed = np.concatenate([np.bincount(arr, minlength=k)[:k], [(arr >= k).sum()]])
    expected = np.concatenate([table[:k], [max(1.0 - table[:k].sum(), 1e-300)]]) * n
    chi2, p = stats.chisquare(observed, f_exp=expected)
    return TestReport(
        name=f"internal-vertices-chi2(d={d},j={j})",
        statistic=float(chi2), p_value=float(p),
        passed=bool(p >= alpha), threshold=alpha,
        n_samples=n, seed=seed,
        details={"bins": int(k + 1), "sample_mean": float(arr.mean())})


def two_sample(a, b, alpha: float = 0.01, name: str = "two-sample",
               seed: int | None = None, min_samples: int = 2) -> TestReport:
    """Two-sample comparison: KS plus Mann-Whitney; both must be retained."""
    a = _require(a, min_samples)
    b = _require(b, min_samples)
    ks = stats.ks_2samp(a, b)
    mw = stats.mannwhitneyu(a, b, alternative="two-sided")
    p = float(min(ks.pvalue, mw.pvalue))
    return TestReport(
        name=name, statistic=float(ks.statistic), p_value=p,
        passed=bool(ks.pvalue >= alpha and mw.pvalue >= alpha),
        threshold=alpha, n_samples=len(a) + len(b), seed=seed,
        details={"ks_p": float(ks.pvalue), "mannwhitney_p": float(mw.pvalue),
                 "mean_a": float(np.mean(a)), "mean_b": float(np.mean(b))})


def poisson_dispersion(counts, mean: float | None = None, alpha: float = 0.01,
                       seed: int | None = None,
                       min_samples: int = MIN_SAMPLES) -> TestReport:
    """Index-of-dispersion z-test; optionally also a z-test of the mean.

    The dispersion statistic sum (x - xbar)^2 / xbar is approximately
    chi-square with n-1 degrees of freedom under a Poisson law.
    """
    arr = _require(counts, min_samples).astype(float)
    n = len(arr)
    xbar = arr.mean()
    disp = float(((arr - xbar) ** 2).sum() / xbar)
    z = (disp - (n - 1)) / math.sqrt(2.0 * (n - 1))
    p = 2.0 * float(stats.norm.sf(abs(z)))
    passed = p >= alpha
    details = {"dispersion": disp, "z": z, "sample_mean": float(xbar)}
    if mean is not None:
        zm = (xbar - mean) / math.sqrt(mean / n)
        details["mean_z"] = float(zm)
        details["mean_relative_error"] = float(abs(xbar - mean) / mean)
    return TestReport(
        name="poisson-dispersion", statistic=disp, p_value=p,
        passed=bool(passed), threshold=alpha, n_samples=n, seed=seed,
        details=details)


# ---------------------------------------------------------------------------
# The division-record identity (Mecke-type formula)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SinSquaredProfile:
    """Smooth time profile sin^2(pi s / horizon) supported on (0, horizon)."""

    horizon: float

    def __call__(self, s: float) -> float:
        if not 0.0 < s < self.horizon:
            return 0.0
        return math.sin(math.pi * s / self.horizon) ** 2


@dataclass(frozen=True)
class BoundedExpOfMeasure:
    """Bounded face-measure weight exp(-measure)."""

    def __call__(self, v: float) -> float:
        return math.exp(-v)


@dataclass(frozen=True)
class SimpleFunctional:
    """Face functional phi(s) * psi(face measure) * 1{face center in region}.

    ``phi`` must vanish outside (0, horizon); ``psi`` must be bounded.
    The functional ignores the continuation of the process after the
    split, so the inner expectations on the integral side are vacuous.
    """

    horizon: float
    phi: Callable[[float], float]
    psi: Callable[[float], float]
    region: ConvexPolytope


@dataclass(frozen=True)
class NestedFunctional:
    """Indicator that a face collects exactly ``target_count`` internal
    vertices by the horizon, localized to faces centered in ``region``.

    Depends on the full record restricted to the parent cell, so the
    integral side must actually simulate the two fresh continuations.
    """

    horizon: float
    target_count: int
    region: ConvexPolytope


MeckeFunctional = SimpleFunctional | NestedFunctional


@dataclass
class MeckeEstimate:
    mean: float
    stderr: float
    reps: int

    @property
    def ci95_half(self) -> float:
        return 1.96 * self.stderr

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "reps": self.reps,
                "ci95_half": self.ci95_half}


def _cell_in_inner(state: TessellationState, cell_id: int, inner: ConvexPolytope,
                   tol: float) -> bool:
    poly = state.cells[cell_id].polytope
    return all(inner.contains_point(v, tol) for v in poly.vertices)


def _estimate(values: list[float]) -> MeckeEstimate:
    arr = np.asarray(values, dtype=float)
    return MeckeEstimate(float(arr.mean()),
                         float(arr.std(ddof=1) / math.sqrt(len(arr))),
                         len(arr))


def _lhs_rep(rep: int, functional: MeckeFunctional, window: Polygon,
             inner: Polygon, measure: HyperplaneMeasure, master_seed: int,
             name: str) -> float:
    rng = stream(master_seed, name, rep)
    state = run_local_stit(window, measure, functional.horizon, rng)
    tol = state._boundary_tol
    total = 0.0
    for rec in state.ledger:
        if not _cell_in_inner(state, rec.parent_cell_id, inner, tol):
            continue
        if not functional.region.contains_point(rec.face.midpoint, tol):
            continue
        if isinstance(functional, SimpleFunctional):
            total += functional.phi(rec.birth_time) * functional.psi(rec.face.measure)
        else:
            total += 1.0 if len(rec.internal_vertices) == functional.target_count else 0.0
    return total


def mecke_lhs(functional: MeckeFunctional, window: Polygon, inner: Polygon,
              measure: HyperplaneMeasure, reps: int, master_seed: int,
              name: str = "mecke-lhs", threads: int = 1) -> MeckeEstimate:
    """Record-side estimator: per replication, sum the functional over the
    ledger faces whose parent cell closure lies inside the inner window."""
    fn = partial(_lhs_rep, functional=functional, window=window, inner=inner,
                 measure=measure, master_seed=master_seed, name=name)
    return _estimate(parallel_map(fn, list(range(reps)), threads))


def _count_endpoints_on_segment(fresh: TessellationState, seg: Segment,
                                tol: float) -> int:
    count = 0
    for rec in fresh.ledger:
        for k, src in enumerate(rec.endpoint_sources or ()):
            if src == -1:
                pt = rec.face.a if k == 0 else rec.face.b
                if point_on_segment_interior(pt, seg, tol):
                    count += 1
    return count


def _rhs_rep(rep: int, functional: MeckeFunctional, window: Polygon,
             inner: Polygon, measure: HyperplaneMeasure, s_grid: np.ndarray,
             inner_mc: int, master_seed: int, name: str) -> float:
    rng = stream(master_seed, name, rep)
    horizon = functional.horizon
    state = run_local_stit(window, measure, horizon, rng)
    tol = state._boundary_tol
    f = np.zeros(len(s_grid))
    for k, s in enumerate(s_grid):
        for cell in state.cells_at(s):
            if not _cell_in_inner(state, cell.id, inner, tol):
                continue
            rate = measure.hit_rate(cell.polytope)
            acc = 0.0
            for _ in range(inner_mc):
                h = measure.sample_hitting(cell.polytope, rng)
                plus, minus, face = cell.polytope.split(h)
                if not functional.region.contains_point(face.midpoint, tol):
                    continue
                if isinstance(functional, SimpleFunctional):
                    acc += functional.phi(s) * functional.psi(face.measure)
                else:
                    n_int = 0
                    for part in (plus, minus):
                        fresh = run_local_stit(part, measure, horizon - s, rng)
                        n_int += _count_endpoints_on_segment(fresh, face, tol)
                    if n_int == functional.target_count:
                        acc += 1.0
            f[k] += rate * acc / inner_mc
    return float(np.trapezoid(f, s_grid))


def mecke_rhs(functional: MeckeFunctional, window: Polygon, inner: Polygon,
              measure: HyperplaneMeasure, reps: int, master_seed: int,
              s_grid=None, inner_mc: int = 1, name: str = "mecke-rhs",
              threads: int = 1) -> MeckeEstimate:
    """Integral-side estimator.

    One trajectory per replication supplies the cell states at every grid
    time (correlated across times but unbiased; replications restore
    independence).  For each qualifying cell the hit rate multiplies a
    Monte Carlo average over splitting hyperplanes; the nested variant
    continues the process in both halves with fresh independent runs.  The
    time integral uses the trapezoid rule on ``s_grid``.
    """
    if s_grid is None:
        s_grid = np.linspace(0.0, functional.horizon, 33)
    s_grid = np.asarray(s_grid, dtype=float)
    fn = partial(_rhs_rep, functional=functional, window=window, inner=inner,
                 measure=measure, s_grid=s_grid, inner_mc=inner_mc,
                 master_seed=master_seed, name=name)
    return _estimate(parallel_map(fn, list(range(reps)), threads))


def ci_overlap_report(name: str, lhs: MeckeEstimate, rhs: MeckeEstimate,
                      seed: int | None = None) -> TestReport:
    """Acceptance by overlap of the two 95% confidence intervals."""
    gap = abs(lhs.mean - rhs.mean)
    budget = lhs.ci95_half + rhs.ci95_half
    return TestReport(
        name=name, statistic=gap, p_value=None,
        passed=bool(gap <= budget), threshold=budget,
        n_samples=lhs.reps + rhs.reps, seed=seed,
        details={"lhs": lhs.to_dict(), "rhs": rhs.to_dict()})
