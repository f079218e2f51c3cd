"""Coverage, expected-size, and dominance evaluation for region estimators.

Closed forms are used whenever an estimator exposes acceptance sets (the
masses are Gaussian interval integrals); Monte Carlo backs everything and
is the only route for the posterior-based estimator.

Monte Carlo draws are addressed by counter, not by call order: sample i of
an n-sample run always consumes uniform draw i, and auxiliary draws (for
estimators that need their own randomness) sit at offsets [n, 2n). Splitting
a run across workers partitions the counter range contiguously and
concatenates results in order, so the worker count cannot change any
reported number.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, InfeasibleConstructionError
from .models import TwoPointGaussianModel, GaussianLocationModel
from .regions import (
    BayesCredibleEstimator,
    DegenerateEstimator,
    FiducialEstimator,
    FlatPriorIntervalEstimator,
    ImprovedEstimator,
    RegionSpec,
    check_delta,
    fiducial_acceptance_sets,
)
from .specfun import RandomStream, gaussian_quantile

#: Tolerance for comparisons between closed-form quantities.
ANALYTIC_TOL = 1e-10

#: Width, in standard errors, of the Monte Carlo consistency window.
MC_SIGMAS = 4.0


@dataclass(frozen=True)
class CoverageEntry:
    """Coverage of one estimator at one parameter value."""

    theta: float
    nominal: float
    analytic: float
    mc_estimate: float
    mc_stderr: float
    n_samples: int


@dataclass(frozen=True)
class SizeEntry:
    """Expected region size of one estimator at one parameter value."""

    theta: float
    analytic: float
    mc_estimate: float
    mc_stderr: float
    n_samples: int


@dataclass(frozen=True)
class MarginEntry:
    """Size advantage of estimator A over B at one theta: E|B| - E|A|."""

    theta: float
    margin: float
    stderr: float
    method: str


@dataclass(frozen=True)
class DominanceVerdict:
    """Does A dominate B: never larger in expectation, strictly smaller somewhere?

    Analytic margins decide with tolerance ANALYTIC_TOL; Monte Carlo margins
    require MC_SIGMAS combined standard errors for a strict win and allow
    that much slack for "no larger".
    """

    weakly_no_larger_everywhere: bool
    strictly_smaller_somewhere: bool
    margins: tuple


@dataclass(frozen=True)
class RegimeCheck:
    """The two inequalities gating the counterexample construction.

    nesting: the label-1 acceptance interval ends before the label-0 one,
    i.e. 1 - sigma1 Phi^{-1}(delta) < -sigma0 Phi^{-1}(delta); by the
    symmetry of both intervals this nests the former inside the latter.
    mass_condition: the label-1 interval carries less than 2*delta mass
    under label 0, leaving room to rebuild the label-0 set disjointly.
    """

    nesting: bool
    mass_condition: bool
    label1_upper: float
    label0_upper: float
    cross_mass: float
    delta: float

    @property
    def satisfied(self):
        return self.nesting and self.mass_condition


@dataclass(frozen=True)
class CheckResult:
    """One verified relation: `observed relation expected` within tolerance."""

    name: str
    passed: bool
    observed: float
    expected: float
    relation: str
    tolerance: float


def _chunk_bounds(n, workers):
    """Contiguous [start, stop) chunks covering range(n), sizes differing by <= 1."""
    workers = max(1, min(int(workers), n))
    base, extra = divmod(n, workers)
    bounds = []
    start = 0
    for i in range(workers):
        stop = start + base + (1 if i < extra else 0)
        if stop > start:
            bounds.append((start, stop))
        start = stop
    return bounds


def _simulate(model, theta, stream: RandomStream, n, workers=1):
    """Draw n observations and n auxiliary uniforms at fixed counter offsets.

    Observation i uses draw index counter+i, auxiliary i uses counter+n+i.
    The worker count only affects how the index range is partitioned.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"sample count must be >= 1, got {n!r}")

    def run_chunk(bounds):
        start, stop = bounds
        ys = model.sample(theta, stream.advance(start), stop - start)
        aux = stream.advance(n + start).uniforms(stop - start)
        return ys, aux

    chunks = _chunk_bounds(n, workers)
    if len(chunks) == 1:
        parts = [run_chunk(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(run_chunk, chunks))
    ys = np.concatenate([p[0] for p in parts])
    aux = np.concatenate([p[1] for p in parts])
    return ys, aux


def coverage(model, estimator, theta, n, stream: RandomStream, workers=1) -> CoverageEntry:
    """Monte Carlo coverage of the estimator at theta, plus the closed form if any.

    Coverage is the fraction of y ~ p_theta whose estimated region contains
    theta; stderr is the binomial normal approximation sqrt(p(1-p)/n).
    """
    ys, aux = _simulate(model, theta, stream, n, workers)
    hits = np.asarray(estimator.covers_batch(theta, ys, aux), dtype=np.float64)
    n = int(n)
    p_hat = float(np.sum(hits)) / n
    stderr = math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n)
    return CoverageEntry(
        theta=theta,
        nominal=estimator.nominal,
        analytic=estimator.analytic_coverage(theta),
        mc_estimate=p_hat,
        mc_stderr=stderr,
        n_samples=n,
    )


def expected_size(model, estimator, theta, n, stream: RandomStream, workers=1) -> SizeEntry:
    """Monte Carlo expected region size at theta, plus the closed form if any.

    Size means label count for finite spaces and interval length for the
    location family. stderr uses the unbiased sample variance.
    """
    ys, aux = _simulate(model, theta, stream, n, workers)
    sizes = np.asarray(estimator.sizes_batch(ys, aux), dtype=np.float64)
    n = int(n)
    mean = float(np.sum(sizes)) / n
    if n > 1:
        variance = float(np.sum((sizes - mean) ** 2)) / (n - 1)
    else:
        variance = 0.0
    return SizeEntry(
        theta=theta,
        analytic=estimator.analytic_expected_size(theta),
        mc_estimate=mean,
        mc_stderr=math.sqrt(variance / n),
        n_samples=n,
    )


def cross_acceptance_mass(model: TwoPointGaussianModel, delta):
    """Mass of the label-1 acceptance interval under the label-0 distribution.

    This is the overlap the band rule pays for: whenever y lands in the
    label-1 interval while label 0 is true, the region picks up a second
    label. Equals Phi((1 - sigma1 q)/sigma0) - Phi((1 + sigma1 q)/sigma0)
    with q = Phi^{-1}(delta), computed here by integrating the label-0
    density over the interval.
    """
    delta = check_delta(delta)
    rule = fiducial_acceptance_sets(model, delta)
    return model.set_mass(0, rule.set_for(1))


def regime_check(model: TwoPointGaussianModel, delta) -> RegimeCheck:
    """Evaluate the two counterexample inequalities exactly as stated."""
    delta = check_delta(delta)
    q = gaussian_quantile(delta)
    label1_upper = 1.0 - model.sigma1 * q
    label0_upper = -model.sigma0 * q
    cross = cross_acceptance_mass(model, delta)
    return RegimeCheck(
        nesting=bool(label1_upper < label0_upper),
        mass_condition=bool(cross < 2.0 * delta),
        label1_upper=label1_upper,
        label0_upper=label0_upper,
        cross_mass=cross,
        delta=delta,
    )


def dominance(model, estimator_a, estimator_b, thetas, n, stream: RandomStream, workers=1) -> DominanceVerdict:
    """Compare expected sizes of A against B across thetas.

    Per theta the margin is E|B| - E|A| (positive favors A). Closed forms
    are compared exactly with tolerance ANALYTIC_TOL when both estimators
    provide them; otherwise both sides are estimated by Monte Carlo and the
    margin is judged against MC_SIGMAS combined standard errors.
    """
    margins = []
    for theta in thetas:
        size_a = estimator_a.analytic_expected_size(theta)
        size_b = estimator_b.analytic_expected_size(theta)
        if size_a is not None and size_b is not None:
            margins.append(MarginEntry(theta, size_b - size_a, 0.0, "analytic"))
        else:
            mc_a = expected_size(model, estimator_a, theta, n, stream, workers)
            mc_b = expected_size(model, estimator_b, theta, n, stream, workers)
            margins.append(
                MarginEntry(
                    theta,
                    mc_b.mc_estimate - mc_a.mc_estimate,
                    math.hypot(mc_a.mc_stderr, mc_b.mc_stderr),
                    "mc",
                )
            )
    weakly = True
    strictly = False
    for entry in margins:
        slack = ANALYTIC_TOL if entry.method == "analytic" else MC_SIGMAS * entry.stderr
        if entry.margin < -slack:
            weakly = False
        if entry.margin > slack and entry.margin > 0.0:
            strictly = True
    return DominanceVerdict(
        weakly_no_larger_everywhere=weakly,
        strictly_smaller_somewhere=strictly,
        margins=tuple(margins),
    )


def _relation_holds(observed, relation, expected, tolerance):
    if relation == "<=":
        return observed <= expected + tolerance
    if relation == ">=":
        return observed >= expected - tolerance
    if relation == ">":
        return observed > expected
    if relation == "==":
        return abs(observed - expected) <= tolerance
    raise ValueError(f"unknown relation {relation!r}")


def _check(name, observed, relation, expected, tolerance=0.0) -> CheckResult:
    return CheckResult(
        name=name,
        passed=bool(_relation_holds(observed, relation, expected, tolerance)),
        observed=float(observed),
        expected=float(expected),
        relation=relation,
        tolerance=float(tolerance),
    )


def _set_bounds(real_set):
    """JSON-friendly list of [lo, hi] interval endpoint pairs."""
    return [[lo, hi] for lo, hi in real_set]


def reproduce_counterexample(sigma0, sigma1, delta, n, seed, workers=1):
    """Run the full suboptimality demonstration and verify every claim in it.

    Returns a report dict. status is "outside_regime" (with the offending
    numbers) when the two regime inequalities do not both hold; otherwise
    "ok", with coverage and size tables for the band rule, the disjoint
    (improved) rule, and the data-free rule, a list of pass/fail checks for
    each verified relation, and the dominance verdict. `verified` is the
    conjunction of all checks.
    """
    model = TwoPointGaussianModel(sigma0=float(sigma0), sigma1=float(sigma1))
    delta = check_delta(delta)
    regime = regime_check(model, delta)
    report = {
        "inputs": {
            "sigma0": float(sigma0),
            "sigma1": float(sigma1),
            "delta": delta,
            "n": int(n),
            "seed": int(seed),
        },
        "regime": regime,
    }
    if not regime.satisfied:
        report["status"] = "outside_regime"
        report["verified"] = False
        return report
    report["status"] = "ok"

    stream = RandomStream(seed=int(seed))
    spec = RegionSpec.from_delta(delta)
    fiducial = FiducialEstimator(model, spec)
    improved = ImprovedEstimator(model, delta)
    degenerate = DegenerateEstimator(spec, model.parameter_space())
    estimators = (fiducial, improved, degenerate)
    cross = regime.cross_mass
    width = 1.0 - 2.0 * delta

    report["cross_acceptance_mass"] = cross
    report["acceptance_sets"] = {
        "fiducial": {
            "label0": _set_bounds(fiducial.rule.set_for(0)),
            "label1": _set_bounds(fiducial.rule.set_for(1)),
        },
        "improved": {
            "label0": _set_bounds(improved.rule.set_for(0)),
            "label1": _set_bounds(improved.rule.set_for(1)),
        },
    }

    coverage_table = {}
    size_table = {}
    for estimator in estimators:
        coverage_table[estimator.name] = [
            coverage(model, estimator, theta, n, stream, workers) for theta in (0, 1)
        ]
        size_table[estimator.name] = [
            expected_size(model, estimator, theta, n, stream, workers) for theta in (0, 1)
        ]
    report["coverage"] = coverage_table
    report["expected_size"] = size_table

    checks = []
    # Closed-form relations.
    for name, estimator in (("fiducial", fiducial), ("improved", improved)):
        for theta in (0, 1):
            checks.append(
                _check(
                    f"{name}_coverage_label{theta}",
                    estimator.analytic_coverage(theta),
                    "==",
                    width,
                    ANALYTIC_TOL,
                )
            )
    size_label1 = fiducial.analytic_expected_size(1)
    checks.append(
        _check("fiducial_size_label1_at_least_twice_width", size_label1, ">=", 2.0 * width, ANALYTIC_TOL)
    )
    checks.append(_check("fiducial_size_label1_exceeds_one", size_label1, ">", 1.0))
    checks.append(
        _check("fiducial_size_label0_formula", fiducial.analytic_expected_size(0), "==", width + cross, ANALYTIC_TOL)
    )
    checks.append(
        _check("improved_size_label0_formula", improved.analytic_expected_size(0), "==", width + cross, ANALYTIC_TOL)
    )
    checks.append(
        _check("improved_size_label1_at_most_one", improved.analytic_expected_size(1), "<=", 1.0, ANALYTIC_TOL)
    )
    checks.append(
        _check(
            "improved_label0_mass",
            model.set_mass(0, improved.rule.set_for(0)),
            "==",
            width,
            ANALYTIC_TOL,
        )
    )
    checks.append(
        _check(
            "improved_sets_disjoint",
            1.0 if improved.rule.set_for(0).is_disjoint(improved.rule.set_for(1)) else 0.0,
            "==",
            1.0,
        )
    )
    grid = np.linspace(-50.0, 50.0, 10_000)
    checks.append(
        _check("improved_pointwise_size_at_most_one", float(np.max(improved.rule.sizes(grid))), "<=", 1.0)
    )
    # Monte Carlo consistency with the closed forms.
    for estimator in estimators:
        for entry in coverage_table[estimator.name]:
            checks.append(
                _check(
                    f"{estimator.name}_coverage_mc_label{entry.theta}",
                    abs(entry.mc_estimate - entry.analytic),
                    "<=",
                    MC_SIGMAS * max(entry.mc_stderr, 1.0 / entry.n_samples),
                )
            )
        for entry in size_table[estimator.name]:
            checks.append(
                _check(
                    f"{estimator.name}_size_mc_label{entry.theta}",
                    abs(entry.mc_estimate - entry.analytic),
                    "<=",
                    MC_SIGMAS * max(entry.mc_stderr, 1.0 / entry.n_samples),
                )
            )
    mc_size_label1 = size_table["fiducial"][1].mc_estimate
    checks.append(_check("fiducial_size_label1_mc_exceeds_one", mc_size_label1, ">", 1.0))

    verdict = dominance(model, improved, fiducial, (0, 1), n, stream, workers)
    checks.append(
        _check(
            "improved_dominates_weakly",
            1.0 if verdict.weakly_no_larger_everywhere else 0.0,
            "==",
            1.0,
        )
    )
    checks.append(
        _check(
            "improved_dominates_strictly",
            1.0 if verdict.strictly_smaller_somewhere else 0.0,
            "==",
            1.0,
        )
    )

    report["dominance"] = verdict
    report["checks"] = checks
    report["verified"] = all(c.passed for c in checks)
    return report


def bayes_miscoverage_study(model, true_prior1, assumed_prior1, level, n, seed, workers=1, thetas=None):
    """Frequentist coverage of a posterior credible rule built from an assumed prior.

    For the two-point model the rule is the highest-posterior-mass region
    under `assumed_prior1`; coverage is evaluated at each label and entries
    whose Monte Carlo coverage sits more than MC_SIGMAS standard errors from
    the nominal level are flagged, with the direction of the deviation.
    When `true_prior1` is given, a prior-weighted average coverage is also
    reported (the Bayes calibration that holds when the assumed prior is the
    true one).

    For the location family the credible rule under a flat prior is the
    posterior-quantile interval with the symmetric band matching `level`;
    the priors are ignored and coverage is checked at a default grid of
    locations (it is exactly `level` for every theta).
    """
    level = float(level)
    stream = RandomStream(seed=int(seed))
    if isinstance(model, GaussianLocationModel):
        spec = RegionSpec(0.5 * (1.0 - level), 0.5 * (1.0 + level))
        estimator = FlatPriorIntervalEstimator(model, spec)
        if thetas is None:
            thetas = (-1.5, 0.0, 2.0)
        kind = "location_flat_prior"
    else:
        estimator = BayesCredibleEstimator(model, assumed_prior1, level)
        if thetas is None:
            thetas = (0, 1)
        kind = "two_point_credible"

    entries = [coverage(model, estimator, theta, n, stream, workers) for theta in thetas]
    flagged = []
    for entry in entries:
        deviation = entry.mc_estimate - level
        if abs(deviation) > MC_SIGMAS * entry.mc_stderr:
            flagged.append(
                {
                    "theta": entry.theta,
                    "deviation": deviation,
                    "stderr": entry.mc_stderr,
                    "direction": "above" if deviation > 0.0 else "below",
                }
            )
    report = {
        "kind": kind,
        "level": level,
        "assumed_prior1": None if assumed_prior1 is None else float(assumed_prior1),
        "true_prior1": None if true_prior1 is None else float(true_prior1),
        "n": int(n),
        "seed": int(seed),
        "entries": entries,
        "flagged": flagged,
    }
    if kind == "two_point_credible" and true_prior1 is not None:
        weights = (1.0 - float(true_prior1), float(true_prior1))
        by_theta = {entry.theta: entry.mc_estimate for entry in entries}
        if 0 in by_theta and 1 in by_theta:
            report["prior_weighted_coverage"] = (
                weights[0] * by_theta[0] + weights[1] * by_theta[1]
            )
    return report


def sweep_rows(sigma0, sigma1, delta, axis, values):
    """Closed-form sweep along one parameter axis.

    axis is one of "delta", "sigma0", "sigma1"; each value replaces that
    parameter while the others stay at the given base settings. Every row
    reports the regime flags, the cross-acceptance mass, and the analytic
    expected sizes of the band rule and (when constructible) the disjoint
    rule at both labels.
    """
    if axis not in ("delta", "sigma0", "sigma1"):
        raise DomainError(f"sweep axis must be delta, sigma0, or sigma1, got {axis!r}")
    values = list(values)
    if not values:
        raise DomainError("sweep needs at least one value")
    rows = []
    for value in values:
        params = {"sigma0": float(sigma0), "sigma1": float(sigma1), "delta": float(delta)}
        params[axis] = float(value)
        model = TwoPointGaussianModel(sigma0=params["sigma0"], sigma1=params["sigma1"])
        d = check_delta(params["delta"])
        regime = regime_check(model, d)
        fiducial = FiducialEstimator(model, RegionSpec.from_delta(d))
        row = {
            "sigma0": params["sigma0"],
            "sigma1": params["sigma1"],
            "delta": d,
            "regime_nesting": regime.nesting,
            "regime_mass_condition": regime.mass_condition,
            "cross_acceptance_mass": regime.cross_mass,
            "fiducial_size_label0": fiducial.analytic_expected_size(0),
            "fiducial_size_label1": fiducial.analytic_expected_size(1),
        }
        try:
            improved = ImprovedEstimator(model, d)
        except InfeasibleConstructionError:
            row["improved_size_label0"] = None
            row["improved_size_label1"] = None
        else:
            row["improved_size_label0"] = improved.analytic_expected_size(0)
            row["improved_size_label1"] = improved.analytic_expected_size(1)
        rows.append(row)
    return rows
