"""Region estimators built on a pivot band.

Everything here revolves around the band (alpha, beta). The pivot
U(y; theta) = F_theta(y) is uniform on (0, 1) when y is drawn under theta,
so *any* rule that includes theta exactly when some Uniform(0,1) quantity
lands strictly inside the band covers the truth with probability
beta - alpha. The estimators in this module exercise that freedom in
different ways:

* the fiducial rule inverts the pivot pointwise in y;
* the degenerate rule flips an auxiliary coin and ignores y entirely;
* the improved rule keeps the label-1 acceptance interval but reshapes
  label 0's so the two never overlap, which caps the region size at one
  label without losing coverage;
* the Bayes rule ranks labels by posterior mass, which calibrates only
  when the assumed prior matches the data-generating one.

Rule-based estimators expose their per-label acceptance sets, so coverage
and expected size have closed forms (Gaussian interval masses) alongside
Monte Carlo estimates.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateEvidenceError,
    DomainError,
    InfeasibleConstructionError,
    ParameterError,
)
from .intervals import RealSet
from .models import GaussianLocationModel, TwoPointGaussianModel
from .specfun import (
    MIN_OPEN_UNIFORM,
    UNBOUNDED_ABOVE,
    UNBOUNDED_BELOW,
    check_probability,
    gaussian_quantile,
    open_unit,
)

#: Absolute tolerance for probability-mass bookkeeping in set constructions.
MASS_TOL = 1e-12


def check_delta(delta):
    """Validate the tail probability used by the two-sided (delta, 1-delta) band.

    The counterexample pipeline requires 0 < delta < 0.25 so that the band has
    width above one half and both acceptance intervals are proper.
    """
    delta = float(delta)
    if math.isnan(delta) or not 0.0 < delta < 0.25:
        raise DomainError(f"delta must lie strictly in (0, 0.25), got {delta!r}")
    return delta


@dataclass(frozen=True)
class RegionSpec:
    """Pivot band edges; theta is reported when the pivot is in (alpha, beta)."""

    alpha: float
    beta: float

    def __post_init__(self):
        check_probability(self.alpha, "alpha")
        check_probability(self.beta, "beta")
        if not self.alpha <= self.beta:
            raise DomainError(
                f"band requires alpha <= beta, got ({self.alpha!r}, {self.beta!r})"
            )

    @classmethod
    def from_delta(cls, delta):
        """Symmetric band (delta, 1 - delta)."""
        delta = check_delta(delta)
        return cls(delta, 1.0 - delta)

    @property
    def width(self):
        """Nominal coverage probability of any band-driven rule."""
        return self.beta - self.alpha


@dataclass(frozen=True)
class FiniteRegion:
    """Subset of a finite label space, kept as a sorted tuple."""

    included: tuple

    def __post_init__(self):
        labels = tuple(sorted(set(int(t) for t in self.included)))
        object.__setattr__(self, "included", labels)

    def contains(self, theta):
        return theta in self.included

    @property
    def size(self):
        return len(self.included)

    @property
    def is_empty(self):
        return not self.included


@dataclass(frozen=True)
class IntervalRegion:
    """Region over a continuous parameter line, backed by a RealSet."""

    support: RealSet

    def contains(self, theta):
        return self.support.contains(theta)

    @property
    def size(self):
        return self.support.total_length

    @property
    def is_empty(self):
        return self.support.is_empty


@dataclass(frozen=True)
class AcceptanceRule:
    """Per-label observation sets: label k is reported exactly when y is in sets[k].

    This is the estimator-as-acceptance-sets view: coverage at label k is the
    p_k-mass of sets[k], and the expected region size under label k is the sum
    of p_k-masses over all labels' sets.
    """

    sets: tuple

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        for entry in self.sets:
            if not isinstance(entry, RealSet):
                raise DomainError(f"acceptance sets must be RealSet, got {entry!r}")

    @property
    def labels(self):
        return tuple(range(len(self.sets)))

    def set_for(self, label):
        if label not in self.labels:
            raise ParameterError(f"no acceptance set for label {label!r}")
        return self.sets[label]

    def region(self, y):
        included = tuple(k for k in self.labels if self.sets[k].contains(y))
        return FiniteRegion(included)

    def covers(self, label, ys):
        """Boolean array: does the region at each y include this label?"""
        return self.set_for(label).contains_array(ys)

    def sizes(self, ys):
        """Region cardinality at each y, as float64."""
        ys = np.asarray(ys, dtype=np.float64)
        total = np.zeros(ys.shape, dtype=np.float64)
        for entry in self.sets:
            total += entry.contains_array(ys)
        return total


def _band_interval(mean, sigma, spec: RegionSpec):
    """Observations whose N(mean, sigma^2) pivot lies strictly inside the band."""
    if spec.alpha == spec.beta:
        return RealSet.empty()
    lo = UNBOUNDED_BELOW if spec.alpha == 0.0 else mean + sigma * gaussian_quantile(spec.alpha)
    hi = UNBOUNDED_ABOVE if spec.beta == 1.0 else mean + sigma * gaussian_quantile(spec.beta)
    return RealSet.interval(lo, hi)


def band_acceptance_sets(model: TwoPointGaussianModel, spec: RegionSpec) -> AcceptanceRule:
    """Acceptance sets of the plain band rule on the two-point model.

    Label k is accepted when alpha < F_k(y) < beta, i.e. when y falls in the
    (alpha, beta) quantile interval of component k.
    """
    return AcceptanceRule(
        tuple(
            _band_interval(*model.location_scale(label), spec)
            for label in (0, 1)
        )
    )


def fiducial_acceptance_sets(model: TwoPointGaussianModel, delta) -> AcceptanceRule:
    """Symmetric-band acceptance sets: quantile intervals at levels (delta, 1-delta).

    For label 0 this is (sigma0 q, -sigma0 q) and for label 1 it is
    (1 + sigma1 q, 1 - sigma1 q), where q = Phi^{-1}(delta) < 0.
    """
    delta = check_delta(delta)
    return band_acceptance_sets(model, RegionSpec(delta, 1.0 - delta))


def fiducial_region(model, spec: RegionSpec, y):
    """Parameter set whose pivot at y lies strictly inside the band.

    Finite spaces get the label subset {k: alpha < F_k(y) < beta}. The
    Gaussian location family gets the theta-interval obtained by inverting
    the pivot: (y - sigma Phi^{-1}(beta), y - sigma Phi^{-1}(alpha)).
    """
    space = model.parameter_space()
    if space.is_finite:
        included = tuple(
            k for k in space.labels if spec.alpha < model.cdf(k, y) < spec.beta
        )
        return FiniteRegion(included)
    if spec.alpha == spec.beta:
        return IntervalRegion(RealSet.empty())
    y = float(y)
    lo = UNBOUNDED_BELOW if spec.beta == 1.0 else y - model.sigma * gaussian_quantile(spec.beta)
    hi = UNBOUNDED_ABOVE if spec.alpha == 0.0 else y - model.sigma * gaussian_quantile(spec.alpha)
    return IntervalRegion(RealSet.interval(lo, hi))


def degenerate_region(spec: RegionSpec, stream, space):
    """Data-free region: full space if one auxiliary uniform hits the band, else empty.

    Draws a single uniform at the stream's current counter. The result does
    not depend on the observation or the parameter at all, yet it covers any
    truth with probability beta - alpha.
    """
    u = max(float(stream.uniforms(1)[0]), MIN_OPEN_UNIFORM)
    inside = spec.alpha < u < spec.beta
    if space.is_finite:
        return FiniteRegion(space.labels if inside else ())
    return IntervalRegion(RealSet.full_line() if inside else RealSet.empty())


def rule_region(rule: AcceptanceRule, y) -> FiniteRegion:
    """Labels whose acceptance set contains the observation."""
    return rule.region(y)


def _tail_extension(sigma0, delta, side, amount, blocked: RealSet):
    """Extension segment adding `amount` of N(0, sigma0^2) mass beyond one band edge.

    side 'low' extends the lower edge sigma0 Phi^{-1}(delta) down to the
    sigma0 Phi^{-1}(delta - amount) quantile point; 'high' mirrors this above
    the upper edge. Returns None when this tail cannot absorb the mass,
    either because the target quantile level leaves (0, 1) or because the
    segment would run into the `blocked` set.
    """
    if side == "low":
        level = delta - amount
        edge = sigma0 * gaussian_quantile(delta)
    else:
        level = (1.0 - delta) + amount
        edge = sigma0 * gaussian_quantile(1.0 - delta)
    if not 0.0 < level < 1.0:
        return None
    point = sigma0 * gaussian_quantile(level)
    segment = RealSet.interval(point, edge) if side == "low" else RealSet.interval(edge, point)
    if not segment.is_disjoint(blocked):
        return None
    return segment


def improved_acceptance_sets(model: TwoPointGaussianModel, delta) -> AcceptanceRule:
    """Disjoint-label acceptance sets with the same per-label coverage as the band rule.

    The band rule's label-0 interval can swallow the whole label-1 interval,
    which is what lets its regions contain both labels at once. This
    construction removes the overlap and pays the lost label-0 mass back in
    the tails:

    1. start from the set difference (label-0 band interval) minus (label-1
       band interval), whose N(0, sigma0^2) mass falls short of 1 - 2 delta
       by exactly the overlap mass;
    2. extend the outer edges outward, half the missing mass per tail,
       placing the new endpoints by Gaussian quantile so the added mass is
       exact by construction;
    3. if one tail cannot absorb its half (the segment would re-enter the
       label-1 set, or the quantile level would leave (0, 1)), route the
       whole remainder to the other tail.

    The result keeps label-0 coverage at 1 - 2 delta, never overlaps the
    label-1 set, and therefore reports at most one label for every y. It is
    one admissible choice among many: any mass-(1 - 2 delta) set disjoint
    from the label-1 interval would do.

    Requires the overlap condition mass(label-1 set under label 0) < 2 delta;
    otherwise there is not enough room outside the label-1 interval and the
    construction fails with InfeasibleConstructionError.
    """
    delta = check_delta(delta)
    base = fiducial_acceptance_sets(model, delta)
    omega0 = base.set_for(0)
    omega1 = base.set_for(1)

    cross_mass = model.set_mass(0, omega1)
    if cross_mass >= 2.0 * delta:
        raise InfeasibleConstructionError(
            "label-1 acceptance set carries mass "
            f"{cross_mass:.6g} >= 2*delta = {2.0 * delta:.6g} under label 0; "
            "no disjoint label-0 set of mass 1 - 2*delta exists along this construction"
        )

    kept = omega0.subtract(omega1)
    target = 1.0 - 2.0 * delta
    deficit = target - model.set_mass(0, kept)

    if deficit > MASS_TOL:
        half = 0.5 * deficit
        low = _tail_extension(model.sigma0, delta, "low", half, omega1)
        high = _tail_extension(model.sigma0, delta, "high", half, omega1)
        if low is None or high is None:
            # One tail is blocked: try pushing everything through the other.
            full_high = _tail_extension(model.sigma0, delta, "high", deficit, omega1)
            full_low = _tail_extension(model.sigma0, delta, "low", deficit, omega1)
            if full_high is not None:
                low, high = RealSet.empty(), full_high
            elif full_low is not None:
                low, high = full_low, RealSet.empty()
            else:
                raise InfeasibleConstructionError(
                    "cannot place the missing label-0 mass in either tail "
                    "without touching the label-1 acceptance set"
                )
        kept = kept.union(low).union(high)

    achieved = model.set_mass(0, kept)
    if abs(achieved - target) > 1e-10:
        raise InfeasibleConstructionError(
            f"constructed label-0 set has mass {achieved!r}, wanted {target!r}"
        )
    if not kept.is_disjoint(omega1):
        raise InfeasibleConstructionError(
            "constructed label-0 set overlaps the label-1 acceptance set"
        )
    return AcceptanceRule((kept, omega1))


def bayes_posterior(model: TwoPointGaussianModel, prior1, y):
    """Posterior probability of label 1 given y, for prior mass prior1 on label 1.

    Computed in log space. Raises DegenerateEvidenceError if both component
    log-densities are -inf (possible only for absurdly large |y| where z^2
    overflows).
    """
    prior1 = check_probability(prior1, "prior1")
    if prior1 == 0.0:
        return 0.0
    if prior1 == 1.0:
        return 1.0
    log0 = math.log1p(-prior1) + model.log_pdf(0, y)
    log1 = math.log(prior1) + model.log_pdf(1, y)
    if math.isinf(log0) and math.isinf(log1):
        raise DegenerateEvidenceError(
            f"both component likelihoods vanished at y={y!r}"
        )
    top = max(log0, log1)
    w0 = math.exp(log0 - top)
    w1 = math.exp(log1 - top)
    return w1 / (w0 + w1)


def bayes_posterior_array(model: TwoPointGaussianModel, prior1, ys):
    """Vectorized bayes_posterior over an observation array."""
    prior1 = check_probability(prior1, "prior1")
    ys = np.asarray(ys, dtype=np.float64)
    if prior1 == 0.0:
        return np.zeros(ys.shape, dtype=np.float64)
    if prior1 == 1.0:
        return np.ones(ys.shape, dtype=np.float64)
    log0 = math.log1p(-prior1) + model.log_pdf_array(0, ys)
    log1 = math.log(prior1) + model.log_pdf_array(1, ys)
    degenerate = np.isneginf(log0) & np.isneginf(log1)
    if np.any(degenerate):
        raise DegenerateEvidenceError(
            "both component likelihoods vanished for some observations"
        )
    top = np.maximum(log0, log1)
    w0 = np.exp(log0 - top)
    w1 = np.exp(log1 - top)
    return w1 / (w0 + w1)


def _check_level(level):
    level = float(level)
    if math.isnan(level) or not 0.0 < level < 1.0:
        raise DomainError(f"credible level must lie strictly in (0, 1), got {level!r}")
    return level


def bayes_credible_region(model: TwoPointGaussianModel, prior1, level, y) -> FiniteRegion:
    """Highest-posterior-mass label set reaching the credible level.

    Labels enter in decreasing posterior order (ties go to the lower label)
    until the accumulated posterior mass is at least `level`. With two
    labels this is: top label alone if its mass already reaches the level,
    otherwise both.
    """
    level = _check_level(level)
    p1 = bayes_posterior(model, prior1, y)
    p0 = 1.0 - p1
    first, top = (0, p0) if p0 >= p1 else (1, p1)
    if top >= level:
        return FiniteRegion((first,))
    return FiniteRegion((0, 1))


def flat_prior_location_interval(model: GaussianLocationModel, spec: RegionSpec, y):
    """Posterior-quantile interval for the location family under a flat prior.

    The flat-prior posterior for theta given y is N(y, sigma^2), so the
    (alpha, beta) posterior-quantile interval is
    (y + sigma Phi^{-1}(alpha), y + sigma Phi^{-1}(beta)). For symmetric
    bands beta = 1 - alpha this coincides with the fiducial interval.
    """
    if spec.alpha == spec.beta:
        raise DomainError(
            f"posterior-quantile interval needs alpha < beta, got both {spec.alpha!r}"
        )
    y = float(y)
    lo = UNBOUNDED_BELOW if spec.alpha == 0.0 else y + model.sigma * gaussian_quantile(spec.alpha)
    hi = UNBOUNDED_ABOVE if spec.beta == 1.0 else y + model.sigma * gaussian_quantile(spec.beta)
    return IntervalRegion(RealSet.interval(lo, hi))


class AcceptanceRuleEstimator:
    """Estimator defined by explicit per-label acceptance sets.

    Coverage and expected size have closed forms: coverage at label k is the
    p_k-mass of k's own set, expected size under k sums the p_k-masses of
    every label's set.
    """

    uses_aux = False

    def __init__(self, model: TwoPointGaussianModel, rule: AcceptanceRule, nominal, name):
        self.model = model
        self.rule = rule
        self.nominal = float(nominal)
        self.name = name

    def region(self, y, aux=None):
        return self.rule.region(y)

    def covers_batch(self, theta, ys, aux=None):
        return self.rule.covers(theta, ys)

    def sizes_batch(self, ys, aux=None):
        return self.rule.sizes(ys)

    def analytic_coverage(self, theta):
        return self.model.set_mass(theta, self.rule.set_for(theta))

    def analytic_expected_size(self, theta):
        return float(sum(self.model.set_mass(theta, s) for s in self.rule.sets))


class FiducialEstimator(AcceptanceRuleEstimator):
    """Plain band rule on the two-point model."""

    def __init__(self, model: TwoPointGaussianModel, spec: RegionSpec):
        super().__init__(model, band_acceptance_sets(model, spec), spec.width, "fiducial")
        self.spec = spec


class ImprovedEstimator(AcceptanceRuleEstimator):
    """Disjoint-label rule; same per-label coverage, at most one label per region."""

    def __init__(self, model: TwoPointGaussianModel, delta):
        delta = check_delta(delta)
        super().__init__(
            model, improved_acceptance_sets(model, delta), 1.0 - 2.0 * delta, "improved"
        )
        self.delta = delta


class DegenerateEstimator:
    """Coin-flip rule: full parameter space or nothing, independent of the data.

    Consumes one auxiliary uniform per evaluation (the `aux` argument of the
    batch methods); it is the only estimator here with uses_aux set.
    """

    uses_aux = True
    name = "degenerate"

    def __init__(self, spec: RegionSpec, space):
        self.spec = spec
        self.space = space
        self.nominal = spec.width

    def _space_size(self):
        return float(self.space.size) if self.space.is_finite else math.inf

    def _check_theta(self, theta):
        if not self.space.contains(theta):
            raise ParameterError(f"parameter {theta!r} outside the estimator's space")

    def region(self, y, aux):
        inside = self.spec.alpha < max(float(aux), MIN_OPEN_UNIFORM) < self.spec.beta
        if self.space.is_finite:
            return FiniteRegion(self.space.labels if inside else ())
        return IntervalRegion(RealSet.full_line() if inside else RealSet.empty())

    def _inside(self, aux):
        u = open_unit(np.asarray(aux, dtype=np.float64))
        return (self.spec.alpha < u) & (u < self.spec.beta)

    def covers_batch(self, theta, ys, aux):
        self._check_theta(theta)
        return self._inside(aux)

    def sizes_batch(self, ys, aux):
        return np.where(self._inside(aux), self._space_size(), 0.0)

    def analytic_coverage(self, theta):
        self._check_theta(theta)
        return self.nominal

    def analytic_expected_size(self, theta):
        if not self.space.is_finite:
            return math.inf if self.nominal > 0.0 else 0.0
        return self.nominal * self.space.size


class BayesCredibleEstimator:
    """Highest-posterior-mass rule on the two-point model.

    No closed-form coverage is attempted; evaluation falls back to Monte
    Carlo for this estimator.
    """

    uses_aux = False
    name = "bayes"

    def __init__(self, model: TwoPointGaussianModel, prior1, level):
        self.model = model
        self.prior1 = check_probability(prior1, "prior1")
        self.level = _check_level(level)
        self.nominal = self.level

    def region(self, y, aux=None):
        return bayes_credible_region(self.model, self.prior1, self.level, y)

    def _posteriors(self, ys):
        p1 = bayes_posterior_array(self.model, self.prior1, ys)
        return 1.0 - p1, p1

    def covers_batch(self, theta, ys, aux=None):
        p0, p1 = self._posteriors(ys)
        if theta == 0:
            return (p0 >= p1) | (p1 < self.level)
        if theta == 1:
            return (p1 > p0) | (p0 < self.level)
        raise ParameterError(f"parameter label must be 0 or 1, got {theta!r}")

    def sizes_batch(self, ys, aux=None):
        p0, p1 = self._posteriors(ys)
        return 1.0 + (np.maximum(p0, p1) < self.level)

    def analytic_coverage(self, theta):
        return None

    def analytic_expected_size(self, theta):
        return None


class _LocationIntervalEstimator:
    """Shared machinery for constant-width interval rules on the location family."""

    uses_aux = False

    def __init__(self, model: GaussianLocationModel, spec: RegionSpec, name):
        if spec.alpha == spec.beta:
            raise DomainError("interval rule needs a band of positive width")
        self.model = model
        self.spec = spec
        self.name = name
        self.nominal = spec.width
        # Observation offsets: theta is covered iff theta + off_lo < y < theta + off_hi.
        self._off_lo, self._off_hi = self._coverage_offsets()

    def covers_batch(self, theta, ys, aux=None):
        theta = float(theta)
        ys = np.asarray(ys, dtype=np.float64)
        return (theta + self._off_lo < ys) & (ys < theta + self._off_hi)

    def sizes_batch(self, ys, aux=None):
        ys = np.asarray(ys, dtype=np.float64)
        return np.full(ys.shape, self._length(), dtype=np.float64)

    def _length(self):
        if self.spec.alpha == 0.0 or self.spec.beta == 1.0:
            return math.inf
        return self.model.sigma * (
            gaussian_quantile(self.spec.beta) - gaussian_quantile(self.spec.alpha)
        )

    def analytic_coverage(self, theta):
        return self.nominal

    def analytic_expected_size(self, theta):
        return self._length()


class FiducialIntervalEstimator(_LocationIntervalEstimator):
    """Pivot-inversion interval (y - sigma q_beta, y - sigma q_alpha) on the location family."""

    def __init__(self, model: GaussianLocationModel, spec: RegionSpec):
        super().__init__(model, spec, "fiducial")

    def region(self, y, aux=None):
        return fiducial_region(self.model, self.spec, y)

    def _coverage_offsets(self):
        # theta in (y - sigma q_beta, y - sigma q_alpha) iff
        # theta + sigma q_alpha < y < theta + sigma q_beta.
        lo = UNBOUNDED_BELOW if self.spec.alpha == 0.0 else self.model.sigma * gaussian_quantile(self.spec.alpha)
        hi = UNBOUNDED_ABOVE if self.spec.beta == 1.0 else self.model.sigma * gaussian_quantile(self.spec.beta)
        return lo, hi


class FlatPriorIntervalEstimator(_LocationIntervalEstimator):
    """Flat-prior posterior-quantile interval (y + sigma q_alpha, y + sigma q_beta)."""

    def __init__(self, model: GaussianLocationModel, spec: RegionSpec):
        super().__init__(model, spec, "flat_prior")

    def region(self, y, aux=None):
        return flat_prior_location_interval(self.model, self.spec, y)

    def _coverage_offsets(self):
        # theta in (y + sigma q_alpha, y + sigma q_beta) iff
        # theta - sigma q_beta < y < theta - sigma q_alpha.
        lo = UNBOUNDED_BELOW if self.spec.beta == 1.0 else -self.model.sigma * gaussian_quantile(self.spec.beta)
        hi = UNBOUNDED_ABOVE if self.spec.alpha == 0.0 else -self.model.sigma * gaussian_quantile(self.spec.alpha)
        return lo, hi
