"""Parametric observation models.

Two families are supported:

* a two-point Gaussian location model: the observation comes from
  N(0, sigma0^2) under parameter label 0 or from N(1, sigma1^2) under
  label 1, with both scales known;
* a Gaussian location family N(theta, sigma^2) with known scale and a
  free real location.

Each model exposes the per-parameter CDF, quantile, log-density, interval
mass, and an inverse-CDF sampler driven by a counter-addressed stream, so
samples are a pure function of (seed, draw index).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .exceptions import DomainError, ParameterError
from .specfun import RandomStream, integrate_density, open_unit

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class FiniteParameterSpace:
    """Parameter labels 0 .. size-1."""

    size: int

    @property
    def is_finite(self):
        return True

    @property
    def labels(self):
        return tuple(range(self.size))

    def contains(self, theta):
        return theta in self.labels


@dataclass(frozen=True)
class RealLineParameterSpace:
    """The whole real line; unbounded continuous parameter domain."""

    @property
    def is_finite(self):
        return False

    def contains(self, theta):
        try:
            return math.isfinite(float(theta))
        except (TypeError, ValueError):
            return False


def _check_observation(y):
    y = float(y)
    if not math.isfinite(y):
        raise DomainError(f"observation must be finite, got {y!r}")
    return y


def _check_sigma(value, name):
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class TwoPointGaussianModel:
    """Gaussian observation at one of two known locations, 0 and 1.

    sigma0 and sigma1 are the (known, not necessarily equal) standard
    deviations under labels 0 and 1.
    """

    sigma0: float
    sigma1: float

    #: Fixed component locations, indexed by label.
    LOCATIONS = (0.0, 1.0)

    def __post_init__(self):
        _check_sigma(self.sigma0, "sigma0")
        _check_sigma(self.sigma1, "sigma1")

    def parameter_space(self):
        return FiniteParameterSpace(2)

    def location_scale(self, theta):
        """(mean, sigma) of the observation distribution under a label."""
        if theta == 0:
            return 0.0, float(self.sigma0)
        if theta == 1:
            return 1.0, float(self.sigma1)
        raise ParameterError(f"parameter label must be 0 or 1, got {theta!r}")

    def cdf(self, theta, y):
        mean, sigma = self.location_scale(theta)
        y = _check_observation(y)
        return float(ndtr((y - mean) / sigma))

    def cdf_array(self, theta, ys):
        mean, sigma = self.location_scale(theta)
        ys = np.asarray(ys, dtype=np.float64)
        return ndtr((ys - mean) / sigma)

    def quantile(self, theta, p):
        mean, sigma = self.location_scale(theta)
        p = float(p)
        if math.isnan(p) or not 0.0 < p < 1.0:
            raise DomainError(f"quantile requires 0 < p < 1, got {p!r}")
        return mean + sigma * float(ndtri(p))

    def log_pdf(self, theta, y):
        mean, sigma = self.location_scale(theta)
        y = _check_observation(y)
        z = (y - mean) / sigma
        return -0.5 * z * z - math.log(sigma) - _LOG_SQRT_2PI

    def log_pdf_array(self, theta, ys):
        mean, sigma = self.location_scale(theta)
        ys = np.asarray(ys, dtype=np.float64)
        z = (ys - mean) / sigma
        return -0.5 * z * z - math.log(sigma) - _LOG_SQRT_2PI

    def sample(self, theta, stream: RandomStream, count):
        """count inverse-CDF draws using stream indices [counter, counter+count)."""
        mean, sigma = self.location_scale(theta)
        us = open_unit(stream.uniforms(count))
        return mean + sigma * ndtri(us)

    def interval_mass(self, theta, lo, hi):
        mean, sigma = self.location_scale(theta)
        return integrate_density(lo, hi, mean=mean, sigma=sigma)

    def set_mass(self, theta, real_set):
        """Probability mass of a RealSet of observations under a label."""
        return float(sum(self.interval_mass(theta, lo, hi) for lo, hi in real_set))


@dataclass(frozen=True)
class GaussianLocationModel:
    """Location family N(theta, sigma^2) with known scale."""

    sigma: float

    def __post_init__(self):
        _check_sigma(self.sigma, "sigma")

    def parameter_space(self):
        return RealLineParameterSpace()

    def _check_theta(self, theta):
        theta = float(theta)
        if not math.isfinite(theta):
            raise ParameterError(f"location parameter must be finite, got {theta!r}")
        return theta

    def cdf(self, theta, y):
        theta = self._check_theta(theta)
        y = _check_observation(y)
        return float(ndtr((y - theta) / self.sigma))

    def cdf_array(self, theta, ys):
        theta = self._check_theta(theta)
        ys = np.asarray(ys, dtype=np.float64)
        return ndtr((ys - theta) / self.sigma)

    def quantile(self, theta, p):
        theta = self._check_theta(theta)
        p = float(p)
        if math.isnan(p) or not 0.0 < p < 1.0:
            raise DomainError(f"quantile requires 0 < p < 1, got {p!r}")
        return theta + self.sigma * float(ndtri(p))

    def sample(self, theta, stream: RandomStream, count):
        theta = self._check_theta(theta)
        us = open_unit(stream.uniforms(count))
        return theta + self.sigma * ndtri(us)

    def interval_mass(self, theta, lo, hi):
        theta = self._check_theta(theta)
        return integrate_density(lo, hi, mean=theta, sigma=self.sigma)
