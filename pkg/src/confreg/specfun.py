"""Scalar numerics underpinning the rest of the package.

Standard Gaussian CDF and quantile, Gaussian interval mass, bracketed
root-finding, and a counter-addressed uniform random stream.  Everything
here is a pure function of its inputs; the stream is an immutable value.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri

from .exceptions import BracketError, DomainError

#: Sentinels for unbounded interval endpoints.  Interval masses treat them
#: as CDF limits (0 below, 1 above).
UNBOUNDED_BELOW = float("-inf")
UNBOUNDED_ABOVE = float("inf")

#: Smallest uniform draw admitted into open-interval (0, 1) consumers such
#: as inverse-CDF sampling.  Raw stream draws live in [0, 1); a draw of
#: exactly 0.0 (probability 2**-53) is bumped up to this value.
MIN_OPEN_UNIFORM = 2.0 ** -53


def check_probability(p, name="p"):
    """Validate a probability in the closed interval [0, 1] and return it."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {p!r}")
    return p


def gaussian_cdf(z):
    """Standard Gaussian CDF Phi(z).

    Backed by the erfc-based implementation in scipy.special.ndtr, whose
    absolute error is at the level of a few ulp, well inside the 1e-12
    budget on [-8, 8].

    Raises DomainError for non-finite input.
    """
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"gaussian_cdf requires finite z, got {z!r}")
    return float(ndtr(z))


def gaussian_quantile(p):
    """Inverse of the standard Gaussian CDF on the open interval (0, 1).

    The endpoints map to -inf/+inf and are rejected; callers that need the
    limits handle them explicitly.  Roundtrip |Phi(Phi^-1(p)) - p| stays
    below 1e-9 across (1e-6, 1 - 1e-6).
    """
    p = float(p)
    if math.isnan(p) or not 0.0 < p < 1.0:
        raise DomainError(f"gaussian_quantile requires 0 < p < 1, got {p!r}")
    return float(ndtri(p))


def integrate_density(lo, hi, mean=0.0, sigma=1.0):
    """Gaussian probability mass of the interval (lo, hi) under N(mean, sigma^2).

    Computed as Phi((hi - mean)/sigma) - Phi((lo - mean)/sigma), with the
    difference rearranged into the tail that avoids cancellation against 1.
    Endpoints may be UNBOUNDED_BELOW / UNBOUNDED_ABOVE, which evaluate as
    the CDF limits 0 and 1.
    """
    lo, hi = float(lo), float(hi)
    mean, sigma = float(mean), float(sigma)
    if not math.isfinite(mean):
        raise DomainError(f"mean must be finite, got {mean!r}")
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise DomainError(f"sigma must be positive and finite, got {sigma!r}")
    if math.isnan(lo) or math.isnan(hi):
        raise DomainError("interval endpoints must not be NaN")
    if lo > hi:
        raise DomainError(f"interval endpoints out of order: ({lo!r}, {hi!r})")

    zlo = (lo - mean) / sigma if math.isfinite(lo) else lo
    zhi = (hi - mean) / sigma if math.isfinite(hi) else hi
    if zlo == zhi:
        return 0.0
    if zlo >= 0.0:
        # both endpoints in the upper tail: work with the complement
        mass = float(ndtr(-zlo) - ndtr(-zhi))
    else:
        mass = float(ndtr(zhi) - ndtr(zlo))
    return min(max(mass, 0.0), 1.0)


def find_root(f, lo, hi, tol=1e-12):
    """Root of a sign-changing function on the bracket [lo, hi].

    Returns x such that the final bracket width is at most tol (Brent's
    method).  Raises BracketError when f(lo) and f(hi) do not have opposite
    signs.
    """
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError(f"invalid bracket ({lo!r}, {hi!r})")
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise BracketError(
            f"no sign change on bracket: f({lo}) = {flo}, f({hi}) = {fhi}"
        )
    return float(brentq(f, lo, hi, xtol=tol))


# --------------------------------------------------------------------------
# Counter-addressed uniform stream (SplitMix64)
# --------------------------------------------------------------------------

_U64_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_INV_2_53 = 2.0 ** -53


def _word_at(seed, index):
    # k-th 64-bit SplitMix64 output for the given seed, as a Python int
    x = (seed + (index + 1) * _GOLDEN) & _U64_MASK
    x = ((x ^ (x >> 30)) * _MIX_A) & _U64_MASK
    x = ((x ^ (x >> 27)) * _MIX_B) & _U64_MASK
    return x ^ (x >> 31)


def _words_array(seed, start, count):
    # vectorized twin of _word_at; uint64 arithmetic wraps mod 2**64
    ks = np.arange(start, start + count, dtype=np.uint64)
    x = np.uint64(seed) + (ks + np.uint64(1)) * np.uint64(_GOLDEN)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX_A)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX_B)
    return x ^ (x >> np.uint64(31))


@dataclass(frozen=True)
class RandomStream:
    """Reproducible uniform stream addressed by draw index.

    Draw k is a pure function of (seed, k): the k-th SplitMix64 output for
    the seed, mapped to [0, 1) through its top 53 bits.  Because draws are
    addressed rather than generated sequentially, results cannot depend on
    how the index range is partitioned across workers.  Instances are
    immutable; advance() returns a new stream positioned further along.
    """

    seed: int
    counter: int = 0

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed <= _U64_MASK:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not isinstance(self.counter, int) or self.counter < 0:
            raise DomainError(f"counter must be a non-negative integer, got {self.counter!r}")

    def uniform_at(self, index):
        """The uniform draw at an absolute index, independent of counter."""
        if index < 0:
            raise DomainError(f"draw index must be non-negative, got {index!r}")
        return (_word_at(self.seed, index) >> 11) * _INV_2_53

    def uniforms(self, count):
        """Array of draws at indices [counter, counter + count)."""
        if count < 0:
            raise DomainError(f"count must be non-negative, got {count!r}")
        words = _words_array(self.seed, self.counter, count)
        return (words >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def advance(self, count):
        """New stream whose counter is moved forward by count draws."""
        if count < 0:
            raise DomainError(f"count must be non-negative, got {count!r}")
        return replace(self, counter=self.counter + count)


def open_unit(u):
    """Clamp uniform draws from [0, 1) into the open interval (0, 1).

    A raw draw of exactly 0.0 would map to -inf under an inverse CDF; it is
    bumped to MIN_OPEN_UNIFORM (an event of probability 2**-53 per draw).
    """
    return np.maximum(u, MIN_OPEN_UNIFORM)
