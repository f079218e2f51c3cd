"""Finite unions of disjoint open intervals on the real line.

Observation-space sets (the acceptance sets of region estimators) and
parameter-space regions for location families are both represented as
RealSet values.  All intervals are open; membership at an endpoint is
excluded.  Two conventions are fixed for determinism, both measure-zero:

* normalization merges intervals that overlap *or touch*, so
  (0, 1) | (1, 2) collapses to (0, 2);
* subtraction returns the open interior of the set difference, so
  (0, 2) - (1, 3) is (0, 1), without the boundary point.
"""

import math

import numpy as np

from .exceptions import DomainError


def _validate_interval(lo, hi):
    lo, hi = float(lo), float(hi)
    if math.isnan(lo) or math.isnan(hi):
        raise DomainError("interval endpoints must not be NaN")
    if not lo < hi:
        raise DomainError(f"interval requires lo < hi, got ({lo!r}, {hi!r})")
    return lo, hi


class RealSet:
    """Normalized union of disjoint open intervals, sorted by lower endpoint.

    Endpoints may be -inf / +inf for unbounded pieces.  Instances are
    immutable value objects.
    """

    __slots__ = ("intervals",)

    def __init__(self, intervals=()):
        pieces = sorted(_validate_interval(lo, hi) for lo, hi in intervals)
        merged: list[tuple[float, float]] = []
        for lo, hi in pieces:
            if merged and lo <= merged[-1][1]:
                last_lo, last_hi = merged[-1]
                merged[-1] = (last_lo, max(last_hi, hi))
            else:
                merged.append((lo, hi))
        object.__setattr__(self, "intervals", tuple(merged))

    @classmethod
    def empty(cls):
        return cls(())

    @classmethod
    def interval(cls, lo, hi):
        return cls(((lo, hi),))

    @classmethod
    def full_line(cls):
        return cls(((float("-inf"), float("inf")),))

    # -- basic queries ------------------------------------------------------

    @property
    def is_empty(self):
        return not self.intervals

    @property
    def total_length(self):
        """Lebesgue measure; +inf when any piece is unbounded."""
        return float(sum(hi - lo for lo, hi in self.intervals))

    def contains(self, y):
        return any(lo < y < hi for lo, hi in self.intervals)

    def contains_array(self, ys):
        """Vectorized membership over a float array."""
        ys = np.asarray(ys, dtype=np.float64)
        out = np.zeros(ys.shape, dtype=bool)
        for lo, hi in self.intervals:
            out |= (lo < ys) & (ys < hi)
        return out

    # -- set algebra ---------------------------------------------------------

    def union(self, other):
        return RealSet(self.intervals + other.intervals)

    def intersect(self, other):
        pieces = []
        for alo, ahi in self.intervals:
            for blo, bhi in other.intervals:
                lo, hi = max(alo, blo), min(ahi, bhi)
                if lo < hi:
                    pieces.append((lo, hi))
        return RealSet(pieces)

    def complement(self):
        """Open interior of the complement."""
        pieces = []
        cursor = float("-inf")
        for lo, hi in self.intervals:
            if cursor < lo:
                pieces.append((cursor, lo))
            cursor = hi
        if cursor < float("inf"):
            pieces.append((cursor, float("inf")))
        return RealSet(pieces)

    def subtract(self, other):
        return self.intersect(other.complement())

    def is_disjoint(self, other):
        return self.intersect(other).is_empty

    def issubset(self, other):
        """True when every piece of self lies inside a single piece of other."""
        return all(
            any(blo <= alo and ahi <= bhi for blo, bhi in other.intervals)
            for alo, ahi in self.intervals
        )

    # -- protocol ------------------------------------------------------------

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __eq__(self, other):
        if not isinstance(other, RealSet):
            return NotImplemented
        return self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __repr__(self):
        body = " | ".join(f"({lo!r}, {hi!r})" for lo, hi in self.intervals)
        return f"RealSet[{body or 'empty'}]"

    def __setattr__(self, name, value):
        raise AttributeError("RealSet is immutable")
