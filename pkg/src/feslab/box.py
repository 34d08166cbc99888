"""Axis-aligned box sets used as admissible input regions."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInterval, ShapeError


@dataclass(frozen=True)
class BoxSet:
    """Cartesian product of closed intervals ``[lo_i, hi_i]``.

    Projection onto the set is componentwise clipping, which is also the
    resolvent of the box indicator for any positive step size.
    """

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.ndim != 1 or hi.ndim != 1 or lo.shape != hi.shape:
            raise ShapeError(f"box bounds must be matching vectors, got {lo.shape} and {hi.shape}")
        if np.any(lo > hi):
            raise InvalidInterval("box lower bound exceeds upper bound")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_bounds(cls, bounds):
        """Build from a sequence of ``(lo, hi)`` pairs, one per coordinate."""
        arr = np.asarray(bounds, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ShapeError("bounds must be a sequence of (lo, hi) pairs")
        return cls(arr[:, 0], arr[:, 1])

    @classmethod
    def cube(cls, dim, lo, hi):
        """Uniform box ``[lo, hi]^dim``."""
        return cls(np.full(dim, float(lo)), np.full(dim, float(hi)))

    @property
    def dim(self):
        return self.lo.shape[0]

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    def contains(self, v, tol=1e-9):
        v = np.asarray(v, dtype=float)
        if v.shape != self.lo.shape:
            raise ShapeError(f"expected vector of dim {self.dim}, got shape {v.shape}")
        return bool(np.all(v >= self.lo - tol) and np.all(v <= self.hi + tol))

    def project(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != self.lo.shape:
            raise ShapeError(f"expected vector of dim {self.dim}, got shape {v.shape}")
        return np.clip(v, self.lo, self.hi)

    def sample(self, rng, n=None):
        """Draw uniform samples; shape ``(dim,)`` or ``(n, dim)``."""
        size = self.dim if n is None else (n, self.dim)
        return rng.uniform(self.lo, self.hi, size=size)
