"""Signal representation, extrema analysis and decomposition containers.

Signals are plain 1-D ``float64`` numpy arrays. They are sampled on the
uniform grid ``x_j = j / (n - 1)`` and extended periodically, which is what
lets every filtering operator in this package be diagonalised by the DFT.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "ModefirError",
    "InsufficientExtremaError",
    "METHODS",
    "as_signal",
    "extrema_positions",
    "count_extrema",
    "IterationReport",
    "Decomposition",
    "reconstruct",
]

METHODS = ("IF", "FIF", "dFIF", "htFIF")


class ModefirError(ValueError):
    """Base class for errors raised by this package."""


class InsufficientExtremaError(ModefirError):
    pass


def as_signal(samples, copy=False) -> np.ndarray:
    """Validate ``samples`` and return them as a read-only 1-D float64 array."""
    s = np.array(samples, dtype=np.float64, copy=True if copy else None)
    if s.ndim != 1:
        raise ModefirError(f"signal must be one-dimensional, got shape {s.shape}")
    if s.size < 1:
        raise ModefirError("signal must contain at least one sample")
    if not np.all(np.isfinite(s)):
        raise ModefirError("signal contains NaN or Inf")
    return s


def _run_starts(s: np.ndarray) -> np.ndarray:
    # Index of the first sample of every run of equal values.
    return np.flatnonzero(np.r_[True, s[1:] != s[:-1]])


def extrema_positions(s) -> np.ndarray:
    """Sample positions of the strict interior local extrema of ``s``.

    A plateau of equal values bounded on both sides by strictly lower (or
    strictly higher) neighbours is a single extremum, located at the middle
    of the plateau. Runs touching either end of the signal never count.
    """
    s = np.asarray(s, dtype=np.float64)
    if s.size < 3:
        return np.empty(0, dtype=np.intp)
    starts = _run_starts(s)
    if starts.size < 3:
        return np.empty(0, dtype=np.intp)
    ends = np.r_[starts[1:], s.size] - 1
    vals = s[starts]
    left, mid, right = vals[:-2], vals[1:-1], vals[2:]
    is_ext = ((mid > left) & (mid > right)) | ((mid < left) & (mid < right))
    idx = np.flatnonzero(is_ext) + 1
    return (starts[idx] + ends[idx]) // 2


def count_extrema(s) -> int:
    """Number of strict interior local maxima and minima of ``s``."""
    return int(extrema_positions(s).size)


@dataclass(frozen=True)
class IterationReport:
    """Bookkeeping for one extracted IMF.

    ``iterations_used`` is the FIF/IF iteration count, the estimated N0 for
    dFIF, or the number of applications of the thresholded operator for
    htFIF (1 unless overridden).
    """

    imf_index: int
    filter_length: int
    iterations_used: int
    method: str
    elapsed: float
    converged: bool = True
    degenerate: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ModefirError(f"unknown method {self.method!r}")
        if self.iterations_used < 1 or self.filter_length < 1:
            raise ModefirError("iterations_used and filter_length must be >= 1")

    def as_dict(self) -> dict:
        return {
            "imf_index": self.imf_index,
            "filter_length": self.filter_length,
            "iterations_used": self.iterations_used,
            "method": self.method,
            "elapsed": self.elapsed,
            "converged": self.converged,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class Decomposition:
    """Ordered IMFs (rows of ``imfs``) plus the final remainder.

    ``config`` is the :class:`~modefir.engine.DecompositionConfig` that
    produced the decomposition, or ``None`` for hand-built instances.
    """

    imfs: np.ndarray
    remainder: np.ndarray
    reports: tuple = ()
    config: object = field(default=None, compare=False)
    trivial: bool = False

    def __post_init__(self):
        remainder = as_signal(self.remainder, copy=True)
        n = remainder.size
        imfs = np.array(self.imfs, dtype=np.float64)
        if imfs.size == 0:
            imfs = imfs.reshape(0, n)
        if imfs.ndim != 2 or imfs.shape[1] != n:
            raise ModefirError(
                f"imfs must have shape (M, {n}), got {imfs.shape}"
            )
        imfs.setflags(write=False)
        remainder.setflags(write=False)
        object.__setattr__(self, "imfs", imfs)
        object.__setattr__(self, "remainder", remainder)
        object.__setattr__(self, "reports", tuple(self.reports))

    @property
    def n(self) -> int:
        return self.remainder.size

    @property
    def n_imfs(self) -> int:
        return self.imfs.shape[0]

    def remainders(self) -> list[np.ndarray]:
        """Signal entering each IMF extraction, i.e. ``s - sum(imfs[:k])``."""
        out = []
        r = self.remainder.copy()
        for imf in self.imfs[::-1]:
            r = r + imf
            out.append(r)
        return out[::-1]


def reconstruct(d: Decomposition) -> np.ndarray:
    """Sum of all IMFs plus the remainder."""
    return d.imfs.sum(axis=0) + d.remainder


def stack(rows: Sequence[np.ndarray], n: int) -> np.ndarray:
    if len(rows) == 0:
        return np.empty((0, n))
    return np.vstack(rows)
