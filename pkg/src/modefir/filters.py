"""Compactly supported averaging windows and the spectrum of their circulant.

The circulant operator ``W`` with entries ``w(x_i - x_j) / n`` is never
materialised. Under periodic extension it is diagonalised by the DFT, so a
:class:`FilterSpectrum` (its eigenvalues) is all the engines need.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .signal import InsufficientExtremaError, ModefirError, extrema_positions

__all__ = [
    "FilterWidthError",
    "NonRealSpectrumError",
    "Filter",
    "FilterSpectrum",
    "round_half_away",
    "build_filter",
    "parse_alpha",
    "estimate_filter_length",
    "max_filter_length",
    "embed",
    "column_spectrum",
    "filter_spectrum",
]

EPS = np.finfo(np.float64).eps


class FilterWidthError(ModefirError):
    pass


class NonRealSpectrumError(ModefirError):
    pass


@dataclass(frozen=True)
class Filter:
    """Even, nonnegative window ``w(-L) .. w(L)`` with unit sum."""

    half_support: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size != 2 * self.half_support + 1:
            raise ModefirError(
                f"expected {2 * self.half_support + 1} weights, got {w.size}"
            )
        if np.any(w < 0):
            raise ModefirError("filter weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def delta(cls) -> "Filter":
        """Identity filter (a single unit weight), i.e. ``W = I``."""
        return cls(0, np.ones(1))

    def __len__(self):
        return self.weights.size


@dataclass(frozen=True)
class FilterSpectrum:
    """Eigenvalues of the circulant operator and the gains ``1 - lambda``.

    Both arrays have the full length ``n``. ``gains`` is clipped to
    ``[0, 1]`` to remove rounding noise of order ``eps``.
    """

    eigenvalues: np.ndarray
    gains: np.ndarray
    filter_length: int = 0

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def half_gains(self) -> np.ndarray:
        # Gains on the rfft grid; the spectrum of an even filter is even.
        return self.gains[: self.n // 2 + 1]

    @classmethod
    def from_gains(cls, gains) -> "FilterSpectrum":
        """Build a spectrum directly from gains (for contrived test spectra)."""
        a = np.array(gains, dtype=np.float64)
        if np.any((a < 0) | (a > 1)):
            raise ModefirError("gains must lie in [0, 1]")
        if not np.array_equal(a[1:], a[1:][::-1]):
            raise ModefirError("gains must be even: a[k] == a[n - k]")
        lam = 1.0 - a
        a.setflags(write=False)
        lam.setflags(write=False)
        return cls(lam, a)


def round_half_away(x: float) -> int:
    """Round to nearest integer, ties away from zero."""
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def _moving_sum(x: np.ndarray, width: int) -> np.ndarray:
    # Full linear convolution of x with `width` ones, via a cumulative sum.
    m = x.size
    c = np.concatenate(
        (np.zeros(width, dtype=x.dtype), np.cumsum(x), np.full(width - 1, x.sum()))
    )
    return c[width:] - c[: m + width - 1]


def build_filter(L: int) -> Filter:
    """Window of half-support ``L`` with a nonnegative DFT.

    The window is a triangle ``h - |k|`` of half-support ``h = ceil(L / 2)``
    convolved with itself, i.e. four chained boxes of width ``h``. Its
    spectrum is the fourth power of a Dirichlet kernel, hence real and
    nonnegative for every embedding length. Integer arithmetic keeps the
    weights exactly symmetric; the nonzero part spans ``2h - 2 <= L``
    samples each side and the rest is zero padding.
    """
    L = int(L)
    if L < 1:
        raise ModefirError(f"filter half-support must be >= 1, got {L}")
    h = (L + 1) // 2
    box = np.ones(h, dtype=np.int64)
    w = box
    for _ in range(3):
        w = _moving_sum(w, h)
    half = (w.size - 1) // 2
    weights = np.zeros(2 * L + 1)
    weights[L - half : L + half + 1] = w / float(w.sum())
    weights /= weights.sum()
    return Filter(L, weights)


def parse_alpha(alpha) -> float | str:
    """Normalise an extrema-gap statistic selector.

    Accepts ``"ave"``, ``"almost_min"`` (10th-percentile gap), ``"pN"`` or
    ``"percentile(N)"`` for the N-th percentile, or a bare number N.
    Returns ``"ave"`` or the percentile as a float.
    """
    if isinstance(alpha, (int, float)) and not isinstance(alpha, bool):
        p = float(alpha)
    else:
        key = str(alpha).strip().lower()
        if key == "ave":
            return "ave"
        if key == "almost_min":
            return 10.0
        m = re.fullmatch(r"p(?:ercentile)?\(?\s*([0-9.]+)\s*\)?", key)
        if m is None:
            raise ModefirError(f"unrecognised alpha {alpha!r}")
        p = float(m.group(1))
    if not 0 <= p <= 100:
        raise ModefirError(f"percentile must be in [0, 100], got {p}")
    return p


def max_filter_length(n: int) -> int:
    """Largest half-support that still fits a length-``n`` circulant."""
    return (n - 2) // 2


def estimate_filter_length(s, xi: float = 4.0, alpha="ave") -> int:
    """Filter half-support scaled from the spacing of the extrema of ``s``.

    With ``k`` extrema the base statistic is ``n / k`` for ``alpha="ave"``,
    otherwise a percentile of the gaps between consecutive extrema. The
    result ``round(xi * stat)`` is clamped to ``[1, (n - 2) // 2]``.
    """
    s = np.asarray(s, dtype=np.float64)
    n = s.size
    pos = extrema_positions(s)
    k = pos.size
    if k < 2:
        raise InsufficientExtremaError(
            f"insufficient extrema: need at least 2, found {k}"
        )
    if xi <= 0:
        raise ModefirError("xi must be positive")
    how = parse_alpha(alpha)
    if how == "ave":
        stat = n / k
    else:
        stat = float(np.percentile(np.diff(pos), how))
    L = max(1, round_half_away(xi * stat))
    return max(1, min(L, max_filter_length(n)))


def embed(f: Filter, n: int) -> np.ndarray:
    """Length-``n`` circular embedding with ``w(k)`` at index ``k mod n``."""
    L = f.half_support
    if n < 2 * L + 2 and L > 0:
        raise FilterWidthError(
            f"filter wider than signal: half-support {L} needs n >= {2 * L + 2}, got {n}"
        )
    col = np.zeros(n)
    col[0] = f.weights[L]
    if L:
        col[1 : L + 1] = f.weights[L + 1 :]
        col[n - L :] = f.weights[:L]
    return col


def column_spectrum(col, filter_length: int = 0) -> FilterSpectrum:
    """Spectrum of the circulant whose first column is the even array ``col``."""
    col = np.asarray(col, dtype=np.float64)
    n = col.size
    half = scipy.fft.rfft(col)
    if np.max(np.abs(half.imag)) > 8 * EPS * n:
        raise NonRealSpectrumError("non-real spectrum: filter is not even")
    lam = np.concatenate((half.real, half.real[1 : (n + 1) // 2][::-1]))
    if abs(lam[0] - 1.0) > 8 * EPS * max(n, 8):
        raise ModefirError(f"filter does not have unit sum (lambda_0 = {lam[0]!r})")
    lam[0] = 1.0
    a = np.clip(1.0 - lam, 0.0, 1.0)
    lam.setflags(write=False)
    a.setflags(write=False)
    return FilterSpectrum(lam, a, filter_length)


def filter_spectrum(f: Filter, n: int) -> FilterSpectrum:
    """Eigenvalues of the length-``n`` circulant built from ``f``.

    ``lambda_0`` is verified to be 1 up to rounding and then stored as
    exactly 1, so the zero-frequency gain is exactly 0.
    """
    return column_spectrum(embed(f, n), f.half_support)
