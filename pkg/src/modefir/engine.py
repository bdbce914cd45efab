"""Decomposition engines: time-domain IF, Fourier-domain FIF, dFIF and htFIF.

All four engines extract one IMF from a signal ``s`` given the gains
``a_k = 1 - lambda_k`` of the circulant averaging operator:

* IF repeats ``s <- s - w * s`` in the time domain (reference path),
* FIF repeats ``s_hat <- a * s_hat`` in the frequency domain,
* dFIF applies ``a ** N0`` once, with ``N0`` estimated from the spectrum,
* htFIF applies the hard-thresholded gains once.

:func:`decompose` wraps any of them in the outer sifting loop.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import asdict, dataclass, replace

import numpy as np
import scipy.fft
from scipy.linalg import norm
from scipy.ndimage import convolve1d

from .filters import (
    Filter,
    FilterSpectrum,
    FilterWidthError,
    build_filter,
    estimate_filter_length,
    filter_spectrum,
    max_filter_length,
    parse_alpha,
    round_half_away,
)
from .signal import (
    METHODS,
    Decomposition,
    IterationReport,
    ModefirError,
    as_signal,
    count_extrema,
    stack,
)

__all__ = [
    "DegenerateSpectrumWarning",
    "DecompositionConfig",
    "ImfResult",
    "normalize_method",
    "if_step",
    "apply_gains",
    "compute_imf_if",
    "compute_imf_fif",
    "estimate_n0",
    "compute_imf_dfif",
    "threshold_gains",
    "compute_imf_htfif",
    "extract_imf",
    "decompose",
]

log = logging.getLogger(__name__)

_METHOD_ALIASES = {m.lower(): m for m in METHODS}


class DegenerateSpectrumWarning(RuntimeWarning):
    """No gain lies strictly between 0 and tau, so N0 falls back to 1."""


def normalize_method(method: str) -> str:
    try:
        return _METHOD_ALIASES[str(method).lower()]
    except KeyError:
        raise ModefirError(
            f"unknown method {method!r}; expected one of {', '.join(METHODS)}"
        ) from None


@dataclass(frozen=True)
class DecompositionConfig:
    """Method selector and tunables for :func:`decompose`.

    ``xi`` multiplies the mean extrema spacing to give the filter
    half-support; ``alpha`` picks the spacing statistic (see
    :func:`modefir.filters.parse_alpha`). ``ht_power`` is the number of
    times htFIF applies its thresholded operator. Sifting stops once the
    remainder's l2 norm is at most ``energy_tol`` times the input's.
    """

    method: str = "FIF"
    tau: float = 0.98
    kappa: float = 0.56
    delta: float = 0.001
    xi: float = 4.0
    alpha: str = "ave"
    max_inner_iterations: int = 5000
    max_imfs: int = 200
    ht_power: int = 1
    energy_tol: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "method", normalize_method(self.method))
        object.__setattr__(self, "alpha", str(self.alpha))
        parse_alpha(self.alpha)
        if not 0 < self.tau < 1:
            raise ModefirError(f"tau must be in (0, 1), got {self.tau}")
        if not 0 < self.kappa < 1:
            raise ModefirError(f"kappa must be in (0, 1), got {self.kappa}")
        if self.delta <= 0 or self.xi <= 0:
            raise ModefirError("delta and xi must be positive")
        if self.energy_tol < 0:
            raise ModefirError("energy_tol must be nonnegative")
        if min(self.max_inner_iterations, self.max_imfs, self.ht_power) < 1:
            raise ModefirError("iteration caps and ht_power must be >= 1")

    def replace(self, **changes) -> "DecompositionConfig":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ImfResult:
    imf: np.ndarray
    iterations: int
    converged: bool = True
    degenerate: bool = False


def _check_length(s: np.ndarray, n: int):
    if s.size != n:
        raise ModefirError(f"dimension mismatch: signal has {s.size} samples, operator {n}")


def if_step(s, f: Filter) -> np.ndarray:
    """One application of ``I - W``: ``s`` minus its circular moving average."""
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 1:
        raise ModefirError("dimension mismatch: expected a 1-D signal")
    L = f.half_support
    if L and s.size < 2 * L + 2:
        raise FilterWidthError(
            f"filter wider than signal: half-support {L} needs n >= {2 * L + 2}, got {s.size}"
        )
    return s - convolve1d(s, f.weights, mode="wrap")


def _rel_step(new, old, norm_old) -> float:
    if norm_old == 0.0:
        return 0.0
    return float(norm(new - old) / norm_old)


def compute_imf_if(s, f: Filter, delta: float = 0.001, max_iter: int = 5000) -> ImfResult:
    """Time-domain Iterative Filtering.

    Iterates :func:`if_step` until the relative l2 change between successive
    iterates drops below ``delta``, the iterate vanishes, or ``max_iter``
    steps were taken (``converged=False``).
    """
    cur = np.asarray(s, dtype=np.float64)
    norm_cur = float(norm(cur))
    for m in range(1, max_iter + 1):
        nxt = if_step(cur, f)
        norm_nxt = float(norm(nxt))
        step = _rel_step(nxt, cur, norm_cur)
        cur, norm_cur = nxt, norm_nxt
        if norm_nxt == 0.0 or step < delta:
            return ImfResult(cur, m, True)
    return ImfResult(cur, max_iter, False)


def _half_norm_raw(x_hat: np.ndarray, n: int) -> float:
    with np.errstate(over="ignore", under="ignore"):
        p = x_hat.real**2 + x_hat.imag**2
        tail = p[1 : (n + 1) // 2].sum()
        return math.sqrt(p[0] + 2.0 * tail + (p[-1] if n % 2 == 0 else 0.0))


def _half_norm(x_hat: np.ndarray, n: int) -> float:
    # l2 norm of the full spectrum from its rfft half (Parseval bookkeeping).
    val = _half_norm_raw(x_hat, n)
    if 1e-140 < val < 1e140:
        return val
    # squares would under- or overflow: rescale first
    m = float(np.max(np.abs(x_hat)))
    if m == 0.0:
        return 0.0
    return m * _half_norm_raw(x_hat / m, n)


def apply_gains(s, half_gains) -> np.ndarray:
    """Filter ``s`` by real even gains given on the rfft grid."""
    s = np.asarray(s, dtype=np.float64)
    n = s.size
    _check_length(half_gains, n // 2 + 1)
    return scipy.fft.irfft(half_gains * scipy.fft.rfft(s), n)


def compute_imf_fif(s, spec: FilterSpectrum, delta: float = 0.001, max_iter: int = 5000) -> ImfResult:
    """Fast Iterative Filtering: the IF iteration diagonalised by the DFT.

    Same stopping rule as :func:`compute_imf_if`; the norms are evaluated on
    the spectrum so no inverse transform is needed inside the loop.
    """
    s = np.asarray(s, dtype=np.float64)
    n = s.size
    _check_length(s, spec.n)
    a = spec.half_gains
    cur = scipy.fft.rfft(s)
    norm_cur = _half_norm(cur, n)
    converged = False
    m = 0
    for m in range(1, max_iter + 1):
        nxt = a * cur
        norm_nxt = _half_norm(nxt, n)
        step = 0.0 if norm_cur == 0.0 else _half_norm(nxt - cur, n) / norm_cur
        cur, norm_cur = nxt, norm_nxt
        if norm_nxt == 0.0 or step < delta:
            converged = True
            break
    return ImfResult(scipy.fft.irfft(cur, n), m, converged)


def _n0_candidate_max(gains: np.ndarray, tau: float) -> float | None:
    cand = gains[(gains > 0) & (gains < tau)]
    return float(cand.max()) if cand.size else None


def estimate_n0(spec: FilterSpectrum, tau: float = 0.98, kappa: float = 0.56) -> int:
    """A-priori iteration count that brings the largest gain below ``tau`` to ``kappa``.

    ``N0 = round(log(kappa) / log(M))`` with ``M`` the largest gain in
    ``(0, tau)``, rounded half away from zero and at least 1. If no gain
    falls in that interval a :class:`DegenerateSpectrumWarning` is issued
    and 1 is returned.
    """
    M = _n0_candidate_max(spec.gains, tau)
    if M is None:
        warnings.warn(
            "no spectral gain in (0, tau); using N0 = 1",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
        return 1
    return max(1, round_half_away(math.log(kappa) / math.log(M)))


def compute_imf_dfif(s, spec: FilterSpectrum, tau: float = 0.98, kappa: float = 0.56, n0: int | None = None) -> ImfResult:
    """Direct FIF: a single application of ``a ** N0``.

    ``n0`` overrides the estimate, e.g. to reproduce a FIF run exactly.
    """
    s = np.asarray(s, dtype=np.float64)
    _check_length(s, spec.n)
    degenerate = False
    if n0 is None:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DegenerateSpectrumWarning)
            n0 = estimate_n0(spec, tau, kappa)
        degenerate = bool(caught)
        for w in caught:
            warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
    n0 = int(n0)
    if n0 < 1:
        raise ModefirError("N0 must be >= 1")
    a = spec.half_gains
    return ImfResult(apply_gains(s, a**n0), n0, True, degenerate)


def threshold_gains(gains, tau: float) -> np.ndarray:
    """Hard thresholding: keep ``a_k >= tau``, zero the rest."""
    gains = np.asarray(gains)
    return np.where(gains >= tau, gains, 0.0)


def compute_imf_htfif(s, spec: FilterSpectrum, tau: float = 0.98, power: int = 1) -> ImfResult:
    """Hard-thresholding FIF: apply the thresholded gains ``power`` times (default once)."""
    s = np.asarray(s, dtype=np.float64)
    _check_length(s, spec.n)
    b = threshold_gains(spec.half_gains, tau)
    if power != 1:
        b = b**power
    return ImfResult(apply_gains(s, b), int(power), True)


def extract_imf(s, spec: FilterSpectrum, cfg: DecompositionConfig, f: Filter | None = None) -> ImfResult:
    """Extract one IMF from ``s`` with the method selected in ``cfg``."""
    if cfg.method == "FIF":
        return compute_imf_fif(s, spec, cfg.delta, cfg.max_inner_iterations)
    if cfg.method == "dFIF":
        return compute_imf_dfif(s, spec, cfg.tau, cfg.kappa)
    if cfg.method == "htFIF":
        return compute_imf_htfif(s, spec, cfg.tau, cfg.ht_power)
    if f is None:
        f = build_filter(spec.filter_length)
    return compute_imf_if(s, f, cfg.delta, cfg.max_inner_iterations)


def decompose(s, cfg: DecompositionConfig | None = None, **overrides) -> Decomposition:
    """Split ``s`` into IMFs and a remainder.

    Each pass estimates the filter length from the current remainder,
    builds the filter and its spectrum, extracts one IMF and subtracts it.
    The loop ends when the remainder has fewer than two extrema, when
    ``cfg.max_imfs`` IMFs were extracted, when an IMF comes out identically
    zero, when the remainder norm drops to ``cfg.energy_tol * ||s||``, or
    when a pass would repeat the previous one: same extrema count
    and same filter length, or the filter length pinned at its cap
    ``(n - 2) // 2`` twice. A repeated operator only re-splits the band it
    already failed to isolate.
    """
    if cfg is None:
        cfg = DecompositionConfig(**overrides)
    elif overrides:
        cfg = cfg.replace(**overrides)
    s = as_signal(s)
    n = s.size
    if not np.any(s):
        return Decomposition(np.empty((0, n)), s, (), cfg, trivial=True)

    imfs, reports = [], []
    cap = max_filter_length(n)
    r = s.copy()
    prev_k = None
    floor = cfg.energy_tol * float(norm(s))
    while len(imfs) < cfg.max_imfs:
        k = count_extrema(r)
        if k < 2:
            break
        if imfs and float(norm(r)) <= floor:
            log.debug("remainder below energy floor after %d IMFs", len(imfs))
            break
        t0 = time.perf_counter()
        L = estimate_filter_length(r, cfg.xi, cfg.alpha)
        if reports and L == reports[-1].filter_length and (k == prev_k or L == cap):
            log.debug("pass %d would repeat the previous operator; stopping", len(imfs) + 1)
            break
        prev_k = k
        f = build_filter(L)
        spec = filter_spectrum(f, n)
        res = extract_imf(r, spec, cfg, f)
        elapsed = time.perf_counter() - t0
        if not res.converged:
            log.warning("IMF %d: no convergence after %d iterations", len(imfs) + 1, res.iterations)
        if not np.any(res.imf):
            log.debug("IMF %d vanished; stopping", len(imfs) + 1)
            break
        imfs.append(res.imf)
        r = r - res.imf
        reports.append(
            IterationReport(
                imf_index=len(imfs),
                filter_length=L,
                iterations_used=res.iterations,
                method=cfg.method,
                elapsed=elapsed,
                converged=res.converged,
                degenerate=res.degenerate,
            )
        )
    return Decomposition(stack(imfs, n), r, reports, cfg)
