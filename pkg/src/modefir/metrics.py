"""Relative errors between decompositions and a-priori error bounds.

The bounds compare a direct method (dFIF or htFIF) against FIF run for
``N_FIF`` iterations on the same input. Every operator involved is diagonal
in the Fourier basis, so operator 2-norms are exact maxima over the gains.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft
from scipy.linalg import norm

from .engine import DecompositionConfig, extract_imf, threshold_gains
from .filters import FilterSpectrum, build_filter, filter_spectrum
from .signal import Decomposition, ModefirError

__all__ = [
    "ZeroReferenceError",
    "ErrorReport",
    "relative_error",
    "dfif_error_bound",
    "htfif_error_bound",
    "compare_decompositions",
]


class ZeroReferenceError(ModefirError):
    pass


@dataclass
class ErrorReport:
    """Per-IMF relative errors of ``candidate`` against ``reference``.

    ``bound`` holds the matching a-priori bound or ``None`` where no bound
    applies (e.g. IF vs FIF, or independent remainders past the first IMF).
    """

    per_imf_error: list
    bound: list
    method_pair: tuple
    mode: str = "independent"
    notes: list = field(default_factory=list)

    def rows(self):
        for k, (e, b) in enumerate(zip(self.per_imf_error, self.bound), start=1):
            yield k, e, b


def relative_error(a, b) -> float:
    """``||a - b|| / ||b||`` in the l2 norm."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ModefirError(f"shape mismatch: {a.shape} vs {b.shape}")
    nb = norm(b)
    if nb == 0.0:
        raise ZeroReferenceError("zero reference: ||b|| = 0")
    return float(norm(a - b) / nb)


def _fif_output_norm(s, gains: np.ndarray, n_fif: int) -> float:
    # ||a^N_FIF * U^T s|| with the unitary DFT, i.e. the norm of the FIF IMF.
    s_hat = scipy.fft.fft(np.asarray(s, dtype=np.float64), norm="ortho")
    return float(norm(gains**n_fif * s_hat))


def _bound(numerator_op: float, s, gains, n_fif) -> float:
    denom = _fif_output_norm(s, gains, n_fif)
    if denom == 0.0:
        return math.inf
    return numerator_op * float(norm(s)) / denom


def dfif_error_bound(s, spec: FilterSpectrum, n_dfif: int, n_fif: int) -> float:
    """Upper bound on ``relative_error(IMF_dFIF, IMF_FIF)`` for one IMF.

    ``||(A^(N_dFIF - N_FIF) - I) A^N_FIF|| * ||s|| / ||A^N_FIF U^T s||``
    with ``A = diag(a)``. When ``n_dfif < n_fif`` the exponents are swapped,
    which yields the same diagonal ``|a^N_dFIF - a^N_FIF|``, and a
    ``RuntimeWarning`` notes the swap. Returns ``inf`` when the FIF output
    is zero.
    """
    n_dfif, n_fif = int(n_dfif), int(n_fif)
    if min(n_dfif, n_fif) < 1:
        raise ModefirError("iteration counts must be >= 1")
    if n_dfif < n_fif:
        warnings.warn(
            f"N_dFIF={n_dfif} < N_FIF={n_fif}; exponent difference symmetrised",
            RuntimeWarning,
            stacklevel=2,
        )
    a = spec.gains
    lo, hi = sorted((n_dfif, n_fif))
    op = float(np.max(np.abs(a**lo * (a ** (hi - lo) - 1.0)))) if hi > lo else 0.0
    return _bound(op, s, a, n_fif)


def htfif_error_bound(s, spec: FilterSpectrum, tau: float, n_fif: int) -> float:
    """Upper bound on ``relative_error(IMF_htFIF, IMF_FIF)`` for one IMF.

    ``||B - A^N_FIF|| * ||s|| / ||A^N_FIF U^T s||`` where ``B`` keeps the
    gains ``>= tau`` and zeroes the rest.
    """
    if n_fif < 1:
        raise ModefirError("N_FIF must be >= 1")
    a = spec.gains
    b = threshold_gains(a, tau)
    op = float(np.max(np.abs(b - a**n_fif)))
    return _bound(op, s, a, n_fif)


def _label(d: Decomposition) -> str:
    cfg = d.config
    return cfg.method if cfg is not None else "?"


def _bound_for(r, spec, ref_iters, cand_cfg, cand_iters):
    if ref_iters is None or cand_cfg is None:
        return None
    if cand_cfg.method == "dFIF":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return dfif_error_bound(r, spec, cand_iters, ref_iters)
    if cand_cfg.method == "htFIF" and cand_cfg.ht_power == 1:
        return htfif_error_bound(r, spec, cand_cfg.tau, ref_iters)
    return None


def compare_decompositions(d1: Decomposition, d2: Decomposition, mode: str = "independent") -> ErrorReport:
    """Per-IMF relative errors of ``d2`` with ``d1`` as the reference.

    ``independent`` compares the IMFs as produced. ``shared_remainder``
    re-extracts every IMF of ``d2``'s method from the remainders generated
    by ``d1`` (with ``d1``'s filter lengths), which isolates the per-IMF
    error of the method from error propagated through earlier IMFs.
    Bounds are attached when ``d1`` is a FIF run and ``d2`` is dFIF or
    htFIF, and the two IMFs were extracted from the same input.
    """
    if mode not in ("independent", "shared_remainder"):
        raise ModefirError(f"unknown comparison mode {mode!r}")
    if d1.n != d2.n:
        raise ModefirError(f"length mismatch: {d1.n} vs {d2.n}")
    pair = (_label(d1), _label(d2))
    ref_is_fif = d1.config is not None and d1.config.method == "FIF"
    errors, bounds, notes = [], [], []

    if mode == "shared_remainder":
        if d2.config is None:
            raise ModefirError("shared_remainder mode needs d2.config to re-run its engine")
        if len(d1.reports) != d1.n_imfs:
            raise ModefirError("shared_remainder mode needs d1's per-IMF reports")
        for imf_ref, r, rep in zip(d1.imfs, d1.remainders(), d1.reports):
            f = build_filter(rep.filter_length)
            spec = filter_spectrum(f, d1.n)
            res = extract_imf(r, spec, d2.config, f)
            errors.append(_safe_rel(res.imf, imf_ref))
            ref_iters = rep.iterations_used if ref_is_fif else None
            bounds.append(_bound_for(r, spec, ref_iters, d2.config, res.iterations))
        return ErrorReport(errors, bounds, pair, mode, notes)

    m = min(d1.n_imfs, d2.n_imfs)
    if d1.n_imfs != d2.n_imfs:
        notes.append(
            f"IMF count mismatch: {d1.n_imfs} vs {d2.n_imfs}; compared the first {m}"
        )
    for k in range(m):
        errors.append(_safe_rel(d2.imfs[k], d1.imfs[k]))
        bound = None
        if k == 0 and ref_is_fif and d1.reports and d2.reports:
            rep1, rep2 = d1.reports[0], d2.reports[0]
            if rep1.filter_length == rep2.filter_length:
                s = d1.remainders()[0]
                spec = filter_spectrum(build_filter(rep1.filter_length), d1.n)
                bound = _bound_for(s, spec, rep1.iterations_used, d2.config, rep2.iterations_used)
        bounds.append(bound)
    return ErrorReport(errors, bounds, pair, mode, notes)


def _safe_rel(a, b) -> float:
    try:
        return relative_error(a, b)
    except ZeroReferenceError:
        return 0.0 if not np.any(a) else math.inf
