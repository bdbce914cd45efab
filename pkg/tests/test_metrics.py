import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modefir import (
    Filter,
    build_filter,
    compare_decompositions,
    compute_imf_dfif,
    compute_imf_fif,
    compute_imf_htfif,
    decompose,
    dfif_error_bound,
    filter_spectrum,
    htfif_error_bound,
    relative_error,
)
from modefir.bench import generate, load_fixture
from modefir.filters import FilterSpectrum
from modefir.metrics import ZeroReferenceError
from modefir.signal import Decomposition, ModefirError

from .conftest import EPS


def test_relative_error_examples(rng):
    b = rng.standard_normal(30)
    assert relative_error(b, b) == 0.0
    assert relative_error(2 * b, b) == pytest.approx(1.0, abs=4 * EPS)
    spike = np.zeros(30)
    spike[0] = np.linalg.norm(b)
    assert relative_error(b + spike, b) == pytest.approx(1.0, rel=1e-14)


def test_relative_error_zero_reference():
    with pytest.raises(ZeroReferenceError, match="zero reference"):
        relative_error(np.ones(3), np.zeros(3))
    with pytest.raises(ModefirError):
        relative_error(np.ones(3), np.ones(4))


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.sampled_from([-8.0, -0.5, 0.125, 2.0, 1024.0]))
def test_relative_error_scale_invariant(seed, c):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal(20), rng.standard_normal(20)
    assert abs(relative_error(c * a, c * b) - relative_error(a, b)) <= 4 * EPS


def test_dfif_bound_equal_counts_is_zero(rng):
    spec = filter_spectrum(build_filter(4), 64)
    assert dfif_error_bound(rng.standard_normal(64), spec, 3, 3) == 0.0


def test_bounds_infinite_for_delta_filter(rng):
    spec = filter_spectrum(Filter.delta(), 64)
    s = rng.standard_normal(64)
    assert math.isinf(dfif_error_bound(s, spec, 5, 3))
    assert math.isinf(htfif_error_bound(s, spec, 0.8, 3))


def test_dfif_bound_holds_n64(rng):
    n = 64
    spec = filter_spectrum(build_filter(4), n)
    s = rng.standard_normal(n)
    fif = compute_imf_dfif(s, spec, n0=3).imf
    dfif = compute_imf_dfif(s, spec, n0=5).imf
    assert relative_error(dfif, fif) <= dfif_error_bound(s, spec, 5, 3) + 1e-9


def test_dfif_bound_swapped_warns(rng):
    spec = filter_spectrum(build_filter(4), 64)
    s = rng.standard_normal(64)
    with pytest.warns(RuntimeWarning, match="symmetrised"):
        b = dfif_error_bound(s, spec, 2, 5)
    assert b >= 0


def test_htfif_bound_holds_n64(rng):
    n = 64
    spec = filter_spectrum(build_filter(4), n)
    s = rng.standard_normal(n)
    fif = compute_imf_fif(s, spec)
    ht = compute_imf_htfif(s, spec, 0.8).imf
    assert relative_error(ht, fif.imf) <= htfif_error_bound(s, spec, 0.8, fif.iterations) + 1e-9


def test_htfif_bound_zero_for_binary_spectrum(rng):
    spec = FilterSpectrum.from_gains([0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0])
    assert htfif_error_bound(rng.standard_normal(8), spec, 0.9, 4) == 0.0


def test_htfif_bound_when_all_gains_thresholded(rng):
    # odd n avoids the exact zeros of the window spectrum, so every a_k < 1
    n = 63
    spec = filter_spectrum(build_filter(4), n)
    a = spec.gains
    assert a.max() < 1 - EPS
    s = rng.standard_normal(n)
    N = 3
    expected = np.max(a**N) * np.linalg.norm(s) / np.linalg.norm(a**N * np.fft.fft(s, norm="ortho"))
    got = htfif_error_bound(s, spec, 1 - EPS, N)
    assert got == pytest.approx(expected, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dfif_bound_monotone_in_count_gap(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(16, 200))
    spec = filter_spectrum(build_filter(int(rng.integers(1, (n - 2) // 2 + 1))), n)
    s = rng.standard_normal(n)
    nf = int(rng.integers(1, 10))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        up = [dfif_error_bound(s, spec, nf + d, nf) for d in range(6)]
    assert all(y >= x - 1e-15 for x, y in zip(up, up[1:]))


def test_compare_self_is_zero(rng):
    s = rng.standard_normal(300)
    d = decompose(s, max_imfs=4)
    rep = compare_decompositions(d, d)
    assert rep.per_imf_error == [0.0] * d.n_imfs
    assert rep.method_pair == ("FIF", "FIF")


def test_compare_if_vs_fif():
    n = 500
    x = np.arange(n) / (n - 1)
    s = np.sin(2 * np.pi * 30 * x) + np.sin(2 * np.pi * 4 * x)
    rep = compare_decompositions(decompose(s, method="FIF"), decompose(s, method="IF"))
    assert rep.per_imf_error and max(rep.per_imf_error) <= 1e-10
    assert all(b is None for b in rep.bound)


def test_compare_count_mismatch_note(rng):
    s = rng.standard_normal(200)
    rep = compare_decompositions(decompose(s, max_imfs=3), decompose(s, max_imfs=1))
    assert len(rep.per_imf_error) == 1
    assert rep.notes and "mismatch" in rep.notes[0]


def test_compare_rejects_bad_mode():
    d = Decomposition(np.ones((1, 4)), np.zeros(4))
    with pytest.raises(ModefirError):
        compare_decompositions(d, d, "sideways")


def test_shared_remainder_errors_within_bounds():
    s, _ = generate(load_fixture("example1"))
    ref = decompose(s, method="FIF")
    for method in ("dFIF", "htFIF"):
        rep = compare_decompositions(ref, decompose(s, method=method), "shared_remainder")
        assert len(rep.per_imf_error) == ref.n_imfs
        for e, b in zip(rep.per_imf_error, rep.bound):
            assert b is not None and e <= b + 1e-9


def test_dfif_beats_htfif_on_example1():
    s, _ = generate(load_fixture("example1"))
    ref = decompose(s, method="FIF")
    e_d = compare_decompositions(ref, decompose(s, method="dFIF"), "shared_remainder").per_imf_error[0]
    e_h = compare_decompositions(ref, decompose(s, method="htFIF"), "shared_remainder").per_imf_error[0]
    assert e_d < e_h
