import sys

import numpy as np
import pytest

EPS = np.finfo(np.float64).eps


def dense_circulant(weights, n):
    """Explicit ``n x n`` matrix with entries ``w(x_i - x_j)`` under periodic wrap.

    Built entry by entry from the window values, independently of the
    package's embedding and FFT code.
    """
    weights = np.asarray(weights, dtype=np.float64)
    L = (weights.size - 1) // 2
    W = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            d = (i - j) % n
            if d <= L:
                W[i, j] = weights[L + d]
            elif n - d <= L:
                W[i, j] = weights[L - (n - d)]
    return W


def brute_extrema(s):
    """Loop-based extrema count with plateau collapsing, for use as an oracle."""
    vals = []
    for v in s:
        if not vals or v != vals[-1]:
            vals.append(v)
    count = 0
    for i in range(1, len(vals) - 1):
        if (vals[i] > vals[i - 1] and vals[i] > vals[i + 1]) or (
            vals[i] < vals[i - 1] and vals[i] < vals[i + 1]
        ):
            count += 1
    return count


def rel(a, b):
    return np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(b)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
