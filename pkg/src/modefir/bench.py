"""Synthetic multi-component signals and a timing harness for the engines."""

from __future__ import annotations

import csv
import json
import logging
import statistics
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.fft
from scipy.linalg import norm

from .engine import DecompositionConfig, decompose, normalize_method
from .signal import ModefirError, reconstruct

__all__ = [
    "Component",
    "SyntheticSpec",
    "TimingRow",
    "generate",
    "load_spec",
    "load_fixture",
    "FIXTURES",
    "match_components",
    "matched_error",
    "reconstruction_ok",
    "run_timing",
]

log = logging.getLogger(__name__)

FIXTURES = ("example1", "example2", "lod_analog")


@dataclass(frozen=True)
class Component:
    """``amplitude * (1 + am_depth * cos(2 pi am_freq x)) * sin(2 pi freq x + phase)``.

    Frequencies are in cycles over ``[0, 1]``.
    """

    amplitude: float
    frequency: float
    phase: float = 0.0
    am_depth: float = 0.0
    am_freq: float = 0.0

    def sample(self, x: np.ndarray) -> np.ndarray:
        env = self.amplitude
        if self.am_depth:
            env = self.amplitude * (1.0 + self.am_depth * np.cos(2 * np.pi * self.am_freq * x))
        return env * np.sin(2 * np.pi * self.frequency * x + self.phase)


@dataclass(frozen=True)
class SyntheticSpec:
    components: tuple
    n: int
    seed: int = 0
    noise: float = 0.0
    name: str = ""

    def __post_init__(self):
        comps = tuple(c if isinstance(c, Component) else Component(**c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ModefirError("spec needs at least one component")
        freqs = [c.frequency for c in comps]
        if len(set(freqs)) != len(freqs):
            raise ModefirError("component frequencies must be distinct")
        top = max(c.frequency + c.am_freq for c in comps)
        if self.n < 4 * top:
            raise ModefirError(
                f"aliasing: n={self.n} is below 4x the highest frequency {top}"
            )

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpec":
        return cls(
            components=tuple(d["components"]),
            n=int(d["n"]),
            seed=int(d.get("seed", 0)),
            noise=float(d.get("noise", 0.0)),
            name=d.get("name", ""),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "seed": self.seed,
            "noise": self.noise,
            "components": [c.__dict__.copy() for c in self.components],
        }

    def with_n(self, n: int) -> "SyntheticSpec":
        """Same components on ``n`` samples."""
        return SyntheticSpec(self.components, n, self.seed, self.noise, self.name)

    def rescaled(self, n: int) -> "SyntheticSpec":
        """Resample to ``n`` points keeping the samples-per-cycle of every component."""
        r = n / self.n
        comps = tuple(
            Component(c.amplitude, c.frequency * r, c.phase, c.am_depth, c.am_freq * r)
            for c in self.components
        )
        return SyntheticSpec(comps, n, self.seed, self.noise, self.name)


def generate(spec: SyntheticSpec):
    """Return ``(signal, truths)``; truths are ordered by decreasing frequency.

    Seeded white noise (``spec.noise`` standard deviation), if any, is part
    of the signal but not of the ground truth.
    """
    x = np.arange(spec.n) / (spec.n - 1)
    comps = sorted(spec.components, key=lambda c: c.frequency, reverse=True)
    truths = [c.sample(x) for c in comps]
    s = np.sum(truths, axis=0)
    if spec.noise:
        s = s + spec.noise * np.random.default_rng(spec.seed).standard_normal(spec.n)
    return s, truths


def load_spec(path) -> SyntheticSpec:
    with open(path) as fh:
        return SyntheticSpec.from_dict(json.load(fh))


def load_fixture(name: str) -> SyntheticSpec:
    """One of the stored analogs: ``example1``, ``example2``, ``lod_analog``."""
    if name not in FIXTURES:
        raise ModefirError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    text = resources.files("modefir.fixtures").joinpath(f"{name}.json").read_text()
    return SyntheticSpec.from_dict(json.loads(text))


def match_components(imfs, truths):
    """Greedy assignment of IMFs to ground-truth components by |correlation|.

    Returns a list of ``(truth_index, imf_index or None)``. Truths left
    without an IMF are paired with ``None``.
    """
    imfs = np.atleast_2d(np.asarray(imfs, dtype=np.float64)) if len(imfs) else np.empty((0, 0))
    corr = np.zeros((len(truths), len(imfs)))
    for i, t in enumerate(truths):
        for j, m in enumerate(imfs):
            den = norm(t) * norm(m)
            corr[i, j] = abs(t @ m) / den if den else 0.0
    pairs = {}
    used = set()
    for flat in np.argsort(corr, axis=None)[::-1]:
        i, j = divmod(int(flat), max(len(imfs), 1))
        if i in pairs or j in used or corr[i, j] == 0.0:
            continue
        pairs[i] = j
        used.add(j)
    return [(i, pairs.get(i)) for i in range(len(truths))]


def matched_error(imfs, truths) -> float:
    """Total relative l2 error of the greedy IMF-to-truth assignment."""
    num = den = 0.0
    for i, j in match_components(imfs, truths):
        t = truths[i]
        m = imfs[j] if j is not None else np.zeros_like(t)
        num += float(np.sum((m - t) ** 2))
        den += float(np.sum(t**2))
    return float(np.sqrt(num / den))


def reconstruction_ok(d, s) -> bool:
    """``||reconstruct(d) - s|| <= n * eps * ||s||``."""
    s = np.asarray(s, dtype=np.float64)
    tol = s.size * np.finfo(np.float64).eps * norm(s)
    return bool(norm(reconstruct(d) - s) <= tol)


@dataclass
class TimingRow:
    method: str
    n: int
    seconds: float
    imf_count: int
    iterations: tuple = ()
    samples: list = field(default_factory=list)
    error: str = ""

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "n": self.n,
            "seconds": self.seconds,
            "imf_count": self.imf_count,
            "iterations": " ".join(map(str, self.iterations)),
            "error": self.error,
        }


def run_timing(signal, methods, cfg: DecompositionConfig | None = None, repeats: int = 3):
    """Median wall time of :func:`decompose` per method, one engine at a time.

    Every method shares ``cfg`` apart from ``method``. A warm-up run per
    method is discarded; it also checks the reconstruction identity, and a
    method that fails it (or raises) yields a row with ``error`` set and no
    timing.
    """
    if repeats < 3:
        raise ModefirError("repeats must be >= 3")
    cfg = cfg or DecompositionConfig()
    s = np.asarray(signal, dtype=np.float64)
    scipy.fft.irfft(scipy.fft.rfft(s), s.size)
    rows = []
    for method in methods:
        method = normalize_method(method)
        mcfg = cfg.replace(method=method)
        try:
            d = decompose(s, mcfg)
            if not reconstruction_ok(d, s):
                raise ModefirError("reconstruction identity violated")
            samples = []
            for _ in range(repeats):
                t0 = time.perf_counter()
                decompose(s, mcfg)
                samples.append(time.perf_counter() - t0)
        except Exception as exc:
            log.error("%s failed: %s", method, exc)
            rows.append(TimingRow(method, s.size, float("nan"), 0, error=str(exc)))
            continue
        rows.append(
            TimingRow(
                method,
                s.size,
                statistics.median(samples),
                d.n_imfs,
                tuple(r.iterations_used for r in d.reports),
                samples,
            )
        )
        log.info("%s: %.4f s (%d IMFs)", method, rows[-1].seconds, d.n_imfs)
    return rows


def write_timings(rows, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["method", "n", "seconds", "imf_count", "iterations", "error"])
        w.writeheader()
        for row in rows:
            w.writerow(row.as_dict())
