"""Command-line front end: ``modefir {decompose,compare,sweep,bench}``.

Every command writes into its own output directory. Exit codes: 0 ok,
2 input error, 3 engine error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import re
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bench import FIXTURES, generate, load_fixture, load_spec, run_timing, write_timings
from .engine import DecompositionConfig, decompose, extract_imf, normalize_method
from .filters import build_filter, estimate_filter_length, filter_spectrum
from .metrics import compare_decompositions, relative_error
from .signal import Decomposition, IterationReport, ModefirError, as_signal

log = logging.getLogger("modefir")

EXIT_OK, EXIT_INPUT, EXIT_ENGINE = 0, 2, 3
FMT = "%.17g"


class InputError(Exception):
    pass


# ---------------------------------------------------------------- input


def read_signal(path, column: int = 0) -> np.ndarray:
    """Parse a delimited text file into a signal.

    Fields may be separated by commas, semicolons or whitespace. Lines
    starting with ``#`` are comments; leading lines that do not parse as
    numbers are treated as headers. ``column`` is zero-based.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    values = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f for f in re.split(r"[,;\s]+", line) if f]
            try:
                values.append(float(fields[column]))
            except IndexError:
                raise InputError(f"{path}:{lineno}: no column {column}") from None
            except ValueError:
                if values:
                    raise InputError(f"{path}:{lineno}: cannot parse {fields[column]!r}") from None
    if not values:
        raise InputError(f"{path}: no numeric samples found")
    try:
        return as_signal(values)
    except ModefirError as exc:
        raise InputError(f"{path}: {exc}") from None


def write_imfs(d: Decomposition, path) -> None:
    """One column per IMF (``imf_1 .. imf_M``) plus ``remainder``; one row per sample."""
    cols = [f"imf_{k}" for k in range(1, d.n_imfs + 1)] + ["remainder"]
    data = np.column_stack([*d.imfs, d.remainder]) if d.n_imfs else d.remainder[:, None]
    np.savetxt(path, data, delimiter=",", header=",".join(cols), comments="", fmt=FMT)


def read_imfs(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(header) or header[-1] != "remainder":
        raise InputError(f"{path}: malformed IMF table")
    return data[:, :-1].T, data[:, -1]


def _config_from_args(args) -> DecompositionConfig:
    kw = {}
    for name in ("tau", "kappa", "delta", "xi", "alpha", "max_imfs"):
        val = getattr(args, name, None)
        if val is not None:
            kw[name] = val
    if getattr(args, "method", None):
        kw["method"] = args.method
    return DecompositionConfig(**kw)


def load_run(run_dir) -> tuple[Decomposition, dict]:
    """Rebuild a :class:`Decomposition` from a ``decompose`` output directory."""
    run_dir = Path(run_dir)
    try:
        manifest = json.loads((run_dir / "manifest.json").read_text())
        imfs, remainder = read_imfs(run_dir / "imfs.csv")
        cfg = DecompositionConfig(**manifest["config"])
        reports = [IterationReport(**r) for r in manifest["reports"]]
    except (OSError, ValueError, KeyError, TypeError, ModefirError) as exc:
        raise InputError(f"{run_dir}: unreadable run ({exc})") from None
    return Decomposition(imfs, remainder, reports, cfg), manifest


def parse_grid(spec: str) -> np.ndarray:
    """``A:B:STEP`` (inclusive of B up to rounding) or a single value."""
    parts = spec.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise InputError(f"bad grid {spec!r}") from None
    if len(nums) == 1:
        return np.array(nums)
    if len(nums) != 3:
        raise InputError(f"grid must be A:B:STEP, got {spec!r}")
    a, b, step = nums
    if step <= 0 or a > b:
        return np.empty(0)
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return np.round(a + step * np.arange(count), 12)


# ------------------------------------------------------------- commands


def cmd_decompose(args) -> int:
    if args.manifest:
        try:
            manifest = json.loads(Path(args.manifest).read_text())
            args.input = args.input or manifest["input"]
            args.column = manifest.get("column", 0)
            cfg = DecompositionConfig(**manifest["config"])
        except (OSError, ValueError, KeyError, TypeError, ModefirError) as exc:
            raise InputError(f"{args.manifest}: unreadable manifest ({exc})") from None
    else:
        if not args.input or not args.method:
            raise InputError("decompose needs --input and --method (or --manifest)")
        try:
            cfg = _config_from_args(args)
        except ModefirError as exc:
            raise InputError(str(exc)) from None
    s = read_signal(args.input, args.column)

    t0 = time.perf_counter()
    d = decompose(s, cfg)
    wall = time.perf_counter() - t0

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_imfs(d, out / "imfs.csv")
    manifest = {
        "input": str(args.input),
        "column": args.column,
        "n": int(s.size),
        "method": cfg.method,
        "config": cfg.as_dict(),
        "reports": [r.as_dict() for r in d.reports],
        "n_imfs": d.n_imfs,
        "wall_time": wall,
        "version": __version__,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"{cfg.method}: {d.n_imfs} IMFs in {wall:.3f} s -> {out}")
    return EXIT_OK


def _decomposition_for(args, which: str):
    ref = getattr(args, which)
    if args.input:
        s = read_signal(args.input, args.column)
        try:
            cfg = DecompositionConfig(method=ref)
        except ModefirError as exc:
            raise InputError(str(exc)) from None
        return decompose(s, cfg)
    d, _ = load_run(ref)
    return d


def cmd_compare(args) -> int:
    d1 = _decomposition_for(args, "a")
    d2 = _decomposition_for(args, "b")
    if d1.n != d2.n:
        raise InputError(f"runs have different lengths ({d1.n} vs {d2.n})")
    mode = "shared_remainder" if args.shared_remainder else "independent"
    rep = compare_decompositions(d1, d2, mode)
    for note in rep.notes:
        print(f"warning: {note}", file=sys.stderr)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "errors.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["imf_index", "rel_error", "bound"])
        for k, e, b in rep.rows():
            w.writerow([k, FMT % e, "" if b is None else FMT % b])

    print(f"{rep.method_pair[1]} vs {rep.method_pair[0]} ({mode})")
    print(f"{'imf':>4}  {'rel_error':>12}  {'bound':>12}")
    for k, e, b in rep.rows():
        print(f"{k:>4}  {e:>12.4e}  {'-' if b is None else format(b, '12.4e'):>12}")
    return EXIT_OK


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MODEFIR_THREADS", os.cpu_count() or 1)))
    except ValueError:
        return 1


def cmd_sweep(args) -> int:
    method = normalize_method(args.method)
    if method not in ("dFIF", "htFIF"):
        raise InputError("sweep supports dfif and htfif only")
    taus = parse_grid(args.tau_grid)
    kappas = parse_grid(args.kappa_grid) if args.kappa_grid else np.array([0.56])
    if taus.size == 0 or kappas.size == 0:
        raise InputError("empty grid")
    if np.any((taus <= 0) | (taus >= 1)) or np.any((kappas <= 0) | (kappas >= 1)):
        raise InputError("grid values must lie in (0, 1)")
    s = read_signal(args.input, args.column)
    try:
        base = _config_from_args(argparse.Namespace(
            delta=args.delta, xi=args.xi, alpha=args.alpha, method="FIF"))
    except ModefirError as exc:
        raise InputError(str(exc)) from None

    L = estimate_filter_length(s, base.xi, base.alpha)
    spec = filter_spectrum(build_filter(L), s.size)
    ref = extract_imf(s, spec, base).imf

    if method == "htFIF":
        points = [(t, None) for t in taus]
    else:
        points = [(t, k) for t in taus for k in kappas]

    def err(point):
        tau, kappa = point
        cfg = base.replace(method=method, tau=float(tau), kappa=float(kappa or base.kappa))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return relative_error(extract_imf(s, spec, cfg).imf, ref)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        errors = list(pool.map(err, points))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "sweep.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "err"] if method == "htFIF" else ["tau", "kappa", "err"])
        for (tau, kappa), e in zip(points, errors):
            row = [FMT % tau] + ([] if kappa is None else [FMT % kappa]) + [FMT % e]
            w.writerow(row)
    best = int(np.argmin(errors))
    print(f"{method} sweep: {len(points)} points, L={L}; min err {errors[best]:.4e} at tau={points[best][0]}"
          + ("" if points[best][1] is None else f", kappa={points[best][1]}"))
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.spec in FIXTURES and not Path(args.spec).exists():
        spec = load_fixture(args.spec)
    else:
        try:
            spec = load_spec(args.spec)
        except (OSError, ValueError, KeyError, TypeError, ModefirError) as exc:
            raise InputError(f"{args.spec}: unreadable spec ({exc})") from None
    if args.n:
        try:
            spec = spec.rescaled(args.n)
        except ModefirError as exc:
            raise InputError(str(exc)) from None
    try:
        methods = [normalize_method(m) for m in args.methods.split(",") if m]
        cfg = _config_from_args(argparse.Namespace(
            delta=args.delta, xi=args.xi, alpha=args.alpha, max_imfs=args.max_imfs, method="FIF"))
    except ModefirError as exc:
        raise InputError(str(exc)) from None
    if args.repeats < 3:
        raise InputError("--repeats must be >= 3")
    s, _ = generate(spec)
    rows = run_timing(s, methods, cfg, args.repeats)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_timings(rows, out / "timings.csv")
    (out / "spec.json").write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
    for r in rows:
        status = r.error or f"{r.seconds:.4f} s, {r.imf_count} IMFs"
        print(f"{r.method:>6}  n={r.n}  {status}")
    return EXIT_ENGINE if any(r.error for r in rows) else EXIT_OK


# --------------------------------------------------------------- parser


def _add_tunables(p):
    p.add_argument("--tau", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--alpha", help="ave, almost_min or pN (N-th percentile gap)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modefir", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    methods = ["if", "fif", "dfif", "htfif"]

    p = sub.add_parser("decompose", help="decompose a signal into IMFs")
    p.add_argument("--input")
    p.add_argument("--column", type=int, default=0, help="zero-based column index")
    p.add_argument("--method", type=str.lower, choices=methods)
    _add_tunables(p)
    p.add_argument("--max-imfs", dest="max_imfs", type=int)
    p.add_argument("--manifest", help="replay the input and config recorded in a manifest.json")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("compare", help="per-IMF relative errors between two runs")
    p.add_argument("--a", required=True, help="reference run directory (or method with --input)")
    p.add_argument("--b", required=True, help="candidate run directory (or method with --input)")
    p.add_argument("--input", help="decompose this signal with methods --a and --b")
    p.add_argument("--column", type=int, default=0)
    p.add_argument("--shared-remainder", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="first-IMF error against FIF over a tau (and kappa) grid")
    p.add_argument("--input", required=True)
    p.add_argument("--column", type=int, default=0)
    p.add_argument("--method", type=str.lower, choices=["dfif", "htfif"], required=True)
    p.add_argument("--tau-grid", required=True)
    p.add_argument("--kappa-grid")
    p.add_argument("--delta", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--alpha")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="time the engines on a synthetic signal")
    p.add_argument("--spec", required=True, help=f"spec JSON file or fixture name ({', '.join(FIXTURES)})")
    p.add_argument("--methods", default="if,fif,dfif,htfif")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--n", type=int, help="rescale the spec to this many samples")
    p.add_argument("--delta", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--alpha")
    p.add_argument("--max-imfs", dest="max_imfs", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except InputError as exc:
        print(f"modefir: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ModefirError as exc:
        print(f"modefir: engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
