import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from modefir.bench import generate, load_fixture
from modefir.cli import main, parse_grid, read_imfs, read_signal


def write_signal(path, s, header=None):
    lines = ([header] if header else []) + [repr(float(v)) for v in s]
    path.write_text("\n".join(lines) + "\n")
    return path


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def two_tone(tmp_path):
    n = 1200
    x = np.arange(n) / (n - 1)
    s = np.sin(2 * np.pi * 30 * x) + 0.7 * np.sin(2 * np.pi * 3 * x)
    return write_signal(tmp_path / "s.csv", s, header="value"), s


@pytest.fixture
def example1(tmp_path):
    s, _ = generate(load_fixture("example1"))
    return write_signal(tmp_path / "ex1.csv", s), s


def test_constant_signal_only_remainder(tmp_path):
    inp = write_signal(tmp_path / "c.csv", np.full(50, 3.0))
    assert main(["decompose", "--method", "dfif", "--input", str(inp), "--out", str(tmp_path / "run1")]) == 0
    imfs, rem = read_imfs(tmp_path / "run1" / "imfs.csv")
    assert imfs.shape == (0, 50)
    assert np.array_equal(rem, np.full(50, 3.0))
    assert (tmp_path / "run1" / "imfs.csv").read_text().splitlines()[0] == "remainder"


def test_missing_input_exits_2_without_output(tmp_path, capsys):
    out = tmp_path / "never"
    assert main(["decompose", "--method", "fif", "--input", str(tmp_path / "nope.csv"), "--out", str(out)]) == 2
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_unparseable_input_exits_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0\n2.0\nfoo\n")
    assert main(["decompose", "--method", "fif", "--input", str(bad), "--out", str(tmp_path / "o")]) == 2


def test_fif_and_if_runs_agree(tmp_path, two_tone):
    inp, _ = two_tone
    for m in ("fif", "if"):
        assert main(["decompose", "--method", m, "--input", str(inp), "--out", str(tmp_path / m)]) == 0
    a = np.loadtxt(tmp_path / "fif" / "imfs.csv", delimiter=",", skiprows=1)
    b = np.loadtxt(tmp_path / "if" / "imfs.csv", delimiter=",", skiprows=1)
    assert a.shape == b.shape
    assert np.linalg.norm(a - b) <= 1e-10 * np.linalg.norm(a)


def test_round_trip_and_manifest(tmp_path, two_tone):
    inp, s = two_tone
    run = tmp_path / "run"
    assert main(["decompose", "--method", "htfif", "--tau", "0.9", "--input", str(inp), "--out", str(run)]) == 0
    imfs, rem = read_imfs(run / "imfs.csv")
    assert np.linalg.norm(imfs.sum(axis=0) + rem - s) <= 1e-9 * np.linalg.norm(s)
    man = json.loads((run / "manifest.json").read_text())
    assert man["method"] == "htFIF"
    assert man["config"]["tau"] == 0.9 and man["config"]["kappa"] == 0.56
    assert set(man["config"]) >= {"delta", "xi", "alpha", "max_inner_iterations", "max_imfs"}
    assert len(man["reports"]) == man["n_imfs"] == imfs.shape[0]
    assert man["wall_time"] >= 0 and man["version"]


def test_manifest_replay_is_bit_identical(tmp_path, two_tone):
    inp, _ = two_tone
    run = tmp_path / "run"
    assert main(["decompose", "--method", "dfif", "--kappa", "0.4", "--input", str(inp), "--out", str(run)]) == 0
    replay = tmp_path / "replay"
    assert main(["decompose", "--manifest", str(run / "manifest.json"), "--out", str(replay)]) == 0
    assert (run / "imfs.csv").read_bytes() == (replay / "imfs.csv").read_bytes()


def test_read_signal_columns(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("# eop file\nmjd lod\n1 0.5\n2 0.25\n3 -1e-3\n")
    assert np.array_equal(read_signal(p, 1), [0.5, 0.25, -1e-3])
    assert np.array_equal(read_signal(p, 0), [1, 2, 3])


def test_compare_run_against_itself(tmp_path, two_tone):
    inp, _ = two_tone
    run = tmp_path / "run"
    main(["decompose", "--method", "fif", "--input", str(inp), "--out", str(run)])
    assert main(["compare", "--a", str(run), "--b", str(run), "--out", str(tmp_path / "cmp")]) == 0
    r = rows(tmp_path / "cmp" / "errors.csv")
    assert r and all(float(x["rel_error"]) == 0.0 for x in r)


def test_compare_fif_dfif_within_bound(tmp_path, example1):
    inp, _ = example1
    for m in ("fif", "dfif"):
        main(["decompose", "--method", m, "--input", str(inp), "--out", str(tmp_path / m)])
    out = tmp_path / "cmp"
    args = ["compare", "--a", str(tmp_path / "fif"), "--b", str(tmp_path / "dfif"), "--shared-remainder", "--out", str(out)]
    assert main(args) == 0
    r = rows(out / "errors.csv")
    assert r
    for x in r:
        assert x["bound"] != ""
        assert float(x["rel_error"]) <= float(x["bound"]) + 1e-9


def test_compare_with_method_names(tmp_path, example1):
    inp, _ = example1
    out = tmp_path / "cmp"
    assert main(["compare", "--input", str(inp), "--a", "fif", "--b", "htfif", "--out", str(out)]) == 0
    r = rows(out / "errors.csv")
    assert r[0]["bound"] != ""


def test_compare_mismatched_counts(tmp_path, two_tone, capsys):
    inp, _ = two_tone
    main(["decompose", "--method", "fif", "--input", str(inp), "--out", str(tmp_path / "a")])
    main(["decompose", "--method", "fif", "--max-imfs", "1", "--input", str(inp), "--out", str(tmp_path / "b")])
    assert main(["compare", "--a", str(tmp_path / "a"), "--b", str(tmp_path / "b"), "--out", str(tmp_path / "c")]) == 0
    assert len(rows(tmp_path / "c" / "errors.csv")) == 1
    assert "mismatch" in capsys.readouterr().err


def test_compare_unreadable_run(tmp_path):
    assert main(["compare", "--a", str(tmp_path), "--b", str(tmp_path), "--out", str(tmp_path / "c")]) == 2


def test_parse_grid():
    assert np.allclose(parse_grid("0.1:0.95:0.05"), np.arange(0.1, 0.951, 0.05))
    assert parse_grid("0.1:0.95:0.05").size == 18
    assert parse_grid("0.5").tolist() == [0.5]
    assert parse_grid("0.9:0.1:0.1").size == 0


def test_htfif_sweep_minimum(tmp_path, example1):
    inp, _ = example1
    out = tmp_path / "sw"
    assert main(["sweep", "--input", str(inp), "--method", "htfif", "--tau-grid", "0.1:0.95:0.05", "--out", str(out)]) == 0
    r = rows(out / "sweep.csv")
    assert list(r[0]) == ["tau", "err"]
    best = min(r, key=lambda x: float(x["err"]))
    assert 0.6 <= float(best["tau"]) <= 0.95


def test_single_point_grid(tmp_path, example1):
    inp, _ = example1
    out = tmp_path / "sw"
    assert main(["sweep", "--input", str(inp), "--method", "htfif", "--tau-grid", "0.8", "--out", str(out)]) == 0
    assert len(rows(out / "sweep.csv")) == 1


def test_dfif_sweep_varies_with_tau(tmp_path, example1, monkeypatch):
    monkeypatch.setenv("MODEFIR_THREADS", "2")
    inp, _ = example1
    out = tmp_path / "sw"
    args = ["sweep", "--input", str(inp), "--method", "dfif", "--tau-grid", "0.5:0.95:0.15", "--kappa-grid", "0.56", "--out", str(out)]
    assert main(args) == 0
    r = rows(out / "sweep.csv")
    assert list(r[0]) == ["tau", "kappa", "err"]
    assert [float(x["tau"]) for x in r] == [0.5, 0.65, 0.8, 0.95]
    assert len({x["err"] for x in r}) > 1


def test_empty_grid_exits_2(tmp_path, example1):
    inp, _ = example1
    out = tmp_path / "sw"
    assert main(["sweep", "--input", str(inp), "--method", "htfif", "--tau-grid", "0.9:0.1:0.1", "--out", str(out)]) == 2
    assert not out.exists()


def test_bench_outputs(tmp_path):
    out = tmp_path / "b"
    args = ["bench", "--spec", "example1", "--methods", "fif,dfif,htfif", "--repeats", "3", "--n", "3000", "--out", str(out)]
    assert main(args) == 0
    r = rows(out / "timings.csv")
    assert [x["method"] for x in r] == ["FIF", "dFIF", "htFIF"]
    assert all(float(x["seconds"]) > 0 for x in r)
    assert json.loads((out / "spec.json").read_text())["n"] == 3000


def test_bench_rejects_few_repeats(tmp_path):
    assert main(["bench", "--spec", "example1", "--repeats", "2", "--out", str(tmp_path / "b")]) == 2


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "modefir", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "modefir" in res.stdout
