import csv
import json

import numpy as np
import pytest

from rbflt.cli import main
from rbflt.config import RunConfig, coerce, parse_pairs, read_config
from rbflt.metrics import error_norms


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float), rows


def test_config_parsing(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# problem 2 at two times\nproblem = problem2\nN = 41\ntimes = 0.5, 1.0\nxi=1.0\n"
                    "max_linf = 1e-2\ncontour_h = 0.1\ncontour_v = 5\ndump_matrices = yes\n")
    d = read_config(path)
    assert d["N"] == 41 and d["times"] == (0.5, 1.0) and d["dump_matrices"] is True
    cfg = RunConfig.from_dict(d)
    assert cfg.overrides == {"N": 41, "times": (0.5, 1.0), "xi": 1.0}
    assert cfg.contour_params == {"h": 0.1, "v": 5.0} and cfg.checks == {"max_linf": 1e-2}
    with pytest.raises(ValueError):
        coerce("N", "4.5")
    with pytest.raises(ValueError):
        parse_pairs(["colour=red"])
    with pytest.raises(ValueError):
        parse_pairs(["N"])
    with pytest.raises(ValueError):
        RunConfig.from_dict({"N": 3})
    with pytest.raises(ValueError):
        RunConfig.from_dict({"problem": "problem2", "contour_h": 0.1})


@pytest.fixture(scope="module")
def problem2_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("p2")
    code = main(["preset", "problem2", "--out", str(out), "times=0.5,1.0", "max_linf=5e-3"])
    return code, out


def test_preset_outputs(problem2_run):
    code, out = problem2_run
    assert code == 0
    header, err, raw = read_csv(out / "errors.csv")
    assert header == ["N", "Linf", "L2", "RMS", "t"]
    assert err.shape == (2, 5) and np.all(err[:, 0] == 61)
    # 17 significant digits in scientific notation
    mantissa = raw[1][1].split("e")[0].replace("-", "").replace(".", "")
    assert len(mantissa) == 17
    _, prof, _ = read_csv(out / "profiles.csv")
    for row in err:
        sel = prof[prof[:, 0] == row[4]]
        assert tuple(row[1:4]) == error_norms(sel[:, 2], sel[:, 3])
    manifest = (out / "manifest.txt").read_text()
    for key in ("contour_kind = parabolic", "contour_v = ", "contour_h = ", "N = 61", "check_max_linf = pass"):
        assert key in manifest


def test_rerun_is_byte_identical(problem2_run, tmp_path):
    _, first = problem2_run
    assert main(["preset", "problem2", "--out", str(tmp_path), "--threads", "3", "times=0.5,1.0",
                 "max_linf=5e-3"]) == 0
    for name in ("errors.csv", "profiles.csv"):
        assert (tmp_path / name).read_bytes() == (first / name).read_bytes()


def test_failed_check_sets_exit_code(tmp_path):
    assert main(["preset", "problem2", "--out", str(tmp_path), "max_linf=1e-12"]) == 1


def test_invalid_config_writes_nothing(tmp_path):
    out = tmp_path / "bad"
    assert main(["preset", "problem2", "--out", str(out), "N=5", "n_x=11"]) == 2
    assert not out.exists()
    assert main(["preset", "problem2", "--out", str(out), "times=9.0"]) == 2
    assert not out.exists()


def test_run_config_file_with_dump(tmp_path):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("problem = problem2\nN = 21\nn_x = 5\ndump_matrices = true\n")
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 0
    header, d1, _ = read_csv(tmp_path / "o" / "D1.csv")
    assert header == ["row", "col", "value"] and len(d1) == 21 * 5
    assert not (tmp_path / "o" / "D3.csv").exists()
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o2"), "N=25"]) == 0
    assert "N = 25" in (tmp_path / "o2" / "manifest.txt").read_text()
    assert main(["run", "--preset", "problem2", "--out", str(tmp_path / "o3"), "N=21"]) == 0


def test_probe_traces(tmp_path):
    out = tmp_path / "probe"
    assert main(["preset", "problem2", "--out", str(out), "probes=0.25,0.5", "times=0.3,0.4,0.5"]) == 0
    header, tr, _ = read_csv(out / "probe_0.csv")
    assert header == ["t", "u"] and tr[0, 0] == 0.0 and len(tr) == 4
    assert tr[-1, 1] == pytest.approx(np.sin(2 * np.pi * 0.25) * 0.25, abs=1e-4)


def test_selftest_and_calibrate(tmp_path, capsys):
    assert main(["invert-selftest"]) == 0
    assert "invert-selftest: pass" in capsys.readouterr().out
    save = tmp_path / "presets.json"
    assert main(["calibrate-contour", "parabolic", "0.5", "5", "20", "--save", str(save)]) == 0
    assert main(["calibrate-contour", "parabolic", "0.5", "5", "20", "--save", str(save)]) == 0
    entries = json.loads(save.read_text())
    assert len(entries) == 1 and entries[0]["M"] == 20 and entries[0]["suite_error"] < 1e-3
