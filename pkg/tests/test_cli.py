import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ftgraph import IncompleteSpectrumError, Spectrum
from ftgraph import cli


def read_csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], np.array(rows[1:], dtype=object)


def test_free_box_example(tmp_path):
    out = tmp_path / "box.csv"
    assert cli.main(["--mode", "spectrum", "--n", "0", "--L", "1.5707963", "--k-max", "10.5", "-o", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["n", "k", "residual", "residual_eq19"]
    np.testing.assert_allclose(rows[:, 1].astype(float), np.arange(1, 11), rtol=1e-7)


def test_fig2_preset_scan(tmp_path):
    out = tmp_path / "scan.csv"
    assert cli.main(["--preset", "fig2_n7", "--k-max", "20", "--k-points", "4000", "-o", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["k", "re_T", "im_T", "re_R", "im_R", "abs_T_sq"]
    assert len(rows) == 4000
    vals = rows.astype(float)
    np.testing.assert_allclose(vals[:, 5], vals[:, 1] ** 2 + vals[:, 2] ** 2, rtol=1e-14)
    assert vals[0, 0] > 0 and vals[-1, 0] == 20.0


def test_method_all_adds_disagreement(tmp_path):
    out = tmp_path / "all.csv"
    assert cli.main(["--n", "5", "--alpha", "0.7", "--phi", "1", "--k-max", "30", "--k-points", "300", "--method", "all", "-o", str(out)]) == 0
    header, rows = read_csv(out)
    assert header[-1] == "max_disagreement"
    assert rows[:, -1].astype(float).max() < 1e-10


def test_numbers_round_trip(tmp_path):
    out = tmp_path / "s.csv"
    cli.main(["--positions", "0.1,0.9", "--alpha", "3", "--k-max", "2", "--k-points", "4", "-o", str(out)])
    _, rows = read_csv(out)
    assert float(rows[1, 0]) == np.linspace(0.5, 2, 4)[1]


def test_spacings_json(tmp_path):
    out = tmp_path / "sp.json"
    assert cli.main(["--preset", "fig3a", "--alpha", "5", "--levels", "300", "--discard-low", "20", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == cli.SCHEMA_VERSION
    assert doc["config"]["alpha"] == 5.0 and doc["L"] == 5.5
    assert len(doc["spacings"]) >= 299
    assert np.mean(doc["spacings"]) == pytest.approx(1.0, abs=1e-12)
    widths = np.diff(doc["histogram"]["bin_edges"])
    assert np.sum(widths * doc["histogram"]["densities"]) == pytest.approx(1.0)
    assert 0 <= doc["ks_wigner"] <= 1 and 0 <= doc["ks_poisson"] <= 1


def test_sqrt_box_rule_override(tmp_path):
    out = tmp_path / "sp.json"
    assert cli.main(["--preset", "fig3a", "--L", "fig3-sqrt", "--levels", "200", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["L"] == pytest.approx(0.5 * sum(math.sqrt(p) for p in (1, 2, 3, 5)))


def test_freqs_table(tmp_path):
    out = tmp_path / "f.csv"
    assert cli.main(["--mode", "freqs", "--n", "4", "--alpha", "2", "-o", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["sum", "frequency", "orders", "coefficient"]
    assert sum(rows[:, 0] == "D") == 8 and sum(rows[:, 0] == "B") == 8


def test_autocorr(tmp_path):
    out = tmp_path / "c.csv"
    assert cli.main(["--preset", "fig2_n3", "--mode", "autocorr", "--max-lag", "2", "-o", str(out)]) == 0
    assert out.read_text().startswith("# correlation_width=")
    header, rows = read_csv(out)
    assert header == ["dk", "C"] and float(rows[0, 1]) == 1.0


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"mode": "scan", "alpha": 2.0, "n": 2, "k_max": 3.0, "k_points": 5}))
    out = tmp_path / "o.csv"
    assert cli.main(["--config", str(cfg), "--k-points", "7", "-o", str(out)]) == 0
    assert len(read_csv(out)[1]) == 7


def test_config_syntax_error_has_line(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{\n  "alpha": 2,\n  "n" 3\n}\n')
    assert cli.main(["--config", str(cfg)]) == 1
    assert "line 3" in capsys.readouterr().err


@pytest.mark.parametrize("doc,needle", [
    ({"alpha": "big"}, "'alpha'"),
    ({"colour": 1}, "unknown field 'colour'"),
    ({"k_points": 1}, "'k_points'"),
    ({"L": "fig4"}, "'L'"),
    ([1, 2], "JSON object"),
])
def test_config_field_errors(tmp_path, capsys, doc, needle):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(doc))
    assert cli.main(["--config", str(cfg)]) == 1
    assert needle in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["--preset", "fig2_n5", "--alpha", "2"],
    ["--preset", "fig3b", "--alpha", "3"],
    ["--preset", "fig3b", "--n", "4"],
    ["--mode", "bogus"],
    ["--alpha", "0", "--n", "1", "--k-max", "1"],
    ["--mode", "scan", "--n", "1"],
    ["--mode", "spectrum", "--n", "1"],
    ["--mode", "spectrum", "--n", "2", "--L", "1.0", "--k-max", "5"],
    ["--positions", "2,1", "--k-max", "3"],
    ["--mode", "freqs", "--n", "0"],
])
def test_usage_errors_exit_one(argv, capsys):
    assert cli.main(argv) == 1
    assert "usage error" in capsys.readouterr().err


def test_incomplete_spectrum_exit_two(tmp_path, monkeypatch, capsys):
    partial = Spectrum(np.array([0.5, 1.0]), 2.0, np.zeros(2))

    def broken(p, k_max):
        raise IncompleteSpectrumError("count mismatch", windows=[(0.0, 2.0, 2, 3)], partial=partial)

    monkeypatch.setattr(cli, "find_spectrum", broken)
    out = tmp_path / "partial.csv"
    assert cli.main(["--mode", "spectrum", "--n", "0", "--L", "2", "--k-max", "2", "-o", str(out)]) == 2
    text = out.read_text()
    assert text.startswith("# WARNING")
    assert "0.5" in text
    assert "numerical error" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ftgraph", "--mode", "freqs", "--positions", "0,1"],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout.splitlines()[0] == "sum,frequency,orders,coefficient"


def test_levels_sets_k_max():
    cfg = cli.RunConfig(mode="spectrum", n=0, L=math.pi / 2, levels=10)
    buf = io.StringIO()
    cli.run_spectrum(cfg, buf)
    assert len(buf.getvalue().splitlines()) - 1 >= 10
