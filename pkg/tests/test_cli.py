"""CLI contract: subcommands, file formats, exit codes, reproducibility."""

import json
import shutil
import subprocess

import numpy as np
import pytest

from frontier_adapt.cli import main


def _read_csv(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    return header, rows


def test_simulate_writes_csv_and_manifest(tmp_path):
    out = tmp_path / "sample.csv"
    rc = main(
        ["simulate", "--f", "f2", "--em", "negexp", "--n", "50", "--seed", "3",
         "--out", str(out)]
    )
    assert rc == 0
    header, rows = _read_csv(out)
    assert header == ["x", "y"] and len(rows) == 50
    xs = np.array([float(r[0]) for r in rows])
    np.testing.assert_allclose(xs, np.arange(1, 51) / 50, rtol=1e-15)
    manifest = json.loads((tmp_path / "sample.csv.manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert manifest["seed"] == 3
    assert str(out) in manifest["outputs"]
    assert "frontier_adapt" in manifest["versions"]


def test_simulate_reruns_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--f", "f1", "--em", "neguniform", "--n", "40", "--seed", "9"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_bad_n_exits_2(tmp_path):
    rc = main(
        ["simulate", "--f", "f1", "--em", "negexp", "--n", "1", "--out",
         str(tmp_path / "x.csv")]
    )
    assert rc == 2


def test_estimate_envelope_lies_above_sample(tmp_path):
    sample_csv = tmp_path / "s.csv"
    main(["simulate", "--f", "f1", "--em", "negexp", "--n", "80", "--seed", "5",
          "--out", str(sample_csv)])
    out = tmp_path / "fit.csv"
    rc = main(["estimate", str(sample_csv), "--out", str(out)])
    assert rc == 0
    header, rows = _read_csv(out)
    assert header == ["x", "f_hat", "k_hat", "zeta_at_khat"]
    fit = np.array([float(r[1]) for r in rows])
    _, srows = _read_csv(sample_csv)
    ys = np.array([float(r[1]) for r in srows])
    assert np.all(fit >= ys - 1e-6)
    diag = json.loads((tmp_path / "fit.diagnostics.json").read_text())
    assert diag["mode"] == "pointwise" and diag["n"] == 80
    assert len(diag["k_hat"]) == 80
    assert (tmp_path / "fit.csv.manifest.json").exists()


def test_estimate_headerless_single_column(tmp_path):
    data = tmp_path / "ys.csv"
    rng = np.random.default_rng(0)
    data.write_text("".join(f"{v}\n" for v in -rng.exponential(size=30)))
    rc = main(["estimate", str(data), "--out", str(tmp_path / "fit.csv")])
    assert rc == 0


def test_estimate_malformed_row_cites_line(tmp_path, capsys):
    data = tmp_path / "bad.csv"
    data.write_text("x,y\n0.5,-1.0\n1.0,oops\n")
    rc = main(["estimate", str(data), "--out", str(tmp_path / "f.csv")])
    assert rc == 3
    assert "line 3" in capsys.readouterr().err


def test_estimate_non_equidistant_exits_3(tmp_path, capsys):
    data = tmp_path / "skew.csv"
    data.write_text("x,y\n" + "".join(f"{x},-1.0\n" for x in (0.1, 0.2, 0.5, 0.6)))
    rc = main(["estimate", str(data), "--out", str(tmp_path / "f.csv")])
    assert rc == 3
    assert "equidistant" in capsys.readouterr().err


def test_missing_input_exits_3(tmp_path):
    rc = main(["estimate", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "f.csv")])
    assert rc == 3


def test_unknown_error_model_rejected_by_parser(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--f", "f1", "--em", "gauss", "--n", "10",
              "--out", str(tmp_path / "x.csv")])
    assert exc.value.code == 2


def test_tail_constant_sample_exits_4_with_hint(tmp_path, capsys):
    data = tmp_path / "const.csv"
    data.write_text("y\n" + "-2.0\n" * 40)
    rc = main(["tail", str(data), "--out", str(tmp_path / "t.json")])
    assert rc == 4
    assert "hint" in capsys.readouterr().err


def test_tail_shift_invariance(tmp_path):
    rng = np.random.default_rng(12)
    ys = -rng.exponential(size=400)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text("y\n" + "".join(f"{float(v)!r}\n" for v in ys))
    b.write_text("y\n" + "".join(f"{float(v) + 10.0!r}\n" for v in ys))
    assert main(["tail", str(a), "--out", str(tmp_path / "ta.json")]) == 0
    assert main(["tail", str(b), "--out", str(tmp_path / "tb.json")]) == 0
    ta = json.loads((tmp_path / "ta.json").read_text())
    tb = json.loads((tmp_path / "tb.json").read_text())
    assert tb["alpha_hat"] == pytest.approx(ta["alpha_hat"], rel=1e-9)
    assert tb["b_hat"] == pytest.approx(ta["b_hat"], rel=1e-9)
    assert tb["k_alpha"] == ta["k_alpha"] and tb["k_b"] == ta["k_b"]
    assert len(ta["a_hat"]["y"]) == 41


def test_rates_risks_file_passthrough(tmp_path):
    risks = tmp_path / "risks.csv"
    ns = [100, 200, 400, 800]
    risks.write_text("n,risk\n" + "".join(f"{n},{5.0 / n}\n" for n in ns))
    out = tmp_path / "rates.csv"
    rc = main(["rates", "--risks-file", str(risks), "--out", str(out)])
    assert rc == 0
    report = json.loads((tmp_path / "rates.report.json").read_text())
    assert report["slope"] == pytest.approx(-1.0, abs=1e-12)
    assert report["n_values"] == ns
    header, rows = _read_csv(out)
    assert header == ["n", "risk", "stderr"] and len(rows) == 4


def test_rates_theory_exponent_in_report(tmp_path):
    risks = tmp_path / "risks.csv"
    risks.write_text("n,risk\n100,0.1\n200,0.05\n400,0.025\n")
    rc = main(["rates", "--risks-file", str(risks), "--alpha", "1.0", "--beta", "1.0",
               "--out", str(tmp_path / "r.csv")])
    assert rc == 0
    report = json.loads((tmp_path / "r.report.json").read_text())
    # pointwise squared loss: -2 beta / (alpha beta + 1)
    assert report["theoretical_exponent"] == pytest.approx(-1.0)


def test_rates_two_n_values_exits_4(tmp_path):
    risks = tmp_path / "risks.csv"
    risks.write_text("n,risk\n100,0.1\n200,0.05\n")
    rc = main(["rates", "--risks-file", str(risks), "--out", str(tmp_path / "r.csv")])
    assert rc == 4


def test_config_file_and_flag_override(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"rho": 4.0, "h0_exponent": 0.45}))
    sample = tmp_path / "s.csv"
    main(["simulate", "--f", "const", "--em", "negexp", "--n", "60", "--seed", "1",
          "--out", str(sample)])
    out = tmp_path / "fit.csv"
    rc = main(["estimate", str(sample), "--config", str(cfgfile), "--rho", "2.5",
               "--out", str(out)])
    assert rc == 0
    diag = json.loads((tmp_path / "fit.diagnostics.json").read_text())
    assert diag["grid"]["rho"] == 2.5  # flag wins over file
    manifest = json.loads((tmp_path / "fit.csv.manifest.json").read_text())
    assert manifest["config"]["rho"] == 2.5
    assert manifest["config"]["h0_exponent"] == 0.45


def test_config_file_unknown_key_exits_2(tmp_path, capsys):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"rh": 2.0}))
    data = tmp_path / "s.csv"
    data.write_text("y\n-1.0\n-2.0\n-1.5\n")
    rc = main(["estimate", str(data), "--config", str(cfgfile),
               "--out", str(tmp_path / "f.csv")])
    assert rc == 2
    assert "rh" in capsys.readouterr().err


def test_config_file_invalid_json_exits_2(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text("{not json")
    data = tmp_path / "s.csv"
    data.write_text("y\n-1.0\n-2.0\n")
    rc = main(["estimate", str(data), "--config", str(cfgfile),
               "--out", str(tmp_path / "f.csv")])
    assert rc == 2


def test_threads_env_fallback(tmp_path, monkeypatch):
    risks = tmp_path / "risks.csv"
    risks.write_text("n,risk\n100,0.1\n200,0.05\n400,0.025\n")
    monkeypatch.setenv("FRONTIER_ADAPT_THREADS", "2")
    rc = main(["rates", "--risks-file", str(risks), "--out", str(tmp_path / "r.csv")])
    assert rc == 0
    monkeypatch.setenv("FRONTIER_ADAPT_THREADS", "lots")
    rc = main(["rates", "--risks-file", str(risks), "--out", str(tmp_path / "r2.csv")])
    assert rc == 2


def test_rates_monte_carlo_with_worker_pool(tmp_path, monkeypatch):
    monkeypatch.setenv("FRONTIER_ADAPT_THREADS", "2")
    out = tmp_path / "rates.csv"
    rc = main(["rates", "--f", "const", "--em", "negexp", "--n-list", "40,60,90",
               "--reps", "4", "--target", "point:0.5", "--seed", "2",
               "--out", str(out)])
    assert rc == 0
    report = json.loads((tmp_path / "rates.report.json").read_text())
    assert len(report["risks"]) == 3
    assert all(r > 0 for r in report["risks"])


def test_console_script_help():
    exe = shutil.which("frontier-adapt")
    assert exe is not None, "console script not on PATH"
    proc = subprocess.run([exe, "--help"], capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    for sub in ("estimate", "simulate", "tail", "rates"):
        assert sub in proc.stdout
