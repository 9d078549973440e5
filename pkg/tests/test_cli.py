import json

import numpy as np
import pytest

from fracapprox.cli import ExperimentConfig, main, resolve_config


def run(args):
    return main([str(a) for a in args])


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------


def test_config_defaults_and_overrides(tmp_path):
    cfg_file = tmp_path / "exp.json"
    cfg_file.write_text(json.dumps({"ifs_path": "cantor", "trials": 77, "seed": 5}))
    cfg = resolve_config(str(cfg_file))
    assert cfg.ifs_path == "cantor" and cfg.trials == 77 and cfg.seed == 5
    cfg2 = resolve_config(str(cfg_file), seed=9, trials=11)
    assert cfg2.seed == 9 and cfg2.trials == 11


def test_config_rejects_unknown_fields(tmp_path):
    from fracapprox.cli import UsageFailure

    cfg_file = tmp_path / "exp.json"
    cfg_file.write_text(json.dumps({"ifs_path": "cantor", "mystery": 1}))
    with pytest.raises(UsageFailure):
        resolve_config(str(cfg_file))


def test_config_hash_ignores_output_dir_and_jobs():
    a = ExperimentConfig(ifs_path="cantor", output_dir="x", jobs=1)
    b = ExperimentConfig(ifs_path="cantor", output_dir="y", jobs=4)
    assert a.hash() == b.hash()
    c = ExperimentConfig(ifs_path="cantor", seed=1)
    assert a.hash() != c.hash()


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------


def test_trials_zero_is_usage_error(tmp_path):
    assert run(["--out", tmp_path, "certify", "--ifs", "cantor",
                "--trials", 0]) == 1


def test_missing_ifs_path_names_the_field(tmp_path, capsys):
    code = run(["--out", tmp_path, "certify"])
    assert code == 1
    assert "ifs_path" in capsys.readouterr().err


def test_bad_config_file_is_usage_error(tmp_path):
    assert run(["--config", tmp_path / "nope.json", "certify"]) == 1


def test_empty_taus_is_usage_error(tmp_path):
    assert run(["--out", tmp_path, "dim-report", "--ifs", "cantor",
                "--taus", ""]) == 1


def test_unknown_subcommand_is_usage_error(tmp_path):
    assert run(["frobnicate"]) == 1


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------


def test_certify_writes_three_certificates(tmp_path):
    out = tmp_path / "run"
    code = run(["--seed", 3, "--out", out, "certify", "--ifs", "cantor",
                "--trials", 60])
    assert code == 0
    constants = {}
    for name, key in (("doubling.csv", "D"), ("decay.csv", "C"),
                      ("regularity.csv", "a")):
        text = (out / name).read_text()
        lines = text.strip().split("\n")
        assert lines[0] == "# fracapprox v0.1.0"
        assert lines[1].startswith("# config_hash=")
        assert lines[2] == "# seed=3"
        tail = lines[-1]
        assert tail.startswith("# ")
        val = dict(kv.split("=") for kv in tail[2:].split())[key]
        constants[key] = float(val)
    assert constants["D"] >= 1.0
    assert constants["C"] > 0.0
    assert constants["a"] > 0.0


def test_certify_deterministic_across_jobs(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run(["--seed", 11, "--out", out1, "certify", "--ifs", "cantor",
                "--trials", 40]) == 0
    assert run(["--seed", 11, "--out", out2, "--jobs", 4, "certify",
                "--ifs", "cantor", "--trials", 40]) == 0
    for name in ("doubling.csv", "decay.csv", "regularity.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


# ---------------------------------------------------------------------------
# other subcommands
# ---------------------------------------------------------------------------


def test_decay_experiment_output(tmp_path):
    out = tmp_path / "run"
    code = run(["--seed", 2, "--out", out, "decay", "--ifs", "cantor",
                "--psi", "power:tau=2.5", "--blocks", "1:4",
                "--samples", 20000])
    assert code == 0
    text = (out / "decay_experiment.csv").read_text()
    assert "empirical_slope=" in text and "predicted_slope=" in text
    assert "smallness_onset" in text
    rows = [l for l in text.splitlines()
            if l and not l.startswith("#") and not l.startswith("n,")]
    assert len(rows) == 4


def test_lemma_audit_zero_counterexamples(tmp_path):
    out = tmp_path / "run"
    code = run(["--seed", 2, "--out", out, "lemma-audit", "--ifs", "cantor",
                "--blocks", "1:3", "--trials", 20])
    assert code == 0
    rows = [l.split(",") for l in (out / "lemma_audit.csv").read_text().splitlines()
            if l and not l.startswith("#") and not l.startswith("d,")]
    assert all(r[-1] == "0" for r in rows)


def test_sums_closed_form_verdict(tmp_path):
    out = tmp_path / "run"
    code = run(["--seed", 2, "--out", out, "sums", "--ifs", "cantor",
                "--psi", "power:tau=2.5", "--kind", "measure_zero"])
    assert code == 0
    text = (out / "sums.csv").read_text()
    assert "# converges=yes" in text
    assert "# method=closed_form" in text


def test_sums_with_table_psi(tmp_path):
    table = tmp_path / "psi.csv"
    r = np.geomspace(2.0, 2.0**45, 200)
    table.write_text("\n".join(f"{float(a)!r},{float(a**-2.5)!r}" for a in r))
    out = tmp_path / "run"
    code = run(["--seed", 2, "--out", out, "sums", "--ifs", "cantor",
                "--psi", f"table:{table}", "--kind", "measure_zero"])
    assert code == 0
    text = (out / "sums.csv").read_text()
    assert "# method=condensation_numeric" in text
    assert "# converges=yes" in text


def test_cover_cost_decreasing_tail(tmp_path):
    out = tmp_path / "run"
    code = run(["--seed", 2, "--out", out, "cover-cost", "--ifs", "cantor",
                "--psi", "power:tau=3.0", "--blocks", "2:5"])
    assert code == 0
    rows = [l.split(",") for l in (out / "cover_cost.csv").read_text().splitlines()
            if l and not l.startswith("#") and not l.startswith("n,")]
    tails = [float(r[3]) for r in rows]
    assert all(a > b for a, b in zip(tails, tails[1:]))


def test_sample_sharding_deterministic(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run(["--seed", 7, "--out", out1, "sample", "--ifs", "gasket",
                "--samples", 25000]) == 0
    assert run(["--seed", 7, "--out", out2, "--jobs", 3, "sample",
                "--ifs", "gasket", "--samples", 25000]) == 0
    assert (out1 / "samples.csv").read_bytes() == (out2 / "samples.csv").read_bytes()
    lines = (out1 / "samples.csv").read_text().strip().splitlines()
    assert lines[3] == "x_0,x_1"
    assert len(lines) == 3 + 1 + 25000


def test_dim_report_rejects_low_tau_on_stderr(tmp_path, capsys):
    out = tmp_path / "run"
    code = run(["--seed", 2, "--out", out, "dim-report", "--ifs", "cantor",
                "--taus", "1.5,2.0", "--samples", 60000])
    assert code == 0
    assert "Dirichlet" in capsys.readouterr().err
    rows = [l for l in (out / "dim_report.csv").read_text().splitlines()
            if l and not l.startswith("#") and not l.startswith("tau,")]
    assert len(rows) == 1 and rows[0].startswith("2.0,")


def test_ifs_file_path_roundtrip(tmp_path):
    from fracapprox.ifs import dump_system, four_corner_dust

    sys_file = tmp_path / "dust.json"
    dump_system(four_corner_dust(), sys_file)
    out = tmp_path / "run"
    code = run(["--seed", 1, "--out", out, "sample", "--ifs", sys_file,
                "--samples", 100])
    assert code == 0
