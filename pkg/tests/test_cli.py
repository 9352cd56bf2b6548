import json

import numpy as np
import pytest

from chargecent.cli import main
from chargecent.scores import ScoreVector


@pytest.fixture
def graph_file(tmp_path):
    f = tmp_path / "g.tsv"
    f.write_text("0 1\n1 2\n2 3\n3 0\n1 3\n")
    return f


def run(*argv):
    return main([str(a) for a in argv])


def test_centrality_writes_scores_and_meta(graph_file, tmp_path):
    out = tmp_path / "run"
    code = run("centrality", "--input", graph_file, "--kappa", "2",
               "--omega-ratio", "0.5", "--seed", "3", "--measure", "soc-katz",
               "--alpha", "0.1", "--out", out)
    assert code == 0
    sv = ScoreVector.read_csv(out / "scores.csv")
    assert len(sv) == 4
    meta = json.loads((out / "scores.meta.json").read_text())
    assert meta["config"]["kappa"] == 2
    assert meta["config"]["seed"] == 3
    assert meta["alpha"] == 0.1


@pytest.mark.parametrize("measure", ["soc-katz", "katz", "soc-bc", "bc"])
def test_all_walk_measures_run(graph_file, tmp_path, measure):
    out = tmp_path / measure
    assert run("centrality", "--input", graph_file, "--kappa", "2",
               "--omega-ratio", "0.25", "--seed", "1", "--measure", measure,
               "--out", out) == 0
    assert (out / "scores.csv").exists()


@pytest.mark.parametrize("measure", ["soc-rwbc", "rwbc"])
def test_rwbc_measures_need_pairs(graph_file, tmp_path, measure):
    out = tmp_path / measure
    assert run("centrality", "--input", graph_file, "--kappa", "2",
               "--measure", measure, "--out", out) == 1
    assert run("centrality", "--input", graph_file, "--kappa", "2",
               "--measure", measure, "--pairs", "4", "--seed", "2",
               "--out", out) == 0


def test_centrality_verify_mode(graph_file, tmp_path):
    assert run("centrality", "--input", graph_file, "--kappa", "2",
               "--omega-ratio", "0.5", "--seed", "5", "--measure", "soc-bc",
               "--verify", "--out", tmp_path / "v") == 0


def test_simulate_sir_and_alpha_zero(graph_file, tmp_path):
    out = tmp_path / "sim"
    assert run("simulate", "--input", graph_file, "--kappa", "2", "--sim", "sir",
               "--alpha", "0.0", "--runs", "3", "--seed", "1", "--out", out) == 0
    sv = ScoreVector.read_csv(out / "realized.csv")
    assert np.all(sv.values == 1.0)


def test_simulate_hopping(graph_file, tmp_path):
    out = tmp_path / "hop"
    assert run("simulate", "--input", graph_file, "--kappa", "2", "--sim", "hopping",
               "--duration", "50", "--injection-rate", "1.0", "--seed", "4",
               "--omega-ratio", "0.25", "--out", out) == 0
    meta = json.loads((out / "realized.meta.json").read_text())
    assert meta["placed"] > 0


def test_determinism_byte_identical(graph_file, tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run("simulate", "--input", graph_file, "--kappa", "2", "--sim", "hopping",
                   "--duration", "40", "--seed", "9", "--omega-ratio", "0.5",
                   "--out", out) == 0
        assert run("centrality", "--input", graph_file, "--kappa", "2",
                   "--omega-ratio", "0.5", "--seed", "9", "--measure", "soc-bc",
                   "--out", out) == 0
        outs.append(out)
    for fname in ("realized.csv", "realized.meta.json", "scores.csv", "scores.meta.json"):
        assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()


def test_correlate_identity_and_reversal(tmp_path):
    a = ScoreVector(np.array([1.0, 2.0, 3.0]), ["x", "y", "z"])
    b = ScoreVector(np.array([3.0, 2.0, 1.0]), ["x", "y", "z"])
    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_csv(pa)
    b.write_csv(pb)
    rep = tmp_path / "r.json"
    assert run("correlate", "--expected", pa, "--realized", pa, "--out", rep) == 0
    assert json.loads(rep.read_text())["tau"] == 1.0
    assert run("correlate", "--expected", pa, "--realized", pb, "--out", rep) == 0
    assert json.loads(rep.read_text())["tau"] == -1.0


def test_correlate_label_mismatch(tmp_path):
    a = ScoreVector(np.array([1.0, 2.0]), ["x", "y"])
    b = ScoreVector(np.array([1.0, 2.0]), ["x", "q"])
    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_csv(pa)
    b.write_csv(pb)
    assert run("correlate", "--expected", pa, "--realized", pb) == 1


def test_missing_input_is_input_error(tmp_path):
    assert run("centrality", "--input", tmp_path / "nope.tsv", "--measure", "bc",
               "--kappa", "1", "--out", tmp_path) == 1


def test_invalid_alpha_is_input_error(graph_file, tmp_path):
    assert run("centrality", "--input", graph_file, "--kappa", "1",
               "--measure", "katz", "--alpha", "5.0", "--out", tmp_path) == 1


def test_config_file_with_cli_override(graph_file, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "input": str(graph_file), "kappa": 2, "omega_ratio": 0.5,
        "seed": 6, "measure": "soc-katz", "alpha": 0.05,
    }))
    out = tmp_path / "from_cfg"
    assert run("centrality", "--config", cfg, "--out", out) == 0
    meta = json.loads((out / "scores.meta.json").read_text())
    assert meta["config"]["alpha"] == 0.05
    out2 = tmp_path / "override"
    assert run("centrality", "--config", cfg, "--alpha", "0.01", "--out", out2) == 0
    meta2 = json.loads((out2 / "scores.meta.json").read_text())
    assert meta2["config"]["alpha"] == 0.01


def test_unknown_config_key_rejected(graph_file, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"input": str(graph_file), "knob": 1}))
    assert run("centrality", "--config", cfg, "--measure", "bc", "--out", tmp_path) == 1


def test_state_dump_for_soc_bc(graph_file, tmp_path):
    out = tmp_path / "dump"
    assert run("centrality", "--input", graph_file, "--kappa", "2",
               "--measure", "soc-bc", "--state-dump", "--out", out) == 0
    lines = (out / "scores.states.csv").read_text().splitlines()
    assert lines[0] == "node_label,charge,score"
    assert len(lines) == 1 + 4 * 3  # nodes x charge levels
    # per-charge rows sum to the per-node scores
    sv = ScoreVector.read_csv(out / "scores.csv")
    sums = {lab: 0.0 for lab in sv.labels}
    for ln in lines[1:]:
        lab, _, score = ln.split(",")
        sums[lab] += float(score)
    assert np.allclose([sums[lab] for lab in sv.labels], sv.values)
    assert run("centrality", "--input", graph_file, "--kappa", "2",
               "--measure", "bc", "--state-dump", "--out", out) == 1


def test_correlate_report_carries_run_context(graph_file, tmp_path):
    exp = tmp_path / "exp"
    real = tmp_path / "real"
    assert run("centrality", "--input", graph_file, "--kappa", "2",
               "--omega-ratio", "0.5", "--seed", "2", "--measure", "soc-katz",
               "--alpha", "0.05", "--out", exp) == 0
    assert run("simulate", "--input", graph_file, "--kappa", "2", "--sim", "sir",
               "--alpha", "0.2", "--runs", "10", "--seed", "2",
               "--omega-ratio", "0.5", "--out", real) == 0
    rep = tmp_path / "rep.json"
    assert run("correlate", "--expected", exp / "scores.csv",
               "--realized", real / "realized.csv", "--out", rep) == 0
    report = json.loads(rep.read_text())
    assert report["measure"] == "soc-katz"
    assert report["simulation"] == "sir"
    assert report["kappa"] == 2 and report["omega_ratio"] == 0.5 and report["seed"] == 2


def test_experiment_workers_match_serial(graph_file, tmp_path):
    argv = ["experiment", "--input", str(graph_file), "--kappa", "2",
            "--measure", "soc-katz", "--alpha", "0.05", "--sim", "sir",
            "--runs", "10", "--ratios", "0.5", "--reps", "2", "--seed", "21"]
    serial = tmp_path / "serial"
    pooled = tmp_path / "pooled"
    assert main(argv + ["--out", str(serial)]) == 0
    assert main(argv + ["--workers", "2", "--out", str(pooled)]) == 0
    assert (serial / "taus.csv").read_bytes() == (pooled / "taus.csv").read_bytes()


def test_experiment_and_batch_summary(graph_file, tmp_path):
    out = tmp_path / "exp"
    assert run("experiment", "--input", graph_file, "--kappa", "2",
               "--measure", "soc-katz", "--alpha", "0.05", "--sim", "sir",
               "--runs", "20", "--ratios", "0.25,0.5", "--reps", "2",
               "--seed", "11", "--out", out) == 0
    summary = (out / "summary.csv").read_text().splitlines()
    assert summary[0].startswith("ratio,reps")
    assert len(summary) == 3
    taus = (out / "taus.csv").read_text().splitlines()
    assert len(taus) == 5
    # rerun reproduces byte-identical outputs
    out2 = tmp_path / "exp2"
    assert run("experiment", "--input", graph_file, "--kappa", "2",
               "--measure", "soc-katz", "--alpha", "0.05", "--sim", "sir",
               "--runs", "20", "--ratios", "0.25,0.5", "--reps", "2",
               "--seed", "11", "--out", out2) == 0
    assert (out / "taus.csv").read_bytes() == (out2 / "taus.csv").read_bytes()
    assert (out / "summary.csv").read_bytes() == (out2 / "summary.csv").read_bytes()
