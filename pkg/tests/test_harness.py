import csv
import json

from click.testing import CliRunner
import pytest

from dfo_kit.harness.cli import main
from dfo_kit.harness.config import ConfigError, load_config, load_params, parse_config_text
from dfo_kit.harness.experiments import SUMMARY_COLUMNS, run_experiments
from dfo_kit.harness.verify import SUITES, verify_suite

CONFIG = """\
[experiment]
algorithm = alg2
grad_tol = 1e-2
replicas = 3
start = random

[problem]
family = quadratic
n = 8
eigenvalues = [1, 10]

[solver]
eta1 = 0.1
budget = 100000
"""


@pytest.fixture
def cfg_path(tmp_path):
    p = tmp_path / "exp.ini"
    p.write_text(CONFIG)
    return p


def test_parse_flat_and_dotted_keys():
    out = parse_config_text("algorithm = alg1\nproblem.family = rosenbrock\nproblem.n = 3\nsolver.q = 4  # inline\n")
    assert out["experiment"] == {"algorithm": "alg1"}
    assert out["problem"] == {"family": "rosenbrock", "n": 3}
    assert out["solver"] == {"q": 4}


def test_load_config(cfg_path):
    cfg = load_config(cfg_path)
    assert cfg.algorithm == "alg2" and cfg.replicas == 3
    assert cfg.problem["eigenvalues"] == [1, 10]
    assert cfg.tr_config().budget == 100000


@pytest.mark.parametrize("text", [
    "algorithm = alg7\nproblem.family = quadratic\n",
    "problem.family = quadratic\n",
    "algorithm = alg1\n",
    "algorithm = alg1\nproblem.family = quadratic\nsolver.eta9 = 1\n",
    "algorithm = alg1\nproblem.family = quadratic\nsolver.gamma = 2\n",
    "algorithm = alg1\nproblem.family = quadratic\ncolour = red\n",
    "[weird]\nx = 1\n",
])
def test_bad_configs(tmp_path, text):
    p = tmp_path / "bad.ini"
    p.write_text(text)
    with pytest.raises(ConfigError):
        load_config(p)


def test_load_params_json_and_text(tmp_path):
    j = tmp_path / "p.json"
    j.write_text(json.dumps({"kappa_ef": 3, "kappa_eg": 2}))
    assert load_params(j) == {"kappa_ef": 3, "kappa_eg": 2}
    t = tmp_path / "p.txt"
    t.write_text("kappa_ef = 3\nkappa_eg = 2\n")
    assert load_params(t) == {"kappa_ef": 3, "kappa_eg": 2}


def test_run_experiments_outputs_and_determinism(cfg_path, tmp_path):
    cfg = load_config(cfg_path)
    rows = run_experiments(cfg, 42, tmp_path / "a")
    run_experiments(cfg, 42, tmp_path / "b")
    for name in ("summary.csv", "iterations.jsonl"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    with open(tmp_path / "a" / "summary.csv", newline="") as fh:
        summary = list(csv.DictReader(fh))
    assert len(summary) == 3 and tuple(summary[0]) == SUMMARY_COLUMNS
    for row in summary:
        assert row["terminated"] == "1"
        assert int(row["N_eps"]) <= float(row["theoretical_N_eps"])
    lines = (tmp_path / "a" / "iterations.jsonl").read_text().splitlines()
    assert len(lines) == sum(r["K_eps"] for r in rows)
    first = json.loads(lines[0])
    assert first["replica"] == 0 and first["k"] == 0 and "true_grad_norm" in first
    assert b"\r\n" not in (tmp_path / "a" / "summary.csv").read_bytes()


def test_cli_run(cfg_path, tmp_path):
    r = CliRunner().invoke(main, ["run", "--config", str(cfg_path), "--seed", str(2**64 - 1), "--out", str(tmp_path / "o")])
    assert r.exit_code == 0, r.output
    assert (tmp_path / "o" / "summary.csv").exists()
    assert r.output.count("replica") == 3


def test_cli_usage_and_config_errors(tmp_path):
    runner = CliRunner()
    assert runner.invoke(main, ["run", "--config", "x"]).exit_code == 2
    assert runner.invoke(main, ["run", "--config", str(tmp_path / "missing"), "--seed", "1", "--out", str(tmp_path)]).exit_code == 2
    assert runner.invoke(main, ["run", "--config", "x", "--seed", "-1", "--out", "o"]).exit_code == 2
    assert runner.invoke(main, ["verify", "--suite", "nonsense"]).exit_code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert runner.invoke(main, ["constants", "--params", str(bad)]).exit_code == 2
    rng = tmp_path / "range.json"
    rng.write_text(json.dumps({"eta1": 2, "kappa_ef": 1, "kappa_eg": 1}))
    assert runner.invoke(main, ["constants", "--params", str(rng)]).exit_code == 2


def test_cli_constants(tmp_path):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"eta1": 0.1, "eta2": 1, "kappa_bhm": 1, "kappa_fcd": 1, "kappa_ef": 3, "kappa_eg": 2}))
    r = CliRunner().invoke(main, ["constants", "--params", str(p)])
    assert r.exit_code == 0
    assert json.loads(r.output)["C1"] == pytest.approx(0.115385, abs=1e-6)


def test_cli_verify_pass_and_fail(tmp_path):
    runner = CliRunner()
    r = runner.invoke(main, ["verify", "--suite", "lower-bound"])
    assert r.exit_code == 0 and "[PASS]" in r.output
    # an impossible requirement must fail with exit code 1 and dump a counterexample
    cfg = tmp_path / "strict.txt"
    cfg.write_text("alg4_qs = [4, 8]\nalg4_seeds = 2\nalg2_dims = [4, 8]\nalg2_seeds = 1\nslope_alg2 = [5, 6]\n")
    r = runner.invoke(main, ["verify", "--suite", "scaling", "--config", str(cfg)])
    assert r.exit_code == 1 and "[FAIL]" in r.output and "counterexample" in r.output


def test_every_suite_is_registered():
    assert set(SUITES) >= {"lemma-success", "progress", "radius-floor", "geometry-runs", "kappa-eg",
                           "lower-bound", "haar", "scaling"}
    with pytest.raises(KeyError):
        verify_suite("nope")


def test_comment_before_first_section():
    out = parse_config_text("# leading comment\n\n[experiment]\nalgorithm = alg1\n[problem]\nfamily = quadratic\n")
    assert out["experiment"] == {"algorithm": "alg1"} and out["problem"] == {"family": "quadratic"}


def test_shipped_configs_load():
    from pathlib import Path
    root = Path(__file__).resolve().parents[1] / "configs"
    for path in root.glob("*.ini"):
        load_config(path)
    assert load_params(root / "constants.json")["kappa_ef"] == 3.0
