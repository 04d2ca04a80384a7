import json

import numpy as np
import pytest
from typer.testing import CliRunner

from HolderLabCL.cli import app
from HolderLabCL.mollify.kernels import make_kernel
from HolderLabCL.pipeline.runner import ANCHORS, run_pipeline
from HolderLabCL.solver.radial import solve_radial
from HolderLabCL.utils.config import ExperimentConfig
from HolderLabCL.utils.errors import ConfigurationError

runner = CliRunner()


def load(path):
    with open(path) as fp:
        return json.load(fp)


@pytest.fixture(scope="module")
def reference_bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("reference")
    return run_pipeline(ExperimentConfig.from_file(None, out=out))


def test_config_defaults_and_overrides(write_config, tmp_path):
    path = write_config(
        {"instance": {"resolution": 64}, "mollify": {"eps": "0.2, 0.1"}, "experiment": {"seed": 3}}
    )
    config = ExperimentConfig.from_file(path, out=tmp_path / "out")
    assert config["instance"]["resolution"] == 64
    assert config["mollify"]["eps"] == [0.2, 0.1]
    assert config["budget"]["p"] == 1.5
    assert config.seed == 3
    assert config.out == tmp_path / "out"
    assert ExperimentConfig.from_file(path, seed=11).seed == 11


@pytest.mark.parametrize(
    "sections",
    [
        {"instance": {"resolution": "fine"}},
        {"instance": {"colour": "red"}},
        {"plotting": {"dpi": 300}},
    ],
)
def test_malformed_config(write_config, sections):
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_file(write_config(sections))


def test_reference_pipeline_passes(reference_bundle):
    bundle = reference_bundle
    assert bundle.failed_stage is None
    assert bundle.passed, bundle.summary()
    alpha_prime = bundle.stages["budget"]["alpha_prime"]
    assert bundle.stages["modulus"]["alpha_hat"] >= alpha_prime - 0.05
    assert bundle.stages["gap"]["l1_slope"] >= 1 + bundle.stages["budget"]["beta"] - 0.1
    assert bundle.stages["lemma21"]["passed"]
    checks = {c["name"]: c for c in bundle.checks}
    assert checks["gap.sup_slope"]["passed"]
    assert bundle.stages["gap"]["sup_slope"] >= alpha_prime - 0.05
    assert bundle.stages["kiselman"]["sandwich"] <= 1e-9


def test_reference_pipeline_files(reference_bundle):
    out = reference_bundle.out
    for name in (
        "solution.csv",
        "solution.json",
        "gap_table.csv",
        "modulus.csv",
        "certificates.json",
        "report.json",
        "traceability.json",
        "summary.txt",
    ):
        assert (out / name).exists(), name
    trace = load(out / "traceability.json")
    assert "budget.alpha_prime" in trace
    assert trace["check.modulus.alpha_hat"]["anchor"]
    report = load(out / "report.json")
    assert report["passed"] and report["failed_stage"] is None
    assert "PASSED" in (out / "summary.txt").read_text()
    assert report["stages"]["solve"]["runtime"] >= 0
    assert load(out / "solution.json")["report"]["runtime"] >= 0


def test_every_reported_value_is_anchored(reference_bundle):
    report = load(reference_bundle.out / "report.json")
    missing = [
        f"{stage}.{key}"
        for stage, results in report["stages"].items()
        for key in results
        if f"{stage}.{key}" not in ANCHORS
    ]
    assert not missing
    assert all(c["name"] in ANCHORS for c in report["checks"])
    trace = load(reference_bundle.out / "traceability.json")
    assert all(entry["anchor"] for entry in trace.values())
    assert "gap.eps" in trace and "lemma21.kappa" in trace and "kiselman.theta" in trace


def test_radial_solve_keys_are_anchored():
    mesh = np.linspace(0.0, 1.0, 101)
    report = {"kind": "radial", **solve_radial(2, np.ones(mesh.size), 0.0, mesh).to_dict()}
    report["runtime"] = 0.0
    assert all(f"solve.{key}" in ANCHORS for key in report)


def test_pipeline_is_deterministic(write_config, tmp_path):
    path = write_config({"instance": {"resolution": 128}})
    first = run_pipeline(ExperimentConfig.from_file(path, out=tmp_path / "first"))
    second = run_pipeline(ExperimentConfig.from_file(path, out=tmp_path / "second"))
    for name in ("solution.csv", "modulus.csv", "gap_table.csv"):
        assert (first.out / name).read_bytes() == (second.out / name).read_bytes()


def test_harmonic_instance_is_lipschitz(write_config, tmp_path):
    path = write_config(
        {
            "instance": {"resolution": 128, "density": "zero", "boundary": "harmonic"},
        }
    )
    bundle = run_pipeline(ExperimentConfig.from_file(path, out=tmp_path))
    assert bundle.stages["modulus"]["alpha_hat"] >= 0.95
    linfty = bundle.stages["linfty"]
    assert linfty["passed"] and linfty["lhs"] == pytest.approx(1.0, abs=1e-6)


def test_failed_stage_keeps_partial_results(write_config, tmp_path):
    path = write_config({"instance": {"resolution": 64}, "modulus": {"eps0": 0.001}})
    bundle = run_pipeline(ExperimentConfig.from_file(path, out=tmp_path))
    assert bundle.failed_stage == "modulus"
    assert bundle.error_kind == "ParameterError"
    assert {"budget", "solve", "gap", "kiselman"} <= set(bundle.stages)
    assert "modulus" not in bundle.stages
    assert load(tmp_path / "report.json")["failed_stage"] == "modulus"


def test_cli_rejects_malformed_config(write_config, tmp_path):
    path = write_config({"instance": {"resolution": "fine"}})
    result = runner.invoke(app, ["pipeline", "--config", str(path), "--out", str(tmp_path)])
    assert result.exit_code == 2


def test_cli_pipeline_failed_stage(write_config, tmp_path):
    path = write_config({"instance": {"resolution": 64}, "modulus": {"eps0": 0.001}})
    result = runner.invoke(app, ["pipeline", "--config", str(path), "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert "modulus" in result.output


def test_cli_budget(tmp_path):
    result = runner.invoke(
        app,
        ["budget", "--alpha", "1", "--p", "2", "--n", "1", "--gamma", "0.3",
         "--gamma-prime", "0.3", "--gamma-dblprime", "0.3", "--out", str(tmp_path)],
    )
    assert result.exit_code == 0, result.output
    record = load(tmp_path / "budget.json")
    assert record["beta"] == pytest.approx(0.3)
    assert record["alpha_prime"] == pytest.approx(0.3)
    assert record["achievable_alpha_prime"] == pytest.approx(1 / 3)
    assert "regime" in result.output

    result = runner.invoke(app, ["budget", "--json", "--out", str(tmp_path / "json")])
    assert result.exit_code == 0, result.output
    assert '"alpha_prime"' in result.output and '"regime"' in result.output


def test_cli_budget_out_of_range(tmp_path):
    result = runner.invoke(app, ["budget", "--gamma", "0.5", "--out", str(tmp_path)])
    assert result.exit_code == 2


def test_cli_barrier(tmp_path):
    taylor = tmp_path / "taylor.json"
    taylor.write_text(
        json.dumps({"a": [[2.0, 0.0]], "b": [[[0.0, 0.0]]], "c": [[[1.0, 0.0]]], "anchor": [1.0, 0.0]})
    )
    result = runner.invoke(app, ["barrier", str(taylor), "--out", str(tmp_path / "out")])
    assert result.exit_code == 0, result.output
    record = load(tmp_path / "out" / "barrier.json")
    assert record["passed"] and record["C_bar"] == 2.0


def test_cli_barrier_failure(tmp_path):
    taylor = tmp_path / "taylor.json"
    taylor.write_text(json.dumps({"a": [[2.0, 0.0]], "c": [[[-1.0, 0.0]]]}))
    result = runner.invoke(app, ["barrier", str(taylor), "--out", str(tmp_path / "out")])
    assert result.exit_code == 1
    record = load(tmp_path / "out" / "barrier.json")
    assert not record["passed"]
    assert "eigenvalues" in record["diagnostic"]


def test_cli_solve_then_analyse(write_config, tmp_path):
    config = write_config({"instance": {"resolution": 64}})
    out = tmp_path / "run"
    common = ["--config", str(config), "--out", str(out)]

    result = runner.invoke(app, ["solve"] + common)
    assert result.exit_code == 0, result.output
    solution = out / "solution.csv"
    assert solution.exists() and (out / "solution.json").exists()

    result = runner.invoke(app, ["estimate-exponent", str(solution)] + common)
    assert result.exit_code == 0, result.output
    exponent = load(out / "exponent.json")
    assert exponent["mode"] == "exhaustive"
    assert exponent["alpha_hat"] >= 0.9

    result = runner.invoke(app, ["mollify", str(solution), "--eps", "0.4,0.2,0.1"] + common)
    assert result.exit_code == 0, result.output
    assert (out / "gap_table.csv").exists()

    result = runner.invoke(app, ["verify-lemma21", str(solution), "-v"] + common)
    assert result.exit_code == 0, result.output
    assert load(out / "lemma21.json")["passed"]

    kernel = tmp_path / "kernel.json"
    kernel.write_text(json.dumps(make_kernel("plateau", plateau=0.75, scale=2.0).to_dict()))
    result = runner.invoke(app, ["verify-lemma21", str(solution), "--kernel", str(kernel)] + common)
    assert result.exit_code == 0, result.output
    dilated = load(out / "lemma21.json")
    assert dilated["passed"]
    # the certificate rescales any plateau to radius 3, so the dilation cancels out
    assert dilated["R"] == pytest.approx(4.0)

    wrong = tmp_path / "kernel_c2.json"
    wrong.write_text(json.dumps(make_kernel("plateau", n=2).to_dict()))
    result = runner.invoke(app, ["verify-lemma21", str(solution), "--kernel", str(wrong)] + common)
    assert result.exit_code == 2


def test_cli_parquet_solution(write_config, tmp_path):
    config = write_config({"instance": {"resolution": 64}})
    out = tmp_path / "run"
    common = ["--config", str(config), "--out", str(out)]

    result = runner.invoke(app, ["solve", "--format", "parquet"] + common)
    assert result.exit_code == 0, result.output
    solution = out / "solution.parquet"
    assert solution.exists() and (out / "solution.json").exists()

    result = runner.invoke(app, ["mollify", str(solution), "--eps", "0.4,0.2"] + common)
    assert result.exit_code == 0, result.output
    assert (out / "gap_table.csv").exists()

    result = runner.invoke(app, ["solve", "--format", "hdf5"] + common)
    assert result.exit_code == 2


def test_cli_missing_solution(tmp_path):
    result = runner.invoke(app, ["estimate-exponent", str(tmp_path / "missing.csv")])
    assert result.exit_code == 2
