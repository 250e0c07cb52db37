import filecmp
import os

import numpy as np
import pytest

from scatternet.core.exceptions import ScatternetConfigError, ScatternetDomainError
from scatternet.energymodel import load_rbm
from scatternet.harness.experiments import EXPERIMENTS, ExperimentRunner, run_envelope
from scatternet.neuralnet import load_network
from scatternet.types import CheckStatus, ExperimentStatus
from tests.mock.model_factory import experiment_config

SMALL_CNN_PARAMS = {
    "image_size": 8,
    "samples_per_class": 10,
    "test_per_class": 5,
    "batch_size": 5,
    "epochs": 1,
}


@pytest.fixture
def runner(configuration):
    return ExperimentRunner(configuration)


def _files(result):
    return sorted(os.path.basename(path) for path in result["artifacts"])


def test_registry_ids():
    assert list(EXPERIMENTS) == [
        "envelope",
        "fringes",
        "kernel-compare",
        "train-cnn",
        "train-rbm",
        "tempering",
        "momentum",
        "markov",
    ]


@pytest.mark.parametrize("experiment_id", ["envelope", "fringes", "momentum", "markov"])
def test_analytic_experiments_pass(runner, configuration, experiment_id):
    result = runner.run(experiment_id)

    assert result["status"] == ExperimentStatus.PASSED
    assert result["output_dir"] == os.path.join(configuration.output_root, experiment_id)
    assert all(check["status"] == CheckStatus.PASS for check in result["checks"])
    assert all(os.path.isfile(path) for path in result["artifacts"])


def test_envelope_artifacts_are_bit_identical_across_runs(tmp_path):
    first = run_envelope(experiment_config(tmp_path / "a", "envelope", seed=1))
    second = run_envelope(experiment_config(tmp_path / "b", "envelope", seed=1))
    for a, b in zip(first["artifacts"], second["artifacts"]):
        assert filecmp.cmp(a, b, shallow=False)


def test_markov_is_reproducible_per_seed(runner):
    first = runner.run("markov", {"steps": 20_000}, seed=11)
    second = runner.run("markov", {"steps": 20_000}, seed=11)
    assert first["checks"] == second["checks"]


def test_fringes_writes_profile(runner):
    result = runner.run("fringes", {"samples": 2048})
    assert _files(result) == ["fringes.csv", "fringes.pgm"]
    with open(result["artifacts"][0]) as f:
        assert f.readline().strip() == "position,intensity"


def test_momentum_beats_gradient_descent(runner):
    result = runner.run("momentum")
    check = result["checks"][0]
    assert check["check_id"] == "momentum.iteration_ratio"
    assert check["measured"] < 1.0


def test_train_rbm_reduces_exact_kl(runner):
    result = runner.run("train-rbm", {"epochs": 400, "samples": 50})
    ratio = next(c for c in result["checks"] if c["check_id"] == "train_rbm.kl_ratio")
    assert ratio["measured"] < 1.0
    assert _files(result) == ["metrics.csv", "rbm.ckpt", "samples.csv"]

    params = load_rbm(os.path.join(result["output_dir"], "rbm.ckpt"))
    assert (params.n_visible, params.n_hidden) == (4, 3)
    with open(os.path.join(result["output_dir"], "samples.csv")) as f:
        assert len(f.read().splitlines()) == 51


def test_train_cnn_meets_acceptance_at_defaults(runner):
    result = runner.run("train-cnn")

    assert result["status"] == ExperimentStatus.PASSED
    check = result["checks"][0]
    assert check["check_id"] == "train_cnn.test_error"
    assert check["measured"] <= 0.05
    net = load_network(os.path.join(result["output_dir"], "cnn.ckpt"))
    assert [layer.kind for layer in net] == ["conv", "relu", "max_pool", "dense"]
    with open(os.path.join(result["output_dir"], "metrics.csv")) as f:
        assert f.read().splitlines()[0] == "epoch,loss,accuracy"


def test_train_rbm_meets_acceptance_at_defaults(runner):
    result = runner.run("train-rbm")

    assert result["status"] == ExperimentStatus.PASSED
    checks = {c["check_id"]: c["measured"] for c in result["checks"]}
    assert checks["train_rbm.final_kl"] < 0.05
    assert checks["train_rbm.kl_ratio"] <= 0.5


def test_tempering_reaches_both_modes(runner):
    result = runner.run("tempering")

    assert result["status"] == ExperimentStatus.PASSED
    assert _files(result) == ["tempering_modes.csv", "tempering_samples.csv"]
    modes = np.genfromtxt(result["artifacts"][0], delimiter=",", names=True, dtype=None, encoding="utf-8")
    tempered, plain = modes[0], modes[1]
    assert tempered["sampler"] == "tempered"
    assert tempered["all_off"] > 0.2 and tempered["all_on"] > 0.2
    assert plain["all_on"] < 0.05
    with open(result["artifacts"][1]) as f:
        assert len(f.read().splitlines()) == tempered["samples"] + 1


def test_tempering_takes_a_schedule_param(runner):
    result = runner.run("tempering", {"schedule": [1.0, 0.2, 0.05, 0.2, 1.0], "sweeps": 10, "cycles": 4})

    modes = np.genfromtxt(result["artifacts"][0], delimiter=",", names=True, dtype=None, encoding="utf-8")
    # the first rung precedes any excursion; each cycle contributes its closing rung
    assert modes[0]["samples"] == 10 * 7
    assert modes[1]["samples"] == 10 * 5 * 4


def test_tempering_rejects_schedule_not_ending_at_unit_beta(runner):
    with pytest.raises(ScatternetDomainError):
        runner.run("tempering", {"schedule": [1.0, 0.5]})


@pytest.mark.parametrize(
    "experiment_id, params",
    [
        ("fringes", {"samples": 2048}),
        ("train-rbm", {}),
        ("tempering", {"cycles": 10}),
        ("kernel-compare", {**SMALL_CNN_PARAMS, "grid": 9, "k": [1.0]}),
    ],
)
def test_artifacts_are_bit_identical_across_runs(tmp_path, experiment_id, params):
    first = EXPERIMENTS[experiment_id](experiment_config(tmp_path / "a", experiment_id, seed=2, **params))
    second = EXPERIMENTS[experiment_id](experiment_config(tmp_path / "b", experiment_id, seed=2, **params))

    assert first["checks"] == second["checks"]
    assert len(first["artifacts"]) == len(second["artifacts"]) > 0
    for a, b in zip(first["artifacts"], second["artifacts"]):
        assert filecmp.cmp(a, b, shallow=False)


def test_kernel_compare_only_emits(runner):
    result = runner.run("kernel-compare", {**SMALL_CNN_PARAMS, "grid": 9, "k": [1.0]})

    assert result["status"] == ExperimentStatus.EMITTED
    assert result["checks"] == []
    names = _files(result)
    assert "cnn_kernels.pgm" in names
    assert "scatter_k1_w9.csv" in names
    assert len(names) == 9


def test_runner_logs_summary_when_asked(configuration, mocker):
    configuration.log_run_level = "ALL"
    configuration.logger = mocker.MagicMock()
    ExperimentRunner(configuration).run("markov", {"steps": 1000})

    message, kwargs = configuration.logger.info.call_args.args[0], configuration.logger.info.call_args.kwargs
    assert message == "Experiment finished"
    assert kwargs["extra"]["experiment_id"] == "markov"
    assert kwargs["extra"]["params"] == {"steps": 1000}


def test_runner_logs_and_reraises_errors(configuration, mocker):
    configuration.logger = mocker.MagicMock()
    with pytest.raises(ScatternetConfigError):
        ExperimentRunner(configuration).run("momentum", {"grid_points": 1, "curvatures": [1e5, 2e5]})
    assert configuration.logger.error.call_args.args[0] == "Experiment failed"


def test_runner_rejects_unknown_experiment(runner):
    with pytest.raises(ScatternetConfigError):
        runner.run("warp-drive")


def test_typed_params_are_checked(runner):
    with pytest.raises(ScatternetConfigError):
        runner.run("markov", {"steps": 2.5})


def test_envelope_sweep_peaks_at_odd_half_turns(tmp_path):
    result = run_envelope(experiment_config(tmp_path, "envelope"))
    sweep = np.loadtxt(result["artifacts"][1], delimiter=",", skiprows=1)
    assert sweep[:, 1].max() == pytest.approx(1.0, abs=1e-3)
