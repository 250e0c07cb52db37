import pytest

from scatternet.core.exceptions import ScatternetConfigError
from scatternet.harness.cli import build_parser, main, run_experiments
from scatternet.harness.verify import VerifyReport
from scatternet.types import CheckStatus, ExperimentStatus


def _result(experiment_id, status=ExperimentStatus.PASSED, checks=None):
    return {
        "experiment_id": experiment_id,
        "status": status,
        "output_dir": f"/tmp/out/{experiment_id}",
        "artifacts": [],
        "checks": checks or [],
    }


@pytest.fixture
def runner(mocker):
    runner_class = mocker.patch("scatternet.harness.cli.ExperimentRunner")
    runner_class.return_value.run.side_effect = lambda experiment_id, params: _result(experiment_id)
    return runner_class


def test_parser_requires_an_experiment():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_main_runs_experiments_and_prints_summary(runner, capsys):
    runner.return_value.run.side_effect = None
    runner.return_value.run.return_value = _result(
        "momentum",
        checks=[{"check_id": "momentum.speedup", "status": CheckStatus.PASS, "measured": 0.5, "tolerance": 1.0}],
    )

    code = main(["momentum", "--seed", "3", "--out", "/tmp/out", "--param", "alpha=0.8", "--param", "theta0=10,1"])

    assert code == 0
    assert capsys.readouterr().out == "momentum PASSED /tmp/out/momentum\n  momentum.speedup PASS 0.5 1\n"
    configuration = runner.call_args.args[0]
    assert configuration.output_root == "/tmp/out"
    assert configuration.seed == 3
    runner.return_value.run.assert_called_once_with("momentum", {"alpha": 0.8, "theta0": [10.0, 1.0]})


def test_main_accepts_emitted_experiments(runner, capsys):
    runner.return_value.run.side_effect = lambda experiment_id, params: _result(experiment_id, ExperimentStatus.EMITTED)
    assert main(["kernel-compare", "envelope"]) == 0
    assert capsys.readouterr().out.splitlines()[0].startswith("kernel-compare EMITTED")


def test_main_fails_when_an_experiment_fails(runner):
    runner.return_value.run.side_effect = lambda experiment_id, params: _result(
        experiment_id, ExperimentStatus.FAILED if experiment_id == "markov" else ExperimentStatus.PASSED
    )
    assert main(["envelope", "markov"]) == 1


def test_main_rejects_unknown_experiment(runner):
    assert main(["envelope", "warp-drive"]) == 2
    runner.return_value.run.assert_not_called()


@pytest.mark.parametrize("argv", [["verify", "envelope"], ["envelope", "verify"], ["verify", "verify"]])
def test_main_rejects_verify_mixed_with_experiments(mocker, runner, argv):
    verify = mocker.patch("scatternet.harness.cli.run_verify_all")
    error = mocker.patch("scatternet.harness.cli.logger.error")

    assert main(argv) == 2
    verify.assert_not_called()
    runner.return_value.run.assert_not_called()
    assert "cannot be combined" in error.call_args.args[0]


@pytest.mark.parametrize("argv", [["envelope", "--param", "broken"], ["envelope", "--param", "=3"]])
def test_main_rejects_malformed_params(runner, argv):
    assert main(argv) == 1


def test_main_returns_one_on_library_errors(runner):
    runner.return_value.run.side_effect = ScatternetConfigError("No gradient-descent step size converged")
    assert main(["momentum"]) == 1


def test_main_verify(mocker, capsys):
    report = VerifyReport(
        [{"check_id": "optim.block_linearity", "status": CheckStatus.PASS, "measured": 0.0, "tolerance": 0.0}]
    )
    verify = mocker.patch("scatternet.harness.cli.run_verify_all", return_value=report)

    assert main(["verify", "--seed", "5"]) == 0
    assert capsys.readouterr().out == "optim.block_linearity PASS 0 0\n"
    assert verify.call_args.args[0] == 5


def test_main_verify_failure(mocker):
    report = VerifyReport(
        [{"check_id": "energymodel.gibbs_tv", "status": CheckStatus.FAIL, "measured": 0.1, "tolerance": 0.02}]
    )
    mocker.patch("scatternet.harness.cli.run_verify_all", return_value=report)
    assert main(["verify"]) == 1


def test_run_experiments_uses_a_pool_when_parallel(mocker, configuration):
    pool = mocker.patch("scatternet.harness.cli.Pool")
    pool.return_value.__enter__.return_value.map.return_value = [_result("envelope"), _result("markov")]
    configuration.parallel = True

    results = run_experiments(["envelope", "markov"], {}, configuration)

    assert [r["experiment_id"] for r in results] == ["envelope", "markov"]
    pool.assert_called_once_with(2)
    jobs = pool.return_value.__enter__.return_value.map.call_args.args[1]
    assert [job[0] for job in jobs] == ["envelope", "markov"]


def test_run_experiments_single_job_stays_in_process(mocker, runner, configuration):
    pool = mocker.patch("scatternet.harness.cli.Pool")
    configuration.parallel = True
    results = run_experiments(["fringes"], {}, configuration)
    assert results[0]["experiment_id"] == "fringes"
    pool.assert_not_called()
