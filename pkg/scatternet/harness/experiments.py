"""
Reproducible experiments. Each one is a pure function of its ExperimentConfig:
it writes CSV/PGM/checkpoint artifacts under the config's output directory
and returns an ExperimentResult with its checks.
"""

from typing import Callable
import logging

import numpy as np
from scipy.signal import find_peaks

from scatternet.core.artifacts import write_csv, write_pgm
from scatternet.core.configuration import ScatternetConfiguration
from scatternet.core.exceptions import ScatternetConfigError, ScatternetError
from scatternet.energymodel import (
    cd_train,
    evolve_distribution,
    gibbs_run,
    init_rbm,
    markov_chain_run,
    occupancy,
    save_rbm,
    stationary_distribution,
    temper_sample,
    total_variation,
    write_samples_csv,
)
from scatternet.harness.datasets import GratingDataset, gen_gratings
from scatternet.neuralnet import init_network, save_network, write_kernels_pgm, write_metrics_csv
from scatternet.optim import minimize_quadratic
from scatternet.scattering import (
    DEFAULT_WINDOW_SIZES,
    box_conv_sine,
    box_conv_sine_quadrature,
    double_slit_intensity,
    envelope_intensity,
    scatter_kernel,
    write_kernel_csv,
    write_kernel_pgm,
    write_profile_csv,
)
from scatternet.training_flow import CnnTrainingFlow
from scatternet.types import (
    CheckResult,
    CheckStatus,
    ExperimentConfig,
    ExperimentResult,
    ExperimentStatus,
)
from scatternet.typing.energy_types import ChainState, RbmParams, TransitionKernel
from scatternet.typing.field_types import Grid1D, Grid3D, ScatterPotential, SlitAperture
from scatternet.typing.network_types import LayerSpec

logger = logging.getLogger(__name__)

CNN_LAYERS: list[LayerSpec] = [
    {"type": "conv", "out_channels": 4, "kernel_size": 3},
    {"type": "relu"},
    {"type": "max_pool", "window": 2, "stride": 2},
    {"type": "dense", "outputs": 4},
]
RBM_MODES = ((1, 1, 0, 0), (0, 0, 1, 1))
MARKOV_MATRIX = ((0.5, 0.3, 0.2), (0.2, 0.6, 0.2), (0.3, 0.3, 0.4))
# all-off and all-on are the only likely states, separated by a barrier of about J
BIMODAL_COUPLING = 16.0
BIMODAL_MODES = ((0, 0), (1, 1))
TEMPERING_CYCLE = [1.0, 0.5, 0.2, 0.1, 0.05, 0.1, 0.2, 0.5, 1.0]
PLAIN_CHAIN_STREAM = 7


def make_check(
    check_id: str, measured: float, tolerance: float, strict: bool = False
) -> CheckResult:
    """PASS when measured <= tolerance (< when strict)."""
    measured = float(measured)
    passed = measured < tolerance if strict else measured <= tolerance
    return {
        "check_id": check_id,
        "status": CheckStatus.PASS if passed else CheckStatus.FAIL,
        "measured": measured,
        "tolerance": float(tolerance),
    }


def _result(cfg: ExperimentConfig, artifacts: list[str], checks: list[CheckResult]) -> ExperimentResult:
    if not checks:
        status = ExperimentStatus.EMITTED
    elif all(check["status"] == CheckStatus.PASS for check in checks):
        status = ExperimentStatus.PASSED
    else:
        status = ExperimentStatus.FAILED
    return {
        "experiment_id": cfg.experiment_id,
        "status": status,
        "output_dir": cfg.output_dir,
        "artifacts": artifacts,
        "checks": checks,
    }


def run_envelope(cfg: ExperimentConfig) -> ExperimentResult:
    """Closed-form box-convolved sine against quadrature, plus the envelope's zeros and maxima."""
    ks = cfg.get("k", [0.5, 1.0, 2.0, 4.0])
    krs = np.linspace(4 * np.pi / 5, 4 * np.pi, 5)
    xs = np.linspace(-1.0, 1.0, 5)

    rows, worst = [], 0.0
    for k in ks:
        for kr in krs:
            r = kr / k
            for x in xs:
                closed = float(box_conv_sine(k, r, x))
                quadrature = box_conv_sine_quadrature(k, r, x)
                error = abs(closed - quadrature) / max(abs(closed), 2 / k)
                worst = max(worst, error)
                rows.append((k, r, x, closed, quadrature, error))

    zeros = max(envelope_intensity(k, 2 * n * np.pi / k) * k**2 / 4 for k in ks for n in (1, 2))
    maxima = max(abs(envelope_intensity(k, n * np.pi / k) * k**2 / 4 - 1) for k in ks for n in (1, 3))
    sweep = np.linspace(4 * np.pi / 400, 4 * np.pi, 400)
    artifacts = [
        write_csv(cfg.path("envelope_quadrature.csv"), ("k", "r", "x", "closed", "quadrature", "rel_error"), rows),
        write_csv(
            cfg.path("envelope_sweep.csv"),
            ("kr", "relative_intensity"),
            ((kr, envelope_intensity(1.0, kr) / 4) for kr in sweep),
        ),
    ]
    checks = [
        make_check("envelope.quadrature", worst, 1e-8),
        make_check("envelope.zeros", zeros, 1e-12),
        make_check("envelope.maxima", maxima, 1e-12),
    ]
    return _result(cfg, artifacts, checks)


def fringe_deviation(intensity: np.ndarray, screen: Grid1D, separation: float, wavelength: float, orders=(-2, -1, 0, 1, 2)) -> float:
    """Largest distance, in screen samples, between a predicted maximum and the nearest found peak."""
    peaks, _ = find_peaks(intensity, height=0.5)
    if peaks.size == 0:
        return float("inf")
    u = screen.axis(0)
    spacing = screen.spacing[0]
    return max(
        float(np.min(np.abs(u[peaks] - n * wavelength / separation)) / spacing) for n in orders
    )


def run_fringes(cfg: ExperimentConfig) -> ExperimentResult:
    """Double-slit profile against the d sin(theta) = n wavelength maxima."""
    wavelength = 1.0
    k = 2 * np.pi / wavelength
    separation = cfg.get("separation", 10.0) * wavelength
    aperture = SlitAperture(
        count=2,
        width=cfg.get("width", 0.25) * wavelength,
        separation=separation,
        screen_distance=cfg.get("distance", 2000.0) * wavelength,
    )
    u_max = cfg.get("u_max", 0.3)
    screen = Grid1D.spanning(-u_max, u_max, cfg.get("samples", 4096))
    intensity = double_slit_intensity(aperture, k, screen)
    deviation = fringe_deviation(intensity, screen, separation, wavelength)

    artifacts = [
        write_profile_csv(cfg.path("fringes.csv"), screen, intensity),
        write_pgm(cfg.path("fringes.pgm"), np.tile(intensity, (64, 1))),
    ]
    return _result(cfg, artifacts, [make_check("fringes.positions", deviation, 1.0)])


def spherical_potential(n: int, spacing: float, sigma: float, radius: float) -> ScatterPotential:
    """Gaussian U(|r|) cut off at `radius`, on a cube centred on the neuron."""
    grid = Grid3D.centered(n, spacing)
    x, y, z = grid.coordinates()
    r2 = x**2 + y**2 + z**2
    values = np.where(r2 <= radius**2, np.exp(-r2 / (2 * sigma**2)), 0.0)
    return ScatterPotential(grid, values)


def _grating_config(cfg: ExperimentConfig, samples_per_class: int) -> GratingDataset:
    return GratingDataset(
        image_size=cfg.get("image_size", 16),
        wavelength=cfg.get("wavelength", 4.0),
        samples_per_class=cfg.get("samples_per_class", samples_per_class),
        noise=cfg.get("noise", 0.3),
    )


def _train_cnn(cfg: ExperimentConfig, epochs: int, samples_per_class: int):
    train_cfg = _grating_config(cfg, samples_per_class)
    test_cfg = GratingDataset(
        image_size=train_cfg.image_size,
        wavelength=train_cfg.wavelength,
        samples_per_class=cfg.get("test_per_class", 100),
        noise=train_cfg.noise,
    )
    train = gen_gratings(train_cfg, cfg.seed)
    test = gen_gratings(test_cfg, cfg.seed, stream=5)

    net = init_network((1, train_cfg.image_size, train_cfg.image_size), CNN_LAYERS, cfg.seed)
    flow = CnnTrainingFlow(
        net,
        learning_rate=cfg.get("lr", 0.02),
        momentum=cfg.get("momentum", 0.9),
        batch_size=cfg.get("batch_size", 10),
        seed=cfg.seed,
        logger=logger,
    )
    return net, flow.run(train, test, epochs)


def run_kernel_compare(cfg: ExperimentConfig) -> ExperimentResult:
    """Scattering kernels of a spherical neuron next to first-layer kernels of a trained CNN."""
    potential = spherical_potential(
        n=cfg.get("grid", 11),
        spacing=cfg.get("spacing", 1.0),
        sigma=cfg.get("sigma", 2.0),
        radius=cfg.get("radius", 4.0),
    )
    artifacts = []
    for k in cfg.get("k", [0.5, 1.0, 2.0]):
        for window in DEFAULT_WINDOW_SIZES:
            kernel = scatter_kernel(potential, k, window)
            stem = f"scatter_k{k:g}_w{window}"
            artifacts.append(write_kernel_pgm(cfg.path(f"{stem}.pgm"), kernel))
            artifacts.append(write_kernel_csv(cfg.path(f"{stem}.csv"), kernel))

    net, _ = _train_cnn(cfg, cfg.get("epochs", 1), samples_per_class=100)
    artifacts.append(write_kernels_pgm(cfg.path("cnn_kernels.pgm"), net[0]))
    return _result(cfg, artifacts, [])


def run_train_cnn(cfg: ExperimentConfig) -> ExperimentResult:
    """conv -> relu -> max pool -> dense -> softmax trained end to end on gratings."""
    net, rows = _train_cnn(cfg, cfg.get("epochs", 5), samples_per_class=500)
    artifacts = [
        write_metrics_csv(cfg.path("metrics.csv"), rows),
        save_network(cfg.path("cnn.ckpt"), net),
        write_kernels_pgm(cfg.path("kernels.pgm"), net[0]),
    ]
    error_rate = 1.0 - rows[-1][2]
    return _result(cfg, artifacts, [make_check("train_cnn.test_error", error_rate, 0.05)])


def run_train_rbm(cfg: ExperimentConfig) -> ExperimentResult:
    """CD training of a 4-visible/3-hidden RBM on a two-mode target, traced by exact KL."""
    copies = cfg.get("copies", 50)
    data = np.array([mode for mode in RBM_MODES for _ in range(copies)], dtype=np.float64)
    initial = init_rbm(data.shape[1], cfg.get("hidden", 3), cfg.seed)
    report = cd_train(
        data,
        initial,
        k=cfg.get("cd_steps", 1),
        learning_rate=cfg.get("lr", 0.1),
        momentum=cfg.get("momentum", 0.5),
        epochs=cfg.get("epochs", 2000),
        seed=cfg.seed,
    )
    chain = ChainState.start(RBM_MODES[0], report.params.n_hidden, cfg.seed, stream=6)
    samples = gibbs_run(chain, report.params, cfg.get("samples", 1000))

    artifacts = [
        write_csv(cfg.path("metrics.csv"), ("epoch", report.metric), enumerate(report.trace, start=1)),
        save_rbm(cfg.path("rbm.ckpt"), report.params),
        write_samples_csv(cfg.path("samples.csv"), samples.visible),
    ]
    first, final = report.trace[0], report.trace[-1]
    checks = [
        make_check("train_rbm.final_kl", final, 0.05, strict=True),
        make_check("train_rbm.kl_ratio", final / first, 0.5),
    ]
    return _result(cfg, artifacts, checks)


def bimodal_rbm(coupling: float = BIMODAL_COUPLING) -> RbmParams:
    """2 visible + 2 hidden units with biases -J and couplings +J."""
    return RbmParams(np.full(2, -coupling), np.full(2, -coupling), np.full((2, 2), coupling))


def _mode_masses(visible: np.ndarray) -> list[float]:
    return [float(np.mean(np.all(visible == np.array(mode), axis=1))) for mode in BIMODAL_MODES]


def run_tempering(cfg: ExperimentConfig) -> ExperimentResult:
    """
    Tempered sampling of the bimodal RBM against plain Gibbs with the same
    number of sweeps. `schedule` is the beta cycle, repeated `cycles` times.
    """
    params = bimodal_rbm(cfg.get("coupling", BIMODAL_COUPLING))
    schedule = cfg.get("schedule", TEMPERING_CYCLE)
    sweeps = cfg.get("sweeps", 20)
    cycles = cfg.get("cycles", 50)
    v0 = np.zeros(params.n_visible, dtype=np.uint8)

    tempered = temper_sample(params, schedule, sweeps, cfg.seed, v0=v0, cycles=cycles)
    plain_chain = ChainState.start(v0, params.n_hidden, cfg.seed, stream=PLAIN_CHAIN_STREAM)
    plain = gibbs_run(plain_chain, params, sweeps * len(schedule) * cycles)
    tempered_mass, plain_mass = _mode_masses(tempered.visible), _mode_masses(plain.visible)

    artifacts = [
        write_csv(
            cfg.path("tempering_modes.csv"),
            ("sampler", "samples", "all_off", "all_on"),
            [("tempered", len(tempered.visible), *tempered_mass), ("plain", len(plain.visible), *plain_mass)],
        ),
        write_samples_csv(cfg.path("tempering_samples.csv"), tempered.visible),
    ]
    checks = [
        # mass missing from the rarer mode; under 0.8 means both modes hold more than 0.2
        make_check("tempering.rare_mode_gap", 1.0 - min(tempered_mass), 0.8, strict=True),
        make_check("tempering.plain_escape_mass", plain_mass[1], 0.05, strict=True),
    ]
    return _result(cfg, artifacts, checks)


def run_momentum(cfg: ExperimentConfig) -> ExperimentResult:
    """Momentum against the best fixed-step gradient descent on the diag(1, 100) valley."""
    curvatures = np.array(cfg.get("curvatures", [1.0, 100.0]))
    theta0 = np.array(cfg.get("theta0", [10.0, 1.0]))
    f_tol = cfg.get("f_tol", 1e-6)
    momentum = minimize_quadratic(
        curvatures, theta0, alpha=cfg.get("alpha", 0.9), lr=cfg.get("lr", 0.01), f_tol=f_tol
    )
    grid = np.logspace(-4, -1, cfg.get("grid_points", 31))
    descent = [minimize_quadratic(curvatures, theta0, 0.0, lr, f_tol=f_tol) for lr in grid]
    converged = [(run.iterations, lr, run) for lr, run in zip(grid, descent) if run.converged]
    if not converged:
        raise ScatternetConfigError("No gradient-descent step size converged")
    best_iterations, best_lr, best = min(converged, key=lambda item: item[0])

    rows = [("momentum", cfg.get("alpha", 0.9), cfg.get("lr", 0.01), momentum.iterations, int(momentum.converged))]
    rows += [("gd", 0.0, lr, run.iterations, int(run.converged)) for lr, run in zip(grid, descent)]
    length = max(momentum.trace.size, best.trace.size)
    traces = (
        (t, _at(momentum.trace, t), _at(best.trace, t)) for t in range(length)
    )
    artifacts = [
        write_csv(cfg.path("momentum_runs.csv"), ("method", "alpha", "lr", "iterations", "converged"), rows),
        write_csv(cfg.path("momentum_trace.csv"), ("iteration", "momentum", f"gd_lr_{best_lr:.6g}"), traces),
    ]
    checks = [make_check("momentum.iteration_ratio", momentum.iterations / best_iterations, 1.0, strict=True)]
    return _result(cfg, artifacts, checks)


def _at(trace: np.ndarray, t: int) -> float | str:
    return float(trace[t]) if t < trace.size else ""


def run_markov(cfg: ExperimentConfig) -> ExperimentResult:
    """Master-equation evolution of a 3-state chain against sampled occupancy."""
    kernel = TransitionKernel(np.array(MARKOV_MATRIX))
    steps = cfg.get("steps", 100_000)
    evolution = evolve_distribution(kernel, [1.0, 0.0, 0.0], cfg.get("evolve_steps", 50))
    stationary = stationary_distribution(kernel)
    trajectory = markov_chain_run(kernel, 0, steps, cfg.seed)
    empirical = occupancy(trajectory, kernel.size)

    artifacts = [
        write_csv(cfg.path("markov_evolution.csv"), ("step", "p0", "p1", "p2"), ((t, *p) for t, p in enumerate(evolution))),
        write_csv(cfg.path("markov_occupancy.csv"), ("state", "stationary", "empirical"), zip(range(kernel.size), stationary, empirical)),
    ]
    checks = [
        make_check("markov.occupancy_tv", total_variation(empirical, stationary), 0.02),
        make_check("markov.evolution_tv", total_variation(evolution[-1], stationary), 1e-6),
    ]
    return _result(cfg, artifacts, checks)


EXPERIMENTS: dict[str, Callable[[ExperimentConfig], ExperimentResult]] = {
    "envelope": run_envelope,
    "fringes": run_fringes,
    "kernel-compare": run_kernel_compare,
    "train-cnn": run_train_cnn,
    "train-rbm": run_train_rbm,
    "tempering": run_tempering,
    "momentum": run_momentum,
    "markov": run_markov,
}


class ExperimentRunner:
    def __init__(self, configuration: ScatternetConfiguration):
        self.config = configuration
        self.logger = configuration.logger

    def run(self, experiment_id: str, params: dict | None = None, seed: int | None = None) -> ExperimentResult:
        if experiment_id not in EXPERIMENTS:
            raise ScatternetConfigError(f"Unknown experiment {experiment_id!r}")
        cfg = ExperimentConfig(
            experiment_id=experiment_id,
            seed=self.config.seed if seed is None else seed,
            output_dir=self.config.experiment_dir(experiment_id),
            params=dict(params or {}),
        )
        try:
            result = EXPERIMENTS[experiment_id](cfg)
        except ScatternetError as e:
            self._log_run_error(cfg, e)
            raise
        self._log_run_success_if_needed(cfg, result)
        return result

    def _log_run_error(self, cfg: ExperimentConfig, error: Exception):
        if self.config.log_run_level == "NONE":
            return
        self.logger.error("Experiment failed", extra=self._get_run_summary(cfg, error=error))

    def _log_run_success_if_needed(self, cfg: ExperimentConfig, result: ExperimentResult):
        if not self.config.log_run_level == "ALL":
            self.logger.info(f"Experiment {cfg.experiment_id}: {result['status']}")
            return
        self.logger.info("Experiment finished", extra=self._get_run_summary(cfg, result))

    def _get_run_summary(
        self,
        cfg: ExperimentConfig,
        result: ExperimentResult | None = None,
        error: Exception | None = None,
    ) -> dict:
        return {
            "experiment_id": cfg.experiment_id,
            "seed": cfg.seed,
            "params": cfg.params,
            "output_dir": cfg.output_dir,
            "status": result["status"] if result else "ERROR",
            "measured": {c["check_id"]: c["measured"] for c in result["checks"]} if result else None,
            "error": {"message": str(error), "type": type(error).__name__} if error else None,
        }
