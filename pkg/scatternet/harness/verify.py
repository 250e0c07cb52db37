"""
Verification suite: every declared invariant has a registered check, and the
fast experiments contribute their own checks. The report has one line per
check, `<id> <PASS|FAIL> <measured> <tolerance>`, and no timestamps.
"""

from dataclasses import dataclass, field
from typing import Callable
import filecmp
import logging
import os

import numpy as np

from scatternet.core.configuration import ScatternetConfiguration
from scatternet.core.exceptions import ScatternetCheckError
from scatternet.core.helpers import save_text_to_file, spawn_rng
from scatternet.energymodel import (
    energy,
    gibbs_run,
    joint_distribution,
    partition_function_exact,
    sweep_kernel_exact,
    temper_sample,
    total_variation,
    visible_marginal_exact,
)
from scatternet.harness.experiments import (
    EXPERIMENTS,
    ExperimentRunner,
    make_check,
    spherical_potential,
)
from scatternet.neuralnet import (
    conv2d,
    cross_entropy,
    entropy,
    gradient_check,
    init_network,
    kl_divergence,
    max_pool,
    softmax,
    softmax_temperature,
)
from scatternet.optim import MomentumState, gd_step, minimize_quadratic, momentum_step
from scatternet.scattering import (
    born_scatter,
    double_slit_intensity,
    green_outgoing,
    neuron_response,
    scatter_kernel,
    screen_plane,
)
from scatternet.types import CheckResult, CheckStatus, ExperimentConfig
from scatternet.typing.energy_types import BinaryConfig, ChainState, RbmParams
from scatternet.typing.field_types import (
    Grid1D,
    Grid2D,
    Grid3D,
    ScatterKernel,
    ScatterPotential,
    SlitAperture,
    WaveField,
)
from scatternet.typing.network_types import ConvLayer, FeatureTensor
from scatternet.wavefield import plane_wave, sampled, series_margin, translate_series, translation_phase

logger = logging.getLogger(__name__)

VERIFY_EXPERIMENTS = ("envelope", "fringes", "momentum", "markov", "train-rbm", "tempering")
# experiments run twice by harness.artifact_determinism, with reduced sizes where training is involved
DETERMINISM_RUNS = {
    "envelope": {},
    "fringes": {"samples": 2048},
    "train-rbm": {"epochs": 200, "samples": 100},
    "tempering": {"cycles": 5},
    "kernel-compare": {"grid": 9, "k": [1.0], "image_size": 8, "samples_per_class": 10, "test_per_class": 5, "batch_size": 5, "epochs": 1},
}

DECLARED_INVARIANTS = (
    "wavefield.phase_group",
    "wavefield.phase_unit_modulus",
    "wavefield.series_convergence",
    "wavefield.plane_wave_modulus",
    "scattering.green_reciprocity",
    "scattering.born_linearity",
    "scattering.slit_symmetry",
    "scattering.kernel_rings",
    "scattering.response_phase_invariance",
    "neuralnet.conv_translation",
    "neuralnet.softmax_normalized",
    "neuralnet.softmax_shift_invariance",
    "neuralnet.temperature_argmax",
    "neuralnet.temperature_entropy_monotone",
    "neuralnet.pool_composition",
    "neuralnet.gradient_check",
    "energymodel.detailed_balance",
    "energymodel.partition_permutation",
    "energymodel.energy_swap",
    "energymodel.sampler_determinism",
    "energymodel.uniform_at_zero_beta",
    "optim.block_linearity",
    "optim.zero_momentum_equals_gd",
    "optim.bounded_momentum",
    "harness.artifact_determinism",
)

CheckFunction = Callable[[int, str], CheckResult]
CHECKS: dict[str, CheckFunction] = {}


def check(check_id: str):
    def register(fn: CheckFunction) -> CheckFunction:
        CHECKS[check_id] = fn
        return fn

    return register


@dataclass
class VerifyReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["status"] == CheckStatus.PASS for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c["status"] != CheckStatus.PASS]

    def raise_for_failures(self):
        failures = self.failures()
        if failures:
            first = failures[0]
            raise ScatternetCheckError(
                f"measured {first['measured']:.6g} against tolerance {first['tolerance']:.6g}"
                f" ({len(failures)} failing check(s))",
                first["check_id"],
            )

    def lines(self) -> list[str]:
        return [
            f"{c['check_id']} {c['status']} {c['measured']:.17g} {c['tolerance']:.17g}"
            for c in self.checks
        ]

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


def missing_invariants(checks: dict[str, CheckFunction] = CHECKS) -> list[str]:
    return [invariant for invariant in DECLARED_INVARIANTS if invariant not in checks]


def run_verify_all(
    seed: int, configuration: ScatternetConfiguration | None = None
) -> VerifyReport:
    """Runs every registered check and the fast experiments; writes `verify/report.txt`."""
    configuration = configuration or ScatternetConfiguration(seed=seed)
    workdir = configuration.experiment_dir("verify")
    report = VerifyReport()

    missing = missing_invariants()
    report.checks.append(make_check("harness.invariant_coverage", len(missing), 0))
    for invariant in missing:
        report.checks.append(
            {"check_id": invariant, "status": CheckStatus.FAIL, "measured": float("nan"), "tolerance": 0.0}
        )

    for check_id, fn in CHECKS.items():
        result = fn(seed, os.path.join(workdir, check_id))
        logger.debug(f"{check_id}: {result['status']}")
        report.checks.append(result)

    runner = ExperimentRunner(
        ScatternetConfiguration(
            output_root=workdir,
            seed=seed,
            log_run_level=configuration.log_run_level,
            logger=configuration.logger,
        )
    )
    for experiment_id in VERIFY_EXPERIMENTS:
        report.checks.extend(runner.run(experiment_id)["checks"])

    save_text_to_file(report.text(), os.path.join(workdir, "report.txt"))
    return report


# wavefield


@check("wavefield.phase_group")
def _phase_group(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 10)
    worst = 0.0
    for _ in range(1000):
        k, a, b = rng.uniform(-3, 3, (3, 3))
        combined = translation_phase(k, a) * translation_phase(k, b)
        worst = max(worst, abs(combined - translation_phase(k, a + b)))
    return make_check("wavefield.phase_group", worst, 1e-12)


@check("wavefield.phase_unit_modulus")
def _phase_unit_modulus(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 11)
    worst = max(
        abs(abs(translation_phase(k, a)) - 1.0) for k, a in rng.uniform(-100, 100, (1000, 2, 3))
    )
    return make_check("wavefield.phase_unit_modulus", worst, 1e-12)


@check("wavefield.series_convergence")
def _series_convergence(seed: int, workdir: str) -> CheckResult:
    k, a = 0.5, 1.0
    grid = Grid1D.regular(201, 0.1, -10.0)
    x = grid.axis(0)
    f = sampled(grid, np.sin(k * x))
    margin = series_margin(6)
    interior = slice(margin, -margin)
    errors = [
        float(np.max(np.abs(translate_series(f, a, n).values[interior] - np.sin(k * (x + a))[interior])))
        for n in range(1, 7)
    ]
    # largest step-to-step increase; negative when the errors strictly fall
    return make_check("wavefield.series_convergence", max(np.diff(errors)), 0.0, strict=True)


@check("wavefield.plane_wave_modulus")
def _plane_wave_modulus(seed: int, workdir: str) -> CheckResult:
    field_ = plane_wave(Grid2D.regular(64, 64, 0.37), (1.3, -0.7), amplitude=2.5)
    return make_check("wavefield.plane_wave_modulus", np.max(np.abs(field_.modulus() - 2.5)), 1e-12)


# scattering


@check("scattering.green_reciprocity")
def _green_reciprocity(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 12)
    worst = max(
        abs(green_outgoing(r, s, k) - green_outgoing(s, r, k))
        for r, s, k in ((rng.normal(size=3), rng.normal(size=3), rng.uniform(0, 5)) for _ in range(500))
    )
    return make_check("scattering.green_reciprocity", worst, 0.0)


def _voxel_potential(grid: Grid3D, voxels: dict[tuple, float]) -> ScatterPotential:
    values = np.zeros(grid.shape)
    for index, value in voxels.items():
        values[index] = value
    return ScatterPotential(grid, values)


@check("scattering.born_linearity")
def _born_linearity(seed: int, workdir: str) -> CheckResult:
    grid = Grid3D.regular(9, 9, 9)
    k = 1.1
    incident = plane_wave(grid, (0.0, 0.0, k))
    screen = screen_plane(9, 9, 1.0, (0.0, 0.0), z=8.0)
    first = {(2, 3, 1): 0.7, (4, 4, 2): -0.3}
    second = {(6, 5, 3): 0.45, (4, 4, 2): 0.2}
    both = {key: first.get(key, 0.0) + second.get(key, 0.0) for key in first | second}

    def scatter(voxels):
        return born_scatter(incident, _voxel_potential(grid, voxels), screen, k).values

    direct = incident.values[:, :, 8]
    combined = direct + (scatter(first) - direct) + (scatter(second) - direct)
    return make_check("scattering.born_linearity", np.max(np.abs(scatter(both) - combined)), 1e-10)


@check("scattering.slit_symmetry")
def _slit_symmetry(seed: int, workdir: str) -> CheckResult:
    aperture = SlitAperture(count=2, width=0.5, separation=3.0, screen_distance=500.0)
    intensity = double_slit_intensity(aperture, 2 * np.pi, Grid1D.spanning(-0.5, 0.5, 1001))
    return make_check("scattering.slit_symmetry", np.max(np.abs(intensity - intensity[::-1])), 1e-10)


def ring_deviation(kernel: ScatterKernel) -> float:
    """Largest spread of kernel values among entries at the same distance from the centre."""
    half = kernel.window // 2
    offsets = np.arange(-half, half + 1)
    radius2 = offsets[:, None] ** 2 + offsets[None, :] ** 2
    worst = 0.0
    for r2 in np.unique(radius2):
        ring = kernel.values[radius2 == r2]
        worst = max(worst, float(np.max(np.abs(ring - ring[0]))))
    return worst


@check("scattering.kernel_rings")
def _kernel_rings(seed: int, workdir: str) -> CheckResult:
    potential = spherical_potential(n=11, spacing=1.0, sigma=2.0, radius=5.0)
    worst = max(ring_deviation(scatter_kernel(potential, k, 9)) for k in (0.5, 1.0, 2.0))
    return make_check("scattering.kernel_rings", worst, 1e-10)


@check("scattering.response_phase_invariance")
def _response_phase_invariance(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 13)
    grid = Grid2D.regular(5, 5)
    worst = 0.0
    for _ in range(200):
        kernel = ScatterKernel(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)), k=1.0)
        psi = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        rotated = np.exp(1j * rng.uniform(0, 2 * np.pi)) * psi
        _, S = neuron_response(kernel, WaveField(grid, psi))
        _, S_rotated = neuron_response(kernel, WaveField(grid, rotated))
        worst = max(worst, abs(S - S_rotated))
    return make_check("scattering.response_phase_invariance", worst, 1e-10)


# neuralnet


@check("neuralnet.conv_translation")
def _conv_translation(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 14)
    layer = ConvLayer(rng.normal(size=(3, 2, 3, 3)), rng.normal(size=3))
    x = rng.normal(size=(2, 12, 12))
    shifted = np.empty_like(x)
    shifted[:, :, 1:] = x[:, :, :-1]
    shifted[:, :, 0] = rng.normal(size=(2, 12))
    out = conv2d(FeatureTensor(x), layer).values
    out_shifted = conv2d(FeatureTensor(shifted), layer).values
    return make_check("neuralnet.conv_translation", np.max(np.abs(out_shifted[:, :, 1:] - out[:, :, :-1])), 0.0)


@check("neuralnet.conv_bruteforce")
def _conv_bruteforce(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 15)
    mismatches = 0
    for _ in range(200):
        channels, out_ch = rng.integers(1, 4), rng.integers(1, 4)
        kh, kw = 2 * rng.integers(0, 5, size=2) + 1
        height, width = kh + rng.integers(0, 4), kw + rng.integers(0, 4)
        stride = int(rng.integers(1, 3))
        kernels = rng.integers(-5, 6, size=(out_ch, channels, kh, kw)).astype(float)
        bias = rng.integers(-5, 6, size=out_ch).astype(float)
        x = rng.integers(-5, 6, size=(channels, height, width)).astype(float)
        out = conv2d(FeatureTensor(x), ConvLayer(kernels, bias, stride)).values
        expected = brute_force_conv(x, kernels, bias, stride)
        mismatches += int(not np.array_equal(out, expected))
    return make_check("neuralnet.conv_bruteforce", mismatches, 0)


def brute_force_conv(x, kernels, bias, stride=1):
    out_ch, _, kh, kw = kernels.shape
    out_h = (x.shape[1] - kh) // stride + 1
    out_w = (x.shape[2] - kw) // stride + 1
    out = np.zeros((out_ch, out_h, out_w))
    for o in range(out_ch):
        for r in range(out_h):
            for c in range(out_w):
                window = x[:, r * stride : r * stride + kh, c * stride : c * stride + kw]
                out[o, r, c] = np.sum(window * kernels[o]) + bias[o]
    return out


@check("neuralnet.pool_bruteforce")
def _pool_bruteforce(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 16)
    mismatches = 0
    for _ in range(200):
        x = rng.normal(size=(int(rng.integers(1, 4)), 6, 6))
        window, stride = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        out, _ = max_pool(FeatureTensor(x), window, stride)
        n = (6 - window) // stride + 1
        expected = np.array(
            [
                [[x[c, r * stride : r * stride + window, s * stride : s * stride + window].max() for s in range(n)] for r in range(n)]
                for c in range(x.shape[0])
            ]
        )
        mismatches += int(not np.array_equal(out.values, expected))
    return make_check("neuralnet.pool_bruteforce", mismatches, 0)


@check("neuralnet.softmax_normalized")
def _softmax_normalized(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 17)
    worst = 0.0
    for z in rng.normal(0, 10, (1000, 6)):
        worst = max(worst, abs(softmax(z).sum() - 1), abs(softmax_temperature(z, rng.uniform(0.01, 100)).sum() - 1))
    return make_check("neuralnet.softmax_normalized", worst, 1e-12)


@check("neuralnet.softmax_shift_invariance")
def _softmax_shift_invariance(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 18)
    worst = 0.0
    for z in rng.normal(0, 3, (1000, 6)):
        shift, T = rng.uniform(-50, 50), rng.uniform(0.1, 10)
        worst = max(
            worst,
            np.max(np.abs(softmax(z + shift) - softmax(z))),
            np.max(np.abs(softmax_temperature(z + shift, T) - softmax_temperature(z, T))),
        )
    return make_check("neuralnet.softmax_shift_invariance", worst, 1e-12)


@check("neuralnet.temperature_argmax")
def _temperature_argmax(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 19)
    mismatches = sum(
        int(np.argmax(softmax_temperature(z, T)) != np.argmax(z))
        for z in rng.uniform(-1, 1, (200, 5))
        for T in np.logspace(-2, 6, 20)
    )
    return make_check("neuralnet.temperature_argmax", mismatches, 0)


@check("neuralnet.temperature_entropy_monotone")
def _temperature_entropy_monotone(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 20)
    worst = -np.inf
    for z in rng.normal(0, 2, (100, 5)):
        entropies = [entropy(softmax_temperature(z, T)) for T in np.logspace(-1, 3, 20)]
        worst = max(worst, float(np.max(-np.diff(entropies))))
    return make_check("neuralnet.temperature_entropy_monotone", worst, 1e-12)


@check("neuralnet.temperature_limits")
def _temperature_limits(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 21)
    unit, hot = 0.0, 0.0
    for z in rng.uniform(-1, 1, (100, 5)):
        unit = max(unit, np.max(np.abs(softmax_temperature(z, 1.0) - softmax(z))))
        hot = max(hot, np.max(np.abs(softmax_temperature(z, 1e6) - 1 / z.size)))
    # T = 1 must reproduce softmax to rounding; T -> inf flattens to uniform
    measured = hot if unit <= 1e-15 else np.inf
    return make_check("neuralnet.temperature_limits", measured, 1e-5)


@check("neuralnet.entropy_family")
def _entropy_family(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 22)
    errors = [
        abs(entropy([0, 1, 0, 0])),
        abs(entropy(np.full(4, 0.25)) - np.log(4)),
        abs(cross_entropy([0, 0, 1], [0.0010, 0.0001, 0.9989]) + np.log(0.9989)),
    ]
    worst_kl = 0.0
    for _ in range(10_000):
        p, q = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
        errors.append(abs(cross_entropy(p, p) - entropy(p)))
        worst_kl = min(worst_kl, kl_divergence(p, q))
    return make_check("neuralnet.entropy_family", max(max(errors), -worst_kl), 1e-12)


@check("neuralnet.pool_composition")
def _pool_composition(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 23)
    x = FeatureTensor(rng.normal(size=(3, 16, 16)))
    twice, _ = max_pool(max_pool(x, 2, 2)[0], 2, 2)
    once, _ = max_pool(x, 4, 4)
    return make_check("neuralnet.pool_composition", np.max(np.abs(twice.values - once.values)), 0.0)


@check("neuralnet.gradient_check")
def _gradient_check(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 24)
    layers = [
        {"type": "conv", "out_channels": 2, "kernel_size": 3},
        {"type": "relu"},
        {"type": "conv", "out_channels": 2, "kernel_size": 3},
        {"type": "relu"},
        {"type": "max_pool", "window": 2, "stride": 2},
        {"type": "dense", "outputs": 3},
    ]
    net = init_network((1, 8, 8), layers, seed)
    for layer in net:
        if hasattr(layer, "bias"):
            layer.bias = rng.normal(0, 0.1, layer.bias.shape)
    report = gradient_check(net, rng.normal(size=(1, 8, 8)), 1)
    return make_check("neuralnet.gradient_check", report.max_error, 1e-4)


# energymodel


def _random_rbm(rng: np.random.Generator, n_visible: int, n_hidden: int) -> RbmParams:
    return RbmParams(
        rng.normal(size=n_visible), rng.normal(size=n_hidden), rng.normal(size=(n_visible, n_hidden))
    )


@check("energymodel.detailed_balance")
def _detailed_balance(seed: int, workdir: str) -> CheckResult:
    params = _random_rbm(spawn_rng(seed, 25), 3, 2)
    pi = visible_marginal_exact(params)
    T = sweep_kernel_exact(params)
    flow = pi[:, None] * T
    return make_check("energymodel.detailed_balance", np.max(np.abs(flow - flow.T)), 1e-10)


@check("energymodel.partition_permutation")
def _partition_permutation(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 26)
    # quarter-integer parameters keep every energy exact
    b, c, W = rng.integers(-8, 9, 4) / 4, rng.integers(-8, 9, 3) / 4, rng.integers(-8, 9, (4, 3)) / 4
    params = RbmParams(b, c, W)
    v_perm, h_perm = rng.permutation(4), rng.permutation(3)
    permuted = RbmParams(b[v_perm], c[h_perm], W[v_perm][:, h_perm])
    difference = abs(partition_function_exact(params, 0.7) - partition_function_exact(permuted, 0.7))
    return make_check("energymodel.partition_permutation", difference, 0.0)


@check("energymodel.energy_swap")
def _energy_swap(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 27)
    worst = 0.0
    for _ in range(500):
        params = _random_rbm(rng, 4, 3)
        v, h = rng.integers(0, 2, 4), rng.integers(0, 2, 3)
        swapped = RbmParams(params.c, params.b, params.W.T)
        worst = max(worst, abs(energy(BinaryConfig(v, h), params) - energy(BinaryConfig(h, v), swapped)))
    return make_check("energymodel.energy_swap", worst, 0.0)


@check("energymodel.sampler_determinism")
def _sampler_determinism(seed: int, workdir: str) -> CheckResult:
    params = _random_rbm(spawn_rng(seed, 28), 3, 2)
    first = temper_sample(params, [1.0, 0.5, 1.0], 200, seed, cycles=3)
    second = temper_sample(params, [1.0, 0.5, 1.0], 200, seed, cycles=3)
    differing = int(np.sum(first.visible != second.visible) + np.sum(first.hidden != second.hidden))
    return make_check("energymodel.sampler_determinism", differing, 0)


@check("energymodel.uniform_at_zero_beta")
def _uniform_at_zero_beta(seed: int, workdir: str) -> CheckResult:
    params = _random_rbm(spawn_rng(seed, 29), 3, 2)
    P = joint_distribution(params, 0.0)
    return make_check("energymodel.uniform_at_zero_beta", np.max(np.abs(P - 2.0**-5)), 0.0)


@check("energymodel.gibbs_tv")
def _gibbs_tv(seed: int, workdir: str) -> CheckResult:
    params = _random_rbm(spawn_rng(seed, 30), 3, 2)
    run = gibbs_run(ChainState.start([0, 0, 0], 2, seed), params, 1_000_000)
    index = (run.visible.astype(np.int64) @ [4, 2, 1]) * 4 + run.hidden.astype(np.int64) @ [2, 1]
    empirical = np.bincount(index, minlength=32) / len(index)
    return make_check("energymodel.gibbs_tv", total_variation(empirical, joint_distribution(params).ravel()), 0.02)


# optim


@check("optim.block_linearity")
def _block_linearity(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 31)
    theta, grad, velocity = rng.normal(size=(3, 10))
    whole, theta_whole = momentum_step(MomentumState(velocity, 0.9, 0.01), theta, grad)
    parts = [
        momentum_step(MomentumState(velocity[s], 0.9, 0.01), theta[s], grad[s])
        for s in (slice(0, 4), slice(4, 10))
    ]
    joined = np.concatenate([p[1] for p in parts])
    joined_velocity = np.concatenate([p[0].velocity for p in parts])
    difference = max(np.max(np.abs(joined - theta_whole)), np.max(np.abs(joined_velocity - whole.velocity)))
    return make_check("optim.block_linearity", difference, 0.0)


@check("optim.zero_momentum_equals_gd")
def _zero_momentum_equals_gd(seed: int, workdir: str) -> CheckResult:
    rng = spawn_rng(seed, 32)
    theta, grad = rng.normal(size=(2, 10))
    _, momentum_theta = momentum_step(MomentumState.zeros_like(theta, 0.0, 0.05), theta, grad)
    return make_check("optim.zero_momentum_equals_gd", np.max(np.abs(momentum_theta - gd_step(theta, grad, 0.05))), 0.0)


@check("optim.velocity_decay")
def _velocity_decay(seed: int, workdir: str) -> CheckResult:
    state = MomentumState(np.array([3.0, -4.0]), 0.5, 0.1)
    theta = np.zeros(2)
    for _ in range(10):
        state, theta = momentum_step(state, theta, np.zeros(2))
    return make_check("optim.velocity_decay", abs(np.linalg.norm(state.velocity) - 5.0 * 0.5**10), 0.0)


@check("optim.bounded_momentum")
def _bounded_momentum(seed: int, workdir: str) -> CheckResult:
    curvatures, theta0 = np.array([1.0, 100.0]), np.array([10.0, 1.0])
    f0 = 0.5 * float(np.sum(curvatures * theta0**2))
    worst = max(
        float(np.max(minimize_quadratic(curvatures, theta0, alpha, 0.01, max_iter=5000).trace)) / f0
        for alpha in (0.0, 0.3, 0.6, 0.9)
    )
    return make_check("optim.bounded_momentum", worst, 10.0)


# harness


@check("harness.artifact_determinism")
def _artifact_determinism(seed: int, workdir: str) -> CheckResult:
    differing = 0
    for experiment_id, params in DETERMINISM_RUNS.items():
        first, second = (
            EXPERIMENTS[experiment_id](
                ExperimentConfig(experiment_id, seed, os.path.join(workdir, name, experiment_id), dict(params))
            )
            for name in ("a", "b")
        )
        differing += int(first["checks"] != second["checks"])
        differing += sum(
            int(not filecmp.cmp(a, b, shallow=False))
            for a, b in zip(first["artifacts"], second["artifacts"], strict=True)
        )
    return make_check("harness.artifact_determinism", differing, 0)
