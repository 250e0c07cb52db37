"""
Restricted Boltzmann machine with binary {0, 1} units.

    E(v, h) = -b.v - c.h - v.W.h
    P(v, h) = exp(-beta E) / Z

Exact statistics enumerate every configuration and are bounded by
MAX_ENUMERATION_UNITS. Configurations are enumerated with the first unit as
the most significant bit, so state index i of n units has bits
(i >> (n - 1 - j)) & 1.

Sampling is block Gibbs: h | v then v | h, each unit on with probability
sigmoid(beta * field). Every sampler is a pure function of its seed.
"""

from math import fsum
import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import expit, rel_entr

from scatternet.core.artifacts import CheckpointSection, read_checkpoint, write_checkpoint, write_csv
from scatternet.core.exceptions import (
    ScatternetConfigError,
    ScatternetDomainError,
    ScatternetEnumerationError,
    ScatternetShapeError,
)
from scatternet.core.helpers import require_distribution, spawn_rng
from scatternet.optim import MomentumState, gd_step, momentum_step
from scatternet.typing.energy_types import (
    BinaryConfig,
    CdTrainingReport,
    ChainState,
    RbmParams,
    SampleRun,
    TransitionKernel,
)

logger = logging.getLogger(__name__)

MAX_ENUMERATION_UNITS = 24
# Rows of (visible x hidden) energies evaluated at once.
_ENUMERATION_CHUNK = 1024


def _check_config(cfg: BinaryConfig, p: RbmParams):
    if cfg.v.size != p.n_visible or cfg.h.size != p.n_hidden:
        raise ScatternetShapeError(
            "configuration does not match the model",
            (p.n_visible, p.n_hidden),
            (cfg.v.size, cfg.h.size),
        )


def _check_beta(beta: float, allow_zero: bool = False):
    if beta < 0 or (beta == 0 and not allow_zero) or not np.isfinite(beta):
        raise ScatternetDomainError(f"invalid inverse temperature {beta}")


def energy(cfg: BinaryConfig, p: RbmParams) -> float:
    """
    -b.v - c.h - v.W.h, summed exactly (fsum) so that the value does not
    depend on the order of the units.
    """
    _check_config(cfg, p)
    v, h = cfg.v.astype(np.float64), cfg.h.astype(np.float64)
    terms = np.concatenate([p.b * v, p.c * h, (p.W * np.outer(v, h)).ravel()])
    return -fsum(terms)


def bit_table(n: int) -> NDArray[np.uint8]:
    """All 2^n bit vectors, first unit most significant."""
    states = np.arange(2**n, dtype=np.int64)[:, None]
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)[None, :]
    return ((states >> shifts) & 1).astype(np.uint8)


def state_index(bits: ArrayLike) -> int:
    value = 0
    for bit in np.asarray(bits, dtype=np.int64):
        value = (value << 1) | int(bit)
    return value


def _check_enumerable(p: RbmParams, limit: int = MAX_ENUMERATION_UNITS):
    size = p.n_visible + p.n_hidden
    if size > limit:
        raise ScatternetEnumerationError("model too large to enumerate", size, limit)


def joint_energies(p: RbmParams, limit: int = MAX_ENUMERATION_UNITS) -> NDArray[np.float64]:
    """E[i, j] for visible state i and hidden state j."""
    _check_enumerable(p, limit)
    V = bit_table(p.n_visible).astype(np.float64)
    H = bit_table(p.n_hidden).astype(np.float64)
    hidden_term = H @ p.c
    out = np.empty((V.shape[0], H.shape[0]))
    for start in range(0, V.shape[0], _ENUMERATION_CHUNK):
        rows = V[start : start + _ENUMERATION_CHUNK]
        out[start : start + len(rows)] = (
            -(rows @ p.b)[:, None] - hidden_term[None, :] - (rows @ p.W) @ H.T
        )
    return out


def _boltzmann_weights(
    p: RbmParams, beta: float, limit: int = MAX_ENUMERATION_UNITS
) -> tuple[NDArray[np.float64], float, float]:
    """Weights exp(-beta E - m) with m = max(-beta E), their sum and m."""
    _check_beta(beta, allow_zero=True)
    exponent = -beta * joint_energies(p, limit)
    shift = float(exponent.max())
    weights = np.exp(exponent - shift)
    # Summed in sorted order: the total does not depend on state order.
    total = float(np.sort(weights, axis=None).sum())
    return weights, total, shift


def partition_function_exact(
    p: RbmParams, beta: float = 1.0, limit: int = MAX_ENUMERATION_UNITS
) -> float:
    """Z = sum over all 2^(n_v + n_h) configurations of exp(-beta E)."""
    _, total, shift = _boltzmann_weights(p, beta, limit)
    return total * float(np.exp(shift))


def log_partition_function(
    p: RbmParams, beta: float = 1.0, limit: int = MAX_ENUMERATION_UNITS
) -> float:
    _, total, shift = _boltzmann_weights(p, beta, limit)
    return float(np.log(total)) + shift


def joint_distribution(p: RbmParams, beta: float = 1.0) -> NDArray[np.float64]:
    """P[i, j] of visible state i and hidden state j."""
    weights, total, _ = _boltzmann_weights(p, beta)
    return weights / total


def boltzmann_prob(cfg: BinaryConfig, p: RbmParams, beta: float = 1.0) -> float:
    _check_config(cfg, p)
    weights, total, _ = _boltzmann_weights(p, beta)
    return float(weights[state_index(cfg.v), state_index(cfg.h)] / total)


def visible_marginal_exact(p: RbmParams, beta: float = 1.0) -> NDArray[np.float64]:
    """P(v) over the 2^n_v visible states (hidden units summed out)."""
    return joint_distribution(p, beta).sum(axis=1)


def free_energy(v: ArrayLike, p: RbmParams, beta: float = 1.0) -> float:
    """-b.v - (1/beta) sum_j log(1 + exp(beta (c_j + v.W_j))); P(v) is proportional to exp(-beta F)."""
    _check_beta(beta)
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (p.n_visible,):
        raise ScatternetShapeError("visible vector does not match", (p.n_visible,), v.shape)
    field = p.c + v @ p.W
    return float(-(p.b @ v) - np.logaddexp(0.0, beta * field).sum() / beta)


def data_distribution(data: ArrayLike, n_visible: int) -> NDArray[np.float64]:
    """Empirical distribution of binary rows over the 2^n_visible states."""
    data = np.asarray(data)
    if data.ndim != 2 or data.shape[1] != n_visible:
        raise ScatternetShapeError("data rows must be visible vectors", (None, n_visible), data.shape)
    weights = 1 << np.arange(n_visible - 1, -1, -1, dtype=np.int64)
    counts = np.bincount(data.astype(np.int64) @ weights, minlength=2**n_visible)
    return counts / counts.sum()


def exact_kl(data_dist: ArrayLike, p: RbmParams, beta: float = 1.0) -> float:
    """KL(data || model) over visible states, in nats."""
    data_dist = require_distribution(data_dist, "data distribution")
    model = visible_marginal_exact(p, beta)
    if data_dist.shape != model.shape:
        raise ScatternetShapeError("data distribution size", model.shape, data_dist.shape)
    return float(rel_entr(data_dist, model).sum())


def energy_variance(distribution: ArrayLike, energies: ArrayLike) -> float:
    """Variance of the energy under a distribution; zero for a point mass."""
    distribution = require_distribution(distribution, "distribution")
    energies = np.asarray(energies, dtype=np.float64)
    mean = float(distribution @ energies)
    return float(distribution @ (energies - mean) ** 2)


def _hidden_probabilities(v: NDArray, p: RbmParams, beta: float) -> NDArray[np.float64]:
    return expit(beta * (p.c + v @ p.W))


def _visible_probabilities(h: NDArray, p: RbmParams, beta: float) -> NDArray[np.float64]:
    return expit(beta * (p.b + h @ p.W.T))


def sweep_kernel_exact(p: RbmParams, beta: float = 1.0) -> NDArray[np.float64]:
    """T[v, v'] = sum_h P(h | v) P(v' | h): one block-Gibbs sweep on the visible chain."""
    _check_enumerable(p)
    _check_beta(beta)
    V = bit_table(p.n_visible).astype(np.float64)
    H = bit_table(p.n_hidden).astype(np.float64)

    def conditional(states, probabilities):
        # P(target state | source) for every (source, target) pair
        return np.prod(
            np.where(states[None, :, :] == 1, probabilities[:, None, :], 1 - probabilities[:, None, :]),
            axis=-1,
        )

    h_given_v = conditional(H, _hidden_probabilities(V, p, beta))
    v_given_h = conditional(V, _visible_probabilities(H, p, beta))
    return h_given_v @ v_given_h


def _sweep(v, p, beta, uniforms):
    h = (uniforms[: p.n_hidden] < _hidden_probabilities(v, p, beta)).astype(np.uint8)
    v = (uniforms[p.n_hidden :] < _visible_probabilities(h, p, beta)).astype(np.uint8)
    return v, h


def gibbs_step(state: ChainState, p: RbmParams) -> ChainState:
    """One block-Gibbs sweep: h | v, then v | h."""
    _check_config(state.config, p)
    rng = state.generator()
    uniforms = rng.random(p.n_hidden + p.n_visible)
    v, h = _sweep(state.config.v, p, state.beta, uniforms)
    return ChainState(BinaryConfig(v, h), state.steps + 1, rng.bit_generator.state, state.beta)


def gibbs_run(
    state: ChainState, p: RbmParams, sweeps: int, block: int = 4096
) -> SampleRun:
    """
    `sweeps` block-Gibbs sweeps at the state's beta, recording (v, h) and the
    joint energy after every sweep. Draws the same uniforms as repeated
    gibbs_step calls, so both give the same trajectory.
    """
    _check_config(state.config, p)
    rng = state.generator()
    width = p.n_hidden + p.n_visible
    visible = np.empty((sweeps, p.n_visible), dtype=np.uint8)
    hidden = np.empty((sweeps, p.n_hidden), dtype=np.uint8)
    v = state.config.v

    for start in range(0, sweeps, block):
        uniforms = rng.random((min(block, sweeps - start), width))
        for offset, row in enumerate(uniforms):
            v, h = _sweep(v, p, state.beta, row)
            visible[start + offset], hidden[start + offset] = v, h

    energies = -(visible @ p.b) - (hidden @ p.c) - np.einsum(
        "ti,ij,tj->t", visible.astype(np.float64), p.W, hidden.astype(np.float64)
    )
    config = BinaryConfig(v, hidden[-1]) if sweeps else state.config
    final = ChainState(config, state.steps + sweeps, rng.bit_generator.state, state.beta)
    return SampleRun(visible, hidden, energies, final)


def _at_beta(state: ChainState, beta: float) -> ChainState:
    return ChainState(state.config, state.steps, state.rng_state, beta)


def _check_schedule(schedule: list[float], end_at_unit: bool) -> list[float]:
    schedule = [float(beta) for beta in schedule]
    if not schedule:
        raise ScatternetDomainError("empty temperature schedule")
    if any(not beta > 0 or not np.isfinite(beta) for beta in schedule):
        raise ScatternetDomainError(f"schedule has a non-positive beta: {schedule}")
    if end_at_unit and schedule[-1] != 1.0:
        raise ScatternetDomainError(f"schedule must end at beta = 1, got {schedule[-1]}")
    return schedule


def kept_rungs(schedule: list[float]) -> list[int]:
    """
    Indices of the rungs whose samples a schedule returns: the beta = 1 rungs
    that follow the first rung away from beta = 1. A schedule that never
    leaves beta = 1 is plain Gibbs and keeps every rung; one that ends away
    from beta = 1 with no unit rung after the excursion keeps its last rung.
    """
    departed = next((i for i, beta in enumerate(schedule) if beta != 1.0), None)
    if departed is None:
        return list(range(len(schedule)))
    keep = [i for i, beta in enumerate(schedule) if beta == 1.0 and i > departed]
    return keep or [len(schedule) - 1]


def _run_schedule(
    state: ChainState, p: RbmParams, schedule: list[float], sweeps_per_rung: int
) -> SampleRun:
    """Runs every rung in turn and keeps the samples of `kept_rungs(schedule)`."""
    visible, hidden, energies = [], [], []
    keep = set(kept_rungs(schedule))
    for rung, beta in enumerate(schedule):
        run = gibbs_run(_at_beta(state, beta), p, sweeps_per_rung)
        state = run.final
        energies.append(run.energies)
        if rung in keep:
            visible.append(run.visible)
            hidden.append(run.hidden)
    return SampleRun(
        np.concatenate(visible),
        np.concatenate(hidden),
        np.concatenate(energies),
        _at_beta(state, schedule[-1]),
    )


def anneal_sample(
    p: RbmParams,
    schedule: list[float],
    sweeps_per_rung: int,
    seed: int,
    v0: ArrayLike | None = None,
    return_to_unit: bool = True,
    stream: int = 0,
) -> SampleRun:
    """
    Visits a rising beta ladder (temporarily colder) and samples at beta = 1.
    With return_to_unit=False the ladder may end anywhere; a very large final
    beta makes the chain descend into a local energy minimum.
    """
    schedule = _check_schedule(schedule, return_to_unit)
    v0 = np.zeros(p.n_visible, dtype=np.uint8) if v0 is None else v0
    state = ChainState.start(v0, p.n_hidden, seed, stream)
    return _run_schedule(state, p, schedule, sweeps_per_rung)


def temper_sample(
    p: RbmParams,
    schedule: list[float],
    sweeps_per_rung: int,
    seed: int,
    v0: ArrayLike | None = None,
    cycles: int = 1,
    stream: int = 0,
) -> SampleRun:
    """
    Repeats a falling-then-rising beta cycle (temporarily hotter) `cycles`
    times, keeping the samples of the beta = 1 rungs after the first excursion.
    """
    schedule = _check_schedule(schedule, True)
    if cycles < 1:
        raise ScatternetDomainError(f"cycles must be >= 1, got {cycles}")
    v0 = np.zeros(p.n_visible, dtype=np.uint8) if v0 is None else v0
    state = ChainState.start(v0, p.n_hidden, seed, stream)
    return _run_schedule(state, p, schedule * cycles, sweeps_per_rung)


def init_rbm(n_visible: int, n_hidden: int, seed: int, scale: float = 0.01) -> RbmParams:
    """Zero biases and couplings drawn from N(0, scale^2)."""
    rng = spawn_rng(seed, stream=1)
    return RbmParams(
        np.zeros(n_visible), np.zeros(n_hidden), rng.normal(0.0, scale, (n_visible, n_hidden))
    )


def _cd_gradient(
    data: NDArray, p: RbmParams, k: int, rng: np.random.Generator, beta: float
) -> tuple[NDArray[np.float64], float]:
    """Gradient of the negative log-likelihood estimated with CD-k, and the reconstruction error."""
    positive_h = _hidden_probabilities(data, p, beta)
    v = data
    for step in range(k):
        h = (rng.random(positive_h.shape) < _hidden_probabilities(v, p, beta)).astype(np.float64)
        v_prob = _visible_probabilities(h, p, beta)
        if step == 0:
            reconstruction = float(np.mean((data - v_prob) ** 2))
        v = v_prob if step == k - 1 else (rng.random(v_prob.shape) < v_prob).astype(np.float64)
    negative_h = _hidden_probabilities(v, p, beta)

    n = len(data)
    grad_b = -(data - v).sum(axis=0) / n
    grad_c = -(positive_h - negative_h).sum(axis=0) / n
    grad_W = -(data.T @ positive_h - v.T @ negative_h) / n
    return np.concatenate([grad_b, grad_c, grad_W.ravel()]), reconstruction


def cd_train(
    data: ArrayLike,
    p: RbmParams,
    k: int = 1,
    learning_rate: float = 0.1,
    momentum: float = 0.0,
    epochs: int = 1,
    seed: int = 0,
    beta: float = 1.0,
) -> CdTrainingReport:
    """
    Full-batch contrastive divergence. Chains start at the data rows, run k
    sweeps and use visible probabilities for the final reconstruction.
    Parameters move by momentum (or plain) gradient steps on the (b, c, W) vector.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != p.n_visible:
        raise ScatternetShapeError("data rows must be visible vectors", (None, p.n_visible), data.shape)
    if k < 1:
        raise ScatternetDomainError(f"CD needs k >= 1, got {k}")
    if not np.isin(data, (0, 1)).all():
        raise ScatternetDomainError("training data must be binary")

    enumerable = p.n_visible + p.n_hidden <= MAX_ENUMERATION_UNITS
    target = data_distribution(data, p.n_visible) if enumerable else None
    rng = spawn_rng(seed, stream=2)
    theta = p.as_vector()
    state = MomentumState.zeros_like(theta, momentum, learning_rate) if learning_rate > 0 else None
    trace = []
    for _ in range(epochs):
        grad, reconstruction = _cd_gradient(data, p, k, rng, beta)
        if state is None:
            theta = gd_step(theta, grad, learning_rate)
        else:
            state, theta = momentum_step(state, theta, grad)
        p = RbmParams.from_vector(theta, p.n_visible, p.n_hidden)
        trace.append(exact_kl(target, p, beta) if enumerable else reconstruction)

    metric = "exact_kl" if enumerable else "reconstruction_error"
    logger.debug("CD training finished", extra={"epochs": epochs, "metric": metric})
    return CdTrainingReport(p, np.array(trace), metric)


def markov_chain_run(
    T: TransitionKernel, x0: int, steps: int, seed: int, stream: int = 0
) -> NDArray[np.int64]:
    """Trajectory x_0 .. x_steps of the chain with transition matrix T."""
    if not 0 <= x0 < T.size:
        raise ScatternetDomainError(f"initial state {x0} outside [0, {T.size})")
    cumulative = np.cumsum(T.matrix, axis=1)
    uniforms = spawn_rng(seed, stream).random(steps)
    trajectory = np.empty(steps + 1, dtype=np.int64)
    trajectory[0] = x = x0
    for t, u in enumerate(uniforms, start=1):
        x = min(int(np.searchsorted(cumulative[x], u, side="right")), T.size - 1)
        trajectory[t] = x
    return trajectory


def occupancy(trajectory: ArrayLike, size: int) -> NDArray[np.float64]:
    counts = np.bincount(np.asarray(trajectory, dtype=np.int64), minlength=size)
    return counts / counts.sum()


def evolve_distribution(T: TransitionKernel, p0: ArrayLike, steps: int) -> NDArray[np.float64]:
    """p_0 .. p_steps with p_{t+1} = p_t T."""
    p = require_distribution(p0, "p0")
    if p.size != T.size:
        raise ScatternetShapeError("distribution size", (T.size,), p.shape)
    out = np.empty((steps + 1, T.size))
    out[0] = p
    for t in range(steps):
        out[t + 1] = out[t] @ T.matrix
    return out


def stationary_distribution(
    T: TransitionKernel, tolerance: float = 1e-15, max_iter: int = 100_000
) -> NDArray[np.float64]:
    """Left eigenvector of T for eigenvalue 1, by power iteration from the uniform law."""
    pi = np.full(T.size, 1.0 / T.size)
    for _ in range(max_iter):
        nxt = pi @ T.matrix
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() < tolerance:
            return nxt
        pi = nxt
    logger.warning("Power iteration did not converge", extra={"max_iter": max_iter})
    return pi


def total_variation(p: ArrayLike, q: ArrayLike) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def rbm_sections(p: RbmParams) -> list[CheckpointSection]:
    return [
        CheckpointSection("rbm", {"param": name}, values)
        for name, values in (("b", p.b), ("c", p.c), ("W", p.W))
    ]


def save_rbm(path: str, p: RbmParams) -> str:
    return write_checkpoint(path, rbm_sections(p))


def load_rbm(path: str) -> RbmParams:
    params = {
        section.attrs.get("param"): section.values
        for section in read_checkpoint(path)
        if section.name == "rbm"
    }
    missing = {"b", "c", "W"} - params.keys()
    if missing:
        raise ScatternetConfigError(f"RBM checkpoint is missing {sorted(missing)}")
    W = params["W"].reshape(params["b"].size, params["c"].size)
    return RbmParams(params["b"], params["c"], W)


def write_samples_csv(path: str, visible: ArrayLike) -> str:
    visible = np.asarray(visible, dtype=np.uint8)
    header = [f"v{i}" for i in range(visible.shape[1])]
    return write_csv(path, header, visible.tolist())
