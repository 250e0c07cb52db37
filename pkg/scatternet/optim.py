"""
First-order optimizers: plain gradient descent and the momentum rule

    v <- alpha * v - lr * g
    theta <- theta + v

The velocity acts as a heavy ball: alpha < 1 plays the role of viscous drag,
so with zero gradient the velocity decays geometrically as alpha^t.
"""

from dataclasses import dataclass, replace
import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray

from scatternet.core.exceptions import ScatternetDomainError, ScatternetShapeError
from scatternet.core.helpers import require_finite

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 100_000
GRADIENT_TOLERANCE = 1e-8
DIVERGENCE_FACTOR = 1e12


@dataclass(frozen=True)
class MomentumState:
    """Velocity (shaped like the parameters), momentum coefficient alpha and learning rate lr."""

    velocity: NDArray[np.float64]
    alpha: float
    lr: float

    def __post_init__(self):
        if not 0 <= self.alpha < 1:
            raise ScatternetDomainError(f"alpha must be in [0, 1), got {self.alpha}")
        if not self.lr > 0:
            raise ScatternetDomainError(f"learning rate must be > 0, got {self.lr}")
        velocity = np.asarray(require_finite(self.velocity, "velocity"), dtype=np.float64)
        object.__setattr__(self, "velocity", velocity)

    @classmethod
    def zeros_like(cls, params: ArrayLike, alpha: float, lr: float) -> "MomentumState":
        return cls(np.zeros(np.shape(params)), alpha, lr)


def _check_gradient(params: NDArray, grad: ArrayLike) -> NDArray[np.float64]:
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != params.shape:
        raise ScatternetShapeError("gradient does not match the parameters", params.shape, grad.shape)
    return require_finite(grad, "gradient")


def momentum_step(
    state: MomentumState, params: ArrayLike, grad: ArrayLike
) -> tuple[MomentumState, NDArray[np.float64]]:
    params = np.asarray(params, dtype=np.float64)
    grad = _check_gradient(params, grad)
    if state.velocity.shape != params.shape:
        raise ScatternetShapeError(
            "velocity does not match the parameters", params.shape, state.velocity.shape
        )
    velocity = state.alpha * state.velocity - state.lr * grad
    return replace(state, velocity=velocity), params + velocity


def gd_step(params: ArrayLike, grad: ArrayLike, lr: float) -> NDArray[np.float64]:
    if lr < 0:
        raise ScatternetDomainError(f"learning rate must be >= 0, got {lr}")
    params = np.asarray(params, dtype=np.float64)
    grad = _check_gradient(params, grad)
    return params - lr * grad


@dataclass(frozen=True)
class QuadraticRun:
    iterations: int
    value: float
    converged: bool
    diverged: bool
    trace: NDArray[np.float64]


def minimize_quadratic(
    curvatures: ArrayLike,
    theta0: ArrayLike,
    alpha: float,
    lr: float,
    f_tol: float = 1e-6,
    max_iter: int = MAX_ITERATIONS,
    grad_tol: float = GRADIENT_TOLERANCE,
) -> QuadraticRun:
    """
    Minimizes f(theta) = 1/2 sum_i c_i theta_i^2 from theta0 until f < f_tol or
    the gradient sup-norm drops below grad_tol. alpha = 0 is plain gradient descent.
    The trace holds f before each step; a run whose f grows past
    DIVERGENCE_FACTOR * f(theta0) stops and is flagged as diverged.
    """
    c = np.asarray(curvatures, dtype=np.float64)
    theta = np.asarray(theta0, dtype=np.float64).copy()
    if c.shape != theta.shape:
        raise ScatternetShapeError("curvatures and theta0 differ", c.shape, theta.shape)
    if (c <= 0).any():
        raise ScatternetDomainError("curvatures must be > 0")

    state = MomentumState.zeros_like(theta, alpha, lr)
    f0 = 0.5 * float(np.sum(c * theta**2))
    trace = []
    for iteration in range(max_iter + 1):
        f = 0.5 * float(np.sum(c * theta**2))
        trace.append(f)
        grad = c * theta
        if f < f_tol or np.max(np.abs(grad)) < grad_tol:
            return QuadraticRun(iteration, f, True, False, np.array(trace))
        if not np.isfinite(f) or f > DIVERGENCE_FACTOR * max(f0, f_tol):
            logger.debug("Quadratic run diverged", extra={"alpha": alpha, "lr": lr})
            return QuadraticRun(iteration, f, False, True, np.array(trace))
        if iteration == max_iter:
            break
        state, theta = momentum_step(state, theta, grad)
    return QuadraticRun(max_iter, f, False, False, np.array(trace))
