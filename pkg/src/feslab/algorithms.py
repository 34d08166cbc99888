"""Contractive feedback iterations driven by plant measurements.

An algorithm operator maps the current input and a fresh measurement to the
next input, ``u+ = T(u, y)``.  When the measurement equals the steady-state
output, the composed map is a contraction toward the equilibrium input with
factor ``c_T`` in a weighted norm, and ``ell_T`` bounds the sensitivity of
``T`` to the measurement.  Both constants feed the closed-loop certificates.
"""

from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .errors import (
    BestResponseFailed,
    NoConvergence,
    RelaxationOutOfRange,
    ShapeError,
    StepSizeOutOfRange,
)


@dataclass
class AlgorithmOperator:
    """Measurement-driven input update with contraction metadata.

    ``step(u, y)`` produces the next input.  ``c_T`` in (0, 1) is the
    contraction factor toward the equilibrium input at exact steady-state
    measurements, in the norm weighted by the symmetric positive definite
    matrix ``P``; ``ell_T`` bounds ``||T(u, y) - T(u, y')|| / ||y - y'||``.
    """

    step: Callable
    c_T: float
    ell_T: float
    P: np.ndarray = None

    def __post_init__(self):
        if not (0 < self.c_T < 1):
            raise StepSizeOutOfRange(f"contraction factor must be in (0, 1), got {self.c_T}")
        if self.ell_T < 0:
            raise ShapeError("measurement sensitivity bound must be nonnegative")
        if self.P is not None:
            P = np.asarray(self.P, dtype=float)
            if P.ndim != 2 or P.shape[0] != P.shape[1]:
                raise ShapeError("P must be a square matrix")
            if not np.allclose(P, P.T, atol=1e-12):
                raise ShapeError("P must be symmetric")
            if np.linalg.eigvalsh(P)[0] <= 0:
                raise ShapeError("P must be positive definite")
            self.P = P

    def lambda_min_P(self):
        return 1.0 if self.P is None else float(np.linalg.eigvalsh(self.P)[0])

    def lambda_max_P(self):
        return 1.0 if self.P is None else float(np.linalg.eigvalsh(self.P)[-1])


def prox_grad_operator(problem, gamma, lipschitz_F_output=None):
    """Projected/proximal gradient update ``T(u, y) = res(u - gamma F(u, y))``.

    For a problem with strong monotonicity ``m`` and Lipschitz constant
    ``ell``, any step ``gamma`` in ``(0, 2m/ell^2)`` gives the contraction
    factor ``c_T = sqrt(1 - gamma (2m - gamma ell^2))`` in the Euclidean norm
    (``P`` identity).  The measurement sensitivity is ``gamma`` times the
    Lipschitz constant of ``F`` in ``y``, taken from the problem data unless
    passed explicitly.

    Raises StepSizeOutOfRange for steps outside the contractive range.
    """
    m = problem.strong_monotonicity
    ell = problem.lipschitz_F
    hi = 2.0 * m / ell**2
    if not (0 < gamma < hi):
        raise StepSizeOutOfRange(f"step {gamma} outside contractive range (0, {hi})")
    Ly = lipschitz_F_output
    if Ly is None:
        Ly = problem.lipschitz_F_output
    if Ly is None:
        raise ShapeError(
            "measurement Lipschitz constant of F required (problem.lipschitz_F_output)"
        )
    c_T = float(np.sqrt(1.0 - gamma * (2.0 * m - gamma * ell**2)))

    def step(u, y):
        u = np.asarray(u, dtype=float)
        return problem.resolvent(u - gamma * problem.F(u, y), gamma)

    return AlgorithmOperator(step=step, c_T=c_T, ell_T=gamma * Ly, P=None)


def best_response_operator(partition, local_solvers, c_T, ell_T):
    """Stacked exact best response ``T_i(u, y) = argmin of agent i's cost``.

    ``local_solvers[i]`` maps the full measurement to agent i's minimizer
    over its own box, with the other agents' behavior read off the
    measurement.  The contraction factor and measurement sensitivity are
    supplied by the scenario author (closed-form for quadratic games with
    identity-scaled local Hessians); ``estimate_contraction`` can cross-check.

    Solver failures and infeasible returns raise BestResponseFailed.
    """
    if len(local_solvers) != partition.n_agents:
        raise ShapeError("one local solver per agent required")
    slices = partition.u_slices()

    def step(u, y):
        u = np.asarray(u, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.empty(partition.dim)
        for i, sl in enumerate(slices):
            try:
                xi = np.atleast_1d(np.asarray(local_solvers[i](y), dtype=float))
            except Exception as exc:  # noqa: BLE001 - local solvers are user code
                raise BestResponseFailed(f"local solver {i} raised: {exc}") from exc
            if xi.shape != (partition.agent_dims[i],):
                raise BestResponseFailed(
                    f"local solver {i} returned shape {xi.shape}, "
                    f"expected ({partition.agent_dims[i]},)"
                )
            if not partition.boxes[i].contains(xi):
                raise BestResponseFailed(f"local solver {i} returned an infeasible point")
            out[sl] = xi
        return out

    return AlgorithmOperator(step=step, c_T=c_T, ell_T=ell_T, P=None)


def projected_argmin(grad, box, lipschitz, strong_convexity, x0=None, tol=1e-12, max_iters=100_000):
    """Minimize a smooth strongly convex function over a box.

    Projected gradient descent with the optimal fixed step
    ``2 / (lipschitz + strong_convexity)``; a building block for local
    best-response solvers without a closed form.
    """
    if not (0 < strong_convexity <= lipschitz):
        raise StepSizeOutOfRange("need 0 < strong_convexity <= lipschitz")
    step = 2.0 / (lipschitz + strong_convexity)
    x = box.center.copy() if x0 is None else np.asarray(x0, dtype=float).copy()
    for _ in range(max_iters):
        x_next = box.project(x - step * np.asarray(grad(x), dtype=float))
        if np.linalg.norm(x_next - x) <= tol:
            return x_next
        x = x_next
    raise NoConvergence(f"projected minimization did not converge within {max_iters} iterations")


def relaxed_step(op, eps, u, y):
    """Relaxed update ``(1 - eps) u + eps T(u, y)`` for ``eps`` in (0, 1].

    Relaxation trades convergence speed for robustness: the effective
    contraction factor becomes ``1 - eps (1 - c_T)``.  Raises
    RelaxationOutOfRange outside (0, 1].
    """
    if not (0 < eps <= 1):
        raise RelaxationOutOfRange(f"relaxation gain must be in (0, 1], got {eps}")
    u = np.asarray(u, dtype=float)
    t = np.asarray(op.step(u, y), dtype=float)
    if t.shape != u.shape:
        raise ShapeError(f"operator returned shape {t.shape}, expected {u.shape}")
    return (1.0 - eps) * u + eps * t


def estimate_contraction(step_at_steady_state, u_star, sampler, trials=200, rng=None):
    """Empirical contraction factor of ``u -> T(u, h(u))`` toward ``u_star``.

    ``step_at_steady_state(u)`` must evaluate the operator at the
    steady-state measurement for ``u``; ``sampler(rng)`` draws test points.
    Returns the largest observed ratio ``||T(u) - u*|| / ||u - u*||``.
    """
    rng = np.random.default_rng(rng)
    u_star = np.asarray(u_star, dtype=float)
    worst = 0.0
    for _ in range(trials):
        u = sampler(rng)
        den = np.linalg.norm(u - u_star)
        if den < 1e-12:
            continue
        num = np.linalg.norm(step_at_steady_state(u) - u_star)
        worst = max(worst, num / den)
    return float(worst)
