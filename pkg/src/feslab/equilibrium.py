"""Steady-state equilibrium problems and their offline solver.

The controlled systems in this package track solutions of a generalized
equation ``0 in F(u, h(u, w)) + B(u)``: a pseudo-gradient ``F`` built from an
optimization or game cost, plus a maximally monotone operator ``B`` encoded
through its resolvent (for box constraints, the projection).  Optimization
problems supply ``F`` through a chain rule on the steady-state output map;
multi-agent problems stack per-agent pseudo-gradients.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .box import BoxSet
from .errors import InvalidInterval, NoConvergence, ShapeError


@dataclass
class EquilibriumProblem:
    """Monotone equilibrium problem data.

    Parameters
    ----------
    dim : int
        Decision dimension.
    F : callable ``(u, y) -> array (dim,)``
        Pseudo-gradient evaluated at an input/measurement pair.
    resolvent : callable ``(v, gamma) -> array (dim,)``
        Resolvent of the constraint/regularizer operator at step ``gamma``
        (projection for box constraints, identity when unconstrained).
    lipschitz_F : float
        Lipschitz constant of the reduced map ``u -> F(u, h(u, w))``.
    strong_monotonicity : float
        Strong monotonicity modulus of the same reduced map.
    lipschitz_solution : float
        Lipschitz constant of the solution map ``w -> u*(w)``.
    lipschitz_F_output : float, optional
        Lipschitz constant of ``F`` in its measurement argument; needed to
        derive the measurement sensitivity of gradient-based operators.
    """

    dim: int
    F: Callable
    resolvent: Callable
    lipschitz_F: float
    strong_monotonicity: float
    lipschitz_solution: float
    lipschitz_F_output: Optional[float] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ShapeError("problem dimension must be positive")
        if not (self.strong_monotonicity > 0):
            raise InvalidInterval("strong monotonicity modulus must be positive")
        if self.lipschitz_F < self.strong_monotonicity:
            raise InvalidInterval(
                "Lipschitz constant cannot be smaller than the strong monotonicity modulus"
            )
        if self.lipschitz_solution < 0:
            raise InvalidInterval("solution-map Lipschitz constant must be nonnegative")


@dataclass
class GamePartition:
    """Block structure of a multi-agent decision and measurement vector.

    ``agent_dims[i]`` is the size of agent i's decision block; ``y_dims[i]``
    the size of its measurement block (defaults to the decision block sizes).
    ``boxes[i]`` is agent i's local admissible box.
    """

    agent_dims: List[int]
    boxes: List[BoxSet]
    y_dims: Optional[List[int]] = None

    def __post_init__(self):
        if self.y_dims is None:
            self.y_dims = list(self.agent_dims)
        if len(self.boxes) != len(self.agent_dims):
            raise ShapeError("one box per agent required")
        for d, b in zip(self.agent_dims, self.boxes):
            if b.dim != d:
                raise ShapeError("box dimension does not match agent dimension")

    @property
    def n_agents(self):
        return len(self.agent_dims)

    @property
    def dim(self):
        return int(sum(self.agent_dims))

    @property
    def y_dim(self):
        return int(sum(self.y_dims))

    def u_slices(self):
        out, start = [], 0
        for d in self.agent_dims:
            out.append(slice(start, start + d))
            start += d
        return out

    def y_slices(self):
        out, start = [], 0
        for d in self.y_dims:
            out.append(slice(start, start + d))
            start += d
        return out

    def joint_box(self):
        lo = np.concatenate([b.lo for b in self.boxes])
        hi = np.concatenate([b.hi for b in self.boxes])
        return BoxSet(lo, hi)


def identity_resolvent():
    """Resolvent of the zero operator (unconstrained problems)."""

    def res(v, gamma):
        return np.asarray(v, dtype=float)

    return res


def box_resolvent(box):
    """Resolvent of a box indicator: projection, independent of the step."""

    def res(v, gamma):
        return box.project(v)

    return res


def fo_pseudo_gradient(grad_u_phi1, grad_y_phi1, jac_h_u):
    """Pseudo-gradient of an optimization cost over input and predicted output.

    Given a smooth cost ``phi1(u, y)`` and the input-to-output sensitivity
    ``jac_h_u(u)`` of the steady-state map, returns

        F(u, y) = grad_u phi1(u, y) + jac_h_u(u)^T grad_y phi1(u, y)

    which is the gradient of ``u -> phi1(u, h(u, w))`` when ``y`` is the
    steady-state output.

    Parameters are callables: ``grad_u_phi1(u, y)``, ``grad_y_phi1(u, y)``
    (arrays), and ``jac_h_u(u)`` (matrix ``(y_dim, u_dim)``).
    """

    def F(u, y):
        u = np.asarray(u, dtype=float)
        y = np.asarray(y, dtype=float)
        gu = np.atleast_1d(np.asarray(grad_u_phi1(u, y), dtype=float))
        gy = np.atleast_1d(np.asarray(grad_y_phi1(u, y), dtype=float))
        J = np.atleast_2d(np.asarray(jac_h_u(u), dtype=float))
        if gu.shape != u.shape:
            raise ShapeError(f"grad_u shape {gu.shape} does not match input {u.shape}")
        if J.shape != (gy.shape[0], u.shape[0]):
            raise ShapeError(
                f"sensitivity shape {J.shape} inconsistent with y {gy.shape} and u {u.shape}"
            )
        return gu + J.T @ gy

    return F


def game_pseudo_gradient(partition, grad_ui_Ji, grad_yi_Ji, jac_hi):
    """Stacked pseudo-gradient of a multi-agent game.

    Agent i holds a cost ``J_i(u_i, y)`` in its own decision and the full
    measurement, and a local steady-state sensitivity ``jac_hi[i](u_i)`` of
    its own measurement block.  The stacked map is

        F_i(u, y) = grad_{u_i} J_i(u_i, y) + jac_hi[i](u_i)^T grad_{y_i} J_i(u_i, y)

    where ``grad_{y_i}`` differentiates in agent i's own measurement block.

    ``grad_ui_Ji`` and ``grad_yi_Ji`` are lists of callables ``(u_i, y)``;
    ``jac_hi`` a list of callables ``(u_i) -> (y_dims[i], agent_dims[i])``.
    """
    n = partition.n_agents
    if not (len(grad_ui_Ji) == len(grad_yi_Ji) == len(jac_hi) == n):
        raise ShapeError("one gradient/sensitivity per agent required")
    slices = partition.u_slices()

    def F(u, y):
        u = np.asarray(u, dtype=float)
        y = np.asarray(y, dtype=float)
        if u.shape != (partition.dim,):
            raise ShapeError(f"decision shape {u.shape}, expected ({partition.dim},)")
        out = np.empty(partition.dim)
        for i, sl in enumerate(slices):
            ui = u[sl]
            gu = np.atleast_1d(np.asarray(grad_ui_Ji[i](ui, y), dtype=float))
            gy = np.atleast_1d(np.asarray(grad_yi_Ji[i](ui, y), dtype=float))
            J = np.atleast_2d(np.asarray(jac_hi[i](ui), dtype=float))
            if J.shape != (gy.shape[0], ui.shape[0]):
                raise ShapeError(f"agent {i} sensitivity shape {J.shape} inconsistent")
            out[sl] = gu + J.T @ gy
        return out

    return F


def dist_to_interval_grad(y, lo, hi):
    """Half squared distance to ``[lo, hi]`` and its derivative, elementwise.

    Returns ``(value, grad)`` where ``value = 0.5 * dist(y, [lo, hi])^2``
    summed over components and ``grad`` has entries ``y - hi`` above the
    interval, ``y - lo`` below it, and 0 inside.
    """
    if np.any(np.asarray(lo) > np.asarray(hi)):
        raise InvalidInterval("interval lower bound exceeds upper bound")
    y = np.asarray(y, dtype=float)
    over = np.maximum(y - hi, 0.0)
    under = np.minimum(y - lo, 0.0)
    grad = over + under
    value = 0.5 * float(np.sum(grad * grad))
    return value, grad


def solve_offline(problem, h, gamma, tol=1e-10, max_iters=200_000, u0=None):
    """Solve the equilibrium problem for a frozen disturbance.

    Runs the forward-backward iteration

        u <- resolvent(u - gamma * F(u, h(u)), gamma)

    until the update norm drops below ``tol``.  ``h`` maps an input to the
    steady-state output at the frozen disturbance.  Raises NoConvergence if
    the budget runs out, and InvalidInterval for a nonpositive step.
    """
    if not (gamma > 0):
        raise InvalidInterval("step size must be positive")
    u = np.zeros(problem.dim) if u0 is None else np.asarray(u0, dtype=float).copy()
    if u.shape != (problem.dim,):
        raise ShapeError(f"initial point shape {u.shape}, expected ({problem.dim},)")
    for _ in range(max_iters):
        y = h(u)
        u_next = problem.resolvent(u - gamma * problem.F(u, y), gamma)
        if np.linalg.norm(u_next - u) <= tol:
            return u_next
        u = u_next
    raise NoConvergence(f"no fixed point within {max_iters} iterations (tol={tol})")
