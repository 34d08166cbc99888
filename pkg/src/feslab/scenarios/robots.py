"""Planar mobile-agent coordination game on stabilized unicycles.

Four wheeled agents each receive a position command, chase it with a
classical nonlinear inner loop (forward speed proportional to range times
the cosine of the heading error, steering that damps the heading error),
and measure everyone's position.  The decision layer plays a quadratic
game: each agent wants to sit on its own signal source yet stay close to
the group.  Because the inner loop parks every agent exactly on its
command, the steady-state input-to-output map is the identity, and the
game's unique equilibrium has a closed form whenever the admissible boxes
are inactive.

The shipped certificate constants describe the position-error subsystem
on the small-heading-error region (|heading error| <= pi/4): forward
progress degrades with the cosine squared of the heading error, which is
at least one half there, while the heading error itself decays at the
steering gain regardless of position.  The resulting sufficient condition
is conservative for this loop: the simulated game converges at full
relaxation gain even though the certified ceiling is far smaller.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..algorithms import AlgorithmOperator, best_response_operator
from ..box import BoxSet
from ..certificates import CertificateBundle
from ..equilibrium import (
    EquilibriumProblem,
    GamePartition,
    box_resolvent,
    game_pseudo_gradient,
    solve_offline,
)
from ..errors import ConfigError
from ..plant import LyapunovCertificate, PlantModel

DEFAULT_TARGETS = 4.0 * np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])

# below this range the bearing to the commanded point is numerically
# meaningless; the agent is parked and both loop inputs are zeroed
PARK_RADIUS = 1e-9


@dataclass
class RobotScenario:
    """Parameters of the coordination game and its inner loop.

    ``targets`` is an (N, 2) array of signal-source locations, one per
    agent.  ``k1``/``k2`` are the range and steering gains of the inner
    loop, ``coupling`` the weight on pairwise distances in each agent's
    cost, and ``box_low``/``box_high`` the per-agent admissible rectangle.
    ``tau``/``eps`` are the shipped loop parameters.
    """

    targets: np.ndarray = field(default_factory=lambda: DEFAULT_TARGETS.copy())
    k1: float = 1.0
    k2: float = 0.5
    coupling: float = 0.25
    box_low: tuple = (-5.0, -6.0)
    box_high: tuple = (10.0, 6.0)
    tau: float = 0.5
    eps: float = 1.0

    def __post_init__(self):
        self.targets = np.asarray(self.targets, dtype=float)
        if self.targets.ndim != 2 or self.targets.shape[1] != 2:
            raise ConfigError(f"targets must be (N, 2), got {self.targets.shape}")
        if self.n_agents < 1:
            raise ConfigError("need at least one agent")
        if self.k1 <= 0 or self.k2 <= 0:
            raise ConfigError("inner-loop gains must be positive")
        if self.coupling < 0:
            raise ConfigError("coupling weight must be nonnegative")
        lo, hi = np.asarray(self.box_low, float), np.asarray(self.box_high, float)
        if lo.shape != (2,) or hi.shape != (2,):
            raise ConfigError("box corners must be planar points")
        if np.any(self.targets <= lo) or np.any(self.targets >= hi):
            raise ConfigError("every target must lie strictly inside the box")

    @property
    def n_agents(self):
        return self.targets.shape[0]

    def agent_box(self):
        return BoxSet(np.asarray(self.box_low, float), np.asarray(self.box_high, float))

    def stacked_box(self):
        lo = np.tile(np.asarray(self.box_low, float), self.n_agents)
        hi = np.tile(np.asarray(self.box_high, float), self.n_agents)
        return BoxSet(lo, hi)


def _wrap_angle(a):
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def heading_error(state_i, command_i):
    """Wrapped angle between an agent's heading and the bearing to its command."""
    dx = command_i[0] - state_i[0]
    dy = command_i[1] - state_i[1]
    if math.hypot(dx, dy) < PARK_RADIUS:
        return 0.0
    return _wrap_angle(state_i[2] - math.atan2(dy, dx))


def unicycle_plant(scn):
    """Stacked unicycles under the range/bearing inner loop.

    State per agent is (a, b, heading); the input is the stacked position
    command.  The inner loop chooses forward speed ``k1 * range * cos(err)``
    and steering ``-k1 cos(err) sin(err) - k2 err``, which parks the agent
    on its command, so the steady state pins positions to the command.
    Headings have no preferred rest value; the steady-state map reports
    them as zero.  The disturbance channel is a scalar placeholder that
    never enters the dynamics.
    """
    n = scn.n_agents
    k1, k2 = scn.k1, scn.k2

    def dynamics(x, u, w):
        x = np.asarray(x, dtype=float).reshape(n, 3)
        u = np.asarray(u, dtype=float).reshape(n, 2)
        dx = np.empty((n, 3))
        for i in range(n):
            a, b, th = x[i]
            err = heading_error(x[i], u[i])
            rng_to_cmd = math.hypot(u[i, 0] - a, u[i, 1] - b)
            v = k1 * rng_to_cmd * math.cos(err)
            steer = -k1 * math.cos(err) * math.sin(err) - k2 * err
            dx[i] = (v * math.cos(th), v * math.sin(th), steer)
        return dx.ravel()

    def output_map(x, w):
        return np.asarray(x, dtype=float).reshape(n, 3)[:, :2].ravel()

    def steady_state(u, w):
        xss = np.zeros((n, 3))
        xss[:, :2] = np.asarray(u, dtype=float).reshape(n, 2)
        return xss.ravel()

    return PlantModel(
        state_dim=3 * n,
        input_dim=2 * n,
        disturbance_dim=1,
        output_dim=2 * n,
        dynamics=dynamics,
        output_map=output_map,
        steady_state=steady_state,
        input_set=scn.stacked_box(),
    )


def coordination_game(scn):
    """Quadratic coordination game over measured absolute positions.

    Agent i minimizes ``||u_i - target_i||^2 + coupling * sum_j ||r_i - r_j||^2``
    with the pairwise term read from the measured positions.  The stacked
    stationarity map evaluated on the identity steady-state map is linear
    with extreme curvatures 2 and ``2 + 2 * coupling * N``.
    """
    n = scn.n_agents
    c = scn.coupling
    box = scn.agent_box()
    partition = GamePartition(agent_dims=[2] * n, boxes=[box] * n)
    slices = partition.u_slices()
    eye2 = np.eye(2)

    def grad_u(i):
        return lambda ui, y: 2.0 * (ui - scn.targets[i])

    def grad_y(i):
        def g(ui, y):
            pos = np.asarray(y, float).reshape(n, 2)
            return 2.0 * c * ((n - 1) * pos[i] - (pos.sum(axis=0) - pos[i]))

        return g

    F = game_pseudo_gradient(
        partition,
        [grad_u(i) for i in range(n)],
        [grad_y(i) for i in range(n)],
        [lambda ui: eye2 for _ in range(n)],
    )
    m = 2.0
    ell = 2.0 + 2.0 * c * n
    problem = EquilibriumProblem(
        dim=2 * n,
        F=F,
        resolvent=box_resolvent(scn.stacked_box()),
        lipschitz_F=ell,
        strong_monotonicity=m,
        lipschitz_solution=0.0,
        lipschitz_F_output=2.0 * c * n,
    )
    return problem, partition, slices


def best_response(scn, partition):
    """Exact per-agent minimizer given everyone's measured position.

    The local cost is isotropic, so the constrained minimizer is the box
    projection of ``(target_i + coupling * sum_{j != i} r_j) / (1 + coupling (N-1))``.
    Both the fixed-measurement composed contraction and the measurement
    sensitivity equal ``coupling (N-1) / (1 + coupling (N-1))``.
    """
    n = scn.n_agents
    c = scn.coupling
    denom = 1.0 + c * (n - 1)
    box = scn.agent_box()

    def solver(i):
        def solve(y):
            pos = np.asarray(y, float).reshape(n, 2)
            others = pos.sum(axis=0) - pos[i]
            return box.project((scn.targets[i] + c * others) / denom)

        return solve

    gain = c * (n - 1) / denom
    return best_response_operator(partition, [solver(i) for i in range(n)],
                                  c_T=gain, ell_T=gain)


def nash_equilibrium(scn):
    """Stacked game equilibrium; closed form when the boxes stay inactive."""
    n = scn.n_agents
    c = scn.coupling
    total = scn.targets.sum(axis=0)
    free = (scn.targets + c * total) / (1.0 + c * n)
    if all(scn.agent_box().contains(free[i]) for i in range(n)):
        return free.ravel()
    problem, _, _ = coordination_game(scn)
    gamma = problem.strong_monotonicity / problem.lipschitz_F**2
    return solve_offline(problem, lambda u: u, gamma, tol=1e-12)


def robot_certificate(scn):
    """Position-error decay certificate for the parked-command inner loop.

    Valid on the small-heading-error region: there the squared position
    error decays at rate ``k1`` while heading errors decay at ``2 k2`` on
    their own.  No disturbance enters, so the rate gain is zero.
    """
    mu = 2.0 * scn.k1 * math.cos(math.pi / 4.0) ** 2
    return LyapunovCertificate(
        mu=mu,
        alpha1=1.0,
        alpha2=1.0,
        ell_g=1.0,
        ell_x=1.0,
        sigma_c=lambda z: 0.0,
    )


def robot_bundle(scn):
    """Certificate constants for the coordination loop's comparison matrix."""
    op_gain = scn.coupling * (scn.n_agents - 1) / (1.0 + scn.coupling * (scn.n_agents - 1))
    cert = robot_certificate(scn)
    return CertificateBundle(
        mu=cert.mu,
        alpha1=1.0,
        alpha2=1.0,
        ell_g=1.0,
        ell_x=1.0,
        ell_u_star=0.0,
        c_T=op_gain,
        ell_T=op_gain,
        sigma_c=lambda z: 0.0,
    )


def position_lyapunov(scn):
    """Squared position error of every agent against its command."""
    n = scn.n_agents

    def V(x, u, w):
        pos = np.asarray(x, float).reshape(n, 3)[:, :2]
        cmd = np.asarray(u, float).reshape(n, 2)
        return float(np.sum((pos - cmd) ** 2))

    return V


def relative_outputs(scn, positions):
    """Per-agent stacked offsets: own target error, then offsets to each peer.

    This is the information structure each agent actually consumes: its
    own distance to the assigned source and its displacement from every
    other agent, reconstructed from the measured absolute positions.
    """
    n = scn.n_agents
    pos = np.asarray(positions, float).reshape(n, 2)
    rows = []
    for i in range(n):
        rows.append(pos[i] - scn.targets[i])
        for j in range(n):
            if j != i:
                rows.append(pos[i] - pos[j])
    return np.concatenate(rows)


def build_robots(scn=None):
    """Assemble the plant, game problem, and best-response operator."""
    if scn is None:
        scn = RobotScenario()
    plant = unicycle_plant(scn)
    problem, partition, _ = coordination_game(scn)
    op = best_response(scn, partition)
    return plant, problem, op
