"""Randomized plant families whose certificate constants are exact.

Each generated instance couples a stable plant with a quadratic
steady-state optimization problem; every constant in its certificate bundle
is derived in closed form from the instance's own matrices, so certificate
checks run with zero estimation slack.  The module also ships a resonant
second-order family whose certifiable sampling periods are enormous,
including one frozen configuration that destabilizes the loop when sampled
aggressively.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from ..algorithms import AlgorithmOperator, prox_grad_operator
from ..box import BoxSet
from ..certificates import CertificateBundle, eps_max
from ..equilibrium import EquilibriumProblem, box_resolvent
from ..plant import LyapunovCertificate, PlantModel


@dataclass
class SyntheticInstance:
    """A plant, problem, and operator triple with exact certificate data.

    ``lyapunov`` evaluates the instance's quadratic Lyapunov function
    ``V(x, u, w)``; ``u_star`` maps a frozen disturbance value to the exact
    equilibrium input (direct linear solve, independent of the fixed-point
    oracle).
    """

    plant: PlantModel
    problem: EquilibriumProblem
    operator: AlgorithmOperator
    certificate: LyapunovCertificate
    bundle: CertificateBundle
    lyapunov: Callable
    u_star: Callable
    tau: float
    eps: float


def _spectral_norm(A):
    return float(np.linalg.norm(A, 2))


def first_order_instance(rng, state_dim=3, input_dim=2, disturbance_dim=2,
                         cw_range=(0.25, 0.75)):
    """Diagonal first-order plant with a quadratic tracking objective.

    Dynamics: each state relaxes toward a linear mix of the input and the
    disturbance at its own rate.  The steady-state map is exactly linear, so
    the decay rate, quadratic Lyapunov bounds, disturbance-rate gain, and
    solution-map Lipschitz constant all come out of small eigenvalue
    computations rather than sampling.  The sampling period is chosen so
    the per-interval decay factor lands in ``cw_range``, and the relaxation
    gain sits at half the certifiable ceiling.
    """
    lam = rng.uniform(0.5, 3.0, size=state_dim)
    G = rng.normal(size=(state_dim, input_dim)) / math.sqrt(state_dim)
    E = rng.normal(size=(state_dim, disturbance_dim)) / math.sqrt(state_dim)
    q = rng.uniform(1.0, 4.0, size=state_dim)
    Lam = np.diag(lam)

    def dynamics(x, u, w):
        return -Lam @ (x - G @ u - E @ w)

    def steady_state(u, w):
        return G @ np.asarray(u, dtype=float) + E @ np.asarray(w, dtype=float)

    box = BoxSet.cube(input_dim, -50.0, 50.0)
    plant = PlantModel(
        state_dim=state_dim,
        input_dim=input_dim,
        disturbance_dim=disturbance_dim,
        output_dim=state_dim,
        dynamics=dynamics,
        output_map=lambda x, w: np.asarray(x, dtype=float),
        steady_state=steady_state,
        input_set=box,
    )

    # V = (x - xss)' Q (x - xss) with diagonal Q: along a held-input flow,
    # dV/dt = -2 sum q_i lam_i d_i^2 - 2 d' Q E wdot; splitting the cross
    # term at half the raw decay leaves mu = min(lam) and a quadratic rate
    # gain with coefficient |Q^(1/2) E|^2 / mu
    Q = np.diag(q)
    mu = float(lam.min())
    alpha1 = float(q.min())
    alpha2 = float(q.max())
    rate_gain = _spectral_norm(np.sqrt(Q) @ E) ** 2 / mu
    certificate = LyapunovCertificate(
        mu=mu,
        alpha1=alpha1,
        alpha2=alpha2,
        ell_g=1.0,
        ell_x=_spectral_norm(G),
        sigma_c=lambda z: rate_gain * z * z,
    )

    def lyapunov(x, u, w):
        d = np.asarray(x, float) - steady_state(u, w)
        return float(d @ (q * d))

    # tracking objective: input effort plus a quadratic pull of the
    # measured state toward a reference profile
    R = np.diag(rng.uniform(0.5, 2.0, size=input_dim))
    rho = float(rng.uniform(0.2, 1.0))
    y_ref = rng.normal(size=state_dim)
    H_comp = R + rho * G.T @ G
    eigs = np.linalg.eigvalsh(H_comp)
    m, ell = float(eigs[0]), float(eigs[-1])

    def F(u, y):
        return R @ np.asarray(u, float) + rho * G.T @ (np.asarray(y, float) - y_ref)

    solve_mat = np.linalg.inv(H_comp)

    def u_star(w):
        return solve_mat @ (rho * G.T @ (y_ref - E @ np.asarray(w, float)))

    problem = EquilibriumProblem(
        dim=input_dim,
        F=F,
        resolvent=box_resolvent(box),
        lipschitz_F=ell,
        strong_monotonicity=m,
        lipschitz_solution=_spectral_norm(solve_mat @ (rho * G.T @ E)),
        lipschitz_F_output=rho * _spectral_norm(G),
    )
    op = prox_grad_operator(problem, gamma=m / ell**2)
    bundle = CertificateBundle.from_parts(certificate, problem, op)

    cw_target = rng.uniform(*cw_range)
    tau = 2.0 * math.log(math.sqrt(alpha2 / alpha1) / cw_target) / mu
    eps = 0.5 * min(1.0, eps_max(bundle, tau))
    return SyntheticInstance(
        plant=plant,
        problem=problem,
        operator=op,
        certificate=certificate,
        bundle=bundle,
        lyapunov=lyapunov,
        u_star=u_star,
        tau=tau,
        eps=eps,
    )


def resonant_instance(omega=2.0 * math.pi, damping=0.02, w_gain=0.15,
                      effort_weight=1.0, tracking_weight=40.0, gamma_scale=0.9,
                      y_ref=1.0):
    """Lightly damped second-order plant tracking a scalar reference.

    Position relaxes (slowly, through a resonance at ``omega``) toward the
    held input plus a disturbance offset.  The objective trades input effort
    against the measured position error.  Offline, the returned operator
    contracts comfortably; the certificate is honest and yields a minimum
    certifiable sampling period on the order of the resonance decay time,
    which is orders of magnitude above the resonance period itself.
    """
    A = np.array([[0.0, 1.0], [-omega**2, -2.0 * damping * omega]])

    def dynamics(x, u, w):
        x = np.asarray(x, float)
        target = float(np.atleast_1d(u)[0]) + w_gain * float(np.atleast_1d(w)[0])
        return np.array([x[1], -omega**2 * (x[0] - target) - 2.0 * damping * omega * x[1]])

    def steady_state(u, w):
        target = float(np.atleast_1d(u)[0]) + w_gain * float(np.atleast_1d(w)[0])
        return np.array([target, 0.0])

    box = BoxSet.cube(1, -1e6, 1e6)
    plant = PlantModel(
        state_dim=2,
        input_dim=1,
        disturbance_dim=1,
        output_dim=1,
        dynamics=dynamics,
        output_map=lambda x, w: np.atleast_1d(float(np.asarray(x, float)[0])),
        steady_state=steady_state,
        input_set=box,
    )

    # V = d' P d with A'P + PA = -I gives dV/dt = -|d|^2 along held flows;
    # the disturbance moves the equilibrium through the first coordinate,
    # and splitting the cross term at half the raw decay halves mu
    P = scipy.linalg.solve_continuous_lyapunov(A.T, -np.eye(2))
    ew = np.linalg.eigvalsh(P)
    lam_min_P, lam_max_P = float(ew[0]), float(ew[-1])
    mu = 1.0 / (2.0 * lam_max_P)
    cross = 2.0 * _spectral_norm(P[:, :1]) * w_gain
    rate_gain = cross**2 / 2.0
    certificate = LyapunovCertificate(
        mu=mu,
        alpha1=lam_min_P,
        alpha2=lam_max_P,
        ell_g=1.0,
        ell_x=1.0,
        sigma_c=lambda z: rate_gain * z * z,
    )

    def lyapunov(x, u, w):
        d = np.asarray(x, float) - steady_state(u, w)
        return float(d @ P @ d)

    m = effort_weight + tracking_weight

    def F(u, y):
        u0 = float(np.atleast_1d(u)[0])
        y0 = float(np.atleast_1d(y)[0])
        return np.array([effort_weight * u0 + tracking_weight * (y0 - y_ref)])

    def u_star(w):
        w0 = float(np.atleast_1d(w)[0])
        return np.array([tracking_weight * (y_ref - w_gain * w0) / m])

    problem = EquilibriumProblem(
        dim=1,
        F=F,
        resolvent=box_resolvent(box),
        lipschitz_F=m,
        strong_monotonicity=m,
        lipschitz_solution=tracking_weight * w_gain / m,
        lipschitz_F_output=tracking_weight,
    )
    op = prox_grad_operator(problem, gamma=gamma_scale / m)
    bundle = CertificateBundle.from_parts(certificate, problem, op)
    return SyntheticInstance(
        plant=plant,
        problem=problem,
        operator=op,
        certificate=certificate,
        bundle=bundle,
        lyapunov=lyapunov,
        u_star=u_star,
        tau=0.5,
        eps=1.0,
    )


def instability_instance():
    """Frozen configuration that destabilizes the sampled loop.

    The plant resonates at exactly twice the sampling rate, so each input
    step is re-measured near the peak of its transient overshoot; with an
    aggressive tracking weight and full relaxation the loop gain exceeds
    one and the input error grows geometrically, even though the same
    operator converges offline.  The certificate correctly refuses this
    sampling period by a factor of about a thousand.
    """
    inst = resonant_instance(omega=2.0 * math.pi, damping=0.02, w_gain=0.15,
                             effort_weight=1.0, tracking_weight=40.0,
                             gamma_scale=0.9)
    return inst
