"""Continuous-time plant models, disturbance signals, and decay probes.

A plant is a controlled ODE ``dx/dt = f(x, u, w(t))`` with measured output
``y = g(x, w)`` and a known steady-state map ``x_ss(u, w)`` satisfying
``f(x_ss(u, w), u, w) = 0`` for every admissible constant input.  The
steady-state rate certificate (a quadratic-bound Lyapunov function together
with a decay rate and a disturbance-rate gain) is the plant-side half of the
closed-loop stability certificates built elsewhere in the package.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .box import BoxSet
from .errors import (
    InputOutOfRange,
    IntegrationDiverged,
    InvalidInterval,
    InvalidSamplingPeriod,
    ShapeError,
)

# Finite-difference grid density used when a signal has no analytic derivative.
RATE_GRID_POINTS = 200


@dataclass
class PlantModel:
    """Controlled ODE with output map and known steady-state map.

    Parameters
    ----------
    state_dim, input_dim, disturbance_dim, output_dim : int
        Dimensions of x, u, w, y.
    dynamics : callable ``(x, u, w) -> dx/dt``
        Right-hand side of the ODE.  May be None for plants that only ever
        run through a user-supplied discrete step.
    output_map : callable ``(x, w) -> y``
    steady_state : callable ``(u, w) -> x_ss``
        Unique steady state reached under constant ``(u, w)``.
    input_set : BoxSet
        Admissible input region.
    """

    state_dim: int
    input_dim: int
    disturbance_dim: int
    output_dim: int
    dynamics: Optional[Callable]
    output_map: Callable
    steady_state: Callable
    input_set: BoxSet

    def __post_init__(self):
        for name in ("state_dim", "input_dim", "disturbance_dim", "output_dim"):
            if getattr(self, name) < 0:
                raise ShapeError(f"{name} must be nonnegative")
        if self.input_set.dim != self.input_dim:
            raise ShapeError("input_set dimension does not match input_dim")


@dataclass
class LyapunovCertificate:
    """Quadratic-bound decay certificate for the steady-state tracking error.

    Certifies that some V(x, u, w) satisfies, for constant admissible u,

        alpha1 * ||x - x_ss(u, w)||^2 <= V <= alpha2 * ||x - x_ss(u, w)||^2
        dV/dt <= -mu * V + sigma_c(||dw/dt||)

    together with Lipschitz bounds ell_g on the output map in x and ell_x on
    the steady-state map in u.  sigma_c must be a class-K function (zero at
    zero, strictly increasing).
    """

    mu: float
    alpha1: float
    alpha2: float
    ell_g: float
    ell_x: float
    sigma_c: Callable[[float], float]

    def __post_init__(self):
        if not (self.mu > 0):
            raise InvalidInterval("decay rate mu must be positive")
        if not (0 < self.alpha1 <= self.alpha2):
            raise InvalidInterval("need 0 < alpha1 <= alpha2")
        if self.ell_g < 0 or self.ell_x < 0:
            raise InvalidInterval("Lipschitz bounds must be nonnegative")
        z = self.sigma_c(0.0)
        if abs(z) > 1e-12:
            raise InvalidInterval("sigma_c(0) must be 0 for a class-K function")


class DisturbanceSignal:
    """Exogenous signal ``w(t)`` with an interval bound on ``||dw/dt||``.

    Parameters
    ----------
    value : callable ``t -> array (dim,)``
    dim : int
    derivative : callable ``t -> array (dim,)``, optional
        Analytic time derivative.  When absent, rate bounds fall back to
        dense finite differencing on RATE_GRID_POINTS points per interval.
    rate_bound : callable ``(t0, t1) -> float``, optional
        Exact supremum of ``||dw/dt||`` over ``[t0, t1]``; overrides the
        grid-based estimate.
    """

    def __init__(self, value, dim, derivative=None, rate_bound=None):
        self._value = value
        self.dim = int(dim)
        self._derivative = derivative
        self._rate_bound = rate_bound

    def __call__(self, t):
        v = np.atleast_1d(np.asarray(self._value(t), dtype=float))
        if v.shape != (self.dim,):
            raise ShapeError(f"signal returned shape {v.shape}, expected ({self.dim},)")
        return v

    def derivative(self, t):
        """Pointwise dw/dt; finite difference when no analytic form."""
        if self._derivative is not None:
            return np.atleast_1d(np.asarray(self._derivative(t), dtype=float))
        h = 1e-6
        return (self(t + h) - self(t - h)) / (2 * h)

    def rate_bound(self, t0, t1):
        """Upper bound on sup of ||dw/dt|| over [t0, t1]."""
        if t1 < t0:
            raise InvalidInterval("rate_bound interval has t1 < t0")
        if self.dim == 0:
            return 0.0
        if self._rate_bound is not None:
            return float(self._rate_bound(t0, t1))
        ts = np.linspace(t0, t1, RATE_GRID_POINTS)
        return float(max(np.linalg.norm(self.derivative(t)) for t in ts))


def constant_signal(value):
    """Signal frozen at ``value``; rate bound identically zero."""
    vec = np.atleast_1d(np.asarray(value, dtype=float))
    return DisturbanceSignal(
        lambda t: vec,
        vec.shape[0],
        derivative=lambda t: np.zeros_like(vec),
        rate_bound=lambda t0, t1: 0.0,
    )


def _sup_abs_cos(a, b):
    # max of |cos| over [a, b]: 1 if the interval contains a multiple of pi
    if b - a >= math.pi:
        return 1.0
    ka = math.ceil(a / math.pi)
    if ka * math.pi <= b:
        return 1.0
    return max(abs(math.cos(a)), abs(math.cos(b)))


def sinusoid_signal(offset, amplitude, omega, phase=None):
    """Componentwise sinusoid ``offset_i + amplitude_i * sin(omega_i t + phase_i)``.

    The rate bound is exact per component (supremum of the cosine factor on
    the interval) combined in the Euclidean norm, hence a valid upper bound
    on ``sup ||dw/dt||``.
    """
    offset = np.atleast_1d(np.asarray(offset, dtype=float))
    amplitude = np.broadcast_to(np.asarray(amplitude, dtype=float), offset.shape).copy()
    omega = np.broadcast_to(np.asarray(omega, dtype=float), offset.shape).copy()
    if phase is None:
        phase = np.zeros_like(offset)
    phase = np.broadcast_to(np.asarray(phase, dtype=float), offset.shape).copy()

    def value(t):
        return offset + amplitude * np.sin(omega * t + phase)

    def derivative(t):
        return amplitude * omega * np.cos(omega * t + phase)

    def rate_bound(t0, t1):
        sups = [
            abs(A * om) * (_sup_abs_cos(om * t0 + ph, om * t1 + ph) if om != 0 else 1.0)
            for A, om, ph in zip(amplitude, omega, phase)
        ]
        return float(np.linalg.norm(sups))

    return DisturbanceSignal(value, offset.shape[0], derivative, rate_bound)


def piecewise_constant_signal(times, values, rate_surrogate_time=0.1):
    """Right-continuous step signal through ``values[i]`` on ``[times[i], times[i+1])``.

    The derivative is zero away from the switch instants.  Because the jumps
    are instantaneous, the interval rate bound uses a finite surrogate: the
    largest jump magnitude inside the interval divided by
    ``rate_surrogate_time``, as if each switch were a ramp of that duration.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if len(times) != len(values):
        raise ShapeError("times and values must have equal length")
    if np.any(np.diff(times) <= 0):
        raise InvalidInterval("switch times must be strictly increasing")
    jumps = np.linalg.norm(np.diff(values, axis=0), axis=1)

    def value(t):
        i = int(np.searchsorted(times, t, side="right") - 1)
        i = min(max(i, 0), len(values) - 1)
        return values[i]

    def derivative(t):
        return np.zeros(values.shape[1])

    def rate_bound(t0, t1):
        # switches at times[1:], jump j happens at times[j+1]
        inside = (times[1:] > t0) & (times[1:] <= t1)
        if not np.any(inside):
            return 0.0
        return float(jumps[inside].max() / rate_surrogate_time)

    return DisturbanceSignal(value, values.shape[1], derivative, rate_bound)


def composite_signal(signals):
    """Stack several signals into one; rate bounds combine in quadrature."""
    dims = [s.dim for s in signals]
    total = int(sum(dims))

    def value(t):
        return np.concatenate([s(t) for s in signals])

    def derivative(t):
        return np.concatenate([s.derivative(t) for s in signals])

    def rate_bound(t0, t1):
        return float(np.linalg.norm([s.rate_bound(t0, t1) for s in signals]))

    return DisturbanceSignal(value, total, derivative, rate_bound)


def integrate_hold(plant, x0, u, w, t0, tau, substeps=50):
    """Integrate the plant over ``[t0, t0 + tau]`` under zero-order-held input.

    Classical fixed-step fourth-order Runge-Kutta with ``substeps`` steps; the
    disturbance signal is evaluated at the stage times, the input is held
    constant.  Raises IntegrationDiverged as soon as the state goes non-finite.

    Returns the state at ``t0 + tau``.
    """
    if not (tau > 0) or not math.isfinite(tau):
        raise InvalidSamplingPeriod(f"sampling period must be positive, got {tau}")
    if substeps < 1:
        raise InvalidSamplingPeriod("substeps must be at least 1")
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (plant.state_dim,):
        raise ShapeError(f"state shape {x.shape}, expected ({plant.state_dim},)")
    if plant.state_dim == 0:
        return x
    u = np.asarray(u, dtype=float)
    f = plant.dynamics
    h = tau / substeps
    t = t0
    for _ in range(substeps):
        w0 = w(t)
        wm = w(t + 0.5 * h)
        w1 = w(t + h)
        k1 = f(x, u, w0)
        k2 = f(x + 0.5 * h * k1, u, wm)
        k3 = f(x + 0.5 * h * k2, u, wm)
        k4 = f(x + h * k3, u, w1)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
        if not np.all(np.isfinite(x)):
            raise IntegrationDiverged(f"state went non-finite at t={t:.6g}")
    return x


def steady_output(plant, u, w_value):
    """Steady-state output ``g(x_ss(u, w), w)`` under constant input and disturbance.

    Raises InputOutOfRange when ``u`` is outside the admissible input set.
    """
    u = np.asarray(u, dtype=float)
    if not plant.input_set.contains(u):
        raise InputOutOfRange(f"input {u} outside admissible box")
    w_value = np.asarray(w_value, dtype=float)
    xss = plant.steady_state(u, w_value)
    return np.atleast_1d(np.asarray(plant.output_map(xss, w_value), dtype=float))


@dataclass
class DecayReport:
    """Result of an empirical Lyapunov decay probe.

    ``worst_margin`` is the largest observed value of
    ``dV/dt + mu V - sigma_c(||dw/dt||)``; positive means the certificate was
    violated at some probe point.  ``violations`` counts probe points whose
    margin exceeded the tolerance.
    """

    worst_margin: float
    violations: int
    evaluations: int
    tolerance: float


def probe_lyapunov_decay(
    plant,
    certificate,
    V,
    trials=20,
    w=None,
    horizon=None,
    substeps=40,
    samples_per_trial=60,
    perturbation=1.0,
    rng=None,
    tolerance=1e-6,
):
    """Empirically test the decay inequality along constant-input trajectories.

    For each trial an admissible input is drawn, the state starts at a random
    perturbation of the steady state, and the plant is integrated while V is
    sampled on a uniform grid.  dV/dt is estimated by central differences and
    checked against ``-mu V + sigma_c(||dw/dt||)``.

    Returns a DecayReport; a sound certificate gives zero violations.
    """
    rng = np.random.default_rng(rng)
    if w is None:
        w = constant_signal(np.zeros(plant.disturbance_dim))
    if horizon is None:
        horizon = 2.0 / certificate.mu
    n_grid = samples_per_trial
    dt = horizon / (n_grid - 1)
    worst = -math.inf
    violations = 0
    evaluations = 0
    for _ in range(trials):
        u = plant.input_set.sample(rng)
        w0 = w(0.0)
        xss = np.asarray(plant.steady_state(u, w0), dtype=float)
        x = xss + perturbation * rng.standard_normal(plant.state_dim)
        vals = np.empty(n_grid)
        rates = np.empty(n_grid)
        t = 0.0
        for i in range(n_grid):
            wt = w(t)
            vals[i] = V(x, u, wt)
            rates[i] = float(np.linalg.norm(w.derivative(t)))
            if i < n_grid - 1:
                x = integrate_hold(plant, x, u, w, t, dt, substeps)
                t += dt
        dV = np.gradient(vals, dt)
        for i in range(1, n_grid - 1):
            margin = dV[i] + certificate.mu * vals[i] - certificate.sigma_c(rates[i])
            worst = max(worst, margin)
            evaluations += 1
            if margin > tolerance:
                violations += 1
    return DecayReport(float(worst), violations, evaluations, tolerance)


def estimate_lipschitz(fn, sampler, pairs=500, rng=None):
    """Empirical Lipschitz constant of ``fn`` from random pairs.

    ``sampler(rng)`` must return one input point.  Returns the largest
    observed ratio ||fn(a) - fn(b)|| / ||a - b||.  A sampling-based lower
    estimate: scale up before using it as a certified constant.
    """
    rng = np.random.default_rng(rng)
    worst = 0.0
    for _ in range(pairs):
        a = sampler(rng)
        b = sampler(rng)
        den = np.linalg.norm(np.atleast_1d(a - b))
        if den < 1e-12:
            continue
        num = np.linalg.norm(np.atleast_1d(fn(a) - fn(b)))
        worst = max(worst, num / den)
    return float(worst)
