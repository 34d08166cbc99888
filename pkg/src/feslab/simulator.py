"""Closed-loop runners, trajectory logging, and certificate checkers.

The sampled-data loop interleaves plant flow and input updates in a fixed
event order at each sample instant: measure the output first, then update
the input through the relaxed operator step, then hold the new input over
the next interval.  With the state logged at sample k, the recursion is

    x[k+1] = flow of the plant over one interval under held u[k]
    y[k+1] = g(x[k+1], w(t[k+1]))
    u[k+1] = (1 - eps) u[k] + eps T(u[k], y[k+1])

Every run produces a TrajectoryLog whose rows carry the sampled state,
input, measurement, disturbance, the tracking errors against the frozen
equilibrium oracle, and optionally the Lyapunov magnitude and the certified
error envelope.  Logs serialize to a self-describing CSV that is
byte-identical across reruns with the same inputs.
"""

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .algorithms import relaxed_step
from .certificates import asymptotic_gain, c_w, is_certified, iss_envelope
from .equilibrium import solve_offline
from .errors import (
    InputOutOfRange,
    IntegrationDiverged,
    InvalidInterval,
    InvalidSamplingPeriod,
    OutsideCertifiedRegion,
    RelaxationOutOfRange,
    ShapeError,
)
from .plant import PlantModel, integrate_hold, steady_output

ORACLE_TOL = 1e-10


@dataclass
class ClosedLoopConfig:
    """Sampling period, relaxation gain, horizon, and initial conditions."""

    tau: float
    eps: float
    horizon: int
    u0: np.ndarray
    x0: np.ndarray
    substeps: int = 50
    t0: float = 0.0
    log_intersample: bool = False

    def __post_init__(self):
        if not (self.tau > 0) or not math.isfinite(self.tau):
            raise InvalidSamplingPeriod(f"sampling period must be positive, got {self.tau}")
        if not (0 < self.eps <= 1):
            raise RelaxationOutOfRange(f"relaxation gain must be in (0, 1], got {self.eps}")
        if self.horizon < 1:
            raise InvalidInterval("horizon must be at least one sample")
        if self.substeps < 1:
            raise InvalidSamplingPeriod("substeps must be at least 1")
        self.u0 = np.atleast_1d(np.asarray(self.u0, dtype=float))
        self.x0 = np.atleast_1d(np.asarray(self.x0, dtype=float)) if np.size(self.x0) else np.asarray(
            self.x0, dtype=float
        ).reshape(0)


def _fmt(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


@dataclass
class TrajectoryLog:
    """Per-sample record of one closed-loop run.

    Arrays are indexed by sample; optional diagnostics are NaN-filled when
    the data needed to compute them was not supplied to the runner.
    ``intersample`` holds dense ``(t, y)`` pairs per interval when requested.
    """

    t: np.ndarray
    x: np.ndarray
    u: np.ndarray
    y: np.ndarray
    w: np.ndarray
    z: np.ndarray
    tau: float
    eps: float
    u_star: Optional[np.ndarray] = None
    y_star: Optional[np.ndarray] = None
    du_norm: Optional[np.ndarray] = None
    dx_norm: Optional[np.ndarray] = None
    dy_norm: Optional[np.ndarray] = None
    W: Optional[np.ndarray] = None
    envelope: Optional[np.ndarray] = None
    intersample: Optional[List[np.ndarray]] = None

    @property
    def samples(self):
        return len(self.t)

    def _column(self, name):
        col = getattr(self, name)
        if col is None:
            return np.full(self.samples, np.nan)
        return col

    def header(self):
        cols = ["t", "k"]
        cols += [f"x_{i}" for i in range(self.x.shape[1])]
        cols += [f"u_{i}" for i in range(self.u.shape[1])]
        cols += [f"y_{i}" for i in range(self.y.shape[1])]
        cols += [f"w_{i}" for i in range(self.w.shape[1])]
        cols += ["du_norm", "dx_norm", "dy_norm", "W", "envelope", "z"]
        return cols

    def to_csv(self, path):
        """Write the log as a self-describing CSV.

        One row per sample; dense inter-sample measurements, when present,
        appear in time order flagged with ``k = -1`` and carry only ``t``
        and the output columns.  Dot decimal separator, ``\\n`` line ends,
        byte-identical across reruns of the same configuration.
        """
        du = self._column("du_norm")
        dx = self._column("dx_norm")
        dy = self._column("dy_norm")
        W = self._column("W")
        env = self._column("envelope")
        nx, nu, ny, nw = (a.shape[1] for a in (self.x, self.u, self.y, self.w))
        lines = [",".join(self.header())]
        for k in range(self.samples):
            row = [_fmt(self.t[k]), str(k)]
            row += [_fmt(v) for v in self.x[k]]
            row += [_fmt(v) for v in self.u[k]]
            row += [_fmt(v) for v in self.y[k]]
            row += [_fmt(v) for v in self.w[k]]
            row += [_fmt(du[k]), _fmt(dx[k]), _fmt(dy[k]), _fmt(W[k]), _fmt(env[k]), _fmt(self.z[k])]
            lines.append(",".join(row))
            if self.intersample is not None and k < len(self.intersample):
                for trow in self.intersample[k]:
                    row = [_fmt(trow[0]), "-1"]
                    row += [""] * (nx + nu)
                    row += [_fmt(v) for v in trow[1:]]
                    row += [""] * nw
                    row += ["", "", "", "", "", ""]
                    lines.append(",".join(row))
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")


def hold_state_plant(h, input_set, disturbance_dim=1, output_dim=None):
    """Plant whose state is the last held input: models a static map y = h(u, w).

    A memoryless input-output relation has no continuous-time realization
    inside the measure-update-hold loop, so it is run through
    ``run_discrete`` with ``hold_state_step``: the state stored at sample
    k+1 is the input held over the elapsed interval, and the measurement is
    ``h`` of that input at the new disturbance.
    """
    n = input_set.dim
    if output_dim is None:
        probe = np.atleast_1d(h(input_set.center, np.zeros(disturbance_dim)))
        output_dim = probe.shape[0]
    return PlantModel(
        state_dim=n,
        input_dim=n,
        disturbance_dim=disturbance_dim,
        output_dim=output_dim,
        dynamics=None,
        output_map=lambda x, w: np.atleast_1d(h(x, w)),
        steady_state=lambda u, w: np.asarray(u, dtype=float),
        input_set=input_set,
    )


def hold_state_step(x, u, w, k):
    """Discrete step for hold-state plants: next state is the held input."""
    return np.asarray(u, dtype=float).copy()


def _run_loop(plant, op, w, cfg, plant_step, problem, lyapunov, bundle, oracle_gamma):
    if cfg.u0.shape != (plant.input_dim,):
        raise ShapeError(f"u0 shape {cfg.u0.shape}, expected ({plant.input_dim},)")
    if cfg.x0.shape != (plant.state_dim,):
        raise ShapeError(f"x0 shape {cfg.x0.shape}, expected ({plant.state_dim},)")
    if not plant.input_set.contains(cfg.u0):
        raise InputOutOfRange("initial input outside admissible box")
    if w.dim != plant.disturbance_dim:
        raise ShapeError(
            f"disturbance signal dim {w.dim}, plant expects {plant.disturbance_dim}"
        )

    K = cfg.horizon
    nx, nu, ny, nw = plant.state_dim, plant.input_dim, plant.output_dim, plant.disturbance_dim
    t = cfg.t0 + cfg.tau * np.arange(K + 1)
    xs = np.empty((K + 1, nx))
    us = np.empty((K + 1, nu))
    ys = np.empty((K + 1, ny))
    ws = np.empty((K + 1, nw))
    zs = np.empty(K + 1)

    xs[0] = cfg.x0
    us[0] = cfg.u0
    ws[0] = w(t[0])
    ys[0] = np.atleast_1d(plant.output_map(xs[0], ws[0]))
    collect_inter = cfg.log_intersample and plant_step is None and plant.dynamics is not None
    intersample = [] if collect_inter else None

    for k in range(K):
        try:
            if plant_step is not None:
                x_next = np.asarray(plant_step(xs[k], us[k], w, k), dtype=float)
                if not np.all(np.isfinite(x_next)):
                    raise IntegrationDiverged("discrete step returned non-finite state")
            elif collect_inter:
                # integrate one substep at a time to expose intermediate outputs
                x_next = xs[k].copy()
                h_sub = cfg.tau / cfg.substeps
                rows = np.empty((cfg.substeps - 1, 1 + ny))
                for j in range(cfg.substeps):
                    x_next = integrate_hold(plant, x_next, us[k], w, t[k] + j * h_sub, h_sub, 1)
                    if j < cfg.substeps - 1:
                        tj = t[k] + (j + 1) * h_sub
                        rows[j, 0] = tj
                        rows[j, 1:] = np.atleast_1d(plant.output_map(x_next, w(tj)))
                intersample.append(rows)
            else:
                x_next = integrate_hold(plant, xs[k], us[k], w, t[k], cfg.tau, cfg.substeps)
        except IntegrationDiverged as exc:
            raise IntegrationDiverged(str(exc), sample_index=k) from None
        xs[k + 1] = x_next
        ws[k + 1] = w(t[k + 1])
        ys[k + 1] = np.atleast_1d(plant.output_map(xs[k + 1], ws[k + 1]))
        us[k + 1] = relaxed_step(op, cfg.eps, us[k], ys[k + 1])
        if not plant.input_set.contains(us[k + 1]):
            raise InputOutOfRange(f"operator left the admissible box at sample {k + 1}")

    for k in range(K + 1):
        zs[k] = w.rate_bound(t[k], t[k] + cfg.tau)

    log = TrajectoryLog(t=t, x=xs, u=us, y=ys, w=ws, z=zs, tau=cfg.tau, eps=cfg.eps,
                        intersample=intersample)

    # tracking errors against the plant's own steady-state map
    if nx:
        dxn = np.empty(K + 1)
        for k in range(K + 1):
            xss = np.asarray(plant.steady_state(us[k], ws[k]), dtype=float)
            dxn[k] = np.linalg.norm(xs[k] - xss)
        log.dx_norm = dxn

    # equilibrium oracle: frozen-disturbance solve per sample, warm-started
    if problem is not None:
        gamma = oracle_gamma
        if gamma is None:
            gamma = problem.strong_monotonicity / problem.lipschitz_F**2
        ustars = np.empty((K + 1, nu))
        ystars = np.empty((K + 1, ny))
        guess = us[0]
        for k in range(K + 1):
            wk = ws[k]
            ustars[k] = solve_offline(
                problem,
                lambda uu, wk=wk: steady_output(plant, uu, wk),
                gamma,
                tol=ORACLE_TOL,
                u0=guess,
            )
            guess = ustars[k]
            ystars[k] = steady_output(plant, ustars[k], wk)
        log.u_star = ustars
        log.y_star = ystars
        log.du_norm = np.linalg.norm(us - ustars, axis=1)
        log.dy_norm = np.linalg.norm(ys - ystars, axis=1)

    if lyapunov is not None:
        Wvals = np.empty(K + 1)
        for k in range(K + 1):
            Wvals[k] = math.sqrt(max(float(lyapunov(xs[k], us[k], ws[k])), 0.0))
        log.W = Wvals

    if bundle is not None and log.du_norm is not None and log.dx_norm is not None:
        if is_certified(bundle, cfg.tau, cfg.eps):
            env = np.empty(K + 1)
            zsup = 0.0
            initial = (log.dx_norm[0], log.du_norm[0])
            for k in range(K + 1):
                env[k] = iss_envelope(bundle, cfg.tau, cfg.eps, initial, zsup, k)
                zsup = max(zsup, zs[k])
            log.envelope = env
    return log


def run_sampled_data(plant, op, w, cfg, problem=None, lyapunov=None, bundle=None,
                     oracle_gamma=None):
    """Run the sampled-data loop with the continuous plant flowing between samples.

    ``problem`` enables the per-sample equilibrium oracle (error columns),
    ``lyapunov`` the sqrt-Lyapunov column, and ``bundle`` the certified error
    envelope (filled only when (tau, eps) is certified).  Raises
    IntegrationDiverged with the failing sample index if the state leaves
    the finite range.
    """
    if plant.dynamics is None:
        raise ShapeError("plant has no continuous dynamics; use run_discrete with a step")
    return _run_loop(plant, op, w, cfg, None, problem, lyapunov, bundle, oracle_gamma)


def run_discrete(plant, op, w, cfg, plant_step=None, problem=None, lyapunov=None,
                 bundle=None, oracle_gamma=None):
    """Run the loop with a user-supplied discrete flow ``plant_step(x, u, w, k)``.

    With ``plant_step=None`` the exact sampled flow (fixed-step integration
    of the continuous dynamics) is used, reproducing ``run_sampled_data``
    sample for sample.
    """
    return _run_loop(plant, op, w, cfg, plant_step, problem, lyapunov, bundle, oracle_gamma)


@dataclass
class Lemma1Report:
    """Margins of the per-interval sqrt-Lyapunov recursion.

    At each sample the recursion bounds the next sqrt-Lyapunov value by
    ``c_w W_k + c_w ell_W ||u_{k+1} - u_k|| + sqrt(tau) sigma(z_k)``; the
    margin is that bound minus the measured ``W_{k+1}`` (negative =
    violation).
    """

    margins: np.ndarray
    worst_margin: float
    violations: int
    tolerance: float


def check_lemma1(log, bundle, V=None, tolerance=1e-9):
    """Check the interval recursion of sqrt(V) along a logged trajectory.

    Uses the log's W column or recomputes it from ``V``.  A sound plant
    certificate yields zero violations for any sampling period.
    """
    if log.W is not None:
        W = log.W
    elif V is not None:
        W = np.array([
            math.sqrt(max(float(V(log.x[k], log.u[k], log.w[k])), 0.0))
            for k in range(log.samples)
        ])
    else:
        raise ShapeError("log has no W column and no V was given")
    cw = c_w(bundle, log.tau)
    st = math.sqrt(log.tau)
    K = log.samples - 1
    margins = np.empty(K)
    for k in range(K):
        du = np.linalg.norm(log.u[k + 1] - log.u[k])
        bound = cw * W[k] + cw * bundle.ell_W * du + st * bundle.sigma(log.z[k])
        margins[k] = bound - W[k + 1]
    violations = int(np.sum(margins < -tolerance))
    return Lemma1Report(margins, float(margins.min()), violations, tolerance)


@dataclass
class IssReport:
    """Pointwise envelope margins and the asymptotic output-error check."""

    pointwise_margins: np.ndarray
    worst_margin: float
    pointwise_ok: bool
    tail_bound: float
    tail_measured: float
    tail_ok: bool
    envelope: np.ndarray


def check_iss(log, bundle, tolerance=1e-6):
    """Verify the certified envelope and asymptotic gain on a logged run.

    Requires the oracle error columns.  The pointwise check compares
    ``||(dx_k, du_k)||`` with the envelope from the logged initial errors
    and the running disturbance-rate bound; the tail check compares the
    largest ``||dy_k||`` over the final fifth of the run with the asymptotic
    gain at the tail's rate bound.  Raises OutsideCertifiedRegion when
    (tau, eps) is not certified.
    """
    if log.du_norm is None or log.dx_norm is None:
        raise ShapeError("log lacks oracle error columns; rerun with a problem attached")
    if not is_certified(bundle, log.tau, log.eps):
        raise OutsideCertifiedRegion(
            f"(tau={log.tau}, eps={log.eps}) is not in the certified region"
        )
    n = log.samples
    measured = np.hypot(log.dx_norm, log.du_norm)
    env = np.empty(n)
    zsup = 0.0
    initial = (log.dx_norm[0], log.du_norm[0])
    for k in range(n):
        env[k] = iss_envelope(bundle, log.tau, log.eps, initial, zsup, k)
        zsup = max(zsup, log.z[k])
    margins = env - measured
    tail_start = int(math.floor(0.8 * (n - 1)))
    tail_z = float(log.z[tail_start:].max())
    tail_bound = asymptotic_gain(bundle, log.tau, log.eps, tail_z)
    tail_measured = float(log.dy_norm[tail_start:].max()) if log.dy_norm is not None else math.nan
    return IssReport(
        pointwise_margins=margins,
        worst_margin=float(margins.min()),
        pointwise_ok=bool(np.all(margins >= -tolerance)),
        tail_bound=tail_bound,
        tail_measured=tail_measured,
        tail_ok=bool(tail_measured <= tail_bound + tolerance),
        envelope=env,
    )


def run_feedforward_baseline(plant, problem, w_measured, cfg, w_true=None, oracle_gamma=None,
                             lyapunov=None):
    """Open-loop baseline: replay the equilibrium input for the measured disturbance.

    At every sample the input is set to the frozen-disturbance equilibrium
    computed from ``w_measured``; no plant measurement is used.  The plant
    itself evolves under ``w_true`` (defaults to the measured signal), so a
    mismatch between the two shows up as a persistent tracking bias that
    feedback would remove.  Error columns are computed against the true
    disturbance.
    """
    if w_true is None:
        w_true = w_measured
    gamma = oracle_gamma
    if gamma is None:
        gamma = problem.strong_monotonicity / problem.lipschitz_F**2

    # precompute the command sequence from the measured disturbance
    t = cfg.t0 + cfg.tau * np.arange(cfg.horizon + 1)
    commands = np.empty((cfg.horizon + 1, plant.input_dim))
    guess = cfg.u0
    for k in range(cfg.horizon + 1):
        wk = w_measured(t[k])
        commands[k] = solve_offline(
            problem,
            lambda uu, wk=wk: steady_output(plant, uu, wk),
            gamma,
            tol=ORACLE_TOL,
            u0=guess,
        )
        guess = commands[k]

    class _ReplayOp:
        c_T = 0.5
        ell_T = 0.0
        P = None

        def __init__(self):
            self.k = 0

        def step(self, u, y):
            self.k += 1
            return commands[min(self.k, cfg.horizon)]

    replay = _ReplayOp()
    cfg_ff = ClosedLoopConfig(
        tau=cfg.tau, eps=1.0, horizon=cfg.horizon, u0=commands[0], x0=cfg.x0,
        substeps=cfg.substeps, t0=cfg.t0, log_intersample=False,
    )
    return _run_loop(plant, replay, w_true, cfg_ff, None, problem, lyapunov, None, gamma)
