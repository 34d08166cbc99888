"""feslab: simulation and certification of sampled-data equilibrium-seeking loops.

The package closes the loop between a continuous-time plant and a discrete
equilibrium-seeking input update, certifies the interconnection through a
2x2 small-gain comparison matrix, derives explicit error envelopes, and
ships two worked scenarios (multi-zone building climate control and a
mobile-sensor coordination game) plus a command-line front end.
"""

from .algorithms import (
    AlgorithmOperator,
    best_response_operator,
    estimate_contraction,
    projected_argmin,
    prox_grad_operator,
    relaxed_step,
)
from .box import BoxSet
from .certificates import (
    CertificateBundle,
    asymptotic_gain,
    build_M,
    c_w,
    contraction_decay,
    eps_max,
    is_certified,
    iss_envelope,
    iss_gain,
    spectral_radius_2x2,
    tau_min,
)
from .equilibrium import (
    EquilibriumProblem,
    GamePartition,
    box_resolvent,
    dist_to_interval_grad,
    fo_pseudo_gradient,
    game_pseudo_gradient,
    identity_resolvent,
    solve_offline,
)
from .errors import (
    BelowMinimumSamplingPeriod,
    BestResponseFailed,
    ConfigError,
    FeslabError,
    InputOutOfRange,
    IntegrationDiverged,
    InvalidInterval,
    InvalidSamplingPeriod,
    NoConvergence,
    NotPerronMatrix,
    OutsideCertifiedRegion,
    RelaxationOutOfRange,
    ShapeError,
    StepSizeOutOfRange,
    UnstableOpenLoop,
)
from .plant import (
    DisturbanceSignal,
    LyapunovCertificate,
    PlantModel,
    composite_signal,
    constant_signal,
    estimate_lipschitz,
    integrate_hold,
    piecewise_constant_signal,
    probe_lyapunov_decay,
    sinusoid_signal,
    steady_output,
)
from .simulator import (
    ClosedLoopConfig,
    TrajectoryLog,
    check_iss,
    check_lemma1,
    hold_state_plant,
    hold_state_step,
    run_discrete,
    run_feedforward_baseline,
    run_sampled_data,
)

__version__ = "0.1.0"
