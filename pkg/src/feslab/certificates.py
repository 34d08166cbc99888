"""Small-gain stability certificates for sampled-data equilibrium seeking.

The closed loop interleaves a plant transient over each sampling interval
with one relaxed step of a contractive input update.  Its stability is
decided by a 2x2 nonnegative comparison matrix M coupling the input error
(measured in the operator's P-norm) with the square root of the plant's
Lyapunov function: the loop is certified when the spectral radius of M is
below one, which happens exactly for sampling periods above a minimum value
and relaxation gains below a period-dependent ceiling.  From M the module
derives an explicit input-to-state stability envelope for the error
trajectory and an asymptotic gain from the disturbance rate to the output
error.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    BelowMinimumSamplingPeriod,
    InvalidInterval,
    InvalidSamplingPeriod,
    NotPerronMatrix,
    OutsideCertifiedRegion,
    ShapeError,
)

# Eigenvalues closer than this are treated as coincident when extracting the
# decay pair (r, c_M); the fallback inflates c_M by EIG_PERTURB.
EIG_GAP_TOL = 1e-10
EIG_PERTURB = 1e-8


@dataclass
class CertificateBundle:
    """All constants needed to certify one plant/algorithm pairing.

    Plant side: decay rate ``mu``, quadratic bounds ``alpha1 <= alpha2``,
    output Lipschitz bound ``ell_g``, steady-state-map Lipschitz bound
    ``ell_x``, and the disturbance-rate gain ``sigma_c`` (class-K).  Problem
    side: solution-map Lipschitz bound ``ell_u_star``.  Algorithm side:
    contraction factor ``c_T``, measurement sensitivity ``ell_T``, and the
    extreme eigenvalues of the weighting matrix P.
    """

    mu: float
    alpha1: float
    alpha2: float
    ell_g: float
    ell_x: float
    ell_u_star: float
    c_T: float
    ell_T: float
    sigma_c: Callable[[float], float]
    lambda_min_P: float = 1.0
    lambda_max_P: float = 1.0

    def __post_init__(self):
        if not (self.mu > 0):
            raise InvalidInterval("decay rate mu must be positive")
        if not (0 < self.alpha1 <= self.alpha2):
            raise InvalidInterval("need 0 < alpha1 <= alpha2")
        if not (0 < self.c_T < 1):
            raise InvalidInterval("contraction factor must be in (0, 1)")
        if min(self.ell_g, self.ell_x, self.ell_T, self.ell_u_star) < 0:
            raise InvalidInterval("Lipschitz bounds must be nonnegative")
        if not (0 < self.lambda_min_P <= self.lambda_max_P):
            raise InvalidInterval("need 0 < lambda_min_P <= lambda_max_P")

    @classmethod
    def from_parts(cls, certificate, problem, op):
        """Assemble from a plant certificate, problem data, and an operator."""
        return cls(
            mu=certificate.mu,
            alpha1=certificate.alpha1,
            alpha2=certificate.alpha2,
            ell_g=certificate.ell_g,
            ell_x=certificate.ell_x,
            ell_u_star=problem.lipschitz_solution,
            c_T=op.c_T,
            ell_T=op.ell_T,
            sigma_c=certificate.sigma_c,
            lambda_min_P=op.lambda_min_P(),
            lambda_max_P=op.lambda_max_P(),
        )

    # Derived constants -------------------------------------------------

    @property
    def ell_W(self):
        """Sensitivity of sqrt(V) to input changes: sqrt(alpha1) * ell_x."""
        return math.sqrt(self.alpha1) * self.ell_x

    @property
    def norm_P(self):
        return self.lambda_max_P

    @property
    def norm_P_inv(self):
        return 1.0 / self.lambda_min_P

    @property
    def kappa_P(self):
        return self.lambda_max_P / self.lambda_min_P

    def sigma(self, z):
        """Square root of the disturbance-rate gain, itself class-K."""
        return math.sqrt(self.sigma_c(z))


def _check_tau(tau):
    if not (tau > 0) or not math.isfinite(tau):
        raise InvalidSamplingPeriod(f"sampling period must be a positive real, got {tau}")


def c_w(bundle, tau):
    """Per-interval decay factor of sqrt(V): sqrt(alpha2/alpha1) * exp(-tau mu / 2).

    Below the minimum sampling period this exceeds one: a single interval is
    too short for the guaranteed transient decay to beat the bound gap
    between the quadratic envelopes.
    """
    _check_tau(tau)
    return math.sqrt(bundle.alpha2 / bundle.alpha1) * math.exp(-tau * bundle.mu / 2.0)


def tau_min(bundle):
    """Minimum certifiable sampling period: log(alpha2/alpha1) / mu."""
    return math.log(bundle.alpha2 / bundle.alpha1) / bundle.mu


def eps_max(bundle, tau):
    """Largest certifiable relaxation gain at sampling period ``tau``.

    Equals the critical gain at which the comparison matrix hits spectral
    radius one; gains strictly below min(eps_max, 1) are certified.  Returns
    ``inf`` when the measurement path has zero gain (ell_g ell_x ell_T = 0).
    Raises BelowMinimumSamplingPeriod for ``tau <= tau_min``.
    """
    _check_tau(tau)
    if tau <= tau_min(bundle):
        raise BelowMinimumSamplingPeriod(
            f"tau={tau} at or below minimum certifiable period {tau_min(bundle)}"
        )
    s = math.exp(tau * bundle.mu / 2.0)
    ratio = bundle.alpha2 / bundle.alpha1
    path_gain = bundle.ell_g * bundle.ell_x * bundle.ell_T
    if path_gain == 0.0:
        return math.inf
    kappa_term = 1.0 + bundle.kappa_P * (1.0 + bundle.c_T) / (1.0 - bundle.c_T)
    return s * (s - math.sqrt(ratio)) / (path_gain * kappa_term * ratio)


def build_M(bundle, tau, eps):
    """Comparison matrix of the coupled error recursion.

    Row/column 1 is the input error in the P-norm, row/column 2 the square
    root of the plant Lyapunov function.  Off-diagonal entries carry the
    interconnection gains: measurement sensitivity into the input update and
    input motion into the plant transient.
    """
    _check_tau(tau)
    if not (0 < eps <= 1):
        raise InvalidInterval(f"relaxation gain must be in (0, 1], got {eps}")
    cw = c_w(bundle, tau)
    sa1 = math.sqrt(bundle.alpha1)
    m11 = 1.0 - eps * (1.0 - bundle.c_T)
    m12 = (bundle.norm_P * bundle.ell_T * bundle.ell_g / sa1) * eps * cw
    m21 = bundle.norm_P_inv * (1.0 + bundle.c_T) * eps * bundle.ell_W * cw
    m22 = (1.0 + (bundle.ell_W * bundle.ell_T * bundle.ell_g / sa1) * eps * cw) * cw
    return np.array([[m11, m12], [m21, m22]])


def spectral_radius_2x2(M):
    """Spectral radius of a 2x2 entrywise-nonnegative matrix, in closed form.

    For such matrices the dominant eigenvalue is real:
    ``(tr + sqrt(tr^2 - 4 det)) / 2``.  Raises NotPerronMatrix on negative
    entries (the closed form and the monotonicity arguments need
    nonnegativity).
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2):
        raise ShapeError(f"expected a 2x2 matrix, got shape {M.shape}")
    if np.any(M < 0):
        raise NotPerronMatrix("matrix has negative entries")
    tr = M[0, 0] + M[1, 1]
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    disc = tr * tr - 4.0 * det
    # nonnegative matrices have a real dominant eigenvalue; disc >= 0 up to rounding
    return (tr + math.sqrt(max(disc, 0.0))) / 2.0


def is_certified(bundle, tau, eps):
    """True when (tau, eps) lies in the certified region.

    Certified means ``tau > tau_min`` and ``0 < eps <= min(eps_max(tau), 1)``
    with the comparison matrix spectral radius strictly below one (the
    region's closure touches radius one exactly at eps_max).
    """
    _check_tau(tau)
    if not (0 < eps <= 1):
        return False
    if tau <= tau_min(bundle):
        return False
    return spectral_radius_2x2(build_M(bundle, tau, eps)) < 1.0


def contraction_decay(M):
    """Extract a geometric envelope ``||M^k|| <= r * c_M^k`` from M.

    ``c_M`` is the spectral radius.  With distinct eigenvalues, ``r`` is the
    condition number of the eigenvector matrix.  When the eigenvalues
    coincide within EIG_GAP_TOL the matrix may be defective, so ``c_M`` is
    inflated by EIG_PERTURB and ``r = 1 + ||M|| / gap`` covers the algebraic
    growth, where ``gap`` is the inflation.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2):
        raise ShapeError(f"expected a 2x2 matrix, got shape {M.shape}")
    if np.any(M < 0):
        raise NotPerronMatrix("matrix has negative entries")
    lam, vecs = np.linalg.eig(M)
    c_M = float(np.max(np.abs(lam)))
    if abs(lam[0] - lam[1]) > EIG_GAP_TOL:
        r = float(np.linalg.cond(vecs))
    else:
        gap = EIG_PERTURB
        c_M = c_M + gap
        r = 1.0 + float(np.linalg.norm(M, 2)) / gap
    return c_M, r


def _envelope_constants(bundle, tau, eps):
    M = build_M(bundle, tau, eps)
    c_M, r = contraction_decay(M)
    if c_M >= 1.0:
        raise OutsideCertifiedRegion(
            f"comparison matrix spectral radius {c_M:.6g} >= 1 at tau={tau}, eps={eps}"
        )
    m1 = min(bundle.lambda_min_P, math.sqrt(bundle.alpha1))
    m2 = max(bundle.lambda_max_P, math.sqrt(bundle.alpha2))
    eta1 = r * m2 / m1
    eta2 = r / m1
    return c_M, r, eta1, eta2


def iss_gain(bundle, tau, eps, zeta):
    """Gain from the worst disturbance rate to the steady error radius.

    For a rate bound ``zeta``, the persistent error component is

        gamma(zeta) = eta2 * c_M / (1 - c_M)
                      * ||( ell_u_star * tau * zeta,
                            sqrt(tau) / c_w * sigma(zeta) )||

    a class-K function of ``zeta``.  Raises OutsideCertifiedRegion when
    (tau, eps) is not certified.
    """
    c_M, _, _, eta2 = _envelope_constants(bundle, tau, eps)
    if zeta < 0:
        raise InvalidInterval("rate bound must be nonnegative")
    cw = c_w(bundle, tau)
    drive = math.hypot(
        bundle.ell_u_star * tau * zeta,
        math.sqrt(tau) / cw * bundle.sigma(zeta),
    )
    return eta2 * c_M / (1.0 - c_M) * drive


def iss_envelope(bundle, tau, eps, initial, z_sup, k):
    """Guaranteed bound on ``||(dx_k, du_k)||`` after k samples.

    ``initial`` is the pair of norms ``(||dx_0||, ||du_0||)`` of the plant
    and input errors at sample zero; ``z_sup`` bounds the disturbance rate
    over the elapsed samples.  The bound is

        eta1 * c_M^k * ||(dx_0, du_0)|| + gamma(z_sup)

    a geometric transient plus the persistent disturbance radius.  ``k`` may
    be an integer or an integer array.
    """
    c_M, _, eta1, _ = _envelope_constants(bundle, tau, eps)
    dx0, du0 = initial
    if dx0 < 0 or du0 < 0:
        raise InvalidInterval("initial error norms must be nonnegative")
    init_norm = math.hypot(dx0, du0)
    tail = iss_gain(bundle, tau, eps, z_sup)
    k_arr = np.asarray(k)
    env = eta1 * np.power(c_M, k_arr.astype(float)) * init_norm + tail
    if np.ndim(k) == 0:
        return float(env)
    return env


def asymptotic_gain(bundle, tau, eps, zeta):
    """Asymptotic gain from the disturbance rate to the output error.

    The output error inherits the input/state error through the output map
    and the steady-state map: ``gamma_a(zeta) = ell_g (1 + ell_x) gamma(zeta)``.
    The tail of ``||dy_k||`` is bounded by this gain applied to the tail
    bound of the disturbance rate.
    """
    return bundle.ell_g * (1.0 + bundle.ell_x) * iss_gain(bundle, tau, eps, zeta)
