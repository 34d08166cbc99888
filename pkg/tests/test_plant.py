"""Plant-side tests: held-input integration, steady outputs, signals, decay probes.

Expected values are frozen from closed forms computed in-line (scalar linear
ODEs have exact flows) or from refinement oracles, never from the code under
test.
"""

import math

import numpy as np
import pytest

from feslab import (
    BoxSet,
    InputOutOfRange,
    IntegrationDiverged,
    InvalidInterval,
    LyapunovCertificate,
    PlantModel,
    composite_signal,
    constant_signal,
    integrate_hold,
    piecewise_constant_signal,
    probe_lyapunov_decay,
    sinusoid_signal,
    steady_output,
)

BIG_BOX = BoxSet(np.array([-1e9]), np.array([1e9]))


def scalar_lti(a=1.0, b=1.0, c=1.0):
    """Plant dx/dt = -a x + b u, y = c x; x_ss = (b/a) u."""
    return PlantModel(
        state_dim=1,
        input_dim=1,
        disturbance_dim=1,
        output_dim=1,
        dynamics=lambda x, u, w: -a * x + b * u,
        output_map=lambda x, w: c * x,
        steady_state=lambda u, w: (b / a) * np.atleast_1d(u),
        input_set=BIG_BOX,
    )


W0 = constant_signal([0.0])


# --- integrate_hold -------------------------------------------------------


def test_integrate_hold_step_response():
    # closed form: x(t) = 1 - exp(-t) for dx = -x + u, x0 = 0, u = 1
    plant = scalar_lti()
    x = integrate_hold(plant, np.array([0.0]), np.array([1.0]), W0, 0.0, 1.0, substeps=50)
    assert abs(x[0] - (1.0 - math.exp(-1.0))) < 1e-6


def test_integrate_hold_fixed_point():
    plant = scalar_lti()
    x = integrate_hold(plant, np.array([1.0]), np.array([1.0]), W0, 0.0, 1.0, substeps=50)
    assert abs(x[0] - 1.0) < 1e-12, "steady state must be invariant under the flow"


def test_integrate_hold_decay():
    plant = scalar_lti()
    x = integrate_hold(plant, np.array([1.0]), np.array([0.0]), W0, 0.0, 0.5, substeps=50)
    assert abs(x[0] - math.exp(-0.5)) < 1e-9


def test_integrate_hold_flow_property():
    # integrating tau then tau equals integrating 2 tau at matching step sizes
    plant = scalar_lti()
    w = sinusoid_signal([0.5], [0.3], [2.0])
    plant_w = PlantModel(
        state_dim=1, input_dim=1, disturbance_dim=1, output_dim=1,
        dynamics=lambda x, u, ww: -x + u + ww,
        output_map=lambda x, ww: x,
        steady_state=lambda u, ww: np.atleast_1d(u + ww),
        input_set=BIG_BOX,
    )
    x0 = np.array([0.7])
    u = np.array([0.2])
    mid = integrate_hold(plant_w, x0, u, w, 0.0, 0.4, substeps=40)
    two = integrate_hold(plant_w, mid, u, w, 0.4, 0.4, substeps=40)
    one = integrate_hold(plant_w, x0, u, w, 0.0, 0.8, substeps=80)
    assert np.allclose(two, one, atol=1e-12)


def test_integrate_hold_order_four():
    # halving the step must shrink the error by ~16x; require >= 12x
    plant = scalar_lti()
    exact = math.exp(-2.0)
    errs = []
    for n in (4, 8, 16, 32):
        x = integrate_hold(plant, np.array([1.0]), np.array([0.0]), W0, 0.0, 2.0, substeps=n)
        errs.append(abs(x[0] - exact))
    for coarse, fine in zip(errs, errs[1:]):
        assert coarse / fine >= 12.0, f"convergence ratio {coarse / fine:.2f} below 4th order"


@pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
def test_integrate_hold_divergence():
    plant = PlantModel(
        state_dim=1, input_dim=1, disturbance_dim=1, output_dim=1,
        dynamics=lambda x, u, w: x * x * 1e3,
        output_map=lambda x, w: x,
        steady_state=lambda u, w: np.zeros(1),
        input_set=BIG_BOX,
    )
    with pytest.raises(IntegrationDiverged):
        integrate_hold(plant, np.array([10.0]), np.array([0.0]), W0, 0.0, 10.0, substeps=50)


def test_integrate_hold_rejects_bad_period():
    plant = scalar_lti()
    from feslab import InvalidSamplingPeriod

    with pytest.raises(InvalidSamplingPeriod):
        integrate_hold(plant, np.array([0.0]), np.array([0.0]), W0, 0.0, -1.0)


# --- steady_output --------------------------------------------------------


def test_steady_output_lti():
    # dx = -2x + u, y = 3x: u = 4 -> x_ss = 2 -> y = 6
    plant = scalar_lti(a=2.0, b=1.0, c=3.0)
    y = steady_output(plant, np.array([4.0]), np.array([0.0]))
    assert abs(y[0] - 6.0) < 1e-12


def test_steady_output_identity_map():
    # state tracks the input exactly: y_ss = u for any admissible u
    box = BoxSet(np.array([-5.0, -6.0]), np.array([10.0, 6.0]))
    plant = PlantModel(
        state_dim=2, input_dim=2, disturbance_dim=1, output_dim=2,
        dynamics=lambda x, u, w: u - x,
        output_map=lambda x, w: x,
        steady_state=lambda u, w: np.asarray(u, dtype=float),
        input_set=box,
    )
    rng = np.random.default_rng(3)
    for _ in range(20):
        u = box.sample(rng)
        assert np.allclose(steady_output(plant, u, np.zeros(1)), u)


def test_steady_output_out_of_range():
    plant = scalar_lti()
    narrow = PlantModel(
        state_dim=1, input_dim=1, disturbance_dim=1, output_dim=1,
        dynamics=plant.dynamics, output_map=plant.output_map,
        steady_state=plant.steady_state,
        input_set=BoxSet(np.array([0.0]), np.array([1.0])),
    )
    with pytest.raises(InputOutOfRange):
        steady_output(narrow, np.array([2.0]), np.array([0.0]))


def test_steady_state_consistency_probe():
    # f(x_ss(u, w), u, w) = 0 on random admissible inputs
    plant = scalar_lti(a=1.7, b=0.4, c=2.0)
    rng = np.random.default_rng(11)
    for _ in range(100):
        u = rng.uniform(-10, 10, size=1)
        xss = plant.steady_state(u, np.zeros(1))
        assert abs(plant.dynamics(xss, u, np.zeros(1))[0]) < 1e-12


# --- disturbance signals --------------------------------------------------


def test_constant_signal_rate_zero():
    s = constant_signal([1.0, -2.0])
    assert np.allclose(s(3.7), [1.0, -2.0])
    assert s.rate_bound(0.0, 100.0) == 0.0


def test_sinusoid_rate_bound_exact():
    # w = sin(t): sup |cos| over [0, 0.5] is cos(0) = 1 at the endpoint
    s = sinusoid_signal([0.0], [1.0], [1.0])
    assert abs(s.rate_bound(0.0, 0.5) - 1.0) < 1e-12
    # over [1.0, 1.5] the sup is |cos(1.0)|
    assert abs(s.rate_bound(1.0, 1.5) - abs(math.cos(1.0))) < 1e-12
    # any interval of length >= pi contains a peak
    assert abs(s.rate_bound(1.0, 1.0 + math.pi) - 1.0) < 1e-12


def test_sinusoid_rate_bound_dominates_samples():
    rng = np.random.default_rng(5)
    s = sinusoid_signal([0.0, 1.0], [2.0, 0.5], [3.0, 0.7], [0.1, 2.0])
    for _ in range(50):
        t0 = rng.uniform(0, 10)
        t1 = t0 + rng.uniform(0.01, 2)
        zb = s.rate_bound(t0, t1)
        ts = np.linspace(t0, t1, 97)
        sup = max(np.linalg.norm(s.derivative(t)) for t in ts)
        assert zb >= sup - 1e-12, "rate bound must upper-bound sampled derivative norms"


def test_piecewise_constant_signal():
    s = piecewise_constant_signal([0.0, 1.0, 2.0], [[0.0], [3.0], [1.0]],
                                  rate_surrogate_time=0.5)
    assert s(0.5)[0] == 0.0
    assert s(1.0)[0] == 3.0  # right-continuous
    assert s(1.5)[0] == 3.0
    assert s(2.5)[0] == 1.0
    assert s.rate_bound(0.2, 0.8) == 0.0
    assert abs(s.rate_bound(0.5, 1.5) - 3.0 / 0.5) < 1e-12
    assert abs(s.rate_bound(1.5, 2.5) - 2.0 / 0.5) < 1e-12


def test_composite_signal_quadrature():
    a = sinusoid_signal([0.0], [1.0], [1.0])
    b = constant_signal([5.0])
    s = composite_signal([a, b])
    assert s.dim == 2
    assert np.allclose(s(0.0), [0.0, 5.0])
    assert abs(s.rate_bound(0.0, 0.1) - a.rate_bound(0.0, 0.1)) < 1e-12


# --- Lyapunov decay probe -------------------------------------------------


def lti_V(x, u, w):
    return float((x[0] - u[0]) ** 2)


def exact_certificate(mu):
    return LyapunovCertificate(mu=mu, alpha1=1.0, alpha2=1.0, ell_g=1.0, ell_x=1.0,
                               sigma_c=lambda z: z * z)


def test_probe_decay_exact_rate():
    # V = (x - u)^2 along dx = -(x - u): dV/dt = -2V exactly
    plant = scalar_lti()
    report = probe_lyapunov_decay(plant, exact_certificate(2.0), lti_V,
                                  trials=10, rng=0)
    assert report.violations == 0
    assert report.worst_margin <= report.tolerance


def test_probe_decay_overstated_rate():
    plant = scalar_lti()
    report = probe_lyapunov_decay(plant, exact_certificate(10.0), lti_V,
                                  trials=10, rng=0)
    assert report.violations > 0
    assert report.worst_margin > 0.0, "overstated decay rate must be flagged"


def test_probe_decay_at_steady_state():
    plant = scalar_lti()
    report = probe_lyapunov_decay(plant, exact_certificate(2.0), lti_V,
                                  trials=5, perturbation=0.0, rng=1)
    assert report.violations == 0


def test_certificate_validation():
    with pytest.raises(InvalidInterval):
        LyapunovCertificate(mu=-1.0, alpha1=1.0, alpha2=1.0, ell_g=1.0, ell_x=1.0,
                            sigma_c=lambda z: z)
    with pytest.raises(InvalidInterval):
        LyapunovCertificate(mu=1.0, alpha1=2.0, alpha2=1.0, ell_g=1.0, ell_x=1.0,
                            sigma_c=lambda z: z)
    with pytest.raises(InvalidInterval):
        # sigma_c(0) != 0 is not class-K
        LyapunovCertificate(mu=1.0, alpha1=1.0, alpha2=1.0, ell_g=1.0, ell_x=1.0,
                            sigma_c=lambda z: z + 1.0)
