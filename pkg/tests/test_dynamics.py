"""Flow tests; oracles are a truncated matrix-exponential series and RK4."""

import math
from fractions import Fraction

import numpy as np
import pytest

from anomint.algebra import CentralCharges
from anomint.dynamics import (
    anomaly_report,
    compose_flows,
    exact_flow,
    flow_generator,
    rk4_flow,
)
from anomint.skew import SingularCharges

F = Fraction


def series_expm(X, terms=60):
    out = np.eye(X.shape[0])
    term = np.eye(X.shape[0])
    for k in range(1, terms):
        term = term @ X / k
        out = out + term
    return out


def unit_charges():
    return CentralCharges.from_upper_entries(2, {(1, 2): 1})


def random_charges_4(seed=77):
    rng = np.random.default_rng(seed)
    entries = {}
    for i in range(1, 5):
        for j in range(i + 1, 5):
            entries[(i, j)] = F(int(rng.integers(-6, 7)), int(rng.integers(1, 5)))
    ch = CentralCharges.from_upper_entries(4, entries)
    return ch


def test_t_zero_identity():
    ch = unit_charges()
    st = exact_flow(ch, 0.0)
    assert np.allclose(st.fprime_coeffs, np.eye(2), atol=1e-15)
    assert np.allclose(st.q_offsets, 0.0, atol=1e-15)
    for steps in (1, 7):
        st2 = rk4_flow(ch, 0.0, steps)
        assert np.array_equal(st2.fprime_coeffs, np.eye(2))
        assert np.array_equal(st2.q_offsets, np.zeros((2, 2)))


def test_half_rotation():
    # one pair with frequency beta: angular frequency 2 beta, so at
    # t = pi / (2 beta) the commutant coefficients are exactly -identity
    beta = 1.0
    st = exact_flow(unit_charges(), math.pi / (2 * beta))
    assert np.allclose(st.fprime_coeffs, -np.eye(2), atol=1e-12)


def test_exact_flow_matches_series_expm():
    for ch in (unit_charges(), random_charges_4()):
        A = np.array(ch.float_rows())
        for t in (0.3, 0.7, -0.5):
            st = exact_flow(ch, t)
            assert np.max(np.abs(st.fprime_coeffs - series_expm(-2 * t * A))) < 1e-12


def test_orthogonality_and_frame_norm():
    ch = random_charges_4()
    for t in (0.1, 1.0, 10.0, 100.0, -100.0):
        st = exact_flow(ch, t)
        assert st.orthogonality_error() < 1e-12
        # rows of an orthogonal matrix have unit norm: total 2l
        assert abs(np.sum(st.fprime_coeffs**2) - st.n) < 1e-12


def test_one_parameter_group():
    ch = random_charges_4()
    for t1, t2 in ((0.2, 0.9), (1.5, -0.4), (3.0, 3.0)):
        joined = exact_flow(ch, t1 + t2)
        composed = compose_flows(exact_flow(ch, t1), exact_flow(ch, t2))
        assert np.max(np.abs(joined.fprime_coeffs - composed.fprime_coeffs)) < 1e-12
        assert np.max(np.abs(joined.q_offsets - composed.q_offsets)) < 1e-12


def test_q_offsets_closed_form():
    # G(t) must solve G = A^-1 (I - exp(-2At)) when A is invertible
    ch = random_charges_4()
    A = np.array(ch.float_rows())
    st = exact_flow(ch, 0.8)
    direct = np.linalg.solve(A, np.eye(4) - st.fprime_coeffs)
    assert np.max(np.abs(st.q_offsets - direct)) < 1e-10


def test_q_offsets_derivative_is_twice_rotation():
    ch = unit_charges()
    h = 1e-5
    t = 0.6
    dG = (exact_flow(ch, t + h).q_offsets - exact_flow(ch, t - h).q_offsets) / (2 * h)
    assert np.max(np.abs(dG - 2.0 * exact_flow(ch, t).fprime_coeffs)) < 1e-6


def test_rk4_fourth_order_convergence():
    ch = unit_charges()
    exact = exact_flow(ch, 1.0)

    def err(steps):
        st = rk4_flow(ch, 1.0, steps)
        return max(
            np.max(np.abs(st.fprime_coeffs - exact.fprime_coeffs)),
            np.max(np.abs(st.q_offsets - exact.q_offsets)),
        )

    ratio = err(4) / err(16)
    assert 200 <= ratio <= 320


def test_rk4_converges_to_exact():
    ch = random_charges_4()
    exact = exact_flow(ch, 1.0)
    st = rk4_flow(ch, 1.0, 4000)
    assert np.max(np.abs(st.fprime_coeffs - exact.fprime_coeffs)) < 1e-10


def test_rk4_longtime_orthogonality_drift():
    ch = unit_charges()
    exact = exact_flow(ch, 100.0)
    approx = rk4_flow(ch, 100.0, 400)
    assert exact.orthogonality_error() < 1e-12
    assert approx.orthogonality_error() > 1e-9


def test_derivative_at_zero_matches_symbolic_generator():
    for ch in (unit_charges(), random_charges_4()):
        gen = flow_generator(ch)
        assert np.array_equal(gen, -2.0 * np.array(ch.float_rows()))
        h = 1e-5
        fd = (
            exact_flow(ch, h).fprime_coeffs - exact_flow(ch, -h).fprime_coeffs
        ) / (2 * h)
        scale = max(1.0, np.max(np.abs(gen)))
        assert np.max(np.abs(fd - gen)) / scale < 1e-6


def test_singular_charges_rejected_by_exact_flow():
    with pytest.raises(SingularCharges):
        exact_flow(CentralCharges.zeros(2), 1.0)


def test_rk4_accepts_singular_charges():
    st = rk4_flow(CentralCharges.zeros(2), 1.0, 10)
    assert np.allclose(st.fprime_coeffs, np.eye(2))
    assert np.allclose(st.q_offsets, 2.0 * np.eye(2))


def test_anomaly_report_structure():
    b = F(3, 4)
    ch = CentralCharges.from_upper_entries(2, {(1, 2): b})
    report = anomaly_report(ch, 2.0)
    assert report["anomalous_flow"]["all_conserved"]
    rates = np.array(report["naive_flow"]["drift_rate_matrix"])
    assert np.array_equal(rates, np.array([[0.0, 0.75], [-0.75, 0.0]]))
    assert report["naive_flow"]["max_drift_rate"] == 0.75
    assert report["naive_flow"]["drift_is_time_independent"]
    assert np.array_equal(
        np.array(report["naive_flow"]["offset_at_t"]), 2.0 * rates
    )
    assert not report["flows_coincide"]
    assert "P2" in report["naive_flow"]["drift_polynomials"][0]


def test_anomaly_report_trivial_charges():
    report = anomaly_report(CentralCharges.zeros(3), 1.0)
    assert report["flows_coincide"]
    assert report["anomalous_flow"]["all_conserved"]
    assert report["naive_flow"]["max_drift_rate"] == 0.0
