"""Heisenberg-picture time evolution as a linear flow on operator coefficients.

Under the quadratic invariant Hamiltonian the commutant generators close on
themselves, so F'(t) = R(t) F'(0) with dR/dt = -2 A R, i.e. R(t) =
exp(-2At), an orthogonal matrix; the angle operators pick up Q(t) - Q(0) =
G(t) F'(0) with dG/dt = 2 R and G(0) = 0.  Both are evaluated in closed
form through the canonical block decomposition (rotations by 2 beta_k t per
pair), with a classical RK4 integrator as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from anomint.algebra import (
    CentralCharges,
    GaussianRational,
    Monomial,
    WeylPolynomial,
    action_operator,
    commutant_action_operator,
    commutator,
    hamiltonian,
    render_polynomial,
)
from anomint.skew import SingularCharges, _as_antisymmetric_array, canonicalize

_I = GaussianRational(0, 1)


@dataclass
class CoefficientState:
    """Flow matrices at time t: F'(t) = fprime_coeffs F'(0), Q(t) - Q(0) = q_offsets F'(0)."""

    fprime_coeffs: np.ndarray
    q_offsets: np.ndarray
    t: float

    @property
    def n(self):
        return self.fprime_coeffs.shape[0]

    def orthogonality_error(self) -> float:
        R = self.fprime_coeffs
        return float(np.max(np.abs(R @ R.T - np.eye(self.n))))


def exact_flow(charges, t: float) -> CoefficientState:
    """Closed-form flow via block rotations by angles 2 beta_k t."""
    form = canonicalize(charges)
    M, beta = form.M, form.beta
    l = len(beta)
    ang = 2.0 * beta * t
    cos, sin = np.cos(ang), np.sin(ang)
    rot = np.zeros((2 * l, 2 * l))
    integ = np.zeros((2 * l, 2 * l))
    for k in range(l):
        rot[k, k] = rot[l + k, l + k] = cos[k]
        rot[k, l + k] = -sin[k]
        rot[l + k, k] = sin[k]
        # 2 * integral of the rotation block from 0 to t
        integ[k, k] = integ[l + k, l + k] = sin[k] / beta[k]
        integ[k, l + k] = (cos[k] - 1.0) / beta[k]
        integ[l + k, k] = (1.0 - cos[k]) / beta[k]
    R = M.T @ rot @ M
    G = M.T @ integ @ M
    return CoefficientState(fprime_coeffs=R, q_offsets=G, t=float(t))


def rk4_flow(charges, t: float, steps: int) -> CoefficientState:
    """Classical fourth-order integration of dR/dt = -2AR, dG/dt = 2R."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    A = _as_antisymmetric_array(charges)
    n = A.shape[0]
    h = float(t) / steps
    R = np.eye(n)
    G = np.zeros((n, n))

    def dR(r):
        return -2.0 * (A @ r)

    for _ in range(steps):
        k1r = dR(R)
        k1g = 2.0 * R
        r2 = R + 0.5 * h * k1r
        k2r = dR(r2)
        k2g = 2.0 * r2
        r3 = R + 0.5 * h * k2r
        k3r = dR(r3)
        k3g = 2.0 * r3
        r4 = R + h * k3r
        k4r = dR(r4)
        k4g = 2.0 * r4
        R = R + (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        G = G + (h / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
    return CoefficientState(fprime_coeffs=R, q_offsets=G, t=float(t))


def compose_flows(a: CoefficientState, b: CoefficientState) -> CoefficientState:
    """Group law: flow(t1) after flow(t2) equals flow(t1 + t2)."""
    return CoefficientState(
        fprime_coeffs=a.fprime_coeffs @ b.fprime_coeffs,
        q_offsets=a.q_offsets + a.fprime_coeffs @ b.q_offsets,
        t=a.t + b.t,
    )


def flow_generator(charges: CentralCharges) -> np.ndarray:
    """Generator of the commutant flow, from the symbolic layer.

    Expands i[H, F'_i] as an exact linear combination of the F'_j and
    returns the coefficient matrix (equal to -2 alpha); raises if the
    bracket fails to close on the commutant generators.
    """
    n = charges.n
    H = hamiltonian(charges, "anomalous")
    fprime = [commutant_action_operator(charges, j) for j in range(1, n + 1)]
    rows = []
    for i in range(1, n + 1):
        poly = commutator(H, fprime[i - 1]) * _I
        coeffs = []
        recon = WeylPolynomial.zero(n)
        for j in range(1, n + 1):
            mono = Monomial(
                (0,) * n, tuple(1 if k == j - 1 else 0 for k in range(n))
            )
            c = poly.coefficient(mono)
            if c.im != 0:
                raise ValueError("commutant flow generator is not real")
            coeffs.append(c.re)
            recon = recon + fprime[j - 1] * c
        if recon != poly:
            raise ValueError("bracket does not close on the commutant generators")
        rows.append([float(c) for c in coeffs])
    return np.array(rows)


def anomaly_report(charges: CentralCharges, t: float) -> dict:
    """Evolve each action operator under both Hamiltonians and compare.

    Under the invariant Hamiltonian every F_i is constant.  Under the naive
    one i[H0, F_i] = sum_j alpha_ij P_j is itself invariant, so the flow is
    the exact linear drift F_i(t) = F_i(0) + t sum_j alpha_ij P_j.
    """
    n = charges.n
    H = hamiltonian(charges, "anomalous")
    H0 = hamiltonian(charges, "naive")
    t = float(t)

    conserved = []
    drifts = []
    drift_matrix = np.zeros((n, n))
    nilpotent = True
    for i in range(1, n + 1):
        f = action_operator(charges, i)
        conserved.append(commutator(H, f).is_zero())
        drift = commutator(H0, f) * _I
        drifts.append(drift)
        if not (commutator(H0, drift) * _I).is_zero():
            nilpotent = False
        for j in range(1, n + 1):
            mono = Monomial(
                (0,) * n, tuple(1 if k == j - 1 else 0 for k in range(n))
            )
            drift_matrix[i - 1, j - 1] = float(drift.coefficient(mono).re)

    max_rate = float(np.max(np.abs(drift_matrix))) if n else 0.0
    return {
        "n": n,
        "t": t,
        "anomalous_flow": {
            "all_conserved": all(conserved),
            "conserved": conserved,
        },
        "naive_flow": {
            "drift_polynomials": [render_polynomial(d) for d in drifts],
            "drift_rate_matrix": drift_matrix.tolist(),
            "max_drift_rate": max_rate,
            "drift_is_time_independent": nilpotent,
            "offset_at_t": (t * drift_matrix).tolist(),
        },
        "flows_coincide": bool(max_rate == 0.0),
    }
