"""Canonical-form tests; the frequency oracle is numpy's Hermitian solve of iA."""

import numpy as np
import pytest

from anomint.algebra import CentralCharges, NotAntisymmetric, OddDimension
from anomint.skew import (
    CanonicalForm,
    SingularCharges,
    canonicalize,
    cartan_frequencies,
    cartan_matrix,
    is_cartan_form,
    jacobi_eigh_symmetric,
)


def oracle_frequencies(A):
    """Positive imaginary parts of the eigenvalues of A, descending."""
    w = np.linalg.eigvalsh(1j * np.asarray(A, dtype=float))
    pos = np.sort(w[w > 0])[::-1]
    return pos


def random_antisymmetric(rng, n, scale=1.0):
    X = rng.normal(size=(n, n)) * scale
    return (X - X.T) / 2.0


def test_already_canonical():
    form = canonicalize([[0.0, 3.0], [-3.0, 0.0]])
    assert np.array_equal(form.M, np.eye(2))
    assert form.detM == 1
    assert np.allclose(form.beta, [3.0], rtol=0, atol=1e-14)


def test_single_reflection():
    form = canonicalize([[0.0, -2.0], [2.0, 0.0]])
    assert np.array_equal(form.M, np.diag([1.0, -1.0]))
    assert form.detM == -1
    assert np.allclose(form.beta, [2.0], rtol=0, atol=1e-14)
    A = np.array([[0.0, -2.0], [2.0, 0.0]])
    assert np.max(np.abs(form.M @ A @ form.M.T - cartan_matrix([2.0]))) < 1e-14


def test_random_6x6_matches_eigh_oracle():
    rng = np.random.default_rng(42)
    A = random_antisymmetric(rng, 6)
    form = canonicalize(A)
    assert np.allclose(form.beta, oracle_frequencies(A), atol=1e-9, rtol=0)


def test_zero_matrix_is_singular():
    with pytest.raises(SingularCharges):
        canonicalize(np.zeros((4, 4)))


def test_rank_deficient_is_singular():
    # beta = (1, 0) block matrix has a zero frequency pair
    A = cartan_matrix([1.0, 0.0])
    with pytest.raises(SingularCharges):
        canonicalize(A)


def test_odd_dimension_rejected():
    with pytest.raises(OddDimension):
        canonicalize(np.zeros((3, 3)))


def test_not_antisymmetric_rejected():
    with pytest.raises(NotAntisymmetric):
        canonicalize(np.array([[0.0, 1.0], [-1.0 + 1e-6, 0.0]]))


def test_accepts_central_charges():
    ch = CentralCharges.from_upper_entries(2, {(1, 2): "3/2"})
    form = canonicalize(ch)
    assert np.allclose(form.beta, [1.5], atol=1e-14, rtol=0)


def test_invariants_random_sizes():
    rng = np.random.default_rng(7)
    for n in (2, 4, 6, 8, 10, 12):
        for _ in range(5):
            A = random_antisymmetric(rng, n)
            if oracle_frequencies(A).min() < 1e-6:
                continue
            form = canonicalize(A)
            scale = np.max(np.abs(A))
            assert form.orthogonality_error <= 1e-10
            assert form.reconstruction_error <= 1e-10 * scale
            # round trip back to A
            back = form.M.T @ form.C @ form.M
            assert np.max(np.abs(back - A)) <= 1e-10 * scale
            assert np.all(form.beta[:-1] >= form.beta[1:])
            assert np.all(form.beta > 0)
            assert is_cartan_form(form.C, 1e-12)


def test_spectral_consistency():
    rng = np.random.default_rng(11)
    A = random_antisymmetric(rng, 8)
    form = canonicalize(A)
    ev_a = np.linalg.eigvals(A)
    ev_c = np.linalg.eigvals(form.C)
    # eigenvalues of an antisymmetric matrix are +-i beta_k; real parts are noise
    assert np.max(np.abs(ev_a.real)) < 1e-12
    assert np.allclose(np.sort(ev_a.imag), np.sort(ev_c.imag), atol=1e-9)


def test_scale_equivariance():
    rng = np.random.default_rng(13)
    A = random_antisymmetric(rng, 6)
    base = canonicalize(A)
    for s in (2.0, -3.5, 0.25):
        scaled = canonicalize(s * A)
        assert np.allclose(scaled.beta, abs(s) * base.beta, rtol=1e-9, atol=0)


def test_determinism_bit_identical():
    rng = np.random.default_rng(17)
    A = random_antisymmetric(rng, 8)
    f1 = canonicalize(A)
    f2 = canonicalize(A)
    assert np.array_equal(f1.M, f2.M)
    assert np.array_equal(f1.beta, f2.beta)
    assert f1.detM == f2.detM


def test_degenerate_frequencies():
    # two equal frequencies, then hidden by a random rotation
    rng = np.random.default_rng(23)
    C = cartan_matrix([2.0, 2.0])
    Q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    A = Q @ C @ Q.T
    form = canonicalize(A)
    assert np.allclose(form.beta, [2.0, 2.0], atol=1e-10, rtol=0)
    assert form.orthogonality_error <= 1e-10
    assert form.reconstruction_error <= 1e-10 * 2.0


def test_triple_degenerate_frequencies():
    rng = np.random.default_rng(29)
    C = cartan_matrix([1.0, 1.0, 1.0])
    Q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    A = Q @ C @ Q.T
    form = canonicalize(A)
    assert np.allclose(form.beta, [1.0, 1.0, 1.0], atol=1e-10, rtol=0)
    assert form.reconstruction_error <= 1e-10


def test_is_cartan_form_cases():
    assert is_cartan_form(np.zeros((4, 4)), 1e-12)
    assert is_cartan_form(cartan_matrix([3.0, 1.0]), 1e-12)
    # antisymmetric but not block-Cartan
    A = np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [-1.0, 0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ]
    )
    assert not is_cartan_form(A, 1e-12)
    assert not is_cartan_form(np.zeros((3, 3)), 1e-12)  # odd size
    B = cartan_matrix([2.0, 1.0])
    B[0, 1] = 0.5
    B[1, 0] = -0.5
    assert not is_cartan_form(B, 1e-12)


def test_cartan_frequencies_reads_back():
    assert np.array_equal(cartan_frequencies(cartan_matrix([5.0, 2.0])), [5.0, 2.0])


def test_jacobi_against_numpy():
    rng = np.random.default_rng(31)
    for n in (3, 6, 10):
        X = rng.normal(size=(n, n))
        S = (X + X.T) / 2.0
        w, V = jacobi_eigh_symmetric(S)
        assert np.max(np.abs(V @ np.diag(w) @ V.T - S)) < 1e-12 * max(1, np.max(np.abs(S)))
        assert np.max(np.abs(V @ V.T - np.eye(n))) < 1e-13
        assert np.allclose(np.sort(w), np.linalg.eigvalsh(S), atol=1e-11)


def test_as_dict_fields():
    d = canonicalize([[0.0, 3.0], [-3.0, 0.0]]).as_dict()
    assert set(d) == {"M", "beta", "detM", "C"}
    assert d["beta"] == [3.0]
    assert d["detM"] == 1
