"""Canonical block form of real antisymmetric matrices under orthogonal congruence.

For nonsingular antisymmetric A of even size 2l the routine produces an
orthogonal M with

    M A M^T = C = [[0, B], [-B, 0]],   B = diag(beta_1 .. beta_l),

with strictly positive frequencies beta_k sorted in descending order.  M is
taken from the full orthogonal group: restricting to determinant +1 would
pin the sign of the product of the beta_k, so the sign is reported in detM
instead.  Everything is deterministic for a given input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from anomint.algebra import CentralCharges, NotAntisymmetric, OddDimension


class SingularCharges(ValueError):
    """Charge matrix is (numerically) singular where nonsingularity is required."""


def jacobi_eigh_symmetric(S, tol=1e-14, max_sweeps=60):
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns (eigenvalues, V) with S = V diag(w) V^T, V orthogonal with
    columns as eigenvectors, in the raw (unsorted) order.
    """
    A = np.array(S, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    V = np.eye(n)
    norm = np.linalg.norm(A)
    if norm == 0.0:
        return np.zeros(n), V
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A[offdiag]))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0)
                )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * A[:, p] - s * A[:, q]
                rot_q = s * A[:, p] + c * A[:, q]
                A[:, p], A[:, q] = rot_p, rot_q
                row_p = c * A[p, :] - s * A[q, :]
                row_q = s * A[p, :] + c * A[q, :]
                A[p, :], A[q, :] = row_p, row_q
                vp = c * V[:, p] - s * V[:, q]
                vq = s * V[:, p] + c * V[:, q]
                V[:, p], V[:, q] = vp, vq
    return np.diag(A).copy(), V


@dataclass
class CanonicalForm:
    M: np.ndarray          # orthogonal, rows (v_1..v_l, w_1..w_l)
    beta: np.ndarray       # positive frequencies, descending
    detM: int              # +1 or -1
    C: np.ndarray          # [[0, B], [-B, 0]] rebuilt from beta
    orthogonality_error: float
    reconstruction_error: float

    @property
    def l(self):
        return len(self.beta)

    def as_dict(self):
        return {
            "M": [[float(x) for x in row] for row in self.M],
            "beta": [float(b) for b in self.beta],
            "detM": int(self.detM),
            "C": [[float(x) for x in row] for row in self.C],
        }


def _as_antisymmetric_array(charges, antisym_tol=1e-12):
    if isinstance(charges, CentralCharges):
        A = np.array(charges.float_rows(), dtype=float)
    else:
        A = np.array(charges, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("charge matrix must be square")
    n = A.shape[0]
    if n % 2:
        raise OddDimension(f"dimension {n} is odd; frequency pairing needs 2l")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A + A.T)) > antisym_tol * scale:
        raise NotAntisymmetric("matrix is not antisymmetric within tolerance")
    return (A - A.T) / 2.0  # exactly antisymmetric from here on


def cartan_matrix(beta) -> np.ndarray:
    """Assemble [[0, B], [-B, 0]] from a frequency vector."""
    beta = np.asarray(beta, dtype=float)
    l = len(beta)
    C = np.zeros((2 * l, 2 * l))
    for k in range(l):
        C[k, l + k] = beta[k]
        C[l + k, k] = -beta[k]
    return C


def canonicalize(charges, tol=None) -> CanonicalForm:
    """Orthogonal congruence of an antisymmetric matrix to Cartan block form.

    The symmetric matrix S = A^T A is diagonalized by cyclic Jacobi; its
    eigenvalues pair up as beta_k^2.  Each unit eigenvector v gives the
    partner row w = -A v / beta, which lands M A M^T on [[0,B],[-B,0]].
    Degenerate frequency clusters are split by greedy re-orthogonalization
    against already chosen pairs (largest remaining projection first), which
    keeps the output deterministic.
    """
    A = _as_antisymmetric_array(charges)
    n = A.shape[0]
    scale = float(np.max(np.abs(A)))
    if tol is None:
        tol = 1e-12 * max(scale, 1e-300)
    if scale == 0.0:
        raise SingularCharges("zero charge matrix")

    S = A.T @ A
    eigvals, V = jacobi_eigh_symmetric(S)
    order = np.argsort(-eigvals, kind="stable")
    eigvals = eigvals[order]
    V = V[:, order]

    if math.sqrt(max(eigvals[-1], 0.0)) <= tol:
        raise SingularCharges(
            f"smallest frequency {math.sqrt(max(eigvals[-1], 0.0)):.3e} at or below "
            f"threshold {tol:.3e}"
        )

    # group close eigenvalues of S so repeated (or nearly repeated)
    # frequencies are paired inside their joint eigenspace; a wide tolerance
    # is safe because each pair's frequency is measured per vector as |A v|,
    # while a narrow one would let w = -A v / beta bleed across near-
    # degenerate eigenspaces and spoil the orthogonality of M
    cluster_tol = 1e-4 * max(float(eigvals[0]), 1e-300)
    clusters = []
    start = 0
    for k in range(1, n + 1):
        if k == n or eigvals[k] < eigvals[start] - cluster_tol:
            clusters.append(list(range(start, k)))
            start = k

    pairs = []  # (beta_k, v_k, w_k)
    for cluster in clusters:
        basis = [V[:, j].copy() for j in cluster]
        while basis:
            v = basis[0]
            # sign convention: largest-magnitude component positive
            imax = int(np.argmax(np.abs(v)))
            if v[imax] < 0:
                v = -v
            v = v / np.linalg.norm(v)
            Av = A @ v
            beta = float(np.linalg.norm(Av))
            w = -Av / beta
            pairs.append((beta, v, w))
            # greedy orthonormal completion of the remaining eigenspace
            remaining = []
            for u in basis[1:]:
                u2 = u - v * (v @ u) - w * (w @ u)
                remaining.append(u2)
            kept = []
            target = len(basis) - 2
            while len(kept) < target:
                norms = [np.linalg.norm(u) for u in remaining]
                pick = int(np.argmax(norms))
                u = remaining.pop(pick) / norms[pick]
                kept.append(u)
                remaining = [r - u * (u @ r) for r in remaining]
            basis = kept

    pairs.sort(key=lambda item: -item[0])
    beta = np.array([b for b, _, _ in pairs])
    M = np.vstack([v for _, v, _ in pairs] + [w for _, _, w in pairs])
    detM = 1 if np.linalg.det(M) > 0 else -1
    C = cartan_matrix(beta)

    orth_err = float(np.max(np.abs(M @ M.T - np.eye(n))))
    recon_err = float(np.max(np.abs(M @ A @ M.T - C)))
    return CanonicalForm(
        M=M,
        beta=beta,
        detM=detM,
        C=C,
        orthogonality_error=orth_err,
        reconstruction_error=recon_err,
    )


def is_cartan_form(X, tol) -> bool:
    """True iff X is antisymmetric [[0, B], [-B, 0]] with diagonal B, within tol."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] % 2:
        return False
    n = X.shape[0]
    l = n // 2
    if np.max(np.abs(X + X.T)) > tol:
        return False
    if np.max(np.abs(X[:l, :l])) > tol or np.max(np.abs(X[l:, l:])) > tol:
        return False
    B = X[:l, l:]
    off = B - np.diag(np.diag(B))
    return bool(np.max(np.abs(off)) <= tol) if l else True


def cartan_frequencies(C) -> np.ndarray:
    """Read the diagonal of B out of a Cartan-form matrix."""
    C = np.asarray(C, dtype=float)
    l = C.shape[0] // 2
    return np.diag(C[:l, l:]).copy()
