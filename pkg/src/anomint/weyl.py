"""Signed permutations acting on frequency vectors and Cartan forms.

The residual symmetry group of the canonical block form is realized as
permutations of the l mode pairs combined with sign flips of individual
frequencies.  An even number of flips ("D" kind) is what the special
orthogonal setting allows; the full hyperoctahedral group ("B", odd flips
included) is available behind a flag since the spectrum is invariant under
it as well.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import permutations as _perms
from itertools import product as _iproduct

import numpy as np

from anomint.skew import cartan_frequencies, cartan_matrix, is_cartan_form
from anomint.spectrum import enumerate_levels, mode_quanta

DEFAULT_MAX_L = 6
MAX_L_ENV = "ANOMINT_MAX_L"


@dataclass(frozen=True)
class SignedPermutation:
    """perm[j] is the image slot of mode j; signs[k] flips the k-th image."""

    perm: tuple
    signs: tuple

    def __post_init__(self):
        l = len(self.perm)
        if sorted(self.perm) != list(range(l)) or len(self.signs) != l:
            raise ValueError("malformed signed permutation")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +-1")

    @property
    def l(self):
        return len(self.perm)

    @property
    def flips(self):
        return sum(1 for s in self.signs if s == -1)

    @property
    def is_even(self):
        return self.flips % 2 == 0

    def inverse_perm(self):
        inv = [0] * self.l
        for j, k in enumerate(self.perm):
            inv[k] = j
        return tuple(inv)

    @classmethod
    def identity(cls, l):
        return cls(tuple(range(l)), (1,) * l)


def compose(w1: SignedPermutation, w2: SignedPermutation) -> SignedPermutation:
    """w1 after w2: act(compose(w1, w2), x) == act(w1, act(w2, x))."""
    if w1.l != w2.l:
        raise ValueError("length mismatch")
    perm = tuple(w1.perm[w2.perm[j]] for j in range(w1.l))
    inv1 = w1.inverse_perm()
    signs = tuple(w1.signs[k] * w2.signs[inv1[k]] for k in range(w1.l))
    return SignedPermutation(perm, signs)


def inverse(w: SignedPermutation) -> SignedPermutation:
    signs = tuple(w.signs[w.perm[k]] for k in range(w.l))
    return SignedPermutation(w.inverse_perm(), signs)


def act_on_beta(w: SignedPermutation, beta):
    """Signed permutation action: out[k] = signs[k] * beta[perm^-1(k)]."""
    if len(beta) != w.l:
        raise ValueError("length mismatch")
    inv = w.inverse_perm()
    return tuple(w.signs[k] * beta[inv[k]] for k in range(w.l))


def _max_l(max_l=None):
    if max_l is not None:
        return max_l
    env = os.environ.get(MAX_L_ENV)
    return int(env) if env else DEFAULT_MAX_L


def generate_weyl_group(l: int, group: str = "D", max_l=None):
    """Full group, no duplicates, identity first, lexicographic order.

    group="D" keeps an even number of sign flips (order 2^(l-1) l!);
    group="B" is the full hyperoctahedral group (order 2^l l!).
    """
    if l < 1:
        raise ValueError("l must be positive")
    bound = _max_l(max_l)
    if l > bound:
        raise ValueError(
            f"l={l} exceeds enumeration bound {bound} (raise {MAX_L_ENV})"
        )
    if group not in ("D", "B"):
        raise ValueError(f"unknown group kind {group!r}")
    out = []
    for perm in _perms(range(l)):
        for flips in _iproduct((0, 1), repeat=l):
            if group == "D" and sum(flips) % 2:
                continue
            signs = tuple(-1 if f else 1 for f in flips)
            out.append(SignedPermutation(perm, signs))
    return out


def matrix(w: SignedPermutation) -> np.ndarray:
    """Orthogonal 2l x 2l block realization on (I_1..I_l, J_1..J_l) rows.

    A sign flip exchanges the I and J rows of its mode pair, which negates
    that frequency while keeping the Cartan block structure.
    """
    l = w.l
    M = np.zeros((2 * l, 2 * l))
    inv = w.inverse_perm()
    for k in range(l):
        src = inv[k]
        if w.signs[k] == 1:
            M[k, src] = 1.0
            M[l + k, l + src] = 1.0
        else:
            M[k, l + src] = 1.0
            M[l + k, src] = 1.0
    return M


def act_on_cartan(w: SignedPermutation, C, tol=1e-10) -> np.ndarray:
    """Conjugate a Cartan-form matrix by the block realization of w."""
    C = np.asarray(C, dtype=float)
    scale = max(1.0, float(np.max(np.abs(C)))) if C.size else 1.0
    if not is_cartan_form(C, tol * scale):
        raise ValueError("input matrix is not in Cartan block form")
    if C.shape[0] != 2 * w.l:
        raise ValueError("length mismatch")
    M = matrix(w)
    return M @ C @ M.T


@dataclass
class InvarianceReport:
    l: int
    group: str
    order: int
    beta: tuple
    normalization: str
    e_max: object
    reference_levels: list        # (E, degeneracy)
    element_results: list         # (SignedPermutation, bool)
    orbit_summary: list

    @property
    def all_invariant(self):
        return all(ok for _, ok in self.element_results)

    def as_dict(self):
        return {
            "l": self.l,
            "group": self.group,
            "order": self.order,
            "beta": [str(b) for b in self.beta],
            "normalization": self.normalization,
            "e_max": str(self.e_max),
            "all_invariant": self.all_invariant,
            "levels": [
                {"E": str(e), "degeneracy": d} for e, d in self.reference_levels
            ],
            "elements": [
                {
                    "perm": list(w.perm),
                    "signs": list(w.signs),
                    "invariant": ok,
                }
                for w, ok in self.element_results
            ],
            "orbit_summary": self.orbit_summary,
        }


def _orbit_summary(table):
    """Group each level's tuples into mode-permutation orbits."""
    summary = []
    for entry in table.entries:
        orbits = {}
        for t in entry.tuples:
            orbits.setdefault(tuple(sorted(t)), []).append(t)
        closed = all(
            len(members) == _distinct_permutation_count(key)
            for key, members in orbits.items()
        )
        summary.append(
            {
                "E": str(entry.energy),
                "degeneracy": entry.degeneracy,
                "orbits": len(orbits),
                "orbit_sizes": sorted((len(m) for m in orbits.values()), reverse=True),
                "closed_under_mode_permutations": closed,
            }
        )
    return summary


def _distinct_permutation_count(sorted_tuple):
    import math

    total = math.factorial(len(sorted_tuple))
    run = 1
    for a, b in zip(sorted_tuple, sorted_tuple[1:]):
        if a == b:
            run += 1
            total //= run
        else:
            run = 1
    return total


def verify_spectrum_invariance(
    beta, normalization, e_max, group="D", max_l=None
) -> InvarianceReport:
    """Check every group element leaves the (E, degeneracy) table unchanged."""
    elements = generate_weyl_group(len(beta), group=group, max_l=max_l)
    quanta = mode_quanta(beta, normalization)
    reference = enumerate_levels(quanta, e_max)
    ref_pairs = reference.level_pairs()
    results = []
    for w in elements:
        moved = act_on_beta(w, tuple(quanta_input(beta)))
        pairs = enumerate_levels(mode_quanta(moved, normalization), e_max).level_pairs()
        results.append((w, pairs == ref_pairs))
    return InvarianceReport(
        l=len(beta),
        group=group,
        order=len(elements),
        beta=tuple(quanta_input(beta)),
        normalization=normalization,
        e_max=e_max,
        reference_levels=ref_pairs,
        element_results=results,
        orbit_summary=_orbit_summary(reference),
    )


def quanta_input(beta):
    from fractions import Fraction

    return [b if isinstance(b, Fraction) else Fraction(b) for b in beta]
