"""Exact oscillator levels and their arithmetic degeneracies.

Energies are E = sum_k eps_k (nu_k + 1/2) over nonnegative integer
occupations nu_k, with exact rational per-mode spacings eps_k, so level
coincidences are decided by arithmetic and never by floating point.

Two normalizations of the spacing in terms of a frequency beta_k are
shipped: "oracle" uses eps_k = 2|beta_k|, which is what diagonalizing the
single-pair quadratic Hamiltonian actually yields (see the truncated-basis
module), and "paper" uses eps_k = beta_k^2.  Spectral cross-checks bind to
the oracle normalization; the other is kept for side-by-side reporting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _iproduct

NORMALIZATIONS = ("paper", "oracle")


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


@dataclass(frozen=True)
class ModeQuanta:
    """Per-mode level spacings; zero_point is the ground-state energy."""

    epsilon: tuple
    normalization: str

    def __post_init__(self):
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if not self.epsilon:
            raise ValueError("need at least one mode")
        if any(e <= 0 for e in self.epsilon):
            raise ValueError("spacings must be positive")

    @property
    def l(self):
        return len(self.epsilon)

    @property
    def zero_point(self) -> Fraction:
        return sum(self.epsilon, Fraction(0)) / 2

    def energy_of(self, occupations) -> Fraction:
        if len(occupations) != self.l:
            raise ValueError("occupation tuple has wrong length")
        return self.zero_point + sum(
            e * v for e, v in zip(self.epsilon, occupations)
        )

    def permuted(self, order):
        return ModeQuanta(
            tuple(self.epsilon[k] for k in order), self.normalization
        )


def mode_quanta(beta, normalization: str) -> ModeQuanta:
    """Spacings from a frequency vector: eps = beta^2 (paper) or 2|beta| (oracle)."""
    betas = [_as_fraction(b) for b in beta]
    if any(b == 0 for b in betas):
        raise ValueError("zero frequency component; nonsingular charges required")
    if normalization == "paper":
        eps = tuple(b * b for b in betas)
    elif normalization == "oracle":
        eps = tuple(2 * abs(b) for b in betas)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return ModeQuanta(eps, normalization)


@dataclass
class LevelEntry:
    energy: Fraction
    degeneracy: int
    tuples: list  # occupation tuples, lexicographic


@dataclass
class SpectrumTable:
    quanta: ModeQuanta
    e_max: Fraction
    entries: list  # LevelEntry, strictly increasing energy

    @property
    def total_states(self):
        return sum(e.degeneracy for e in self.entries)

    def level_pairs(self):
        return [(e.energy, e.degeneracy) for e in self.entries]

    def as_dict(self):
        return {
            "normalization": self.quanta.normalization,
            "epsilon": [str(e) for e in self.quanta.epsilon],
            "zero_point": str(self.quanta.zero_point),
            "e_max": str(self.e_max),
            "total_states": self.total_states,
            "levels": [
                {
                    "E": str(e.energy),
                    "degeneracy": e.degeneracy,
                    "tuples": [list(t) for t in e.tuples],
                }
                for e in self.entries
            ],
        }

    def to_tsv(self) -> str:
        lines = ["E\tdegeneracy\ttuples"]
        for e in self.entries:
            tuples = ";".join(",".join(str(v) for v in t) for t in e.tuples)
            lines.append(f"{e.energy}\t{e.degeneracy}\t{tuples}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["E,degeneracy"]
        for e in self.entries:
            lines.append(f"{float(e.energy)!r},{e.degeneracy}")
        return "\n".join(lines) + "\n"


def _search_order(quanta):
    # biggest spacing first: prunes the depth-first walk hardest
    return sorted(range(quanta.l), key=lambda k: (-quanta.epsilon[k], k))


def enumerate_levels(quanta: ModeQuanta, e_max) -> SpectrumTable:
    """All levels with E <= e_max, each with its complete occupation list."""
    e_max = _as_fraction(e_max)
    levels = {}
    budget = e_max - quanta.zero_point
    if budget >= 0:
        order = _search_order(quanta)
        occ = [0] * quanta.l

        def walk(depth, remaining):
            if depth == quanta.l:
                energy = e_max - remaining
                levels.setdefault(energy, []).append(tuple(occ))
                return
            k = order[depth]
            eps = quanta.epsilon[k]
            for v in range(int(remaining / eps) + 1):
                occ[k] = v
                walk(depth + 1, remaining - v * eps)
            occ[k] = 0

        walk(0, budget)

    entries = [
        LevelEntry(energy=e, degeneracy=len(tuples), tuples=sorted(tuples))
        for e, tuples in sorted(levels.items())
    ]
    return SpectrumTable(quanta=quanta, e_max=e_max, entries=entries)


def degeneracy_of(quanta: ModeQuanta, energy):
    """Exact (count, tuples) for one level; (0, []) when E is not a level."""
    target = _as_fraction(energy) - quanta.zero_point
    found = []
    if target >= 0:
        order = _search_order(quanta)
        occ = [0] * quanta.l

        def walk(depth, remaining):
            k = order[depth]
            eps = quanta.epsilon[k]
            if depth == quanta.l - 1:
                v, rem = divmod(remaining, eps)
                if rem == 0:
                    occ[k] = int(v)
                    found.append(tuple(occ))
                    occ[k] = 0
                return
            for v in range(int(remaining / eps) + 1):
                occ[k] = v
                walk(depth + 1, remaining - v * eps)
            occ[k] = 0

        walk(0, target)
    return len(found), sorted(found)


def brute_force_count(quanta: ModeQuanta, energy) -> int:
    """Independent oracle: exhaustive nested iteration, no pruning.

    Walks the full box nu_k <= (E - zero_point) / eps_k and counts exact
    hits; kept deliberately naive so it cross-checks degeneracy_of.
    """
    target = _as_fraction(energy) - quanta.zero_point
    if target < 0:
        return 0
    bounds = [int(target / e) for e in quanta.epsilon]
    count = 0
    for occ in _iproduct(*(range(b + 1) for b in bounds)):
        total = Fraction(0)
        for e, v in zip(quanta.epsilon, occ):
            total += e * v
        if total == target:
            count += 1
    return count
