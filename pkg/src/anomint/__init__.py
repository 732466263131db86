"""Toolkit for exactly solvable quantum systems with central charges.

Exact operator algebra over canonical generators, canonical forms of
antisymmetric charge matrices, oscillator spectra with arithmetic
degeneracies, Weyl-group invariance checks, truncated-basis numerics and
Heisenberg-picture flows, plus a CLI tying them together.
"""

from anomint.algebra import (
    CentralCharges,
    GaussianRational,
    Monomial,
    NotAntisymmetric,
    OddDimension,
    WeylPolynomial,
    action_operator,
    commutant_action_operator,
    commutator,
    hamiltonian,
    parse_polynomial,
    product,
    render_polynomial,
    verify_identity_suite,
)

__version__ = "0.1.0"
