"""Exact normal-ordered operator algebra over canonical generators.

Generators are Q_1..Q_n (multiplication operators) and P_1..P_n (derivative
operators), with the single nontrivial bracket

    [P_i, Q_i] = -i        (all other generator pairs commute)

so the rewrite rule for normal ordering (every Q factor left of every P
factor) is  P_i Q_i -> Q_i P_i - i.  Coefficients are Gaussian rationals,
so every identity check below is exact: a residual is zero or it is not.
"""

from __future__ import annotations

import math
import re as _re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as _iproduct
from typing import Iterable, NamedTuple


class NotAntisymmetric(ValueError):
    """Charge matrix is not exactly antisymmetric."""


class OddDimension(ValueError):
    """Operation requires an even number of generators."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


class GaussianRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _as_fraction(re)
        self.im = _as_fraction(im)

    def __add__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = _coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if b == 0:  # fast paths: most coefficients in practice are real
            if a == 1:
                return other
            return GaussianRational(a * c, a * d)
        if d == 0:
            return GaussianRational(a * c, b * c)
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianRational((a * c + b * d) / n, (b * c - a * d) / n)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        return format_scalar(self)


def _coerce(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    if isinstance(x, str):
        return GaussianRational(Fraction(x))
    raise TypeError(f"cannot interpret {x!r} as a Gaussian rational")


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)

# (-i)^k for k mod 4, used by the normal-ordering contraction formula
_MINUS_I_POW = (
    GaussianRational(1),
    GaussianRational(0, -1),
    GaussianRational(-1),
    GaussianRational(0, 1),
)


class Monomial(NamedTuple):
    """Normal-ordered monomial Q_1^a1 .. Q_n^an P_1^b1 .. P_n^bn."""

    q_exponents: tuple
    p_exponents: tuple

    @property
    def degree(self):
        return sum(self.q_exponents) + sum(self.p_exponents)


def _monomial_pairs(m1: Monomial, m2: Monomial):
    """Expand (m1 * m2) into normal-ordered (Monomial, coefficient) pairs.

    Moving P_i^b past Q_i^c with a central bracket [P_i, Q_i] = -i gives

        P^b Q^c = sum_k  k! C(b,k) C(c,k) (-i)^k  Q^(c-k) P^(b-k).
    """
    q1, p1 = m1
    q2, p2 = m2
    n = len(q1)
    base_q = [q1[i] + q2[i] for i in range(n)]
    base_p = [p1[i] + p2[i] for i in range(n)]
    hot = [i for i in range(n) if p1[i] and q2[i]]
    if not hot:
        yield Monomial(tuple(base_q), tuple(base_p)), ONE
        return
    ranges = [range(min(p1[i], q2[i]) + 1) for i in hot]
    for ks in _iproduct(*ranges):
        weight = 1
        k_total = 0
        q = base_q[:]
        p = base_p[:]
        for i, k in zip(hot, ks):
            if k:
                weight *= math.factorial(k) * math.comb(p1[i], k) * math.comb(q2[i], k)
                k_total += k
                q[i] -= k
                p[i] -= k
        yield Monomial(tuple(q), tuple(p)), weight * _MINUS_I_POW[k_total % 4]


class WeylPolynomial:
    """Sparse normal-ordered polynomial: map Monomial -> GaussianRational."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms = {}
        if terms:
            for mono, coeff in terms.items() if isinstance(terms, dict) else terms:
                coeff = _coerce(coeff)
                if coeff:
                    acc = self.terms.get(mono)
                    new = coeff if acc is None else acc + coeff
                    if new:
                        self.terms[mono] = new
                    elif acc is not None:
                        del self.terms[mono]

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def constant(cls, value, n):
        return cls(n, {Monomial((0,) * n, (0,) * n): _coerce(value)})

    @classmethod
    def q(cls, i, n):
        """Angle generator Q_i, 1-based index."""
        _check_index(i, n)
        e = tuple(1 if j == i - 1 else 0 for j in range(n))
        return cls(n, {Monomial(e, (0,) * n): ONE})

    @classmethod
    def p(cls, i, n):
        """Derivative generator P_i, 1-based index."""
        _check_index(i, n)
        e = tuple(1 if j == i - 1 else 0 for j in range(n))
        return cls(n, {Monomial((0,) * n, e): ONE})

    # -- ring operations ----------------------------------------------

    def _check_same(self, other):
        if self.n != other.n:
            raise ValueError(
                f"generator count mismatch: {self.n} != {other.n}"
            )

    def __add__(self, other):
        if not isinstance(other, WeylPolynomial):
            other = WeylPolynomial.constant(other, self.n)
        self._check_same(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc = out.get(mono)
            new = coeff if acc is None else acc + coeff
            if new:
                out[mono] = new
            elif acc is not None:
                del out[mono]
        res = WeylPolynomial(self.n)
        res.terms = out
        return res

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, WeylPolynomial):
            other = WeylPolynomial.constant(other, self.n)
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return self.__neg__().__add__(other)

    def __neg__(self):
        res = WeylPolynomial(self.n)
        res.terms = {m: -c for m, c in self.terms.items()}
        return res

    def __mul__(self, other):
        if isinstance(other, WeylPolynomial):
            return product(self, other)
        coeff = _coerce(other)
        if not coeff:
            return WeylPolynomial(self.n)
        res = WeylPolynomial(self.n)
        res.terms = {m: c * coeff for m, c in self.terms.items()}
        return res

    def __rmul__(self, other):
        # scalars commute with everything; polynomial * is handled by __mul__
        return self.__mul__(other)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        out = WeylPolynomial.constant(1, self.n)
        for _ in range(k):
            out = product(out, self)
        return out

    def __eq__(self, other):
        if not isinstance(other, WeylPolynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    @property
    def total_degree(self):
        return max((m.degree for m in self.terms), default=0)

    def coefficient(self, mono: Monomial) -> GaussianRational:
        return self.terms.get(mono, ZERO)

    def constant_term(self) -> GaussianRational:
        return self.terms.get(Monomial((0,) * self.n, (0,) * self.n), ZERO)

    def adjoint(self):
        """Formal adjoint: conjugate coefficients, reverse factor order."""
        out = WeylPolynomial(self.n)
        zq = (0,) * self.n
        for mono, coeff in self.terms.items():
            # (Q^a P^b)+ = P^b Q^a, then renormal-order
            flipped = product_monomials(
                Monomial(zq, mono.p_exponents), Monomial(mono.q_exponents, zq)
            )
            out = out + flipped * coeff.conjugate()
        return out

    def __repr__(self):
        return f"<WeylPolynomial n={self.n}: {render_polynomial(self)}>"


def _check_index(i, n):
    if not 1 <= i <= n:
        raise IndexError(f"generator index {i} out of range 1..{n}")


def product_monomials(m1: Monomial, m2: Monomial) -> WeylPolynomial:
    n = len(m1.q_exponents)
    return WeylPolynomial(n, list(_monomial_pairs(m1, m2)))


def product(a: WeylPolynomial, b: WeylPolynomial) -> WeylPolynomial:
    """Normal-ordered product of two polynomials, exact."""
    a._check_same(b)
    out = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            c12 = c1 * c2
            for mono, w in _monomial_pairs(m1, m2):
                acc = out.get(mono)
                new = c12 * w if acc is None else acc + c12 * w
                if new:
                    out[mono] = new
                elif acc is not None:
                    del out[mono]
    res = WeylPolynomial(a.n)
    res.terms = out
    return res


def commutator(a: WeylPolynomial, b: WeylPolynomial) -> WeylPolynomial:
    """[a, b] = ab - ba, normal-ordered, exact."""
    return product(a, b) - product(b, a)


# ---------------------------------------------------------------------------
# central charges and the operators built from them
# ---------------------------------------------------------------------------


class CentralCharges:
    """Real antisymmetric matrix of central charges, exact rational entries.

    alpha[i][j] is the bracket constant in [X_i, X_j] = i alpha_ij for the
    centrally extended translation algebra.  Antisymmetry is enforced
    exactly at construction.
    """

    __slots__ = ("n", "alpha")

    def __init__(self, rows: Iterable[Iterable]):
        alpha = tuple(tuple(_as_fraction(x) for x in row) for row in rows)
        n = len(alpha)
        if n == 0 or any(len(row) != n for row in alpha):
            raise ValueError("charge matrix must be square and nonempty")
        for i in range(n):
            for j in range(i, n):
                if alpha[i][j] != -alpha[j][i]:
                    raise NotAntisymmetric(
                        f"alpha[{i + 1}][{j + 1}] != -alpha[{j + 1}][{i + 1}]"
                    )
        self.n = n
        self.alpha = alpha

    @classmethod
    def zeros(cls, n):
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def from_upper_entries(cls, n, entries: dict):
        """Build from {(i, j): value} with 1-based i < j; rest antisymmetric."""
        rows = [[Fraction(0)] * n for _ in range(n)]
        for (i, j), v in entries.items():
            if not (1 <= i < j <= n):
                raise IndexError(f"upper entry index ({i},{j}) out of range")
            rows[i - 1][j - 1] = _as_fraction(v)
            rows[j - 1][i - 1] = -_as_fraction(v)
        return cls(rows)

    def entry(self, i, j) -> Fraction:
        """alpha_ij with 1-based indices."""
        _check_index(i, self.n)
        _check_index(j, self.n)
        return self.alpha[i - 1][j - 1]

    def is_zero(self):
        return all(x == 0 for row in self.alpha for x in row)

    def float_rows(self):
        return [[float(x) for x in row] for row in self.alpha]

    def scaled(self, s):
        s = _as_fraction(s)
        return CentralCharges([[x * s for x in row] for row in self.alpha])

    def __eq__(self, other):
        if not isinstance(other, CentralCharges):
            return NotImplemented
        return self.alpha == other.alpha

    def __hash__(self):
        return hash(self.alpha)

    def __repr__(self):
        return f"CentralCharges(n={self.n})"


def action_operator(charges: CentralCharges, i: int) -> WeylPolynomial:
    """Conserved generator for the extended algebra: P_i + (1/2) sum_j alpha_ij Q_j."""
    n = charges.n
    _check_index(i, n)
    out = WeylPolynomial.p(i, n)
    for j in range(1, n + 1):
        a = charges.entry(i, j)
        if a:
            out = out + WeylPolynomial.q(j, n) * Fraction(a, 2)
    return out


def commutant_action_operator(charges: CentralCharges, i: int) -> WeylPolynomial:
    """Partner generator with opposite-sign charges: P_i - (1/2) sum_j alpha_ij Q_j.

    These commute with every action_operator and close on brackets
    [.,.] = -i alpha, so they generate the commutant of the action algebra.
    """
    n = charges.n
    _check_index(i, n)
    out = WeylPolynomial.p(i, n)
    for j in range(1, n + 1):
        a = charges.entry(i, j)
        if a:
            out = out - WeylPolynomial.q(j, n) * Fraction(a, 2)
    return out


def hamiltonian(charges: CentralCharges, variant: str = "anomalous") -> WeylPolynomial:
    """Quadratic Hamiltonian.

    variant="anomalous": sum of squared commutant generators (the invariant
    choice for nonzero charges); variant="naive": sum_i P_i^2, correct only
    when all charges vanish.
    """
    n = charges.n
    out = WeylPolynomial.zero(n)
    if variant == "anomalous":
        for i in range(1, n + 1):
            f = commutant_action_operator(charges, i)
            out = out + product(f, f)
    elif variant == "naive":
        for i in range(1, n + 1):
            p = WeylPolynomial.p(i, n)
            out = out + product(p, p)
    else:
        raise ValueError(f"unknown Hamiltonian variant {variant!r}")
    return out


# ---------------------------------------------------------------------------
# identity suite
# ---------------------------------------------------------------------------


@dataclass
class IdentityCheck:
    name: str
    statement: str
    residuals: list = field(default_factory=list)  # (label, WeylPolynomial)

    @property
    def passed(self):
        return all(r.is_zero() for _, r in self.residuals)

    def nonzero(self):
        return [(label, r) for label, r in self.residuals if not r.is_zero()]


@dataclass
class IdentitySuiteReport:
    n: int
    checks: list

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {
            "n": self.n,
            "all_passed": self.all_passed,
            "checks": [
                {
                    "name": c.name,
                    "statement": c.statement,
                    "passed": c.passed,
                    "nonzero_residuals": [
                        {"indices": label, "residual": render_polynomial(r)}
                        for label, r in c.nonzero()
                    ],
                }
                for c in self.checks
            ],
        }


def verify_identity_suite(charges: CentralCharges) -> IdentitySuiteReport:
    """Verify every bracket identity of the extended algebra, exactly.

    All residuals must come out as the zero polynomial.  Note the bracket of
    the naive Hamiltonian with an action operator is -i sum_j alpha_ij P_j
    (the non-conservation term); the sign follows from [P_i, Q_i] = -i and
    is confirmed independently by the truncated-basis numerics.
    """
    n = charges.n
    F = [action_operator(charges, i) for i in range(1, n + 1)]
    Fp = [commutant_action_operator(charges, i) for i in range(1, n + 1)]
    Q = [WeylPolynomial.q(i, n) for i in range(1, n + 1)]
    P = [WeylPolynomial.p(i, n) for i in range(1, n + 1)]
    H = hamiltonian(charges, "anomalous")
    H0 = hamiltonian(charges, "naive")

    def const(value):
        return WeylPolynomial.constant(value, n)

    checks = []

    c = IdentityCheck("action_brackets", "[F_i, F_j] = i*alpha_ij")
    for i in range(n):
        for j in range(i + 1, n):
            r = commutator(F[i], F[j]) - const(I * charges.alpha[i][j])
            c.residuals.append((f"i={i + 1},j={j + 1}", r))
    checks.append(c)

    c = IdentityCheck("commutant_vs_action", "[F'_i, F_j] = 0")
    for i in range(n):
        for j in range(n):
            c.residuals.append((f"i={i + 1},j={j + 1}", commutator(Fp[i], F[j])))
    checks.append(c)

    c = IdentityCheck("commutant_brackets", "[F'_i, F'_j] = -i*alpha_ij")
    for i in range(n):
        for j in range(i + 1, n):
            r = commutator(Fp[i], Fp[j]) + const(I * charges.alpha[i][j])
            c.residuals.append((f"i={i + 1},j={j + 1}", r))
    checks.append(c)

    c = IdentityCheck("action_angle_ccr", "[F_i, Q_j] = -i*delta_ij")
    for i in range(n):
        for j in range(n):
            r = commutator(F[i], Q[j]) + const(I if i == j else 0)
            c.residuals.append((f"i={i + 1},j={j + 1}", r))
    checks.append(c)

    c = IdentityCheck("conservation", "[H, F_i] = 0")
    for i in range(n):
        c.residuals.append((f"i={i + 1}", commutator(H, F[i])))
    checks.append(c)

    c = IdentityCheck("anomaly", "[H0, F_i] = -i sum_j alpha_ij P_j")
    for i in range(n):
        rhs = WeylPolynomial.zero(n)
        for j in range(n):
            a = charges.alpha[i][j]
            if a:
                rhs = rhs + P[j] * (-I * a)
        c.residuals.append((f"i={i + 1}", commutator(H0, F[i]) - rhs))
    checks.append(c)

    c = IdentityCheck("angle_velocity", "i[H, Q_i] = 2 F'_i")
    for i in range(n):
        r = commutator(H, Q[i]) * I - Fp[i] * 2
        c.residuals.append((f"i={i + 1}", r))
    checks.append(c)

    c = IdentityCheck(
        "commutant_acceleration", "2i[H, F'_i] = -4 sum_j alpha_ij F'_j"
    )
    for i in range(n):
        r = commutator(H, Fp[i]) * GaussianRational(0, 2)
        for j in range(n):
            a = charges.alpha[i][j]
            if a:
                r = r + Fp[j] * (4 * a)
        c.residuals.append((f"i={i + 1}", r))
    checks.append(c)

    return IdentitySuiteReport(n=n, checks=checks)


# ---------------------------------------------------------------------------
# text rendering / parsing
# ---------------------------------------------------------------------------


def _format_fraction(x: Fraction) -> str:
    return str(x)  # Fraction prints p/q in lowest terms, q > 0


def format_scalar(z: GaussianRational) -> str:
    """Render a Gaussian rational: '3/2', '-2i', '(1/2+3/2i)', '0'."""
    if z.im == 0:
        return _format_fraction(z.re)
    if z.re == 0:
        if z.im == 1:
            return "i"
        if z.im == -1:
            return "-i"
        return _format_fraction(z.im) + "i"
    sign = "+" if z.im > 0 else "-"
    mag = abs(z.im)
    istr = "i" if mag == 1 else _format_fraction(mag) + "i"
    return f"({_format_fraction(z.re)}{sign}{istr})"


def _monomial_factors(mono: Monomial):
    out = []
    for sym, exps in (("Q", mono.q_exponents), ("P", mono.p_exponents)):
        for idx, e in enumerate(exps, start=1):
            if e == 1:
                out.append(f"{sym}{idx}")
            elif e > 1:
                out.append(f"{sym}{idx}^{e}")
    return out


def _term_sort_key(mono: Monomial):
    return (mono.degree, mono.q_exponents, mono.p_exponents)


def render_polynomial(poly: WeylPolynomial) -> str:
    """Deterministic text form: 'coeff * Q1^a1 ... Pn^bn' terms joined by +/-."""
    if poly.is_zero():
        return "0"
    parts = []
    for mono in sorted(poly.terms, key=_term_sort_key):
        coeff = poly.terms[mono]
        factors = _monomial_factors(mono)
        negate = (coeff.im == 0 and coeff.re < 0) or (coeff.re == 0 and coeff.im < 0)
        shown = -coeff if negate else coeff
        if factors:
            text = f"{format_scalar(shown)} * " + " ".join(factors)
        else:
            text = format_scalar(shown)
        if not parts:
            parts.append(("-" if negate else "") + text)
        else:
            parts.append(("- " if negate else "+ ") + text)
    return " ".join(parts)


_FACTOR_RE = _re.compile(r"^([QP])(\d+)(?:\^(\d+))?$")


def _parse_scalar(text: str) -> GaussianRational:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        inner = text[1:-1]
        m = _re.match(r"^([+-]?[0-9/]+)([+-])([0-9/]*)i$", inner)
        if not m:
            raise ValueError(f"cannot parse complex coefficient {text!r}")
        re_part = Fraction(m.group(1))
        mag = Fraction(m.group(3)) if m.group(3) else Fraction(1)
        im_part = mag if m.group(2) == "+" else -mag
        return GaussianRational(re_part, im_part)
    if text.endswith("i"):
        head = text[:-1]
        if head in ("", "+"):
            return GaussianRational(0, 1)
        if head == "-":
            return GaussianRational(0, -1)
        return GaussianRational(0, Fraction(head))
    return GaussianRational(Fraction(text))


def parse_polynomial(text: str, n: int) -> WeylPolynomial:
    """Inverse of render_polynomial (accepts any +/- separated term list)."""
    text = text.strip()
    if text == "0":
        return WeylPolynomial.zero(n)
    # split into signed terms at top level (parentheses only wrap scalars)
    terms = []
    depth = 0
    current = ""
    sign = 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and current.strip() and text[i - 1] == " ":
            terms.append((sign, current.strip()))
            sign = 1 if ch == "+" else -1
            current = ""
            i += 1
            continue
        current += ch
        i += 1
    if current.strip():
        terms.append((sign, current.strip()))

    poly = WeylPolynomial.zero(n)
    for sgn, term in terms:
        neg = False
        if term.startswith("-"):
            neg = True
            term = term[1:].strip()
        pieces = [p.strip() for p in term.split("*")]
        if len(pieces) == 1 and not _FACTOR_RE.match(pieces[0]):
            coeff = _parse_scalar(pieces[0])
            factors = []
        elif len(pieces) == 1:
            coeff = ONE
            factors = pieces[0].split()
        else:
            coeff = _parse_scalar(pieces[0])
            factors = " ".join(pieces[1:]).split()
        q = [0] * n
        p = [0] * n
        for f in factors:
            m = _FACTOR_RE.match(f)
            if not m:
                raise ValueError(f"cannot parse factor {f!r}")
            sym, idx, exp = m.group(1), int(m.group(2)), int(m.group(3) or 1)
            _check_index(idx, n)
            (q if sym == "Q" else p)[idx - 1] += exp
        value = coeff * (sgn * (-1 if neg else 1))
        poly = poly + WeylPolynomial(n, {Monomial(tuple(q), tuple(p)): value})
    return poly
