"""Exact calculus of the curvature-weighted operators □ and ◇.

    □u       = Σ (1/kᵢ) ∂ᵢ²u
    ◇(u, v)  = Σ (1/kᵢ) (∂ᵢu)(∂ᵢv)
    ◇ᵐ(u, v) = Σ (1/kᵢ) ◇ᵐ⁻¹(∂ᵢu, ∂ᵢv),   ◇⁰(u, v) = u·v

All arithmetic is over `fractions.Fraction`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import TYPE_CHECKING

from oscint.errors import (
    BudgetExceededError,
    DimensionMismatchError,
    InvalidInputError,
    OutOfRangeError,
)
from oscint.models import CheckResult, ExpansionMode

if TYPE_CHECKING:
    from collections.abc import Iterator, Mapping, Sequence

    import numpy as np

logger = logging.getLogger(__name__)

MAX_VARS = 3
MAX_EXPANSION_POWER = 8

Exponent = tuple[int, ...]
Rational = Fraction | int


@dataclass(frozen=True)
class MultiPoly:
    """Polynomial in up to three variables with exact rational coefficients."""

    n_vars: int
    terms: Mapping[Exponent, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 1 <= self.n_vars <= MAX_VARS:
            msg = f"polynomials have 1 to {MAX_VARS} variables, got {self.n_vars}"
            raise DimensionMismatchError(msg)
        clean: dict[Exponent, Fraction] = {}
        for exp, coeff in self.terms.items():
            if len(exp) != self.n_vars or any(e < 0 for e in exp):
                msg = f"exponent {exp} does not fit {self.n_vars} variables"
                raise DimensionMismatchError(msg)
            value = Fraction(coeff)
            if value:
                clean[tuple(exp)] = value
        object.__setattr__(self, "terms", clean)

    @classmethod
    def zero(cls, n_vars: int) -> MultiPoly:
        return cls(n_vars)

    @classmethod
    def constant(cls, value: Rational, n_vars: int) -> MultiPoly:
        return cls(n_vars, {(0,) * n_vars: Fraction(value)})

    @classmethod
    def variable(cls, index: int, n_vars: int) -> MultiPoly:
        exp = [0] * n_vars
        exp[index] = 1
        return cls(n_vars, {tuple(exp): Fraction(1)})

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff: Rational = 1) -> MultiPoly:
        return cls(len(exp), {tuple(exp): Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(exp) for exp in self.terms)

    @property
    def degree(self) -> int:
        return max((sum(exp) for exp in self.terms), default=0)

    def _check(self, other: MultiPoly) -> None:
        if other.n_vars != self.n_vars:
            msg = f"polynomials in {self.n_vars} and {other.n_vars} variables do not combine"
            raise DimensionMismatchError(msg)

    def __add__(self, other: MultiPoly) -> MultiPoly:
        self._check(other)
        out = dict(self.terms)
        for exp, coeff in other.terms.items():
            out[exp] = out.get(exp, Fraction(0)) + coeff
        return MultiPoly(self.n_vars, out)

    def __neg__(self) -> MultiPoly:
        return MultiPoly(self.n_vars, {exp: -c for exp, c in self.terms.items()})

    def __sub__(self, other: MultiPoly) -> MultiPoly:
        return self + (-other)

    def __mul__(self, other: MultiPoly | Rational) -> MultiPoly:
        if not isinstance(other, MultiPoly):
            factor = Fraction(other)
            return MultiPoly(self.n_vars, {exp: c * factor for exp, c in self.terms.items()})
        self._check(other)
        out: dict[Exponent, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                exp = tuple(x + y for x, y in zip(ea, eb, strict=True))
                out[exp] = out.get(exp, Fraction(0)) + ca * cb
        return MultiPoly(self.n_vars, out)

    def __rmul__(self, other: Rational) -> MultiPoly:
        return self * other

    def derivative(self, index: int) -> MultiPoly:
        out: dict[Exponent, Fraction] = {}
        for exp, coeff in self.terms.items():
            power = exp[index]
            if power:
                lowered = list(exp)
                lowered[index] -= 1
                out[tuple(lowered)] = coeff * power
        return MultiPoly(self.n_vars, out)

    def evaluate(self, point: Sequence[Rational]) -> Fraction:
        if len(point) != self.n_vars:
            msg = f"point of length {len(point)} for a polynomial in {self.n_vars} variables"
            raise DimensionMismatchError(msg)
        total = Fraction(0)
        for exp, coeff in self.terms.items():
            term = coeff
            for x, e in zip(point, exp, strict=True):
                term *= Fraction(x) ** e
            total += term
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp in sorted(self.terms, reverse=True):
            mono = "·".join(
                f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(exp) if e
            )
            coeff = self.terms[exp]
            parts.append(f"{coeff}·{mono}" if mono else str(coeff))
        return " + ".join(parts)


@dataclass(frozen=True)
class Curvatures:
    k: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        values = tuple(Fraction(x) for x in self.k)
        if not values:
            msg = "need at least one curvature"
            raise InvalidInputError(msg)
        if any(x == 0 for x in values):
            msg = f"curvatures must be nonzero, got {values}"
            raise InvalidInputError(msg)
        object.__setattr__(self, "k", values)

    @classmethod
    def of(cls, *values: Rational | str) -> Curvatures:
        return cls(tuple(Fraction(v) for v in values))

    def __len__(self) -> int:
        return len(self.k)

    @property
    def inverse(self) -> tuple[Fraction, ...]:
        return tuple(1 / x for x in self.k)


def _check_dims(kk: Curvatures, *polys: MultiPoly) -> None:
    for p in polys:
        if p.n_vars != len(kk):
            msg = f"polynomial in {p.n_vars} variables with {len(kk)} curvatures"
            raise DimensionMismatchError(msg)


def apply_box(p: MultiPoly, kk: Curvatures) -> MultiPoly:
    """□p = Σ (1/kᵢ) ∂ᵢ²p."""
    _check_dims(kk, p)
    out = MultiPoly.zero(p.n_vars)
    for i, inv in enumerate(kk.inverse):
        out = out + p.derivative(i).derivative(i) * inv
    return out


def box_power(p: MultiPoly, n: int, kk: Curvatures) -> MultiPoly:
    for _ in range(n):
        if p.is_zero():
            break
        p = apply_box(p, kk)
    return p


def apply_diamond(u: MultiPoly, v: MultiPoly, kk: Curvatures) -> MultiPoly:
    """◇(u, v) = Σ (1/kᵢ)(∂ᵢu)(∂ᵢv)."""
    return diamond_power(u, v, 1, kk)


def diamond_power(u: MultiPoly, v: MultiPoly, m: int, kk: Curvatures) -> MultiPoly:
    """The m-fold bilinear ◇ applied to the ordered pair (u, v)."""
    _check_dims(kk, u, v)
    if m == 0:
        return u * v
    out = MultiPoly.zero(u.n_vars)
    for i, inv in enumerate(kk.inverse):
        du, dv = u.derivative(i), v.derivative(i)
        if du.is_zero() or dv.is_zero():
            continue
        out = out + diamond_power(du, dv, m - 1, kk) * inv
    return out


@dataclass(frozen=True)
class CoeffTable:
    """The integers d_k^n, 1 ≤ k ≤ n + 1, of the □ⁿ(uv) expansion (d_1^n = 1)."""

    n_max: int
    d: Mapping[tuple[int, int], int]

    def __call__(self, k: int, n: int) -> int:
        if not 1 <= n <= self.n_max or not 1 <= k <= n + 1:
            msg = f"d_{k}^{n} is outside the table (n ≤ {self.n_max}, 1 ≤ k ≤ n + 1)"
            raise OutOfRangeError(msg)
        if k == 1:
            return 1
        return self.d[(k, n)]

    def rows(self) -> Iterator[tuple[int, int, int]]:
        """(n, k, d) in row-major order, k starting at 1."""
        for n in range(1, self.n_max + 1):
            for k in range(1, n + 2):
                yield n, k, self(k, n)


def binomial_coefficient(k: int, n: int) -> int:
    """Closed form d_k^n = 2^{k-1}·C(n, k-1)."""
    return 2 ** (k - 1) * comb(n, k - 1)


def leibniz_table(n_max: int) -> CoeffTable:
    """Build d_k^n from its closed forms and the row recurrence.

    d_2^n = 2n, d_3^n = 2(n-2)(n+1) + 4 (n ≥ 3), d_n^n = n·2^{n-1} (n ≥ 4),
    d_{n+1}^n = 2^n, and d_k^n = 2·Σ_{j=k}^{n-1} d_{k-1}^j + d_k^k for 4 ≤ k ≤ n-1.
    """
    if n_max < 1:
        msg = f"n_max must be at least 1, got {n_max}"
        raise OutOfRangeError(msg)
    d: dict[tuple[int, int], int] = {}
    for n in range(1, n_max + 1):
        for k in range(2, n + 2):
            if k == n + 1:
                d[(k, n)] = 2**n
            elif k == 2:
                d[(k, n)] = 2 * n
            elif k == 3:
                d[(k, n)] = 2 * (n - 2) * (n + 1) + 4
            elif k == n:
                d[(k, n)] = n * 2 ** (n - 1)
            else:
                d[(k, n)] = 2 * sum(d[(k - 1, j)] for j in range(k, n)) + d[(k, k)]
    return CoeffTable(n_max=n_max, d=d)


def expand_box_power(
    u: MultiPoly,
    v: MultiPoly,
    n: int,
    kk: Curvatures,
    mode: ExpansionMode = ExpansionMode.FORMULA,
) -> MultiPoly:
    """□ⁿ(u·v), either by the Leibniz-type expansion or by direct iteration.

    formula:  Σ_{k=1}^{n+1} d_k^n Σ_α C(n-k+1, α) ◇^{k-1}(□^{n-k+1-α}u, □^α v)
    """
    _check_dims(kk, u, v)
    if n > MAX_EXPANSION_POWER:
        msg = f"exact expansion is limited to n ≤ {MAX_EXPANSION_POWER}, got {n}"
        raise BudgetExceededError(msg)
    if n < 0:
        msg = f"power must be non-negative, got {n}"
        raise OutOfRangeError(msg)
    if u.is_constant() or v.is_constant():
        msg = "the expansion needs nonconstant u and v"
        raise InvalidInputError(msg)
    if mode is ExpansionMode.BRUTEFORCE:
        return box_power(u * v, n, kk)
    if n == 0:
        return u * v

    box_u = [u]
    box_v = [v]
    for _ in range(n):
        box_u.append(apply_box(box_u[-1], kk))
        box_v.append(apply_box(box_v[-1], kk))

    table = leibniz_table(n)
    out = MultiPoly.zero(u.n_vars)
    for k in range(1, n + 2):
        rest = n - k + 1
        inner = MultiPoly.zero(u.n_vars)
        for alpha in range(rest + 1):
            a, b = box_u[rest - alpha], box_v[alpha]
            if a.is_zero() or b.is_zero():
                continue
            inner = inner + diamond_power(a, b, k - 1, kk) * comb(rest, alpha)
        out = out + inner * table(k, n)
    return out


def exponential_jet(order: int, n_vars: int = 1) -> MultiPoly:
    """Σ_{j ≤ order} x₁^j / j!, the truncated Taylor polynomial of e^{x₁}."""
    terms = {}
    for j in range(order + 1):
        exp = (j,) + (0,) * (n_vars - 1)
        terms[exp] = Fraction(1, factorial(j))
    return MultiPoly(n_vars, terms)


def random_poly(
    rng: np.random.Generator, n_vars: int, max_degree: int = 4, n_terms: int = 4
) -> MultiPoly:
    """Random nonconstant polynomial with small rational coefficients."""
    while True:
        terms: dict[Exponent, Fraction] = {}
        for _ in range(n_terms):
            degree = int(rng.integers(1, max_degree + 1))
            cuts = sorted(int(c) for c in rng.integers(0, degree + 1, size=n_vars - 1))
            bounds = [0, *cuts, degree]
            exp = tuple(bounds[i + 1] - bounds[i] for i in range(n_vars))
            coeff = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
            terms[exp] = terms.get(exp, Fraction(0)) + coeff
        poly = MultiPoly(n_vars, terms)
        if not poly.is_constant():
            return poly


def random_curvatures(rng: np.random.Generator, n_vars: int) -> Curvatures:
    values = []
    for _ in range(n_vars):
        num = 0
        while num == 0:
            num = int(rng.integers(-5, 6))
        values.append(Fraction(num, int(rng.integers(1, 6))))
    return Curvatures(tuple(values))


def table_identity_checks(n_max: int = 12) -> list[CheckResult]:
    """Integer identities of the coefficient table, reported as absolute mismatches."""
    table = leibniz_table(n_max)
    ns = range(1, n_max + 1)
    return [
        CheckResult("d2_equals_2n", max(abs(table(2, n) - 2 * n) for n in ns), 0),
        CheckResult("top_equals_2_pow_n", max(abs(table(n + 1, n) - 2**n) for n in ns), 0),
        CheckResult(
            "diagonal_equals_n_2_pow_n_minus_1",
            max((abs(table(n, n) - n * 2 ** (n - 1)) for n in ns if n >= 4), default=0),
            0,
        ),
        CheckResult(
            "d3_increment_equals_4_n_minus_1",
            max(
                (abs(table(3, n) - table(3, n - 1) - 4 * (n - 1)) for n in ns if n >= 4),
                default=0,
            ),
            0,
        ),
        CheckResult(
            "exponential_sum_equals_4_pow_n",
            max(
                abs(sum(table(k, n) * 2 ** (n - k + 1) for k in range(1, n + 2)) - 4**n)
                for n in ns
            ),
            0,
        ),
        CheckResult(
            "binomial_closed_form",
            max(abs(table(k, n) - binomial_coefficient(k, n)) for n in ns for k in range(1, n + 2)),
            0,
        ),
    ]


def expansion_checks(
    n_max: int, rng: np.random.Generator, pairs_per_dim: int = 50
) -> list[CheckResult]:
    """Formula against brute force on random pairs for n ≤ min(n_max, 8) and N ∈ {1, 2, 3}."""
    results = []
    top = min(n_max, MAX_EXPANSION_POWER)
    for n_vars in range(1, MAX_VARS + 1):
        mismatches = 0
        for _ in range(pairs_per_dim):
            u = random_poly(rng, n_vars)
            v = random_poly(rng, n_vars)
            kk = random_curvatures(rng, n_vars)
            for n in range(1, top + 1):
                formula = expand_box_power(u, v, n, kk, ExpansionMode.FORMULA)
                brute = expand_box_power(u, v, n, kk, ExpansionMode.BRUTEFORCE)
                if formula != brute:
                    mismatches += 1
                    logger.warning("□^%d mismatch for u=%s, v=%s, k=%s", n, u, v, kk.k)
        results.append(CheckResult(f"formula_vs_bruteforce_N{n_vars}", float(mismatches), 0.0))
    for n in range(1, top + 1):
        jet = exponential_jet(2 * n)
        value = expand_box_power(jet, jet, n, Curvatures.of(1)).evaluate((0,))
        results.append(CheckResult(f"exponential_jet_n{n}", float(abs(value - 4**n)), 0))
    return results
