"""
Weights

Exact-rational weight arithmetic over the eps/del basis of one family, the
invariant bilinear form and its affine extension, and height frames.

Design:
- Scalars are `fractions.Fraction`; nothing here ever rounds.
- A weight carries its basis (family key + form) so that pairing weights of two
  different families is caught instead of silently producing a number.
- The affine part is (dcoef, level): the coefficients of delta and Lambda_0,
  paired by (delta, Lambda_0) = 1.
- G(3) uses three eps coordinates subject to eps_1 + eps_2 + eps_3 = 0; weights
  are canonicalized to coordinate sum zero on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Any, Mapping, Sequence

import sympy as sp

from errors import ConfigurationError, SpanError

Scalar = Fraction


def scalar(value: Any) -> Fraction:
    """Coerce int / str / Fraction / sympy Rational into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (sp.Rational, sp.Integer)):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, sp.Basic):
        return scalar(sp.Rational(value))
    return Fraction(value)


def _to_sympy(value: Fraction) -> sp.Rational:
    return sp.Rational(value.numerator, value.denominator)


def _fmt(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


# =============================================================================
# BASIS AND FORM
# =============================================================================


@dataclass(frozen=True)
class BilinearForm:
    epsnorm: Fraction
    delnorm: Fraction
    sum_zero_eps: bool = False

    def finite(self, x: Sequence[Fraction], y: Sequence[Fraction], p: int) -> Fraction:
        eps = sum((a * b for a, b in zip(x[:p], y[:p])), Fraction(0))
        if self.sum_zero_eps:
            eps -= sum(x[:p], Fraction(0)) * sum(y[:p], Fraction(0)) / 3
        dels = sum((a * b for a, b in zip(x[p:], y[p:])), Fraction(0))
        return self.epsnorm * eps + self.delnorm * dels


@dataclass(frozen=True)
class Basis:
    """The eps/del coordinate system of one family instance."""

    key: str
    p: int
    q: int
    form: BilinearForm

    @property
    def dim(self) -> int:
        return self.p + self.q

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(f"eps_{i}" for i in range(1, self.p + 1)) + tuple(
            f"del_{j}" for j in range(1, self.q + 1)
        )

    def canonical(self, finite: Sequence[Fraction]) -> tuple[Fraction, ...]:
        values = tuple(scalar(v) for v in finite)
        if len(values) != self.dim:
            raise ConfigurationError(
                f"{self.key}: expected {self.dim} finite coordinates, got {len(values)}"
            )
        if self.form.sum_zero_eps and self.p:
            mean = sum(values[: self.p], Fraction(0)) / self.p
            values = tuple(v - mean for v in values[: self.p]) + values[self.p :]
        return values

    def weight(
        self,
        coeffs: Mapping[str, Any] | None = None,
        *,
        dcoef: Any = 0,
        level: Any = 0,
    ) -> "Weight":
        finite = [Fraction(0)] * self.dim
        index = {s: i for i, s in enumerate(self.symbols)}
        for symbol, value in (coeffs or {}).items():
            try:
                finite[index[symbol]] += scalar(value)
            except KeyError as exc:
                raise ConfigurationError(
                    f"Unknown basis symbol: {symbol!r}. Available: {list(self.symbols)}"
                ) from exc
        return Weight(self, self.canonical(finite), scalar(dcoef), scalar(level))

    def from_vector(self, vector: Sequence[Any]) -> "Weight":
        """Inverse of Weight.vector(): finite coordinates, then dcoef, then level."""
        values = [scalar(v) for v in vector]
        return Weight(self, self.canonical(values[: self.dim]), values[self.dim], values[self.dim + 1])

    def eps(self, i: int) -> "Weight":
        return self.weight({f"eps_{i}": 1})

    def dl(self, j: int) -> "Weight":
        return self.weight({f"del_{j}": 1})

    def zero(self) -> "Weight":
        return self.weight()

    def delta(self) -> "Weight":
        return self.weight(dcoef=1)

    def lambda0(self) -> "Weight":
        return self.weight(level=1)

    def unit_vectors(self) -> list["Weight"]:
        """Images of these define a linear map: the basis symbols, delta, Lambda_0."""
        return [self.weight({s: 1}) for s in self.symbols] + [self.delta(), self.lambda0()]


# =============================================================================
# WEIGHTS
# =============================================================================


@dataclass(frozen=True)
class Weight:
    basis: Basis = field(compare=False, repr=False)
    finite: tuple[Fraction, ...]
    dcoef: Fraction = Fraction(0)
    level: Fraction = Fraction(0)

    def _check(self, other: "Weight") -> None:
        if other.basis is not self.basis and other.basis != self.basis:
            raise ConfigurationError(
                f"Weights over different bases: {self.basis.key} vs {other.basis.key}"
            )

    def __add__(self, other: "Weight") -> "Weight":
        self._check(other)
        return Weight(
            self.basis,
            tuple(a + b for a, b in zip(self.finite, other.finite)),
            self.dcoef + other.dcoef,
            self.level + other.level,
        )

    def __sub__(self, other: "Weight") -> "Weight":
        self._check(other)
        return Weight(
            self.basis,
            tuple(a - b for a, b in zip(self.finite, other.finite)),
            self.dcoef - other.dcoef,
            self.level - other.level,
        )

    def __neg__(self) -> "Weight":
        return Weight(self.basis, tuple(-a for a in self.finite), -self.dcoef, -self.level)

    def __mul__(self, c: Any) -> "Weight":
        c = scalar(c)
        return Weight(self.basis, tuple(c * a for a in self.finite), c * self.dcoef, c * self.level)

    __rmul__ = __mul__

    def __truediv__(self, c: Any) -> "Weight":
        return self * (1 / scalar(c))

    def is_zero(self) -> bool:
        return not any(self.finite) and not self.dcoef and not self.level

    def finite_part(self) -> "Weight":
        return Weight(self.basis, self.finite)

    def is_finite(self) -> bool:
        return not self.dcoef and not self.level

    def vector(self) -> tuple[Fraction, ...]:
        return self.finite + (self.dcoef, self.level)

    def coeff(self, symbol: str) -> Fraction:
        return self.finite[self.basis.symbols.index(symbol)]

    def label(self) -> str:
        parts: list[str] = []
        names = self.basis.symbols + ("delta", "Lambda0")
        for name, value in zip(names, self.vector()):
            if not value:
                continue
            sign = "-" if value < 0 else "+"
            mag = abs(value)
            term = name if mag == 1 else f"{_fmt(mag)}*{name}"
            parts.append(f"{sign}{term}")
        if not parts:
            return "0"
        text = "".join(parts)
        return text[1:] if text.startswith("+") else text

    def __str__(self) -> str:
        return self.label()


def pair(a: Weight, b: Weight) -> Fraction:
    """(a, b) = (a_fin, b_fin) + level_a * dcoef_b + level_b * dcoef_a."""
    a._check(b)
    return a.basis.form.finite(a.finite, b.finite, a.basis.p) + a.level * b.dcoef + b.level * a.dcoef


def norm(a: Weight) -> Fraction:
    return pair(a, a)


def coroot_of(alpha: Weight) -> Weight:
    """2alpha/(alpha,alpha) for non-isotropic alpha, the form-dual alpha otherwise."""
    n = norm(alpha)
    return alpha if n == 0 else alpha * (Fraction(2) / n)


def cpair(mu: Weight, coroot: Weight) -> Fraction:
    """<mu, alpha^vee> with the coroot represented as a weight."""
    return pair(mu, coroot)


# =============================================================================
# HEIGHT FRAMES
# =============================================================================


@lru_cache(maxsize=1 << 16)
def _solve(
    left_inverse: tuple[tuple[Fraction, ...], ...],
    columns: tuple[tuple[Fraction, ...], ...],
    vec: tuple[Fraction, ...],
) -> tuple[Fraction, ...] | None:
    """Coordinates of vec against columns, or None when vec is outside their span."""
    result = tuple(sum((r * v for r, v in zip(row, vec)), Fraction(0)) for row in left_inverse)
    back = [Fraction(0)] * len(vec)
    for c, col in zip(result, columns):
        if c:
            for i, x in enumerate(col):
                back[i] += c * x
    return result if tuple(back) == vec else None


@dataclass(frozen=True, eq=False)
class HeightFrame:
    """
    An ordered linearly independent list of simple roots and an exact left
    inverse of the matrix whose columns are their coordinate vectors.
    """

    simple: tuple[Weight, ...]
    left_inverse: tuple[tuple[Fraction, ...], ...]
    columns: tuple[tuple[Fraction, ...], ...] = ()

    @classmethod
    def build(cls, simple: Sequence[Weight]) -> "HeightFrame":
        simple = tuple(simple)
        if not simple:
            return cls(simple, ())
        a = sp.Matrix([[_to_sympy(v) for v in w.vector()] for w in simple]).T
        if a.rank() != len(simple):
            raise SpanError(f"Simple roots are not linearly independent: {[w.label() for w in simple]}")
        left = (a.T * a).inv() * a.T
        rows = tuple(tuple(scalar(left[i, j]) for j in range(left.cols)) for i in range(left.rows))
        return cls(simple, rows, tuple(w.vector() for w in simple))

    @property
    def rank(self) -> int:
        return len(self.simple)

    @property
    def basis(self) -> Basis:
        return self.simple[0].basis

    def weight_of(self, coords: Sequence[Any]) -> Weight:
        total = self.basis.zero()
        for c, w in zip(coords, self.simple):
            if c:
                total = total + w * c
        return total

    def coords(self, nu: Weight) -> tuple[Fraction, ...]:
        result = _solve(self.left_inverse, self.columns, nu.vector())
        if result is None:
            raise SpanError(f"{nu.label()} is not in the span of {[w.label() for w in self.simple]}")
        return result

    def int_coords(self, nu: Weight) -> tuple[int, ...]:
        result = self.coords(nu)
        if any(c.denominator != 1 for c in result):
            raise SpanError(f"{nu.label()} has non-integral coordinates {[_fmt(c) for c in result]}")
        return tuple(int(c) for c in result)

    def height(self, nu: Weight) -> Fraction:
        return sum(self.coords(nu), Fraction(0))

    def is_positive(self, nu: Weight) -> bool:
        """True when nu is a nonzero nonnegative combination of the simple roots."""
        c = self.coords(nu)
        return all(x >= 0 for x in c) and any(c)


def coords(nu: Weight, frame: HeightFrame) -> tuple[Fraction, ...]:
    return frame.coords(nu)


def height(nu: Weight, frame: HeightFrame) -> Fraction:
    return frame.height(nu)
