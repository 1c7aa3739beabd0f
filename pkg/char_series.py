"""
Character series

Truncated formal series sum_{nu} b_nu e^{base - nu}: exact integer coefficients
indexed by offsets nu in Q+ (simple-root coordinates) of height <= bound.

Design:
- A Frame is a height ball below a base weight over a HeightFrame. Two series
  combine only over the same HeightFrame.
- Factored keeps e^{lead} * c * prod (1 + s e^{-gamma})^k unexpanded, so group
  elements act on the exponent data and expansion happens once, in the frame
  the caller needs.
- Any request that would silently read past a window raises WindowError.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Mapping

import numpy as np

from errors import DegenerateFactor, FrameError, SpanError, WindowError
from weights import HeightFrame, Weight

logger = logging.getLogger(__name__)

Offset = tuple[int, ...]


def binomial(k: int, j: int) -> int:
    """Generalized binomial coefficient C(k, j) for any integer k and j >= 0."""
    if k >= 0:
        return comb(k, j)
    return (-1) ** j * comb(-k + j - 1, j)


@lru_cache(maxsize=256)
def window_offsets(rank: int, bound: int) -> tuple[Offset, ...]:
    """All nonnegative integer vectors of length rank with coordinate sum <= bound, by height."""
    if bound < 0:
        return ()
    out: list[Offset] = []

    def rec(prefix: list[int], left: int) -> None:
        if len(prefix) == rank:
            out.append(tuple(prefix))
            return
        for v in range(left + 1):
            prefix.append(v)
            rec(prefix, left - v)
            prefix.pop()

    rec([], bound)
    out.sort(key=lambda o: (sum(o), o))
    return tuple(out)


def _int_vector(values: Iterable) -> Offset | None:
    vals = tuple(values)
    if any(v.denominator != 1 for v in vals):
        return None
    return tuple(int(v) for v in vals)


# =============================================================================
# FRAMES
# =============================================================================


@dataclass(frozen=True, eq=False)
class Frame:
    base: Weight
    bound: int
    height_frame: HeightFrame

    @property
    def rank(self) -> int:
        return self.height_frame.rank

    def compatible(self, other: "Frame") -> bool:
        return self.height_frame is other.height_frame or self.height_frame.simple == other.height_frame.simple

    def same(self, other: "Frame") -> bool:
        return self.compatible(other) and self.base == other.base and self.bound == other.bound

    def exponent(self, offset: Offset) -> Weight:
        return self.base - self.height_frame.weight_of(offset)

    def offset(self, exponent: Weight) -> Offset:
        """Offset of an admissible exponent; WindowError otherwise."""
        try:
            raw = self.height_frame.coords(self.base - exponent)
        except SpanError as exc:
            raise WindowError(f"{exponent.label()} is not below {self.base.label()}") from exc
        off = _int_vector(raw)
        if off is None or any(c < 0 for c in off) or sum(off) > self.bound:
            raise WindowError(
                f"{exponent.label()} outside the height-{self.bound} window below {self.base.label()}"
            )
        return off

    def offsets(self) -> tuple[Offset, ...]:
        return window_offsets(self.rank, self.bound)

    @property
    def size(self) -> int:
        return len(self.offsets())


# =============================================================================
# SERIES
# =============================================================================


@dataclass(frozen=True, eq=False)
class Series:
    frame: Frame
    terms: Mapping[Offset, int] = field(default_factory=dict)

    @classmethod
    def build(cls, frame: Frame, terms: Mapping[Offset, int]) -> "Series":
        return cls(frame, {o: c for o, c in terms.items() if c})

    @classmethod
    def zero(cls, frame: Frame) -> "Series":
        return cls(frame, {})

    @classmethod
    def unit(cls, frame: Frame, coeff: int = 1) -> "Series":
        """coeff * e^{base}."""
        return cls.build(frame, {(0,) * frame.rank: coeff})

    def _same(self, other: "Series") -> None:
        if not self.frame.same(other.frame):
            raise FrameError(
                f"Series over different windows: {self.frame.base.label()}/{self.frame.bound} "
                f"vs {other.frame.base.label()}/{other.frame.bound}"
            )

    def __add__(self, other: "Series") -> "Series":
        self._same(other)
        out = dict(self.terms)
        for o, c in other.terms.items():
            out[o] = out.get(o, 0) + c
        return Series.build(self.frame, out)

    def __neg__(self) -> "Series":
        return Series(self.frame, {o: -c for o, c in self.terms.items()})

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def scale(self, c: int) -> "Series":
        return Series.build(self.frame, {o: c * v for o, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Series) and self.frame.same(other.frame) and dict(self.terms) == dict(other.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> Iterator[tuple[Offset, int]]:
        for o in sorted(self.terms, key=lambda o: (sum(o), o)):
            yield o, self.terms[o]

    def leading(self) -> Offset | None:
        """The offset of the maximal support element (smallest height first)."""
        if not self.terms:
            return None
        return min(self.terms, key=lambda o: (sum(o), o))


def coefficient(a: Series, exponent: Weight) -> int:
    return a.terms.get(a.frame.offset(exponent), 0)


def support(a: Series) -> set[Weight]:
    return {a.frame.exponent(o) for o in a.terms}


def first_mismatch(a: Series, b: Series) -> tuple[Offset, int, int] | None:
    a._same(b)
    diff = [o for o in set(a.terms) | set(b.terms) if a.terms.get(o, 0) != b.terms.get(o, 0)]
    if not diff:
        return None
    o = min(diff, key=lambda x: (sum(x), x))
    return o, a.terms.get(o, 0), b.terms.get(o, 0)


def mul(a: Series, b: Series) -> Series:
    if not a.frame.compatible(b.frame):
        raise FrameError("Series over different height frames cannot be multiplied")
    bound = min(a.frame.bound, b.frame.bound)
    frame = Frame(a.frame.base + b.frame.base, bound, a.frame.height_frame)
    out: dict[Offset, int] = {}
    for o1, c1 in a.terms.items():
        h1 = sum(o1)
        if h1 > bound:
            continue
        for o2, c2 in b.terms.items():
            if h1 + sum(o2) > bound:
                continue
            o = tuple(x + y for x, y in zip(o1, o2))
            out[o] = out.get(o, 0) + c1 * c2
    return Series.build(frame, out)


def _positive_power(a: Series, sign: int, gamma: Offset, k: int) -> dict[Offset, int]:
    step = sum(gamma)
    out: dict[Offset, int] = {}
    bound = a.frame.bound
    for o, c in a.terms.items():
        room = bound - sum(o)
        j = 0
        while j * step <= room:
            coef = binomial(k, j)
            if coef == 0 and k >= 0:
                break
            if coef:
                t = tuple(x + j * g for x, g in zip(o, gamma))
                out[t] = out.get(t, 0) + c * coef * sign**j
            j += 1
    return out


def _root_offset(frame: HeightFrame, alpha: Weight) -> Offset:
    off = _int_vector(frame.coords(alpha))
    if off is None:
        raise WindowError(f"{alpha.label()} is not in the root lattice of the frame")
    return off


def mul_binomial_power(a: Series, sign: int, alpha: Weight, k: int) -> Series:
    """
    a * (1 + sign e^{-alpha})^k within the window.

    A negative alpha is rewritten as sign^k e^{k gamma} (1 + sign e^{-gamma})^k
    with gamma = -alpha; the factor e^{k gamma} moves the base of the window.
    """
    if alpha.is_zero():
        raise DegenerateFactor("Binomial factor at the zero weight")
    if k == 0:
        return a
    hf = a.frame.height_frame
    gamma = _root_offset(hf, alpha)
    if all(g >= 0 for g in gamma):
        return Series.build(a.frame, _positive_power(a, sign, gamma, k))
    if not all(g <= 0 for g in gamma):
        raise WindowError(f"{alpha.label()} is neither positive nor negative in the frame")
    gamma = tuple(-g for g in gamma)
    frame = Frame(a.frame.base - alpha * k, a.frame.bound, hf)
    moved = Series(frame, dict(a.terms))
    return Series.build(frame, _positive_power(moved, sign, gamma, k)).scale(sign ** abs(k))


def restrict(a: Series, target: Frame) -> Series:
    """Re-window a onto target; WindowError if a does not know every target coefficient."""
    if not a.frame.compatible(target):
        raise FrameError("restrict across different height frames")
    if a.frame.same(target):
        return a
    hf = target.height_frame
    d = _int_vector(hf.coords(a.frame.base - target.base))
    if d is None:
        raise WindowError(f"{target.base.label()} is off the lattice of {a.frame.base.label()}")
    need = sum(max(-x, 0) for x in d)
    if need <= target.bound and sum(d) + target.bound > a.frame.bound:
        raise WindowError(
            f"source window (bound {a.frame.bound}) cannot cover target bound {target.bound}"
        )
    out: dict[Offset, int] = {}
    for o, c in a.terms.items():
        t = tuple(x - y for x, y in zip(o, d))
        if all(x >= 0 for x in t) and sum(t) <= target.bound:
            out[t] = c
    return Series.build(target, out)


def act(w, a: Series, target: Frame) -> Series:
    """Coefficient of lambda in the result = coefficient of w^{-1} lambda in a."""
    if not a.frame.compatible(target):
        raise FrameError("act across different height frames")
    hf = a.frame.height_frame
    w_inv = w.inverse()
    c0 = _int_vector(hf.coords(a.frame.base - w_inv.apply(target.base)))
    if c0 is None:
        raise WindowError(f"w^-1 of {target.base.label()} is off the lattice of {a.frame.base.label()}")
    cols = [_root_offset(hf, w_inv.apply(alpha)) for alpha in target.height_frame.simple]
    offsets = target.offsets()
    if not offsets:
        return Series.zero(target)
    grid = np.array(offsets, dtype=np.int64)
    pre = grid @ np.array(cols, dtype=np.int64) + np.array(c0, dtype=np.int64)
    inside = (pre >= 0).all(axis=1)
    heights = pre.sum(axis=1)
    if (inside & (heights > a.frame.bound)).any():
        raise WindowError(
            f"source window (bound {a.frame.bound}) too small for the image window of bound {target.bound}"
        )
    out: dict[Offset, int] = {}
    for idx in np.nonzero(inside)[0]:
        c = a.terms.get(tuple(int(x) for x in pre[idx]), 0)
        if c:
            out[offsets[idx]] = c
    return Series.build(target, out)


# =============================================================================
# FACTORED FORM
# =============================================================================


@dataclass(frozen=True)
class Factor:
    """(1 + sign e^{-root})^power."""

    sign: int
    root: Weight
    power: int


@dataclass(frozen=True)
class Factored:
    lead: Weight
    factors: tuple[Factor, ...] = ()
    scalar: int = 1

    def act(self, w) -> "Factored":
        return Factored(
            w.apply(self.lead),
            tuple(Factor(f.sign, w.apply(f.root), f.power) for f in self.factors),
            self.scalar,
        )

    def normalized(self, hf: HeightFrame) -> "Factored":
        """Rewrite every factor at a negative root toward the cone, moving the lead."""
        lead, c = self.lead, self.scalar
        out: list[Factor] = []
        for f in self.factors:
            if f.root.is_zero():
                raise DegenerateFactor("Binomial factor at the zero weight")
            if f.power == 0:
                continue
            off = _root_offset(hf, f.root)
            if all(x >= 0 for x in off):
                out.append(f)
            elif all(x <= 0 for x in off):
                lead = lead - f.root * f.power
                c *= f.sign ** abs(f.power)
                out.append(Factor(f.sign, -f.root, f.power))
            else:
                raise WindowError(f"{f.root.label()} is neither positive nor negative in the frame")
        return Factored(lead, tuple(out), c)

    def expand(self, target: Frame) -> Series:
        hf = target.height_frame
        norm_form = self.normalized(hf)
        lift = _int_vector(hf.coords(norm_form.lead - target.base))
        if lift is None:
            raise WindowError(f"{norm_form.lead.label()} is off the lattice of {target.base.label()}")
        bound = target.bound + sum(lift)
        if bound < 0:
            return Series.zero(target)
        frame = Frame(norm_form.lead, bound, hf)
        series = Series.unit(frame, norm_form.scalar)
        for f in norm_form.factors:
            if hf.height(f.root) > bound:
                continue
            series = mul_binomial_power(series, f.sign, f.root, f.power)
        return restrict(series, target)


def series_rows(name: str, a: Series) -> list[tuple[str, str, int, int]]:
    """(series, offset, height, coefficient) rows for CSV dumps."""
    return [(name, " ".join(str(x) for x in o), sum(o), c) for o, c in a.items()]
