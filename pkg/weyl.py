"""
Weyl groups

Exact linear actions of the finite group W^# and the affine group
W^# x| T on weights, height-bounded enumeration, translations and their
recovery from group elements.

Design:
- An element is the matrix of its action on (basis symbols, delta, Lambda_0):
  column j is the image of basis vector j. Entries are Fractions in a numpy
  object array; equality and hashing go through the exact matrix.
- sign is carried along words and cross-checked against the determinant of the
  finite block.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import sympy as sp

from errors import ConsistencyError, DataError, ReflectError, TranslationError
from root_data import Parity, RootSystem, affine_positive_roots, affine_simple_sharp, is_affine_root
from weights import Basis, HeightFrame, Weight, coroot_of, cpair, norm, pair, scalar

logger = logging.getLogger(__name__)

GROUP_LIMIT = 200000


def _matrix_of(basis: Basis, fn) -> np.ndarray:
    cols = [fn(u).vector() for u in basis.unit_vectors()]
    return np.array(cols, dtype=object).T


@dataclass(frozen=True, eq=False)
class AffineWeylElement:
    basis: Basis = field(repr=False)
    matrix: np.ndarray = field(repr=False)
    sign: int = 1
    length: int | None = 0
    _key: tuple = field(default=(), repr=False)

    @classmethod
    def make(cls, basis: Basis, matrix: np.ndarray, sign: int, length: int | None) -> "AffineWeylElement":
        key = tuple(tuple(row) for row in matrix.tolist())
        return cls(basis, matrix, sign, length, key)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AffineWeylElement) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def apply(self, nu: Weight) -> Weight:
        image = self.matrix.dot(np.array(nu.vector(), dtype=object))
        return self.basis.from_vector(list(image))

    def __call__(self, nu: Weight) -> Weight:
        return self.apply(nu)

    def __mul__(self, other: "AffineWeylElement") -> "AffineWeylElement":
        length = None if self.length is None or other.length is None else self.length + other.length
        return AffineWeylElement.make(self.basis, self.matrix.dot(other.matrix), self.sign * other.sign, length)

    def inverse(self) -> "AffineWeylElement":
        # On G(3) the matrix kills eps_1 + eps_2 + eps_3; invert with that line lifted to itself.
        shift = _sum_zero_shift(self.basis, self.matrix.shape[0])
        inv = _to_sympy(self.matrix + shift).inv()
        mat = np.array([[scalar(inv[i, j]) for j in range(inv.cols)] for i in range(inv.rows)], dtype=object)
        return AffineWeylElement.make(self.basis, mat - shift, self.sign, self.length)

    @property
    def finite_block(self) -> np.ndarray:
        dim = self.basis.dim
        return self.matrix[:dim, :dim]

    def determinant(self) -> int:
        """Determinant of the induced map on finite coordinates."""
        block = self.finite_block + _sum_zero_shift(self.basis, self.basis.dim)
        det = _to_sympy(block).det() if block.size else sp.Integer(1)
        return int(det)

    def fixes(self, nu: Weight) -> bool:
        return self.apply(nu) == nu

    def is_identity(self) -> bool:
        return self == identity(self.basis)


def _sum_zero_shift(basis: Basis, size: int) -> np.ndarray:
    """Projection onto the constant eps direction when eps coordinates sum to zero, else zero."""
    shift = np.full((size, size), Fraction(0), dtype=object)
    if basis.form.sum_zero_eps and basis.p:
        p = basis.p
        shift[:p, :p] = np.full((p, p), Fraction(1, p), dtype=object)
    return shift


def _to_sympy(mat: np.ndarray) -> sp.Matrix:
    rows, cols = mat.shape
    return sp.Matrix(rows, cols, lambda i, j: sp.Rational(mat[i, j].numerator, mat[i, j].denominator))


def identity(basis: Basis) -> AffineWeylElement:
    return AffineWeylElement.make(basis, _matrix_of(basis, lambda u: u), 1, 0)


def reflection(alpha: Weight, coroot: Weight | None = None) -> AffineWeylElement:
    if norm(alpha) == 0:
        raise ReflectError(f"Cannot reflect at isotropic {alpha.label()}")
    coroot = coroot if coroot is not None else coroot_of(alpha)
    return AffineWeylElement.make(
        alpha.basis, _matrix_of(alpha.basis, lambda u: u - alpha * cpair(u, coroot)), -1, 1
    )


def translation(mu: Weight) -> AffineWeylElement:
    """t_mu(l) = l + (l,delta)mu - ((l,mu) + (mu,mu)/2 (l,delta)) delta."""
    if not mu.is_finite():
        raise TranslationError(f"Translation needs a level-0 weight without delta part, got {mu.label()}")
    basis = mu.basis
    delta = basis.delta()
    half = norm(mu) / 2

    def act(u: Weight) -> Weight:
        ld = pair(u, delta)
        return u + mu * ld - delta * (pair(u, mu) + half * ld)

    return AffineWeylElement.make(basis, _matrix_of(basis, act), 1, None)


def _check_sign(w: AffineWeylElement) -> None:
    det = w.determinant()
    if det != w.sign:
        raise ConsistencyError(f"sign {w.sign} disagrees with finite determinant {det}")


def _closure(
    start: AffineWeylElement,
    generators: Sequence[Weight],
    frame: HeightFrame,
    keep=None,
    limit: int = GROUP_LIMIT,
) -> list[AffineWeylElement]:
    """
    BFS by right multiplication, only along edges w -> w s_a with w(a) positive.

    keep(w) filters elements; rejected elements are not expanded.
    """
    refl = [reflection(a) for a in generators]
    seen: dict[AffineWeylElement, AffineWeylElement] = {start: start}
    frontier = deque([start])
    while frontier:
        w = frontier.popleft()
        for alpha, s in zip(generators, refl):
            if not frame.is_positive(w.apply(alpha)):
                continue
            nxt = w * s
            if nxt in seen:
                continue
            if keep is not None and not keep(nxt):
                continue
            seen[nxt] = nxt
            if len(seen) > limit:
                raise DataError(f"Group enumeration exceeded {limit} elements")
            frontier.append(nxt)
    return list(seen.values())


def generate_finite_sharp(rs: RootSystem) -> list[AffineWeylElement]:
    group = _closure(identity(rs.basis), rs.sharp_simple, rs.frame)
    for w in group:
        _check_sign(w)
    logger.info("W# of %s has %d elements", rs.key, len(group))
    return group


def rho_defect_height(rs: RootSystem, w: AffineWeylElement) -> Fraction:
    return rs.frame.height(rs.rho_hat - w.apply(rs.rho_hat))


def enumerate_affine_sharp(rs: RootSystem, N: int) -> list[AffineWeylElement]:
    """All w in the affine Weyl group of Delta^# with ht(rho_hat - w rho_hat) <= N, by length."""
    ball = _closure(
        identity(rs.basis),
        affine_simple_sharp(rs),
        rs.frame,
        keep=lambda w: rho_defect_height(rs, w) <= N,
    )
    logger.info("Affine W# ball of %s at N=%d has %d elements", rs.key, N, len(ball))
    return ball


def height_monotone(rs: RootSystem, N: int) -> list[str]:
    """Edges w -> w s_a inside the N-ball that lengthen w but lower ht(rho_hat - w rho_hat)."""
    ball = enumerate_affine_sharp(rs, N)
    members = set(ball)
    gens = affine_simple_sharp(rs)
    bad: list[str] = []
    for w in ball:
        h = rho_defect_height(rs, w)
        for alpha in gens:
            if not rs.frame.is_positive(w.apply(alpha)):
                continue
            nxt = w * reflection(alpha)
            if nxt in members and rho_defect_height(rs, nxt) < h:
                bad.append(f"length-increasing edge at {alpha.label()} lowers height below {h}")
    return bad


def decompose(w: AffineWeylElement) -> tuple[AffineWeylElement, Weight]:
    """Split w = t_mu y with y in the finite group; mu is the finite part of w(Lambda_0)."""
    basis = w.basis
    mu = w.apply(basis.lambda0()).finite_part()
    y = translation(-mu) * w
    y = AffineWeylElement.make(basis, y.matrix, w.sign, w.length)
    if not y.fixes(basis.lambda0()) or not y.fixes(basis.delta()):
        raise ConsistencyError(f"finite part of decomposition moves Lambda_0 or delta (mu={mu.label()})")
    for u in basis.unit_vectors()[: basis.dim]:
        if not y.apply(u).is_finite():
            raise ConsistencyError(f"finite part of decomposition leaves the finite span (mu={mu.label()})")
    if translation(mu) * y != w:
        raise ConsistencyError(f"recomposition t_mu y != w for mu={mu.label()}")
    return y, mu


def inversion_set(
    rs: RootSystem, w: AffineWeylElement, bound: int, include_odd: bool = False
) -> set[Weight]:
    """Positive affine roots of height <= bound sent to negative roots by w (even roots unless include_odd)."""
    out: set[Weight] = set()
    for entry in affine_positive_roots(rs, bound):
        if not include_odd and entry.parity is Parity.ODD:
            continue
        if rs.frame.is_positive(-w.apply(entry.root)):
            out.add(entry.root)
    return out


def preserves_roots(rs: RootSystem, w: AffineWeylElement, bound: int) -> bool:
    """w maps every affine root of height <= bound to an affine root of the same parity."""
    for entry in affine_positive_roots(rs, bound):
        if is_affine_root(rs, w.apply(entry.root)) is not entry.parity:
            return False
    return True


def stabilizer_generators(rs: RootSystem) -> list[Weight]:
    return [a for a in affine_simple_sharp(rs) if pair(rs.rho_hat, a) == 0]


def closure(basis: Basis, generators: Iterable[Weight], limit: int = GROUP_LIMIT) -> set[AffineWeylElement]:
    """The group generated by the reflections at the given roots (must be finite)."""
    refl = [reflection(a) for a in generators]
    group = {identity(basis)}
    frontier = deque(group)
    while frontier:
        w = frontier.popleft()
        for s in refl:
            nxt = w * s
            if nxt not in group:
                group.add(nxt)
                if len(group) > limit:
                    raise DataError(f"Reflection closure exceeded {limit} elements")
                frontier.append(nxt)
    return group
