"""
Root data

Concrete root systems of the basic Lie superalgebras with non-zero dual Coxeter
number (families A, B, B(n,n), C, D, F(4), G(3)) and their untwisted
affinizations.

Design:
- Each family builder returns the even/odd root sets, the simple roots Pi, the
  maximal isotropic set S and the tabulated maximal root theta.
- build_root_system() derives everything else exactly (rho, h^vee, the
  Delta^#/Delta_2 split, height frames) and validates the standing assumptions;
  a violation is a DataError, never a silent fallback.
- RootSystem is immutable; negative controls are made with dataclasses.replace().
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import permutations
from typing import Iterator, Sequence

import networkx as nx
import sympy as sp

from errors import DataError, SpecError, UnsupportedFamily
from weights import Basis, BilinearForm, HeightFrame, Weight, norm, pair, scalar

logger = logging.getLogger(__name__)


class Family(str, Enum):
    A = "A"
    B = "B"
    BNN = "Bnn"
    C = "C"
    D = "D"
    F4 = "F4"
    G3 = "G3"


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    m: int = 0
    n: int = 0

    @classmethod
    def parse(cls, family: str, m: int = 0, n: int = 0) -> "FamilySpec":
        """Build from CLI-style tags; B with m == n becomes the B(n,n) case."""
        try:
            fam = Family(family)
        except ValueError as exc:
            raise UnsupportedFamily(
                f"Unknown family: {family!r}. Available: {[f.value for f in Family]}"
            ) from exc
        if fam is Family.B and m == n:
            fam = Family.BNN
        if fam in (Family.F4, Family.G3):
            m, n = 0, 0
        spec = cls(fam, int(m), int(n))
        spec.validate()
        return spec

    @property
    def key(self) -> str:
        if self.family is Family.F4:
            return "F(4)"
        if self.family is Family.G3:
            return "G(3)"
        if self.family is Family.C:
            return f"C({self.m})"
        tag = "B" if self.family is Family.BNN else self.family.value
        return f"{tag}({self.m},{self.n})"

    def validate(self) -> None:
        m, n, fam = self.m, self.n, self.family
        if m < 0 or n < 0:
            raise SpecError(f"{self.key}: parameters must be nonnegative")
        if fam is Family.A:
            if m == n:
                raise UnsupportedFamily(f"{self.key}: A(n,n) has zero dual Coxeter number")
            if m < n:
                raise SpecError(f"{self.key}: A requires m > n (use A({n},{m}))")
            if m < 2:
                raise SpecError(f"{self.key}: A requires m >= 2")
        elif fam is Family.B:
            if m == n:
                raise SpecError(f"{self.key}: B(n,n) must be tagged {Family.BNN.value}")
            if n < 1:
                raise SpecError(f"{self.key}: B requires n >= 1")
        elif fam is Family.BNN:
            if m != n or n < 1:
                raise SpecError(f"{self.key}: B(n,n) requires m == n >= 1")
        elif fam is Family.C:
            if m < 2:
                raise SpecError(f"{self.key}: C requires m >= 2")
        elif fam is Family.D:
            if m == n + 1:
                raise UnsupportedFamily(f"{self.key}: D(n+1,n) has zero dual Coxeter number")
            if n >= m and m < 1:
                raise SpecError(f"{self.key}: D with n >= m requires m >= 1")
            if m > n + 1 and n < 1:
                raise SpecError(f"{self.key}: D with m > n+1 requires n >= 1")


@dataclass(frozen=True)
class AffineRootEntry:
    root: Weight
    parity: Parity
    multiplicity: int
    coords: tuple[int, ...]

    @property
    def height(self) -> int:
        return sum(self.coords)


@dataclass(frozen=True)
class _Table:
    basis: Basis
    even: list[Weight]
    odd: list[Weight]
    pi: list[Weight]
    s_set: list[Weight]
    theta: Weight
    xi: Weight | None = None


@dataclass(frozen=True, eq=False)
class RootSystem:
    spec: FamilySpec
    basis: Basis
    even_roots: frozenset[Weight]
    odd_roots: frozenset[Weight]
    sharp: frozenset[Weight]
    delta2: frozenset[Weight]
    pi: tuple[Weight, ...]
    pi_parities: tuple[Parity, ...]
    s_set: tuple[Weight, ...]
    theta: Weight
    xi: Weight | None
    rho: Weight
    rho_hat: Weight
    hdual: Fraction
    frame: HeightFrame
    finite_frame: HeightFrame
    positive_even: tuple[Weight, ...]
    positive_odd: tuple[Weight, ...]
    sharp_simple: tuple[Weight, ...]
    theta_sharp: Weight
    imaginary_multiplicity: int

    @property
    def form(self) -> BilinearForm:
        return self.basis.form

    @property
    def key(self) -> str:
        return self.spec.key

    @property
    def delta(self) -> Weight:
        return self.basis.delta()

    @property
    def alpha0(self) -> Weight:
        return self.delta - self.theta

    @property
    def pi_hat(self) -> tuple[Weight, ...]:
        return self.frame.simple

    @property
    def pi_hat_parities(self) -> tuple[Parity, ...]:
        return (self.parity(self.theta),) + self.pi_parities

    @property
    def positive_roots(self) -> tuple[Weight, ...]:
        return tuple(sorted(self.positive_even + self.positive_odd, key=self.order_key))

    @property
    def roots(self) -> frozenset[Weight]:
        return self.even_roots | self.odd_roots

    def parity(self, root: Weight) -> Parity:
        fin = root.finite_part()
        if fin.is_zero() or fin in self.even_roots:
            return Parity.EVEN
        if fin in self.odd_roots:
            return Parity.ODD
        raise DataError(f"{self.key}: {root.label()} is not a root")

    def order_key(self, nu: Weight) -> tuple:
        return (self.frame.height(nu), self.frame.coords(nu))


# =============================================================================
# FAMILY TABLES
# =============================================================================


def _pm_pairs(vecs_a: Sequence[Weight], vecs_b: Sequence[Weight], distinct: bool) -> list[Weight]:
    out: list[Weight] = []
    for i, a in enumerate(vecs_a):
        for j, b in enumerate(vecs_b):
            if distinct and j <= i:
                continue
            for sa in (1, -1):
                for sb in (1, -1):
                    out.append(a * sa + b * sb)
    return out


def _pm(vecs: Sequence[Weight], scale: int = 1) -> list[Weight]:
    return [v * (s * scale) for v in vecs for s in (1, -1)]


def _table_a(spec: FamilySpec) -> _Table:
    m, n = spec.m, spec.n
    basis = Basis(spec.key, m, n, BilinearForm(Fraction(1), Fraction(-1)))
    e = [basis.eps(i) for i in range(1, m + 1)]
    d = [basis.dl(j) for j in range(1, n + 1)]
    even = [a - b for a, b in permutations(e, 2)] + [a - b for a, b in permutations(d, 2)]
    odd = [(a - b) * s for a in e for b in d for s in (1, -1)]
    pi: list[Weight] = []
    for i in range(n):
        pi += [e[i] - d[i], d[i] - e[i + 1]]
    for k in range(n, m - 1):
        pi.append(e[k] - e[k + 1])
    xi = None
    if n:
        xi = sum(e[1:], e[0]) / m - sum(d[1:], d[0]) / n
    return _Table(basis, even, odd, pi, [e[i] - d[i] for i in range(n)], e[0] - e[m - 1], xi)


def _table_b(spec: FamilySpec) -> _Table:
    m, n = spec.m, spec.n
    if spec.family is Family.BNN or m < n:
        # symplectic side on eps (n symbols), orthogonal side on del (m symbols)
        basis = Basis(spec.key, n, m, BilinearForm(Fraction(1), Fraction(-1)))
        e = [basis.eps(i) for i in range(1, n + 1)]
        d = [basis.dl(j) for j in range(1, m + 1)]
        even = _pm_pairs(e, e, True) + _pm(e, 2) + _pm_pairs(d, d, True) + _pm(d)
        odd = _pm_pairs(e, d, False) + _pm(e)
        if spec.family is Family.BNN:
            pi: list[Weight] = []
            for i in range(n):
                pi.append(d[i] - e[i])
                if i + 1 < n:
                    pi.append(e[i] - d[i + 1])
            pi.append(e[n - 1])
            return _Table(basis, even, odd, pi, [d[i] - e[i] for i in range(n)], d[0] + e[0])
        pi = []
        for i in range(m):
            pi += [e[i] - d[i], d[i] - e[i + 1]]
        for k in range(m, n - 1):
            pi.append(e[k] - e[k + 1])
        pi.append(e[n - 1])
        return _Table(basis, even, odd, pi, [e[i] - d[i] for i in range(m)], e[0] * 2)

    # m >= n+1: orthogonal side on eps (m symbols), symplectic side on del (n symbols)
    basis = Basis(spec.key, m, n, BilinearForm(Fraction(1), Fraction(-1)))
    e = [basis.eps(i) for i in range(1, m + 1)]
    d = [basis.dl(j) for j in range(1, n + 1)]
    even = _pm_pairs(e, e, True) + _pm(e) + _pm_pairs(d, d, True) + _pm(d, 2)
    odd = _pm_pairs(e, d, False) + _pm(d)
    if m == n + 1:
        pi = []
        for i in range(n):
            pi += [e[i] - d[i], d[i] - e[i + 1]]
        pi.append(e[m - 1])
        return _Table(basis, even, odd, pi, [e[i] - d[i] for i in range(n)], e[0] + d[0])
    pi = [e[0] - e[1]]
    for i in range(n):
        pi += [e[i + 1] - d[i], d[i] - e[i + 2]]
    for k in range(n + 2, m - 1):
        pi.append(e[k] - e[k + 1])
    pi.append(e[m - 1])
    return _Table(basis, even, odd, pi, [e[i + 1] - d[i] for i in range(n)], e[0] + e[1])


def _table_c(spec: FamilySpec) -> _Table:
    m = spec.m
    basis = Basis(spec.key, m, 1, BilinearForm(Fraction(1), Fraction(-1)))
    e = [basis.eps(i) for i in range(1, m + 1)]
    d1 = basis.dl(1)
    even = _pm_pairs(e, e, True) + _pm(e, 2)
    odd = _pm_pairs(e, [d1], False)
    pi = [e[k] - e[k + 1] for k in range(m - 1)] + [e[m - 1] - d1, e[m - 1] + d1]
    return _Table(basis, even, odd, pi, [e[m - 1] - d1], e[0] * 2, d1)


def _table_d(spec: FamilySpec) -> _Table:
    m, n = spec.m, spec.n
    if n >= m:
        basis = Basis(spec.key, n, m, BilinearForm(Fraction(1), Fraction(-1)))
        e = [basis.eps(i) for i in range(1, n + 1)]
        d = [basis.dl(j) for j in range(1, m + 1)]
        even = _pm_pairs(e, e, True) + _pm(e, 2) + _pm_pairs(d, d, True)
        odd = _pm_pairs(e, d, False)
        pi: list[Weight] = []
        if n > m:
            for i in range(m):
                pi += [e[i] - d[i], d[i] - e[i + 1]]
            for k in range(m, n - 1):
                pi.append(e[k] - e[k + 1])
            pi.append(e[n - 1] * 2)
        else:
            for i in range(m - 1):
                pi += [e[i] - d[i], d[i] - e[i + 1]]
            pi += [e[m - 1] - d[m - 1], e[m - 1] + d[m - 1]]
        return _Table(basis, even, odd, pi, [e[i] - d[i] for i in range(m)], e[0] * 2)

    basis = Basis(spec.key, m, n, BilinearForm(Fraction(1), Fraction(-1)))
    e = [basis.eps(i) for i in range(1, m + 1)]
    d = [basis.dl(j) for j in range(1, n + 1)]
    even = _pm_pairs(e, e, True) + _pm_pairs(d, d, True) + _pm(d, 2)
    odd = _pm_pairs(e, d, False)
    pi = [e[0] - e[1]]
    for i in range(n):
        pi += [e[i + 1] - d[i], d[i] - e[i + 2]]
    if m == n + 2:
        pi.append(d[n - 1] + e[n + 1])
    else:
        for k in range(n + 2, m - 1):
            pi.append(e[k] - e[k + 1])
        pi.append(e[m - 2] + e[m - 1])
    return _Table(basis, even, odd, pi, [e[i + 1] - d[i] for i in range(n)], e[0] + e[1])


def _table_f4(spec: FamilySpec) -> _Table:
    basis = Basis(spec.key, 3, 1, BilinearForm(Fraction(1), Fraction(-3)))
    e = [basis.eps(i) for i in range(1, 4)]
    d1 = basis.dl(1)
    even = _pm_pairs(e, e, True) + _pm(e) + _pm([d1])
    odd = [
        (e[0] * s1 + e[1] * s2 + e[2] * s3 + d1 * s4) / 2
        for s1 in (1, -1)
        for s2 in (1, -1)
        for s3 in (1, -1)
        for s4 in (1, -1)
    ]
    pi = [
        (e[0] + e[1] + e[2] + d1) / 2,
        (-e[0] + e[1] + e[2] - d1) / 2,
        (-e[0] - e[1] - e[2] + d1) / 2,
        e[0] - e[1],
    ]
    return _Table(basis, even, odd, pi, [pi[0]], e[2] - e[1])


def _table_g3(spec: FamilySpec) -> _Table:
    basis = Basis(spec.key, 3, 1, BilinearForm(Fraction(1), Fraction(-2, 3), sum_zero_eps=True))
    e = [basis.eps(i) for i in range(1, 4)]
    d1 = basis.dl(1)
    even = _pm(e) + [a - b for a, b in permutations(e, 2)] + _pm([d1], 2)
    odd = _pm([d1]) + _pm_pairs(e, [d1], False)
    pi = [d1 - e[1], e[2] - d1, -e[2] - e[0]]
    return _Table(basis, even, odd, pi, [pi[0]], e[2] - e[0])


_TABLES = {
    Family.A: _table_a,
    Family.B: _table_b,
    Family.BNN: _table_b,
    Family.C: _table_c,
    Family.D: _table_d,
    Family.F4: _table_f4,
    Family.G3: _table_g3,
}


# =============================================================================
# BUILD
# =============================================================================


def _indecomposable(positive: Sequence[Weight]) -> list[Weight]:
    pos = set(positive)
    simple = []
    for alpha in positive:
        if not any((alpha - beta) in pos for beta in positive if beta != alpha):
            simple.append(alpha)
    return simple


def _highest(rs_key: str, frame: HeightFrame, positive: Sequence[Weight]) -> Weight:
    top = max(positive, key=lambda a: (frame.height(a), frame.coords(a)))
    for alpha in positive:
        if any(c < 0 for c in frame.coords(top - alpha)):
            raise DataError(f"{rs_key}: {top.label()} does not dominate {alpha.label()}")
    return top


def _solve_rho(key: str, pi: Sequence[Weight]) -> Weight:
    gram = sp.Matrix(len(pi), len(pi), lambda i, j: sp.Rational(str(pair(pi[i], pi[j]))))
    if gram.det() == 0:
        raise UnsupportedFamily(f"{key}: degenerate form on the root span (zero dual Coxeter number)")
    rhs = sp.Matrix([sp.Rational(str(norm(a) / 2)) for a in pi])
    sol = gram.LUsolve(rhs)
    rho = pi[0].basis.zero()
    for c, alpha in zip(sol, pi):
        rho = rho + alpha * scalar(c)
    return rho


def maximal_root(rs: RootSystem) -> Weight:
    """The unique positive root that no simple root can raise; must equal rs.theta."""
    roots = rs.roots
    candidates = [a for a in rs.positive_roots if not any((a + b) in roots for b in rs.pi)]
    if len(candidates) != 1:
        raise DataError(f"{rs.key}: maximal root not unique: {[c.label() for c in candidates]}")
    top = _highest(rs.key, rs.finite_frame, rs.positive_roots)
    if top != candidates[0] or top != rs.theta:
        raise DataError(f"{rs.key}: maximal root {top.label()} differs from theta {rs.theta.label()}")
    return top


def _dual_coxeter(key: str, rho: Weight, theta: Weight) -> Fraction:
    value = pair(rho, theta) + norm(theta) / 2
    if value == 0:
        raise UnsupportedFamily(f"{key}: zero dual Coxeter number")
    return value


def dual_coxeter(rs: RootSystem) -> Fraction:
    """h^v = (rho, theta) + (theta, theta)/2."""
    return _dual_coxeter(rs.key, rs.rho, rs.theta)


def build_root_system(spec: FamilySpec, *, imaginary_multiplicity: int | None = None) -> RootSystem:
    spec.validate()
    table = _TABLES[spec.family](spec)
    basis = table.basis
    even, odd = frozenset(table.even), frozenset(table.odd)
    if even & odd or any(r.is_zero() for r in even | odd):
        raise DataError(f"{spec.key}: even and odd roots overlap or contain zero")

    finite_frame = HeightFrame.build(table.pi)
    pos_even: list[Weight] = []
    pos_odd: list[Weight] = []
    for root in even | odd:
        c = finite_frame.int_coords(root)
        if all(x >= 0 for x in c):
            (pos_even if root in even else pos_odd).append(root)
        elif not all(x <= 0 for x in c):
            raise DataError(f"{spec.key}: root {root.label()} has mixed-sign coordinates {c}")

    sharp = frozenset(r for r in even if norm(r) > 0)
    delta2 = frozenset(r for r in even if norm(r) < 0)
    if sharp | delta2 != even:
        raise DataError(f"{spec.key}: isotropic even root")

    rho = _solve_rho(spec.key, table.pi)
    theta = table.theta
    hdual = _dual_coxeter(spec.key, rho, theta)
    delta = basis.delta()
    frame = HeightFrame.build((delta - theta,) + tuple(table.pi))

    order = lambda a: (frame.height(a), frame.coords(a))  # noqa: E731
    pos_sharp = sorted((r for r in pos_even if r in sharp), key=order)
    sharp_simple = tuple(_indecomposable(pos_sharp))

    rs = RootSystem(
        spec=spec,
        basis=basis,
        even_roots=even,
        odd_roots=odd,
        sharp=sharp,
        delta2=delta2,
        pi=tuple(table.pi),
        pi_parities=tuple(Parity.EVEN if a in even else Parity.ODD for a in table.pi),
        s_set=tuple(table.s_set),
        theta=theta,
        xi=table.xi,
        rho=rho,
        rho_hat=rho + basis.lambda0() * hdual,
        hdual=hdual,
        frame=frame,
        finite_frame=finite_frame,
        positive_even=tuple(sorted(pos_even, key=order)),
        positive_odd=tuple(sorted(pos_odd, key=order)),
        sharp_simple=sharp_simple,
        theta_sharp=_highest(spec.key, finite_frame, pos_sharp),
        imaginary_multiplicity=(
            imaginary_multiplicity if imaginary_multiplicity is not None else cartan_dimension(spec, basis)
        ),
    )
    maximal_root(rs)
    _validate(rs)
    logger.info(
        "Built %s: |Delta0|=%d |Delta1|=%d h_dual=%s rho=%s",
        spec.key,
        len(even),
        len(odd),
        hdual,
        rho.label(),
    )
    return rs


def cartan_dimension(spec: FamilySpec, basis: Basis) -> int:
    return basis.dim - (1 if spec.family in (Family.A, Family.G3) else 0)


def _validate(rs: RootSystem) -> None:
    key = rs.key
    for beta in rs.s_set:
        if beta not in rs.pi or norm(beta) != 0 or beta not in rs.odd_roots:
            raise DataError(f"{key}: S element {beta.label()} is not an odd isotropic simple root")
    for i, beta in enumerate(rs.s_set):
        for gamma in rs.s_set[i + 1 :]:
            if pair(beta, gamma) != 0:
                raise DataError(f"{key}: S is not pairwise orthogonal")
    if any(norm(a) < 0 for a in rs.pi):
        raise DataError(f"{key}: simple root with negative norm")
    if norm(rs.theta) < 0:
        raise DataError(f"{key}: (theta, theta) < 0")
    for beta in rs.pi_hat:
        if pair(rs.rho_hat, beta) != norm(beta) / 2:
            raise DataError(f"{key}: (rho_hat, {beta.label()}) != ({beta.label()},{beta.label()})/2")
    for beta in rs.odd_roots:
        if ((beta * 2) in rs.even_roots) != (norm(beta) != 0):
            raise DataError(f"{key}: odd root {beta.label()} violates 2beta in Delta0 iff non-isotropic")
    needs_xi = rs.spec.family is Family.C or (rs.spec.family is Family.A and rs.spec.n > 0)
    if needs_xi and rs.xi is None:
        raise DataError(f"{key}: xi missing")
    if rs.xi is not None:
        if norm(rs.xi) >= 0 or any(pair(rs.xi, a) != 0 for a in rs.even_roots):
            raise DataError(f"{key}: xi must be negative and orthogonal to Delta0")


# =============================================================================
# DERIVED DATA
# =============================================================================


def delta_sharp_simple(rs: RootSystem) -> tuple[Weight, ...]:
    return rs.sharp_simple


def theta_sharp(rs: RootSystem) -> Weight:
    return rs.theta_sharp


def affine_simple_sharp(rs: RootSystem) -> tuple[Weight, ...]:
    """Simple roots of the positive part of the affinized Delta^#: its simple roots and delta - theta^#."""
    return delta_sharp_simple(rs) + (rs.delta - theta_sharp(rs),)


def even_components(rs: RootSystem) -> list[tuple[Weight, ...]]:
    """Simple roots of Delta0+, grouped into irreducible components."""
    simple = _indecomposable(rs.positive_even)
    graph = nx.Graph()
    graph.add_nodes_from(range(len(simple)))
    for i, a in enumerate(simple):
        for j in range(i + 1, len(simple)):
            if pair(a, simple[j]) != 0:
                graph.add_edge(i, j)
    comps = [tuple(simple[i] for i in sorted(c)) for c in nx.connected_components(graph)]
    return sorted(comps, key=lambda c: rs.order_key(c[0]))


def even_simple_roots(rs: RootSystem, affine: bool = False) -> frozenset[Weight]:
    """Simple roots of Delta0+ or, with affine=True, of the affinized even positive system."""
    out: set[Weight] = set()
    for comp in even_components(rs):
        out.update(comp)
        if affine:
            members = [a for a in rs.positive_even if any(pair(a, b) != 0 for b in comp)]
            out.add(rs.delta - _highest(rs.key, rs.finite_frame, members))
    return frozenset(out)


def is_affine_root(rs: RootSystem, nu: Weight) -> Parity | None:
    if nu.level != 0 or nu.dcoef.denominator != 1:
        return None
    fin = nu.finite_part()
    if fin.is_zero():
        return Parity.EVEN if nu.dcoef != 0 else None
    if fin in rs.even_roots:
        return Parity.EVEN
    if fin in rs.odd_roots:
        return Parity.ODD
    return None


def affine_positive_roots(rs: RootSystem, height_bound: int) -> Iterator[AffineRootEntry]:
    """Entries of the affine positive system with height <= height_bound, in height order."""
    if height_bound < 1:
        return iter(())
    frame = rs.frame
    dc = frame.int_coords(rs.delta)
    hd = sum(dc)
    entries: list[AffineRootEntry] = []
    finite = [(r, frame.int_coords(r)) for r in rs.roots]
    for root, c in finite:
        if sum(c) > 0 and sum(c) <= height_bound:
            entries.append(AffineRootEntry(root, rs.parity(root), 1, c))
    top = max(sum(c) for _, c in finite)
    s = 1
    while s * hd - top <= height_bound:
        shift = rs.delta * s
        base = tuple(s * x for x in dc)
        if s * hd <= height_bound:
            entries.append(AffineRootEntry(shift, Parity.EVEN, rs.imaginary_multiplicity, base))
        for root, c in finite:
            coords = tuple(a + b for a, b in zip(base, c))
            if sum(coords) <= height_bound:
                entries.append(AffineRootEntry(shift + root, rs.parity(root), 1, coords))
        s += 1
    entries.sort(key=lambda e: (e.height, e.coords))
    return iter(entries)
