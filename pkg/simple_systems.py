"""
Simple systems

Sets of simple roots with coroots, their Cartan matrices, odd reflections, the
family Theta of simple systems reachable by odd reflections, and principal roots.

Coroots are weights paired through the invariant form: 2a/(a,a) for
non-isotropic a, the form-dual a for isotropic a. Odd reflections transport
coroots by the linear rules below, so later isotropic coroots may be rescaled.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx

from errors import AssumptionError, DataError, ReflectError
from root_data import Parity, RootSystem
from weights import HeightFrame, Weight, coroot_of, cpair, norm

logger = logging.getLogger(__name__)

THETA_LIMIT = 20000


@dataclass(frozen=True, eq=False)
class SimpleSystem:
    roots: tuple[Weight, ...]
    coroots: tuple[Weight, ...]
    parities: tuple[Parity, ...]
    rho_shift: Weight

    @property
    def key(self) -> frozenset[Weight]:
        return frozenset(self.roots)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SimpleSystem) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @cached_property
    def frame(self) -> HeightFrame:
        return HeightFrame.build(self.roots)

    def isotropic_odd(self) -> list[int]:
        return [
            i
            for i, (a, p) in enumerate(zip(self.roots, self.parities))
            if p is Parity.ODD and norm(a) == 0
        ]

    def label(self) -> str:
        return "{" + ", ".join(a.label() for a in self.roots) + "}"


@dataclass(frozen=True)
class CartanMatrix:
    entries: tuple[tuple[Fraction, ...], ...]
    tau: frozenset[int]

    def violations(self) -> list[str]:
        """Conditions on the matrix: diagonal in {0,2}, symmetric zero pattern, integrality off the diagonal."""
        out: list[str] = []
        size = len(self.entries)
        for i in range(size):
            a_ii = self.entries[i][i]
            if a_ii not in (0, 2):
                out.append(f"a[{i}][{i}]={a_ii} not in {{0,2}}")
            for j in range(size):
                if j == i:
                    continue
                a_ij = self.entries[i][j]
                if (a_ij == 0) != (self.entries[j][i] == 0):
                    out.append(f"a[{i}][{j}]={a_ij} but a[{j}][{i}]={self.entries[j][i]}")
                if i not in self.tau:
                    if a_ii != 2 or a_ij > 0 or a_ij.denominator != 1:
                        out.append(f"even row {i}: a[{i}][{j}]={a_ij}")
                elif a_ii == 2 and (a_ij > 0 or a_ij.denominator != 1 or a_ij.numerator % 2):
                    out.append(f"odd non-isotropic row {i}: a[{i}][{j}]={a_ij}")
        return out


# =============================================================================
# CONSTRUCTION
# =============================================================================


def start_system(rs: RootSystem, affine: bool = False) -> SimpleSystem:
    roots = rs.pi_hat if affine else rs.pi
    parities = rs.pi_hat_parities if affine else rs.pi_parities
    return SimpleSystem(
        roots=tuple(roots),
        coroots=tuple(coroot_of(a) for a in roots),
        parities=tuple(parities),
        rho_shift=rs.basis.zero(),
    )


def cartan_matrix(ss: SimpleSystem) -> CartanMatrix:
    entries = tuple(
        tuple(cpair(alpha_j, coroot_i) for alpha_j in ss.roots) for coroot_i in ss.coroots
    )
    tau = frozenset(i for i, p in enumerate(ss.parities) if p is Parity.ODD)
    matrix = CartanMatrix(entries, tau)
    problems = matrix.violations()
    if problems:
        raise AssumptionError(f"Cartan matrix of {ss.label()} outside the admissible class: {problems}")
    return matrix


def odd_reflect(ss: SimpleSystem, beta_index: int) -> SimpleSystem:
    beta = ss.roots[beta_index]
    beta_v = ss.coroots[beta_index]
    if ss.parities[beta_index] is not Parity.ODD or norm(beta) != 0:
        raise ReflectError(f"Odd reflection needs an odd isotropic simple root, got {beta.label()}")
    roots: list[Weight] = []
    coroots: list[Weight] = []
    parities: list[Parity] = []
    for i, (alpha, alpha_v, parity) in enumerate(zip(ss.roots, ss.coroots, ss.parities)):
        if i == beta_index:
            roots.append(-alpha)
            coroots.append(alpha_v)
            parities.append(parity)
            continue
        a_ab = cpair(beta, alpha_v)
        if a_ab == 0:
            roots.append(alpha)
            coroots.append(alpha_v)
            parities.append(parity)
            continue
        a_ba = cpair(alpha, beta_v)
        a_aa = cpair(alpha, alpha_v)
        combo = beta_v * a_ab + alpha_v * a_ba
        if a_aa + 2 * a_ab == 0:
            new_v = combo
        else:
            new_v = combo * (Fraction(2) / (a_ba * (a_aa + 2 * a_ab)))
        roots.append(alpha + beta)
        coroots.append(new_v)
        # adding an odd root flips parity
        parities.append(Parity.EVEN if parity is Parity.ODD else Parity.ODD)
    out = SimpleSystem(tuple(roots), tuple(coroots), tuple(parities), ss.rho_shift + beta)
    for alpha, alpha_v in zip(out.roots, out.coroots):
        if cpair(alpha, alpha_v) not in (0, 2):
            raise ReflectError(f"<{alpha.label()}, coroot> = {cpair(alpha, alpha_v)} after reflecting at {beta.label()}")
    return out


def explore_theta(start: SimpleSystem, depth: int | None) -> list[SimpleSystem]:
    """
    BFS over odd reflections, deduplicated by the unordered root set.

    depth=None runs to the fixed point (finite Theta); a guard turns runaway
    exploration into a DataError.
    """
    seen: dict[frozenset[Weight], SimpleSystem] = {start.key: start}
    frontier = deque([(start, 0)])
    while frontier:
        ss, level = frontier.popleft()
        if depth is not None and level >= depth:
            continue
        for i in ss.isotropic_odd():
            nxt = odd_reflect(ss, i)
            if nxt.key in seen:
                continue
            seen[nxt.key] = nxt
            if len(seen) > THETA_LIMIT:
                raise DataError(f"Theta exploration exceeded {THETA_LIMIT} simple systems")
            frontier.append((nxt, level + 1))
    logger.debug("Theta ball depth=%s size=%d", depth, len(seen))
    return list(seen.values())


def positive_system(ss: SimpleSystem, roots: Iterable[Weight]) -> list[Weight]:
    """The roots that are nonnegative combinations of ss.roots."""
    return [r for r in roots if ss.frame.is_positive(r)]


def principal_roots(theta_set: Iterable[SimpleSystem]) -> frozenset[tuple[Weight, Weight]]:
    found: dict[Weight, Weight] = {}
    for ss in theta_set:
        for alpha, alpha_v, parity in zip(ss.roots, ss.coroots, ss.parities):
            if parity is Parity.EVEN:
                found.setdefault(alpha, alpha_v)
            elif norm(alpha) != 0:
                found.setdefault(alpha * 2, alpha_v / 2)
    return frozenset(found.items())


def rho_of(base_rho: Weight, ss: SimpleSystem) -> Weight:
    return base_rho + ss.rho_shift


def theta_graph(theta_set: Sequence[SimpleSystem]) -> nx.Graph:
    """Nodes are members of theta_set, edges join systems one odd reflection apart."""
    index = {ss.key: i for i, ss in enumerate(theta_set)}
    graph = nx.Graph()
    for i, ss in enumerate(theta_set):
        graph.add_node(i, roots=ss.label(), size=len(ss.roots))
    for i, ss in enumerate(theta_set):
        for k in ss.isotropic_odd():
            j = index.get(odd_reflect(ss, k).key)
            if j is not None and not graph.has_edge(i, j):
                graph.add_edge(i, j, root=ss.roots[k].label())
    return graph
