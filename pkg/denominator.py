"""
Denominator identities

Both sides of the finite and affine denominator identities as truncated series,
the translation form of the affine right-hand side, and the battery of checks
run by `superdenom verify`.

Series conventions:
- finite series live in the height ball below rho over the simple roots Pi;
- affine series live in the height ball below rho_hat over Pi_hat.
Every group image is taken on a Factored form and expanded once, in the target
window, so no truncated series is ever moved by a group element.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Any, Callable, Iterable, Iterator

import sympy as sp

from char_series import Factor, Factored, Frame, Series, coefficient, first_mismatch, support
from errors import ConfigurationError, ConsistencyError, SuperdenomError
from root_data import (
    Parity,
    RootSystem,
    affine_positive_roots,
    affine_simple_sharp,
    even_simple_roots,
)
from simple_systems import (
    SimpleSystem,
    cartan_matrix,
    explore_theta,
    positive_system,
    principal_roots,
    rho_of,
    start_system,
)
from weights import HeightFrame, Weight, coroot_of, cpair, norm, pair, scalar
from weyl import (
    AffineWeylElement,
    closure,
    decompose,
    enumerate_affine_sharp,
    generate_finite_sharp,
    height_monotone,
    identity,
    inversion_set,
    preserves_roots,
    reflection,
    stabilizer_generators,
    translation,
)

logger = logging.getLogger(__name__)


class Selection(str, Enum):
    FINITE = "finite"
    AFFINE = "affine"
    TRANSLATION = "translation"
    LEMMAS = "lemmas"


class Control(str, Enum):
    NONE = "none"
    IMAGINARY_MULT = "imaginary-mult"
    DROP_S = "drop-s"


def parse_selection(text: str | Iterable[str]) -> tuple[Selection, ...]:
    items = [t.strip() for t in (text.split(",") if isinstance(text, str) else text) if t.strip()]
    if not items or "all" in items:
        return tuple(Selection)
    out: list[Selection] = []
    for item in items:
        try:
            sel = Selection(item)
        except ValueError as exc:
            raise ConfigurationError(
                f"Unknown check selection: {item!r}. Available: {[s.value for s in Selection] + ['all']}"
            ) from exc
        if sel not in out:
            out.append(sel)
    return tuple(out)


def apply_control(rs: RootSystem, control: Control | str) -> RootSystem:
    """Corrupt the data on purpose so that a check must fail."""
    control = Control(control)
    if control is Control.IMAGINARY_MULT:
        return replace(rs, imaginary_multiplicity=1)
    if control is Control.DROP_S:
        if not rs.s_set:
            raise ConfigurationError(f"{rs.key}: drop-s needs a non-empty S")
        return replace(rs, s_set=rs.s_set[:-1])
    return rs


# =============================================================================
# SERIES OF BOTH SIDES
# =============================================================================


def finite_frame(rs: RootSystem, N: int) -> Frame:
    return Frame(rs.rho, N, rs.finite_frame)


def affine_frame(rs: RootSystem, N: int) -> Frame:
    return Frame(rs.rho_hat, N, rs.frame)


def denominator_factors(even: Iterable[Weight], odd: Iterable[Weight]) -> tuple[Factor, ...]:
    """prod (1 - e^{-a}) over even roots divided by prod (1 + e^{-b}) over odd roots."""
    return tuple(Factor(-1, a, 1) for a in even) + tuple(Factor(1, b, -1) for b in odd)


def finite_denominator(rs: RootSystem) -> Factored:
    return Factored(rs.rho, denominator_factors(rs.positive_even, rs.positive_odd))


def s_fraction(rs: RootSystem, lead: Weight) -> Factored:
    """e^{lead} / prod_{b in S} (1 + e^{-b})."""
    return Factored(lead, tuple(Factor(1, b, -1) for b in rs.s_set))


def finite_lhs(rs: RootSystem, N: int) -> Series:
    return finite_denominator(rs).expand(finite_frame(rs, N))


def finite_rhs(rs: RootSystem, N: int, group: list[AffineWeylElement] | None = None) -> Series:
    frame = finite_frame(rs, N)
    group = group if group is not None else generate_finite_sharp(rs)
    base = s_fraction(rs, rs.rho)
    total = Series.zero(frame)
    for w in group:
        total = total + base.act(w).expand(frame).scale(w.sign)
    return total


def affine_factors(rs: RootSystem, height_bound: int) -> tuple[Factor, ...]:
    out: list[Factor] = []
    for entry in affine_positive_roots(rs, height_bound):
        if entry.parity is Parity.ODD:
            out.append(Factor(1, entry.root, -entry.multiplicity))
        else:
            out.append(Factor(-1, entry.root, entry.multiplicity))
    return tuple(out)


def affine_denominator(rs: RootSystem, height_bound: int) -> Factored:
    return Factored(rs.rho_hat, affine_factors(rs, height_bound))


def affine_lhs(rs: RootSystem, N: int) -> Series:
    return affine_denominator(rs, N).expand(affine_frame(rs, N))


def affine_rhs_sharp(rs: RootSystem, N: int, ball: list[AffineWeylElement] | None = None) -> Series:
    frame = affine_frame(rs, N)
    ball = ball if ball is not None else enumerate_affine_sharp(rs, N)
    base = s_fraction(rs, rs.rho_hat)
    total = Series.zero(frame)
    for w in ball:
        total = total + base.act(w).expand(frame).scale(w.sign)
    return total


def translation_part_set(ball: Iterable[AffineWeylElement]) -> list[Weight]:
    seen: dict[Weight, None] = {}
    for w in ball:
        _, mu = decompose(w)
        seen.setdefault(mu, None)
    return list(seen)


def affine_rhs_translation(rs: RootSystem, N: int, shells: int) -> tuple[Series, bool]:
    """Partial sums of sum_mu t_mu(R e^{rho_hat}) over growing balls; stabilized when the last two agree."""
    if shells < 1:
        raise ConfigurationError("shells must be >= 1")
    frame = affine_frame(rs, N)
    term = Factored(rs.rho_hat, denominator_factors(rs.positive_even, rs.positive_odd))
    used: set[Weight] = set()
    total = Series.zero(frame)
    partials: list[Series] = []
    for k in range(1, shells + 1):
        radius = k * max(N, 1)
        for mu in translation_part_set(enumerate_affine_sharp(rs, radius)):
            if mu in used:
                continue
            used.add(mu)
            total = total + term.act(translation(mu)).expand(frame)
        partials.append(total)
        logger.debug("T-form shell %d: %d translations", k, len(used))
    stabilized = len(partials) >= 2 and partials[-1] == partials[-2]
    return total, stabilized


# =============================================================================
# REPORT
# =============================================================================


@dataclass
class Mismatch:
    exponent_coords: list[int]
    lhs: int
    rhs: int

    def to_dict(self) -> dict[str, Any]:
        return {"exponent_coords": self.exponent_coords, "lhs": self.lhs, "rhs": self.rhs}


@dataclass
class CheckResult:
    name: str
    passed: bool
    window_size: int
    terms: int
    mismatch: Mismatch | None = None
    detail: str | None = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "name": self.name,
            "status": self.status,
            "window_size": self.window_size,
            "terms": self.terms,
        }
        if self.mismatch is not None:
            out["mismatch"] = self.mismatch.to_dict()
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class CheckReport:
    spec: str
    N: int
    checks: list[CheckResult] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    series: dict[str, Series] = field(default_factory=dict, repr=False)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def get(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(f"No check named {name!r}. Available: {[c.name for c in self.checks]}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "spec": self.spec,
            "N": self.N,
            "checks": [c.to_dict() for c in self.checks],
            "timings": self.timings,
        }


def compare(name: str, lhs: Series, rhs: Series) -> CheckResult:
    diff = first_mismatch(lhs, rhs)
    mismatch = None if diff is None else Mismatch(list(diff[0]), diff[1], diff[2])
    return CheckResult(name, diff is None, lhs.frame.size, len(lhs), mismatch)


def _verdict(name: str, problems: list[str], cases: int) -> CheckResult:
    detail = "; ".join(problems[:5]) + (f" (+{len(problems) - 5} more)" if len(problems) > 5 else "")
    return CheckResult(name, not problems, cases, cases, detail=detail or None)


# =============================================================================
# CHECKS
# =============================================================================


class _Workspace:
    """Lazily shared intermediate results of one run."""

    def __init__(self, rs: RootSystem, N: int, shells: int, theta_depth: int) -> None:
        self.rs = rs
        self.N = N
        self.shells = shells
        self.theta_depth = theta_depth

    @cached_property
    def finite_group(self) -> list[AffineWeylElement]:
        return generate_finite_sharp(self.rs)

    @cached_property
    def ball(self) -> list[AffineWeylElement]:
        return enumerate_affine_sharp(self.rs, self.N)

    @cached_property
    def finite_lhs(self) -> Series:
        return finite_lhs(self.rs, self.N)

    @cached_property
    def finite_rhs(self) -> Series:
        return finite_rhs(self.rs, self.N, self.finite_group)

    @cached_property
    def affine_lhs(self) -> Series:
        return affine_lhs(self.rs, self.N)

    @cached_property
    def affine_rhs(self) -> Series:
        return affine_rhs_sharp(self.rs, self.N, self.ball)

    @cached_property
    def theta_finite(self) -> list[SimpleSystem]:
        return explore_theta(start_system(self.rs), None)

    @cached_property
    def theta_finite_ball(self) -> list[SimpleSystem]:
        return explore_theta(start_system(self.rs), self.theta_depth)

    @cached_property
    def theta_affine(self) -> list[SimpleSystem]:
        return explore_theta(start_system(self.rs, affine=True), self.theta_depth)

    @cached_property
    def principal(self) -> frozenset[tuple[Weight, Weight]]:
        return principal_roots(self.theta_finite)


def check_finite_identity(ws: _Workspace) -> CheckResult:
    return compare("finite-identity", ws.finite_lhs, ws.finite_rhs)


def check_affine_identity(ws: _Workspace) -> CheckResult:
    return compare("affine-identity", ws.affine_lhs, ws.affine_rhs)


def check_rho_hat_coefficient(ws: _Workspace) -> CheckResult:
    value = coefficient(ws.affine_rhs, ws.rs.rho_hat)
    detail = None if value == 1 else f"coefficient of e^rho_hat in Y is {value}"
    return CheckResult("rho-hat-coefficient", value == 1, ws.affine_rhs.frame.size, len(ws.affine_rhs), detail=detail)


def off_shell(series: Series) -> list[tuple[int, ...]]:
    """Offsets o of nonzero terms with (base - o, base - o) != (base, base)."""
    frame = series.frame
    simple = frame.height_frame.simple
    b = [pair(frame.base, a) for a in simple]
    gram = [[pair(a, c) for c in simple] for a in simple]
    bad = []
    for o in series.terms:
        q = sum((gram[i][j] * o[i] * o[j] for i in range(len(o)) for j in range(len(o))), Fraction(0))
        if q - 2 * sum((bi * oi for bi, oi in zip(b, o)), Fraction(0)) != 0:
            bad.append(o)
    return bad


def check_support_in_u(ws: _Workspace) -> CheckResult:
    bad = off_shell(ws.affine_lhs) + off_shell(ws.affine_rhs)
    terms = len(ws.affine_lhs) + len(ws.affine_rhs)
    detail = f"exponents off the (rho_hat, rho_hat) shell at offsets {bad[:5]}" if bad else None
    return CheckResult("support-in-U", not bad, ws.affine_lhs.frame.size, terms, detail=detail)


def check_translation_form(ws: _Workspace) -> CheckResult:
    total, stabilized = affine_rhs_translation(ws.rs, ws.N, ws.shells)
    result = compare("translation-form", total, ws.affine_rhs)
    if not stabilized:
        result.passed = False
        result.detail = f"partial sums did not stabilize within {ws.shells} shells"
    return result


def check_cartan_conditions(ws: _Workspace) -> CheckResult:
    problems: list[str] = []
    members = ws.theta_finite + ws.theta_affine
    for ss in members:
        try:
            cartan_matrix(ss)
        except SuperdenomError as exc:
            problems.append(str(exc))
    return _verdict("cartan-conditions", problems, len(members))


def check_rho_pairings(ws: _Workspace) -> CheckResult:
    problems: list[str] = []
    rs = ws.rs
    pairs = [(rs.rho, ss) for ss in ws.theta_finite] + [(rs.rho_hat, ss) for ss in ws.theta_affine]
    for base, ss in pairs:
        rho_prime = rho_of(base, ss)
        for alpha, alpha_v in zip(ss.roots, ss.coroots):
            diag = cpair(alpha, alpha_v)
            if cpair(rho_prime, alpha_v) != diag / 2:
                problems.append(f"<rho', {alpha.label()}^v> != {diag / 2} in {ss.label()}")
            if diag != 0 and cpair(base, alpha_v).denominator != 1:
                problems.append(f"<rho, {alpha.label()}^v> not integral")
    return _verdict("rho-pairings", problems, len(pairs))


def check_even_roots_invariant(ws: _Workspace) -> CheckResult:
    rs = ws.rs
    problems: list[str] = []
    expected = set(rs.positive_even)
    for ss in ws.theta_finite:
        if set(positive_system(ss, rs.even_roots)) != expected:
            problems.append(f"even positive roots differ for {ss.label()}")
    even_affine = [e.root for e in affine_positive_roots(rs, ws.N) if e.parity is Parity.EVEN]
    for ss in ws.theta_affine:
        if not all(ss.frame.is_positive(r) for r in even_affine):
            problems.append(f"affine even positive roots differ for {ss.label()}")
    return _verdict("even-roots-invariant", problems, len(ws.theta_finite) + len(ws.theta_affine))


def check_odd_reflection_invariance(ws: _Workspace) -> CheckResult:
    rs = ws.rs
    frame = finite_frame(rs, ws.N)
    for ss in ws.theta_finite_ball:
        pos = positive_system(ss, rs.roots)
        factored = Factored(
            rho_of(rs.rho, ss),
            denominator_factors([a for a in pos if a in rs.even_roots], [b for b in pos if b in rs.odd_roots]),
        )
        result = compare("odd-reflection-invariance", factored.expand(frame), ws.finite_lhs)
        if not result.passed:
            result.detail = f"R(Pi')e^rho' differs for {ss.label()}"
            return result
    return CheckResult("odd-reflection-invariance", True, frame.size, len(ws.theta_finite_ball))


def check_principal_roots(ws: _Workspace) -> CheckResult:
    rs = ws.rs
    problems: list[str] = []
    finite = {a for a, _ in ws.principal}
    if finite != set(even_simple_roots(rs)):
        problems.append(f"finite principal roots {sorted(a.label() for a in finite)}")
    expected = set(even_simple_roots(rs, affine=True))
    depth = ws.theta_depth
    found: set[Weight] = set()
    for depth in range(ws.theta_depth, ws.theta_depth + 4):
        ball = explore_theta(start_system(rs, affine=True), depth)
        found = {a for a, _ in principal_roots(ball)}
        if expected <= found:
            break
    if found != expected:
        problems.append(
            f"affine principal roots at depth {depth}: {sorted(a.label() for a in found)} "
            f"expected {sorted(a.label() for a in expected)}"
        )
    for alpha, alpha_v in ws.principal:
        if any(cpair(r, alpha_v).denominator != 1 for r in rs.roots):
            problems.append(f"<Delta, {alpha.label()}^v> not integral")
    return _verdict("principal-roots", problems, len(finite) + len(found))


def check_reflection_closure(ws: _Workspace) -> CheckResult:
    rs = ws.rs
    problems: list[str] = []
    for alpha, alpha_v in ws.principal:
        for r in rs.roots:
            image = r - alpha * cpair(r, alpha_v)
            if (image in rs.even_roots) != (r in rs.even_roots) or image not in rs.roots:
                problems.append(f"s_{alpha.label()}({r.label()}) = {image.label()}")
    return _verdict("reflection-closure", problems, len(ws.principal))


def check_skew_finite(ws: _Workspace) -> CheckResult:
    rs = ws.rs
    frame = finite_frame(rs, ws.N)
    target = -ws.finite_lhs
    for alpha, alpha_v in sorted(ws.principal, key=lambda p: rs.order_key(p[0])):
        image = finite_denominator(rs).act(reflection(alpha, alpha_v)).expand(frame)
        result = compare("skew-finite", image, target)
        if not result.passed:
            result.detail = f"s_{alpha.label()}(R e^rho) != -R e^rho"
            return result
    return CheckResult("skew-finite", True, frame.size, len(ws.principal))


def check_skew_affine(ws: _Workspace) -> CheckResult:
    """s_a(R_hat e^rho_hat) = -R_hat e^rho_hat for a over the generators of W# and the affine even simple roots."""
    rs = ws.rs
    frame = affine_frame(rs, ws.N)
    target = -ws.affine_lhs
    even_affine = sorted(even_simple_roots(rs, affine=True), key=rs.order_key)
    gens = list(dict.fromkeys(affine_simple_sharp(rs) + tuple(even_affine)))
    for alpha in gens:
        alpha_v = coroot_of(alpha)
        reach = max(abs(cpair(r, alpha_v)) for r in rs.roots)
        extra = int(reach * rs.frame.height(alpha))
        image = affine_denominator(rs, ws.N + extra).act(reflection(alpha)).expand(frame)
        result = compare("skew-affine", image, target)
        if not result.passed:
            result.detail = f"s_{alpha.label()}(R_hat e^rho_hat) != -R_hat e^rho_hat"
            return result
    return CheckResult("skew-affine", True, frame.size, len(gens))


def check_group_sanity(ws: _Workspace) -> CheckResult:
    rs = ws.rs
    problems: list[str] = []
    hd = int(rs.frame.height(rs.delta))
    for w in ws.ball:
        if w.determinant() != w.sign:
            problems.append(f"sign {w.sign} != det {w.determinant()}")
        # inverted real roots of a length-l element are s delta + a with s < l
        inv = inversion_set(rs, w, (w.length + 2) * hd)
        if len(inv) != w.length or (-1) ** len(inv) != w.sign:
            problems.append(f"|R(w)|={len(inv)} disagrees with length {w.length} and sign {w.sign}")
        if not preserves_roots(rs, w, ws.N):
            problems.append("w does not preserve the affine roots")
        try:
            decompose(w)
        except ConsistencyError as exc:
            problems.append(str(exc))
    problems += height_monotone(rs, ws.N)
    sample = ws.ball[:6]
    ident = identity(rs.basis)
    for a, b, c in product(sample, repeat=3):
        if (a * b) * c != a * (b * c):
            problems.append("composition is not associative")
            break
    for a in sample:
        if a * a.inverse() != ident or (a * a.inverse()).sign != 1:
            problems.append("inverse does not cancel")
    return _verdict("group-sanity", problems, len(ws.ball))


def check_stabilizer(ws: _Workspace) -> CheckResult:
    rs = ws.rs
    problems: list[str] = []
    h0 = set(enumerate_affine_sharp(rs, 0))
    generated = closure(rs.basis, stabilizer_generators(rs))
    if h0 != generated:
        problems.append(f"|H0|={len(h0)} but the orthogonal simple reflections generate {len(generated)}")
    lambda0 = rs.basis.lambda0()
    for w in h0:
        if not w.fixes(rs.rho_hat):
            problems.append("H0 element moves rho_hat")
        if w.determinant() != w.sign:
            problems.append("H0 element with inconsistent sign")
        if norm(rs.theta) != 0 and not w.fixes(lambda0):
            problems.append("H0 element outside W#")
    # points of supp(Y) are fixed by even elements only
    points = support(ws.affine_rhs)
    for mu in sorted(points, key=lambda m: rs.frame.height(rs.rho_hat - m)):
        odd = [w for w in ws.ball if w.sign == -1 and w.fixes(mu)]
        if odd:
            problems.append(f"{mu.label()} in supp(Y) is fixed by an element of sign -1")
    return _verdict("stabilizer", problems, len(h0) + len(points))


def check_sharp_denominator_orbits(ws: _Workspace) -> CheckResult:
    rs = ws.rs
    sharp_pos = [a for a in rs.positive_even if a in rs.sharp]
    rho_sharp = rs.basis.zero()
    for a in sharp_pos:
        rho_sharp = rho_sharp + a / 2
    span = int(rs.finite_frame.height(rho_sharp * 2))
    frame = Frame(rho_sharp, span, rs.finite_frame)
    lhs = Factored(rho_sharp, tuple(Factor(-1, a, 1) for a in sharp_pos)).expand(frame)
    terms: dict[tuple[int, ...], int] = {}
    for w in ws.finite_group:
        o = frame.offset(w.apply(rho_sharp))
        terms[o] = terms.get(o, 0) + w.sign
    result = compare("sharp-denominator-orbits", lhs, Series.build(frame, terms))
    if not result.passed:
        return result
    problems: list[str] = []
    for o, c in lhs.terms.items():
        lam = frame.exponent(o)
        fixers = [w for w in ws.finite_group if not w.is_identity() and w.fixes(lam)]
        if fixers:
            problems.append(f"{lam.label()} has a non-trivial stabilizer")
        for w in ws.finite_group:
            if lhs.terms.get(frame.offset(w.apply(lam)), 0) != w.sign * c:
                problems.append(f"support not W#-skew-stable at {lam.label()}")
                break
    result = _verdict("sharp-denominator-orbits", problems, len(lhs))
    result.window_size = frame.size
    return result


def sharp_affine_rho(rs: RootSystem) -> Weight:
    """The Weyl vector of the affinized Delta^#: pairs to 1 with every affine simple coroot of Delta^#."""
    rho = rs.basis.zero()
    for a in rs.positive_even:
        if a in rs.sharp:
            rho = rho + a / 2
    top = rs.theta_sharp
    return rho + rs.basis.lambda0() * (pair(rho, top) + norm(top) / 2)


def integral_candidates(rs: RootSystem, bound: int) -> Iterator[tuple[Weight, tuple[int, ...]]]:
    """
    lambda in the rational span of the affine simple roots of Delta^#, modulo delta,
    with <lambda, a^v> = k_a for every integer vector k with |k_a| <= bound.

    The delta direction is fixed by putting no weight on delta - theta^#; pairing
    vectors with no solution are skipped.
    """
    gens = affine_simple_sharp(rs)
    coroots = [coroot_of(a) for a in gens]
    finite = gens[:-1]
    cartan = sp.Matrix(len(finite), len(finite), lambda i, j: sp.Rational(str(cpair(finite[j], coroots[i]))))
    solve = cartan.inv()
    for k in product(range(-bound, bound + 1), repeat=len(gens)):
        x = solve * sp.Matrix(k[:-1])
        lam = rs.basis.zero()
        for c, a in zip(x, finite):
            lam = lam + a * scalar(c)
        if cpair(lam, coroots[-1]) != k[-1]:
            continue
        yield lam, k


def is_maximal_regular(mu: Weight, elements: Iterable[AffineWeylElement], frame: HeightFrame) -> bool:
    """No element moves mu strictly up and no element other than the identity fixes it."""
    for w in elements:
        image = w.apply(mu)
        if image == mu:
            if not w.is_identity():
                return False
        elif frame.is_positive(image - mu):
            return False
    return True


def check_imaginary_search(ws: _Workspace, bound: int = 2) -> CheckResult:
    """lambda with integral pairings and lambda + rho^# maximal in a regular orbit lies in Q delta."""
    rs = ws.rs
    rho_sharp = sharp_affine_rho(rs)
    reflections = [reflection(a) for a in affine_simple_sharp(rs)]
    problems: list[str] = []
    cases = accepted = 0
    for lam, k in integral_candidates(rs, bound):
        cases += 1
        mu = lam + rho_sharp
        if not is_maximal_regular(mu, reflections, rs.frame) or not is_maximal_regular(mu, ws.ball, rs.frame):
            continue
        accepted += 1
        if not lam.finite_part().is_zero():
            problems.append(f"{lam.label()} (pairings {list(k)}) is maximal-regular but not a multiple of delta")
    if not accepted:
        problems.append("rho^# itself was not found maximal-regular")
    return _verdict("imaginary-search", problems, cases)


CHECKS: dict[Selection, list[tuple[str, Callable[[_Workspace], CheckResult]]]] = {
    Selection.FINITE: [("finite-identity", check_finite_identity)],
    Selection.AFFINE: [
        ("affine-identity", check_affine_identity),
        ("rho-hat-coefficient", check_rho_hat_coefficient),
        ("support-in-U", check_support_in_u),
    ],
    Selection.TRANSLATION: [("translation-form", check_translation_form)],
    Selection.LEMMAS: [
        ("cartan-conditions", check_cartan_conditions),
        ("rho-pairings", check_rho_pairings),
        ("even-roots-invariant", check_even_roots_invariant),
        ("odd-reflection-invariance", check_odd_reflection_invariance),
        ("principal-roots", check_principal_roots),
        ("reflection-closure", check_reflection_closure),
        ("skew-finite", check_skew_finite),
        ("skew-affine", check_skew_affine),
        ("group-sanity", check_group_sanity),
        ("stabilizer", check_stabilizer),
        ("sharp-denominator-orbits", check_sharp_denominator_orbits),
        ("imaginary-search", check_imaginary_search),
    ],
}


def run_checks(
    rs: RootSystem,
    N: int,
    selection: Iterable[Selection | str] = tuple(Selection),
    *,
    shells: int = 3,
    theta_depth: int = 3,
) -> CheckReport:
    if N < 0:
        raise ConfigurationError(f"height must be >= 0, got {N}")
    chosen = set(parse_selection(selection))
    ws = _Workspace(rs, N, shells, theta_depth)
    report = CheckReport(rs.key, N)
    for sel in Selection:
        if sel not in chosen:
            continue
        for name, fn in CHECKS[sel]:
            started = time.perf_counter()
            try:
                result = fn(ws)
            except ConfigurationError:
                raise
            except SuperdenomError as exc:
                logger.warning("Check %s raised %s: %s", name, type(exc).__name__, exc)
                result = CheckResult(name, False, 0, 0, detail=f"{type(exc).__name__}: {exc}")
            except Exception as exc:
                logger.exception("Check %s crashed", name)
                result = CheckResult(name, False, 0, 0, detail=f"{type(exc).__name__}: {exc}")
            report.checks.append(result)
            report.timings[name] = round(time.perf_counter() - started, 4)
            logger.info("%s %s: %s (%.3fs)", rs.key, name, result.status, report.timings[name])
    report.series = {k: v for k, v in vars(ws).items() if isinstance(v, Series)}
    return report
