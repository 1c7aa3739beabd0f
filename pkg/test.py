import pytest
import json
import os
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from pydantic import ValidationError

import worker
from char_series import (
    Factor,
    Factored,
    Frame,
    Series,
    act,
    binomial,
    coefficient,
    first_mismatch,
    mul,
    mul_binomial_power,
    restrict,
    support,
    window_offsets,
)
from denominator import (
    Control,
    Selection,
    affine_lhs,
    affine_rhs_sharp,
    affine_rhs_translation,
    apply_control,
    finite_lhs,
    finite_rhs,
    integral_candidates,
    is_maximal_regular,
    parse_selection,
    run_checks,
    sharp_affine_rho,
)
from errors import (
    ConfigurationError,
    DegenerateFactor,
    ReflectError,
    SpanError,
    SpecError,
    TranslationError,
    UnsupportedFamily,
    WindowError,
)
from root_data import (
    Family,
    FamilySpec,
    Parity,
    affine_positive_roots,
    affine_simple_sharp,
    build_root_system,
    delta_sharp_simple,
    dual_coxeter,
    even_simple_roots,
    is_affine_root,
    maximal_root,
    theta_sharp,
)
from simple_systems import (
    cartan_matrix,
    explore_theta,
    odd_reflect,
    principal_roots,
    rho_of,
    start_system,
    theta_graph,
)
from superdenom_cli import RunConfig, build_parser, main, render_csv
from weights import Basis, BilinearForm, HeightFrame, _solve, coroot_of, cpair, norm, pair
from weyl import (
    decompose,
    enumerate_affine_sharp,
    generate_finite_sharp,
    identity,
    inversion_set,
    reflection,
    translation,
)

REPO_ROOT = Path(__file__).resolve().parent


@lru_cache(maxsize=None)
def system(family: str, m: int = 0, n: int = 0):
    """Root systems are immutable; build each family once per session."""
    return build_root_system(FamilySpec.parse(family, m, n))


def _run_cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "superdenom_cli", *args],
        capture_output=True,
        text=True,
        env=os.environ.copy(),
        cwd=str(REPO_ROOT),
    )


# ============================================================================
# WEIGHTS
# ============================================================================


def test_weight_arithmetic_is_exact():
    b = Basis("A(2,1)", 2, 1, BilinearForm(Fraction(1), Fraction(-1)))
    e1, e2, d1 = b.eps(1), b.eps(2), b.dl(1)
    half = (e1 - d1) / 2
    assert half.coeff("eps_1") == Fraction(1, 2)
    assert half * 2 == e1 - d1
    assert norm(e1 - e2) == 2
    assert norm(e1 - d1) == 0
    assert pair(e1 - d1, d1 - e2) == 1
    assert (e1 - d1).label() == "eps_1-del_1"
    assert b.zero().label() == "0"


def test_affine_pairing_uses_delta_and_lambda0():
    b = Basis("C(2)", 2, 1, BilinearForm(Fraction(1), Fraction(-1)))
    assert pair(b.delta(), b.lambda0()) == 1
    assert norm(b.delta()) == 0
    assert norm(b.lambda0()) == 0
    assert pair(b.eps(1), b.lambda0()) == 0


def test_weights_over_different_bases_do_not_mix():
    a = Basis("A(2,1)", 2, 1, BilinearForm(Fraction(1), Fraction(-1)))
    c = Basis("C(2)", 2, 1, BilinearForm(Fraction(1), Fraction(-1)))
    with pytest.raises(ConfigurationError):
        a.eps(1) + c.eps(1)


def test_unknown_basis_symbol_is_rejected():
    b = Basis("A(2,1)", 2, 1, BilinearForm(Fraction(1), Fraction(-1)))
    with pytest.raises(ConfigurationError, match="Unknown basis symbol"):
        b.weight({"eps_9": 1})


def test_sum_zero_basis_canonicalizes():
    b = Basis("G(3)", 3, 1, BilinearForm(Fraction(1), Fraction(-2, 3), sum_zero_eps=True))
    total = b.eps(1) + b.eps(2) + b.eps(3)
    assert total.is_zero()
    assert norm(b.eps(1)) == Fraction(2, 3)


def test_coroot_of_isotropic_and_non_isotropic():
    b = Basis("A(2,1)", 2, 1, BilinearForm(Fraction(1), Fraction(-1)))
    theta = b.eps(1) - b.eps(2)
    beta = b.eps(1) - b.dl(1)
    assert coroot_of(theta) == theta
    assert coroot_of(beta) == beta
    assert coroot_of(theta * 2) == theta / 2


def test_height_frame_coords_and_span_errors():
    rs = system("A", 2, 1)
    e1, e2, d1 = rs.basis.eps(1), rs.basis.eps(2), rs.basis.dl(1)
    hf = rs.finite_frame
    assert hf.coords(e1 - e2) == (1, 1)
    assert hf.height(e1 - e2) == 2
    assert hf.is_positive(e1 - e2)
    assert not hf.is_positive(e2 - d1)
    with pytest.raises(SpanError):
        hf.coords(e1)
    with pytest.raises(SpanError):
        HeightFrame.build([e1 - e2, e2 - e1])


def test_height_frame_coords_are_memoized_in_a_bounded_cache():
    rs = system("C", 2)
    nu = rs.theta + rs.pi[0]
    first = rs.finite_frame.coords(nu)
    before = _solve.cache_info().hits
    assert rs.finite_frame.coords(nu) == first
    assert _solve.cache_info().hits == before + 1
    assert _solve.cache_info().maxsize is not None
    assert not hasattr(rs.finite_frame, "_cache")


# ============================================================================
# ROOT DATA
# ============================================================================


def test_family_spec_parsing():
    assert FamilySpec.parse("A", 2, 1).key == "A(2,1)"
    assert FamilySpec.parse("B", 1, 1).family is Family.BNN
    assert FamilySpec.parse("F4", 7, 7).key == "F(4)"
    assert FamilySpec.parse("C", 3).key == "C(3)"


@pytest.mark.parametrize(
    "family,m,n,exc",
    [
        ("A", 2, 2, UnsupportedFamily),
        ("D", 2, 1, UnsupportedFamily),
        ("X", 1, 1, UnsupportedFamily),
        ("A", 1, 2, SpecError),
        ("C", 1, 0, SpecError),
        ("B", 2, 0, SpecError),
    ],
)
def test_family_spec_rejects_inadmissible(family, m, n, exc):
    with pytest.raises(exc):
        FamilySpec.parse(family, m, n)


def test_unsupported_family_is_a_configuration_error():
    with pytest.raises(ConfigurationError):
        FamilySpec.parse("A", 3, 3)


def test_a21_root_data():
    rs = system("A", 2, 1)
    b = rs.basis
    e1, e2, d1 = b.eps(1), b.eps(2), b.dl(1)
    assert len(rs.even_roots) == 2
    assert len(rs.odd_roots) == 4
    assert rs.pi == (e1 - d1, d1 - e2)
    assert rs.pi_parities == (Parity.ODD, Parity.ODD)
    assert rs.s_set == (e1 - d1,)
    assert rs.theta == e1 - e2
    assert rs.rho.is_zero()
    assert rs.hdual == 1
    assert rs.rho_hat == b.lambda0()
    assert rs.alpha0 == b.delta() - (e1 - e2)
    assert rs.xi is not None and norm(rs.xi) < 0


def test_a31_dual_coxeter():
    rs = system("A", 3, 1)
    assert rs.hdual == 2


@pytest.mark.parametrize(
    "key,expected",
    [
        (("A", 2, 1), Fraction(1)),
        (("A", 3, 1), Fraction(2)),
        (("B", 1, 1), Fraction(1, 2)),
    ],
)
def test_dual_coxeter(key, expected):
    rs = system(*key)
    assert dual_coxeter(rs) == expected
    assert dual_coxeter(rs) == rs.hdual
    assert pair(rs.rho_hat, rs.delta) == expected


def test_maximal_root_examples():
    c2 = system("C", 2)
    assert maximal_root(c2) == c2.basis.eps(1) * 2
    f4 = system("F4")
    assert maximal_root(f4) == f4.basis.eps(3) - f4.basis.eps(2)
    a21 = system("A", 2, 1)
    assert maximal_root(a21) == a21.theta


def test_sharp_simple_roots_and_theta_sharp():
    rs = system("C", 2)
    simple = delta_sharp_simple(rs)
    assert all(a in rs.sharp for a in simple)
    assert theta_sharp(rs) in rs.sharp
    assert affine_simple_sharp(rs) == simple + (rs.delta - theta_sharp(rs),)
    for a in rs.positive_even:
        if a in rs.sharp:
            assert rs.finite_frame.height(theta_sharp(rs)) >= rs.finite_frame.height(a)


def test_rho_hat_pairs_with_affine_simple_roots():
    for key in [("A", 2, 1), ("A", 3, 1), ("C", 2, 0), ("B", 1, 1)]:
        rs = system(*key)
        for beta in rs.pi_hat:
            assert pair(rs.rho_hat, beta) == norm(beta) / 2, (rs.key, beta.label())


@pytest.mark.parametrize(
    "key,even,odd",
    [
        (("A", 2, 1), 2, 4),
        (("C", 2, 0), 8, 4),
        (("F4", 0, 0), 20, 16),
        (("G3", 0, 0), 14, 14),
    ],
)
def test_root_counts(key, even, odd):
    rs = system(*key)
    assert len(rs.even_roots) == even
    assert len(rs.odd_roots) == odd
    assert len(rs.positive_even) == even // 2
    assert len(rs.positive_odd) == odd // 2


def test_sharp_and_delta2_split_even_roots():
    rs = system("C", 2)
    assert len(rs.sharp) == 8
    assert not rs.delta2
    rs = system("B", 1, 1)
    assert rs.sharp | rs.delta2 == rs.even_roots
    assert all(norm(a) > 0 for a in rs.sharp)
    assert all(norm(a) < 0 for a in rs.delta2)


def test_even_simple_roots_finite_and_affine():
    rs = system("A", 2, 1)
    theta = rs.theta
    assert even_simple_roots(rs) == frozenset({theta})
    assert even_simple_roots(rs, affine=True) == frozenset({theta, rs.delta - theta})


def test_affine_positive_roots_low_heights():
    rs = system("A", 2, 1)
    low = list(affine_positive_roots(rs, 1))
    assert len(low) == 3
    assert {e.root for e in low} == set(rs.pi_hat)
    assert all(e.height == 1 for e in low)
    assert list(affine_positive_roots(rs, 0)) == []


def test_imaginary_roots_carry_cartan_multiplicity():
    rs = system("A", 2, 1)
    imaginary = [e for e in affine_positive_roots(rs, 3) if e.root == rs.delta]
    assert len(imaginary) == 1
    assert imaginary[0].multiplicity == 2
    assert imaginary[0].parity is Parity.EVEN


def test_is_affine_root():
    rs = system("A", 2, 1)
    b = rs.basis
    beta = b.eps(1) - b.dl(1)
    assert is_affine_root(rs, rs.delta) is Parity.EVEN
    assert is_affine_root(rs, rs.delta * 2 + beta) is Parity.ODD
    assert is_affine_root(rs, rs.delta - rs.theta) is Parity.EVEN
    assert is_affine_root(rs, b.zero()) is None
    assert is_affine_root(rs, b.eps(1)) is None


# ============================================================================
# SIMPLE SYSTEMS
# ============================================================================


def test_cartan_matrix_of_distinguished_system():
    rs = system("A", 2, 1)
    cm = cartan_matrix(start_system(rs))
    assert cm.entries == ((0, 1), (1, 0))
    assert cm.tau == frozenset({0, 1})
    assert cm.violations() == []


def test_odd_reflection_example():
    rs = system("A", 2, 1)
    b = rs.basis
    e1, e2, d1 = b.eps(1), b.eps(2), b.dl(1)
    reflected = odd_reflect(start_system(rs), 0)
    assert reflected.roots == (d1 - e1, e1 - e2)
    assert reflected.parities == (Parity.ODD, Parity.EVEN)
    assert rho_of(rs.rho, reflected) == e1 - d1


def test_odd_reflection_needs_isotropic_odd_root():
    rs = system("A", 2, 1)
    reflected = odd_reflect(start_system(rs), 0)
    with pytest.raises(ReflectError):
        odd_reflect(reflected, 1)


def test_theta_of_a21():
    rs = system("A", 2, 1)
    b = rs.basis
    e1, e2, d1 = b.eps(1), b.eps(2), b.dl(1)
    theta = explore_theta(start_system(rs), None)
    assert len(theta) == 3
    assert frozenset({d1 - e1, e1 - e2}) in {ss.key for ss in theta}
    assert len(explore_theta(start_system(rs), 0)) == 1


def test_principal_roots_match_even_simple_roots():
    rs = system("A", 2, 1)
    found = principal_roots(explore_theta(start_system(rs), None))
    assert {a for a, _ in found} == {rs.theta}


def test_theta_graph_edges():
    rs = system("A", 2, 1)
    graph = theta_graph(explore_theta(start_system(rs), None))
    assert graph.number_of_nodes() == 3
    assert graph.number_of_edges() == 2


# ============================================================================
# WEYL GROUPS
# ============================================================================


def test_reflection_basics():
    rs = system("A", 2, 1)
    s = reflection(rs.theta)
    assert s.sign == -1
    assert s(rs.theta) == -rs.theta
    assert (s * s).is_identity()
    assert s.determinant() == -1
    with pytest.raises(ReflectError):
        reflection(rs.basis.eps(1) - rs.basis.dl(1))


def test_translation_and_decompose():
    rs = system("A", 2, 1)
    with pytest.raises(TranslationError):
        translation(rs.delta)
    w = translation(rs.theta) * reflection(rs.theta)
    y, mu = decompose(w)
    assert mu == rs.theta
    assert y == reflection(rs.theta)
    assert translation(rs.theta).fixes(rs.delta)


def test_finite_sharp_group_orders():
    assert len(generate_finite_sharp(system("A", 2, 1))) == 2
    assert len(generate_finite_sharp(system("C", 2))) == 8


def test_affine_sharp_ball():
    rs = system("A", 2, 1)
    assert len(enumerate_affine_sharp(rs, 0)) == 2
    ball = enumerate_affine_sharp(rs, 1)
    assert len(ball) == 4
    assert sorted(w.length for w in ball) == [0, 1, 1, 2]


def test_sum_zero_basis_elements_invert():
    rs = system("G3")
    s = reflection(rs.theta)
    assert s.inverse() == s
    assert s * s.inverse() == identity(rs.basis)
    t = translation(rs.theta)
    assert t.inverse() == translation(-rs.theta)
    assert (t * t.inverse()).is_identity()
    w = t * s
    assert w.inverse() == s * translation(-rs.theta)
    assert w.inverse().apply(w.apply(rs.rho_hat)) == rs.rho_hat


def test_inversion_set_counts_length():
    rs = system("A", 2, 1)
    assert inversion_set(rs, identity(rs.basis), 6) == set()
    s0 = reflection(rs.alpha0)
    assert inversion_set(rs, s0, 6) == {rs.alpha0}


# ============================================================================
# CHARACTER SERIES
# ============================================================================


def test_generalized_binomial():
    assert binomial(3, 2) == 3
    assert binomial(-1, 5) == -1
    assert binomial(-2, 2) == 3
    assert binomial(2, 3) == 0


def test_window_offsets_order():
    assert window_offsets(2, 1) == ((0, 0), (0, 1), (1, 0))
    assert window_offsets(3, -1) == ()
    assert len(window_offsets(3, 2)) == 10


def test_geometric_series_from_negative_power():
    rs = system("A", 2, 1)
    frame = Frame(rs.rho, 3, rs.finite_frame)
    alpha = rs.pi[0]
    inv = mul_binomial_power(Series.unit(frame), -1, alpha, -1)
    assert dict(inv.terms) == {(j, 0): 1 for j in range(4)}
    back = mul_binomial_power(inv, -1, alpha, 1)
    assert back == Series.unit(frame)


def test_series_arithmetic_and_mismatch():
    rs = system("A", 2, 1)
    frame = Frame(rs.rho, 2, rs.finite_frame)
    a = Series.build(frame, {(0, 0): 1, (1, 0): -1})
    b = Series.build(frame, {(0, 0): 1, (1, 0): 2})
    assert (a - a) == Series.zero(frame)
    assert first_mismatch(a, b) == ((1, 0), -1, 2)
    assert first_mismatch(a, a) is None
    sq = mul(a, a)
    assert dict(sq.terms) == {(0, 0): 1, (1, 0): -2, (2, 0): 1}


def test_zero_root_factor_is_degenerate():
    rs = system("A", 2, 1)
    frame = Frame(rs.rho, 2, rs.finite_frame)
    with pytest.raises(DegenerateFactor):
        mul_binomial_power(Series.unit(frame), 1, rs.basis.zero(), 1)


def test_window_errors():
    rs = system("A", 2, 1)
    small = Frame(rs.rho, 1, rs.finite_frame)
    large = Frame(rs.rho, 3, rs.finite_frame)
    with pytest.raises(WindowError):
        restrict(Series.unit(small), large)
    with pytest.raises(WindowError):
        small.offset(rs.rho + rs.pi[0])


def test_act_on_rho_hat_monomial():
    rs = system("A", 2, 1)
    source = Series.unit(Frame(rs.rho_hat, 30, rs.frame))
    target = Frame(rs.rho_hat, 2, rs.frame)
    fixed = act(reflection(rs.theta), source, target)
    assert fixed == Series.unit(target)
    assert support(fixed) == {rs.rho_hat}
    moved = act(translation(rs.theta), source, target)
    assert support(moved) == {rs.rho_hat + rs.theta - rs.delta}
    assert coefficient(moved, rs.rho_hat + rs.theta - rs.delta) == 1


def test_act_needs_a_large_enough_source_window():
    rs = system("A", 2, 1)
    source = Series.unit(Frame(rs.rho_hat, 4, rs.frame))
    with pytest.raises(WindowError):
        act(translation(rs.theta), source, Frame(rs.rho_hat, 1, rs.frame))


def test_support_lists_exponents():
    rs = system("A", 2, 1)
    lhs = finite_lhs(rs, 2)
    points = support(lhs)
    assert rs.rho in points
    assert rs.rho - rs.pi[0] in points
    assert rs.rho - rs.theta not in points
    assert len(points) == len(lhs)


def test_normalized_factor_flips_negative_root():
    rs = system("A", 2, 1)
    alpha = rs.pi[0]
    f = Factored(rs.rho, (Factor(-1, -alpha, 1),)).normalized(rs.finite_frame)
    assert f.lead == rs.rho + alpha
    assert f.scalar == -1
    assert f.factors == (Factor(-1, alpha, 1),)


# ============================================================================
# DENOMINATOR IDENTITIES
# ============================================================================


def test_finite_lhs_coefficients():
    rs = system("A", 2, 1)
    lhs = finite_lhs(rs, 2)
    assert coefficient(lhs, rs.rho) == 1
    assert coefficient(lhs, rs.rho - rs.pi[0]) == -1
    assert coefficient(lhs, rs.rho - rs.theta) == 0


def test_finite_identity_a21():
    rs = system("A", 2, 1)
    assert finite_lhs(rs, 3) == finite_rhs(rs, 3)


def test_affine_lhs_coefficient_at_alpha0():
    rs = system("A", 2, 1)
    lhs = affine_lhs(rs, 2)
    assert coefficient(lhs, rs.rho_hat) == 1
    assert coefficient(lhs, rs.rho_hat - rs.alpha0) == -1


def test_affine_identity_and_translation_form_a21():
    rs = system("A", 2, 1)
    rhs = affine_rhs_sharp(rs, 2)
    assert affine_lhs(rs, 2) == rhs
    total, stabilized = affine_rhs_translation(rs, 2, 2)
    assert stabilized
    assert total == rhs


FAMILIES = [
    ("A", 2, 1),
    ("A", 3, 1),
    ("B", 1, 2),
    ("B", 2, 1),
    ("B", 1, 1),
    ("B", 2, 2),
    ("C", 2, 0),
    ("C", 3, 0),
    ("D", 1, 2),
    ("D", 3, 1),
    ("F4", 0, 0),
    ("G3", 0, 0),
]


@pytest.mark.parametrize("key", FAMILIES, ids=lambda k: f"{k[0]}{k[1]}{k[2]}")
def test_finite_identity_all_families(key):
    rs = system(*key)
    lhs = finite_lhs(rs, 4)
    assert first_mismatch(lhs, finite_rhs(rs, 4)) is None
    assert coefficient(lhs, rs.rho) == 1


@pytest.mark.parametrize("key", FAMILIES, ids=lambda k: f"{k[0]}{k[1]}{k[2]}")
def test_affine_identity_all_families(key):
    rs = system(*key)
    report = run_checks(rs, 3, ["affine"])
    assert report.passed, [c.to_dict() for c in report.checks if not c.passed]


@pytest.mark.parametrize("key", [("B", 1, 1), ("B", 2, 2)])
def test_rho_hat_coefficient_for_equal_rank_b(key):
    rs = system(*key)
    assert rs.spec.family is Family.BNN
    assert coefficient(affine_rhs_sharp(rs, 3), rs.rho_hat) == 1


@pytest.mark.parametrize("key", [("B", 1, 1), ("C", 2, 0)])
def test_translation_form_stabilizes(key):
    rs = system(*key)
    total, stabilized = affine_rhs_translation(rs, 4, 4)
    assert stabilized
    assert first_mismatch(total, affine_rhs_sharp(rs, 4)) is None


@pytest.mark.parametrize("key", [("B", 1, 1), ("C", 2, 0), ("D", 1, 2), ("G3", 0, 0)])
def test_lemma_checks_beyond_type_a(key):
    rs = system(*key)
    report = run_checks(rs, 2, ["lemmas"])
    assert report.passed, [c.to_dict() for c in report.checks if not c.passed]
    for name in ("skew-affine", "odd-reflection-invariance", "principal-roots", "stabilizer", "imaginary-search"):
        assert report.get(name).passed


def test_full_battery_passes_on_g3():
    report = run_checks(system("G3"), 2, ["all"])
    assert report.passed, [c.to_dict() for c in report.checks if not c.passed]
    assert "group-sanity" in [c.name for c in report.checks]


@pytest.mark.parametrize("key", [("A", 2, 1), ("C", 2, 0)])
def test_integral_search_keeps_only_the_weyl_vector(key):
    rs = system(*key)
    rho = sharp_affine_rho(rs)
    gens = affine_simple_sharp(rs)
    for a in gens:
        assert cpair(rho, coroot_of(a)) == 1
    tests = [reflection(a) for a in gens] + enumerate_affine_sharp(rs, 2)
    candidates = list(integral_candidates(rs, 2))
    assert len(candidates) > 1
    for lam, k in candidates:
        assert [cpair(lam, coroot_of(a)) for a in gens] == list(k)
    accepted = [lam for lam, _ in candidates if is_maximal_regular(lam + rho, tests, rs.frame)]
    assert accepted == [rs.basis.zero()]


def test_maximal_regular_rejects_fixed_and_raised_points():
    rs = system("A", 2, 1)
    rho = sharp_affine_rho(rs)
    s = reflection(rs.theta)
    assert is_maximal_regular(rho, [identity(rs.basis), s], rs.frame)
    on_wall = rho - rs.theta / 2
    assert s.fixes(on_wall)
    assert not is_maximal_regular(on_wall, [s], rs.frame)
    below = rho - rs.theta * 2
    assert not is_maximal_regular(below, [s], rs.frame)


def test_parse_selection():
    assert parse_selection("all") == tuple(Selection)
    assert parse_selection("") == tuple(Selection)
    assert parse_selection("finite,affine,finite") == (Selection.FINITE, Selection.AFFINE)
    with pytest.raises(ConfigurationError, match="Unknown check selection"):
        parse_selection("finite,bogus")


def test_run_checks_a21_passes():
    rs = system("A", 2, 1)
    report = run_checks(rs, 2)
    assert report.passed, [c.to_dict() for c in report.checks if not c.passed]
    names = [c.name for c in report.checks]
    assert names[0] == "finite-identity"
    assert "translation-form" in names
    assert "imaginary-search" in names
    assert set(report.timings) == set(names)


def test_run_checks_selection_and_report_shape():
    rs = system("A", 3, 1)
    report = run_checks(rs, 2, ["finite"])
    assert [c.name for c in report.checks] == ["finite-identity"]
    payload = report.to_dict()
    assert list(payload) == ["spec", "N", "checks", "timings"]
    assert list(payload["checks"][0]) == ["name", "status", "window_size", "terms"]
    assert payload["spec"] == "A(3,1)"
    with pytest.raises(KeyError):
        report.get("affine-identity")


def test_run_checks_normalizes_selection():
    rs = system("A", 2, 1)
    names = [c.name for c in run_checks(rs, 1, ["all"]).checks]
    assert names == [c.name for c in run_checks(rs, 1).checks]
    assert [c.name for c in run_checks(rs, 1, "finite").checks] == ["finite-identity"]
    with pytest.raises(ConfigurationError):
        run_checks(rs, 1, ["bogus"])


def test_run_checks_rejects_negative_height():
    with pytest.raises(ConfigurationError):
        run_checks(system("A", 2, 1), -1)


def test_imaginary_multiplicity_control_fails_affine_identity():
    rs = apply_control(system("A", 2, 1), Control.IMAGINARY_MULT)
    assert rs.imaginary_multiplicity == 1
    report = run_checks(rs, 3, ["affine"])
    result = report.get("affine-identity")
    assert not result.passed
    assert result.mismatch is not None


def test_drop_s_control_fails_finite_identity():
    rs = apply_control(system("A", 2, 1), "drop-s")
    assert rs.s_set == ()
    report = run_checks(rs, 2, ["finite"])
    assert not report.passed
    assert report.failed == ["finite-identity"]


def test_drop_s_needs_nonempty_s():
    emptied = apply_control(system("C", 2), "drop-s")
    assert emptied.s_set == ()
    with pytest.raises(ConfigurationError):
        apply_control(emptied, "drop-s")


# ============================================================================
# CONFIGURATION / CLI
# ============================================================================


def test_run_config_validation():
    cfg = RunConfig(family="A", m=2, n=1, checks="finite,affine")
    assert cfg.checks == (Selection.FINITE, Selection.AFFINE)
    assert cfg.spec.key == "A(2,1)"
    with pytest.raises(ValidationError):
        RunConfig(family="A", m=2, n=2)
    with pytest.raises(ValidationError):
        RunConfig(family="A", m=2, n=1, height=-1)
    with pytest.raises(ValidationError):
        RunConfig(family="A", m=2, n=1, checks="bogus")


def test_run_config_from_args_wraps_validation_errors():
    args = build_parser().parse_args(["verify", "--family", "A", "--m", "2", "--n", "2"])
    with pytest.raises(ConfigurationError):
        RunConfig.from_args(args)


def test_render_csv_lists_series():
    rs = system("A", 2, 1)
    text = render_csv(run_checks(rs, 1, ["finite"]))
    lines = text.splitlines()
    assert lines[0] == "series,offset,height,coefficient"
    assert any(line.startswith("finite_lhs,0 0,0,1") for line in lines)
    assert any(line.startswith("finite_rhs,") for line in lines)


def test_main_info_json(capsys):
    assert main(["info", "--family", "A", "--m", "2", "--n", "1", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["spec"] == "A(2,1)"
    assert data["h_dual"] == "1"
    assert data["weyl_sharp_order"] == 2
    assert data["s"] == ["eps_1-del_1"]
    assert data["theta_sharp"] == "eps_1-eps_2"
    assert data["sharp_simple"] == ["eps_1-eps_2"]


def test_main_info_writes_theta_graph(tmp_path, capsys):
    out = tmp_path / "theta.graphml"
    assert main(["info", "--family", "A", "--m", "2", "--n", "1", "--theta-graph", str(out), "--theta-depth", "2"]) == 0
    assert out.exists()
    assert "graphml" in out.read_text()


def test_main_verify_text_and_out(tmp_path):
    out = tmp_path / "report.txt"
    code = main(
        ["verify", "--family", "A", "--m", "2", "--n", "1", "--height", "2", "--checks", "finite", "--format", "text", "--out", str(out)]
    )
    assert code == 0
    assert out.read_text().startswith("A(2,1) N=2: PASS")


def test_main_verify_control_exit_code(capsys):
    code = main(["verify", "--family", "A", "--m", "2", "--n", "1", "--height", "2", "--checks", "finite", "--control", "drop-s"])
    assert code == 1
    data = json.loads(capsys.readouterr().out)
    assert data["checks"][0]["status"] == "fail"


def test_main_config_error_exit_code(capsys):
    assert main(["verify", "--family", "A", "--m", "2", "--n", "2"]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_verify_subprocess():
    p = _run_cli("verify", "--family", "A", "--m", "2", "--n", "1", "--height", "2")
    assert p.returncode == 0, p.stderr
    data = json.loads(p.stdout)
    assert data["spec"] == "A(2,1)"
    assert all(c["status"] == "pass" for c in data["checks"])


def test_cli_unsupported_family_subprocess():
    p = _run_cli("verify", "--family", "A", "--m", "2", "--n", "2")
    assert p.returncode == 2
    assert "dual Coxeter" in p.stderr


def test_cli_empty_batch_subprocess(tmp_path):
    batch = tmp_path / "empty.txt"
    batch.write_text("# nothing here\n\n")
    p = _run_cli("batch", str(batch))
    assert p.returncode == 0, p.stderr


# ============================================================================
# BATCH WORKER
# ============================================================================


def test_parse_batch_skips_comments_and_blanks():
    text = "# header\n\nA 2 1 2\nC 2 0 1 drop-s  # trailing\n"
    entries = worker.parse_batch(text)
    assert [(e.family, e.m, e.n, e.N) for e in entries] == [("A", 2, 1, 2), ("C", 2, 0, 1)]
    assert entries[1].control is Control.DROP_S
    assert entries[1].line_no == 4


@pytest.mark.parametrize("line", ["A 2 1", "Z 1 1 1", "A x 1 2", "A 2 1 -1", "A 2 1 2 nope"])
def test_parse_batch_rejects_malformed_lines(line):
    with pytest.raises(ConfigurationError, match="line 1"):
        worker.parse_batch(line)


def test_batch_exit_code_precedence():
    def r(status):
        return {"status": status}

    assert worker.batch_exit_code([]) == 0
    assert worker.batch_exit_code([r("pass"), r("fail")]) == 1
    assert worker.batch_exit_code([r("fail"), r("config-error")]) == 2
    assert worker.batch_exit_code([r("config-error"), r("error"), r("pass")]) == 3


def test_run_entry_statuses():
    ok = worker.run_entry(worker.BatchEntry("A", 2, 1, 1))
    assert ok["status"] == "pass"
    assert ok["spec"] == "A(2,1)"
    assert ok["failed_checks"] == []
    bad = worker.run_entry(worker.BatchEntry("A", 2, 2, 1))
    assert bad["status"] == "config-error"
    failed = worker.run_entry(worker.BatchEntry("A", 2, 1, 1, Control.DROP_S))
    assert failed["status"] == "fail"
    assert "finite-identity" in failed["failed_checks"]
    g3 = worker.run_entry(worker.BatchEntry("G3", 0, 0, 1))
    assert g3["status"] == "pass", g3
    assert g3["spec"] == "G(3)"


async def test_batch_worker_sequential_keeps_order():
    entries = worker.parse_batch("A 2 1 1\nA 2 2 1\n")
    results = await worker.run_batch(entries, workers=1)
    assert [r["status"] for r in results] == ["pass", "config-error"]


async def test_batch_worker_pool_keeps_order(mocker):
    mocker.patch("worker.ProcessPoolExecutor", ThreadPoolExecutor)
    entries = worker.parse_batch("A 2 2 1\nA 2 1 1\nA 2 1 1 drop-s\n")
    results = await worker.BatchWorker(entries, workers=2).run()
    assert [r["status"] for r in results] == ["config-error", "pass", "fail"]
    assert worker.batch_exit_code(results) == 2


async def test_batch_worker_uses_executor(mocker):
    run = mocker.patch("worker.run_entry", return_value={"status": "pass"})
    mocker.patch("worker.ProcessPoolExecutor", ThreadPoolExecutor)
    entries = [worker.BatchEntry("A", 2, 1, k) for k in range(3)]
    results = await worker.BatchWorker(entries, workers=3, shells=2, theta_depth=1).run()
    assert results == [{"status": "pass"}] * 3
    assert run.call_count == 3
    run.assert_any_call(entries[0], 2, 1)


def test_worker_main_json(tmp_path, capsys):
    batch = tmp_path / "batch.txt"
    batch.write_text("A 2 1 1\n")
    assert worker.main([str(batch), "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data[0]["spec"] == "A(2,1)"
    assert data[0]["status"] == "pass"


def test_worker_main_missing_file(tmp_path, capsys):
    assert worker.main([str(tmp_path / "absent.txt")]) == 2
