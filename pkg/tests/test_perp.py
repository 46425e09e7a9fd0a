import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import module
from dshift.angles import graded_cosine, rayleigh_cosine
from dshift.perp import (
    BracketFn,
    arbitrate_guo_wang,
    certify_perpendicular,
    commutator_formula_check,
    derivative_orthogonality,
    frame_operators_commute,
    gradient_orthogonality,
    gradient_span,
    guo_wang_apply,
    pair_commutes,
    projections_commute,
    syntactic_criterion,
    verify_guo_wang,
)
from dshift.poly import MultiIndex, da_norm, da_weight, multiply_adjoint, parse_poly
from dshift.slices import coordinates, degree_slice, join, meet, projection

MONOMIAL = [["z1^2"], ["z1*z2"], ["z3^3"]]
DISJOINT = [["z1^2 + z2^2"], ["z3*z4 - z3^2"]]
ORTH_LINEAR = [["z1 + z2"], ["z1 - z2"], ["z3"]]
BATTERIES = {"monomial": (3, MONOMIAL), "disjoint": (4, DISJOINT), "orthogonal-linear": (3, ORTH_LINEAR)}


def family(d, gens):
    return [module(d, *g) for g in gens]


def P(text, d):
    return parse_poly(text, dim=d)


def test_coordinate_family_perpendicular(coordinate_family):
    cert = projections_commute(coordinate_family, range(1, 9))
    assert cert.verdict == "perpendicular" and cert.max_commutator < 1e-12
    assert cert.witness is None


def test_tilted_line_has_degree_one_witness():
    cert = projections_commute([module(2, "z1"), module(2, "z1 + z2")], range(1, 5))
    assert cert.verdict == "not-perpendicular"
    assert cert.max_commutator > 10 * cert.tol
    w = cert.witness
    assert w.degree in {k for k, v in cert.per_degree if v > 10 * cert.tol}
    assert dict(cert.per_degree)[1] > 0.1
    assert da_norm(w.vector) == pytest.approx(1.0)


def test_same_module_twice():
    m = module(3, "z1^2 + z2*z3")
    assert projections_commute([m, m], range(2, 7)).verdict == "perpendicular"


def test_projection_needs_two_modules(coordinate_family):
    with pytest.raises(ValueError):
        projections_commute(coordinate_family[:1], range(1, 3))


def test_frame_and_projection_criteria_agree():
    for d, gens in BATTERIES.values():
        frame = frame_operators_commute([[P(g, d) for g in fam] for fam in gens], range(1, 9))
        assert frame.verdict == "perpendicular"
        assert projections_commute(family(d, gens), range(1, 9)).verdict == "perpendicular"


def test_frame_failure_is_inconclusive():
    r = 1 / math.sqrt(2)
    fams = [[P("z1", 2)], [P("z1", 2).scale(r) + P("z2", 2).scale(r)]]
    assert frame_operators_commute(fams, range(1, 6)).verdict == "inconclusive"
    direct = projections_commute([module(2, "z1"), module(2, "z1 + z2")], range(1, 6))
    assert direct.verdict == "not-perpendicular"


def test_bracket_values():
    # p = q = z1: the alpha = e1 coefficient is 1/(K+1) after dividing out alpha!.
    for K in range(0, 8):
        assert BracketFn(1, 1, 1, "corrected")(K) == Fraction(1, K + 1)
        assert BracketFn(1, 1, 0, "corrected")(K) == Fraction(K, K + 1)
    assert BracketFn(1, 1, 1, "paper")(3) == Fraction(3 * 2, 4)
    with pytest.raises(ValueError):
        BracketFn(1, 1, 1, "printed")


@pytest.mark.parametrize("variant", ["paper", "corrected"])
@pytest.mark.parametrize("m,n,a", [(1, 1, 0), (1, 1, 1), (2, 2, 1), (2, 3, 2), (3, 1, 1), (3, 3, 3)])
def test_bracket_annihilation(variant, m, n, a):
    sign = 1 if variant == "corrected" else -1
    for K in range(0, 10):
        value = BracketFn(m, n, a, variant)(K)
        assert value >= 0
        assert (value == 0) == (K - n + sign * a < 0 or K + m - n < 0)


@pytest.mark.parametrize("m,n,a", [(1, 1, 1), (2, 2, 1), (2, 3, 2), (3, 2, 2)])
def test_corrected_bracket_matches_term_dropout(m, n, a):
    # The alpha term acts on f of degree K + m - n through an adjoint of degree m - |alpha|.
    for K in range(0, 9):
        deg_f = K + m - n
        term_vanishes = deg_f < 0 or deg_f < m - a
        assert (BracketFn(m, n, a, "corrected")(K) == 0) == term_vanishes


def test_guo_wang_apply_identity_case():
    z1 = P("z1", 2)
    for k in range(0, 7):
        f = P(f"z1^{k}", 2) if k else P("1", 2)
        assert guo_wang_apply(z1, z1, f) == f


@pytest.mark.parametrize("gamma", [(1, 0), (1, 1), (2, 1), (0, 3)])
@pytest.mark.parametrize("beta", [(0, 0), (2, 0), (1, 2), (3, 1)])
def test_guo_wang_apply_monomial_diagonal(gamma, beta):
    p = parse_poly("1", dim=2).monomial(gamma)
    f = p.monomial(beta)
    out = guo_wang_apply(p, p, f)
    ratio = da_weight(MultiIndex(np.add(beta, gamma))) / da_weight(MultiIndex(beta))
    assert out == f.scale(ratio)


def test_guo_wang_apply_disjoint_keeps_only_leading_term():
    p, q = P("z1^2", 3), P("z2*z3", 3)
    f = P("z1^3 + z1*z2*z3", 3)
    expected = (q * multiply_adjoint(p, f)).scale(BracketFn(2, 2, 0)(f.degree))
    assert guo_wang_apply(p, q, f) == expected


def test_verify_guo_wang_examples():
    z1 = P("z1", 1)
    assert verify_guo_wang(z1, z1, 8).residual < 1e-12
    assert verify_guo_wang(z1, z1, 8, "paper").residual > 1e-6
    s = verify_guo_wang(P("z1^2 + z2*z3", 3), P("z2^2", 3), 8)
    assert s.residual < 1e-10 and s.lhs_norm > 0
    with pytest.raises(ValueError, match="max_degree"):
        verify_guo_wang(z1, z1, 1)


def test_verify_guo_wang_lhs_against_oracle():
    z = oracles.symbols(2)
    p, q = P("z1*z2", 2), P("z2^2", 2)
    for k in range(0, 4):
        dense_q = oracles.multiplication_matrix(z[1] ** 2, 2, k)
        dense_p = oracles.multiplication_matrix(z[0] * z[1], 2, k)
        lhs = dense_p.conj().T @ dense_q
        for j, alpha in enumerate(oracles.monomials(2, k)):
            f = p.monomial(alpha).scale(math.sqrt(1 / float(da_weight(MultiIndex(alpha)))))
            rhs = guo_wang_apply(p, q, f)
            assert np.allclose(coordinates(rhs), lhs[:, j], atol=1e-12)


def test_arbitration_prefers_corrected():
    for p, q, d in [("z1", "z1", 1), ("z1*z2", "z2^2", 2), ("z1^2 + z2*z3", "z2^2", 3)]:
        arb = arbitrate_guo_wang(P(p, d), P(q, d), 8)
        assert arb.winner == "corrected"
    both = arbitrate_guo_wang(P("z1", 2), P("z2", 2), 6)
    assert both.winner is None


def test_commutator_formula_examples():
    mono = commutator_formula_check(P("z1^2", 2), P("z1*z2", 2), 8)
    assert mono.residual < 1e-12 and mono.lhs_norm < 1e-12
    disj = commutator_formula_check(P("z1", 2), P("z2", 2), 6)
    assert disj.lhs_norm == 0
    r = 1 / math.sqrt(2)
    tilt = commutator_formula_check(P("z1", 2), P("z1", 2).scale(r) + P("z2", 2).scale(r), 8)
    assert tilt.lhs_norm > 0.1 and tilt.residual < 1e-10


def test_pair_commutes_tiers():
    ok = pair_commutes(P("z1 + z2", 2), P("z1 - z2", 2), range(1, 8))
    assert ok.commute and ok.linear_rule and not ok.notes
    r = 1 / math.sqrt(2)
    bad = pair_commutes(P("z1", 2), P("z1", 2).scale(r) + P("z2", 2).scale(r), range(1, 8))
    assert bad.commute is False and bad.linear_rule is False
    mono = pair_commutes(P("z1^2", 2), P("z1*z2", 2), range(2, 8))
    assert mono.commute and mono.per_alpha_selfadjoint and mono.linear_rule is None


def test_derivative_orthogonality_examples():
    assert derivative_orthogonality([[P("z1^2", 3)], [P("z2*z3", 3)]]) == {(0, 1): True}
    assert derivative_orthogonality([[P("z1^2", 2)], [P("z1*z2", 2)]]) == {(0, 1): False}
    assert derivative_orthogonality([[P("z1^2 + z2^2", 3)], [P("z3^2", 3)]]) == {(0, 1): True}


def test_gradient_orthogonality_examples():
    assert gradient_orthogonality([[P("z1^2", 2)], [P("z2^2", 2)]]) == {(0, 1): True}
    assert gradient_span(P("z1*z2", 2)).shape == (2, 2)
    assert gradient_orthogonality([[P("z1*z2", 4)], [P("z3*z4", 4)]]) == {(0, 1): True}
    assert gradient_orthogonality([[P("z1*z2", 3)], [P("z2*z3", 3)]]) == {(0, 1): False}


def test_syntactic_rules():
    assert syntactic_criterion(family(3, MONOMIAL)) == "monomial-rule"
    assert syntactic_criterion(family(3, ORTH_LINEAR)) == "linear-rule"
    assert syntactic_criterion(family(4, DISJOINT)) == "disjoint-vars"
    assert syntactic_criterion([module(2, "z1"), module(2, "z1 + z2")]) is None


def test_certify_names_rule(coordinate_family):
    cert = certify_perpendicular(coordinate_family, range(1, 6))
    assert cert.verdict == "perpendicular" and cert.criterion == "monomial-rule"
    assert cert.to_dict()["max_commutator"] < 1e-12


def test_perpendicular_families_have_positive_angle():
    for d, gens in BATTERIES.values():
        assert graded_cosine(family(d, gens), range(1, 9)).max_cosine < 1 - 0.05


def test_perpendicular_yet_nonzero_cosine(coordinate_family):
    assert projections_commute(coordinate_family, range(1, 6)).is_perpendicular
    assert graded_cosine(coordinate_family, range(1, 6)).max_cosine == pytest.approx(0.5)


PAIRS = [("z1", "z2"), ("z1", "z1 + z2"), ("z1^2", "z1*z2"), ("z1^2 + z2^2", "z1*z2"), ("z1*z2", "z2^2 - z1^2")]


@pytest.mark.parametrize("p,q", PAIRS)
def test_two_family_equivalence(p, q):
    fam = [module(2, p), module(2, q)]
    cert = projections_commute(fam, range(1, 7))
    for k, norm in cert.per_degree:
        cos = rayleigh_cosine([degree_slice(m, k) for m in fam])
        assert (cos < 1e-9) == (norm < 1e-9)


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1))
def test_lattice_closure(seed):
    rng = np.random.default_rng(seed)
    d, gens = list(BATTERIES.values())[int(rng.integers(0, 3))]
    fam = family(d, gens)
    for k in (2, 3, 4):
        slices = [degree_slice(m, k) for m in fam]
        picks = [rng.choice(len(slices), size=int(rng.integers(1, len(slices) + 1)), replace=False) for _ in range(3)]
        elements = []
        for idx in picks:
            op = join if rng.random() < 0.5 else meet
            elements.append(op(*[slices[i] for i in idx]))
        Ps = [projection(s) for s in elements]
        for A in Ps:
            for B in Ps:
                assert np.linalg.norm(A @ B - B @ A, 2) < 1e-10
