import dataclasses
import random

import pytest

from jordanplane.errors import LiftingError, RewriteError
from jordanplane.freealg import FreeElement, add_into, primitivity_defect, x21
from jordanplane.lifting import (
    Case,
    IsoVerdict,
    SmashElement,
    SmashTensor,
    TripleAction,
    bosonize,
    build_lifting,
    enveloping_relations,
    format_group_element,
    hopf_ideal_check,
    iso_classify,
    jordan_relation,
    one_dim_rep,
    pbw_check,
    relation_elements,
    skew_primitive_defect,
    smash_coproduct,
    smash_multiply,
    zero_divisor_witness,
)
from jordanplane.rewrite import complete_to_degree
from jordanplane.scalar import Scalar
from jordanplane.ydcat import FGAbelianGroup, GroupAutomorphism, infinite_cyclic, make_triple, transport_triple


def smash(t, text):
    return SmashElement.parse(text, t)


def _random_smash(t, rng, max_degree=2):
    terms = {}
    for _ in range(3):
        word = tuple(rng.randint(1, 2) for _ in range(rng.randint(0, max_degree)))
        terms[(word, (rng.randint(-2, 2),))] = Scalar.rational(rng.randint(-3, 3))
    return SmashElement(t, terms)


def _counit_left(t, tensor):
    """(counit (x) id) applied to a tensor."""
    terms = {}
    for ((a, _), b), c in tensor.terms.items():
        if not a:
            add_into(terms, b, c)
    return SmashElement(t, terms)


def _coassociativity_defect(t, e):
    defect = {}
    for (a, b), c in smash_coproduct(t, e).terms.items():
        for (a1, a2), x in smash_coproduct(t, SmashElement(t, {a: 1})).terms.items():
            add_into(defect, (a1, a2, b), c * x)
        for (b1, b2), y in smash_coproduct(t, SmashElement(t, {b: 1})).terms.items():
            add_into(defect, (a, b1, b2), -(c * y))
    return defect


# ---------- smash product ----------
def test_group_letters_move_right(jordan_triple, super_triple):
    assert smash(jordan_triple, "g x2") == smash(jordan_triple, "x2 g + x1 g")
    assert smash(super_triple, "g x1") == smash(super_triple, "-x1 g")
    assert smash(super_triple, "g^-1 x2") == smash(super_triple, "-x2 g^-1 - x1 g^-1")


def test_unit_is_neutral(super_triple):
    e = smash(super_triple, "x2 x1 g^2 - 3*x1")
    one = SmashElement.one(super_triple)
    assert smash_multiply(super_triple, one, e) == e
    assert e * one == e


def test_smash_product_is_associative(jordan_triple, super_triple):
    rng = random.Random(21)
    for t in (jordan_triple, super_triple):
        for _ in range(5):
            a, b, c = (_random_smash(t, rng) for _ in range(3))
            assert (a * b) * c == a * (b * c)


def test_parse_print_roundtrip(super_triple):
    e = smash(super_triple, "x1 x2 g^2 - 1/2*g^-1 + (z + 1)*x2")
    assert smash(super_triple, str(e)) == e
    assert str(smash(super_triple, "g^0")) == "1"
    assert str(SmashElement.zero(super_triple)) == "0"


def test_format_group_elements():
    t = make_triple(FGAbelianGroup(1, (2,)), (1, 0), [1, -1], [1, 0])
    assert format_group_element(t, (2, 1)) == "g^2 h2"
    assert format_group_element(t, (0, 0)) == ""
    assert smash(t, "h2 x1") == smash(t, "-x1 h2")
    assert TripleAction(t).format_tag((-1, 0)) == "g^-1"


# ---------- coproduct ----------
def test_coproduct_of_generators(super_triple):
    t = super_triple
    one = SmashElement.one(t)
    g = SmashElement.group_element(t, (1,))
    x1 = SmashElement.x(t, 1)
    assert smash_coproduct(t, x1) == SmashTensor.pure(x1, one) + SmashTensor.pure(g, x1)
    g3 = SmashElement.group_element(t, (3,))
    assert smash_coproduct(t, g3) == SmashTensor.pure(g3, g3)


def test_super_jordan_cubic_coproduct(super_triple, super_jordan):
    """Test Delta(r) = r (x) 1 + g^3 (x) r + x1 g^2 (x) x1^2 - 2 x1^2 g (x) x2."""
    t = super_triple
    c = x21(super_jordan)
    x1, x2 = FreeElement.generator(super_jordan, 1), FreeElement.generator(super_jordan, 2)
    r = SmashElement.from_free(t, x2 * c - c * x2 - x1 * c)
    expected = (
        SmashTensor.pure(r, SmashElement.one(t))
        + SmashTensor.pure(smash(t, "g^3"), r)
        + SmashTensor.pure(smash(t, "x1 g^2"), smash(t, "x1 x1"))
        + SmashTensor.pure(smash(t, "x1 x1 g"), smash(t, "x2")).scale(-2)
    )
    assert smash_coproduct(t, r) == expected


def test_bosonized_braided_coproduct(super_triple, super_jordan):
    """Test the braided defect of r bosonizes to the smash defect."""
    t = super_triple
    c = x21(super_jordan)
    x1, x2 = FreeElement.generator(super_jordan, 1), FreeElement.generator(super_jordan, 2)
    r_free = x2 * c - c * x2 - x1 * c
    r = SmashElement.from_free(t, r_free)
    assert bosonize(t, primitivity_defect(super_jordan, r_free)) == skew_primitive_defect(t, r, (3,))


def test_coproduct_is_coassociative_and_counital(jordan_triple, super_triple):
    rng = random.Random(4)
    for t in (jordan_triple, super_triple):
        for _ in range(4):
            e = _random_smash(t, rng, max_degree=3)
            assert not _coassociativity_defect(t, e)
            assert _counit_left(t, smash_coproduct(t, e)) == e


def test_coproduct_is_multiplicative(jordan_triple):
    rng = random.Random(8)
    t = jordan_triple
    for _ in range(4):
        a, b = _random_smash(t, rng), _random_smash(t, rng)
        assert smash_coproduct(t, a * b) == smash_coproduct(t, a) * smash_coproduct(t, b)


def test_x1_is_skew_primitive(jordan_triple):
    assert not skew_primitive_defect(jordan_triple, SmashElement.x(jordan_triple, 1), (1,))
    assert skew_primitive_defect(jordan_triple, SmashElement.x(jordan_triple, 1), (2,))


# ---------- building liftings ----------
def test_jordan_lifting_rules(jordan_triple):
    p = build_lifting(jordan_triple, 1)
    assert p.case is Case.JORDANIAN
    assert [r.lhs for r in p.rules.rules] == [(2, 1)]
    assert p.flat
    assert p.relations[0] == smash(jordan_triple, "x2 x1 - x1 x2 + 1/2*x1 x1 - 1 + g^2")


def test_super_jordan_lifting_rules(super_triple):
    t = super_triple
    p = build_lifting(t, 1)
    assert p.case is Case.SUPER_JORDANIAN
    assert [r.lhs for r in p.system.rules] == [(1, 1), (2, 2, 1)]
    assert p.flat
    first, second = p.system.rules
    assert SmashElement(t, first.rhs_terms) == smash(t, "1 - g^2")
    assert SmashElement(t, second.rhs_terms) == smash(t, "x1 x2 x2 + x1 x2 x1 - x2 - x2 g^2 + x1 g^2")


def test_zero_deformation_is_graded(super_triple):
    p = build_lifting(super_triple, 0)
    assert SmashElement(super_triple, p.system.rules[0].rhs_terms).is_zero()


def test_lambda_forced_to_zero_when_chi_squared_nontrivial():
    t = make_triple(FGAbelianGroup(2), (1, 0), [1, 2], [1, 0])
    with pytest.raises(LiftingError, match="must be 0"):
        build_lifting(t, 1)
    assert build_lifting(t, 0).flat


def test_torsion_character_allows_deformation():
    t = make_triple(FGAbelianGroup(1, (2,)), (1, 0), [1, -1], [1, 0])
    p = build_lifting(t, 1, degree=4)
    assert p.flat
    assert hopf_ideal_check(p).ok


def test_invalid_triple_rejected():
    t = make_triple(infinite_cyclic(), (1,), ["z^4"], [1])
    with pytest.raises(LiftingError, match="invalid YD-triple"):
        build_lifting(t, 0)


def test_unorientable_relation(jordan_triple):
    with pytest.raises(RewriteError, match="group tags"):
        complete_to_degree([smash(jordan_triple, "x1 + x1 g")], dim=2, action=TripleAction(jordan_triple))


def test_group_relation_collapses(jordan_triple):
    """Test a relation living in the group algebra makes the presentation non-flat."""
    p = build_lifting(jordan_triple, 1, degree=3)
    extra = smash(jordan_triple, "1 - g^2")
    system = complete_to_degree([*p.relations, extra], degree=3, dim=2, action=TripleAction(jordan_triple))
    assert len(system.collapses) == 1
    assert "g^2" in system.collapses[0]
    collapsed = dataclasses.replace(p, relations=p.relations + (extra,), system=system)
    assert p.flat
    assert not collapsed.flat
    report = pbw_check(collapsed, 3)
    assert not report.ok
    assert report.collapses == system.collapses


# ---------- Hopf ideal ----------
@pytest.mark.parametrize("lam", [0, 1])
def test_hopf_ideal_jordan(jordan_triple, lam):
    assert hopf_ideal_check(build_lifting(jordan_triple, lam)).ok


@pytest.mark.parametrize("lam", [0, 1])
def test_hopf_ideal_super_jordan(super_triple, lam):
    assert hopf_ideal_check(build_lifting(super_triple, lam)).ok


def test_second_super_relation_needs_first(super_triple):
    """Test relation 2 is skew-primitive only modulo relation 1."""
    _, second = relation_elements(super_triple, 1)
    assert skew_primitive_defect(super_triple, second, (3,))


def test_wrong_deformation_reported(jordan_triple):
    p = build_lifting(jordan_triple, 1)
    wrong = dataclasses.replace(p, relations=(jordan_relation(jordan_triple, 1, tail_power=1),))
    report = hopf_ideal_check(wrong)
    assert not report.ok
    assert report.defects[0][0] == "relation 1"


# ---------- PBW ----------
@pytest.mark.slow
@pytest.mark.parametrize("lam", [0, 1])
def test_pbw_to_degree_eight(jordan_triple, super_triple, lam):
    for t in (jordan_triple, super_triple):
        report = pbw_check(build_lifting(t, lam, degree=8), 8)
        assert report.ok
        assert report.counts == tuple(range(1, 10))


def test_pbw_fails_without_relations(jordan_triple):
    p = build_lifting(jordan_triple, 1, degree=3)
    free = dataclasses.replace(
        p,
        relations=(),
        skew_degrees=(),
        system=complete_to_degree([], degree=3, dim=2, action=TripleAction(jordan_triple)),
    )
    report = pbw_check(free, 3)
    assert not report.ok
    assert report.first_bad_degree == 2
    assert report.counts == (1, 2, 4, 8)


# ---------- representations and zero divisors ----------
def test_enveloping_relations_drop_group_letters(jordan_triple):
    p = build_lifting(jordan_triple, 1)
    assert enveloping_relations(p) == [smash(jordan_triple, "x2 x1 - x1 x2 + 1/2*x1 x1 - 1")]


def test_one_dim_rep_witnesses(jordan_triple, super_triple):
    assert one_dim_rep(build_lifting(jordan_triple, "1/2"), 1, 1).ok
    assert one_dim_rep(build_lifting(super_triple, 1), 1, 0).ok
    report = one_dim_rep(build_lifting(jordan_triple, 1), 1, 1)
    assert not report.ok
    assert report.violated[0][1] == Scalar.rational("-1/2")


@pytest.mark.parametrize("lam, root", [(1, 1), (4, 2), (4, -2), (0, 0)])
def test_zero_divisor_witness(super_triple, lam, root):
    report = zero_divisor_witness(build_lifting(super_triple, lam), root)
    assert report.ok
    assert report.product.is_zero()


def test_zero_divisor_witness_errors(jordan_triple, super_triple):
    with pytest.raises(LiftingError, match="lambda"):
        zero_divisor_witness(build_lifting(super_triple, 4), 3)
    with pytest.raises(LiftingError, match="super Jordanian"):
        zero_divisor_witness(build_lifting(jordan_triple, 1), 1)


# ---------- isomorphism classes ----------
def test_iso_scaling(jordan_triple):
    result = iso_classify(build_lifting(jordan_triple, 1), build_lifting(jordan_triple, 4))
    assert result.verdict is IsoVerdict.ISOMORPHIC
    assert result.scaling == Scalar.rational("1/4")


def test_iso_lambda_class(jordan_triple):
    result = iso_classify(build_lifting(jordan_triple, 0), build_lifting(jordan_triple, 1))
    assert result.verdict is IsoVerdict.NOT_ISOMORPHIC
    assert "lambda" in result.obstruction


def test_iso_along_inversion(jordan_triple):
    f = GroupAutomorphism(infinite_cyclic(), ((-1,),))
    p = build_lifting(jordan_triple, 1)
    q = build_lifting(transport_triple(jordan_triple, f), 7)
    result = iso_classify(p, q)
    assert result.verdict is IsoVerdict.ISOMORPHIC
    assert result.witness.matrix == ((-1,),)
    # symmetric
    assert iso_classify(q, p).verdict is IsoVerdict.ISOMORPHIC


def test_iso_different_cases(jordan_triple, super_triple):
    result = iso_classify(build_lifting(jordan_triple, 1), build_lifting(super_triple, 1))
    assert result.verdict is IsoVerdict.NOT_ISOMORPHIC


def test_iso_needs_same_group(jordan_triple):
    t = make_triple(FGAbelianGroup(1, (2,)), (1, 0), [1, 1], [1, 0])
    with pytest.raises(LiftingError):
        iso_classify(build_lifting(jordan_triple, 1), build_lifting(t, 1, degree=3))


def test_iso_rank_two_bounded_search():
    group = FGAbelianGroup(2)
    base = make_triple(group, (1, 0), [1, 1], [1, 0])
    near = make_triple(group, (1, 0), [1, 1], [1, 2])
    far = make_triple(group, (1, 0), [1, 1], [1, 5])
    p = build_lifting(base, 1, degree=3)
    assert iso_classify(p, build_lifting(near, 1, degree=3)).verdict is IsoVerdict.ISOMORPHIC
    assert iso_classify(p, build_lifting(far, 1, degree=3)).verdict is IsoVerdict.INCONCLUSIVE
