import itertools
import random

import pytest

from jordanplane.braided import make_diagonal
from jordanplane.errors import DegreeCapError, ElementError
from jordanplane.freealg import (
    FreeElement,
    TensorSquareElement,
    braid_word_action,
    braided_coproduct,
    brute_force_symmetrizer,
    element_from_vector,
    permutation_of,
    primitivity_defect,
    reduced_word,
    symmetrizer_matrix,
    tensor_coassociativity_defect,
    x21,
)
from jordanplane.monitoring import registry
from jordanplane.scalar import Scalar


def _random_element(space, rng, max_degree=4):
    terms = {}
    for _ in range(5):
        n = rng.randint(1, max_degree)
        word = tuple(rng.randint(1, space.dim) for _ in range(n))
        terms[word] = Scalar.rational(rng.randint(-3, 3))
    return FreeElement(space, terms)


# ---------- elements ----------
def test_parse_print_roundtrip(jordan, parse):
    e = parse(jordan, "x2 x1 - x1 x2 + 1/2*x1 x1")
    assert e.coefficient((1, 1)) == Scalar.rational("1/2")
    assert e.coefficient((1, 2)) == -1
    assert parse(jordan, str(e)) == e


def test_parse_zeta_coefficient(jordan, parse):
    e = parse(jordan, "(z + 1)*x1 - x2")
    assert e.coefficient((1,)) == Scalar.zeta() + 1
    assert parse(jordan, str(e)) == e


def test_parse_rejects_unknown_letter(jordan, parse):
    with pytest.raises(ElementError):
        parse(jordan, "x1 y2")


def test_letters_outside_dimension_rejected(jordan):
    with pytest.raises(ElementError):
        FreeElement.word(jordan, (1, 3))


def test_concatenation_product(jordan):
    x1, x2 = FreeElement.generator(jordan, 1), FreeElement.generator(jordan, 2)
    assert x1 * x2 == FreeElement.word(jordan, (1, 2))
    assert (x1 + x2) * x1 == FreeElement(jordan, {(1, 1): Scalar.one(), (2, 1): Scalar.one()})
    assert (x1 * 3).coefficient((1,)) == 3


def test_degree_and_components(jordan, parse):
    e = parse(jordan, "1 + x1 + x2 x2")
    assert e.degree() == 2
    assert not e.is_homogeneous()
    assert e.component(1) == FreeElement.generator(jordan, 1)


def test_x21_uses_eps(jordan, super_jordan, parse):
    assert x21(jordan) == parse(jordan, "x2 x1 - x1 x2")
    assert x21(super_jordan) == parse(super_jordan, "x2 x1 + x1 x2")


def test_element_from_vector(jordan):
    e = element_from_vector(jordan, 2, [Scalar.zero(), Scalar.one(), Scalar.zero(), Scalar.one()])
    assert e == FreeElement(jordan, {(1, 2): Scalar.one(), (2, 2): Scalar.one()})


# ---------- braid group ----------
def test_reduced_word_represents_permutation():
    for p in itertools.permutations(range(1, 5)):
        w = reduced_word(p)
        assert permutation_of(w, 4) == p
        # reduced: length equals the number of inversions
        assert len(w) == sum(1 for i, j in itertools.combinations(range(4), 2) if p[i] > p[j])


def test_permutation_of_rejects_bad_letter():
    with pytest.raises(ElementError):
        permutation_of([3], 3)


def test_braid_word_action_depends_only_on_permutation(jordan):
    """Test that s1 s1 lifts to the identity and s1 to the braiding."""
    v = {(1, 2): Scalar.one()}
    assert braid_word_action(jordan, 2, [1, 1], v) == FreeElement(jordan, v)
    image = braid_word_action(jordan, 2, [1], v)
    assert image == FreeElement(jordan, {(2, 1): Scalar.one(), (1, 1): Scalar.one()})


def test_braid_word_action_checks_length(jordan):
    with pytest.raises(ElementError):
        braid_word_action(jordan, 3, [1], {(1, 2): 1})


# ---------- symmetrizer ----------
@pytest.mark.slow
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_factorized_symmetrizer_matches_brute_force(jordan, super_jordan, n):
    for space in (jordan, super_jordan):
        assert symmetrizer_matrix(space, n) == brute_force_symmetrizer(space, n)


@pytest.mark.slow
def test_factorized_symmetrizer_matches_brute_force_diagonal():
    rng = random.Random(5)
    q = [[Scalar.zeta(12, rng.randrange(12)) for _ in range(3)] for _ in range(3)]
    space = make_diagonal(q)
    for n in range(1, 6):
        assert symmetrizer_matrix(space, n) == brute_force_symmetrizer(space, n)


def test_symmetrizer_builds_are_timed(jordan):
    """Test both symmetrizer constructions observe the build histogram."""

    def observed():
        return registry.get_sample_value("jordanplane_symmetrizer_seconds_count") or 0

    before = observed()
    symmetrizer_matrix(jordan, 2)
    brute_force_symmetrizer(jordan, 2)
    assert observed() == before + 2


def test_degree_cap(jordan, small_caps):
    with pytest.raises(DegreeCapError, match="exceeds the cap"):
        symmetrizer_matrix(jordan, 6)


def test_negative_degree(jordan):
    with pytest.raises(DegreeCapError):
        symmetrizer_matrix(jordan, -1)


# ---------- coproduct ----------
def test_generators_are_primitive(jordan):
    assert not primitivity_defect(jordan, FreeElement.generator(jordan, 2))


def test_jordan_relation_is_primitive(jordan, parse):
    y = parse(jordan, "x2 x1 - x1 x2 + 1/2*x1 x1")
    assert not primitivity_defect(jordan, y)


def test_x1_squared_primitive_only_in_super_case(jordan, super_jordan, parse):
    assert not primitivity_defect(super_jordan, parse(super_jordan, "x1 x1"))
    assert primitivity_defect(jordan, parse(jordan, "x1 x1"))


def test_super_jordan_cubic_defect(super_jordan, parse):
    """Test Delta(r) - r (x) 1 - 1 (x) r = x1 (x) x1 x1 - 2 x1 x1 (x) x2."""
    c = x21(super_jordan)
    x1, x2 = FreeElement.generator(super_jordan, 1), FreeElement.generator(super_jordan, 2)
    r = x2 * c - c * x2 - x1 * c
    expected = TensorSquareElement(super_jordan, {
        ((1,), (1, 1)): Scalar.one(),
        ((1, 1), (2,)): Scalar.rational(-2),
    })
    assert primitivity_defect(super_jordan, r) == expected


def test_braided_tensor_product(jordan, super_jordan):
    for space, sign in ((jordan, 1), (super_jordan, -1)):
        x1 = FreeElement.generator(space, 1)
        one = FreeElement.one(space)
        product = TensorSquareElement.pure(one, x1) * TensorSquareElement.pure(x1, one)
        assert product == TensorSquareElement(space, {((1,), (1,)): Scalar.rational(sign)})


def test_coproduct_is_coassociative(jordan, super_jordan):
    rng = random.Random(3)
    for space in (jordan, super_jordan):
        for _ in range(5):
            assert not tensor_coassociativity_defect(space, _random_element(space, rng))


def test_coproduct_is_multiplicative(super_jordan):
    rng = random.Random(9)
    for _ in range(5):
        a, b = _random_element(super_jordan, rng, 2), _random_element(super_jordan, rng, 2)
        assert braided_coproduct(super_jordan, a * b) == (
            braided_coproduct(super_jordan, a) * braided_coproduct(super_jordan, b)
        )
