import random
from fractions import Fraction

import pytest

from jordanplane.errors import ScalarError
from jordanplane.scalar import (
    Matrix,
    Scalar,
    as_scalar,
    format_scalar,
    is_root_of_unity,
    parse_scalar,
    rank,
    rank_and_kernel,
    solve,
)


def test_zeta_power_wraps_to_one():
    """Test zeta_N ** N == 1 and zeta_N ** k != 1 for 0 < k < N."""
    z = Scalar.zeta(12)
    assert z ** 12 == 1
    assert all(z ** k != 1 for k in range(1, 12))


def test_zeta_inverse():
    z = Scalar.zeta(12)
    assert z * z.inverse() == 1
    assert z ** -1 == z ** 11


def test_cube_root_relation():
    """Test 1 + w + w^2 == 0 for a primitive cube root of unity."""
    w = Scalar.zeta(12, 4)
    assert (1 + w + w * w).is_zero()


def test_parse_rational():
    assert parse_scalar("1/2") == Fraction(1, 2)
    assert parse_scalar("-3") == -3


def test_parse_zeta_expression():
    z = Scalar.zeta(12)
    assert parse_scalar("1 - z + 3*z^2") == 1 - z + z * z * 3


def test_parse_then_format_is_canonical():
    s = parse_scalar("(z + 1)^2 - z^2")
    assert format_scalar(s) == "1 + 2*z"
    assert parse_scalar(format_scalar(s)) == s


@pytest.mark.parametrize("text", ["1/0", "x + 1", "1.5", "", "z^(1/2)"])
def test_parse_rejects_malformed(text):
    with pytest.raises(ScalarError):
        parse_scalar(text)


def test_exponent_overflow():
    with pytest.raises(ScalarError, match="overflow"):
        parse_scalar("z^100000")


def test_nested_exponent_overflow():
    """Test stacked powers are bounded by the product of their exponents."""
    with pytest.raises(ScalarError, match="overflow"):
        parse_scalar("(2^9999)^9999")
    with pytest.raises(ScalarError, match="overflow"):
        parse_scalar("((z^101)^10)^10")
    with pytest.raises(ScalarError, match="overflow"):
        parse_scalar("2^(2^99999)")
    assert parse_scalar("(z^2)^3") == Scalar.zeta(12) ** 6
    assert parse_scalar("(2^100)^100") == Scalar.rational(Fraction(2) ** 10000, 12)


def test_division_by_zero():
    with pytest.raises(ScalarError):
        Scalar.zero().inverse()


def test_conductor_mismatch():
    with pytest.raises(ScalarError, match="conductor"):
        Scalar.one(12) + Scalar.one(8)
    with pytest.raises(ScalarError):
        as_scalar(Scalar.one(8), 12)


def test_field_axioms_randomized():
    """Test associativity and distributivity on random elements of Q(zeta_12)."""
    rng = random.Random(7)

    def sample():
        return Scalar([Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(4)], 12)

    for _ in range(20):
        a, b, c = sample(), sample(), sample()
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        if a:
            assert a * a.inverse() == 1


def test_root_of_unity_orders():
    assert is_root_of_unity(Scalar.one()) == 1
    assert is_root_of_unity(as_scalar(-1)) == 2
    assert is_root_of_unity(Scalar.zeta(12, 4)) == 3
    assert is_root_of_unity(Scalar.zeta(12)) == 12
    assert is_root_of_unity(as_scalar(2)) is None


def test_matrix_rank_and_kernel():
    m = Matrix.from_rows([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert rank(m) == 2
    r, kernel = rank_and_kernel(m)
    assert r == 2
    assert len(kernel) == 1
    assert all(v.is_zero() for v in m.apply(kernel[0]))


def test_matrix_matmul_identity():
    m = Matrix.from_rows([[1, "z"], [0, 2]])
    assert m.matmul(Matrix.identity(2)) == m
    assert m.transpose().transpose() == m


def test_solve_consistent_and_inconsistent():
    m = Matrix.from_rows([[1, 1], [1, -1]])
    x = solve(m, [as_scalar(3), as_scalar(1)])
    assert x == (as_scalar(2), as_scalar(1))
    singular = Matrix.from_rows([[1, 1], [1, 1]])
    assert solve(singular, [as_scalar(1), as_scalar(2)]) is None
