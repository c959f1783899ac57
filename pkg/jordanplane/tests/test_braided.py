import random

import pytest

from jordanplane.braided import (
    braid_check,
    braiding_matrix,
    from_table,
    ghost_value,
    make_block,
    make_block_point,
    make_custom,
    make_diagonal,
    restrict,
    tensor_basis,
    to_table,
)
from jordanplane.errors import BraidingError
from jordanplane.scalar import Scalar, as_scalar


def test_jordan_block_coefficients(jordan):
    """Test c(x_i (x) x_j) = (g . x_j) (x) x_i with g . x2 = x2 + x1."""
    assert jordan.coefficient(1, 2, 2, 1) == 1
    assert jordan.coefficient(1, 2, 1, 1) == 1
    assert jordan.coefficient(2, 1, 1, 2) == 1
    assert jordan.coefficient(2, 1, 2, 2) == 0


@pytest.mark.parametrize("eps, ell", [(1, 2), (-1, 2), ("z^4", 2), (1, 3)])
def test_blocks_satisfy_braid_equation(eps, ell):
    assert braid_check(make_block(eps, ell)).ok


@pytest.mark.parametrize("params", [
    (1, 1, 1, 1, 2),
    (-1, 1, 1, 1, -2),
    (-1, -1, -1, -1, -3),
    (1, "z", "z^-1", "z^4", 5),
])
def test_block_point_satisfies_braid_equation(params):
    space = make_block_point(*params)
    assert braid_check(space).ok
    assert space.block_point.ghost == ghost_value(as_scalar(params[0]), as_scalar(params[4]))


def test_random_diagonal_braidings():
    rng = random.Random(11)
    for _ in range(20):
        d = rng.randint(1, 3)
        q = [[Scalar.zeta(12, rng.randrange(12)) for _ in range(d)] for _ in range(d)]
        assert braid_check(make_diagonal(q)).ok


def test_broken_braiding_reports_counterexample(jordan):
    broken = jordan.with_coefficient(2, 2, 1, 2, 5)
    result = braid_check(broken)
    assert not result.ok
    assert result.counterexample is not None
    assert result.lhs != result.rhs


def test_braiding_matrix_is_invertible(super_jordan):
    m = braiding_matrix(super_jordan)
    assert (m.rows, m.cols) == (4, 4)


def test_singular_braiding_rejected():
    with pytest.raises(BraidingError, match="not invertible"):
        make_custom(1, [[[[0]]]])


def test_zero_diagonal_entry_rejected():
    with pytest.raises(BraidingError):
        make_diagonal([[1, 0], [1, 1]])


def test_custom_matches_table(jordan):
    coeff = [[[[jordan.coefficient(i, j, k, l) for l in (1, 2)] for k in (1, 2)] for j in (1, 2)] for i in (1, 2)]
    assert make_custom(2, coeff) == jordan
    assert from_table(2, to_table(jordan), label="copy") == jordan


def test_restrict_to_point():
    space = make_block_point(1, 1, 1, 1, 2)
    point = restrict(space, [3])
    assert point.dim == 1
    assert point.coefficient(1, 1, 1, 1) == 1


def test_restrict_rejects_unstable_span(jordan):
    with pytest.raises(BraidingError, match="not stable"):
        restrict(jordan, [2])


def test_ghost_value_needs_eps_sign():
    with pytest.raises(BraidingError):
        ghost_value(Scalar.zeta(12), as_scalar(1))


def test_tensor_basis_is_lexicographic():
    assert tensor_basis(2, 2) == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert tensor_basis(3, 0) == [()]
    assert len(tensor_basis(3, 4)) == 81
