"""
Braided vector spaces as finite braiding-coefficient tensors.

Basis indices are 1-based, matching x_1, ..., x_d. ``coefficient(i, j, k, l)``
is the coefficient of x_k (x) x_l in c(x_i (x) x_j).
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .config import settings
from .errors import BraidingError
from .scalar import Matrix, Scalar, as_scalar, rank

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]
Vector = Dict[Word, Scalar]
Images = Tuple[Tuple[Tuple[Tuple[int, int], Scalar], ...], ...]


def ghost_value(eps: Scalar, a: Scalar) -> Scalar:
    """The ghost of a block plus a point: -2a when eps = 1, a when eps = -1."""
    if eps == 1:
        return a * -2
    if eps == -1:
        return a
    raise BraidingError(f"the ghost needs eps in {{1, -1}}, got {eps}")


@dataclass(frozen=True)
class BlockPointParams:
    q12q21: Scalar
    eps: Scalar
    q22: Scalar
    a: Scalar
    ghost: Scalar
    q12: Optional[Scalar] = None
    q21: Optional[Scalar] = None

    def __post_init__(self):
        if self.ghost != ghost_value(self.eps, self.a):
            raise BraidingError(
                f"ghost {self.ghost} does not match eps={self.eps}, a={self.a}"
            )

    @classmethod
    def from_parameters(cls, eps: Scalar, q12: Scalar, q21: Scalar, q22: Scalar, a: Scalar) -> "BlockPointParams":
        return cls(
            q12q21=q12 * q21,
            eps=eps,
            q22=q22,
            a=a,
            ghost=ghost_value(eps, a),
            q12=q12,
            q21=q21,
        )


@dataclass(frozen=True)
class BraidedVectorSpace:
    """
    A dimension d and the braiding c on V (x) V.

    ``images[(i-1)*d + (j-1)]`` lists the nonzero ((k, l), coefficient) pairs
    of c(x_i (x) x_j).
    """

    dim: int
    images: Images
    label: str = field(default="custom", compare=False)
    block_point: Optional[BlockPointParams] = field(default=None, compare=False)
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise BraidingError(f"dimension must be positive, got {self.dim}")
        if len(self.images) != self.dim * self.dim:
            raise BraidingError("braiding needs one image per basis pair")
        for image in self.images:
            for (k, l), _ in image:
                if not (1 <= k <= self.dim and 1 <= l <= self.dim):
                    raise BraidingError(f"index ({k}, {l}) outside 1..{self.dim}")
        if self.validate:
            r = rank(braiding_matrix(self))
            if r != self.dim * self.dim:
                raise BraidingError(
                    f"braiding of {self.label} is not invertible: rank {r} < {self.dim ** 2}"
                )

    @property
    def conductor(self) -> int:
        for image in self.images:
            for _, v in image:
                return v.conductor
        return settings.CONDUCTOR

    def image(self, i: int, j: int) -> Tuple[Tuple[Tuple[int, int], Scalar], ...]:
        """Nonzero terms of c(x_i (x) x_j)."""
        return self.images[(i - 1) * self.dim + (j - 1)]

    def coefficient(self, i: int, j: int, k: int, l: int) -> Scalar:
        for pair, v in self.image(i, j):
            if pair == (k, l):
                return v
        return Scalar.zero(self.conductor)

    def with_coefficient(self, i: int, j: int, k: int, l: int, value) -> "BraidedVectorSpace":
        """A copy with one coefficient replaced (no validation of the result)."""
        value = as_scalar(value, self.conductor)
        table = to_table(self)
        table[(i, j)][(k, l)] = value
        return from_table(self.dim, table, label=f"{self.label}*", validate=False)

    def act_at(self, vector: Mapping[Word, Scalar], position: int) -> Vector:
        """Apply sigma_position = id^(p-1) (x) c (x) id^(n-p-1) to a tensor."""
        out: Vector = {}
        p = position - 1
        for word, coeff in vector.items():
            if not (0 <= p < len(word) - 1):
                raise BraidingError(f"sigma_{position} undefined on tensors of length {len(word)}")
            head, tail = word[:p], word[p + 2:]
            for (k, l), c in self.image(word[p], word[p + 1]):
                target = head + (k, l) + tail
                updated = out.get(target, Scalar.zero(self.conductor)) + coeff * c
                if updated:
                    out[target] = updated
                else:
                    out.pop(target, None)
        return out


def to_table(v: BraidedVectorSpace) -> Dict[Tuple[int, int], Dict[Tuple[int, int], Scalar]]:
    return {
        (i, j): dict(v.image(i, j))
        for i in range(1, v.dim + 1)
        for j in range(1, v.dim + 1)
    }


def from_table(
    dim: int,
    table: Mapping[Tuple[int, int], Mapping[Tuple[int, int], Scalar]],
    *,
    label: str,
    block_point: Optional[BlockPointParams] = None,
    validate: bool = True,
) -> BraidedVectorSpace:
    images = []
    for i in range(1, dim + 1):
        for j in range(1, dim + 1):
            terms = table.get((i, j), {})
            images.append(tuple(sorted((kl, c) for kl, c in terms.items() if c)))
    return BraidedVectorSpace(dim, tuple(images), label=label, block_point=block_point, validate=validate)


def make_block(eps, ell: int, conductor: Optional[int] = None) -> BraidedVectorSpace:
    """
    The block V(eps, ell) of (1.1): c(x_i (x) x_1) = eps x_1 (x) x_i and
    c(x_i (x) x_j) = (eps x_j + x_{j-1}) (x) x_i for j >= 2.
    """
    eps = as_scalar(eps, conductor)
    if eps.is_zero():
        raise BraidingError("eps must be nonzero")
    if ell < 2:
        raise BraidingError(f"a block needs ell >= 2, got {ell}")
    one = Scalar.one(eps.conductor)
    table = {}
    for i in range(1, ell + 1):
        for j in range(1, ell + 1):
            terms = {(j, i): eps}
            if j >= 2:
                terms[(j - 1, i)] = one
            table[(i, j)] = terms
    space = from_table(ell, table, label=f"block(eps={eps}, ell={ell})")
    logger.debug(f"make_block: built {space.label}")
    return space


def make_block_point(eps, q12, q21, q22, a, conductor: Optional[int] = None) -> BraidedVectorSpace:
    """The 3-dimensional braiding of a block plus a point."""
    eps, q12, q21, q22, a = (as_scalar(s, conductor) for s in (eps, q12, q21, q22, a))
    if eps != 1 and eps != -1:
        raise BraidingError(f"block plus point needs eps in {{1, -1}}, got {eps}")
    for name, q in (("q12", q12), ("q21", q21), ("q22", q22)):
        if q.is_zero():
            raise BraidingError(f"{name} must be nonzero")
    one = Scalar.one(eps.conductor)
    table = {
        (1, 1): {(1, 1): eps},
        (1, 2): {(2, 1): eps, (1, 1): one},
        (1, 3): {(3, 1): q12},
        (2, 1): {(1, 2): eps},
        (2, 2): {(2, 2): eps, (1, 2): one},
        (2, 3): {(3, 2): q12},
        (3, 1): {(1, 3): q21},
        (3, 2): {(2, 3): q21, (1, 3): q21 * a},
        (3, 3): {(3, 3): q22},
    }
    params = BlockPointParams.from_parameters(eps, q12, q21, q22, a)
    label = f"block-point(eps={eps}, q12={q12}, q21={q21}, q22={q22}, a={a})"
    return from_table(3, table, label=label, block_point=params)


def make_diagonal(q: Sequence[Sequence], conductor: Optional[int] = None) -> BraidedVectorSpace:
    """Diagonal braiding c(x_i (x) x_j) = q_ij x_j (x) x_i."""
    d = len(q)
    if any(len(row) != d for row in q):
        raise BraidingError("the braiding matrix of a diagonal type space must be square")
    table = {}
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            value = as_scalar(q[i - 1][j - 1], conductor)
            if value.is_zero():
                raise BraidingError(f"q_{i}{j} must be nonzero")
            table[(i, j)] = {(j, i): value}
    return from_table(d, table, label="diagonal")


def make_custom(dim: int, coeff: Sequence, conductor: Optional[int] = None) -> BraidedVectorSpace:
    """Braiding from a full dim x dim x dim x dim coefficient tensor (0-based lists)."""
    table = {}
    try:
        for i, j, k, l in itertools.product(range(dim), repeat=4):
            value = as_scalar(coeff[i][j][k][l], conductor)
            if value:
                table.setdefault((i + 1, j + 1), {})[(k + 1, l + 1)] = value
    except (IndexError, TypeError) as e:
        raise BraidingError(f"custom braiding tensor must be {dim}^4: {e}") from e
    return from_table(dim, table, label="custom")


def tensor_basis(dim: int, n: int) -> List[Word]:
    """Basis words of V^(x)n in lexicographic order."""
    return list(itertools.product(range(1, dim + 1), repeat=n))


def braiding_matrix(v: BraidedVectorSpace) -> Matrix:
    """The d^2 x d^2 matrix of c; columns are images of x_i (x) x_j."""
    basis = tensor_basis(v.dim, 2)
    index = {w: n for n, w in enumerate(basis)}
    columns = []
    for i, j in basis:
        columns.append({index[kl]: c for kl, c in v.image(i, j)})
    return Matrix.from_columns(columns, len(basis), v.conductor)


@dataclass(frozen=True)
class BraidCheckResult:
    ok: bool
    counterexample: Optional[Word] = None
    lhs: Optional[Vector] = None
    rhs: Optional[Vector] = None


def braid_check(v: BraidedVectorSpace) -> BraidCheckResult:
    """
    Exhaustive check of (c (x) id)(id (x) c)(c (x) id) = (id (x) c)(c (x) id)(id (x) c)
    on all d^3 basis triples.
    """
    for triple in tensor_basis(v.dim, 3):
        start = {triple: Scalar.one(v.conductor)}
        lhs = v.act_at(v.act_at(v.act_at(start, 1), 2), 1)
        rhs = v.act_at(v.act_at(v.act_at(start, 2), 1), 2)
        if lhs != rhs:
            logger.info(f"braid equation fails for {v.label} on x{triple}")
            return BraidCheckResult(False, triple, lhs, rhs)
    logger.info(f"braid equation holds for {v.label}")
    return BraidCheckResult(True)


def restrict(v: BraidedVectorSpace, indices: Iterable[int]) -> BraidedVectorSpace:
    """Restriction to the span of the given basis vectors, renumbered 1..k."""
    chosen = list(indices)
    renumber = {old: new for new, old in enumerate(chosen, start=1)}
    table = {}
    for i in chosen:
        for j in chosen:
            terms = {}
            for (k, l), c in v.image(i, j):
                if k not in renumber or l not in renumber:
                    raise BraidingError(
                        f"span of x{chosen} is not stable: c(x{i} (x) x{j}) leaves it"
                    )
                terms[(renumber[k], renumber[l])] = c
            table[(renumber[i], renumber[j])] = terms
    return from_table(len(chosen), table, label=f"{v.label}|{chosen}")
