"""
Graded dimensions and minimal relations of Nichols algebras, the ghost of a
block plus a point, and the finite-GKdim table for that family.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

from .braided import BlockPointParams, BraidedVectorSpace, Word, ghost_value, tensor_basis
from .errors import BraidingError, ElementError
from .freealg import FreeElement, check_degree, symmetrizer_columns, symmetrizer_matrix
from .scalar import Scalar, as_scalar, is_root_of_unity, rank_and_kernel, row_reduce, sparse_rank
from .ydcat import YDTriple, act_on_tensor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GradedDims:
    dims: Tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        return self.dims[n]

    def __len__(self) -> int:
        return len(self.dims)

    def __str__(self) -> str:
        return " ".join(str(d) for d in self.dims)


def nichols_dims(space: BraidedVectorSpace, max_degree: int) -> GradedDims:
    """dim B(V)^n = rank of the n-th quantum symmetrizer, for n = 0..max_degree."""
    check_degree(space, max_degree)
    dims = [1]
    for n in range(1, max_degree + 1):
        columns = symmetrizer_columns(space, n)
        dims.append(sparse_rank(columns, space.dim ** n))
        logger.debug(f"nichols_dims: degree {n} -> {dims[-1]}")
    result = GradedDims(tuple(dims))
    logger.info(f"nichols_dims({space.label}, {max_degree}) = {result}")
    return result


def _kernel(space: BraidedVectorSpace, n: int) -> List[Dict[Word, Scalar]]:
    basis = tensor_basis(space.dim, n)
    _, vectors = rank_and_kernel(symmetrizer_matrix(space, n))
    return [{w: c for w, c in zip(basis, v) if c} for v in vectors]


def relation_generators(space: BraidedVectorSpace, n: int) -> List[FreeElement]:
    """
    New minimal relations of B(V) in degree n: a basis of ker S_n modulo
    V ker S_{n-1} + ker S_{n-1} V.

    Each generator is reduced against the ideal part and against the other
    generators, with leading word (the largest in deglex order) of
    coefficient 1.
    """
    if n < 2:
        raise ElementError(f"relations start in degree 2, got {n}")
    basis = tensor_basis(space.dim, n)
    # columns in descending deglex order so the pivot is the leading word
    position = {w: len(basis) - 1 - k for k, w in enumerate(basis)}
    descending = list(reversed(basis))

    ideal_rows = []
    for vector in _kernel(space, n - 1):
        for letter in range(1, space.dim + 1):
            ideal_rows.append({position[(letter,) + w]: c for w, c in vector.items()})
            ideal_rows.append({position[w + (letter,)]: c for w, c in vector.items()})
    ideal, ideal_pivots = row_reduce(ideal_rows, len(basis), full=True)

    residues = []
    for vector in _kernel(space, n):
        row = {position[w]: c for w, c in vector.items()}
        for pivot_row, col in zip(ideal, ideal_pivots):
            if col in row:
                factor = row[col]
                for k, v in pivot_row.items():
                    updated = row.get(k, Scalar.zero(space.conductor)) - factor * v
                    if updated:
                        row[k] = updated
                    else:
                        row.pop(k, None)
        residues.append(row)
    new_rows, _ = row_reduce(residues, len(basis), full=True)

    generators = [FreeElement(space, {descending[k]: c for k, c in row.items()}) for row in new_rows]
    logger.info(
        f"relation_generators({space.label}, {n}): ideal part {len(ideal_pivots)}, "
        f"{len(generators)} new"
    )
    return generators


# ---------- ghost and the finite GKdim table ----------
@dataclass(frozen=True)
class Ghost:
    value: Scalar
    discrete: bool

    def __str__(self) -> str:
        return f"{self.value}{' (discrete)' if self.discrete else ''}"


def is_discrete(ghost: Scalar) -> bool:
    """The ghost is discrete when it is a non-negative rational integer."""
    return ghost.is_integer() and ghost.as_fraction() >= 0


def ghost_of(eps, a, conductor: Optional[int] = None) -> Ghost:
    """-2a when eps = 1, a when eps = -1."""
    eps, a = as_scalar(eps, conductor), as_scalar(a, conductor)
    value = ghost_value(eps, a)
    return Ghost(value, is_discrete(value))


@dataclass(frozen=True)
class GkdimRow:
    q12q21: int
    eps: Tuple[int, ...]
    q22: str  # "1", "-1", "1-or-not-root", "root-not-1", "primitive-cube-root"
    ghost: str  # "0", "1", "discrete"
    gkdim: str  # "3", "2", "G + 3", "G + 2"


# Nichols algebras of a block and a point with finite GKdim. Rows are tried
# in order and the first match wins.
GKDIM_ROWS: Tuple[GkdimRow, ...] = (
    GkdimRow(1, (1, -1), "1-or-not-root", "0", "3"),
    GkdimRow(1, (1, -1), "root-not-1", "0", "2"),
    GkdimRow(1, (1,), "1", "discrete", "G + 3"),
    GkdimRow(1, (1,), "-1", "discrete", "2"),
    GkdimRow(1, (1,), "primitive-cube-root", "1", "2"),
    GkdimRow(1, (-1,), "1", "discrete", "G + 3"),
    GkdimRow(1, (-1,), "-1", "discrete", "G + 2"),
    GkdimRow(-1, (-1,), "-1", "1", "2"),
)


@dataclass(frozen=True)
class GkdimVerdict:
    outcome: str  # "finite", "infinite", "not-in-table"
    formula: Optional[str] = None
    value: Optional[int] = None
    row: Optional[int] = None

    def describe(self) -> str:
        if self.outcome == "finite":
            return f"finite gkdim = {self.value}"
        if self.outcome == "infinite":
            return "infinite gkdim"
        return "not in table"


def _q22_matches(condition: str, q22: Scalar) -> bool:
    if condition == "1":
        return q22 == 1
    if condition == "-1":
        return q22 == -1
    order = is_root_of_unity(q22)
    if condition == "1-or-not-root":
        return q22 == 1 or order is None
    if condition == "root-not-1":
        return order is not None and order != 1
    if condition == "primitive-cube-root":
        return order == 3
    raise ValueError(f"unknown q22 condition {condition!r}")


def _ghost_matches(condition: str, ghost: Scalar) -> bool:
    if condition == "discrete":
        return is_discrete(ghost)
    return ghost == int(condition)


def gkdim_lookup(q12q21, eps, q22, ghost, conductor: Optional[int] = None) -> GkdimVerdict:
    """
    GKdim of B(V) for a block plus a point, read from the finite-GKdim table.
    No matching row means infinite GKdim.
    """
    q12q21, eps, q22, ghost = (as_scalar(s, conductor) for s in (q12q21, eps, q22, ghost))
    for name, value in (("q12q21", q12q21), ("eps", eps), ("q22", q22)):
        if value.is_zero():
            raise BraidingError(f"{name} must be nonzero")
    if eps != 1 and eps != -1:
        logger.info(f"gkdim_lookup: eps={eps} is outside the table")
        return GkdimVerdict("not-in-table")
    for index, row in enumerate(GKDIM_ROWS):
        if q12q21 != row.q12q21 or not any(eps == e for e in row.eps):
            continue
        if not _q22_matches(row.q22, q22) or not _ghost_matches(row.ghost, ghost):
            continue
        g = int(ghost.as_fraction()) if ghost.is_integer() else 0
        value = eval_gkdim(row.gkdim, g)
        logger.info(f"gkdim_lookup: row {index + 1} matches, gkdim {row.gkdim} = {value}")
        return GkdimVerdict("finite", row.gkdim, value, index + 1)
    return GkdimVerdict("infinite")


def eval_gkdim(formula: str, ghost: int) -> int:
    if formula.startswith("G"):
        return ghost + int(formula.split("+")[1])
    return int(formula)


# ---------- adjoined primitives ----------
def adjoin_primitive_params(t: YDTriple, z: FreeElement, m: int, system=None) -> BlockPointParams:
    """
    Parameters of the block plus a point spanned by x1, x2 and a primitive z
    of x-degree m.

    Args:
        t: the YD-triple of the block.
        z: the adjoined element, a weight vector for g.
        m: its x-degree.
        system: optional RewriteSystem; weights are compared in the quotient.

    Raises:
        ElementError: z is not a weight vector; the message names the tail term.
    """
    from .rewrite import normal_form

    if not z:
        raise ElementError("cannot adjoin the zero element")
    if not z.is_homogeneous() or z.degree() != m:
        raise ElementError(f"{z} is not homogeneous of x-degree {m}")

    def reduce(e: FreeElement) -> FreeElement:
        return normal_form(system, e) if system is not None else e

    z = reduce(z)
    if not z:
        raise ElementError("the adjoined element vanishes in the quotient")
    moved = reduce(FreeElement(z.space, act_on_tensor(t, t.g, z.terms)))
    leading, coeff = max(z.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))
    q12 = moved.coefficient(leading) / coeff
    tail = moved - z.scale(q12)
    if tail:
        word, c = tail.items()[0]
        raise ElementError(f"{z} is not a weight vector for g: g.z - ({q12}) z has term {c}*x{word}")

    eps = t.eps
    q21 = eps ** m
    q22 = eps ** (m * m)
    a = eps.inverse() * t.eta(t.g) * m
    params = BlockPointParams.from_parameters(eps, q12, q21, q22, a)
    logger.info(f"adjoin_primitive_params: q12={q12}, q21={q21}, q22={q22}, a={a}, ghost={params.ghost}")
    return params


# ---------- exploratory tables ----------
@dataclass(frozen=True)
class ExploratoryTable:
    rows: Tuple[Tuple[str, GradedDims], ...]

    def render(self) -> str:
        return "\n".join(f"{label} = {dims}" for label, dims in self.rows)


def dimension_table(spaces: Mapping[str, BraidedVectorSpace], max_degree: int) -> ExploratoryTable:
    """Graded dimensions for several spaces; growth is observed, never certified."""
    rows = tuple((label, nichols_dims(space, max_degree)) for label, space in spaces.items())
    return ExploratoryTable(rows)
