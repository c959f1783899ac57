"""
Yetter-Drinfeld data over finitely generated abelian groups.

A group Z^r x Z/m_1 x ... x Z/m_k is stored by its free rank and torsion
orders; elements are integer exponent vectors over the generators, free
generators first, torsion residues kept in [0, m).
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import sympy

from .braided import BraidedVectorSpace, from_table
from .config import settings
from .errors import YDError
from .scalar import Matrix, Scalar, as_scalar

logger = logging.getLogger(__name__)

GroupElement = Tuple[int, ...]


@dataclass(frozen=True)
class FGAbelianGroup:
    free_rank: int
    torsion_orders: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion_orders", tuple(int(m) for m in self.torsion_orders))
        if self.free_rank < 0:
            raise YDError(f"free rank must be non-negative, got {self.free_rank}")
        for m in self.torsion_orders:
            if m < 2:
                raise YDError(f"torsion orders must be >= 2, got {m}")

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion_orders)

    def order_of_generator(self, i: int) -> Optional[int]:
        """Order of the i-th generator (0-based), None when free."""
        if i < self.free_rank:
            return None
        return self.torsion_orders[i - self.free_rank]

    def element(self, exponents: Sequence[int]) -> GroupElement:
        """Canonical form of an exponent vector."""
        values = tuple(int(e) for e in exponents)
        if len(values) != self.ngens:
            raise YDError(f"group element needs {self.ngens} exponents, got {len(values)}")
        return values[: self.free_rank] + tuple(
            e % m for e, m in zip(values[self.free_rank:], self.torsion_orders)
        )

    def identity(self) -> GroupElement:
        return (0,) * self.ngens

    def generator(self, i: int) -> GroupElement:
        exps = [0] * self.ngens
        exps[i] = 1
        return self.element(exps)

    def generators(self) -> List[GroupElement]:
        return [self.generator(i) for i in range(self.ngens)]

    def multiply(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return self.element([x + y for x, y in zip(a, b)])

    def inverse(self, a: GroupElement) -> GroupElement:
        return self.element([-x for x in a])

    def power(self, a: GroupElement, k: int) -> GroupElement:
        return self.element([k * x for x in a])

    def is_identity(self, a: GroupElement) -> bool:
        return not any(self.element(a))

    def order(self, a: GroupElement) -> Optional[int]:
        """Order of an element, None when infinite."""
        a = self.element(a)
        if any(a[: self.free_rank]):
            return None
        order = 1
        for e, m in zip(a[self.free_rank:], self.torsion_orders):
            order = int(sympy.ilcm(order, m // sympy.igcd(e, m)))
        return order

    def torsion_elements(self) -> Iterator[Tuple[int, ...]]:
        return itertools.product(*(range(m) for m in self.torsion_orders))

    def describe(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{m}" for m in self.torsion_orders]
        return " x ".join(parts) if parts else "1"


def infinite_cyclic() -> FGAbelianGroup:
    return FGAbelianGroup(1)


@dataclass(frozen=True)
class Character:
    """A character given by its (nonzero) values on the group generators."""

    group: FGAbelianGroup
    values: Tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.values) != self.group.ngens:
            raise YDError(f"character needs {self.group.ngens} values, got {len(self.values)}")
        for v in self.values:
            if v.is_zero():
                raise YDError("character values must be nonzero")

    @classmethod
    def trivial(cls, group: FGAbelianGroup, conductor: Optional[int] = None) -> "Character":
        return cls(group, tuple(Scalar.one(conductor) for _ in range(group.ngens)))

    @property
    def conductor(self) -> int:
        return self.values[0].conductor if self.values else settings.CONDUCTOR

    def __call__(self, h: Sequence[int]) -> Scalar:
        h = self.group.element(h)
        result = Scalar.one(self.conductor)
        for v, e in zip(self.values, h):
            if e:
                result = result * v ** e
        return result

    def square(self) -> "Character":
        return Character(self.group, tuple(v * v for v in self.values))

    def is_trivial(self) -> bool:
        return all(v.is_one() for v in self.values)


@dataclass(frozen=True)
class Derivation:
    """A (chi, chi)-derivation: eta(ht) = chi(h) eta(t) + eta(h) chi(t)."""

    chi: Character
    values: Tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.values) != self.chi.group.ngens:
            raise YDError(
                f"derivation needs {self.chi.group.ngens} values, got {len(self.values)}"
            )

    @property
    def group(self) -> FGAbelianGroup:
        return self.chi.group

    def __call__(self, h: Sequence[int]) -> Scalar:
        h = self.group.element(h)
        n = self.chi.conductor
        chi_acc, eta_acc = Scalar.one(n), Scalar.zero(n)
        for v, d, e in zip(self.chi.values, self.values, h):
            if not e:
                continue
            # eta(a^k) = k chi(a)^(k-1) eta(a) for a generator a and any integer k
            chi_a = v ** e
            eta_a = v ** (e - 1) * d * e
            chi_acc, eta_acc = chi_acc * chi_a, chi_acc * eta_a + eta_acc * chi_a
        return eta_acc


def evaluate(chi_or_eta: Union[Character, Derivation], h: Sequence[int]) -> Scalar:
    """Value of a character or a derivation at a group element."""
    return chi_or_eta(h)


@dataclass(frozen=True)
class YDTriple:
    group: FGAbelianGroup
    g: GroupElement
    chi: Character
    eta: Derivation

    def __post_init__(self):
        object.__setattr__(self, "g", self.group.element(self.g))
        if self.chi.group != self.group or self.eta.group != self.group:
            raise YDError("character and derivation must live on the triple's group")
        if self.eta.chi != self.chi:
            raise YDError("eta must be a (chi, chi)-derivation for the triple's chi")

    @property
    def conductor(self) -> int:
        return self.chi.conductor

    @property
    def eps(self) -> Scalar:
        """eps_g = chi(g); distinct from the counit character."""
        return self.chi(self.g)

    @property
    def is_jordanian(self) -> bool:
        return self.eps == 1

    @property
    def is_super_jordanian(self) -> bool:
        return self.eps == -1

    def g_power(self, k: int) -> GroupElement:
        return self.group.power(self.g, k)


def make_triple(
    group: FGAbelianGroup,
    g: Sequence[int],
    chi_values: Sequence,
    eta_values: Sequence,
    conductor: Optional[int] = None,
) -> YDTriple:
    chi = Character(group, tuple(as_scalar(v, conductor) for v in chi_values))
    eta = Derivation(chi, tuple(as_scalar(v, conductor) for v in eta_values))
    return YDTriple(group, tuple(g), chi, eta)


def standard_triple(eps, conductor: Optional[int] = None) -> YDTriple:
    """The triple over Z = <g> with chi(g) = eps and eta(g) = 1."""
    return make_triple(infinite_cyclic(), (1,), [eps], [1], conductor)


def counit_char(group: FGAbelianGroup, conductor: Optional[int] = None) -> Character:
    """The trivial character (the counit of kG restricted to G)."""
    return Character.trivial(group, conductor)


# ---------- validation ----------
@dataclass(frozen=True)
class YDValidation:
    violations: Tuple[str, ...]
    notes: Tuple[str, ...] = ()
    kind: Optional[str] = None

    @property
    def ok(self) -> bool:
        return not self.violations


def action_matrix(t: YDTriple, h: Sequence[int]) -> Matrix:
    """Matrix of h on V_g(chi, eta): h.x1 = chi(h) x1, h.x2 = chi(h) x2 + eta(h) x1."""
    c, e = t.chi(h), t.eta(h)
    return Matrix(2, 2, (c, e, Scalar.zero(t.conductor), c))


def act_on_tensor(t: YDTriple, h: Sequence[int], vector: Mapping[Tuple[int, ...], Scalar]) -> Dict[Tuple[int, ...], Scalar]:
    """The diagonal action of h on tensors in x1, x2."""
    c, e = t.chi(h), t.eta(h)
    images = {1: ((1, c),), 2: ((2, c), (1, e))}
    zero = Scalar.zero(t.conductor)
    out: Dict[Tuple[int, ...], Scalar] = {}
    for word, coeff in vector.items():
        partial = {(): coeff}
        for letter in word:
            if letter not in images:
                raise YDError(f"x{letter} is not a letter of V_g(chi, eta)")
            step: Dict[Tuple[int, ...], Scalar] = {}
            for prefix, v in partial.items():
                for k, f in images[letter]:
                    if f:
                        key = prefix + (k,)
                        step[key] = step.get(key, zero) + v * f
            partial = step
        for w, v in partial.items():
            updated = out.get(w, zero) + v
            if updated:
                out[w] = updated
            else:
                out.pop(w, None)
    return out


def g_squared_moves_x2(t: YDTriple) -> Tuple[Scalar, Scalar]:
    """Coordinates (on x1, x2) of g^2 . x2; equals (2 eps, 1) for a valid triple."""
    m = action_matrix(t, t.g_power(2))
    return m[0, 1], m[1, 1]


def validate_yd_triple(t: YDTriple) -> YDValidation:
    """Check every YD-triple constraint and return the violations as data."""
    violations: List[str] = []
    notes: List[str] = []
    group = t.group

    eta_g = t.eta(t.g)
    if eta_g != 1:
        violations.append(f"eta(g) must be 1, got {eta_g}")

    eps = t.eps
    kind = None
    if eps == 1:
        kind = "jordanian"
    elif eps == -1:
        kind = "super-jordanian"
    else:
        violations.append(f"chi(g) = {eps} is not in {{1, -1}}: not a (super) Jordanian triple")

    for i in range(group.free_rank, group.ngens):
        m = group.order_of_generator(i)
        if t.eta.values[i]:
            violations.append(
                f"derivation must vanish on torsion: eta(h{i + 1}) = {t.eta.values[i]} "
                f"but eta(h^{m}) = 0 forces it to 0"
            )
        if t.chi.values[i] ** m != 1:
            violations.append(
                f"character value chi(h{i + 1}) = {t.chi.values[i]} is not an {m}-th root of unity"
            )

    order = group.order(t.g)
    if order is not None:
        violations.append(f"g has finite order {order}; a block needs g of infinite order")
    else:
        x1_coeff, x2_coeff = g_squared_moves_x2(t)
        notes.append(f"g^2 . x2 = x2 + ({x1_coeff}) x1")

    notes.append("the group is abelian, so g is central and the action commutes with it")
    report = YDValidation(tuple(violations), tuple(notes), kind if not violations else None)
    if report.ok:
        logger.info(f"✅ valid {kind} triple over {group.describe()}")
    else:
        logger.info(f"❌ triple rejected: {'; '.join(violations)}")
    return report


def realize_braiding(t: YDTriple, *, permissive: bool = False) -> BraidedVectorSpace:
    """
    The braiding c(u (x) v) = (g . v) (x) u on V_g(chi, eta).

    With ``permissive`` an invalid triple is accepted; eta(g) = 0 then gives a
    diagonal braiding.
    """
    if not permissive:
        report = validate_yd_triple(t)
        if not report.ok:
            raise YDError(f"invalid YD-triple: {'; '.join(report.violations)}")
    a = action_matrix(t, t.g)
    table = {}
    for i in (1, 2):
        for j in (1, 2):
            table[(i, j)] = {(k, i): a[k - 1, j - 1] for k in (1, 2) if a[k - 1, j - 1]}
    label = f"V_g(chi, eta), eps={t.eps}"
    return from_table(2, table, label=label)


# ---------- 2-dimensional classification ----------
@dataclass(frozen=True)
class DiagonalType:
    g_action: Matrix


@dataclass(frozen=True)
class BlockType:
    triple: Optional[YDTriple]  # None when eps is not 1 or -1: no YD-triple realizes such a block
    basis: Matrix  # columns are the new x1, x2 in the old coordinates
    eps: Scalar


def _inverse2(m: Matrix) -> Matrix:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det.is_zero():
        raise YDError("action matrix is not invertible")
    inv = det.inverse()
    return Matrix(2, 2, (m[1, 1] * inv, -m[0, 1] * inv, -m[1, 0] * inv, m[0, 0] * inv))


def classify_dim2(
    g_action: Matrix,
    degree: Sequence[int],
    group: FGAbelianGroup,
    generator_actions: Optional[Sequence[Matrix]] = None,
) -> Union[DiagonalType, BlockType]:
    """
    Decide whether a 2-dimensional module of degree g is of diagonal type or a
    block, and in the block case return its unique YD-triple.

    Args:
        g_action: the 2x2 matrix of g.
        degree: the homogeneous degree g of the module.
        group: the ambient group.
        generator_actions: matrices of every group generator; may be omitted
            when the group is Z and g = h^(+-1) for its generator h.
    """
    if g_action.rows != 2 or g_action.cols != 2:
        raise YDError("classify_dim2 needs a 2x2 action")
    g = group.element(degree)
    inverse = _inverse2(g_action)
    n = g_action[0, 0].conductor
    zero, one = Scalar.zero(n), Scalar.one(n)

    trace = g_action[0, 0] + g_action[1, 1]
    det = g_action[0, 0] * g_action[1, 1] - g_action[0, 1] * g_action[1, 0]
    scalar_matrix = g_action[0, 1].is_zero() and g_action[1, 0].is_zero() and g_action[0, 0] == g_action[1, 1]
    if scalar_matrix or not (trace * trace - det * 4).is_zero():
        logger.info("classify_dim2: action is diagonalizable")
        return DiagonalType(g_action)

    eps = trace / 2
    nilpotent = Matrix(2, 2, (g_action[0, 0] - eps, g_action[0, 1], g_action[1, 0], g_action[1, 1] - eps))
    # x2 is any vector outside ker(A - eps); x1 = (A - eps) x2 so that eta(g) = 1
    x2 = (zero, one) if (nilpotent[0, 1] or nilpotent[1, 1]) else (one, zero)
    x1 = nilpotent.apply(x2)
    basis = Matrix(2, 2, (x1[0], x2[0], x1[1], x2[1]))
    basis_inv = _inverse2(basis)

    if eps != 1 and eps != -1:
        logger.info(f"classify_dim2: block with eps={eps}, not realized by a YD-triple")
        return BlockType(None, basis, eps)

    if generator_actions is None:
        if group != infinite_cyclic() or g not in ((1,), (-1,)):
            raise YDError("generator actions are required unless the group is Z generated by g^(+-1)")
        generator_actions = [g_action if g == (1,) else inverse]
    if len(generator_actions) != group.ngens:
        raise YDError(f"need {group.ngens} generator actions, got {len(generator_actions)}")

    chi_values, eta_values = [], []
    for i, action in enumerate(generator_actions):
        local = basis_inv.matmul(action).matmul(basis)
        if local[1, 0] or local[0, 0] != local[1, 1]:
            raise YDError(f"generator {i + 1} does not act by (chi, eta) in the block basis")
        chi_values.append(local[0, 0])
        eta_values.append(local[0, 1])
    chi = Character(group, tuple(chi_values))
    triple = YDTriple(group, g, chi, Derivation(chi, tuple(eta_values)))
    if triple.eta(g) != 1 or triple.eps != eps:
        raise YDError("generator actions are inconsistent with the action of g")
    logger.info(f"classify_dim2: block with eps={eps}")
    return BlockType(triple, basis, eps)


# ---------- automorphisms ----------
@dataclass(frozen=True)
class GroupAutomorphism:
    """
    An automorphism f of the group given by an integer matrix acting on
    exponent column vectors: column j is f of the j-th generator.
    """

    group: FGAbelianGroup
    matrix: Tuple[Tuple[int, ...], ...]
    _torsion_inverse: Optional[Dict[Tuple[int, ...], Tuple[int, ...]]] = field(
        default=None, compare=False, repr=False, hash=False
    )

    def __post_init__(self):
        group = self.group
        n, r = group.ngens, group.free_rank
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if len(m) != n or any(len(row) != n for row in m):
            raise YDError(f"automorphism matrix must be {n}x{n}")
        # normalize the torsion rows
        m = tuple(
            row if i < r else tuple(x % group.torsion_orders[i - r] for x in row)
            for i, row in enumerate(m)
        )
        object.__setattr__(self, "matrix", m)
        for j in range(r, n):
            order = group.torsion_orders[j - r]
            image = [m[i][j] for i in range(n)]
            if not group.is_identity([order * x for x in image]):
                raise YDError(f"generator {j + 1} of order {order} cannot map to {image}")
        if r:
            free = sympy.Matrix([list(row[:r]) for row in m[:r]])
            if abs(free.det()) != 1:
                raise YDError("free block of the automorphism is not in GL(Z)")
        images = {}
        for t in group.torsion_elements():
            image = tuple(
                sum(m[i][r + k] * t[k] for k in range(len(t))) % group.torsion_orders[i - r]
                for i in range(r, n)
            )
            images[image] = t
        if len(images) != len(list(group.torsion_elements())):
            raise YDError("automorphism is not injective on the torsion subgroup")
        object.__setattr__(self, "_torsion_inverse", images)

    @classmethod
    def identity(cls, group: FGAbelianGroup) -> "GroupAutomorphism":
        n = group.ngens
        return cls(group, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def __call__(self, h: Sequence[int]) -> GroupElement:
        h = self.group.element(h)
        n = self.group.ngens
        return self.group.element([sum(self.matrix[i][j] * h[j] for j in range(n)) for i in range(n)])

    def inverse_image(self, h: Sequence[int]) -> GroupElement:
        """f^-1(h)."""
        group = self.group
        h = group.element(h)
        r, n = group.free_rank, group.ngens
        if r:
            free = sympy.Matrix([list(row[:r]) for row in self.matrix[:r]])
            u = free.inv() * sympy.Matrix(list(h[:r]))
            u = [int(x) for x in u]
        else:
            u = []
        # remove the torsion image of the free part, then invert on torsion
        shifted = [
            (h[i] - sum(self.matrix[i][j] * u[j] for j in range(r))) % group.torsion_orders[i - r]
            for i in range(r, n)
        ]
        t = self._torsion_inverse[tuple(shifted)]
        return group.element(list(u) + list(t))

    def compose(self, other: "GroupAutomorphism") -> "GroupAutomorphism":
        """self o other."""
        n = self.group.ngens
        product = tuple(
            tuple(sum(self.matrix[i][k] * other.matrix[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )
        return GroupAutomorphism(self.group, product)


def transport_triple(t: YDTriple, f: Union[GroupAutomorphism, Sequence[Sequence[int]]]) -> YDTriple:
    """The transported triple (f(g), chi o f^-1, eta o f^-1)."""
    if not isinstance(f, GroupAutomorphism):
        f = GroupAutomorphism(t.group, tuple(tuple(row) for row in f))
    if f.group != t.group:
        raise YDError("automorphism and triple live on different groups")
    preimages = [f.inverse_image(h) for h in t.group.generators()]
    chi = Character(t.group, tuple(t.chi(h) for h in preimages))
    eta = Derivation(chi, tuple(t.eta(h) for h in preimages))
    return YDTriple(t.group, f(t.g), chi, eta)


@dataclass(frozen=True)
class AutomorphismEnumeration:
    automorphisms: Tuple[GroupAutomorphism, ...]
    exhaustive: bool


def enumerate_automorphisms(group: FGAbelianGroup, bound: Optional[int] = None) -> AutomorphismEnumeration:
    """
    Automorphisms whose free block has entries in [-bound, bound].

    The result is exhaustive when the free rank is at most 1 and the search
    limit was not hit; Aut(Z^r) is infinite for r >= 2.
    """
    bound = settings.AUT_ENTRY_BOUND if bound is None else bound
    limit = settings.AUT_SEARCH_LIMIT
    r, n = group.free_rank, group.ngens
    free_range = range(-bound, bound + 1) if r > 1 else (1, -1)
    torsion_ranges = [range(m) for m in group.torsion_orders]

    # entries of column j: free rows (only for free columns), then torsion rows
    column_choices = []
    for j in range(n):
        rows = []
        for i in range(n):
            if i < r:
                rows.append(free_range if j < r else (0,))
            else:
                rows.append(torsion_ranges[i - r])
        column_choices.append(rows)

    found: List[GroupAutomorphism] = []
    examined = 0
    truncated = False
    entries = [choice for column in column_choices for choice in column]
    for flat in itertools.product(*entries):
        examined += 1
        if examined > limit:
            truncated = True
            logger.warning(f"⚠️ automorphism search stopped after {limit} candidates")
            break
        matrix = tuple(tuple(flat[j * n + i] for j in range(n)) for i in range(n))
        try:
            found.append(GroupAutomorphism(group, matrix))
        except YDError:
            continue
    exhaustive = r <= 1 and not truncated
    logger.debug(f"enumerate_automorphisms: {len(found)} found among {examined} candidates")
    return AutomorphismEnumeration(tuple(found), exhaustive)


def triple_automorphisms(t: YDTriple, bound: Optional[int] = None) -> List[GroupAutomorphism]:
    """The stabilizer {f : D^f = D} within the bounded enumeration."""
    return [f for f in enumerate_automorphisms(t.group, bound).automorphisms if transport_triple(t, f) == t]
