"""
The tensor algebra T(V) of a braided vector space: elements, the braid group
action on V^(x)n, the quantum symmetrizer and the braided coproduct.
"""

import itertools
import logging
import re
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import psutil

from .braided import BraidedVectorSpace, Vector, Word, tensor_basis
from .config import settings
from .errors import DegreeCapError, ElementError
from .monitoring import SYMMETRIZER_BUILDS, SYMMETRIZER_SECONDS
from .scalar import Matrix, Scalar, as_scalar, parse_scalar

logger = logging.getLogger(__name__)

# rough per-entry cost of a dense exact matrix, used by the memory guard
_BYTES_PER_ENTRY = 200


def add_into(target: Dict, key, value: Scalar) -> None:
    updated = target[key] + value if key in target else value
    if updated:
        target[key] = updated
    else:
        target.pop(key, None)


def _term_key(word: Word) -> Tuple[int, Word]:
    return len(word), word


def format_term(coeff: Scalar, body: str, first: bool) -> str:
    if coeff.is_rational:
        c = coeff.as_fraction()
        magnitude = abs(c)
        negative = c < 0
        if magnitude == 1 and body:
            text = body
        else:
            number = str(magnitude.numerator) if magnitude.denominator == 1 else f"{magnitude.numerator}/{magnitude.denominator}"
            text = f"{number}*{body}" if body else number
    else:
        negative = False
        text = f"({coeff})*{body}" if body else f"({coeff})"
    if first:
        return f"-{text}" if negative else text
    return f"- {text}" if negative else f"+ {text}"


def format_word(word: Word) -> str:
    return " ".join(f"x{i}" for i in word)


def split_terms(text: str) -> List[Tuple[int, str]]:
    """Split a sum at top-level signs; returns (sign, term text) pairs."""
    terms: List[Tuple[int, str]] = []
    depth, sign = 0, 1
    current: List[str] = []
    previous = ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and previous not in ("^", "*", "/", "("):
            body = "".join(current).strip()
            if body:
                terms.append((sign, body))
                sign = 1
            elif previous not in ("", "+", "-"):
                raise ElementError(f"malformed element {text!r}")
            if ch == "-":
                sign = -sign
            current = []
        else:
            current.append(ch)
        if not ch.isspace():
            previous = ch
    body = "".join(current).strip()
    if not body or depth != 0:
        raise ElementError(f"malformed element {text!r}")
    terms.append((sign, body))
    return terms


_LETTER = re.compile(r"x(\d+)")


def split_coefficient(term: str, letters: re.Pattern) -> Tuple[str, str]:
    """Separate a leading scalar factor from the letters of a term."""
    depth = 0
    for pos, ch in enumerate(term):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and letters.match(term, pos):
            coefficient = term[:pos].strip()
            if coefficient.endswith("*"):
                coefficient = coefficient[:-1].strip()
            return coefficient, term[pos:]
    return term.strip(), ""


class FreeElement:
    """An element of T(V): words in 1..dim mapped to nonzero scalars."""

    __hash__ = None

    def __init__(self, space: BraidedVectorSpace, terms: Optional[Mapping[Word, Scalar]] = None):
        self.space = space
        self.terms: Dict[Word, Scalar] = {}
        for word, coeff in (terms or {}).items():
            word = tuple(word)
            if any(not (1 <= i <= space.dim) for i in word):
                raise ElementError(f"word {word} uses a letter outside x1..x{space.dim}")
            coeff = as_scalar(coeff, space.conductor)
            if coeff:
                add_into(self.terms, word, coeff)

    # ---------- constructors ----------
    @classmethod
    def zero(cls, space: BraidedVectorSpace) -> "FreeElement":
        return cls(space)

    @classmethod
    def one(cls, space: BraidedVectorSpace) -> "FreeElement":
        return cls(space, {(): Scalar.one(space.conductor)})

    @classmethod
    def word(cls, space: BraidedVectorSpace, word: Sequence[int], coeff=1) -> "FreeElement":
        return cls(space, {tuple(word): coeff})

    @classmethod
    def generator(cls, space: BraidedVectorSpace, i: int) -> "FreeElement":
        return cls.word(space, (i,))

    @classmethod
    def parse(cls, text: str, space: BraidedVectorSpace) -> "FreeElement":
        """
        Parse ``1/2*x1 x1 - x2 x1``: a signed sum of terms, each an optional
        scalar factor followed by juxtaposed letters.
        """
        result: Dict[Word, Scalar] = {}
        for sign, term in split_terms(text):
            coefficient, letters = split_coefficient(term, _LETTER)
            coeff = parse_scalar(coefficient, space.conductor) if coefficient else Scalar.one(space.conductor)
            word = []
            for token in letters.replace("*", " ").split():
                match = _LETTER.fullmatch(token)
                if not match:
                    raise ElementError(f"unexpected token {token!r} in {text!r}")
                word.append(int(match.group(1)))
            add_into(result, tuple(word), coeff * sign)
        return cls(space, result)

    # ---------- queries ----------
    @property
    def conductor(self) -> int:
        return self.space.conductor

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def items(self) -> List[Tuple[Word, Scalar]]:
        """Terms in canonical order: degree, then lexicographic."""
        return sorted(self.terms.items(), key=lambda kv: _term_key(kv[0]))

    def degree(self) -> int:
        if not self.terms:
            raise ElementError("the zero element has no degree")
        return max(len(w) for w in self.terms)

    def is_homogeneous(self) -> bool:
        return len({len(w) for w in self.terms}) <= 1

    def component(self, n: int) -> "FreeElement":
        return FreeElement(self.space, {w: c for w, c in self.terms.items() if len(w) == n})

    def coefficient(self, word: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(word), Scalar.zero(self.conductor))

    # ---------- arithmetic ----------
    def _check(self, other: "FreeElement") -> None:
        if other.space != self.space:
            raise ElementError("elements live over different braided vector spaces")

    def __add__(self, other: "FreeElement") -> "FreeElement":
        self._check(other)
        terms = dict(self.terms)
        for w, c in other.terms.items():
            add_into(terms, w, c)
        return FreeElement(self.space, terms)

    def __neg__(self) -> "FreeElement":
        return FreeElement(self.space, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "FreeElement") -> "FreeElement":
        return self + (-other)

    def scale(self, factor) -> "FreeElement":
        factor = as_scalar(factor, self.conductor)
        return FreeElement(self.space, {w: c * factor for w, c in self.terms.items()})

    def __mul__(self, other) -> "FreeElement":
        if not isinstance(other, FreeElement):
            return self.scale(other)
        self._check(other)
        terms: Dict[Word, Scalar] = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                add_into(terms, u + v, a * b)
        return FreeElement(self.space, terms)

    def __rmul__(self, factor) -> "FreeElement":
        return self.scale(factor)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeElement):
            return NotImplemented
        return self.space == other.space and self.terms == other.terms

    def __repr__(self) -> str:
        return f"FreeElement({str(self)!r})"

    def __str__(self) -> str:
        parts = [
            format_term(c, format_word(w), first=(k == 0))
            for k, (w, c) in enumerate(self.items())
        ]
        return " ".join(parts) if parts else "0"


class TensorSquareElement:
    """An element of T(V) (x) T(V): pairs of words mapped to nonzero scalars."""

    __hash__ = None

    def __init__(self, space: BraidedVectorSpace, terms: Optional[Mapping[Tuple[Word, Word], Scalar]] = None):
        self.space = space
        self.terms: Dict[Tuple[Word, Word], Scalar] = {}
        for (a, b), c in (terms or {}).items():
            if c:
                add_into(self.terms, (tuple(a), tuple(b)), c)

    @classmethod
    def pure(cls, left: FreeElement, right: FreeElement) -> "TensorSquareElement":
        terms: Dict[Tuple[Word, Word], Scalar] = {}
        for a, x in left.terms.items():
            for b, y in right.terms.items():
                add_into(terms, (a, b), x * y)
        return cls(left.space, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def items(self) -> List[Tuple[Tuple[Word, Word], Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0][0]) + len(kv[0][1]), kv[0]))

    def component(self, p: int, q: int) -> "TensorSquareElement":
        """Bidegree (p, q) part."""
        return TensorSquareElement(
            self.space,
            {k: c for k, c in self.terms.items() if len(k[0]) == p and len(k[1]) == q},
        )

    def __add__(self, other: "TensorSquareElement") -> "TensorSquareElement":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            add_into(terms, k, c)
        return TensorSquareElement(self.space, terms)

    def __neg__(self) -> "TensorSquareElement":
        return TensorSquareElement(self.space, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "TensorSquareElement") -> "TensorSquareElement":
        return self + (-other)

    def scale(self, factor) -> "TensorSquareElement":
        factor = as_scalar(factor, self.space.conductor)
        return TensorSquareElement(self.space, {k: c * factor for k, c in self.terms.items()})

    def __mul__(self, other: "TensorSquareElement") -> "TensorSquareElement":
        """Product in the braided tensor square: (a (x) b)(a' (x) b') = a c(b (x) a') b'."""
        terms: Dict[Tuple[Word, Word], Scalar] = {}
        for (a, b), x in self.terms.items():
            for (a2, b2), y in other.terms.items():
                for moved, c in block_move(self.space, b, a2).items():
                    q = len(a2)
                    add_into(terms, (a + moved[:q], moved[q:] + b2), x * y * c)
        return TensorSquareElement(self.space, terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorSquareElement):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        return f"TensorSquareElement({str(self)!r})"

    def __str__(self) -> str:
        parts = []
        for k, ((a, b), c) in enumerate(self.items()):
            body = f"{format_word(a) or '1'} (x) {format_word(b) or '1'}"
            parts.append(format_term(c, body, first=(k == 0)))
        return " ".join(parts) if parts else "0"


# ---------- braid group action ----------
def block_move(space: BraidedVectorSpace, b: Word, a: Word) -> Vector:
    """
    c_{p,q}(b (x) a) for words b of length p and a of length q: the braiding
    that carries the block a to the front.
    """
    vector: Vector = {b + a: Scalar.one(space.conductor)}
    p, q = len(b), len(a)
    if not p or not q:
        return vector
    for k in range(p, 0, -1):
        for position in range(k, k + q):
            vector = space.act_at(vector, position)
    return vector


def permutation_of(word: Sequence[int], n: int) -> Tuple[int, ...]:
    """One-line notation of s_{i1} o ... o s_{ik}."""
    arrangement = list(range(1, n + 1))
    for i in word:
        if not (1 <= i < n):
            raise ElementError(f"s_{i} is not an adjacent transposition of {n} letters")
        arrangement[i - 1], arrangement[i] = arrangement[i], arrangement[i - 1]
    return tuple(arrangement)


def reduced_word(permutation: Sequence[int]) -> List[int]:
    """A reduced word for a permutation by peeling off right descents."""
    arrangement = list(permutation)
    word: List[int] = []
    while True:
        descent = next((i for i in range(1, len(arrangement)) if arrangement[i - 1] > arrangement[i]), None)
        if descent is None:
            break
        arrangement[descent - 1], arrangement[descent] = arrangement[descent], arrangement[descent - 1]
        word.append(descent)
    word.reverse()
    return word


def apply_braid_word(space: BraidedVectorSpace, word: Sequence[int], vector: Mapping[Word, Scalar]) -> Vector:
    """sigma_{i1} o ... o sigma_{ik} applied to a tensor (rightmost first)."""
    result = dict(vector)
    for i in reversed(word):
        result = space.act_at(result, i)
    return result


def braid_word_action(space: BraidedVectorSpace, n: int, w: Sequence[int], v) -> FreeElement:
    """
    Matsumoto lift of the permutation of ``w`` applied to v in V^(x)n.

    ``w`` is any word in the adjacent transpositions 1..n-1; it is first reduced
    to the permutation it represents, then lifted along a fixed reduced word.
    """
    if isinstance(v, FreeElement):
        vector = v.terms
    else:
        vector = {tuple(k): as_scalar(c, space.conductor) for k, c in v.items()}
    for word in vector:
        if len(word) != n:
            raise ElementError(f"tensor of length {len(word)} is not in V^(x){n}")
        if any(not (1 <= i <= space.dim) for i in word):
            raise ElementError(f"word {word} uses a letter outside x1..x{space.dim}")
    lifted = reduced_word(permutation_of(w, n))
    return FreeElement(space, apply_braid_word(space, lifted, vector))


# ---------- symmetrizer ----------
def degree_cap(space: BraidedVectorSpace) -> int:
    if space.dim == 1:
        return settings.MAX_SYMMETRIZER_SIZE
    if space.dim == 2:
        return settings.MAX_DEGREE_DIM2
    if space.dim == 3:
        return settings.MAX_DEGREE_DIM3
    n = 0
    while space.dim ** (n + 1) <= settings.MAX_SYMMETRIZER_SIZE:
        n += 1
    return n


def check_degree(space: BraidedVectorSpace, n: int) -> None:
    """Raise DegreeCapError when V^(x)n is beyond the configured or memory cap."""
    if n < 0:
        raise DegreeCapError(f"degree must be non-negative, got {n}")
    cap = degree_cap(space)
    if n > cap:
        raise DegreeCapError(f"degree {n} exceeds the cap {cap} for dim {space.dim}")
    size = space.dim ** n
    needed = size * size * _BYTES_PER_ENTRY
    available = psutil.virtual_memory().available * settings.MEMORY_HEADROOM
    if needed > available:
        raise DegreeCapError(
            f"symmetrizer of size {size} needs ~{needed // 2**20} MiB, only {int(available) // 2**20} MiB allowed"
        )


def _horner_coset_sum(space: BraidedVectorSpace, word: Word) -> Vector:
    """T_n(w) = w + sigma_{n-1}(w + sigma_{n-2}(... (w + sigma_1 w)))."""
    one = Scalar.one(space.conductor)
    n = len(word)
    acc: Vector = {word: one}
    for position in range(1, n):
        acc = space.act_at(acc, position)
        add_into(acc, word, one)
    return acc


@lru_cache(maxsize=32)
def _symmetrizer_columns(space: BraidedVectorSpace, n: int) -> Dict[Word, Vector]:
    """Image of every basis word of V^(x)n under the symmetrizer."""
    one = Scalar.one(space.conductor)
    if n <= 1:
        return {w: {w: one} for w in tensor_basis(space.dim, n)}
    lower = _symmetrizer_columns(space, n - 1)
    columns: Dict[Word, Vector] = {}
    for word in tensor_basis(space.dim, n):
        image: Vector = {}
        for term, coeff in _horner_coset_sum(space, word).items():
            head, last = term[:-1], term[-1:]
            for u, c in lower[head].items():
                add_into(image, u + last, coeff * c)
        columns[word] = image
    return columns


def symmetrizer_columns(space: BraidedVectorSpace, n: int) -> List[Dict[int, Scalar]]:
    """Sparse columns (row index -> entry) of the symmetrizer, lexicographic basis."""
    check_degree(space, n)
    with SYMMETRIZER_SECONDS.time():
        columns = _symmetrizer_columns(space, n)
    SYMMETRIZER_BUILDS.labels(method="factorized").inc()
    basis = tensor_basis(space.dim, n)
    index = {w: k for k, w in enumerate(basis)}
    return [{index[u]: c for u, c in columns[w].items()} for w in basis]


def symmetrizer_matrix(space: BraidedVectorSpace, n: int) -> Matrix:
    """
    The d^n x d^n matrix of the quantum symmetrizer, built from the coset
    factorization S_n = (S_{n-1} (x) id) T_n.

    Raises:
        DegreeCapError: n beyond the configured cap or available memory.
    """
    columns = symmetrizer_columns(space, n)
    logger.info(f"symmetrizer_matrix: degree {n} for {space.label}")
    return Matrix.from_columns(columns, space.dim ** n, space.conductor)


def brute_force_symmetrizer(space: BraidedVectorSpace, n: int) -> Matrix:
    """The n!-term sum of Matsumoto lifts; the oracle for the factorization."""
    check_degree(space, n)
    if n > 7:
        raise DegreeCapError(f"brute-force symmetrizer limited to n <= 7, got {n}")
    basis = tensor_basis(space.dim, n)
    index = {w: k for k, w in enumerate(basis)}
    words = [reduced_word(p) for p in itertools.permutations(range(1, n + 1))]
    columns = []
    with SYMMETRIZER_SECONDS.time():
        for w in basis:
            image: Vector = {}
            for word in words:
                for u, c in braid_word_action(space, n, word, {w: Scalar.one(space.conductor)}).terms.items():
                    add_into(image, u, c)
            columns.append({index[u]: c for u, c in image.items()})
    SYMMETRIZER_BUILDS.labels(method="brute-force").inc()
    return Matrix.from_columns(columns, len(basis), space.conductor)


# ---------- coproduct ----------
def _letter_coproduct(space: BraidedVectorSpace, i: int) -> TensorSquareElement:
    one = Scalar.one(space.conductor)
    return TensorSquareElement(space, {((i,), ()): one, ((), (i,)): one})


def word_coproduct(space: BraidedVectorSpace, word: Word) -> TensorSquareElement:
    result = TensorSquareElement(space, {((), ()): Scalar.one(space.conductor)})
    for i in word:
        result = result * _letter_coproduct(space, i)
    return result


def braided_coproduct(space: BraidedVectorSpace, e: FreeElement) -> TensorSquareElement:
    """
    The algebra map T(V) -> T(V) (x) T(V) with primitive generators, into the
    braided tensor square.
    """
    result = TensorSquareElement(space)
    cache: Dict[Word, TensorSquareElement] = {}
    for word, coeff in e.terms.items():
        if word not in cache:
            cache[word] = word_coproduct(space, word)
        result = result + cache[word].scale(coeff)
    return result


def primitivity_defect(space: BraidedVectorSpace, e: FreeElement) -> TensorSquareElement:
    """Delta(e) - e (x) 1 - 1 (x) e; zero iff e is primitive."""
    if not e.is_homogeneous():
        raise ElementError(f"primitivity needs a homogeneous element, got {e}")
    if e and e.degree() < 1:
        raise ElementError("primitivity needs degree >= 1")
    one = FreeElement.one(space)
    defect = braided_coproduct(space, e) - TensorSquareElement.pure(e, one) - TensorSquareElement.pure(one, e)
    logger.debug(f"primitivity_defect of {e}: {len(defect.terms)} terms")
    return defect


def tensor_coassociativity_defect(space: BraidedVectorSpace, e: FreeElement) -> Dict[Tuple[Word, Word, Word], Scalar]:
    """(Delta (x) id)Delta(e) - (id (x) Delta)Delta(e) as a sparse map on word triples."""
    defect: Dict[Tuple[Word, Word, Word], Scalar] = {}
    for (a, b), c in braided_coproduct(space, e).terms.items():
        for (a1, a2), x in word_coproduct(space, a).terms.items():
            add_into(defect, (a1, a2, b), c * x)
        for (b1, b2), y in word_coproduct(space, b).terms.items():
            add_into(defect, (a, b1, b2), -(c * y))
    return defect


def x21(space: BraidedVectorSpace) -> FreeElement:
    """The braided commutator x2 x1 - eps x1 x2 with eps from c(x1 (x) x1)."""
    if space.dim < 2:
        raise ElementError("x21 needs dim >= 2")
    eps = space.coefficient(1, 1, 1, 1)
    return FreeElement(space, {(2, 1): Scalar.one(space.conductor), (1, 2): -eps})


def element_from_vector(space: BraidedVectorSpace, n: int, vector: Iterable[Scalar]) -> FreeElement:
    """The degree-n element with the given coordinates in the lexicographic basis."""
    return FreeElement(space, {w: c for w, c in zip(tensor_basis(space.dim, n), vector) if c})
