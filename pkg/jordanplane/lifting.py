"""
Liftings U(D, lambda) of the Jordan and super Jordan planes over kG.

Elements of T(V)#kG are kept with every group letter pushed to the right,
using h x = (h . x) h. The coproduct is the bosonized one:
Delta(x_i) = x_i (x) 1 + g (x) x_i and Delta(h) = h (x) h.
"""

import enum
import logging
import re
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .braided import Word
from .config import settings
from .errors import ElementError, LiftingError
from .freealg import FreeElement, TensorSquareElement, add_into, format_term, format_word, split_coefficient, split_terms, x21
from .nichols import GradedDims, nichols_dims
from .rewrite import MonomialOrder, RewriteSystem, complete_to_degree, hilbert_function, normal_form
from .scalar import Scalar, as_scalar
from .ydcat import (
    GroupAutomorphism,
    GroupElement,
    YDTriple,
    act_on_tensor,
    counit_char,
    enumerate_automorphisms,
    realize_braiding,
    transport_triple,
    validate_yd_triple,
)

logger = logging.getLogger(__name__)

Key = Tuple[Word, GroupElement]

_LETTERS = re.compile(r"x\d+|g|h\d+")
_TOKEN = re.compile(r"(x)(\d+)|(g)(?:\^(-?\d+))?|h(\d+)(?:\^(-?\d+))?")


@dataclass(frozen=True)
class TripleAction:
    """Group letters of kG acting on x1, x2 through a YD-triple."""

    triple: YDTriple

    @property
    def identity(self) -> GroupElement:
        return self.triple.group.identity()

    @property
    def conductor(self) -> int:
        return self.triple.conductor

    def generators(self) -> Sequence[GroupElement]:
        return self.triple.group.generators()

    def multiply(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return self.triple.group.multiply(a, b)

    def inverse(self, a: GroupElement) -> GroupElement:
        return self.triple.group.inverse(a)

    def act(self, h: GroupElement, word: Word) -> Dict[Word, Scalar]:
        if not word or self.triple.group.is_identity(h):
            return {word: Scalar.one(self.conductor)}
        return act_on_tensor(self.triple, h, {word: Scalar.one(self.conductor)})

    def format_tag(self, tag: GroupElement) -> str:
        return format_group_element(self.triple, tag)


def _generator_names(t: YDTriple) -> List[str]:
    names = [f"h{i + 1}" for i in range(t.group.ngens)]
    for i, h in enumerate(t.group.generators()):
        if h == t.g:
            names[i] = "g"
    return names


def format_group_element(t: YDTriple, h: GroupElement) -> str:
    """``g^2``, ``h2^-1 g`` and so on; empty for the identity."""
    parts = []
    for name, e in zip(_generator_names(t), h):
        if e:
            parts.append(name if e == 1 else f"{name}^{e}")
    return " ".join(parts)


def _format_key(t: YDTriple, key: Key) -> str:
    word, tag = key
    return " ".join(p for p in (format_word(word), format_group_element(t, tag)) if p)


def _order_key(key: Key):
    word, tag = key
    return len(word), word, tag


class SmashElement:
    """An element of T(V)#kG as a map (word, group element) -> scalar."""

    __hash__ = None
    dim = 2

    def __init__(self, triple: YDTriple, terms: Optional[Mapping[Key, Scalar]] = None):
        self.triple = triple
        self.terms: Dict[Key, Scalar] = {}
        for (word, tag), c in (terms or {}).items():
            word = tuple(word)
            if any(i not in (1, 2) for i in word):
                raise ElementError(f"word {word} uses a letter outside x1, x2")
            c = as_scalar(c, triple.conductor)
            if c:
                add_into(self.terms, (word, triple.group.element(tag)), c)

    # ---------- constructors ----------
    @classmethod
    def zero(cls, t: YDTriple) -> "SmashElement":
        return cls(t)

    @classmethod
    def one(cls, t: YDTriple) -> "SmashElement":
        return cls(t, {((), t.group.identity()): 1})

    @classmethod
    def x(cls, t: YDTriple, i: int) -> "SmashElement":
        return cls(t, {((i,), t.group.identity()): 1})

    @classmethod
    def group_element(cls, t: YDTriple, h: Sequence[int], coeff=1) -> "SmashElement":
        return cls(t, {((), tuple(h)): coeff})

    @classmethod
    def from_free(cls, t: YDTriple, e: FreeElement) -> "SmashElement":
        identity = t.group.identity()
        return cls(t, {(w, identity): c for w, c in e.terms.items()})

    @classmethod
    def parse(cls, text: str, t: YDTriple) -> "SmashElement":
        """
        Parse ``x2 x1 - x1 x2 + 1/2*x1 x1 - 1 + g^2``. Letters are x1, x2, g
        and the group generators h1, h2, ...; group letters may appear anywhere.
        """
        total = cls(t)
        for sign, term in split_terms(text):
            coefficient, letters = split_coefficient(term, _LETTERS)
            coeff = as_scalar(coefficient, t.conductor) if coefficient else Scalar.one(t.conductor)
            product = cls.one(t).scale(coeff * sign)
            for token in letters.replace("*", " ").split():
                match = _TOKEN.fullmatch(token)
                if not match:
                    raise ElementError(f"unexpected token {token!r} in {text!r}")
                if match.group(1):
                    factor = cls.x(t, int(match.group(2)))
                elif match.group(3):
                    factor = cls.group_element(t, t.g_power(int(match.group(4) or 1)))
                else:
                    i = int(match.group(5))
                    if not (1 <= i <= t.group.ngens):
                        raise ElementError(f"h{i} is not a group generator")
                    factor = cls.group_element(t, t.group.power(t.group.generator(i - 1), int(match.group(6) or 1)))
                product = smash_multiply(t, product, factor)
            total = total + product
        return total

    # ---------- queries ----------
    @property
    def conductor(self) -> int:
        return self.triple.conductor

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def items(self) -> List[Tuple[Key, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: _order_key(kv[0]))

    def x_degree(self) -> int:
        return max((len(w) for w, _ in self.terms), default=0)

    def coefficient(self, word: Sequence[int], tag: Optional[Sequence[int]] = None) -> Scalar:
        tag = self.triple.group.identity() if tag is None else self.triple.group.element(tag)
        return self.terms.get((tuple(word), tag), Scalar.zero(self.conductor))

    def replace_terms(self, terms: Mapping[Key, Scalar]) -> "SmashElement":
        return SmashElement(self.triple, terms)

    # ---------- arithmetic ----------
    def __add__(self, other: "SmashElement") -> "SmashElement":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            add_into(terms, k, c)
        return SmashElement(self.triple, terms)

    def __neg__(self) -> "SmashElement":
        return SmashElement(self.triple, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "SmashElement") -> "SmashElement":
        return self + (-other)

    def scale(self, factor) -> "SmashElement":
        factor = as_scalar(factor, self.conductor)
        return SmashElement(self.triple, {k: c * factor for k, c in self.terms.items()})

    def __mul__(self, other) -> "SmashElement":
        if isinstance(other, SmashElement):
            return smash_multiply(self.triple, self, other)
        return self.scale(other)

    def __rmul__(self, factor) -> "SmashElement":
        return self.scale(factor)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SmashElement):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        return f"SmashElement({str(self)!r})"

    def __str__(self) -> str:
        parts = [
            format_term(c, _format_key(self.triple, k), first=(n == 0))
            for n, (k, c) in enumerate(self.items())
        ]
        return " ".join(parts) if parts else "0"


def smash_multiply(t: YDTriple, a: SmashElement, b: SmashElement) -> SmashElement:
    """(w h)(w' h') = w (h . w') h h'."""
    action = TripleAction(t)
    terms: Dict[Key, Scalar] = {}
    for (w1, h1), c1 in a.terms.items():
        for (w2, h2), c2 in b.terms.items():
            for moved, f in action.act(h1, w2).items():
                add_into(terms, (w1 + moved, t.group.multiply(h1, h2)), c1 * c2 * f)
    return SmashElement(t, terms)


class SmashTensor:
    """An element of (T(V)#kG) (x) (T(V)#kG)."""

    __hash__ = None

    def __init__(self, triple: YDTriple, terms: Optional[Mapping[Tuple[Key, Key], Scalar]] = None):
        self.triple = triple
        self.terms: Dict[Tuple[Key, Key], Scalar] = {}
        for k, c in (terms or {}).items():
            if c:
                add_into(self.terms, k, c)

    @classmethod
    def pure(cls, left: SmashElement, right: SmashElement) -> "SmashTensor":
        terms: Dict[Tuple[Key, Key], Scalar] = {}
        for a, x in left.terms.items():
            for b, y in right.terms.items():
                add_into(terms, (a, b), x * y)
        return cls(left.triple, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (_order_key(kv[0][0]), _order_key(kv[0][1])))

    def __add__(self, other: "SmashTensor") -> "SmashTensor":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            add_into(terms, k, c)
        return SmashTensor(self.triple, terms)

    def __neg__(self) -> "SmashTensor":
        return SmashTensor(self.triple, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "SmashTensor") -> "SmashTensor":
        return self + (-other)

    def scale(self, factor) -> "SmashTensor":
        factor = as_scalar(factor, self.triple.conductor)
        return SmashTensor(self.triple, {k: c * factor for k, c in self.terms.items()})

    def __mul__(self, other: "SmashTensor") -> "SmashTensor":
        """Componentwise product in the ordinary tensor square."""
        t = self.triple
        terms: Dict[Tuple[Key, Key], Scalar] = {}
        for (a, b), x in self.terms.items():
            for (a2, b2), y in other.terms.items():
                left = smash_multiply(t, SmashElement(t, {a: 1}), SmashElement(t, {a2: 1}))
                right = smash_multiply(t, SmashElement(t, {b: 1}), SmashElement(t, {b2: 1}))
                for k1, c1 in left.terms.items():
                    for k2, c2 in right.terms.items():
                        add_into(terms, (k1, k2), x * y * c1 * c2)
        return SmashTensor(t, terms)

    def map_legs(self, f) -> "SmashTensor":
        """(f (x) f) applied leg by leg; f maps SmashElements to SmashElements."""
        t = self.triple
        result = SmashTensor(t)
        for (a, b), c in self.terms.items():
            result = result + SmashTensor.pure(f(SmashElement(t, {a: c})), f(SmashElement(t, {b: 1})))
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, SmashTensor):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        return f"SmashTensor({str(self)!r})"

    def __str__(self) -> str:
        parts = []
        for n, ((a, b), c) in enumerate(self.items()):
            body = f"{_format_key(self.triple, a) or '1'} (x) {_format_key(self.triple, b) or '1'}"
            parts.append(format_term(c, body, first=(n == 0)))
        return " ".join(parts) if parts else "0"


def _letter_coproduct(t: YDTriple, i: int) -> SmashTensor:
    identity = t.group.identity()
    return SmashTensor(t, {(((i,), identity), ((), identity)): 1, (((), t.g), ((i,), identity)): 1})


def smash_coproduct(t: YDTriple, e: SmashElement) -> SmashTensor:
    """The bosonized coproduct, extended multiplicatively."""
    identity = t.group.identity()
    cache: Dict[Word, SmashTensor] = {}
    result = SmashTensor(t)
    for (word, tag), c in e.terms.items():
        if word not in cache:
            value = SmashTensor(t, {(((), identity), ((), identity)): 1})
            for i in word:
                value = value * _letter_coproduct(t, i)
            cache[word] = value
        grouplike = SmashTensor(t, {(((), tag), ((), tag)): c})
        result = result + cache[word] * grouplike
    return result


def skew_primitive_defect(t: YDTriple, e: SmashElement, h: Sequence[int]) -> SmashTensor:
    """Delta(e) - e (x) 1 - h (x) e; zero iff e is (h, 1)-skew-primitive."""
    one = SmashElement.one(t)
    return smash_coproduct(t, e) - SmashTensor.pure(e, one) - SmashTensor.pure(SmashElement.group_element(t, h), e)


def bosonize(t: YDTriple, value: TensorSquareElement) -> SmashTensor:
    """a (x) b in the braided tensor square goes to a g^|b| (x) b."""
    identity = t.group.identity()
    terms = {((a, t.g_power(len(b))), (b, identity)): c for (a, b), c in value.terms.items()}
    return SmashTensor(t, terms)


# ---------- presentations ----------
class Case(str, enum.Enum):
    JORDANIAN = "jordanian"
    SUPER_JORDANIAN = "super-jordanian"


@dataclass(frozen=True)
class LiftingPresentation:
    triple: YDTriple
    lam: Scalar
    case: Case
    relations: Tuple[SmashElement, ...]
    skew_degrees: Tuple[int, ...]  # relation k is (g^m, 1)-skew-primitive for m = skew_degrees[k]
    system: RewriteSystem

    @property
    def rules(self) -> RewriteSystem:
        return self.system

    @property
    def flat(self) -> bool:
        return not self.system.added_rules and not self.system.collapses


def _case_of(t: YDTriple) -> Case:
    if t.is_jordanian:
        return Case.JORDANIAN
    if t.is_super_jordanian:
        return Case.SUPER_JORDANIAN
    raise LiftingError(f"chi(g) = {t.eps} is neither 1 nor -1")


def jordan_relation(t: YDTriple, lam, tail_power: int = 2) -> SmashElement:
    """x2 x1 - x1 x2 + 1/2 x1^2 - lam (1 - g^tail_power)."""
    lam = as_scalar(lam, t.conductor)
    space = realize_braiding(t, permissive=True)
    y = FreeElement.parse("x2 x1 - x1 x2 + 1/2*x1 x1", space)
    tail = SmashElement.one(t) - SmashElement.group_element(t, t.g_power(tail_power))
    return SmashElement.from_free(t, y) - tail.scale(lam)


def super_jordan_relations(t: YDTriple, lam) -> Tuple[SmashElement, SmashElement]:
    """x1^2 - lam (1 - g^2) and r + 2 lam x2 + lam x1 g^2, r = x2 x21 - x21 x2 - x1 x21."""
    lam = as_scalar(lam, t.conductor)
    space = realize_braiding(t, permissive=True)
    x1, x2 = FreeElement.generator(space, 1), FreeElement.generator(space, 2)
    commutator = x21(space)
    r = x2 * commutator - commutator * x2 - x1 * commutator
    g2 = SmashElement.group_element(t, t.g_power(2))
    first = SmashElement.from_free(t, x1 * x1) - (SmashElement.one(t) - g2).scale(lam)
    second = (
        SmashElement.from_free(t, r)
        + SmashElement.x(t, 2).scale(lam * 2)
        + smash_multiply(t, SmashElement.x(t, 1), g2).scale(lam)
    )
    return first, second


def relation_elements(t: YDTriple, lam) -> List[SmashElement]:
    """The defining relations of U(D, lambda) as elements of T(V)#kG."""
    if _case_of(t) is Case.JORDANIAN:
        return [jordan_relation(t, lam)]
    return list(super_jordan_relations(t, lam))


def build_lifting(t: YDTriple, lam, degree: Optional[int] = None) -> LiftingPresentation:
    """
    The presentation of U(D, lambda), completed to x-degree ``degree``
    (settings.REWRITE_DEGREE by default).

    Raises:
        LiftingError: invalid triple, or lambda != 0 while chi^2 is not the
            counit character.
    """
    report = validate_yd_triple(t)
    if not report.ok:
        raise LiftingError(f"invalid YD-triple: {'; '.join(report.violations)}")
    lam = as_scalar(lam, t.conductor)
    if lam and t.chi.square() != counit_char(t.group, t.conductor):
        raise LiftingError(f"lambda = {lam} must be 0 because chi^2 is not the counit character")
    case = _case_of(t)
    relations = tuple(relation_elements(t, lam))
    skew = (2,) if case is Case.JORDANIAN else (2, 3)
    system = complete_to_degree(
        relations,
        MonomialOrder(),
        settings.REWRITE_DEGREE if degree is None else degree,
        dim=2,
        action=TripleAction(t),
    )
    presentation = LiftingPresentation(t, lam, case, relations, skew, system)
    logger.info(f"build_lifting: {case.value}, lambda = {lam}, {len(system.rules)} rules, flat = {presentation.flat}")
    return presentation


# ---------- checks ----------
@dataclass(frozen=True)
class HopfIdealReport:
    defects: Tuple[Tuple[str, SmashTensor], ...]

    @property
    def ok(self) -> bool:
        return not self.defects


def hopf_ideal_check(p: LiftingPresentation) -> HopfIdealReport:
    """
    Every defining relation is (g^m, 1)-skew-primitive: exactly for the first
    one, and modulo the first one (reduced leg by leg) for the second.
    """
    t = p.triple
    defects = []
    first_only: Optional[RewriteSystem] = None
    for k, (relation, m) in enumerate(zip(p.relations, p.skew_degrees)):
        defect = skew_primitive_defect(t, relation, t.g_power(m))
        if k > 0 and defect:
            if first_only is None:
                first_only = complete_to_degree(
                    p.relations[:1], p.system.order, p.system.degree_bound, dim=2, action=TripleAction(t)
                )
            defect = defect.map_legs(lambda e: normal_form(first_only, e))
        if defect:
            defects.append((f"relation {k + 1}", defect))
            logger.info(f"❌ relation {k + 1} is not (g^{m}, 1)-skew-primitive: {defect}")
    return HopfIdealReport(tuple(defects))


@dataclass(frozen=True)
class PbwReport:
    counts: Tuple[int, ...]
    expected: Tuple[int, ...]
    added_rules: int
    first_bad_degree: Optional[int]
    collapses: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.first_bad_degree is None and not self.added_rules and not self.collapses


def pbw_check(p: LiftingPresentation, max_degree: int) -> PbwReport:
    """
    Flatness at bounded degree: completion neither added rules nor collapsed
    a relation into the group algebra, and the irreducible x-words of each
    degree n <= max_degree are counted by dim B(V)^n.
    """
    system = p.system
    if max_degree > system.confluent_up_to:
        system = complete_to_degree(p.relations, system.order, max_degree, dim=2, action=system.action)
    counts = hilbert_function(system, max_degree)
    expected: GradedDims = nichols_dims(realize_braiding(p.triple), max_degree)
    first_bad = next((n for n in range(max_degree + 1) if counts[n] != expected[n]), None)
    report = PbwReport(counts.dims, expected.dims, len(system.added_rules), first_bad, system.collapses)
    if report.ok:
        logger.info(f"✅ pbw_check to degree {max_degree}: {counts}")
    else:
        logger.warning(f"⚠️ pbw_check failed: counts {counts}, expected {expected}, added {report.added_rules}")
    return report


def enveloping_relations(p: LiftingPresentation) -> List[SmashElement]:
    """The group-free relations: terms with a nontrivial group letter dropped."""
    identity = p.triple.group.identity()
    return [
        SmashElement(p.triple, {k: c for k, c in r.terms.items() if k[1] == identity})
        for r in p.relations
    ]


@dataclass(frozen=True)
class OneDimRepReport:
    violated: Tuple[Tuple[str, Scalar], ...]

    @property
    def ok(self) -> bool:
        return not self.violated


def one_dim_rep(p: LiftingPresentation, x1_value, x2_value) -> OneDimRepReport:
    """Evaluate the group-free relations at x1 -> x1_value, x2 -> x2_value."""
    n = p.triple.conductor
    values = {1: as_scalar(x1_value, n), 2: as_scalar(x2_value, n)}
    violated = []
    for relation in enveloping_relations(p):
        total = Scalar.zero(n)
        for (word, _), c in relation.terms.items():
            product = c
            for i in word:
                product = product * values[i]
            total = total + product
        if total:
            violated.append((str(relation), total))
    return OneDimRepReport(tuple(violated))


@dataclass(frozen=True)
class ZeroDivisorReport:
    a: SmashElement
    b: SmashElement
    product: SmashElement

    @property
    def ok(self) -> bool:
        return self.product.is_zero()


def zero_divisor_witness(p: LiftingPresentation, sqrt_lambda) -> ZeroDivisorReport:
    """a = s(g - 1) + x1 and b = s(g + 1) + x1 multiply to zero when s^2 = lambda."""
    t = p.triple
    if p.case is not Case.SUPER_JORDANIAN:
        raise LiftingError("the zero-divisor witness needs a super Jordanian lifting")
    s = as_scalar(sqrt_lambda, t.conductor)
    if s * s != p.lam:
        raise LiftingError(f"({s})^2 != lambda = {p.lam}")
    g, one, x1 = SmashElement.group_element(t, t.g), SmashElement.one(t), SmashElement.x(t, 1)
    a = (g - one).scale(s) + x1
    b = (g + one).scale(s) + x1
    product = normal_form(p.system, smash_multiply(t, a, b))
    return ZeroDivisorReport(a, b, product)


class IsoVerdict(str, enum.Enum):
    ISOMORPHIC = "isomorphic"
    NOT_ISOMORPHIC = "not-isomorphic"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class IsoResult:
    verdict: IsoVerdict
    witness: Optional[GroupAutomorphism] = None
    scaling: Optional[Scalar] = None
    obstruction: Optional[str] = None


def iso_classify(p: LiftingPresentation, q: LiftingPresentation) -> IsoResult:
    """
    U(D, lambda) and U(D', lambda') are isomorphic iff D' = D^f for an
    automorphism f and lambda = c lambda' for some nonzero c.
    """
    if p.triple.group != q.triple.group:
        raise LiftingError("iso_classify needs presentations over the same group")
    if p.lam.is_zero() != q.lam.is_zero():
        return IsoResult(IsoVerdict.NOT_ISOMORPHIC, obstruction="lambda = 0 on exactly one side")
    search = enumerate_automorphisms(p.triple.group)
    for f in search.automorphisms:
        if transport_triple(p.triple, f) == q.triple:
            scaling = p.lam / q.lam if q.lam else Scalar.one(p.triple.conductor)
            logger.info(f"iso_classify: isomorphic via {f.matrix}, c = {scaling}")
            return IsoResult(IsoVerdict.ISOMORPHIC, witness=f, scaling=scaling)
    if search.exhaustive:
        return IsoResult(IsoVerdict.NOT_ISOMORPHIC, obstruction="no automorphism carries D to D'")
    logger.warning("⚠️ iso_classify: bounded automorphism search found no witness")
    return IsoResult(IsoVerdict.INCONCLUSIVE, obstruction="automorphism search bound reached")
