"""
Degree-truncated noncommutative rewriting.

Elements are sparse maps (word, tag) -> scalar, read as word * tag with the
group letters to the right. A tag is a group element; plain T(V) uses the
trivial action whose only tag is the empty tuple. Words are compared by
x-length first, then lexicographically in the configured variable order.
"""

import heapq
import logging
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, Iterable, List, Mapping, Optional, Protocol, Sequence, Tuple

from .braided import Word
from .config import settings
from .errors import RewriteError
from .freealg import FreeElement, add_into, format_term, format_word
from .monitoring import COMPLETION_RULES_ADDED, REWRITE_REDUCTIONS
from .nichols import GradedDims
from .scalar import Scalar

logger = logging.getLogger(__name__)

Tag = Tuple[int, ...]
Key = Tuple[Word, Tag]
Terms = Dict[Key, Scalar]


class GroupAction(Protocol):
    """Group letters that commute past x-letters by h x = (h . x) h."""

    identity: Tag
    conductor: int

    def generators(self) -> Sequence[Tag]:
        ...

    def multiply(self, a: Tag, b: Tag) -> Tag:
        ...

    def inverse(self, a: Tag) -> Tag:
        ...

    def act(self, h: Tag, word: Word) -> Dict[Word, Scalar]:
        ...

    def format_tag(self, tag: Tag) -> str:
        ...


@dataclass(frozen=True)
class TrivialAction:
    """No group letters: plain T(V)."""

    conductor: int = field(default_factory=lambda: settings.CONDUCTOR)
    identity: Tag = ()

    def generators(self) -> Sequence[Tag]:
        return ()

    def multiply(self, a: Tag, b: Tag) -> Tag:
        return ()

    def inverse(self, a: Tag) -> Tag:
        return ()

    def act(self, h: Tag, word: Word) -> Dict[Word, Scalar]:
        return {word: Scalar.one(self.conductor)}

    def format_tag(self, tag: Tag) -> str:
        return ""


@dataclass(frozen=True)
class MonomialOrder:
    """x-length first, then lexicographic with ``variables`` listed smallest first."""

    variables: Tuple[int, ...] = (1, 2)

    def rank(self, letter: int) -> int:
        try:
            return self.variables.index(letter)
        except ValueError:
            raise RewriteError(f"x{letter} is not ordered by {self.describe()}") from None

    def key(self, word: Word) -> Tuple[int, Tuple[int, ...]]:
        return len(word), tuple(self.rank(i) for i in word)

    def describe(self) -> str:
        return "<".join(f"x{i}" for i in self.variables)


@dataclass(frozen=True)
class RewriteRule:
    lhs: Word
    rhs: Tuple[Tuple[Key, Scalar], ...]
    provenance: str = "input"

    @property
    def rhs_terms(self) -> Terms:
        return dict(self.rhs)

    def as_relation(self, action: "GroupAction") -> Terms:
        """lhs - rhs."""
        terms = {(self.lhs, action.identity): Scalar.one(action.conductor)}
        for key, c in self.rhs:
            add_into(terms, key, -c)
        return terms


@dataclass(frozen=True)
class RewriteSystem:
    rules: Tuple[RewriteRule, ...]
    order: MonomialOrder
    degree_bound: int
    confluent_up_to: int
    dim: int
    action: GroupAction = field(default_factory=TrivialAction)
    collapses: Tuple[str, ...] = ()  # relations left with no x-letter, living in the group algebra

    @property
    def added_rules(self) -> Tuple[RewriteRule, ...]:
        """Rules produced by completion rather than by the input relations."""
        return tuple(r for r in self.rules if r.provenance != "input")

    def is_irreducible(self, word: Word) -> bool:
        return not any(_find(word, r.lhs) is not None for r in self.rules)


def _find(word: Word, pattern: Word, start: int = 0) -> Optional[int]:
    n = len(pattern)
    for i in range(start, len(word) - n + 1):
        if word[i:i + n] == pattern:
            return i
    return None


def _occurrences(word: Word, pattern: Word) -> List[int]:
    n = len(pattern)
    return [i for i in range(len(word) - n + 1) if word[i:i + n] == pattern]


def _sort_key(order: MonomialOrder, key: Key):
    return order.key(key[0]), key[1]


def format_terms(terms: Mapping[Key, Scalar], order: MonomialOrder, action: GroupAction) -> str:
    """Canonical text of a tagged sum, largest word first."""
    items = sorted(terms.items(), key=lambda kv: _sort_key(order, kv[0]), reverse=True)
    parts = []
    for k, ((word, tag), c) in enumerate(items):
        body = " ".join(p for p in (format_word(word), action.format_tag(tag)) if p)
        parts.append(format_term(c, body, first=(k == 0)))
    return " ".join(parts) if parts else "0"


# ---------- term arithmetic ----------
def _times_right(action: GroupAction, terms: Mapping[Key, Scalar], suffix: Word) -> Terms:
    """(sum c w h) * v = sum c w (h . v) h."""
    out: Terms = {}
    for (word, tag), c in terms.items():
        for moved, f in action.act(tag, suffix).items():
            add_into(out, (word + moved, tag), c * f)
    return out


def _times_left(terms: Mapping[Key, Scalar], prefix: Word) -> Terms:
    out: Terms = {}
    for (word, tag), c in terms.items():
        add_into(out, (prefix + word, tag), c)
    return out


def _replace(action: GroupAction, key: Key, coeff: Scalar, position: int, rule: RewriteRule) -> Terms:
    """coeff * u (rhs) v h for the term u lhs v h."""
    word, tag = key
    u, v = word[:position], word[position + len(rule.lhs):]
    out: Terms = {}
    for (r, k), c in rule.rhs:
        for moved, f in action.act(k, v).items():
            add_into(out, (u + r + moved, action.multiply(k, tag)), coeff * c * f)
    return out


def _heap_key(order: MonomialOrder, key: Key):
    length, ranks = order.key(key[0])
    return (-length, tuple(-r for r in ranks), key[1])


def reduce_terms(
    rules: Sequence[RewriteRule],
    order: MonomialOrder,
    action: GroupAction,
    terms: Mapping[Key, Scalar],
    rng: Optional[random.Random] = None,
) -> Terms:
    """Fully reduce a tagged sum; the largest reducible word goes first unless ``rng`` is given."""
    if rng is not None:
        return _reduce_randomly(rules, order, action, terms, rng)
    pending: Terms = {k: c for k, c in terms.items() if c}
    heap = [(_heap_key(order, k), k) for k in pending]
    heapq.heapify(heap)
    result: Terms = {}
    steps = 0
    while heap:
        _, key = heapq.heappop(heap)
        coeff = pending.pop(key, None)
        if coeff is None:
            continue
        match = next(
            ((rule, pos) for rule in rules for pos in [_find(key[0], rule.lhs)] if pos is not None),
            None,
        )
        if match is None:
            result[key] = coeff
            continue
        steps += 1
        for new_key, c in _replace(action, key, coeff, match[1], match[0]).items():
            if new_key not in pending:
                heapq.heappush(heap, (_heap_key(order, new_key), new_key))
            add_into(pending, new_key, c)
    REWRITE_REDUCTIONS.inc(steps)
    return result


def _reduce_randomly(rules, order, action, terms, rng: random.Random) -> Terms:
    pending: Terms = {k: c for k, c in terms.items() if c}
    result: Terms = {}
    steps = 0
    while pending:
        key = rng.choice(sorted(pending, key=lambda k: _sort_key(order, k)))
        coeff = pending.pop(key)
        matches = [(rule, pos) for rule in rules for pos in _occurrences(key[0], rule.lhs)]
        if not matches:
            add_into(result, key, coeff)
            continue
        steps += 1
        rule, pos = rng.choice(matches)
        for new_key, c in _replace(action, key, coeff, pos, rule).items():
            add_into(pending, new_key, c)
    REWRITE_REDUCTIONS.inc(steps)
    return result


# ---------- conversions ----------
def _as_terms(e, identity: Tag) -> Terms:
    if isinstance(e, FreeElement):
        return {(w, identity): c for w, c in e.terms.items()}
    if hasattr(e, "terms"):
        return dict(e.terms)
    return dict(e)


def _dim_of(e) -> Optional[int]:
    if isinstance(e, FreeElement):
        return e.space.dim
    return getattr(e, "dim", None)


def _max_length(terms: Mapping[Key, Scalar]) -> int:
    return max((len(w) for w, _ in terms), default=0)


def _is_collapse(terms: Terms) -> bool:
    return bool(terms) and all(not w for w, _ in terms)


def _collapse_text(terms: Terms, order: MonomialOrder, action: GroupAction) -> str:
    lead = max(terms, key=lambda k: _sort_key(order, k))
    scale = terms[lead].inverse()
    return format_terms({k: c * scale for k, c in terms.items()}, order, action)


def _orient(terms: Terms, order: MonomialOrder, action: GroupAction, provenance: str) -> RewriteRule:
    lead = max((w for w, _ in terms), key=order.key)
    tags = [tag for (w, tag) in terms if w == lead]
    if len(tags) > 1:
        raise RewriteError(
            f"leading word {format_word(lead)} carries {len(tags)} group tags; the order does not orient "
            f"{format_terms(terms, order, action)}"
        )
    tag = tags[0]
    # make the leading term monic: multiply by c^-1 on the left and tag^-1 on the right
    scale = terms[(lead, tag)].inverse()
    back = action.inverse(tag)
    rhs: Terms = {}
    for (w, k), c in terms.items():
        if w == lead:
            continue
        add_into(rhs, (w, action.multiply(k, back)), -(c * scale))
    return RewriteRule(lead, tuple(sorted(rhs.items(), key=lambda kv: _sort_key(order, kv[0]), reverse=True)), provenance)


def _critical_pairs(rules: Sequence[RewriteRule], action: GroupAction, degree: int) -> Iterable[Tuple[Terms, str]]:
    for r1 in rules:
        for r2 in rules:
            n1, n2 = len(r1.lhs), len(r2.lhs)
            for k in range(1, min(n1, n2)):
                if r1.lhs[n1 - k:] != r2.lhs[:k] or n1 + n2 - k > degree:
                    continue
                suffix, prefix = r2.lhs[k:], r1.lhs[: n1 - k]
                s = _times_right(action, r1.rhs_terms, suffix)
                for key, c in _times_left(r2.rhs_terms, prefix).items():
                    add_into(s, key, -c)
                yield s, f"overlap {format_word(r1.lhs)} / {format_word(r2.lhs)} at {format_word(r1.lhs + suffix)}"
    for rule in rules:
        relation = rule.as_relation(action)
        for h in action.generators():
            moved: Terms = {}
            for (w, tag), c in relation.items():
                for w2, f in action.act(h, w).items():
                    add_into(moved, (w2, tag), c * f)
            yield moved, f"action of {action.format_tag(h)} on {format_word(rule.lhs)}"


def complete_to_degree(
    relations: Sequence,
    order: Optional[MonomialOrder] = None,
    degree: Optional[int] = None,
    *,
    dim: Optional[int] = None,
    action: Optional[GroupAction] = None,
) -> RewriteSystem:
    """
    Complete a set of relations to a rewriting system whose ambiguities of
    x-length <= degree all resolve.

    Args:
        relations: FreeElements, smash elements or raw tagged term maps.
        order: the monomial order; x1 < x2 by default.
        degree: the truncation degree; settings.REWRITE_DEGREE by default.
        dim: number of x-letters when it cannot be read off the relations.
        action: group letters of the ambient smash product, if any.

    Raises:
        RewriteError: a relation whose leading word is not unique, or the
            completion exceeded settings.MAX_COMPLETION_RULES.

    Relations that reduce to a combination of group letters alone cannot be
    oriented; they are kept in RewriteSystem.collapses.
    """
    order = order or MonomialOrder()
    degree = settings.REWRITE_DEGREE if degree is None else degree
    if degree < 0:
        raise RewriteError(f"completion degree must be non-negative, got {degree}")
    if action is None:
        conductor = next((e.conductor for e in relations if hasattr(e, "conductor")), settings.CONDUCTOR)
        action = TrivialAction(conductor)
    if dim is None:
        dim = next((d for d in (_dim_of(e) for e in relations) if d is not None), 2)

    rules: List[RewriteRule] = []
    queue: Deque[Tuple[Terms, str]] = deque((_as_terms(e, action.identity), "input") for e in relations)
    collapses: List[str] = []
    added = 0
    while True:
        while queue:
            terms, provenance = queue.popleft()
            reduced = reduce_terms(rules, order, action, terms)
            if not reduced:
                continue
            if provenance != "input" and _max_length(reduced) > degree:
                continue
            if _is_collapse(reduced):
                text = _collapse_text(reduced, order, action)
                if text not in collapses:
                    logger.warning(f"⚠️ {provenance} collapses to {text} in the group algebra")
                    collapses.append(text)
                continue
            rule = _orient(reduced, order, action, provenance)
            if provenance != "input":
                added += 1
                logger.debug(f"new rule from {provenance}: {format_word(rule.lhs)}")
                if added > settings.MAX_COMPLETION_RULES:
                    raise RewriteError(f"completion added more than {settings.MAX_COMPLETION_RULES} rules")
            kept = []
            for old in rules:
                if _find(old.lhs, rule.lhs) is not None:
                    queue.append((old.as_relation(action), old.provenance))
                else:
                    kept.append(old)
            rules = kept + [rule]
            rules = [
                RewriteRule(
                    r.lhs,
                    tuple(sorted(reduce_terms(rules, order, action, r.rhs_terms).items(),
                                 key=lambda kv: _sort_key(order, kv[0]), reverse=True)),
                    r.provenance,
                )
                for r in rules
            ]
        for pair, provenance in _critical_pairs(rules, action, degree):
            reduced = reduce_terms(rules, order, action, pair)
            if not reduced or (_is_collapse(reduced) and _collapse_text(reduced, order, action) in collapses):
                continue
            queue.append((pair, provenance))
        if not queue:
            break

    rules.sort(key=lambda r: order.key(r.lhs))
    system = RewriteSystem(tuple(rules), order, degree, degree, dim, action, tuple(collapses))
    COMPLETION_RULES_ADDED.inc(len(system.added_rules))
    if system.added_rules:
        logger.warning(f"⚠️ completion to degree {degree} added {len(system.added_rules)} rules")
    logger.info(f"complete_to_degree: {len(rules)} rules, confluent up to {degree}")
    return system


def normal_form(system: RewriteSystem, e, rng: Optional[random.Random] = None):
    """
    The irreducible representative of e.

    Accepts FreeElements and smash elements; a FreeElement whose normal form
    picks up group letters raises RewriteError.
    """
    terms = _as_terms(e, system.action.identity)
    if _max_length(terms) > system.degree_bound:
        raise RewriteError(f"x-degree {_max_length(terms)} exceeds the bound {system.degree_bound}")
    reduced = reduce_terms(system.rules, system.order, system.action, terms, rng)
    if isinstance(e, FreeElement):
        if any(tag != system.action.identity for _, tag in reduced):
            raise RewriteError("normal form has group letters; reduce a smash element instead")
        return FreeElement(e.space, {w: c for (w, _), c in reduced.items()})
    if hasattr(e, "replace_terms"):
        return e.replace_terms(reduced)
    return reduced


def irreducible_words(system: RewriteSystem, n: int) -> List[Word]:
    """Words of length n containing no left-hand side, lexicographic."""
    lhs = [r.lhs for r in system.rules]
    words: List[Word] = []

    def extend(prefix: Word) -> None:
        if len(prefix) == n:
            words.append(prefix)
            return
        for letter in range(1, system.dim + 1):
            word = prefix + (letter,)
            if any(len(p) <= len(word) and word[len(word) - len(p):] == p for p in lhs):
                continue
            extend(word)

    extend(())
    return words


def hilbert_function(system: RewriteSystem, max_degree: int) -> GradedDims:
    """Number of irreducible words in each degree 0..max_degree."""
    if max_degree > system.confluent_up_to:
        raise RewriteError(
            f"system is confluent only up to {system.confluent_up_to}, asked for {max_degree}"
        )
    return GradedDims(tuple(len(irreducible_words(system, n)) for n in range(max_degree + 1)))


def dump_system(system: RewriteSystem) -> str:
    """Text serialization: one rule per line, scalars in canonical form."""
    lines = [
        f"# dim = {system.dim}, order = {system.order.describe()}, "
        f"degree_bound = {system.degree_bound}, confluent_up_to = {system.confluent_up_to}"
    ]
    for k, rule in enumerate(system.rules, start=1):
        rhs = format_terms(rule.rhs_terms, system.order, system.action)
        lines.append(f"rule {k}: {format_word(rule.lhs)} -> {rhs}  [{rule.provenance}]")
    for text in system.collapses:
        lines.append(f"collapse: {text} = 0")
    return "\n".join(lines)
