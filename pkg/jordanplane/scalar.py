"""
Exact arithmetic in the cyclotomic field Q(zeta_N) and dense/sparse exact
linear algebra over it.

A Scalar is stored in the power basis 1, z, ..., z^(phi(N)-1), reduced modulo
the N-th cyclotomic polynomial, so equality is equality of coefficient tuples.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from tokenize import TokenError
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from .config import settings
from .errors import ScalarError
from .monitoring import RANK_COMPUTATIONS

logger = logging.getLogger(__name__)

_Z = sympy.Symbol("z")


@lru_cache(maxsize=None)
def _cyclotomic_tail(conductor: int) -> Tuple[Fraction, ...]:
    """Coefficients a_0..a_{phi-1} of Phi_N = x^phi + sum a_i x^i."""
    if conductor < 1:
        raise ScalarError(f"conductor must be positive, got {conductor}")
    poly = sympy.Poly(sympy.cyclotomic_poly(conductor, _Z), _Z, domain=sympy.QQ)
    descending = poly.all_coeffs()
    tail = [Fraction(int(c.p), int(c.q)) for c in reversed(descending[1:])]
    return tuple(tail)


@lru_cache(maxsize=None)
def field_degree(conductor: int) -> int:
    """phi(N), the dimension of Q(zeta_N) over Q."""
    return len(_cyclotomic_tail(conductor))


def _reduce(product: List[Fraction], conductor: int) -> Tuple[Fraction, ...]:
    tail = _cyclotomic_tail(conductor)
    phi = len(tail)
    for k in range(len(product) - 1, phi - 1, -1):
        c = product[k]
        if c:
            base = k - phi
            for i, a in enumerate(tail):
                if a:
                    product[base + i] -= c * a
    return tuple(product[:phi])


class Scalar:
    """An element of Q(zeta_N). Immutable; hashable."""

    __slots__ = ("conductor", "coeffs", "_rational")

    def __init__(self, coeffs: Sequence[Union[int, Fraction]], conductor: Optional[int] = None):
        n = conductor if conductor is not None else settings.CONDUCTOR
        phi = field_degree(n)
        values = [Fraction(c) for c in coeffs]
        if len(values) > phi:
            reduced = _reduce(values, n)
        else:
            reduced = tuple(values) + (Fraction(0),) * (phi - len(values))
        object.__setattr__(self, "conductor", n)
        object.__setattr__(self, "coeffs", reduced)
        object.__setattr__(self, "_rational", not any(reduced[1:]))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # ---------- constructors ----------
    @classmethod
    def rational(cls, value: Union[int, Fraction, str], conductor: Optional[int] = None) -> "Scalar":
        return cls([Fraction(value)], conductor)

    @classmethod
    def zero(cls, conductor: Optional[int] = None) -> "Scalar":
        return _zero(conductor if conductor is not None else settings.CONDUCTOR)

    @classmethod
    def one(cls, conductor: Optional[int] = None) -> "Scalar":
        return _one(conductor if conductor is not None else settings.CONDUCTOR)

    @classmethod
    def zeta(cls, conductor: Optional[int] = None, power: int = 1) -> "Scalar":
        """zeta_N ** power."""
        n = conductor if conductor is not None else settings.CONDUCTOR
        power %= n
        coeffs = [Fraction(0)] * (power + 1)
        coeffs[power] = Fraction(1)
        return cls(coeffs, n)

    # ---------- predicates ----------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self._rational and self.coeffs[0] == 1

    @property
    def is_rational(self) -> bool:
        return self._rational

    def as_fraction(self) -> Fraction:
        if not self._rational:
            raise ScalarError(f"{self} is not rational")
        return self.coeffs[0]

    def is_integer(self) -> bool:
        return self._rational and self.coeffs[0].denominator == 1

    def __bool__(self) -> bool:
        return not self.is_zero()

    # ---------- coercion ----------
    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.conductor != self.conductor:
                raise ScalarError(
                    f"conductor mismatch: {self.conductor} vs {other.conductor}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar([other], self.conductor)
        return NotImplemented

    # ---------- arithmetic ----------
    def __add__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._rational and other._rational:
            return Scalar([self.coeffs[0] + other.coeffs[0]], self.conductor)
        return Scalar([a + b for a, b in zip(self.coeffs, other.coeffs)], self.conductor)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar([-a for a in self.coeffs], self.conductor)

    def __sub__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._rational:
            c = self.coeffs[0]
            return Scalar([c * b for b in other.coeffs], self.conductor)
        if other._rational:
            c = other.coeffs[0]
            return Scalar([a * c for a in self.coeffs], self.conductor)
        phi = len(self.coeffs)
        product = [Fraction(0)] * (2 * phi - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        product[i + j] += a * b
        return Scalar(_reduce(product, self.conductor), self.conductor)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ScalarError("division by zero")
        if self._rational:
            return Scalar([1 / self.coeffs[0]], self.conductor)
        return _inverse(self.coeffs, self.conductor)

    def __truediv__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Scalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, exponent: int) -> "Scalar":
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        e = abs(exponent)
        result = Scalar.one(self.conductor)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # ---------- comparison / printing ----------
    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.conductor == other.conductor and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self._rational and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._rational:
            return hash(self.coeffs[0])
        return hash((self.conductor, self.coeffs))

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r}, conductor={self.conductor})"

    def __str__(self) -> str:
        return format_scalar(self)


@lru_cache(maxsize=None)
def _zero(conductor: int) -> Scalar:
    return Scalar([0], conductor)


@lru_cache(maxsize=None)
def _one(conductor: int) -> Scalar:
    return Scalar([1], conductor)


@lru_cache(maxsize=4096)
def _inverse(coeffs: Tuple[Fraction, ...], conductor: int) -> Scalar:
    numerator = sympy.Poly(
        [sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)],
        _Z,
        domain=sympy.QQ,
    )
    modulus = sympy.Poly(sympy.cyclotomic_poly(conductor, _Z), _Z, domain=sympy.QQ)
    inv = numerator.invert(modulus)
    values = [Fraction(int(c.p), int(c.q)) for c in reversed(inv.all_coeffs())]
    return Scalar(values, conductor)


def _format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_scalar(s: Scalar) -> str:
    """Canonical text: ascending powers of z, e.g. ``1/2 - z + 3*z^2``."""
    parts: List[str] = []
    for power, c in enumerate(s.coeffs):
        if not c:
            continue
        magnitude = abs(c)
        if power == 0:
            body = _format_coefficient(magnitude)
        else:
            monomial = "z" if power == 1 else f"z^{power}"
            body = monomial if magnitude == 1 else f"{_format_coefficient(magnitude)}*{monomial}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts) if parts else "0"


# ---------- parsing ----------
_TRANSFORMATIONS = standard_transformations + (convert_xor,)


def parse_scalar(text: str, conductor: Optional[int] = None) -> Scalar:
    """
    Parse the scalar grammar: rationals, ``z`` for zeta_N, ``+ - * / ^`` and
    parentheses.

    Raises:
        ScalarError: malformed text, division by zero, exponent overflow.
    """
    n = conductor if conductor is not None else settings.CONDUCTOR
    if not isinstance(text, str) or not text.strip():
        raise ScalarError(f"empty scalar text: {text!r}")
    if any(ch.isalpha() and ch != "z" for ch in text):
        raise ScalarError(f"unknown symbol in scalar {text!r}; only 'z' is allowed")
    if "." in text:
        raise ScalarError(f"floating point literal in scalar {text!r}")
    try:
        expr = parse_expr(
            text,
            local_dict={"z": _Z},
            transformations=_TRANSFORMATIONS,
            evaluate=False,
        )
    except (SyntaxError, TokenError, TypeError, ValueError, NameError, sympy.SympifyError) as e:
        raise ScalarError(f"malformed scalar {text!r}: {e}") from e
    return _evaluate(expr, n, text)


def _evaluate(expr, conductor: int, text: str, scale: int = 1) -> Scalar:
    # scale is the product of the exponents enclosing expr
    if expr == _Z:
        return Scalar.zeta(conductor)
    if isinstance(expr, sympy.Rational):
        return Scalar.rational(Fraction(int(expr.p), int(expr.q)), conductor)
    if isinstance(expr, sympy.Add):
        total = Scalar.zero(conductor)
        for arg in expr.args:
            total = total + _evaluate(arg, conductor, text, scale)
        return total
    if isinstance(expr, sympy.Mul):
        product = Scalar.one(conductor)
        for arg in expr.args:
            product = product * _evaluate(arg, conductor, text, scale)
        return product
    if isinstance(expr, sympy.Pow):
        exponent = _evaluate(expr.exp, conductor, text)
        if not exponent.is_integer():
            raise ScalarError(f"non-integer exponent in {text!r}")
        e = int(exponent.as_fraction())
        if abs(e) * scale > settings.EXPONENT_LIMIT:
            raise ScalarError(
                f"exponent overflow in {text!r}: |{e}| x {scale} > {settings.EXPONENT_LIMIT}"
            )
        base = _evaluate(expr.base, conductor, text, scale * max(abs(e), 1))
        return base ** e
    if expr is sympy.zoo or expr is sympy.nan:
        raise ScalarError(f"division by zero in {text!r}")
    raise ScalarError(f"unsupported construct {expr!r} in {text!r}")


def as_scalar(value, conductor: Optional[int] = None) -> Scalar:
    """Coerce an int, Fraction, string or Scalar to a Scalar."""
    n = conductor if conductor is not None else settings.CONDUCTOR
    if isinstance(value, Scalar):
        if value.conductor != n:
            raise ScalarError(f"conductor mismatch: {value.conductor} vs {n}")
        return value
    if isinstance(value, (int, Fraction)):
        return Scalar.rational(value, n)
    if isinstance(value, str):
        return parse_scalar(value, n)
    raise ScalarError(f"cannot interpret {value!r} as a scalar")


def is_root_of_unity(s: Scalar) -> Optional[int]:
    """Multiplicative order of s, or None when s is not a root of unity."""
    if s.is_zero():
        raise ScalarError("zero is not a root of unity")
    bound = sympy.ilcm(2, s.conductor)
    if s ** int(bound) != 1:
        return None
    for k in sympy.divisors(int(bound)):
        if s ** int(k) == 1:
            return int(k)
    return int(bound)


# ---------- matrices ----------
@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: Tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ScalarError(
                f"matrix needs {self.rows}x{self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], conductor: Optional[int] = None) -> "Matrix":
        n_rows = len(rows)
        n_cols = len(rows[0]) if rows else 0
        if any(len(r) != n_cols for r in rows):
            raise ScalarError("ragged matrix rows")
        entries = tuple(as_scalar(v, conductor) for r in rows for v in r)
        return cls(n_rows, n_cols, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[Dict[int, Scalar]], rows: int, conductor: Optional[int] = None) -> "Matrix":
        """Build from sparse columns (row index -> Scalar)."""
        zero = Scalar.zero(conductor)
        cols = len(columns)
        entries = [zero] * (rows * cols)
        for j, column in enumerate(columns):
            for i, v in column.items():
                entries[i * cols + j] = v
        return cls(rows, cols, tuple(entries))

    @classmethod
    def identity(cls, n: int, conductor: Optional[int] = None) -> "Matrix":
        zero, one = Scalar.zero(conductor), Scalar.one(conductor)
        return cls(n, n, tuple(one if i == j else zero for i in range(n) for j in range(n)))

    def __getitem__(self, index: Tuple[int, int]) -> Scalar:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[Scalar, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Tuple[Scalar, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def matmul(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ScalarError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        left = self.sparse_rows()
        right = other.sparse_rows()
        conductor = self.entries[0].conductor if self.entries else settings.CONDUCTOR
        zero = Scalar.zero(conductor)
        out = [zero] * (self.rows * other.cols)
        for i, row in enumerate(left):
            acc: Dict[int, Scalar] = {}
            for k, a in row.items():
                for j, b in right[k].items():
                    acc[j] = acc.get(j, zero) + a * b
            for j, v in acc.items():
                out[i * other.cols + j] = v
        return Matrix(self.rows, other.cols, tuple(out))

    def apply(self, vector: Sequence[Scalar]) -> Tuple[Scalar, ...]:
        if len(vector) != self.cols:
            raise ScalarError("vector length does not match matrix columns")
        conductor = self.entries[0].conductor if self.entries else settings.CONDUCTOR
        result = []
        for row in self.sparse_rows():
            acc = Scalar.zero(conductor)
            for j, a in row.items():
                if vector[j]:
                    acc = acc + a * vector[j]
            result.append(acc)
        return tuple(result)

    def sparse_rows(self) -> List[Dict[int, Scalar]]:
        return [
            {j: v for j, v in enumerate(self.row(i)) if v}
            for i in range(self.rows)
        ]

    def is_zero(self) -> bool:
        return not any(self.entries)


SparseRow = Dict[int, Scalar]


def _axpy(target: SparseRow, factor: Scalar, source: SparseRow) -> None:
    """target -= factor * source, dropping zeros."""
    for c, v in source.items():
        if c in target:
            updated = target[c] - factor * v
            if updated:
                target[c] = updated
            else:
                del target[c]
        else:
            target[c] = -(factor * v)


def _scale(row: SparseRow, factor: Scalar) -> SparseRow:
    return {c: v * factor for c, v in row.items()}


def row_reduce(rows: List[SparseRow], cols: int, *, full: bool = True) -> Tuple[List[SparseRow], List[int]]:
    """
    Gauss(-Jordan) elimination on sparse rows, in place.

    Pivots are the first nonzero entry in row-major order: columns are scanned
    left to right and the first remaining row with a nonzero entry wins.

    Returns:
        The nonzero pivot rows (normalized to pivot 1) and their pivot columns.
    """
    pivot_rows: List[SparseRow] = []
    pivot_cols: List[int] = []
    pending = [r for r in rows if r]
    for col in range(cols):
        if not pending:
            break
        hit = next((k for k, r in enumerate(pending) if col in r), None)
        if hit is None:
            continue
        pivot = pending.pop(hit)
        pivot = _scale(pivot, pivot[col].inverse())
        for r in pending:
            if col in r:
                _axpy(r, r[col], pivot)
        pending = [r for r in pending if r]
        if full:
            for r in pivot_rows:
                if col in r:
                    _axpy(r, r[col], pivot)
        pivot_rows.append(pivot)
        pivot_cols.append(col)
    return pivot_rows, pivot_cols


def rank(m: Matrix) -> int:
    """Rank only; forward elimination without back substitution."""
    RANK_COMPUTATIONS.labels(kind="rank").inc()
    _, pivots = row_reduce(m.sparse_rows(), m.cols, full=False)
    return len(pivots)


def sparse_rank(rows: Iterable[SparseRow], cols: int) -> int:
    RANK_COMPUTATIONS.labels(kind="rank").inc()
    _, pivots = row_reduce([dict(r) for r in rows], cols, full=False)
    return len(pivots)


def rank_and_kernel(m: Matrix) -> Tuple[int, List[Tuple[Scalar, ...]]]:
    """
    Rank and a kernel basis of m.

    The kernel basis has one vector per non-pivot column f of the reduced row
    echelon form, with entry 1 at f, so it is reproducible bit-for-bit.
    """
    RANK_COMPUTATIONS.labels(kind="kernel").inc()
    conductor = m.entries[0].conductor if m.entries else settings.CONDUCTOR
    pivot_rows, pivot_cols = row_reduce(m.sparse_rows(), m.cols, full=True)
    zero, one = Scalar.zero(conductor), Scalar.one(conductor)
    pivot_set = set(pivot_cols)
    kernel: List[Tuple[Scalar, ...]] = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        vector = [zero] * m.cols
        vector[free] = one
        for row, col in zip(pivot_rows, pivot_cols):
            if free in row:
                vector[col] = -row[free]
        kernel.append(tuple(vector))
    logger.debug(f"rank_and_kernel: {m.rows}x{m.cols} -> rank {len(pivot_cols)}, kernel {len(kernel)}")
    return len(pivot_cols), kernel


def solve(m: Matrix, b: Sequence[Scalar]) -> Optional[Tuple[Scalar, ...]]:
    """One exact solution of m x = b (free variables set to 0), or None."""
    if len(b) != m.rows:
        raise ScalarError("right-hand side length does not match matrix rows")
    conductor = m.entries[0].conductor if m.entries else settings.CONDUCTOR
    rows = m.sparse_rows()
    for r, v in zip(rows, b):
        if v:
            r[m.cols] = v
    pivot_rows, pivot_cols = row_reduce(rows, m.cols + 1, full=True)
    if m.cols in pivot_cols:
        return None
    solution = [Scalar.zero(conductor)] * m.cols
    for row, col in zip(pivot_rows, pivot_cols):
        solution[col] = row.get(m.cols, Scalar.zero(conductor))
    return tuple(solution)
