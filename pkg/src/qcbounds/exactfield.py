"""Exact scalar arithmetic for the certificate machinery.

Everything downstream (weight enumerators, symmetry-reduced SDP
coefficients, infeasibility certificates) is computed over the quadratic
extension Q(sqrt(3)).  This module provides

* ``Rat`` -- arbitrary-precision rationals (``fractions.Fraction``),
* ``QExt`` -- elements a + b*sqrt(3) with exact sign determination,
* ``SymMatrixQ`` -- dense symmetric matrices over Q(sqrt(3)) with an
  exact LDL^T decomposition used to decide positive semidefiniteness.

No floating point is used anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable, Union

Rat = Fraction

_RatLike = Union[int, Fraction]


def rat_from_str(s: str) -> Fraction:
    """Parse the canonical text encoding "p/q" (q omitted when 1)."""
    return Fraction(s.strip())


def rat_to_str(r: Fraction) -> str:
    """Canonical text encoding "p/q"; the denominator is omitted when 1."""
    r = Fraction(r)
    return str(r)


class QExt:
    """An element a + b*sqrt(3) of Q(sqrt(3)) with a, b rational.

    The representation is unique because sqrt(3) is irrational.  All
    arithmetic is exact; division by zero raises ``ZeroDivisionError``.
    Instances are immutable and hashable.
    """

    __slots__ = ("a", "b")

    def __init__(self, a: _RatLike = 0, b: _RatLike = 0):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("QExt is immutable")

    # -- constructors ------------------------------------------------

    @classmethod
    def from_rat(cls, r: _RatLike) -> "QExt":
        return cls(r, 0)

    @classmethod
    def sqrt3_times(cls, r: _RatLike) -> "QExt":
        """The element r*sqrt(3)."""
        return cls(0, r)

    # -- predicates --------------------------------------------------

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    # -- ring operations ---------------------------------------------

    def _coerce(self, other) -> "QExt":
        if isinstance(other, QExt):
            return other
        if isinstance(other, (int, Fraction)):
            return QExt(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QExt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QExt(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QExt(o.a - self.a, o.b - self.b)

    def __neg__(self):
        return QExt(-self.a, -self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        # (a + b s)(c + d s) = (ac + 3bd) + (ad + bc) s  with s^2 = 3
        return QExt(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> "QExt":
        # 1/(a + b s) = (a - b s)/(a^2 - 3 b^2); the norm vanishes only at 0
        norm = self.a * self.a - 3 * self.b * self.b
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(3))")
        return QExt(self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    # -- comparisons --------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.a == other and self.b == 0
        if isinstance(other, QExt):
            return self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def sign(self) -> int:
        return qext_sign(self)

    def __lt__(self, other):
        o = self._coerce(other)
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        return (self - o).sign() >= 0

    # -- formatting ---------------------------------------------------

    def __repr__(self):
        return f"QExt({self.a!r}, {self.b!r})"

    def __str__(self):
        if self.b == 0:
            return rat_to_str(self.a)
        return f"{rat_to_str(self.a)}+{rat_to_str(self.b)}*sqrt(3)"

    def to_pair(self) -> list[str]:
        """Two-element array encoding [a, b] used by the certificate format."""
        return [rat_to_str(self.a), rat_to_str(self.b)]

    @classmethod
    def from_pair(cls, pair) -> "QExt":
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValueError(f"QExt encoding must be a two-element array, got {pair!r}")
        return cls(rat_from_str(str(pair[0])), rat_from_str(str(pair[1])))

    def decimal_str(self, digits: int) -> str:
        """Deterministic decimal rendering rounded toward -inf at `digits`
        fractional digits.  Uses only integer arithmetic, so re-rendering the
        same value is always byte-identical."""
        scale = 10**digits
        # floor((A + B*sqrt(3)) / den) with A, B, den integers
        aq = self.a * scale
        bq = self.b * scale
        den = aq.denominator * bq.denominator
        A = aq.numerator * bq.denominator
        B = bq.numerator * aq.denominator
        if B >= 0:
            s = isqrt(3 * B * B)  # floor(B*sqrt(3))
        else:
            t = isqrt(3 * B * B)
            s = -t - (0 if t * t == 3 * B * B else 1)
        lo = (A + s) // den
        # the isqrt bracket is within 1 of the truth; settle exactly
        while _qext_scaled_ge(self, scale, lo + 1):
            lo += 1
        while not _qext_scaled_ge(self, scale, lo):
            lo -= 1
        neg = lo < 0
        mag = -lo if neg else lo
        intpart, frac = divmod(mag, scale)
        body = f"{intpart}.{frac:0{digits}d}" if digits > 0 else f"{intpart}"
        return ("-" + body) if neg else body


def _qext_scaled_ge(v: QExt, scale: int, m: int) -> bool:
    """Exact test  v*scale >= m."""
    return qext_sign(QExt(v.a * scale - m, v.b * scale)) >= 0


def qext_sign(v: QExt) -> int:
    """Exact sign of a + b*sqrt(3): -1, 0, or +1.

    Uses the algebraic rule equivalent to bracketing sqrt(3) by rationals:
    when a and b have opposite signs the sign equals
    sign(b)*sign(3*b^2 - a^2).
    """
    a, b = v.a, v.b
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sa == 0 and sb == 0:
        return 0
    if sa >= 0 and sb >= 0:
        return 1
    if sa <= 0 and sb <= 0:
        return -1
    d = 3 * b * b - a * a
    sd = (d > 0) - (d < 0)
    # d = 0 would make sqrt(3) rational, impossible for a, b != 0
    return sb * sd


ZERO = QExt(0, 0)
ONE = QExt(1, 0)
SQRT3 = QExt(0, 1)


def qext_pow_sqrt3(exponent_doubled: int) -> QExt:
    """Exact value of 3**(exponent_doubled/2) for a non-negative half-integer
    exponent given as twice its value."""
    if exponent_doubled < 0:
        raise ValueError("negative sqrt(3) powers not needed here")
    half, odd = divmod(exponent_doubled, 2)
    base = Fraction(3) ** half
    return QExt(0, base) if odd else QExt(base, 0)


@dataclass
class NotPSD:
    """Witness that an LDL^T run failed: the first violating pivot.

    ``sign`` is -1 for a negative pivot and 0 for a zero pivot whose
    residual column is not identically zero.
    """

    pivot: int
    sign: int

    def __bool__(self):  # pragma: no cover - guard against truthiness misuse
        raise TypeError("NotPSD is a failure witness, not a boolean")


class SymMatrixQ:
    """Symmetric matrix over Q(sqrt(3)); only the lower triangle is stored."""

    __slots__ = ("dim", "_rows")

    def __init__(self, dim: int, rows: Iterable[Iterable[QExt]] | None = None):
        if dim < 0:
            raise ValueError("dimension must be non-negative")
        self.dim = dim
        if rows is None:
            self._rows = [[ZERO] * (i + 1) for i in range(dim)]
        else:
            self._rows = [[_as_qext(x) for x in row] for row in rows]
            if len(self._rows) != dim or any(len(r) != i + 1 for i, r in enumerate(self._rows)):
                raise ValueError("rows must form a lower triangle matching the dimension")

    @classmethod
    def from_dense(cls, entries) -> "SymMatrixQ":
        n = len(entries)
        m = cls(n)
        for i in range(n):
            if len(entries[i]) != n:
                raise ValueError("dense input must be square")
            for j in range(i + 1):
                if _as_qext(entries[i][j]) != _as_qext(entries[j][i]):
                    raise ValueError(f"input not symmetric at ({i},{j})")
                m.set(i, j, entries[i][j])
        return m

    def get(self, i: int, j: int) -> QExt:
        if j > i:
            i, j = j, i
        return self._rows[i][j]

    def set(self, i: int, j: int, value) -> None:
        if j > i:
            i, j = j, i
        self._rows[i][j] = _as_qext(value)

    def lower_rows(self) -> list[list[QExt]]:
        return [list(r) for r in self._rows]

    def __eq__(self, other):
        return (
            isinstance(other, SymMatrixQ)
            and self.dim == other.dim
            and self._rows == other._rows
        )

    def __repr__(self):
        return f"SymMatrixQ(dim={self.dim})"

    def add_scaled(self, i: int, j: int, coeff: QExt) -> None:
        if j > i:
            i, j = j, i
        self._rows[i][j] = self._rows[i][j] + coeff


def _as_qext(x) -> QExt:
    if isinstance(x, QExt):
        return x
    if isinstance(x, (int, Fraction)):
        return QExt(x, 0)
    raise TypeError(f"cannot interpret {x!r} as an element of Q(sqrt(3))")


def ldlt_decompose(m: SymMatrixQ):
    """Exact LDL^T without pivoting.

    Returns ``(D, L)`` with ``m == L*diag(D)*L^T`` and every entry of D
    non-negative, or a :class:`NotPSD` witness.  A zero pivot is accepted
    only when the remainder of its column vanishes, which is the correct
    semidefinite criterion for symmetric matrices.
    """
    n = m.dim
    d: list[QExt] = [ZERO] * n
    low = [[ZERO] * n for _ in range(n)]
    for j in range(n):
        acc = m.get(j, j)
        for k in range(j):
            if d[k].is_zero():
                continue
            acc = acc - low[j][k] * low[j][k] * d[k]
        sign = qext_sign(acc)
        if sign < 0:
            return NotPSD(pivot=j, sign=-1)
        d[j] = acc
        low[j][j] = ONE
        if sign == 0:
            for i in range(j + 1, n):
                off = m.get(i, j)
                for k in range(j):
                    if d[k].is_zero():
                        continue
                    off = off - low[i][k] * low[j][k] * d[k]
                if not off.is_zero():
                    return NotPSD(pivot=j, sign=0)
                low[i][j] = ZERO
        else:
            inv = acc.inverse()
            for i in range(j + 1, n):
                off = m.get(i, j)
                for k in range(j):
                    if d[k].is_zero():
                        continue
                    off = off - low[i][k] * low[j][k] * d[k]
                low[i][j] = off * inv
    l_rows = [[low[i][j] for j in range(i + 1)] for i in range(n)]
    return d, l_rows


def is_psd(m: SymMatrixQ) -> bool:
    """Exact positive-semidefiniteness decision via LDL^T."""
    return not isinstance(ldlt_decompose(m), NotPSD)


def ldlt_reconstruct(d: list[QExt], l_rows: list[list[QExt]]) -> SymMatrixQ:
    """Recompose L*diag(D)*L^T (used to assert exactness in tests)."""
    n = len(d)
    out = SymMatrixQ(n)
    for i in range(n):
        for j in range(i + 1):
            acc = ZERO
            for k in range(j + 1):
                acc = acc + l_rows[i][k] * l_rows[j][k] * d[k]
            out.set(i, j, acc)
    return out
