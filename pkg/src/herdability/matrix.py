"""Exact rational dense matrices and controllability-matrix constructions.

Every entry is a :class:`fractions.Fraction`; zero and sign tests are exact.
Vectors are plain tuples of fractions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Vector = tuple  # tuple[Fraction, ...]

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")


class InvalidInputError(ValueError):
    """Raised on dimension mismatches and malformed operands."""


def to_rational(value) -> Fraction:
    """Convert an int, Fraction or "p/q" string to a Fraction.

    Floats and decimal strings are rejected: they would silently carry
    binary rounding into sign tests.
    """
    if isinstance(value, bool):
        raise InvalidInputError(f"booleans are not rationals: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        if not _RATIONAL_RE.match(value):
            raise InvalidInputError(f"not an exact rational: {value!r}")
        num, _, den = value.replace(" ", "").partition("/")
        if den and int(den) == 0:
            raise InvalidInputError(f"zero denominator: {value!r}")
        return Fraction(int(num), int(den) if den else 1)
    raise InvalidInputError(f"unsupported entry type {type(value).__name__}: {value!r}")


def rational_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def sign(x) -> int:
    return (x > 0) - (x < 0)


def vec(values: Iterable) -> Vector:
    return tuple(to_rational(v) for v in values)


class RationalMatrix:
    """Immutable dense matrix of exact rationals."""

    __slots__ = ("_rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(to_rational(x) for x in row) for row in rows)
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise InvalidInputError("ragged rows")
            if ncols is not None and ncols != width:
                raise InvalidInputError("declared column count does not match rows")
        else:
            width = ncols or 0
        self._rows = data
        self.nrows = len(data)
        self.ncols = width
        self._hash = None

    @classmethod
    def _raw(cls, rows: tuple, nrows: int, ncols: int) -> "RationalMatrix":
        m = cls.__new__(cls)
        m._rows = rows
        m.nrows = nrows
        m.ncols = ncols
        m._hash = None
        return m

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        z = Fraction(0)
        return cls._raw(tuple((z,) * ncols for _ in range(nrows)), nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        one, z = Fraction(1), Fraction(0)
        return cls._raw(tuple(tuple(one if i == j else z for j in range(n)) for i in range(n)), n, n)

    @classmethod
    def diag(cls, values: Iterable) -> "RationalMatrix":
        vals = vec(values)
        n = len(vals)
        z = Fraction(0)
        return cls._raw(tuple(tuple(vals[i] if i == j else z for j in range(n)) for i in range(n)), n, n)

    @classmethod
    def column_vector(cls, values: Iterable) -> "RationalMatrix":
        return cls([[v] for v in values], ncols=1)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int | None = None) -> "RationalMatrix":
        if not columns:
            return cls.zeros(nrows or 0, 0)
        return cls(zip(*columns)) if len(columns[0]) else cls.zeros(0, len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def rows(self) -> tuple:
        return self._rows

    @property
    def entries(self) -> tuple:
        return tuple(x for r in self._rows for x in r)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> Vector:
        return self._rows[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, self._rows))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(rational_str(x) for x in r) for r in self._rows)
        return f"RationalMatrix({self.nrows}x{self.ncols}: [{body}])"

    def transpose(self) -> "RationalMatrix":
        if self.nrows == 0:
            return RationalMatrix.zeros(self.ncols, 0)
        return RationalMatrix._raw(tuple(zip(*self._rows)), self.ncols, self.nrows)

    T = property(transpose)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise InvalidInputError(f"cannot multiply {self.shape} by {other.shape}")
        cols = tuple(zip(*other._rows)) if other.nrows else tuple(() for _ in range(other.ncols))
        out = tuple(
            tuple(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)) for c in cols)
            for r in self._rows
        )
        return RationalMatrix._raw(out, self.nrows, other.ncols)

    def matvec(self, v: Sequence) -> Vector:
        if len(v) != self.ncols:
            raise InvalidInputError(f"vector of length {len(v)} for {self.shape} matrix")
        return tuple(sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)) for r in self._rows)

    def vecmat(self, y: Sequence) -> Vector:
        """Row vector times matrix, ``yᵀ M``."""
        if len(y) != self.nrows:
            raise InvalidInputError(f"vector of length {len(y)} for {self.shape} matrix")
        out = [Fraction(0)] * self.ncols
        for yi, r in zip(y, self._rows):
            if yi:
                for j, a in enumerate(r):
                    if a:
                        out[j] += yi * a
        return tuple(out)

    def _elementwise(self, other: "RationalMatrix", op) -> "RationalMatrix":
        if self.shape != other.shape:
            raise InvalidInputError(f"shape mismatch {self.shape} vs {other.shape}")
        return RationalMatrix._raw(
            tuple(tuple(op(a, b) for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)),
            self.nrows, self.ncols,
        )

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self._elementwise(other, lambda a, b: a + b)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self._elementwise(other, lambda a, b: a - b)

    def __neg__(self) -> "RationalMatrix":
        return self.scale(-1)

    def scale(self, c) -> "RationalMatrix":
        c = to_rational(c)
        return RationalMatrix._raw(tuple(tuple(c * x for x in r) for r in self._rows), self.nrows, self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix._raw(
            tuple(tuple(self._rows[i][j] for j in cols) for i in rows), len(rows), len(cols)
        )

    def hstack(self, *others: "RationalMatrix") -> "RationalMatrix":
        mats = (self,) + others
        if any(m.nrows != self.nrows for m in mats):
            raise InvalidInputError("hstack needs equal row counts")
        rows = tuple(tuple(x for m in mats for x in m._rows[i]) for i in range(self.nrows))
        return RationalMatrix._raw(rows, self.nrows, sum(m.ncols for m in mats))

    def vstack(self, *others: "RationalMatrix") -> "RationalMatrix":
        mats = (self,) + others
        if any(m.ncols != self.ncols for m in mats):
            raise InvalidInputError("vstack needs equal column counts")
        return RationalMatrix._raw(tuple(r for m in mats for r in m._rows), sum(m.nrows for m in mats), self.ncols)

    def is_zero(self) -> bool:
        return not any(x for r in self._rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_diagonal(self) -> bool:
        return self.is_square() and all(
            not x for i, r in enumerate(self._rows) for j, x in enumerate(r) if i != j
        )

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self._rows[i][j] == self._rows[j][i] for i in range(self.nrows) for j in range(i)
        )

    def to_strings(self) -> list[list[str]]:
        return [[rational_str(x) for x in r] for r in self._rows]


def _integer_rows(M: RationalMatrix) -> list[list[int]]:
    """Rows scaled by their denominators' lcm; row scaling preserves rank."""
    out = []
    for r in M.rows:
        den = 1
        for x in r:
            den = den * x.denominator // _gcd(den, x.denominator)
        out.append([int(x * den) for x in r])
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def rank(M: RationalMatrix) -> int:
    """Exact rank by fraction-free (Bareiss) elimination over the integers."""
    a = _integer_rows(M)
    nrows, ncols = M.shape
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, nrows):
            f = a[i][c]
            row_i, row_r = a[i], a[r]
            for j in range(c, ncols):
                row_i[j] = (p * row_i[j] - f * row_r[j]) // prev
        prev = p
        r += 1
    return r


def pivot_columns(M: RationalMatrix) -> list[int]:
    """Indices of the leftmost maximal set of linearly independent columns."""
    a = [list(r) for r in M.rows]
    nrows, ncols = M.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, nrows):
            f = a[i][c]
            if f:
                q = f / p
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return pivots


def solve(M: RationalMatrix, b: Sequence) -> Vector:
    """Solve the square nonsingular system ``M x = b`` exactly."""
    n = M.nrows
    if not M.is_square() or len(b) != n:
        raise InvalidInputError("solve needs a square matrix and matching right-hand side")
    a = [list(r) + [to_rational(bi)] for r, bi in zip(M.rows, b)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            raise InvalidInputError("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        p = a[c][c]
        a[c] = [x / p for x in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return tuple(r[n] for r in a)


def inverse(M: RationalMatrix) -> RationalMatrix:
    n = M.nrows
    cols = [solve(M, [Fraction(int(i == j)) for i in range(n)]) for j in range(n)]
    return RationalMatrix.from_columns(cols, nrows=n)


def is_selection_matrix(B: RationalMatrix) -> bool:
    """True iff the columns of B are distinct canonical vectors."""
    seen = set()
    for col in B.columns():
        nz = [i for i, x in enumerate(col) if x]
        if len(nz) != 1 or col[nz[0]] != 1 or nz[0] in seen:
            return False
        seen.add(nz[0])
    return B.ncols > 0


def selection_matrix(n: int, leaders: Iterable[int]) -> RationalMatrix:
    """n x m selection matrix whose columns are e_l for the given 0-based leaders."""
    leaders = list(leaders)
    if not leaders:
        raise InvalidInputError("leader set is empty")
    if len(set(leaders)) != len(leaders):
        raise InvalidInputError(f"duplicate leaders: {leaders}")
    for l in leaders:
        if not 0 <= l < n:
            raise InvalidInputError(f"leader {l} out of range for n={n}")
    one, z = Fraction(1), Fraction(0)
    return RationalMatrix._raw(
        tuple(tuple(one if i == l else z for l in leaders) for i in range(n)), n, len(leaders)
    )


@dataclass(frozen=True)
class SystemPair:
    """A pair (A, B) with A square and B having as many rows as A.

    ``leaders`` is filled in automatically when B is a selection matrix
    (0-based row indices, in B's column order).  Reduced pairs may have
    zero states or more inputs than states.
    """

    A: RationalMatrix
    B: RationalMatrix
    meta: Mapping = field(default_factory=dict, compare=False)
    leaders: tuple | None = field(default=None, init=False)

    def __post_init__(self):
        if not self.A.is_square():
            raise InvalidInputError(f"A must be square, got {self.A.shape}")
        if self.B.nrows != self.A.nrows:
            raise InvalidInputError(f"B has {self.B.nrows} rows, A is {self.A.nrows}x{self.A.ncols}")
        if self.B.ncols < 1:
            raise InvalidInputError("B needs at least one column")
        if is_selection_matrix(self.B):
            lead = tuple(next(i for i, x in enumerate(c) if x) for c in self.B.columns())
            object.__setattr__(self, "leaders", lead)

    @classmethod
    def with_leaders(cls, A: RationalMatrix, leaders: Iterable[int], meta: Mapping | None = None) -> "SystemPair":
        """Pair with B built from 0-based leaders, columns in ascending index order."""
        return cls(A, selection_matrix(A.nrows, sorted(leaders)), meta or {})

    @property
    def n(self) -> int:
        return self.A.nrows

    @property
    def m(self) -> int:
        return self.B.ncols


def matrix_power_column(A: RationalMatrix, B: RationalMatrix, k: int) -> RationalMatrix:
    """A^k B by k successive left multiplications."""
    if k < 0:
        raise InvalidInputError("k must be nonnegative")
    if not A.is_square() or A.ncols != B.nrows:
        raise InvalidInputError(f"incompatible shapes {A.shape} and {B.shape}")
    out = B
    for _ in range(k):
        out = A @ out
    return out


def controllability_blocks(pair: SystemPair) -> list[RationalMatrix]:
    blocks = []
    block = pair.B
    for _ in range(pair.n):
        blocks.append(block)
        block = pair.A @ block
    return blocks


def controllability_matrix(pair: SystemPair) -> RationalMatrix:
    """[B | AB | ... | A^(n-1) B], blocks in ascending power order."""
    blocks = controllability_blocks(pair)
    if not blocks:
        return RationalMatrix.zeros(0, 0)
    return blocks[0].hstack(*blocks[1:])
