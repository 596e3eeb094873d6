"""Immutable dense matrices over Q backed by the exact elimination kernels."""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Sequence

from mellingamma import kernels

_ZERO = Fraction(0)
_ONE = Fraction(1)


class QMatrix:
    """A rectangular matrix of Fractions.

    Rows are stored as tuples; instances are hashable and never mutated.
    """

    __slots__ = ("rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(Fraction(x) for x in r) for r in rows)
        if ncols is None:
            if not data:
                raise ValueError("cannot infer column count of an empty matrix")
            ncols = len(data[0])
        for r in data:
            if len(r) != ncols:
                raise ValueError("matrix is not rectangular")
        self.rows = data
        self.nrows = len(data)
        self.ncols = ncols
        self._hash = None

    @classmethod
    def _wrap(cls, data: tuple, ncols: int) -> "QMatrix":
        """Trusted constructor: ``data`` is already a tuple of Fraction tuples."""
        obj = cls.__new__(cls)
        obj.rows = data
        obj.nrows = len(data)
        obj.ncols = ncols
        obj._hash = None
        return obj

    # construction helpers
    @classmethod
    def zeros(cls, m: int, n: int) -> "QMatrix":
        return cls(((_ZERO,) * n for _ in range(m)), n)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(((_ONE if i == j else _ZERO for j in range(n)) for i in range(n)), n)

    @classmethod
    def scalar(cls, n: int, q) -> "QMatrix":
        q = Fraction(q)
        return cls(((q if i == j else _ZERO for j in range(n)) for i in range(n)), n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "QMatrix":
        return cls((tuple(c[i] for c in cols) for i in range(nrows)), len(cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> "QMatrix":
        if not self.nrows:
            return QMatrix.zeros(self.ncols, 0)
        return QMatrix(zip(*self.rows), self.nrows)

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nrows, self.ncols, self.rows))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"QMatrix([{body}])"

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._same_shape(other)
        return QMatrix._wrap(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.ncols)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._same_shape(other)
        return QMatrix._wrap(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.ncols)

    def __neg__(self) -> "QMatrix":
        return QMatrix._wrap(tuple(tuple(-a for a in r) for r in self.rows), self.ncols)

    def scale(self, q) -> "QMatrix":
        q = Fraction(q)
        return QMatrix._wrap(tuple(tuple(q * a for a in r) for r in self.rows), self.ncols)

    def __rmul__(self, q) -> "QMatrix":
        return self.scale(q)

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            n = other.ncols
            orows = other.rows
            # sparse row accumulation: most operators here are very sparse
            sparse = [[(j, b) for j, b in enumerate(r) if b] for r in orows]
            out = []
            for r in self.rows:
                acc = [_ZERO] * n
                for k, a in enumerate(r):
                    if a:
                        for j, b in sparse[k]:
                            acc[j] += a * b
                out.append(tuple(acc))
            return QMatrix._wrap(tuple(out), n)
        vec = tuple(other)
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(sum((a * b for a, b in zip(r, vec) if a and b), _ZERO) for r in self.rows)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def kron(self, other: "QMatrix") -> "QMatrix":
        rows = []
        for r in self.rows:
            for s in other.rows:
                rows.append(tuple(a * b for a in r for b in s))
        return QMatrix(rows, self.ncols * other.ncols)

    def hstack(self, other: "QMatrix") -> "QMatrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return QMatrix((r + s for r, s in zip(self.rows, other.rows)), self.ncols + other.ncols)

    def vstack(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return QMatrix(self.rows + other.rows, self.ncols)

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> "QMatrix":
        return QMatrix((tuple(self.rows[i][j] for j in cols) for i in rows), len(cols))

    def power(self, k: int) -> "QMatrix":
        if not self.is_square():
            raise ValueError("power of a non-square matrix")
        out = QMatrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def rank(self) -> int:
        return rank(self)

    def det(self) -> Fraction:
        return det(self)

    def inverse(self) -> "QMatrix":
        return inverse(self)

    def is_nilpotent(self) -> bool:
        return self.is_square() and self.power(self.nrows).is_zero()

    def to_strings(self) -> list[list[str]]:
        from mellingamma.exactalg.rational import format_rational

        return [[format_rational(x) for x in r] for r in self.rows]

    @classmethod
    def from_strings(cls, data, ncols: int | None = None) -> "QMatrix":
        from mellingamma.exactalg.rational import parse_rational

        return cls(([parse_rational(x) for x in r] for r in data), ncols)


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    out = []
    for r in rows:
        den = reduce(lcm, (x.denominator for x in r), 1)
        out.append([int(x * den) for x in r])
    return out


def rref(m: QMatrix) -> tuple[QMatrix, list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    if m.nrows == 0 or m.ncols == 0:
        return QMatrix.zeros(0, m.ncols), []
    red, pivots = kernels.rref_int(_integer_rows(m.rows), m.ncols)
    rows = []
    for row, c in zip(red, pivots):
        p = row[c]
        rows.append(tuple(Fraction(x, p) for x in row))
    return QMatrix(rows, m.ncols), pivots


def rank(m: QMatrix) -> int:
    if m.nrows == 0 or m.ncols == 0:
        return 0
    # fewer rows makes the dense kernel cheaper
    if m.ncols < m.nrows:
        m = m.T
    return len(kernels.rref_int(_integer_rows(m.rows), m.ncols)[1])


def kernel(m: QMatrix) -> list[tuple[Fraction, ...]]:
    """A basis of the right nullspace, one vector per free column."""
    n = m.ncols
    r, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = [_ZERO] * n
        v[free] = _ONE
        for row, c in zip(r.rows, pivots):
            v[c] = -row[free]
        basis.append(tuple(v))
    return basis


def solve(m: QMatrix, rhs: Sequence) -> tuple[Fraction, ...] | None:
    """One solution of ``m x = rhs``, or None when the system is inconsistent."""
    rhs = [Fraction(x) for x in rhs]
    if len(rhs) != m.nrows:
        raise ValueError("right-hand side length mismatch")
    aug = QMatrix((r + (b,) for r, b in zip(m.rows, rhs)), m.ncols + 1)
    r, pivots = rref(aug)
    if pivots and pivots[-1] == m.ncols:
        return None
    x = [_ZERO] * m.ncols
    for row, c in zip(r.rows, pivots):
        x[c] = row[-1]
    return tuple(x)


def det(m: QMatrix) -> Fraction:
    if not m.is_square():
        raise ValueError("determinant of a non-square matrix")
    n = m.nrows
    if n == 0:
        return _ONE
    a = [list(r) for r in m.rows]
    d = _ONE
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return _ZERO
        if p != c:
            a[p], a[c] = a[c], a[p]
            d = -d
        piv = a[c][c]
        d *= piv
        for i in range(c + 1, n):
            f = a[i][c]
            if f:
                f /= piv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


class SingularMatrixError(ArithmeticError):
    pass


def inverse(m: QMatrix) -> QMatrix:
    if not m.is_square():
        raise ValueError("inverse of a non-square matrix")
    n = m.nrows
    aug = m.hstack(QMatrix.identity(n))
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise SingularMatrixError("matrix is singular")
    return r.block(range(n), range(n, 2 * n))


def span_basis(vectors: Sequence[Sequence], dim: int) -> list[tuple[Fraction, ...]]:
    """A reduced basis of the span of ``vectors`` in Q^dim."""
    if not vectors:
        return []
    r, _ = rref(QMatrix(vectors, dim))
    return list(r.rows)
