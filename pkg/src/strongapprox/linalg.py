"""Dense exact linear algebra over Q and Z.

Rational matrices are immutable QMat objects (tuples of Fractions); integer
matrices are plain lists of lists of int.  Determinants and ranks of integer
matrices go through Bareiss fraction-free elimination, which keeps
intermediate entries at minor size (Hadamard-bounded) instead of exploding
the way naive fraction arithmetic does.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "QMat",
    "qmat",
    "identity",
    "kron",
    "flatten",
    "integerize",
    "imat_mul",
    "imat_identity",
    "det_bareiss",
    "rank_int",
    "right_nullspace_int",
    "left_nullspace_int",
    "full_rank_minor",
    "primitive_vector",
    "IntEchelon",
]


class QMat:
    """Immutable dense matrix over Q."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[Fraction]]):
        self.rows = tuple(tuple(Fraction(x) for x in r) for r in rows)
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged matrix")

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def identity(n: int) -> "QMat":
        one, zero = Fraction(1), Fraction(0)
        return QMat([[one if i == j else zero for j in range(n)] for i in range(n)])

    @staticmethod
    def zero(n: int, m: int | None = None) -> "QMat":
        m = n if m is None else m
        z = Fraction(0)
        return QMat([[z] * m for _ in range(n)])

    # -- arithmetic ------------------------------------------------------------

    def __mul__(self, other: "QMat") -> "QMat":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        bt = list(zip(*other.rows))
        return QMat(
            [[_dot(r, c) for c in bt] for r in self.rows]
        )

    def __add__(self, other: "QMat") -> "QMat":
        return QMat(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)]
        )

    def __sub__(self, other: "QMat") -> "QMat":
        return QMat(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)]
        )

    def __neg__(self) -> "QMat":
        return QMat([[-a for a in r] for r in self.rows])

    def scale(self, c) -> "QMat":
        c = Fraction(c)
        return QMat([[c * a for a in r] for r in self.rows])

    def __pow__(self, e: int) -> "QMat":
        if self.nrows != self.ncols:
            raise ValueError("power of non-square matrix")
        if e < 0:
            return self.inv() ** (-e)
        result = QMat.identity(self.nrows)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, QMat) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> "QMat":
        return QMat(list(zip(*self.rows)))

    def trace(self) -> Fraction:
        return sum((self.rows[i][i] for i in range(self.nrows)), Fraction(0))

    def is_identity(self) -> bool:
        return all(
            self.rows[i][j] == (1 if i == j else 0)
            for i in range(self.nrows)
            for j in range(self.ncols)
        )

    def is_scalar(self) -> bool:
        if self.nrows != self.ncols:
            return False
        c = self.rows[0][0]
        return all(
            self.rows[i][j] == (c if i == j else 0)
            for i in range(self.nrows)
            for j in range(self.ncols)
        )

    def inv(self) -> "QMat":
        """Exact inverse by Gauss-Jordan elimination."""
        n = self.nrows
        if n != self.ncols:
            raise ValueError("inverse of non-square matrix")
        a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
            if piv is None:
                raise ValueError("singular matrix")
            a[col], a[piv] = a[piv], a[col]
            inv_p = 1 / a[col][col]
            a[col] = [x * inv_p for x in a[col]]
            for r in range(n):
                if r != col and a[r][col] != 0:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return QMat([r[n:] for r in a])

    def det(self) -> Fraction:
        """Exact determinant (clears denominators, then Bareiss)."""
        if self.nrows != self.ncols:
            raise ValueError("determinant of non-square matrix")
        imat, den = integerize(self)
        return Fraction(det_bareiss(imat), den**self.nrows)

    def rank(self) -> int:
        imat, _ = integerize(self)
        return rank_int(imat)

    def denominator_lcm(self) -> int:
        d = 1
        for r in self.rows:
            for x in r:
                d = d * x.denominator // math.gcd(d, x.denominator)
        return d

    def __repr__(self) -> str:
        return f"QMat({[list(map(str, r)) for r in self.rows]})"


def _dot(r: Sequence[Fraction], c: Sequence[Fraction]) -> Fraction:
    s = Fraction(0)
    for a, b in zip(r, c):
        if a and b:
            s += a * b
    return s


def qmat(rows) -> QMat:
    return QMat(rows)


def identity(n: int) -> QMat:
    return QMat.identity(n)


# -- Kronecker products and flattening ----------------------------------------


def kron(a: QMat, b: QMat) -> QMat:
    """Kronecker product; kron(A,B) * kron(C,D) == kron(AC, BD)."""
    rows = []
    for i in range(a.nrows):
        for k in range(b.nrows):
            rows.append(
                [a.rows[i][j] * b.rows[k][l] for j in range(a.ncols) for l in range(b.ncols)]
            )
    return QMat(rows)


def flatten(m: QMat) -> tuple:
    """Row-major flattening of a matrix to a vector of length nrows*ncols."""
    return tuple(x for r in m.rows for x in r)


def integerize(m: QMat) -> tuple[list[list[int]], int]:
    """Clear denominators: returns (d*M as int rows, d) with d = lcm of denominators."""
    d = m.denominator_lcm()
    rows = [[int(x * d) for x in r] for r in m.rows]
    return rows, d


# -- integer matrix kernels ----------------------------------------------------


def imat_identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def imat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]


def det_bareiss(mat: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix, fraction-free."""
    n = len(mat)
    if n == 0:
        return 1
    if any(len(r) != n for r in mat):
        raise ValueError("determinant of non-square matrix")
    a = [list(r) for r in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def _bareiss_echelon(mat: Sequence[Sequence[int]]):
    """Fraction-free row echelon; returns (rows, pivot (row,col) pairs, sign).

    Column pivoting is by first nonzero entry; the returned pivot list maps
    echelon rows back to original row indices.
    """
    a = [list(r) for r in mat]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    orig = list(range(nr))
    sign = 1
    pivots = []  # (echelon_row, col)
    r = 0
    prev = 1
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            orig[r], orig[piv] = orig[piv], orig[r]
            sign = -sign
        arc = a[r][c]
        for i in range(r + 1, nr):
            aic = a[i][c]
            row_i = a[i]
            row_r = a[r]
            for j in range(c + 1, nc):
                row_i[j] = (row_i[j] * arc - aic * row_r[j]) // prev
            row_i[c] = 0
        prev = arc
        pivots.append((r, c))
        r += 1
        if r == nr:
            break
    return a, pivots, orig, sign


def rank_int(mat: Sequence[Sequence[int]]) -> int:
    if not mat:
        return 0
    _, pivots, _, _ = _bareiss_echelon(mat)
    return len(pivots)


def full_rank_minor(mat: Sequence[Sequence[int]], r: int) -> tuple[list[int], list[int]]:
    """Row and column index sets of an r x r submatrix with nonzero determinant.

    Found by pivot tracking during fraction-free elimination.  Raises
    ValueError when rank(mat) < r.
    """
    _, pivots, orig, _ = _bareiss_echelon(mat)
    if len(pivots) < r:
        raise ValueError("insufficient rank")
    rows = sorted(orig[i] for i, _ in pivots[:r])
    cols = sorted(c for _, c in pivots[:r])
    return rows, cols


def primitive_vector(vec: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector.

    Content 1, first nonzero entry positive; this makes nullspace output
    unique up to nothing (well-defined), so downstream determinants built
    from nullspace vectors are reproducible up to sign.
    """
    fracs = [Fraction(x) for x in vec]
    den = 1
    for x in fracs:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in fracs]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        return tuple(ints)
    ints = [x // g for x in ints]
    lead = next((x for x in ints if x != 0), 1)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def _rref_fraction(mat: Sequence[Sequence[int]]):
    """Reduced row echelon form over Q from integer input; returns (rows, pivots)."""
    a = [[Fraction(x) for x in r] for r in mat]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv_p = 1 / a[r][c]
        a[r] = [x * inv_p for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return a, pivots


def right_nullspace_int(mat: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Basis of {v : M v^T = 0}, as primitive integer vectors."""
    if not mat:
        return []
    a, pivots = _rref_fraction(mat)
    nc = len(mat[0])
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * nc
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -a[i][f]
        basis.append(primitive_vector(v))
    return basis


def left_nullspace_int(mat: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Basis of {w : w M = 0}; equals right_nullspace of the transpose."""
    return right_nullspace_int(list(map(list, zip(*mat))))


class IntEchelon:
    """Incremental exact echelon over Q for integer vectors.

    Used by spinning loops: vectors are added one at a time and reduced
    against the current basis; ``add`` reports whether the vector enlarged
    the span.  Internally rows are kept reduced with Fraction arithmetic
    but stored over Z (primitive) to keep entries small.
    """

    def __init__(self, width: int):
        self.width = width
        self.rows: list[tuple[int, ...]] = []
        self.pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Sequence[int]) -> list[Fraction]:
        v = [Fraction(x) for x in vec]
        for row, p in zip(self.rows, self.pivots):
            if v[p]:
                f = v[p] / row[p]
                v = [a - f * b for a, b in zip(v, row)]
        return v

    def contains(self, vec: Sequence[int]) -> bool:
        return not any(self.reduce(vec))

    def add(self, vec: Sequence[int]) -> bool:
        v = self.reduce(vec)
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            return False
        prim = primitive_vector(v)
        # keep existing rows reduced against the new pivot
        new_rows = []
        for row, p in zip(self.rows, self.pivots):
            if row[piv]:
                f = Fraction(row[piv], prim[piv])
                new_rows.append(primitive_vector([a - f * b for a, b in zip(row, prim)]))
            else:
                new_rows.append(row)
        new_rows.append(prim)
        self.rows = new_rows
        self.pivots.append(piv)
        return True
