"""Exact dense linear algebra over a prime field GF(p).

Everything downstream (algebras, modules, functors) reduces to the four
operations in this module: row reduction, linear solving, kernels and
quotients.  Matrices are immutable, entries are plain ints in [0, p),
vectors are columns, and a map with source dimension s and target
dimension t is a t x s matrix.  All outputs are deterministic functions
of the input bytes; free variables in solves are pinned to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


class DimensionMismatch(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class FpMatrix:
    """Immutable dense matrix over GF(p).

    0 x n and n x 0 matrices are legal; `cols` must be passed when the
    row list is empty.
    """

    __slots__ = ("p", "rows", "cols", "entries")

    def __init__(self, p: int, entries: Iterable[Sequence[int]], cols: Optional[int] = None):
        if not _is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        rows = tuple(tuple(int(x) % p for x in row) for row in entries)
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise DimensionMismatch("ragged rows")
            if cols is not None and cols != ncols:
                raise DimensionMismatch("cols argument disagrees with row width")
        else:
            if cols is None:
                raise DimensionMismatch("empty matrix needs an explicit column count")
            ncols = cols
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", ncols)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("FpMatrix is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zeros(p: int, rows: int, cols: int) -> "FpMatrix":
        return FpMatrix(p, [[0] * cols for _ in range(rows)], cols=cols)

    @staticmethod
    def identity(p: int, n: int) -> "FpMatrix":
        return FpMatrix(p, [[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @staticmethod
    def from_rows(p: int, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "FpMatrix":
        return FpMatrix(p, rows, cols=cols)

    @staticmethod
    def column(p: int, vec: Sequence[int]) -> "FpMatrix":
        return FpMatrix(p, [[int(x)] for x in vec], cols=1)

    # -- basic access ----------------------------------------------------

    def entry(self, i: int, j: int) -> int:
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    def to_lists(self) -> list:
        return [list(r) for r in self.entries]

    def is_zero(self) -> bool:
        return all(all(x == 0 for x in r) for r in self.entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FpMatrix)
            and self.p == other.p
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.p, self.cols, self.entries))

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, {self.rows}x{self.cols}, {list(self.entries)})"

    # -- arithmetic -------------------------------------------------------

    def _check_same_shape(self, other: "FpMatrix"):
        if self.p != other.p or self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch("shape or modulus mismatch")

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        self._check_same_shape(other)
        p = self.p
        return FpMatrix(
            p,
            [[(a + b) % p for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            cols=self.cols,
        )

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        self._check_same_shape(other)
        p = self.p
        return FpMatrix(
            p,
            [[(a - b) % p for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            cols=self.cols,
        )

    def __neg__(self) -> "FpMatrix":
        p = self.p
        return FpMatrix(p, [[(-a) % p for a in r] for r in self.entries], cols=self.cols)

    def scale(self, c: int) -> "FpMatrix":
        p = self.p
        c %= p
        return FpMatrix(p, [[(c * a) % p for a in r] for r in self.entries], cols=self.cols)

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        if self.p != other.p:
            raise DimensionMismatch("modulus mismatch")
        if self.cols != other.rows:
            raise DimensionMismatch(f"inner dimensions {self.cols} and {other.rows} disagree")
        p = self.p
        if self.rows == 0 or other.cols == 0:
            return FpMatrix.zeros(p, self.rows, other.cols)
        ocols = tuple(zip(*other.entries)) if other.entries else ()
        out = []
        for r in self.entries:
            nz = [(j, a) for j, a in enumerate(r) if a]
            row = [0] * other.cols
            for j, a in nz:
                orow = other.entries[j]
                if a == 1:
                    row = [(x + y) % p for x, y in zip(row, orow)]
                else:
                    row = [(x + a * y) % p for x, y in zip(row, orow)]
            out.append(row)
        return FpMatrix(p, out, cols=other.cols)

    def transpose(self) -> "FpMatrix":
        if self.rows == 0:
            return FpMatrix.zeros(self.p, self.cols, 0)
        return FpMatrix(self.p, list(zip(*self.entries)), cols=self.rows)

    def kron(self, other: "FpMatrix") -> "FpMatrix":
        """Kronecker product; index (i, k) major in self."""
        if self.p != other.p:
            raise DimensionMismatch("modulus mismatch")
        p = self.p
        out = []
        for r1 in self.entries:
            for r2 in other.entries:
                out.append([(a * b) % p for a in r1 for b in r2])
        return FpMatrix(p, out, cols=self.cols * other.cols)

    def submatrix_cols(self, start: int, stop: int) -> "FpMatrix":
        return FpMatrix(self.p, [r[start:stop] for r in self.entries], cols=stop - start)

    def rank(self) -> int:
        return row_reduce(self)[0]


def hstack(a: FpMatrix, b: FpMatrix) -> FpMatrix:
    if a.p != b.p or a.rows != b.rows:
        raise DimensionMismatch("hstack mismatch")
    return FpMatrix(a.p, [ra + rb for ra, rb in zip(a.entries, b.entries)], cols=a.cols + b.cols)


def vstack(a: FpMatrix, b: FpMatrix) -> FpMatrix:
    if a.p != b.p or a.cols != b.cols:
        raise DimensionMismatch("vstack mismatch")
    return FpMatrix(a.p, list(a.entries) + list(b.entries), cols=a.cols)


def block_diag(p: int, blocks: Sequence[FpMatrix]) -> FpMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i, row in enumerate(b.entries):
            for j, x in enumerate(row):
                out[r0 + i][c0 + j] = x
        r0 += b.rows
        c0 += b.cols
    return FpMatrix(p, out, cols=cols)


@dataclass(frozen=True)
class SubspaceBasis:
    """Rows of `basis` are linearly independent vectors in GF(p)^ambient_dim."""

    ambient_dim: int
    basis: FpMatrix

    def __post_init__(self):
        if self.basis.cols != self.ambient_dim:
            raise DimensionMismatch("basis width disagrees with ambient dimension")

    @property
    def dim(self) -> int:
        return self.basis.rows


# -- row reduction core ----------------------------------------------------
#
# For p = 2 the rows are packed into ints and eliminated with XOR, which
# is the hot path for every instance shipped with the package.  The
# generic path handles any prime.  Both produce the unique RREF.


def _rref_generic(p: int, rows: list) -> tuple:
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if rows[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        if inv != 1:
            rows[r] = [(inv * x) % p for x in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return r, rows, pivots


def _rref_gf2(rows: list, ncols: int) -> tuple:
    packed = []
    for row in rows:
        v = 0
        for j, x in enumerate(row):
            if x:
                v |= 1 << j
        packed.append(v)
    nrows = len(packed)
    pivots = []
    r = 0
    for c in range(ncols):
        bit = 1 << c
        pivot = None
        for i in range(r, nrows):
            if packed[i] & bit:
                pivot = i
                break
        if pivot is None:
            continue
        packed[r], packed[pivot] = packed[pivot], packed[r]
        prow = packed[r]
        for i in range(nrows):
            if i != r and packed[i] & bit:
                packed[i] ^= prow
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    out = [[(v >> j) & 1 for j in range(ncols)] for v in packed]
    return r, out, pivots


def row_reduce(m: FpMatrix) -> tuple:
    """Return (rank, rref, pivots); rref is the unique reduced echelon form."""
    if m.rows == 0 or m.cols == 0:
        return 0, m, ()
    if m.p == 2:
        rank, rows, pivots = _rref_gf2([list(r) for r in m.entries], m.cols)
    else:
        rank, rows, pivots = _rref_generic(m.p, [list(r) for r in m.entries])
    return rank, FpMatrix(m.p, rows, cols=m.cols), tuple(pivots)


def solve_linear(a: FpMatrix, b: FpMatrix) -> Optional[FpMatrix]:
    """Some X with a @ X = b, free variables set to 0; None if inconsistent."""
    if a.p != b.p:
        raise DimensionMismatch("modulus mismatch")
    if a.rows != b.rows:
        raise DimensionMismatch(f"row counts {a.rows} and {b.rows} disagree")
    p = a.p
    if b.cols == 0:
        return FpMatrix.zeros(p, a.cols, 0)
    if a.cols == 0:
        return None if not b.is_zero() else FpMatrix.zeros(p, 0, b.cols)
    rank, rref, pivots = row_reduce(hstack(a, b))
    for c in pivots:
        if c >= a.cols:
            return None
    x = [[0] * b.cols for _ in range(a.cols)]
    for i, c in enumerate(pivots):
        x[c] = list(rref.entries[i][a.cols:])
    return FpMatrix(p, x, cols=b.cols)


def kernel_basis(a: FpMatrix) -> SubspaceBasis:
    """Basis (rows) of {v : a @ v = 0}; rank-nullity holds exactly."""
    n = a.cols
    if n == 0:
        return SubspaceBasis(0, FpMatrix.zeros(a.p, 0, 0))
    if a.rows == 0:
        return SubspaceBasis(n, FpMatrix.identity(a.p, n))
    p = a.p
    rank, rref, pivots = row_reduce(a)
    pivot_set = set(pivots)
    rows = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = [0] * n
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-rref.entries[i][f]) % p
        rows.append(v)
    return SubspaceBasis(n, FpMatrix(p, rows, cols=n))


def quotient_space(ambient_dim: int, s: SubspaceBasis) -> tuple:
    """(projection, section) for GF(p)^ambient_dim -> quotient by span(s).

    projection kills exactly span(s); projection @ section is the
    identity on the quotient.  Rank-deficient bases are rejected.
    """
    if s.ambient_dim != ambient_dim:
        raise DimensionMismatch("subspace lives in a different ambient space")
    p = s.basis.p
    rank, rref, pivots = row_reduce(s.basis)
    if rank != s.basis.rows:
        raise ValueError("rank-deficient subspace basis")
    pivot_set = set(pivots)
    free = [c for c in range(ambient_dim) if c not in pivot_set]
    proj_rows = []
    for f in free:
        row = [0] * ambient_dim
        row[f] = 1
        for i, c in enumerate(pivots):
            row[c] = (-rref.entries[i][f]) % p
        proj_rows.append(row)
    proj = FpMatrix(p, proj_rows, cols=ambient_dim)
    sec_rows = [[0] * len(free) for _ in range(ambient_dim)]
    for idx, f in enumerate(free):
        sec_rows[f][idx] = 1
    sec = FpMatrix(p, sec_rows, cols=len(free))
    return proj, sec


def span_basis(p: int, vectors: Sequence[Sequence[int]], ambient_dim: int) -> SubspaceBasis:
    """Canonical (RREF) basis of the span of the given row vectors."""
    if not vectors:
        return SubspaceBasis(ambient_dim, FpMatrix.zeros(p, 0, ambient_dim))
    m = FpMatrix(p, vectors, cols=ambient_dim)
    rank, rref, _ = row_reduce(m)
    return SubspaceBasis(ambient_dim, FpMatrix(p, rref.entries[:rank], cols=ambient_dim))


# -- packed GF(2) kernels, for hot callers -----------------------------------
#
# Rows are ints with bit j = column j.  Same elimination as _rref_gf2 but
# without any matrix-object traffic; used by the functor-category layer
# where thousands of small systems are solved during enumeration.


def rank_packed(rows: list, ncols: int) -> int:
    rows = [r for r in rows if r]
    rank = 0
    for c in range(ncols):
        bit = 1 << c
        pivot = None
        for i in range(rank, len(rows)):
            if rows[i] & bit:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        prow = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & bit:
                rows[i] ^= prow
        rank += 1
        if rank == len(rows):
            break
    return rank


def solve_affine_packed(rows: list, ncols: int) -> Optional[list]:
    """Solve a GF(2) system given rows with bit ncols holding the rhs.

    Returns the packed solution bits as a list of 0/1 ints (free
    variables pinned to 0), or None when inconsistent.
    """
    rows = [r for r in rows if r]
    rank = 0
    pivots = []
    for c in range(ncols):
        bit = 1 << c
        pivot = None
        for i in range(rank, len(rows)):
            if rows[i] & bit:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        prow = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & bit:
                rows[i] ^= prow
        pivots.append(c)
        rank += 1
        if rank == len(rows):
            break
    rhs_bit = 1 << ncols
    for i in range(rank, len(rows)):
        if rows[i]:
            return None  # leftover row must be rhs-only to be nonzero here
    sol = [0] * ncols
    for i, c in enumerate(pivots):
        if rows[i] & rhs_bit:
            sol[c] = 1
    return sol


def kernel_packed(rows: list, ncols: int) -> list:
    """Packed basis of {v : every row . v = 0}, bitwise dot over GF(2)."""
    rows = [r for r in rows if r]
    rank = 0
    pivots = []
    for c in range(ncols):
        bit = 1 << c
        pivot = None
        for i in range(rank, len(rows)):
            if rows[i] & bit:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        prow = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & bit:
                rows[i] ^= prow
        pivots.append(c)
        rank += 1
        if rank == len(rows):
            break
    pivot_set = set(pivots)
    out = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = 1 << f
        fbit = 1 << f
        for i, c in enumerate(pivots):
            if rows[i] & fbit:
                v |= 1 << c
        out.append(v)
    return out
