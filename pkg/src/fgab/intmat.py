"""Exact integer matrices: Smith and Hermite normal forms, kernels, solving.

All arithmetic uses Python integers, so entries never overflow.  Matrices
are immutable; the algorithms copy into nested lists, work in place and
wrap the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"entries do not match shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> IntMatrix:
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            if not data:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[int]], rows: int) -> IntMatrix:
        cols = [list(c) for c in columns]
        return cls(rows, len(cols), tuple(tuple(c[i] for c in cols) for i in range(rows)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, diag: Sequence[int], rows: int | None = None, cols: int | None = None) -> IntMatrix:
        rows = len(diag) if rows is None else rows
        cols = len(diag) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(diag):
            data[i][i] = d
        return _wrap(data, rows, cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else
                         tuple(() for _ in range(self.cols)))

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ocols = other.columns()
        data = tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in ocols) for r in self.entries)
        return IntMatrix(self.rows, other.cols, data)

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in addition")
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __neg__(self) -> IntMatrix:
        return self.scale(-1)

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        return self + (-other)

    def scale(self, k: int) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(tuple(k * a for a in r) for r in self.entries))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} for {self.cols} columns")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.entries)

    def hstack(self, *others: IntMatrix) -> IntMatrix:
        mats = (self,) + others
        if any(m.rows != self.rows for m in mats):
            raise ValueError("row mismatch in hstack")
        data = tuple(sum((m.entries[i] for m in mats), ()) for i in range(self.rows))
        return IntMatrix(self.rows, sum(m.cols for m in mats), data)

    def vstack(self, *others: IntMatrix) -> IntMatrix:
        mats = (self,) + others
        if any(m.cols != self.cols for m in mats):
            raise ValueError("column mismatch in vstack")
        return IntMatrix(sum(m.rows for m in mats), self.cols, sum((m.entries for m in mats), ()))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> IntMatrix:
        return IntMatrix(len(rows), len(cols), tuple(tuple(self.entries[i][j] for j in cols) for i in rows))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.entries for a in r)

    def determinant(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        # Bareiss fraction-free elimination.
        a = self.tolist()
        n, sign, prev = self.rows, 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


def _wrap(data: list[list[int]], rows: int, cols: int) -> IntMatrix:
    return IntMatrix(rows, cols, tuple(tuple(r) for r in data))


def block_diagonal(*blocks: IntMatrix) -> IntMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    data = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            data[r0 + i][c0:c0 + b.cols] = b.entries[i]
        r0 += b.rows
        c0 += b.cols
    return _wrap(data, rows, cols)


def kron(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    """Kronecker product; row (i, k) -> i * b.rows + k, likewise for columns."""
    rows, cols = a.rows * b.rows, a.cols * b.cols
    data = [[0] * cols for _ in range(rows)]
    for i in range(a.rows):
        for j in range(a.cols):
            x = a.entries[i][j]
            if x == 0:
                continue
            for k in range(b.rows):
                for l in range(b.cols):
                    data[i * b.rows + k][j * b.cols + l] = x * b.entries[k][l]
    return _wrap(data, rows, cols)


@dataclass(frozen=True)
class SnfResult:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    invariant_factors: tuple[int, ...]
    U_inv: IntMatrix | None = None

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.rows, self.D.cols)))

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


@dataclass(frozen=True)
class HnfResult:
    basis: IntMatrix
    transform: IntMatrix
    pivots: tuple[int, ...]


def snf(m: IntMatrix) -> SnfResult:
    """Smith normal form with accumulated transforms, ``U @ m @ V == D``.

    Pivots are chosen of minimal absolute value.  If ``m`` is already in
    Smith form with a nonnegative diagonal then ``U`` and ``V`` are identities.
    """
    rows, cols = m.rows, m.cols
    a = m.tolist()
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    uinv = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        for r in uinv:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):  # row dst += k * row src
        ra, rs = a[dst], a[src]
        for c in range(cols):
            ra[c] += k * rs[c]
        ua, us = u[dst], u[src]
        for c in range(rows):
            ua[c] += k * us[c]
        for r in uinv:
            r[src] -= k * r[dst]

    def add_col(dst, src, k):  # col dst += k * col src
        for r in a:
            r[dst] += k * r[src]
        for r in v:
            r[dst] += k * r[src]

    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    x = a[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best and best[0] == 1:
                    break
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            bad = next((i for i in range(t + 1, rows)
                        if any(a[i][j] % p for j in range(t + 1, cols))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            for r in a:
                r[t] = -r[t]
            for r in v:
                r[t] = -r[t]
        if a[t][t] == 0:
            break

    d = _wrap(a, rows, cols)
    factors = tuple(a[i][i] for i in range(min(rows, cols)) if a[i][i] != 0)
    return SnfResult(_wrap(u, rows, rows), d, _wrap(v, cols, cols), factors, _wrap(uinv, rows, rows))


def hnf(m: IntMatrix) -> HnfResult:
    """Row-style Hermite normal form: ``transform @ m`` has the basis rows on top.

    Pivots are positive and every entry above a pivot lies in ``[0, pivot)``.
    """
    rows, cols = m.rows, m.cols
    a = m.tolist()
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if a[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            if i0 != r:
                a[r], a[i0] = a[i0], a[r]
                u[r], u[i0] = u[i0], u[r]
            p = a[r][c]
            done = True
            for i in range(r + 1, rows):
                if a[i][c]:
                    k = a[i][c] // p
                    ai, ar, ui, ur = a[i], a[r], u[i], u[r]
                    for cc in range(c, cols):
                        ai[cc] -= k * ar[cc]
                    for cc in range(rows):
                        ui[cc] -= k * ur[cc]
                    if ai[c]:
                        done = False
            if done:
                break
        if r < rows and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
                u[r] = [-x for x in u[r]]
            p = a[r][c]
            for i in range(r):
                k = a[i][c] // p
                if k:
                    ai, ar, ui, ur = a[i], a[r], u[i], u[r]
                    for cc in range(c, cols):
                        ai[cc] -= k * ar[cc]
                    for cc in range(rows):
                        ui[cc] -= k * ur[cc]
            pivots.append(c)
            r += 1
    basis = IntMatrix(r, cols, tuple(tuple(row) for row in a[:r]))
    return HnfResult(basis, _wrap(u, rows, rows), tuple(pivots))


def kernel_lattice(m: IntMatrix) -> IntMatrix:
    """Rows form the canonical (HNF) basis of ``{x : m @ x == 0}``."""
    n = m.cols
    aug = m.T.hstack(IntMatrix.identity(n))
    h = hnf(aug)
    full = h.transform @ aug
    rank = sum(1 for p in h.pivots if p < m.rows)
    kern = [full.row(i)[m.rows:] for i in range(rank, n)]
    if not kern:
        return IntMatrix.zeros(0, n)
    return hnf(IntMatrix.from_rows(kern, n)).basis


def solve(m: IntMatrix, b: Sequence[int]) -> tuple[int, ...] | None:
    """Some integer ``x`` with ``m @ x == b``, or ``None`` if there is none.

    The solution is the canonical one obtained from the Smith form by
    setting every free coordinate to zero.
    """
    if len(b) != m.rows:
        raise ValueError(f"right-hand side of length {len(b)} for {m.rows} rows")
    s = snf(m)
    c = s.U.apply(b)
    y = [0] * m.cols
    for i, ci in enumerate(c):
        d = s.D[i, i] if i < m.cols else 0
        if d == 0:
            if ci != 0:
                return None
        else:
            q, rem = divmod(ci, d)
            if rem:
                return None
            y[i] = q
    return s.V.apply(y)


def column_lattice_basis(m: IntMatrix) -> IntMatrix:
    """Columns form the canonical basis of the lattice spanned by the columns of ``m``."""
    return hnf(m.T).basis.T if m.cols else IntMatrix.zeros(m.rows, 0)


def in_column_lattice(m: IntMatrix, v: Sequence[int]) -> bool:
    return solve(m, v) is not None
