"""Sparse exact linear algebra over the scalar fields.

Matrices are stored as lists of sparse rows (column -> nonzero Scalar).
Everything is plain Gaussian elimination with exact division; pivots are
chosen from the sparsest available row to limit fill-in.  Over Q the scalar
type already keeps fractions in lowest terms, which is the fraction-free
discipline we need; over Q(q) every intermediate entry is a reduced rational
function.
"""

from __future__ import annotations

from . import scalars
from .errors import FloatNotSupported, ShapeMismatch, VariantMismatch


class Matrix:
    __slots__ = ("nrows", "ncols", "variant", "rows")

    def __init__(self, nrows, ncols, variant, rows=None):
        self.nrows = nrows
        self.ncols = ncols
        self.variant = variant
        self.rows = rows if rows is not None else [dict() for _ in range(nrows)]

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, nrows, ncols, variant):
        return cls(nrows, ncols, variant)

    @classmethod
    def identity(cls, n, variant):
        m = cls(n, n, variant)
        o = scalars.one(variant)
        for i in range(n):
            m.rows[i][i] = o
        return m

    @classmethod
    def from_entries(cls, nrows, ncols, variant, entries):
        """entries: iterable of (row, col, Scalar)."""
        m = cls(nrows, ncols, variant)
        for i, j, s in entries:
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise ShapeMismatch(f"entry ({i},{j}) outside {nrows}x{ncols}")
            if s.variant != variant:
                raise VariantMismatch(f"{s.variant} entry in {variant} matrix")
            if not s.is_zero():
                cur = m.rows[i].get(j)
                s = cur + s if cur is not None else s
                if s.is_zero():
                    m.rows[i].pop(j, None)
                else:
                    m.rows[i][j] = s
        return m

    @classmethod
    def from_rows(cls, rows_of_scalars, variant):
        nrows = len(rows_of_scalars)
        ncols = len(rows_of_scalars[0]) if nrows else 0
        m = cls(nrows, ncols, variant)
        for i, row in enumerate(rows_of_scalars):
            for j, s in enumerate(row):
                if not s.is_zero():
                    m.rows[i][j] = s
        return m

    # -- basic queries -----------------------------------------------------

    def entry(self, i, j):
        return self.rows[i].get(j, scalars.zero(self.variant))

    def entries(self):
        for i, row in enumerate(self.rows):
            for j, s in row.items():
                yield i, j, s

    def nnz(self):
        return sum(len(r) for r in self.rows)

    def is_zero(self):
        return all(not r for r in self.rows)

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.variant == other.variant
            and all(a == b for a, b in zip(self.rows, other.rows))
        )

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, {self.variant}, nnz={self.nnz()})"

    def copy(self):
        return Matrix(self.nrows, self.ncols, self.variant, [dict(r) for r in self.rows])

    # -- arithmetic --------------------------------------------------------

    def _check_variant(self, other):
        if self.variant != other.variant:
            raise VariantMismatch(f"{self.variant} vs {other.variant}")

    def __add__(self, other):
        self._check_variant(other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ShapeMismatch("matrix addition shape mismatch")
        out = self.copy()
        for i, row in enumerate(other.rows):
            target = out.rows[i]
            for j, s in row.items():
                cur = target.get(j)
                val = cur + s if cur is not None else s
                if val.is_zero():
                    target.pop(j, None)
                else:
                    target[j] = val
        return out

    def __neg__(self):
        return Matrix(
            self.nrows,
            self.ncols,
            self.variant,
            [{j: -s for j, s in r.items()} for r in self.rows],
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if c.is_zero():
            return Matrix(self.nrows, self.ncols, self.variant)
        return Matrix(
            self.nrows,
            self.ncols,
            self.variant,
            [{j: s * c for j, s in r.items()} for r in self.rows],
        )

    def __mul__(self, other):
        """Matrix product self @ other."""
        self._check_variant(other)
        if self.ncols != other.nrows:
            raise ShapeMismatch(
                f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}"
            )
        out = Matrix(self.nrows, other.ncols, self.variant)
        for i, row in enumerate(self.rows):
            acc = {}
            for k, a in row.items():
                for j, b in other.rows[k].items():
                    cur = acc.get(j)
                    val = a * b if cur is None else cur + a * b
                    acc[j] = val
            out.rows[i] = {j: v for j, v in acc.items() if not v.is_zero()}
        return out

    def transpose(self):
        out = Matrix(self.ncols, self.nrows, self.variant)
        for i, row in enumerate(self.rows):
            for j, s in row.items():
                out.rows[j][i] = s
        return out

    def hstack(self, other):
        self._check_variant(other)
        if self.nrows != other.nrows:
            raise ShapeMismatch("hstack row mismatch")
        out = self.copy()
        out.ncols = self.ncols + other.ncols
        for i, row in enumerate(other.rows):
            for j, s in row.items():
                out.rows[i][j + self.ncols] = s
        return out

    def column(self, j):
        return [row.get(j, scalars.zero(self.variant)) for row in self.rows]

    def apply(self, vec):
        """Apply to a sparse vector {index: Scalar}; returns a sparse vector."""
        out = {}
        for i, row in enumerate(self.rows):
            acc = None
            for j, s in row.items():
                v = vec.get(j)
                if v is not None:
                    term = s * v
                    acc = term if acc is None else acc + term
            if acc is not None and not acc.is_zero():
                out[i] = acc
        return out


def _require_exact(variant):
    if variant.kind == "float":
        raise FloatNotSupported("exact elimination requires an exact variant")


def _echelonize(rows, ncols):
    """In-place forward elimination of sparse rows over a field.

    Returns the list of (pivot_col, row) in the order pivots were chosen.
    Rows that become zero are dropped.
    """
    pending = [dict(r) for r in rows if r]
    pivots = []
    pivot_for_col = {}
    # process sparsest rows first; re-sort lazily
    while pending:
        pending.sort(key=len, reverse=True)
        row = pending.pop()
        while row:
            # reduce against existing pivots, smallest colliding column first
            reduced = True
            for col in sorted(row):
                piv = pivot_for_col.get(col)
                if piv is not None:
                    factor = row[col] * piv[col].inv()
                    for j, s in piv.items():
                        cur = row.get(j)
                        val = cur - factor * s if cur is not None else -(factor * s)
                        if val.is_zero():
                            row.pop(j, None)
                        else:
                            row[j] = val
                    reduced = False
                    break
            if reduced:
                break
        if row:
            col = min(row)
            pivot_for_col[col] = row
            pivots.append((col, row))
    return pivots


def rank(m):
    _require_exact(m.variant)
    return len(_echelonize(m.rows, m.ncols))


def rank_float(m):
    """Numerical rank for the float variant (SVD threshold)."""
    import numpy as np

    if m.nrows == 0 or m.ncols == 0:
        return 0
    a = np.zeros((m.nrows, m.ncols), dtype=complex)
    for i, j, s in m.entries():
        a[i, j] = s.value
    sv = np.linalg.svd(a, compute_uv=False)
    if sv.size == 0:
        return 0
    tol = max(m.nrows, m.ncols) * sv[0] * 1e-12 if sv[0] else 0.0
    return int((sv > tol).sum())


def nullspace(m):
    """Basis of the right kernel, as a Matrix whose columns are the basis."""
    _require_exact(m.variant)
    pivots = _echelonize(m.rows, m.ncols)
    # back-substitute to reduced form
    pivots.sort(key=lambda p: p[0])
    for idx in range(len(pivots) - 1, -1, -1):
        col, row = pivots[idx]
        inv = row[col].inv()
        for j in list(row):
            row[j] = row[j] * inv
        for col2, row2 in pivots[:idx]:
            c = row2.get(col)
            if c is not None:
                for j, s in row.items():
                    cur = row2.get(j)
                    val = cur - c * s if cur is not None else -(c * s)
                    if val.is_zero():
                        row2.pop(j, None)
                    else:
                        row2[j] = val
    pivot_cols = {col for col, _ in pivots}
    free_cols = [j for j in range(m.ncols) if j not in pivot_cols]
    out = Matrix(m.ncols, len(free_cols), m.variant)
    o = scalars.one(m.variant)
    for k, fc in enumerate(free_cols):
        out.rows[fc][k] = o
        for col, row in pivots:
            c = row.get(fc)
            if c is not None:
                out.rows[col][k] = -c
    return out


def column_space_contains(a, b):
    """True iff every column of b lies in the column space of a."""
    _require_exact(a.variant)
    if a.nrows != b.nrows:
        raise ShapeMismatch("column_space_contains row mismatch")
    return rank(a.hstack(b)) == rank(a)


def solve(a, b):
    """One solution x of a @ x = b (b a Matrix of column vectors), or None.

    Works over any exact variant.
    """
    _require_exact(a.variant)
    if a.nrows != b.nrows:
        raise ShapeMismatch("solve row mismatch")
    # eliminate on [a | b] rows
    aug = a.hstack(b)
    pivots = _echelonize(aug.rows, aug.ncols)
    for col, _ in pivots:
        if col >= a.ncols:
            return None  # inconsistent
    # reduced echelon
    pivots.sort(key=lambda p: p[0])
    for idx in range(len(pivots) - 1, -1, -1):
        col, row = pivots[idx]
        inv = row[col].inv()
        for j in list(row):
            row[j] = row[j] * inv
        for _, row2 in pivots[:idx]:
            c = row2.get(col)
            if c is not None:
                for j, s in row.items():
                    cur = row2.get(j)
                    val = cur - c * s if cur is not None else -(c * s)
                    if val.is_zero():
                        row2.pop(j, None)
                    else:
                        row2[j] = val
    x = Matrix(a.ncols, b.ncols, a.variant)
    for col, row in pivots:
        for j, s in row.items():
            if j >= a.ncols and not s.is_zero():
                x.rows[col][j - a.ncols] = s
    return x


def rank_and_kernel(m):
    k = nullspace(m)
    return m.ncols - k.ncols, k
