"""Sparse matrices over an exact field, with elimination-based rank/kernel/solve.

Matrices are immutable-by-convention dicts of nonzero entries.  Elimination
uses a Markowitz-style pivot rule (sparsest live column, then sparsest row
within it, ties broken by (row, col) order) so results and fill-in are
deterministic.
"""

from __future__ import annotations

from .field import QQ


class SparseMatrix:
    """rows x cols matrix; entries maps (r, c) -> nonzero scalar."""

    __slots__ = ("rows", "cols", "entries", "field")

    def __init__(self, rows, cols, entries=None, field=QQ):
        self.rows = rows
        self.cols = cols
        self.field = field
        ent = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for key, v in items:
                r, c = key
                if not (0 <= r < rows and 0 <= c < cols):
                    raise ValueError(f"entry {key} out of bounds for {rows}x{cols}")
                if key in ent:
                    raise ValueError(f"duplicate entry at {key}")
                if not field.is_zero(v):
                    ent[key] = v
        self.entries = ent

    @classmethod
    def identity(cls, n, field=QQ):
        return cls(n, n, {(i, i): field.one for i in range(n)}, field)

    @classmethod
    def zero(cls, rows, cols, field=QQ):
        return cls(rows, cols, {}, field)

    @classmethod
    def from_rows(cls, rows_data, field=QQ):
        """Build from a dense list of rows (ints / fractions)."""
        rows = len(rows_data)
        cols = len(rows_data[0]) if rows else 0
        ent = {}
        for r, row in enumerate(rows_data):
            for c, v in enumerate(row):
                fv = field.from_fraction(v)
                if not field.is_zero(fv):
                    ent[(r, c)] = fv
        return cls(rows, cols, ent, field)

    def to_dense(self):
        out = [[self.field.zero] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def nnz(self):
        return len(self.entries)

    def is_zero(self):
        return not self.entries

    def transpose(self):
        return SparseMatrix(
            self.cols, self.rows,
            {(c, r): v for (r, c), v in self.entries.items()}, self.field)

    def matmul(self, other):
        if other.rows != self.cols:
            raise ValueError("shape mismatch")
        F = self.field
        by_row = {}
        for (r, c), v in self.entries.items():
            by_row.setdefault(r, []).append((c, v))
        ob_row = {}
        for (r, c), v in other.entries.items():
            ob_row.setdefault(r, []).append((c, v))
        ent = {}
        for r, items in by_row.items():
            acc = {}
            for k, v in items:
                for c, w in ob_row.get(k, ()):
                    acc[c] = F.add(acc.get(c, F.zero), F.mul(v, w))
            for c, val in acc.items():
                if not F.is_zero(val):
                    ent[(r, c)] = val
        return SparseMatrix(self.rows, other.cols, ent, F)

    def apply(self, vec):
        """Apply to a sparse column vector (dict col -> scalar)."""
        F = self.field
        out = {}
        for (r, c), v in self.entries.items():
            w = vec.get(c)
            if w is not None:
                out[r] = F.add(out.get(r, F.zero), F.mul(v, w))
        return {r: v for r, v in out.items() if not F.is_zero(v)}

    def add(self, other):
        if (other.rows, other.cols) != (self.rows, self.cols):
            raise ValueError("shape mismatch")
        F = self.field
        ent = dict(self.entries)
        for key, v in other.entries.items():
            s = F.add(ent.get(key, F.zero), v)
            if F.is_zero(s):
                ent.pop(key, None)
            else:
                ent[key] = s
        return SparseMatrix(self.rows, self.cols, ent, F)

    def scale(self, a):
        F = self.field
        if F.is_zero(a):
            return SparseMatrix.zero(self.rows, self.cols, F)
        return SparseMatrix(self.rows, self.cols,
                            {k: F.mul(a, v) for k, v in self.entries.items()}, F)

    def map_field(self, field):
        ent = {k: field.from_fraction(v) for k, v in self.entries.items()}
        return SparseMatrix(self.rows, self.cols, ent, field)

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix)
                and (self.rows, self.cols) == (other.rows, other.cols)
                and self.entries == other.entries)

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


def _eliminate(mat, pivot_col_limit=None):
    """Row-echelon elimination.

    Returns (pivots, rows): pivots is the list of (row_id, pivot_col) in
    elimination order; rows maps row_id -> dict col -> value for the reduced
    rows.  Invariant: a pivot row has no entries in earlier pivot columns,
    so back-substitution must run in reverse pivot order.  Columns >=
    pivot_col_limit are never chosen as pivots (used by the solver to keep
    the right-hand side out of the pivot set).
    """
    F = mat.field
    limit = mat.cols if pivot_col_limit is None else pivot_col_limit
    rows = {}
    for (r, c), v in mat.entries.items():
        rows.setdefault(r, {})[c] = v
    col_rows = {}
    for r, row in rows.items():
        for c in row:
            col_rows.setdefault(c, set()).add(r)
    pivots = []
    while True:
        # sparsest live column, smallest column index on ties
        best_c, best_n = None, None
        for c, rset in col_rows.items():
            if c >= limit:
                continue
            n = len(rset)
            if n == 0:
                continue
            if best_n is None or n < best_n or (n == best_n and c < best_c):
                best_c, best_n = c, n
        if best_c is None:
            break
        pc = best_c
        pr = min(col_rows[pc], key=lambda r: (len(rows[r]), r))
        pivrow = rows[pr]
        inv = F.inv(pivrow[pc])
        for r in list(col_rows[pc]):
            if r == pr:
                continue
            row = rows[r]
            factor = F.mul(row[pc], inv)
            for c, v in pivrow.items():
                nv = F.sub(row.get(c, F.zero), F.mul(factor, v))
                if F.is_zero(nv):
                    if c in row:
                        del row[c]
                        col_rows[c].discard(r)
                else:
                    if c not in row:
                        col_rows.setdefault(c, set()).add(r)
                    row[c] = nv
        pivots.append((pr, pc))
        for c in pivrow:
            col_rows[c].discard(pr)
        del col_rows[pc]
    return pivots, rows


def rank(mat):
    pivots, _ = _eliminate(mat)
    return len(pivots)


def _back_substitute(pivots, rows, vec, field):
    """Complete vec (free coordinates preset) so every pivot row vanishes."""
    F = field
    for pr, pc in reversed(pivots):
        row = rows[pr]
        acc = F.zero
        for c, v in row.items():
            if c == pc:
                continue
            w = vec.get(c)
            if w is not None:
                acc = F.add(acc, F.mul(v, w))
        if not F.is_zero(acc):
            vec[pc] = F.neg(F.div(acc, row[pc]))
    return {c: v for c, v in vec.items() if not F.is_zero(v)}


def kernel_basis(mat):
    """Basis of ker(mat) as sparse column vectors (dicts col -> scalar)."""
    F = mat.field
    pivots, rows = _eliminate(mat)
    pivot_cols = {c for _, c in pivots}
    basis = []
    for fc in range(mat.cols):
        if fc in pivot_cols:
            continue
        vec = _back_substitute(pivots, rows, {fc: F.one}, F)
        basis.append(vec)
    return basis


def solve(mat, rhs):
    """One solution x of mat @ x = rhs (sparse dicts), or None if none exists.

    Free variables are set to zero.
    """
    F = mat.field
    ent = dict(mat.entries)
    for r, v in rhs.items():
        if not F.is_zero(v):
            ent[(r, mat.cols)] = v
    aug = SparseMatrix(mat.rows, mat.cols + 1, ent, F)
    pivots, rows = _eliminate(aug, pivot_col_limit=mat.cols)
    pivot_rows = {r for r, _ in pivots}
    for r, row in rows.items():
        if r not in pivot_rows and row:
            return None  # leftover support can only sit in the rhs column
    vec = _back_substitute(pivots, rows, {mat.cols: F.neg(F.one)}, F)
    vec.pop(mat.cols, None)
    chk = mat.apply(vec)
    tgt = {r: v for r, v in rhs.items() if not F.is_zero(v)}
    if chk != tgt:
        raise AssertionError("solver produced a non-solution")
    return vec


class Subspace:
    """Row-echelon span of vectors over ambient indices 0..dim-1.

    Supports membership, full reduction mod the subspace, and quotient
    coordinates (the reduction of any vector is supported on non-pivot
    indices, which therefore represent a basis of ambient/subspace).
    """

    def __init__(self, dim, field=QQ):
        self.dim = dim
        self.field = field
        self.pivots = {}  # pivot index -> reduced vector (dict)

    @classmethod
    def from_vectors(cls, dim, vectors, field=QQ):
        sp = cls(dim, field)
        for v in vectors:
            sp.add(v)
        return sp

    def rank(self):
        return len(self.pivots)

    def reduce(self, vec):
        F = self.field
        v = {k: x for k, x in vec.items() if not F.is_zero(x)}
        changed = True
        while changed:
            changed = False
            for p in sorted(k for k in v if k in self.pivots):
                pv = self.pivots[p]
                factor = F.div(v[p], pv[p])
                for k, x in pv.items():
                    nv = F.sub(v.get(k, F.zero), F.mul(factor, x))
                    if F.is_zero(nv):
                        v.pop(k, None)
                    else:
                        v[k] = nv
                changed = True
                break
        return v

    def add(self, vec):
        """Insert vec; returns True if it enlarged the span."""
        res = self.reduce(vec)
        if not res:
            return False
        p = min(res)
        F = self.field
        for q, pv in list(self.pivots.items()):
            c = pv.get(p)
            if c is None:
                continue
            factor = F.div(c, res[p])
            new = dict(pv)
            for k, x in res.items():
                nv = F.sub(new.get(k, F.zero), F.mul(factor, x))
                if F.is_zero(nv):
                    new.pop(k, None)
                else:
                    new[k] = nv
            self.pivots[q] = new
        self.pivots[p] = res
        return True

    def contains(self, vec):
        return not self.reduce(vec)

    def complement_indices(self):
        """Ambient indices whose classes form a basis of ambient/subspace."""
        return [i for i in range(self.dim) if i not in self.pivots]

    def basis_vectors(self):
        return [self.pivots[p] for p in sorted(self.pivots)]
