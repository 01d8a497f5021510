"""Finite graded complexes with degree +1 differentials, and chain maps.

A complex stores dimensions for a contiguous degree window.  Degrees
outside the window are *unknown* unless the complex is flagged complete
(then they are genuinely zero).  Cohomology is only ever reported for
certified degrees; uncertified degrees come back as None, never as 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .field import QQ
from .sparse import SparseMatrix, rank, kernel_basis


class ComplexError(ValueError):
    pass


@dataclass
class GradedComplex:
    field: object = QQ
    dims: dict = dc_field(default_factory=dict)    # degree -> dimension
    diff: dict = dc_field(default_factory=dict)    # degree d -> matrix C^d -> C^{d+1}
    complete: bool = False                          # dims outside window known to be 0
    labels: dict = dc_field(default_factory=dict)  # degree -> list of basis labels

    def window(self):
        if not self.dims:
            return (0, -1)
        return (min(self.dims), max(self.dims))

    def dim(self, d):
        if d in self.dims:
            return self.dims[d]
        if self.complete:
            return 0
        return None

    def known(self, d):
        return self.complete or d in self.dims

    def differential(self, d):
        m = self.diff.get(d)
        if m is not None:
            return m
        nd, dd = self.dim(d + 1), self.dim(d)
        if nd is None or dd is None:
            return None
        return SparseMatrix.zero(nd, dd, self.field)

    def validate(self):
        """Check shapes and d2 = 0; raises ComplexError naming the bad degree."""
        for d, m in self.diff.items():
            want = (self.dim(d + 1) or 0, self.dim(d) or 0)
            if (m.rows, m.cols) != want:
                raise ComplexError(f"differential at degree {d} has shape "
                                   f"{(m.rows, m.cols)}, expected {want}")
        lo, hi = self.window()
        for d in range(lo, hi):
            a = self.differential(d)
            b = self.differential(d + 1)
            if a is None or b is None:
                continue
            if not b.matmul(a).is_zero():
                raise ComplexError(f"d^2 != 0 at degree {d}")
        return True

    def certified_degrees(self):
        """Degrees where H can be computed without unknown neighbours."""
        lo, hi = self.window()
        if not self.dims:
            return []
        if self.complete:
            return list(range(lo, hi + 1))
        return list(range(lo + 1, hi))

    def cohomology_dims(self, window=None, check=True):
        """dict degree -> dim H (int) or None for uncertified degrees.

        window defaults to the certified range.
        """
        if check:
            self.validate()
        cert = set(self.certified_degrees())
        degrees = range(window[0], window[1] + 1) if window else sorted(cert)
        out = {}
        for d in degrees:
            if d not in cert:
                out[d] = None
                continue
            dn = self.dim(d)
            if dn == 0:
                out[d] = 0
                continue
            down = self.differential(d)
            din = self.differential(d - 1)
            kdim = dn - (rank(down) if down is not None and down.nnz() else 0)
            out[d] = kdim - (rank(din) if din is not None and din.nnz() else 0)
        return out

    def cocycle_reps(self, d):
        """Basis of ker(d^d) as sparse vectors (complete degrees only)."""
        down = self.differential(d)
        n = self.dim(d)
        if down is None or not down.nnz():
            return [{i: self.field.one} for i in range(n or 0)]
        return kernel_basis(down)

    def map_field(self, fld):
        return GradedComplex(
            fld, dict(self.dims),
            {d: m.map_field(fld) for d, m in self.diff.items()},
            self.complete, dict(self.labels))

    def shift(self, n):
        """[n]: degree d of the result is degree d+n of self; differential
        scaled by (-1)^n."""
        sgn = self.field.from_int((-1) ** n)
        return GradedComplex(
            self.field,
            {d - n: v for d, v in self.dims.items()},
            {d - n: m.scale(sgn) for d, m in self.diff.items()},
            self.complete,
            {d - n: v for d, v in self.labels.items()})

    def total_dim(self):
        return sum(self.dims.values())


def ground_field_complex(deg=0, field=QQ, label="k"):
    return GradedComplex(field, {deg: 1}, {}, complete=True, labels={deg: [label]})


def cone_complex(deg, field=QQ):
    """Cone(k[n] -> k[n]) placed so the source copy sits in degree -deg.

    With the convention k[n] = k in degree -n this is the two-term acyclic
    complex k -> k in degrees (-deg, -deg+1), identity differential.
    """
    d = -deg
    return GradedComplex(
        field, {d: 1, d + 1: 1},
        {d: SparseMatrix.identity(1, field)},
        complete=True, labels={d: ["a"], d + 1: ["b"]})


@dataclass
class ChainMap:
    source: GradedComplex
    target: GradedComplex
    blocks: dict = dc_field(default_factory=dict)  # degree -> matrix src^d -> tgt^d

    def block(self, d):
        m = self.blocks.get(d)
        if m is not None:
            return m
        sd, td = self.source.dim(d), self.target.dim(d)
        if sd is None or td is None:
            return None
        return SparseMatrix.zero(td, sd, self.source.field)

    def commutes(self):
        lo = min(self.source.window()[0], self.target.window()[0])
        hi = max(self.source.window()[1], self.target.window()[1])
        for d in range(lo, hi + 1):
            fd, fd1 = self.block(d), self.block(d + 1)
            ds, dt = self.source.differential(d), self.target.differential(d)
            if None in (fd, fd1, ds, dt):
                continue
            if fd1.matmul(ds).add(dt.matmul(fd).scale(self.source.field.neg(
                    self.source.field.one))).nnz():
                return False
        return True

    def cone(self):
        """Cone(f)^d = src^{d+1} (+) tgt^d with d(c, x) = (-dc, f(c) + dx)."""
        C, D = self.source, self.target
        F = C.field
        dims, diffs = {}, {}
        degs = set()
        for d in C.dims:
            degs.add(d - 1)
        degs.update(D.dims)
        for d in degs:
            dims[d] = (C.dim(d + 1) or 0) + (D.dim(d) or 0)
        for d in sorted(degs):
            if d + 1 not in dims:
                continue
            a = C.dim(d + 1) or 0
            b = D.dim(d) or 0
            an = C.dim(d + 2) or 0
            ent = {}
            dc = C.differential(d + 1)
            if dc is not None:
                for (r, c), v in dc.entries.items():
                    ent[(r, c)] = F.neg(v)
            fblk = self.block(d + 1)
            if fblk is not None:
                for (r, c), v in fblk.entries.items():
                    ent[(an + r, c)] = v
            dd = D.differential(d)
            if dd is not None:
                for (r, c), v in dd.entries.items():
                    ent[(an + r, a + c)] = v
            diffs[d] = SparseMatrix(dims[d + 1], dims[d], ent, F)
        return GradedComplex(F, dims, diffs,
                             complete=C.complete and D.complete)


@dataclass
class QuasiIsoReport:
    ok: bool
    window: tuple
    cone_dims: dict          # degree -> dim H(cone) or None when uncertified
    uncertified: list

    def __bool__(self):
        return self.ok


def is_quasi_iso(f: ChainMap, window):
    """Window-relative quasi-isomorphism test via acyclicity of the cone.

    Rejects non-chain-maps.  ok is True when every *certified* degree of the
    cone inside the window has zero cohomology; degrees that cannot be
    certified are listed, and ok does not vouch for them.
    """
    if not f.commutes():
        raise ComplexError("not a chain map: f does not commute with d")
    cone = f.cone()
    cone.validate()
    dims = cone.cohomology_dims(window=window, check=False)
    unc = [d for d, v in dims.items() if v is None]
    ok = all(v == 0 for v in dims.values() if v is not None)
    return QuasiIsoReport(ok, tuple(window), dims, unc)
