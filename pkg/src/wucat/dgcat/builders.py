"""Constructors for the finite categories used across the test suites:
strict algebras and categories, the indiscrete spread of a one-object
example over several objects, and square-zero extensions (the engine for
good reflexive pairs)."""

from __future__ import annotations

from ..exactlinalg import QQ, GradedComplex, SparseMatrix
from .core import CategoryError, Mor, TableWuCat


def strict_algebra(basis, unit_label, mult, fld=QQ, diff=None, name="A",
                   n_max=4):
    """One-object strict dg algebra as a weakly unital category.

    basis: list of (label, degree); mult: dict (label, label) -> dict
    label -> coeff (missing = 0); diff: dict label -> dict label -> coeff.
    The unit label must act strictly (checked by the axiom suite, not here).
    """
    obj = "*"
    labels = [lb for lb, _ in basis]
    degs = {lb: d for lb, d in basis}
    by_deg = {}
    for lb, d in basis:
        by_deg.setdefault(d, []).append(lb)
    pos = {lb: by_deg[degs[lb]].index(lb) for lb in labels}
    dims = {d: len(v) for d, v in by_deg.items()}
    for d in list(dims):
        dims.setdefault(d + 1, dims.get(d + 1, 0))
    diffs = {}
    diff = diff or {}
    for d in by_deg:
        ent = {}
        for col, lb in enumerate(by_deg[d]):
            for lb2, c in (diff.get(lb) or {}).items():
                if degs[lb2] != d + 1:
                    raise CategoryError(f"d({lb}) must have degree {d + 1}")
                ent[(pos[lb2], col)] = fld.from_fraction(c)
        diffs[d] = SparseMatrix(dims.get(d + 1, 0), dims[d], ent, fld)
    cx = GradedComplex(fld, dims, diffs, complete=True,
                       labels={d: list(v) for d, v in by_deg.items()})
    cx.validate()

    comp_tab = {}
    for lb1 in labels:
        for lb2 in labels:
            cell = mult.get((lb1, lb2))
            if not cell:
                continue
            want = degs[lb1] + degs[lb2]
            vv = {}
            for lb3, c in cell.items():
                if degs[lb3] != want:
                    raise CategoryError(f"{lb1}*{lb2} has wrong degree")
                vv[pos[lb3]] = fld.from_fraction(c)
            comp_tab[((degs[lb1], pos[lb1]), (degs[lb2], pos[lb2]))] = vv
    unit = Mor.make(obj, obj, 0, {pos[unit_label]: fld.one}, fld)
    cat = TableWuCat((obj,), {(obj, obj): cx}, {(obj, obj, obj): comp_tab},
                     {obj: unit}, tower={}, n_max=n_max, fld=fld, name=name)
    cat.label_pos = pos
    cat.label_deg = degs
    return cat


def mor_of(cat, x, y, lin):
    """Morphism from a label -> coeff dict on a labelled category."""
    fld = cat.field
    deg = None
    out = {}
    for lb, c in lin.items():
        d = cat.label_deg[lb]
        if deg is None:
            deg = d
        elif d != deg:
            raise CategoryError("inhomogeneous morphism")
        out[cat.label_pos[lb]] = fld.from_fraction(c)
    return Mor.make(x, y, deg if deg is not None else 0, out, fld)


def ground_algebra(fld=QQ):
    """The one-dimensional strict algebra: one object, hom = k."""
    return strict_algebra([("1", 0)], "1", {("1", "1"): {"1": 1}}, fld,
                          name="k")


def dual_numbers(fld=QQ, letter="e"):
    """k[e]/(e^2) in degree 0."""
    e = letter
    return strict_algebra(
        [("1", 0), (e, 0)], "1",
        {("1", "1"): {"1": 1}, ("1", e): {e: 1}, (e, "1"): {e: 1},
         (e, e): {}},
        fld, name=f"k[{e}]/({e}2)")


def product_field(fld=QQ):
    """k x k presented on the basis u = e1+e2 (unit), w = e1-e2, w^2 = u."""
    return strict_algebra(
        [("u", 0), ("w", 0)], "u",
        {("u", "u"): {"u": 1}, ("u", "w"): {"w": 1}, ("w", "u"): {"w": 1},
         ("w", "w"): {"u": 1}},
        fld, name="kxk")


def two_term_endos(fld=QQ):
    """The endomorphism dg algebra of the contractible two-term complex
    k (deg -1) -> k (deg 0): basis 1, a (projection onto the degree -1
    line), s (deg -1 contraction, ds = 1), t (deg +1, t = da)."""
    return strict_algebra(
        [("1", 0), ("a", 0), ("s", -1), ("t", 1)], "1",
        {
            ("1", "1"): {"1": 1}, ("1", "a"): {"a": 1}, ("1", "s"): {"s": 1},
            ("1", "t"): {"t": 1}, ("a", "1"): {"a": 1}, ("s", "1"): {"s": 1},
            ("t", "1"): {"t": 1},
            ("a", "a"): {"a": 1},
            ("a", "s"): {"s": 1}, ("s", "a"): {},
            ("a", "t"): {}, ("t", "a"): {"t": 1},
            ("s", "s"): {}, ("t", "t"): {},
            ("s", "t"): {"a": 1}, ("t", "s"): {"1": 1, "a": -1},
        },
        fld,
        diff={"a": {"t": 1}, "s": {"1": 1}},
        name="End(k->k)")


def diagonal_category(n_objects, fld=QQ, name=None):
    """n objects, hom(i, i) = k, zero cross homs (strict)."""
    objs = tuple(range(n_objects))
    homs = {}
    units = {}
    comp = {}
    for i in objs:
        cx = GradedComplex(fld, {0: 1, 1: 0}, {}, complete=True,
                           labels={0: ["1"]})
        homs[(i, i)] = cx
        units[i] = Mor.make(i, i, 0, {0: fld.one}, fld)
        comp[(i, i, i)] = {((0, 0), (0, 0)): {0: fld.one}}
    return TableWuCat(objs, homs, comp, units, tower={}, n_max=4, fld=fld,
                      name=name or f"diag{n_objects}")


class IndiscreteWuCat(TableWuCat):
    """Spread a one-object category over n objects: hom(i, j) is the
    algebra for every pair, all structure inherited pointwise."""

    def __init__(self, alg_cat, n_objects, name=None):
        base = alg_cat.objects[0]
        objs = tuple(range(n_objects))
        cx = alg_cat.hom(base, base)
        super().__init__(objs, {(i, j): cx for i in objs for j in objs},
                         {}, {}, tower={}, n_max=alg_cat.n_max,
                         fld=alg_cat.field,
                         name=name or f"{alg_cat.name}x{n_objects}")
        self.alg = alg_cat
        self._base = base
        if hasattr(alg_cat, "label_pos"):
            self.label_pos = alg_cat.label_pos
            self.label_deg = alg_cat.label_deg

    def unit(self, x):
        return Mor(x, x, 0, self.alg.unit(self._base).vec)

    def compose(self, g, f):
        if f.tgt != g.src:
            raise CategoryError("non-composable pair")
        b = self._base
        r = self.alg.compose(Mor(b, b, g.deg, g.vec), Mor(b, b, f.deg, f.vec))
        return Mor(f.src, g.tgt, r.deg, r.vec)

    def tower_items(self):
        return self.alg.tower_items()

    def p_apply(self, n, slots, args, at_object=None):
        b = self._base
        if args:
            src, tgt = args[-1].src, args[0].tgt
        else:
            src = tgt = at_object
        lifted = tuple(Mor(b, b, a.deg, a.vec) for a in args)
        r = self.alg.p_apply(n, slots, lifted,
                             at_object=b if not args else None)
        return Mor(src, tgt, r.deg, r.vec)

    def is_cat_prime(self):
        return self.alg.is_cat_prime()

    def is_strict(self, n_max=None):
        return self.alg.is_strict(n_max)


def square_zero_extension(base, w_bottom_degree=-1, fld=None, name=None):
    """A = B (+) B.w0 (+) B.w1 with W = (w0 -> w1 = dw0) a two-term acyclic
    complex, (B.W)^2 = 0, W central: the canonical source of good
    reflexive pairs over a one-object strict algebra B."""
    fld = fld or base.field
    if len(base.objects) != 1:
        raise CategoryError("square_zero_extension expects a one-object base")
    d0 = w_bottom_degree
    labels = sorted(base.label_deg, key=lambda lb: (base.label_deg[lb], lb))
    degs = dict(base.label_deg)
    basis = [(lb, degs[lb]) for lb in labels]
    basis += [(f"{lb}.w0", degs[lb] + d0) for lb in labels]
    basis += [(f"{lb}.w1", degs[lb] + d0 + 1) for lb in labels]

    def base_mult(l1, l2):
        obj = base.objects[0]
        a = mor_of(base, obj, obj, {l1: 1})
        b = mor_of(base, obj, obj, {l2: 1})
        prod = base.compose(a, b)
        lst = base.hom(obj, obj).labels[prod.deg]
        return {lst[i]: v for i, v in prod.vec}

    def base_diff(lb):
        obj = base.objects[0]
        img = base.d(mor_of(base, obj, obj, {lb: 1}))
        lst = base.hom(obj, obj).labels.get(img.deg, [])
        return {lst[i]: v for i, v in img.vec}

    mult = {}
    for l1 in labels:
        for l2 in labels:
            cell = base_mult(l1, l2)
            mult[(l1, l2)] = dict(cell)
            # b * (b'.w) and (b.w) * b' ; the W letter stays rightmost, so
            # a plain right factor moves past w with a Koszul sign
            for tag in ("w0", "w1"):
                wdeg = d0 if tag == "w0" else d0 + 1
                mult[(l1, f"{l2}.{tag}")] = {f"{lb}.{tag}": v
                                             for lb, v in cell.items()}
                sgn = (-1) ** ((wdeg * degs[l2]) % 2)
                mult[(f"{l1}.{tag}", l2)] = {f"{lb}.{tag}": sgn * v
                                             for lb, v in cell.items()}
            for t1 in ("w0", "w1"):
                for t2 in ("w0", "w1"):
                    mult[(f"{l1}.{t1}", f"{l2}.{t2}")] = {}
    diff = {}
    for lb in labels:
        cell = base_diff(lb)
        if cell:
            diff[lb] = dict(cell)
        for tag in ("w0", "w1"):
            dcell = {f"{lb2}.{tag}": v for lb2, v in cell.items()}
            if tag == "w0":
                dcell[f"{lb}.w1"] = dcell.get(f"{lb}.w1", 0) \
                    + (-1) ** (degs[lb] % 2)
            dcell = {k: v for k, v in dcell.items() if v}
            if dcell:
                diff[f"{lb}.{tag}"] = dcell

    unit_label = next(lb for lb in labels
                      if base.unit(base.objects[0]).vec ==
                      ((base.label_pos[lb], base.field.one),))
    coerced = {}
    for k, cell in mult.items():
        coerced[k] = {lb: v for lb, v in cell.items() if v}
    return strict_algebra(basis, unit_label, coerced, fld, diff,
                          name=name or f"{base.name}+W")
