"""Constructing genuinely weakly unital finite categories.

The coherence identity for a tower component p_{n;S} only involves lower
components, so towers can be solved level by level: each (n, S) yields one
sparse linear system whose unknowns are the values of p_{n;S} on basis
tuples.  Combined with gauge twisting (conjugating every operation by a
random chain automorphism) this produces seeded families of finite
categories with non-strict weak units on which the lifting and model
structure suites run.
"""

from __future__ import annotations

import random

from ..exactlinalg import SparseMatrix, kernel_basis, solve
from ..wuoperad import generator_differential, template_reorder_sign
from .core import (CategoryError, Mor, TableWuCat, _basis_tuples, _slot_sets,
                   arg_key, evaluate_tree)
from .builders import strict_algebra, mor_of


def solve_tower(cat, n_max=None, require_unital_vanishing=True):
    """Fill cat.tower in place so the coherence identities hold through
    n_max; returns the category, or raises CategoryError when obstructed.

    require_unital_vanishing pins every 0-ary component p_n(1,..,1) to
    zero (the strict-side normalization); with it False the solver may
    return a relaxed-flavour tower.
    """
    n_max = n_max or cat.n_max
    F = cat.field
    for n in range(2, n_max + 1):
        for slots in _slot_sets(n):
            k = len(slots)
            if k == n and require_unital_vanishing:
                tab = {}
                # identity must already be consistent with the zero value
                for args, at_obj in _basis_tuples(cat, 0):
                    rhs = _known_side(cat, n, slots, args, at_obj)
                    if not rhs.is_zero():
                        raise CategoryError(
                            f"unital vanishing obstructed at n={n}: "
                            f"{rhs}")
                cat.tower[(n, slots)] = tab
                continue
            _solve_component(cat, n, slots)
    return cat


def _known_side(cat, n, slots, args, at_obj):
    """The part of the coherence identity not involving p_{n;slots}: the
    operadic differential templates evaluated through lower components."""
    F = cat.field
    arg_degs = [a.deg for a in args]
    acc = None
    for sgn, tpl in generator_differential(n, tuple(slots)):
        rs = template_reorder_sign(tpl, arg_degs)
        term = evaluate_tree(cat, tpl, list(args), at_object=at_obj)
        term = cat.scale_mor(F.from_int(sgn * rs), term)
        acc = term if acc is None else cat.add_mor(acc, term)
    return acc


def _solve_component(cat, n, slots):
    """One sparse linear solve for all values of p_{n;slots}."""
    F = cat.field
    k = len(slots)
    g = n - k
    tuples = list(_basis_tuples(cat, g))
    # unknown layout: for each tuple, the coordinates of its value
    col_of = {}
    val_sig = {}
    ncols = 0
    for args, at_obj in tuples:
        key = arg_key(args, at_obj)
        if args:
            src, tgt = args[-1].src, args[0].tgt
            deg = sum(a.deg for a in args) + 1 - n
        else:
            src = tgt = at_obj
            deg = 1 - n
        dim = cat.hom(src, tgt).dim(deg) or 0
        val_sig[key] = (src, tgt, deg, dim)
        col_of[key] = ncols
        ncols += dim
    ent = {}
    rhs = {}
    row_of = {}
    nrows = 0

    def row_index(eq_key, i):
        nonlocal nrows
        base = row_of.get(eq_key)
        if base is None:
            row_of[eq_key] = base = nrows
            nrows += eq_key[-1]
        return base + i

    for args, at_obj in tuples:
        key = arg_key(args, at_obj)
        src, tgt, deg, dim = val_sig[key]
        eq_dim = cat.hom(src, tgt).dim(deg + 1) or 0
        eq_key = (key, eq_dim)
        # d(value) contributes through the hom differential
        dmat = cat.hom(src, tgt).differential(deg)
        if dmat is not None:
            for (r, c), v in dmat.entries.items():
                ent[(row_index(eq_key, r), col_of[key] + c)] = v
        # inner-differential terms couple to tuples with one arg replaced
        prefix = (1 - n) % 2
        for i, a in enumerate(args):
            da = cat.d(a)
            sgn = F.from_int(-((-1) ** prefix))
            for bi, bv in da.vec:
                rep = cat.basis_mor(a.src, a.tgt, a.deg + 1, bi)
                key2 = arg_key(args[:i] + (rep,) + args[i + 1:], at_obj)
                if key2 not in col_of:
                    raise CategoryError("tuple space not closed under d")
                s2, t2, d2, dim2 = val_sig[key2]
                for c in range(dim2):
                    # value of the replaced tuple appears linearly
                    ent_key = (row_index(eq_key, c), col_of[key2] + c)
                    prev = ent.get(ent_key, F.zero)
                    val = F.add(prev, F.mul(sgn, bv))
                    if F.is_zero(val):
                        ent.pop(ent_key, None)
                    else:
                        ent[ent_key] = val
            prefix = (prefix + a.deg) % 2
        kn = _known_side(cat, n, slots, args, at_obj)
        for i, v in kn.vec:
            rhs[row_index(eq_key, i)] = v
    mat = SparseMatrix(nrows, ncols, ent, F)
    sol = solve(mat, rhs)
    if sol is None:
        raise CategoryError(f"tower obstructed at (n={n}, slots={slots})")
    tab = {}
    for args, at_obj in tuples:
        key = arg_key(args, at_obj)
        src, tgt, deg, dim = val_sig[key]
        vec = {}
        for c in range(dim):
            v = sol.get(col_of[key] + c)
            if v is not None and not F.is_zero(v):
                vec[c] = v
        if vec:
            tab[key] = vec
    cat.tower[(n, tuple(slots))] = tab
    return cat


# -- hand-built non-strict seeds ----------------------------------------------

def nonstrict_unit_algebra(fld, variant="left", n_max=4):
    """One object; basis 1 (weak unit), f (deg 0), h (deg -1) with dh = f.
    The unit eats f on one side only, so the unit laws hold merely up to
    the homotopy recorded by the tower (solved, not guessed)."""
    if variant == "left":
        mult = {("1", "1"): {"1": 1}, ("1", "f"): {}, ("f", "1"): {"f": 1},
                ("f", "f"): {}, ("1", "h"): {}, ("h", "1"): {"h": 1},
                ("f", "h"): {}, ("h", "f"): {}, ("h", "h"): {}}
    elif variant == "right":
        mult = {("1", "1"): {"1": 1}, ("1", "f"): {"f": 1}, ("f", "1"): {},
                ("f", "f"): {}, ("1", "h"): {"h": 1}, ("h", "1"): {},
                ("f", "h"): {}, ("h", "f"): {}, ("h", "h"): {}}
    elif variant == "both":
        mult = {("1", "1"): {"1": 1}, ("1", "f"): {}, ("f", "1"): {},
                ("f", "f"): {}, ("1", "h"): {}, ("h", "1"): {},
                ("f", "h"): {}, ("h", "f"): {}, ("h", "h"): {}}
    else:
        raise ValueError(f"unknown variant {variant!r}")
    cat = strict_algebra([("1", 0), ("f", 0), ("h", -1)], "1", mult, fld,
                         diff={"h": {"f": 1}},
                         name=f"nonstrict-{variant}", n_max=n_max)
    return solve_tower(cat, n_max)


# -- gauge twisting -----------------------------------------------------------

def chain_automorphism_space(cx):
    """Basis of degree-0 chain endomorphisms of a graded complex, each as
    {deg: SparseMatrix}."""
    F = cx.field
    coords = []
    for d in sorted(cx.dims):
        nd = cx.dims[d]
        for r in range(nd):
            for c in range(nd):
                coords.append((d, r, c))
    pos = {k: i for i, k in enumerate(coords)}
    ent = {}
    nrow = 0
    rows = {}

    def row(key, size):
        nonlocal nrow
        if key not in rows:
            rows[key] = nrow
            nrow += size
        return rows[key]

    for d in sorted(cx.dims):
        dm = cx.differential(d)
        if dm is None:
            continue
        nd, nd1 = cx.dims[d], cx.dim(d + 1) or 0
        base = row(d, nd1 * nd)
        # (d o psi_d - psi_{d+1} o d)[r, c] = 0
        for (r, m), v in dm.entries.items():
            for c in range(nd):
                key = pos.get((d, m, c))
                if key is not None:
                    ent[(base + r * nd + c, key)] = F.add(
                        ent.get((base + r * nd + c, key), F.zero), v)
        for (r, m), v in dm.entries.items():
            for rr in range(nd1):
                key = pos.get((d + 1, rr, r))
                if key is not None:
                    kk = (base + rr * nd + m, key)
                    ent[kk] = F.sub(ent.get(kk, F.zero), v)
    mat = SparseMatrix(nrow, len(coords), ent, F)
    out = []
    for vec in kernel_basis(mat):
        psi = {}
        for i, v in vec.items():
            d, r, c = coords[i]
            psi.setdefault(d, {})[(r, c)] = v
        out.append({d: SparseMatrix(cx.dims[d], cx.dims[d], m, F)
                    for d, m in psi.items()})
    return out


def _invert_blocks(cx, phi):
    """Per-degree inverse of a chain automorphism, or None."""
    F = cx.field
    inv = {}
    for d, nd in cx.dims.items():
        if nd == 0:
            continue
        m = phi.get(d) or SparseMatrix.identity(nd, F)
        cols = {}
        for j in range(nd):
            col = solve(m, {j: F.one})
            if col is None:
                return None
            cols[j] = col
        ent = {}
        for j, col in cols.items():
            for i, v in col.items():
                ent[(i, j)] = v
        inv[d] = SparseMatrix(nd, nd, ent, F)
    return inv


def gauge_twist(cat, seed, strength=1):
    """Conjugate every operation of a one-or-more-object table category by
    a random chain automorphism of each hom complex; seeded and exact.
    The result is isomorphic to the input but its tables are scrambled, so
    identities that only accidentally held on the nose get exercised."""
    rng = random.Random(seed)
    F = cat.field
    phis = {}
    invs = {}
    for x in cat.objects:
        for y in cat.objects:
            cx = cat.hom(x, y)
            if not cx.dims:
                continue
            endos = chain_automorphism_space(cx)
            phi = {d: SparseMatrix.identity(nd, F)
                   for d, nd in cx.dims.items() if nd}
            for _ in range(strength):
                if not endos:
                    break
                psi = rng.choice(endos)
                c = F.from_int(rng.choice([-2, -1, 1, 2]))
                cand = {d: phi[d].add(psi.get(d, SparseMatrix.zero(
                    cx.dims[d], cx.dims[d], F)).scale(c))
                    for d in phi}
                inv = _invert_blocks(cx, cand)
                if inv is not None:
                    phi = cand
            phis[(x, y)] = phi
            invs[(x, y)] = _invert_blocks(cx, phi)

    def fwd(mor):
        m = phis.get((mor.src, mor.tgt), {}).get(mor.deg)
        if m is None:
            return mor
        return Mor.make(mor.src, mor.tgt, mor.deg, m.apply(mor.vec_dict()), F)

    def bwd(mor):
        m = invs.get((mor.src, mor.tgt), {}).get(mor.deg)
        if m is None:
            return mor
        return Mor.make(mor.src, mor.tgt, mor.deg, m.apply(mor.vec_dict()), F)

    # conjugation twists every operation but d (phi is a chain map)
    homs = {(x, y): cat.hom(x, y) for x in cat.objects for y in cat.objects
            if cat.hom(x, y).dims}
    comp = {}
    for x in cat.objects:
        for y in cat.objects:
            for z in cat.objects:
                tab = {}
                cxy, cyz = cat.hom(x, y), cat.hom(y, z)
                for dg in cyz.dims:
                    for ig in range(cyz.dims[dg]):
                        gmor = bwd(cat.basis_mor(y, z, dg, ig))
                        for df in cxy.dims:
                            for i_f in range(cxy.dims[df]):
                                fmor = bwd(cat.basis_mor(x, y, df, i_f))
                                val = fwd(cat.compose(gmor, fmor))
                                if not val.is_zero():
                                    tab[((dg, ig), (df, i_f))] = val.vec_dict()
                if tab:
                    comp[(x, y, z)] = tab
    units = {x: fwd(cat.unit(x)) for x in cat.objects}
    out = TableWuCat(cat.objects, homs, comp, units, tower={},
                     n_max=cat.n_max, fld=F,
                     name=f"{cat.name}~twist{seed}")
    tower = {}
    for (n, slots), _tab in cat.tower_items():
        newtab = {}
        for args, at_obj in _basis_tuples(out, n - len(slots)):
            pre = tuple(bwd(a) for a in args)
            val = fwd(cat.p_apply(n, slots, pre, at_object=at_obj))
            if not val.is_zero():
                newtab[arg_key(args, at_obj)] = val.vec_dict()
        tower[(n, slots)] = newtab
    out.tower = tower
    if hasattr(cat, "label_pos"):
        out.label_pos = cat.label_pos
        out.label_deg = cat.label_deg
    return out


def seeded_nonstrict_family(count, seed0=100, fld=None, n_max=3):
    """Deterministic family of finite weakly unital categories with
    non-strict units: the three hand variants, gauge twisted."""
    from ..exactlinalg import QQ
    fld = fld or QQ
    out = []
    variants = ("left", "right", "both")
    i = 0
    while len(out) < count:
        variant = variants[i % 3]
        base = nonstrict_unit_algebra(fld, variant, n_max)
        cat = gauge_twist(base, seed0 + i, strength=2) if i % 3 else base
        out.append(cat)
        i += 1
    return out
