"""The two-object semi-free interval resolution (generators f, g, h0, h1, r
with gf = id + dh0, fg = id + dh1, dr = h1 f - f h0), the homotopy-
equivalence lifting formulas into weakly unital categories, the symbolic
cone-fragment derivation of those relations, and an exact coboundary
solver over the word basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .exactlinalg import QQ, GradedComplex, SparseMatrix, solve
from .dgcat.core import CategoryError, Mor, TruncationOverflow, WuCatBase

GENS = {
    "f": (0, 1, 0),
    "g": (1, 0, 0),
    "h0": (0, 0, -1),
    "h1": (1, 1, -1),
    "r": (0, 1, -2),
}


def _word_sig(word):
    """(src, tgt, deg) of a word (tuple of generator names, applied right
    to left: word[-1] acts first)."""
    if not word:
        raise ValueError("empty word has ambiguous endpoints")
    src = GENS[word[-1]][0]
    tgt = GENS[word[0]][1]
    deg = 0
    prev_src = None
    for w in word:
        s, t, d = GENS[w]
        deg += d
        if prev_src is not None and prev_src != t:
            raise ValueError(f"non-composable word {word}")
        prev_src = s
    return src, tgt, deg


# generator differentials: name -> list of (coeff, replacement word)
# the empty tuple stands for the identity of the matching object
_GEN_D = {
    "f": [],
    "g": [],
    "h0": [(1, ("g", "f")), (-1, ())],
    "h1": [(1, ("f", "g")), (-1, ())],
    "r": [(1, ("h1", "f")), (-1, ("f", "h0"))],
}


def word_differential(word):
    """Exact d of a word as dict word -> int coefficient; identity letters
    from the generator differentials are spliced out."""
    out = {}
    parity = 0
    for i, w in enumerate(word):
        for c, repl in _GEN_D[w]:
            new = word[:i] + repl + word[i + 1:]
            coeff = c * (-1) ** parity
            if not new:
                # a lone identity: only possible if the word was length 1,
                # but h0/h1 are endomorphisms so new == () means word == (w,)
                key = ("id", GENS[w][0])
            else:
                key = new
            out[key] = out.get(key, 0) + coeff
            if not out[key]:
                del out[key]
        parity = (parity + GENS[w][2]) % 2
    return out


class KontsevichCat(WuCatBase):
    """Strictly unital word category on the interval generators, with hom
    bases truncated by word length L.  Element operations are exact;
    morphisms whose support leaves the stored basis refuse loudly."""

    def __init__(self, length_bound=4, fld=QQ):
        if length_bound < 2:
            raise CategoryError("length bound must be >= 2")
        self.L = length_bound
        self.field = fld
        self.objects = (0, 1)
        self.n_max = 4
        self.name = f"K(L={length_bound})"
        self._build()

    def _build(self):
        words = {(x, y): [] for x in (0, 1) for y in (0, 1)}

        # generate composable words up to length L
        def extend(word):
            out = []
            for gname, (s, t, d) in GENS.items():
                if not word or GENS[word[-1]][0] == t:
                    out.append(word + (gname,))
            return out

        level = [()]
        all_words = []
        for _ in range(self.L):
            nxt = []
            for w in level:
                for w2 in extend(w):
                    all_words.append(w2)
                    nxt.append(w2)
            level = nxt
        for w in all_words:
            s, t, d = _word_sig(w)
            words[(s, t)].append(w)
        self.words = {}
        self.index = {}
        for (x, y), lst in words.items():
            by_deg = {}
            for w in lst:
                by_deg.setdefault(_word_sig(w)[2], []).append(w)
            if x == y:
                by_deg.setdefault(0, []).insert(0, ("id", x))
            for d in by_deg:
                by_deg[d].sort(key=lambda w: (len(w), w))
            self.words[(x, y)] = by_deg
            self.index[(x, y)] = {d: {w: i for i, w in enumerate(ws)}
                                  for d, ws in by_deg.items()}
        self._hom_cache = {}

    def hom(self, x, y):
        cached = self._hom_cache.get((x, y))
        if cached is not None:
            return cached
        F = self.field
        by_deg = self.words[(x, y)]
        degs = sorted(by_deg)
        dims = {d: len(by_deg[d]) for d in degs}
        dims[1] = dims.get(1, 0)
        labels = {d: ["*".join(w) if w[0] != "id" else f"id{w[1]}"
                      for w in by_deg[d]] for d in degs}
        diffs = {}
        for d in degs:
            ent = {}
            for col, w in enumerate(by_deg[d]):
                if w[0] == "id":
                    continue
                for w2, c in word_differential(w).items():
                    row = self.index[(x, y)].get(d + 1, {}).get(w2)
                    if row is None:
                        continue  # image exceeds the length bound: edge
                    ent[(row, col)] = F.from_int(c)
            diffs[d] = SparseMatrix(dims.get(d + 1, 0), dims[d], ent, F)
        cx = GradedComplex(F, dims, diffs, complete=False, labels=labels)
        self._hom_cache[(x, y)] = cx
        return cx

    def element(self, x, y, combo):
        """Mor from dict word -> coeff (words as tuples; ("id", x) allowed)."""
        F = self.field
        deg = None
        vec = {}
        for w, c in combo.items():
            d = 0 if w[0] == "id" else _word_sig(w)[2]
            if deg is None:
                deg = d
            elif d != deg:
                raise CategoryError("inhomogeneous element")
            idx = self.index[(x, y)].get(d, {}).get(w)
            if idx is None:
                raise TruncationOverflow(f"word {w} exceeds the length bound")
            cc = F.from_int(c) if isinstance(c, int) else c
            vec[idx] = F.add(vec.get(idx, F.zero), cc)
        return Mor.make(x, y, deg if deg is not None else 0, vec, F)

    def word_of(self, mor):
        return [(self.words[(mor.src, mor.tgt)][mor.deg][i], v)
                for i, v in mor.vec]

    def unit(self, x):
        return self.element(x, x, {("id", x): 1})

    def compose(self, g, f):
        if f.tgt != g.src:
            raise CategoryError("non-composable pair")
        F = self.field
        out = {}
        for wg, vg in self.word_of(g):
            for wf, vf in self.word_of(f):
                if wg[0] == "id":
                    w = wf
                elif wf[0] == "id":
                    w = wg
                else:
                    w = wg + wf
                c = F.mul(vg, vf)
                out[w] = F.add(out.get(w, F.zero), c)
        return self.element(f.src, g.tgt, out)

    def tower_items(self):
        return ()

    def is_strict(self, n_max=None):
        return True

    def is_cat_prime(self):
        return False

    def p_apply(self, n, slots, args, at_object=None):
        slots = tuple(slots)
        if n == 1 and not slots:
            return args[0]
        if n == 1 and slots == (1,):
            return self.unit(at_object)
        if args:
            src, tgt = args[-1].src, args[0].tgt
            deg = sum(a.deg for a in args) + 1 - n
        else:
            src = tgt = at_object
            deg = 1 - n
        return self.zero_mor(src, tgt, deg)

    def d(self, a):
        """Exact differential on elements (not length-truncated)."""
        F = self.field
        out = {}
        for w, v in self.word_of(a):
            if w[0] == "id":
                continue
            for w2, c in word_differential(w).items():
                out[w2] = F.add(out.get(w2, F.zero), F.mul(v, F.from_int(c)))
        return self.element(a.src, a.tgt,
                            {w: v for w, v in out.items() if not F.is_zero(v)})


def build_K(length_bound=4, fld=QQ):
    return KontsevichCat(length_bound, fld)


def d_squared_interior_witness(K):
    """d(d(word)) for every word of length <= L - 1 must vanish exactly
    (d is evaluated exactly, so no truncation enters).  Returns the first
    failing word or None."""
    for (x, y), by_deg in K.words.items():
        for d, ws in by_deg.items():
            for w in ws:
                if w[0] == "id" or len(w) > K.L - 1:
                    continue
                acc = {}
                for w2, c in word_differential(w).items():
                    if w2[0] == "id":
                        continue
                    for w3, c2 in word_differential(w2).items():
                        acc[w3] = acc.get(w3, 0) + c * c2
                        if not acc[w3]:
                            del acc[w3]
                if acc:
                    return w, acc
    return None


def defining_relations_hold(K):
    """dh0 = gf - id0, dh1 = fg - id1, dr = h1 f - f h0, df = dg = 0."""
    checks = []
    F = K.field
    e = K.element
    checks.append(("df=0", K.d(e(0, 1, {("f",): 1})).is_zero()))
    checks.append(("dg=0", K.d(e(1, 0, {("g",): 1})).is_zero()))
    lhs = K.d(e(0, 0, {("h0",): 1}))
    rhs = e(0, 0, {("g", "f"): 1, ("id", 0): -1})
    checks.append(("dh0=gf-id0", K.eq_mor(lhs, rhs)))
    lhs = K.d(e(1, 1, {("h1",): 1}))
    rhs = e(1, 1, {("f", "g"): 1, ("id", 1): -1})
    checks.append(("dh1=fg-id1", K.eq_mor(lhs, rhs)))
    lhs = K.d(e(0, 1, {("r",): 1}))
    rhs = e(0, 1, {("h1", "f"): 1, ("f", "h0"): -1})
    checks.append(("dr=h1f-fh0", K.eq_mor(lhs, rhs)))
    return checks


def solve_coboundary(K, target, length_bound=None):
    """Find s with ds = target, over words of length <= length_bound in the
    same hom; target must be closed.  The linear system uses the exact d
    (rows range over every word its columns can reach), so a returned
    witness satisfies ds = target on the nose.  Returns (s, report) where
    s is None when no witness exists within the bound."""
    L = length_bound or K.L
    F = K.field
    x, y = target.src, target.tgt
    if not K.d(target).is_zero():
        raise CategoryError(f"target is not closed: d(target) = {K.d(target)}")
    deg = target.deg - 1
    cand = [w for w in K.words[(x, y)].get(deg, [])
            if w[0] == "id" or len(w) <= L]
    rows = {}
    ent = {}

    def row_of(w):
        if w not in rows:
            rows[w] = len(rows)
        return rows[w]

    for col, w in enumerate(cand):
        if w[0] == "id":
            continue
        for w2, c in word_differential(w).items():
            ent[(row_of(w2), col)] = F.from_int(c)
    rhs = {}
    for w, v in K.word_of(target):
        rhs[row_of(w)] = v
    mat = SparseMatrix(len(rows), len(cand), ent, F)
    sol = solve(mat, rhs)
    if sol is None:
        return None, {"within_bound": L, "candidates": len(cand)}
    s = K.element(x, y, {cand[i]: v for i, v in sol.items()})
    assert K.eq_mor(K.d(s), target)
    return s, {"within_bound": L, "candidates": len(cand)}


# -- homotopy-equivalence lifting ---------------------------------------------

@dataclass
class LiftResult:
    xi_p: Mor
    eta_p: Mor
    h_x_p: Mor
    h_y_pp: Mor
    r: Mor
    relations_ok: bool
    class_witness: Mor | None   # s with ds = xi' - xi, when found
    details: dict = dc_field(default_factory=dict)


def lift_equivalence(cat, xi, eta, h_x, h_y):
    """Given a closed degree-0 homotopy equivalence xi: x -> y with inverse
    data (eta, h_x, h_y) satisfying

        eta . xi' = id_x + d h_x,   xi' . eta = id_y + d h_y,

    for xi' = id_y . xi . id_x, produce generator images satisfying the
    interval-category relations on the nose:

        h_y'' = h_y' + xi'.h_x'.eta' - h_y'.xi'.eta'
        r     = h_y'.xi'.h_x' - xi'.h_x'.h_x'

    (two signs differ from the source text's display; the printed variant
    fails the first relation under the standard Koszul convention, see the
    verification in the test suite).  Inputs failing the hypothesis are
    rejected with the residual.
    """
    C = cat
    x, y = xi.src, xi.tgt
    ux, uy = C.unit(x), C.unit(y)
    xi_p = C.compose(uy, C.compose(xi, ux))
    res1 = C.sub_mor(C.sub_mor(C.compose(eta, xi_p), ux), C.d(h_x))
    res2 = C.sub_mor(C.sub_mor(C.compose(xi_p, eta), uy), C.d(h_y))
    if not res1.is_zero() or not res2.is_zero():
        raise CategoryError(f"inverse data fails the hypothesis; residuals "
                            f"{res1}, {res2}")
    eta_p = C.compose(ux, C.compose(eta, uy))
    h_x_p = C.compose(ux, C.compose(h_x, ux))
    h_y_p = C.compose(uy, C.compose(h_y, uy))
    A = C.compose(xi_p, eta_p)
    h_y_pp = C.add_mor(
        h_y_p,
        C.sub_mor(C.compose(xi_p, C.compose(h_x_p, eta_p)),
                  C.compose(h_y_p, A)))
    r = C.sub_mor(C.compose(h_y_p, C.compose(xi_p, h_x_p)),
                  C.compose(xi_p, C.compose(h_x_p, h_x_p)))
    ok1 = C.eq_mor(C.compose(eta_p, xi_p), C.add_mor(ux, C.d(h_x_p)))
    ok2 = C.eq_mor(C.compose(xi_p, eta_p), C.add_mor(uy, C.d(h_y_pp)))
    ok3 = C.eq_mor(C.d(r), C.sub_mor(C.compose(h_y_pp, xi_p),
                                     C.compose(xi_p, h_x_p)))
    witness = _bounding_element(C, C.sub_mor(xi_p, xi))
    return LiftResult(xi_p, eta_p, h_x_p, h_y_pp, r,
                      ok1 and ok2 and ok3, witness,
                      {"gf": ok1, "fg": ok2, "dr": ok3})


def _bounding_element(cat, diff):
    """Solve d s = diff inside the stored hom window; None when absent."""
    if diff.is_zero():
        return cat.zero_mor(diff.src, diff.tgt, diff.deg - 1)
    cx = cat.hom(diff.src, diff.tgt)
    dm = cx.differential(diff.deg - 1)
    if dm is None:
        return None
    sol = solve(dm, diff.vec_dict())
    if sol is None:
        return None
    return Mor.make(diff.src, diff.tgt, diff.deg - 1, sol, cat.field)


# -- the cone-fragment derivation ----------------------------------------------

CONE_GENS = {
    "i0": ("X0", "Cone", 0),
    "i1": ("X1", "Cone", 1),
    "j0": ("Cone", "X0", 0),
    "j1": ("Cone", "X1", -1),
    "eps": ("Cone", "Cone", -1),
    "f": ("X0", "X1", 0),
}

_CONE_D = {
    "i0": [(1, ("i1", "f"))],
    "i1": [],
    "j0": [],
    "j1": [(1, ("f", "j0"))],
    "eps": [(1, ("idCone",))],
    "f": [],
}

# annihilation / identity rewrite rules on adjacent letters
_CONE_RULES = {
    ("j0", "i0"): [(1, ())],
    ("j1", "i1"): [(1, ())],
    ("j1", "i0"): [],
    ("j0", "i1"): [],
}


def _cone_reduce(combo):
    """Normalize a linear combination of cone-fragment words: splice
    identity letters, apply the annihilation rules until stable."""
    out = {}
    work = list(combo.items())
    while work:
        word, c = work.pop()
        if not c:
            continue
        word = tuple(w for w in word if not w.startswith("id"))
        changed = False
        for i in range(len(word) - 1):
            rule = _CONE_RULES.get((word[i], word[i + 1]))
            if rule is not None:
                for rc, repl in rule:
                    work.append((word[:i] + repl + word[i + 2:], c * rc))
                changed = True
                break
        if not changed:
            out[word] = out.get(word, 0) + c
            if not out[word]:
                del out[word]
    return out


def _cone_d(word):
    out = {}
    parity = 0
    for i, w in enumerate(word):
        for c, repl in _CONE_D[w]:
            new = word[:i] + repl + word[i + 1:]
            out[new] = out.get(new, 0) + c * (-1) ** parity
            if not out[new]:
                del out[new]
        parity = (parity + CONE_GENS.get(w, (None, None, 0))[2]) % 2
    return out


def drinfeld_fragment_check():
    """Derive the interval-category relations from the cone-fragment
    calculus: with g = j0.eps.i1, h0 = -j0.eps.i0, h1 = j1.eps.i1,
    r = j1.eps.i0 the relations hold as printed (the sign on h0 is the
    recorded global choice).  Returns a report dict with reduction traces;
    any irreducible residual marks the check failed."""
    defs = {
        "g": {("j0", "eps", "i1"): 1},
        "h0": {("j0", "eps", "i0"): -1},
        "h1": {("j1", "eps", "i1"): 1},
        "r": {("j1", "eps", "i0"): 1},
    }
    report = {"sign_choice": "h0 := -(j0 eps i0), others plain",
              "checks": [], "ok": True}

    def d_of(combo):
        out = {}
        for w, c in combo.items():
            for w2, c2 in _cone_d(w).items():
                out[w2] = out.get(w2, 0) + c * c2
        return _cone_reduce(out)

    def expand(expr):
        """expr: dict of tuples of defined/atomic letters -> coeff."""
        out = {}
        for word, c in expr.items():
            terms = [((), c)]
            for letter in word:
                sub = defs[letter] if letter in defs else {(letter,): 1}
                terms = [(w + w2, cc * c2) for (w, cc) in terms
                         for (w2, c2) in sub.items()]
            for w, cc in terms:
                out[w] = out.get(w, 0) + cc
        return _cone_reduce(out)

    targets = [
        ("dg = 0", d_of(defs["g"]), {}),
        ("dh0 = gf - id0", d_of(defs["h0"]), expand({("g", "f"): 1, (): -1})),
        ("dh1 = fg - id1", d_of(defs["h1"]), expand({("f", "g"): 1, (): -1})),
        ("dr = h1 f - f h0", d_of(defs["r"]),
         expand({("h1", "f"): 1, ("f", "h0"): -1})),
    ]
    for name, got, want in targets:
        diff = dict(got)
        for w, c in want.items():
            diff[w] = diff.get(w, 0) - c
            if not diff[w]:
                del diff[w]
        ok = not diff
        report["checks"].append({"relation": name, "ok": ok,
                                 "lhs": _fmt(got), "rhs": _fmt(want),
                                 "residual": _fmt(diff)})
        if not ok:
            report["ok"] = False
    # every reduced word must be expressible: no leftover eps-free mixed words
    return report


def _fmt(combo):
    return {" ".join(w) if w else "id": c for w, c in combo.items()}
