"""The operads of weakly unital composition: differential, truncated
complexes, cohomology against the one-operation-per-arity target, and the
auxiliary word complexes used to organize the computation.

Sign conventions (fixed here once, validated by the exhaustive d^2 = 0
suite): for a generator with unit slots S = {i_1 < ... < i_k} in [1, n],

    d p_{n;S} = sum_{l=1}^{n-1} (-1)^(l-1) m o (p_{l; S<=l}, p_{n-l; S>l - l})
              + sum_{r=1}^{n-1} (-1)^r   C_r(p_{n;S})

where C_r contracts inputs r, r+1 of the *unslotted* p_n picture:
  * both r, r+1 slots: the two slots merge into one slot at position r;
  * exactly one a slot: that slot is deleted (the unit acts strictly in the
    slot calculus);
  * neither a slot: an m-vertex is grafted at the corresponding operadic
    input.
The differential is extended to trees by the graded Leibniz rule in
preorder.  It raises degree by 1 and never increases the unit weight Q, so
Q-truncated spans are honest subcomplexes.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

from . import treeops as T
from .exactlinalg import QQ, GradedComplex, SparseMatrix, solve
from .exactlinalg.complexes import ComplexError


@lru_cache(maxsize=None)
def generator_differential(n, slots, sign_fault=False):
    """Raw template terms of d p_{n;slots} as (sign, template) pairs.

    Template leaves stand for the generator's operadic inputs in order;
    graft the original children back in with treeops.graft_all.  Templates
    are raw: normalization decides which terms survive in which mode.

    sign_fault=True flips the contraction sign family; it exists so the
    test harness and CLI can demonstrate that the d^2 = 0 suite catches a
    sign error.
    """
    slots = tuple(slots)
    S = set(slots)
    k = len(slots)
    if not (0 <= k <= n) or slots != tuple(sorted(S)):
        raise ValueError(f"bad slots {slots}")
    terms = []
    for ell in range(1, n):
        s1 = tuple(s for s in slots if s <= ell)
        s2 = tuple(s - ell for s in slots if s > ell)
        left = _p_template(ell, s1)
        right = _p_template(n - ell, s2)
        terms.append(((-1) ** (ell - 1), T.m_tree([left, right])))
    for r in range(1, n):
        both = r in S and r + 1 in S
        tslots = tuple(s for s in slots if s <= r - 1) \
            + ((r,) if both else ()) \
            + tuple(s - 1 for s in slots if s >= r + 2)
        g_new = (n - 1) - len(tslots)
        if both or ((r in S) != (r + 1 in S)):
            tpl = _p_template(n - 1, tslots)
        else:
            u = r - sum(1 for s in slots if s < r)
            kids = [T.LEAF] * (u - 1) + [T.m_tree([T.LEAF, T.LEAF])] \
                + [T.LEAF] * (g_new - u)
            tpl = T.p_tree(n - 1, tslots, kids)
        sign = (-1) ** (r - 1) if sign_fault else (-1) ** r
        terms.append((sign, tpl))
    return tuple(terms)


def _p_template(n, slots):
    g = n - len(slots)
    return T.p_tree(n, slots, [T.LEAF] * g)


def template_reorder_sign(template, child_degrees):
    """Koszul sign for substituting graded children into a template.

    In the tensor model a differential term is (template vertices) (x)
    (children in order); re-expressing it in the planar preorder basis
    moves each child left past the template vertices that follow its input
    slot.  Only p-vertices carry odd degree, so the sign is
    (-1)^sum_i |c_i| * (p-weight of template vertices after slot i).
    """
    seq = []
    idx = 0

    def walk(node):
        nonlocal idx
        if node.kind == "leaf":
            seq.append(("slot", idx))
            idx += 1
            return
        own = (1 - node.n) if node.kind == "p" else 0
        seq.append(("v", own))
        for c in node.children:
            walk(c)

    walk(template)
    total = 0
    suffix = 0
    for kind, val in reversed(seq):
        if kind == "v":
            suffix += val
        else:
            total += child_degrees[val] * suffix
    return -1 if total % 2 else 1


def _d_raw(t, sign_fault=False):
    """Leibniz expansion of d on a tree: list of (sign, raw tree)."""
    out = []
    if t.kind == "p":
        child_degs = [T.degree(c) for c in t.children]
        for sgn, tpl in generator_differential(t.n, t.slots, sign_fault):
            rs = template_reorder_sign(tpl, child_degs)
            out.append((sgn * rs, T.graft_all(tpl, list(t.children))))
    parity = (t.n - 1) % 2 if t.kind == "p" else 0
    for i, c in enumerate(t.children):
        sub = _d_raw(c, sign_fault)
        if sub:
            sgn_prefix = (-1) ** parity
            for s, dc in sub:
                out.append((s * sgn_prefix,
                            T.Tree(t.kind, t.n, t.slots,
                                   t.children[:i] + (dc,) + t.children[i + 1:])))
        parity = (parity + T.degree(c)) % 2
    return out


_TREE_DIFF_CACHE = {}


def tree_differential(t, mode, sign_fault=False):
    """d of a single normal tree as a dict tree -> integer coefficient."""
    if not sign_fault:
        cached = _TREE_DIFF_CACHE.get((t, mode))
        if cached is not None:
            return cached
    acc = {}
    for sgn, raw in _d_raw(t, sign_fault):
        nt = T.normalize(raw, mode)
        if nt is None:
            continue
        c = acc.get(nt, 0) + sgn
        if c:
            acc[nt] = c
        else:
            del acc[nt]
    if not sign_fault:
        _TREE_DIFF_CACHE[(t, mode)] = acc
    return acc


@dataclass
class OperadElement:
    """Finite formal combination of normal trees, homogeneous in (arity,
    degree); coefficients are exact rationals."""
    mode: str
    terms: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        ar_deg = None
        for t, c in self.terms.items():
            c = Fraction(c)
            if not c:
                continue
            key = (T.arity(t), T.degree(t))
            if ar_deg is None:
                ar_deg = key
            elif ar_deg != key:
                raise ValueError("inhomogeneous operad element")
            clean[t] = c
        self.terms = clean

    @classmethod
    def single(cls, mode, tree, coeff=1):
        return cls(mode, {tree: Fraction(coeff)})

    def is_zero(self):
        return not self.terms

    def grading(self):
        if not self.terms:
            return None
        t = next(iter(self.terms))
        return (T.arity(t), T.degree(t))

    def add(self, other):
        if other.mode != self.mode:
            raise ValueError("mode mismatch")
        out = dict(self.terms)
        for t, c in other.terms.items():
            v = out.get(t, Fraction(0)) + c
            if v:
                out[t] = v
            else:
                out.pop(t, None)
        return OperadElement(self.mode, out)

    def scale(self, a):
        a = Fraction(a)
        return OperadElement(self.mode, {t: a * c for t, c in self.terms.items()})

    def q_weight(self):
        return max((T.q_weight(t) for t in self.terms), default=0)


def differential(x: OperadElement, sign_fault=False) -> OperadElement:
    out = {}
    for t, c in x.terms.items():
        for nt, k in tree_differential(t, x.mode, sign_fault).items():
            v = out.get(nt, Fraction(0)) + c * k
            if v:
                out[nt] = v
            else:
                out.pop(nt, None)
    return OperadElement(x.mode, out)


def compose_elements(outer: OperadElement, pos, inner: OperadElement):
    out = {}
    for t1, c1 in outer.terms.items():
        for t2, c2 in inner.terms.items():
            nt = T.compose(t1, pos, t2, outer.mode)
            if nt is None:
                continue
            v = out.get(nt, Fraction(0)) + c1 * c2
            if v:
                out[nt] = v
            else:
                out.pop(nt, None)
    return OperadElement(outer.mode, out)


@dataclass
class AssocPlusElement:
    arity: int
    coeff: Fraction


def project_assoc(x: OperadElement) -> AssocPlusElement:
    """Image under the arity-preserving projection killing every honest
    p-generator, sending m to the arity-N basis operation and j to 1."""
    grading = x.grading()
    if grading is None:
        return AssocPlusElement(0, Fraction(0))
    ar, deg = grading
    if deg != 0:
        return AssocPlusElement(ar, Fraction(0))
    total = Fraction(0)
    for t, c in x.terms.items():
        if _p_free(t):
            total += c
    return AssocPlusElement(ar, total)


def _p_free(t):
    if t.kind == "p":
        return False
    return all(_p_free(c) for c in t.children)


def h0_representative_tree(n_arity):
    """The slot-free representative whose class spans H^0: m_N, id, or j."""
    if n_arity == 0:
        return T.J
    if n_arity == 1:
        return T.LEAF
    return T.m_tree([T.LEAF] * n_arity)


# -- truncated complexes -----------------------------------------------------

def operad_complex(n_arity, q_max, degree_min, mode, fld=QQ, sign_fault=False):
    """Q-truncated span of arity-N normal trees in degrees
    [degree_min - 1, 1] with the assembled differential.

    The lowest stored degree is an uncertified edge; degrees in
    [degree_min, 0] are certified.  Raises ComplexError when the assembled
    d^2 fails (a sign or normalization bug, or an injected fault).
    """
    basis = T.enumerate_trees(n_arity, q_max, degree_min - 1, mode)
    by_deg = {}
    for t in basis:
        by_deg.setdefault(T.degree(t), []).append(t)
    lo = degree_min - 1
    dims = {d: len(by_deg.get(d, [])) for d in range(lo, 2)}
    labels = {d: [T.encode(t) for t in by_deg.get(d, [])] for d in range(lo, 1)}
    index = {d: {t: i for i, t in enumerate(by_deg.get(d, []))} for d in range(lo, 2)}
    diffs = {}
    for d in range(lo, 1):
        ent = {}
        for col, t in enumerate(by_deg.get(d, [])):
            for nt, c in tree_differential(t, mode, sign_fault).items():
                row = index.get(d + 1, {}).get(nt)
                if row is None:
                    if d == lo - 1:
                        continue
                    raise AssertionError(
                        f"differential left the truncated basis at degree {d}: "
                        f"{T.encode(t)} -> {T.encode(nt)} "
                        f"(Q={T.q_weight(nt)}, q_max={q_max})")
                ent[(row, col)] = fld.from_fraction(c)
        diffs[d] = SparseMatrix(dims[d + 1], dims[d], ent, fld)
    cx = GradedComplex(fld, dims, diffs, complete=False, labels=labels)
    try:
        cx.validate()
    except ComplexError as exc:
        raise ComplexError(
            f"operad complex (N={n_arity}, Q<={q_max}, mode={mode}): {exc}") from exc
    return cx


def d_squared_witness(n_arity, q_max, degree_min, mode, sign_fault=False):
    """First basis tree with d(d(t)) != 0 under the given (possibly faulted)
    signs, or None when the suite is clean.

    Runs over every normal tree with the given arity, Q <= q_max and degree
    >= degree_min; d is evaluated exactly on elements, so no truncation
    enters the check itself.
    """
    for t in T.enumerate_trees(n_arity, q_max, degree_min, mode):
        acc = {}
        for s, c in tree_differential(t, mode, sign_fault).items():
            for s2, c2 in tree_differential(s, mode, sign_fault).items():
                v = acc.get(s2, 0) + c * c2
                if v:
                    acc[s2] = v
                else:
                    del acc[s2]
        if acc:
            return t, OperadElement(mode, {k: Fraction(v) for k, v in acc.items()})
    return None


@dataclass
class CohomologyReport:
    mode: str
    n_arity: int
    window: tuple
    q_values: tuple
    dims_by_q: dict      # q -> {degree: dim or None}
    basis_sizes: dict    # q -> total basis size

    def dims(self):
        """Dimensions at the largest truncation."""
        return self.dims_by_q[self.q_values[-1]]

    def stabilized(self):
        """degree -> True when the two largest truncations agree."""
        if len(self.q_values) < 2:
            return {d: False for d in self.dims()}
        a = self.dims_by_q[self.q_values[-2]]
        b = self.dims_by_q[self.q_values[-1]]
        return {d: (a.get(d) is not None and a.get(d) == b.get(d)) for d in b}

    def matches_assoc_plus(self):
        """True when every stabilized degree shows the one-dimensional
        degree-0 cohomology of the single-operation-per-arity operad."""
        stab = self.stabilized()
        dims = self.dims()
        for d, dim in dims.items():
            if not stab.get(d):
                return False
            if dim != (1 if d == 0 else 0):
                return False
        return True


def truncated_cohomology(n_arity, q_values, window, mode, fld=QQ):
    """Cohomology dimensions over a range of Q-truncations with a
    stabilization report; window must sit inside the certified degrees."""
    q_values = tuple(sorted(q_values))
    lo, hi = window
    if hi > 0:
        raise ValueError("window must end at degree <= 0")
    dims_by_q = {}
    sizes = {}
    for q in q_values:
        cx = operad_complex(n_arity, q, lo, mode, fld)
        dims_by_q[q] = cx.cohomology_dims(window=window, check=False)
        sizes[q] = cx.total_dim()
    return CohomologyReport(mode, n_arity, (lo, hi), q_values, dims_by_q, sizes)


def stabilized_cohomology(n_arity, q_limit, window, mode, fld=QQ, q_start=1):
    """Walk the Q-truncation upward until two consecutive truncations agree
    on every window degree, then stop.  Returns the CohomologyReport of the
    computed truncations (whose stabilized() flags record the outcome);
    gives up at q_limit."""
    lo, hi = window
    dims_by_q = {}
    sizes = {}
    qs = []
    prev = None
    for q in range(q_start, q_limit + 1):
        cx = operad_complex(n_arity, q, lo, mode, fld)
        cur = cx.cohomology_dims(window=window, check=False)
        qs.append(q)
        dims_by_q[q] = cur
        sizes[q] = cx.total_dim()
        if prev is not None and all(
                prev.get(d) is not None and prev.get(d) == cur.get(d)
                for d in cur):
            break
        prev = cur
    return CohomologyReport(mode, n_arity, (lo, hi), tuple(qs), dims_by_q, sizes)


def h0_class_is_p_free_rep(n_arity, q_max, mode, fld=QQ, degree_min=-2):
    """Checks dim H^0 = 1 with the class of m_N / id / j as generator:
    the representative is a cocycle (degree reasons) and must not be a
    coboundary."""
    cx = operad_complex(n_arity, q_max, degree_min, mode, fld)
    h0 = cx.cohomology_dims(window=(0, 0), check=False)[0]
    if h0 != 1:
        return False
    rep = h0_representative_tree(n_arity)
    labels = cx.labels[0]
    target = {labels.index(T.encode(rep)): fld.one}
    dm1 = cx.differential(-1)
    return solve(dm1, target) is None


# -- auxiliary word complexes -------------------------------------------------

@dataclass
class ProofComplex:
    kind: str           # "Kplain" | "K1" | "K2"
    params: dict
    complex: GradedComplex


def type_I_segment_complex(i_max, fld=QQ):
    """The alternating id/0 complex on segments of i collapsible unit
    positions, i = 1..i_max placed in degree -i.  Degrees >= 0 are stored
    as zero; the bottom edge is an uncertified truncation edge."""
    if i_max < 1:
        raise ValueError("i_max >= 1")
    dims = {1: 0, 0: 0}
    diffs = {}
    labels = {}
    for i in range(1, i_max + 1):
        dims[-i] = 1
        labels[-i] = [f"seg{i}"]
    for i in range(2, i_max + 1):
        if i % 2 == 0:
            diffs[-i] = SparseMatrix(1, 1, {(0, 0): fld.one}, fld)
        else:
            diffs[-i] = SparseMatrix.zero(1, 1, fld)
    cx = GradedComplex(fld, dims, diffs, complete=False, labels=labels)
    cx.validate()
    return ProofComplex("Kplain", {"i_max": i_max}, cx)


def _word_degree(word):
    return -sum(n - 1 for n in word)


def cofree_cobar_complex(n_max, fld=QQ):
    """Tensor words in the 0-ary unit-train generators p_1, p_2, ... with
    total index <= n_max; differential splits letters with the sign rules

        d(p_n) = sum_{i=1}^{n-1} (-1)^(i-1) p_i (x) p_{n-i}

    extended as a derivation with the Koszul sign over earlier letters
    (letter p_n has degree -(n-1)).  The total index is preserved by d, so
    the truncation is an honest finite complex; it is quasi-isomorphic to
    the span of p_1 in degree 0."""
    if n_max < 1:
        raise ValueError("n_max >= 1")
    words = []

    def gen(prefix, remaining):
        for n in range(1, remaining + 1):
            w = prefix + (n,)
            words.append(w)
            gen(w, remaining - n)

    gen((), n_max)
    by_deg = {}
    for w in words:
        by_deg.setdefault(_word_degree(w), []).append(w)
    for d in by_deg:
        by_deg[d].sort()
    degs = sorted(by_deg)
    dims = {d: len(by_deg[d]) for d in degs}
    labels = {d: ["(x)".join(f"p{n}" for n in w) for w in by_deg[d]]
              for d in degs}
    index = {d: {w: i for i, w in enumerate(by_deg[d])} for d in degs}
    diffs = {}
    for d in degs:
        if d + 1 not in dims:
            if by_deg[d] and any(_diff_word(w) for w in by_deg[d]):
                raise AssertionError("differential left the stored degrees")
            continue
        ent = {}
        for col, w in enumerate(by_deg[d]):
            for w2, c in _diff_word(w).items():
                row = index[d + 1][w2]
                prev = ent.get((row, col), fld.zero)
                ent[(row, col)] = fld.add(prev, fld.from_int(c))
        diffs[d] = SparseMatrix(dims[d + 1], dims[d],
                                {k: v for k, v in ent.items()
                                 if not fld.is_zero(v)}, fld)
    cx = GradedComplex(fld, dims, diffs, complete=True, labels=labels)
    cx.validate()
    return ProofComplex("K2", {"n_max": n_max}, cx)


def _diff_word(word):
    out = {}
    koszul = 0
    for i, n in enumerate(word):
        if n >= 2:
            for t in range(1, n):
                w2 = word[:i] + (t, n - t) + word[i + 1:]
                c = (-1) ** (koszul + t - 1)
                v = out.get(w2, 0) + c
                if v:
                    out[w2] = v
                else:
                    del out[w2]
        koszul = (koszul + n - 1) % 2
    return out


def type_II_word_complex(w_max, fld=QQ):
    """Words p_{n_1} ... p_{n_k} . [p with a leading run of i unit inputs and
    a fixed block of >= 2 operadic inputs], modelling the second family of
    word complexes with the full (unfiltered) differential: letters both
    split and, when even, collapse by one.  Truncated by total weight
    sum(n_j) + i <= w_max, which d never increases, so this is an honest
    subcomplex of the full object."""
    if w_max < 0:
        raise ValueError("w_max >= 0")
    words = []

    def gen(prefix, remaining):
        for i in range(0, remaining + 1):
            words.append((prefix, i))
        for n in range(1, remaining + 1):
            gen(prefix + (n,), remaining - n)

    gen((), w_max)
    by_deg = {}
    for w in words:
        prefix, i = w
        d = -(sum(n - 1 for n in prefix) + i)
        by_deg.setdefault(d, []).append(w)
    for d in by_deg:
        by_deg[d].sort()
    degs = sorted(by_deg)
    dims = {d: len(by_deg[d]) for d in degs}
    dims[1] = 0
    index = {d: {w: i for i, w in enumerate(by_deg[d])} for d in degs}

    def diff_w(w):
        prefix, i = w
        out = {}
        # prefix letters: cobar splits plus the even-letter collapse
        for w2, c in _diff_word(prefix).items():
            key = (w2, i)
            out[key] = out.get(key, 0) + c
        koszul = 0
        for jx, n in enumerate(prefix):
            if n % 2 == 0:
                w2 = prefix[:jx] + (n - 1,) + prefix[jx + 1:]
                key = (w2, i)
                out[key] = out.get(key, 0) - (-1) ** koszul
            koszul = (koszul + n - 1) % 2
        sigma = (-1) ** (sum(n - 1 for n in prefix) % 2)
        # the leading unit run of the last factor collapses when odd
        if i % 2 == 1:
            key = (prefix, i - 1)
            out[key] = out.get(key, 0) - sigma
        # or splits off a unit-train letter
        for t in range(1, i + 1):
            key = (prefix + (t,), i - t)
            out[key] = out.get(key, 0) + sigma * ((-1) ** (t - 1))
        return {k: v for k, v in out.items() if v}

    diffs = {}
    for d in degs:
        ent = {}
        for col, w in enumerate(by_deg[d]):
            for w2, c in diff_w(w).items():
                row = index.get(d + 1, {}).get(w2)
                if row is None:
                    raise AssertionError("type II differential left the basis")
                ent[(row, col)] = fld.from_int(c)
        diffs[d] = SparseMatrix(dims.get(d + 1, 0), dims[d], ent, fld)
    cx = GradedComplex(fld, dims, diffs, complete=False,
                       labels={d: [repr(w) for w in by_deg[d]] for d in degs})
    cx.validate()
    return ProofComplex("K1", {"w_max": w_max}, cx)
