"""The free weakly unital dg category on a finite dg graph, truncated.

Hom spaces are spanned by pairs (normal tree, chain of graph edges); the
tree's leaves consume the chain left to right.  Truncation bounds the
tree's unit weight, the chain length, and (optionally) the total degree
from below; any operation whose exact result leaves the stored span raises
TruncationOverflow -- the explicit refusal.  There is no lossy mode: the
span killed by a Q- or degree-cut is not a dg ideal (the differential's
contraction terms lower Q), so no finite quotient exists along these
truncations and partial exactness is the honest semantics.  Callers that
audit axioms or probe universal properties simply skip refused tuples and
report the skip count.
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import treeops as T
from ..exactlinalg import QQ, GradedComplex, SparseMatrix
from ..wuoperad import tree_differential
from .core import CategoryError, Mor, TruncationOverflow, WuCatBase, \
    evaluate_tree
from .functors import WuFunctor


@dataclass
class DgGraph:
    """Finite dg graph: objects plus a graded complex of edges per ordered
    pair.  No units, no composition."""
    objects: tuple
    homs: dict  # (x, y) -> GradedComplex

    def hom(self, x, y):
        cx = self.homs.get((x, y))
        if cx is None:
            return GradedComplex(QQ, {}, {}, complete=True)
        return cx

    def edge_basis(self, x, y):
        cx = self.hom(x, y)
        return [(x, y, d, i) for d in sorted(cx.dims) for i in range(cx.dims[d])]

    def validate(self):
        for cx in self.homs.values():
            cx.validate()
        return True


def forgetful_graph(cat) -> DgGraph:
    """U: drop composition, units and the tower, keeping the hom complexes."""
    homs = {}
    for x in cat.objects:
        for y in cat.objects:
            cx = cat.hom(x, y)
            if cx.dims:
                homs[(x, y)] = cx
    return DgGraph(tuple(cat.objects), homs)


@dataclass(frozen=True)
class FreeBudget:
    q_max: int = 2
    max_chain: int = 2
    degree_min: int | None = None  # exact mode only; quotient derives it


class FreeWuCat(WuCatBase):
    def __init__(self, graph: DgGraph, budget: FreeBudget, mode=T.MODE_O,
                 fld=QQ, name="free"):
        if budget.q_max < 1:
            raise CategoryError("budget needs q_max >= 1 (units carry weight 1)")
        graph.validate()
        self.graph = graph
        self.budget = budget
        self.mode = mode
        self.field = fld
        self.objects = tuple(graph.objects)
        self.name = name
        self.n_max = budget.q_max + 1
        self._edge_deg = {}
        for (x, y), cx in graph.homs.items():
            for d in cx.dims:
                if cx.dims[d]:
                    self._edge_deg[(x, y, d)] = cx.dims[d]
        self._build_basis()

    # -- basis ---------------------------------------------------------------

    def _chains(self, x, y, length):
        """Composable chains of `length` basis edges from x to y; chains
        compose left to right (first edge ends at y)."""
        if length == 0:
            return [()] if x == y else []
        out = []
        for mid in self.objects:
            for e in self.graph.edge_basis(mid, y):
                for rest in self._chains(x, mid, length - 1):
                    out.append((e,) + rest)
        return out

    def _build_basis(self):
        b = self.budget
        # trees with bounded unit weight and arity have bounded total
        # p-weight, so all degrees are captured by a safe floor
        tree_floor = -(3 * b.q_max + 2 * b.max_chain)
        trees_by_ar = {ar: T.enumerate_trees(ar, b.q_max, tree_floor, self.mode)
                       for ar in range(b.max_chain + 1)}
        for ar, trees in trees_by_ar.items():
            if any(T.degree(t) <= tree_floor + 1 for t in trees):
                raise AssertionError("tree degree floor estimate too small")
        deg_min = b.degree_min
        self.basis = {}
        self.index = {}
        for x in self.objects:
            for y in self.objects:
                items = []
                for ar, trees in trees_by_ar.items():
                    for chain in self._chains(x, y, ar):
                        cdeg = sum(e[2] for e in chain)
                        for t in trees:
                            total = T.degree(t) + cdeg
                            if deg_min is None or total >= deg_min:
                                items.append((total, t, chain))
                items.sort(key=lambda it: (it[0], T.encode(it[1]), it[2]))
                by_deg = {}
                for total, t, chain in items:
                    by_deg.setdefault(total, []).append((t, chain))
                self.basis[(x, y)] = by_deg
                self.index[(x, y)] = {
                    d: {tc: i for i, tc in enumerate(lst)}
                    for d, lst in by_deg.items()}
        self._hom_cache = {}

    def element(self, x, y, pairs):
        """Mor from a dict (tree, chain) -> coefficient; over-budget pairs
        are dropped (quotient) or rejected (exact)."""
        F = self.field
        by_deg = {}
        for (t, chain), c in pairs.items():
            if F.is_zero(c):
                continue
            d = T.degree(t) + sum(e[2] for e in chain)
            idx = self.index[(x, y)].get(d, {}).get((t, chain))
            if idx is None:
                raise TruncationOverflow(
                    f"element leaves the truncated span: {T.encode(t)} "
                    f"with chain {chain}")
            by_deg.setdefault(d, {})[idx] = c
        if not by_deg:
            return self.zero_mor(x, y, 0)
        if len(by_deg) > 1:
            raise CategoryError("inhomogeneous element")
        d, vec = next(iter(by_deg.items()))
        return Mor.make(x, y, d,
                        {i: F.from_int(v) if isinstance(v, int) else v
                         for i, v in vec.items()}, F)

    def basis_pair(self, x, y, deg, idx):
        return self.basis[(x, y)][deg][idx]

    def hom(self, x, y):
        cached = self._hom_cache.get((x, y))
        if cached is not None:
            return cached
        F = self.field
        by_deg = self.basis[(x, y)]
        degs = sorted(by_deg)
        if not degs:
            cx = GradedComplex(F, {}, {}, complete=True)
            self._hom_cache[(x, y)] = cx
            return cx
        dims = {d: len(by_deg[d]) for d in degs}
        dims[degs[-1] + 1] = dims.get(degs[-1] + 1, 0)
        labels = {d: [f"{T.encode(t)}@{chain}" for t, chain in by_deg[d]]
                  for d in degs}
        diffs = {}
        for d in degs:
            ent = {}
            for col, (t, chain) in enumerate(by_deg[d]):
                img = self._d_pair(t, chain)
                for (t2, c2), coeff in img.items():
                    row = self.index[(x, y)].get(d + 1, {}).get((t2, c2))
                    if row is None:
                        raise AssertionError(
                            "free-category differential left the span")
                    prev = ent.get((row, col), F.zero)
                    val = F.add(prev, F.from_int(coeff) if isinstance(coeff, int)
                                else coeff)
                    if F.is_zero(val):
                        ent.pop((row, col), None)
                    else:
                        ent[(row, col)] = val
            diffs[d] = SparseMatrix(dims.get(d + 1, 0), dims[d], ent, F)
        # with no degree cut the span is everything reachable (complete);
        # a degree-windowed span has unknown dims below the window
        cx = GradedComplex(F, dims, diffs,
                           complete=self.budget.degree_min is None,
                           labels=labels)
        self._hom_cache[(x, y)] = cx
        return cx

    def _d_pair(self, t, chain):
        """d(tree (x) chain) as dict (tree, chain) -> scalar."""
        F = self.field
        out = {}

        def accum(t2, c2, coeff):
            key = (t2, c2)
            s = F.add(out.get(key, F.zero), coeff)
            if F.is_zero(s):
                out.pop(key, None)
            else:
                out[key] = s

        for t2, c in tree_differential(t, self.mode).items():
            accum(t2, chain, F.from_int(c))
        parity = T.degree(t)
        for i, e in enumerate(chain):
            x, y, d, idx = e
            cx = self.graph.hom(x, y)
            m = cx.differential(d)
            if m is not None and m.nnz():
                for (r, cidx), v in m.entries.items():
                    if cidx == idx:
                        e2 = (x, y, d + 1, r)
                        sgn = F.from_int((-1) ** (parity % 2))
                        accum(t, chain[:i] + (e2,) + chain[i + 1:],
                              F.mul(sgn, v))
            parity += d
        return out

    # -- structure -----------------------------------------------------------

    def unit(self, x):
        return self.element(x, x, {(T.J, ()): self.field.one})

    def compose(self, g, f):
        return self._tree_apply(T.m_tree([T.LEAF, T.LEAF]), (g, f))

    def tower_items(self):
        # tower data is implicit (operadic); report nothing table-like
        return ()

    def is_strict(self, n_max=None):
        return False

    def is_cat_prime(self):
        if self.mode == T.MODE_O:
            return False
        try:
            probe = self.p_apply(2, (1, 2), (), at_object=self.objects[0])
        except TruncationOverflow:
            return True
        return not probe.is_zero()

    def p_apply(self, n, slots, args, at_object=None):
        slots = tuple(slots)
        if n == 1 and not slots:
            return args[0]
        if n == 1 and slots == (1,):
            return self.unit(at_object)
        root = T.p_tree(n, slots, [T.LEAF] * (n - len(slots)))
        return self._tree_apply(root, args, at_object=at_object)

    def _tree_apply(self, root, args, at_object=None):
        """Apply a signature tree to elements: graft trees, concatenate
        chains, with the Koszul interleaving sign."""
        F = self.field
        if args:
            x = args[-1].src
            y = args[0].tgt
        else:
            x = y = at_object
        out = {}
        # expand multilinearly over basis pairs of each argument
        expansions = [[(self.basis_pair(a.src, a.tgt, a.deg, i), v)
                       for i, v in a.vec] for a in args]

        def rec(pos, chosen, coeff):
            if pos == len(args):
                trees = [tc[0] for tc in chosen]
                chains = [tc[1] for tc in chosen]
                # Koszul: each argument's tree part crosses the chains of
                # earlier arguments (trees regroup left, chains right)
                sgn = 0
                chain_deg_before = 0
                for (t, chain) in chosen:
                    sgn += T.degree(t) * chain_deg_before
                    chain_deg_before += sum(e[2] for e in chain)
                raw = T.graft_all(root, trees)
                nt = T.normalize(raw, self.mode)
                if nt is None:
                    return
                full_chain = tuple(e for chain in chains for e in chain)
                key = (nt, full_chain)
                c = F.mul(coeff, F.from_int((-1) ** (sgn % 2)))
                s = F.add(out.get(key, F.zero), c)
                if F.is_zero(s):
                    out.pop(key, None)
                else:
                    out[key] = s
                return
            for pair, v in expansions[pos]:
                rec(pos + 1, chosen + (pair,), F.mul(coeff, v))

        rec(0, (), F.one)
        return self.element(x, y, out)


def free_wu_category(graph, q_max=2, max_chain=2, degree_min=None,
                     mode=T.MODE_O, fld=QQ):
    """Free weakly unital dg category on the graph, truncated; refuses
    (raises TruncationOverflow) any operation whose exact result leaves the
    stored span.  With degree_min=None all reachable degrees are stored and
    the hom complexes are complete."""
    return FreeWuCat(graph, FreeBudget(q_max, max_chain, degree_min),
                     mode, fld)


def functor_from_graph_map(free_cat: FreeWuCat, target, obj_map, edge_images):
    """The adjunction's forward direction: extend a graph map to a functor
    on the truncated free category by evaluating trees in the target.

    edge_images maps (x, y, deg, idx) -> Mor of the target with matching
    endpoints and degree.
    """
    for (x, y, deg, idx), img in edge_images.items():
        if (img.src, img.tgt) != (obj_map[x], obj_map[y]) or img.deg != deg:
            raise CategoryError(f"edge image mismatch at {(x, y, deg, idx)}")

    def on_basis(mor):
        out = target.zero_mor(obj_map[mor.src], obj_map[mor.tgt], mor.deg)
        for i, v in mor.vec:
            t, chain = free_cat.basis_pair(mor.src, mor.tgt, mor.deg, i)
            imgs = [edge_images[e] for e in chain]
            val = evaluate_tree(target, t, imgs,
                                at_object=obj_map[mor.src] if not imgs else None)
            out = target.add_mor(out, target.scale_mor(v, val))
        return out

    return WuFunctor.from_callable(free_cat, target, obj_map, on_basis,
                                   name="F(graph map)")


def restrict_to_graph_map(free_cat: FreeWuCat, functor: WuFunctor):
    """The adjunction's backward direction: read off the images of the
    length-1 identity-tree generators."""
    images = {}
    for x in free_cat.objects:
        for y in free_cat.objects:
            for e in free_cat.graph.edge_basis(x, y):
                mor = free_cat.element(x, y, {(T.LEAF, (e,)): free_cat.field.one})
                images[e] = functor.apply(mor)
    return images
