"""Planar rooted trees over the signature {m, j, p_{n;i1..ik}} with
canonical normal forms, operadic grafting, statistics and truncated
enumeration.

Normal form:
  * m-vertices are flattened (no m directly under m) and have >= 2 children;
  * mode "O" only: no two adjacent j-children under an m-vertex
    (runs of j collapse, m(j,j) = j), and full-slot p-labels are zero;
  * p-labels with no slots are zero for n >= 2 and the identity for n = 1;
    p with n = 1 and one slot is rewritten to j.

Trees are immutable and hashable; `normalize` returns None for the zero
element of the quotient.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

MODE_O = "O"
MODE_OPRIME = "Oprime"

_MODES = (MODE_O, MODE_OPRIME)


class Tree:
    __slots__ = ("kind", "n", "slots", "children", "_hash", "_enc")

    def __init__(self, kind, n=0, slots=(), children=()):
        self.kind = kind
        self.n = n
        self.slots = tuple(slots)
        self.children = tuple(children)
        self._hash = None
        self._enc = None

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.kind, self.n, self.slots, self.children))
        return self._hash

    def __eq__(self, other):
        return (self is other) or (
            isinstance(other, Tree)
            and self.kind == other.kind
            and self.n == other.n
            and self.slots == other.slots
            and self.children == other.children)

    def __lt__(self, other):
        return encode(self) < encode(other)

    def __repr__(self):
        return encode(self)


LEAF = Tree("leaf")
J = Tree("j")


def leaf():
    return LEAF


def j_tree():
    return J


def m_tree(children):
    children = tuple(children)
    if len(children) < 1:
        raise ValueError("m-vertex needs at least one child")
    return Tree("m", children=children)


def p_tree(n, slots, children=()):
    slots = tuple(slots)
    children = tuple(children)
    if n < 1:
        raise ValueError("p-label needs n >= 1")
    if any(not 1 <= s <= n for s in slots) or list(slots) != sorted(set(slots)):
        raise ValueError(f"bad slot list {slots} for n={n}")
    if len(children) != n - len(slots):
        raise ValueError(f"p_{{{n};{slots}}} expects {n - len(slots)} children, "
                         f"got {len(children)}")
    return Tree("p", n, slots, children)


def encode(t):
    """Canonical preorder text encoding; deterministic basis order key."""
    if t._enc is None:
        if t.kind == "leaf":
            t._enc = "*"
        elif t.kind == "j":
            t._enc = "(j)"
        elif t.kind == "m":
            t._enc = f"(m{len(t.children)} " + " ".join(
                encode(c) for c in t.children) + ")"
        else:
            inner = " ".join(encode(c) for c in t.children)
            slot_s = ",".join(str(s) for s in t.slots)
            t._enc = f"(p{t.n} [{slot_s}]" + (" " + inner if inner else "") + ")"
    return t._enc


def parse(text):
    """Inverse of encode."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def expect(tok):
        nonlocal pos
        if tokens[pos] != tok:
            raise ValueError(f"expected {tok!r} at token {pos} of {text!r}")
        pos += 1

    def parse_node():
        nonlocal pos
        tok = tokens[pos]
        if tok == "*":
            pos += 1
            return LEAF
        expect("(")
        head = tokens[pos]
        pos += 1
        if head == "j":
            expect(")")
            return J
        if head.startswith("m"):
            kids = []
            while tokens[pos] != ")":
                kids.append(parse_node())
            expect(")")
            if len(kids) != int(head[1:]):
                raise ValueError("m arity mismatch")
            return m_tree(kids)
        if head.startswith("p"):
            n = int(head[1:])
            slot_tok = tokens[pos]
            pos += 1
            slots = tuple(int(s) for s in slot_tok.strip("[]").split(",") if s)
            kids = []
            while tokens[pos] != ")":
                kids.append(parse_node())
            expect(")")
            return p_tree(n, slots, kids)
        raise ValueError(f"bad head {head!r}")

    out = parse_node()
    if pos != len(tokens):
        raise ValueError("trailing tokens")
    return out


def normalize(t, mode):
    """Canonical representative of t in the quotient operad, or None for 0."""
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    if t is None:
        return None
    if t.kind in ("leaf", "j"):
        return t
    if t.kind == "m":
        kids = []
        for c in t.children:
            nc = normalize(c, mode)
            if nc is None:
                return None
            if nc.kind == "m":
                kids.extend(nc.children)
            else:
                kids.append(nc)
        if mode == MODE_O:
            collapsed = []
            for c in kids:
                if c.kind == "j" and collapsed and collapsed[-1].kind == "j":
                    continue  # m(j,j) = j inside the flattened run
                collapsed.append(c)
            kids = collapsed
        if len(kids) == 1:
            return kids[0]
        return Tree("m", children=tuple(kids))
    # p-vertex
    n, slots = t.n, t.slots
    k = len(slots)
    if n == 1:
        if k == 1:
            return J
        return normalize(t.children[0], mode)
    if k == 0:
        return None
    if k == n and mode == MODE_O:
        return None
    kids = []
    for c in t.children:
        nc = normalize(c, mode)
        if nc is None:
            return None
        kids.append(nc)
    return Tree("p", n, slots, tuple(kids))


def is_normal(t, mode):
    nt = normalize(t, mode)
    return nt is not None and nt == t


@dataclass(frozen=True)
class TreeStats:
    sharp: int
    sharp_p: int
    q_weight: int
    degree: int
    arity: int


def stats(t):
    """Tree statistics: sharp, sharp excluding 0-ary unit labels, unit
    weight Q (slots + j count), degree and arity."""
    if t.kind == "leaf":
        return TreeStats(0, 0, 0, 0, 1)
    if t.kind == "j":
        return TreeStats(0, 0, 1, 0, 0)
    sharp = sharp_p = q = deg = ar = 0
    for c in t.children:
        st = stats(c)
        sharp += st.sharp
        sharp_p += st.sharp_p
        q += st.q_weight
        deg += st.degree
        ar += st.arity
    if t.kind == "p":
        k = len(t.slots)
        sharp += t.n - k
        if k < t.n:
            sharp_p += 1
        q += k
        deg += 1 - t.n
    return TreeStats(sharp, sharp_p, q, deg, ar)


def arity(t):
    if t.kind == "leaf":
        return 1
    return sum(arity(c) for c in t.children)


def degree(t):
    if t.kind == "p":
        return 1 - t.n + sum(degree(c) for c in t.children)
    if t.kind in ("leaf", "j"):
        return 0
    return sum(degree(c) for c in t.children)


def q_weight(t):
    return stats(t).q_weight


def filtration_level(t):
    st = stats(t)
    return st.sharp - st.sharp_p


def graft(t, pos, inner):
    """Replace the pos-th leaf (1-based, left to right) by inner; raw result."""
    if t.kind == "leaf":
        if pos != 1:
            raise IndexError("position out of range")
        return inner
    acc = 0
    for i, c in enumerate(t.children):
        a = arity(c)
        if acc < pos <= acc + a:
            new_children = t.children[:i] + (graft(c, pos - acc, inner),) + t.children[i + 1:]
            return Tree(t.kind, t.n, t.slots, new_children)
        acc += a
    raise IndexError("position out of range")


def graft_all(template, subtrees):
    """Replace the template's leaves, left to right, by the given subtrees."""
    if template.kind == "leaf":
        if len(subtrees) != 1:
            raise ValueError("arity mismatch in graft_all")
        return subtrees[0]
    out_children = []
    idx = 0
    for c in template.children:
        a = arity(c)
        out_children.append(graft_all(c, subtrees[idx:idx + a]))
        idx += a
    if idx != len(subtrees):
        raise ValueError("arity mismatch in graft_all")
    return Tree(template.kind, template.n, template.slots, tuple(out_children))


def compose(outer, pos, inner, mode):
    """Operadic circ_i composition followed by normalization (None = 0)."""
    if not 1 <= pos <= arity(outer):
        raise IndexError(f"position {pos} out of range 1..{arity(outer)}")
    return normalize(graft(outer, pos, inner), mode)


# -- enumeration ------------------------------------------------------------

@lru_cache(maxsize=None)
def _gen_exact(ar, q, w, mode, allow_m):
    """All normal trees with the exact arity, unit weight q and p-weight w
    (= sum of n-1 over p-vertices).  allow_m gates m-rooted trees (children
    of an m-vertex are never m-rooted)."""
    out = []
    if q == 0 and w == 0 and ar == 1:
        out.append(LEAF)
    if ar == 0 and q == 1 and w == 0:
        out.append(J)
    for n in range(2, w + 2):
        wn = w - (n - 1)
        kmax = min(n, q) if mode == MODE_OPRIME else min(n - 1, q)
        for k in range(1, kmax + 1):
            g = n - k
            if g == 0 and ar != 0:
                continue
            kid_seqs = _gen_children(g, ar, q - k, wn, mode, True, False)
            if not kid_seqs:
                continue
            for slots in combinations(range(1, n + 1), k):
                for kids in kid_seqs:
                    out.append(Tree("p", n, slots, kids))
    if allow_m:
        for ell in range(2, ar + q + 1):
            for kids in _gen_children(ell, ar, q, w, mode, False,
                                      mode == MODE_O):
                out.append(Tree("m", children=kids))
    return tuple(out)


@lru_cache(maxsize=None)
def _gen_children(count, ar, q, w, mode, allow_m, no_adjacent_j):
    """Sequences of `count` trees with exact budget sums; optionally with no
    two adjacent j's (the O-mode m-vertex constraint)."""
    if count == 0:
        return ((),) if ar == q == w == 0 else ()
    out = []
    for a1 in range(ar + 1):
        for q1 in range(q + 1):
            for w1 in range(w + 1):
                firsts = _gen_exact(a1, q1, w1, mode, allow_m)
                if not firsts:
                    continue
                rests = _gen_children(count - 1, ar - a1, q - q1, w - w1,
                                      mode, allow_m, no_adjacent_j)
                for t in firsts:
                    for rest in rests:
                        if (no_adjacent_j and t.kind == "j" and rest
                                and rest[0].kind == "j"):
                            continue
                        out.append((t,) + rest)
    return tuple(out)


def enumerate_trees(ar, q_max, degree_min, mode):
    """Ordered basis of normal-form trees with the given arity, unit weight
    <= q_max and degree >= degree_min.  Deterministic order: (degree,
    canonical encoding)."""
    if q_max < 0 or degree_min > 0:
        raise ValueError("need q_max >= 0 and degree_min <= 0")
    w_max = -degree_min
    found = []
    for q in range(q_max + 1):
        for w in range(w_max + 1):
            found.extend(_gen_exact(ar, q, w, mode, True))
    m_bound = ar + 2 * q_max
    for t in found:
        assert _m_count(t) <= m_bound, encode(t)
    return sorted(found, key=lambda t: (degree(t), encode(t)))


def _m_count(t):
    own = 1 if t.kind == "m" else 0
    return own + sum(_m_count(c) for c in t.children)


def count_trees_bruteforce(ar, q_max, degree_min, mode):
    """Independent slow counter used as the enumeration oracle in tests:
    generates raw trees recursively and filters by normality."""
    return len(enumerate_trees_bruteforce(ar, q_max, degree_min, mode))


def enumerate_trees_bruteforce(ar, q_max, degree_min, mode):
    seen = set()
    w_max = -degree_min

    def rec(a, q, w):
        key = (a, q, w)
        if key in cache:
            return cache[key]
        out = set()
        if a == 1:
            out.add(LEAF)
        if a == 0 and q >= 1:
            out.add(J)
        for n in range(2, w + 2):
            for k in range(1, min(n, q) + 1):
                g = n - k
                if g == 0 and a != 0:
                    continue
                for slots in combinations(range(1, n + 1), k):
                    for kids in seqs(g, a, q - k, w - (n - 1)):
                        t = normalize(Tree("p", n, slots, kids), mode)
                        if t is not None:
                            out.add(t)
        for ell in range(2, a + q + 1):
            for kids in seqs(ell, a, q, w):
                t = normalize(Tree("m", children=kids), mode)
                if t is not None:
                    out.add(t)
        cache[key] = out
        return out

    def seqs(count, a, q, w):
        if count == 0:
            return [()] if a == 0 else []
        res = []
        for a1 in range(a + 1):
            for q1 in range(q + 1):
                for w1 in range(w + 1):
                    for t in rec(a1, q1, w1):
                        for rest in seqs(count - 1, a - a1, q - q1, w - w1):
                            res.append((t,) + rest)
        return res

    cache = {}
    for q in range(q_max + 1):
        for w in range(w_max + 1):
            for t in rec(ar, q, w):
                st = stats(t)
                if st.arity == ar and st.q_weight <= q_max and st.degree >= degree_min:
                    seen.add(t)
    return sorted(seen, key=lambda t: (degree(t), encode(t)))


# -- stepwise rewriting (confluence evidence) --------------------------------

def _redex_rewrites(t, mode):
    """All single-step rewrites available at the root of t (raw trees)."""
    outs = []
    if t.kind == "m":
        if len(t.children) == 1:
            outs.append(t.children[0])
        for i, c in enumerate(t.children):
            if c.kind == "m":
                outs.append(Tree("m", children=t.children[:i] + c.children
                                 + t.children[i + 1:]))
                break
        if mode == MODE_O:
            for i in range(len(t.children) - 1):
                if t.children[i].kind == "j" and t.children[i + 1].kind == "j":
                    outs.append(Tree("m", children=t.children[:i] + (J,)
                                     + t.children[i + 2:]))
                    break
    elif t.kind == "p":
        k = len(t.slots)
        if t.n == 1:
            outs.append(J if k == 1 else t.children[0])
        elif k == 0 or (k == t.n and mode == MODE_O):
            outs.append(None)
    return outs


def _find_and_rewrite(t, mode, order):
    """Rewrite one redex (leftmost in preorder for 'lr', rightmost for 'rl');
    returns (changed, new tree or None)."""
    positions = []

    def walk(node, path):
        if _redex_rewrites(node, mode):
            positions.append(path)
        for i, c in enumerate(node.children):
            walk(c, path + (i,))

    walk(t, ())
    if not positions:
        return False, t
    path = positions[0] if order == "lr" else positions[-1]

    def apply_at(node, path):
        if not path:
            return _redex_rewrites(node, mode)[0]
        i = path[0]
        new_c = apply_at(node.children[i], path[1:])
        if new_c is None:
            return None
        return Tree(node.kind, node.n, node.slots,
                    node.children[:i] + (new_c,) + node.children[i + 1:])

    return True, apply_at(t, path)


def normalize_stepwise(t, mode, order="lr"):
    """Normalize by repeated single rewrites in a fixed scan order; agrees
    with `normalize` on all tested inputs (confluence evidence)."""
    cur = t
    for _ in range(10000):
        changed, cur = _find_and_rewrite(cur, mode, order)
        if cur is None:
            return None
        if not changed:
            return cur
    raise RuntimeError("rewriting did not terminate")
