"""Functors between finite weakly unital dg categories: object map plus
per-hom chain maps, with checkable preservation laws."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .core import CategoryError, Mor


@dataclass
class WuFunctor:
    source: object
    target: object
    obj_map: dict
    # (x, y) -> {deg: {(row_idx, col_idx): scalar}} in hom bases
    blocks: dict = dc_field(default_factory=dict)
    name: str = "F"

    def apply_obj(self, x):
        return self.obj_map[x]

    def apply(self, mor: Mor) -> Mor:
        F = self.source.field
        blk = self.blocks.get((mor.src, mor.tgt), {}).get(mor.deg, {})
        out = {}
        for i, v in mor.vec:
            for (r, c), w in blk.items():
                if c == i:
                    s = F.add(out.get(r, F.zero), F.mul(w, v))
                    if F.is_zero(s):
                        out.pop(r, None)
                    else:
                        out[r] = s
        return Mor.make(self.obj_map[mor.src], self.obj_map[mor.tgt],
                        mor.deg, out, F)

    @classmethod
    def from_callable(cls, source, target, obj_map, fn, name="F"):
        """Tabulate a basis-wise callable into explicit blocks."""
        blocks = {}
        for x in source.objects:
            for y in source.objects:
                cx = source.hom(x, y)
                per_deg = {}
                for deg in cx.dims:
                    ent = {}
                    for i in range(cx.dims[deg]):
                        img = fn(source.basis_mor(x, y, deg, i))
                        if img.deg != deg:
                            raise CategoryError("functor must preserve degree")
                        for r, v in img.vec:
                            ent[(r, i)] = v
                    per_deg[deg] = ent
                blocks[(x, y)] = per_deg
        return cls(source, target, dict(obj_map), blocks, name)

    @classmethod
    def identity(cls, cat):
        return cls.from_callable(cat, cat, {x: x for x in cat.objects},
                                 lambda m: m, name="id")

    def compose_with(self, other):
        """self o other (other first)."""
        return WuFunctor.from_callable(
            other.source, self.target,
            {x: self.obj_map[other.obj_map[x]] for x in other.source.objects},
            lambda m: self.apply(other.apply(m)),
            name=f"{self.name}o{other.name}")


def check_functor(F: WuFunctor, n_max=None, max_tuple_degree=None):
    """Verify chain-map, composition, unit and tower preservation on basis
    data.  Returns (ok, failures list)."""
    src, tgt = F.source, F.target
    n_max = n_max or min(src.n_max, tgt.n_max)
    fails = []
    fld = src.field
    for x in src.objects:
        for y in src.objects:
            cx = src.hom(x, y)
            for deg in cx.dims:
                for i in range(cx.dims[deg]):
                    b = src.basis_mor(x, y, deg, i)
                    if not tgt.eq_mor(F.apply(src.d(b)), tgt.d(F.apply(b))):
                        fails.append(("chain map", x, y, deg, i))
    for x in src.objects:
        if not tgt.eq_mor(F.apply(src.unit(x)), tgt.unit(F.apply_obj(x))):
            fails.append(("unit", x))
    from .core import _composable_pairs
    for (x, y, z), (g, f) in _composable_pairs(src):
        lhs = F.apply(src.compose(g, f))
        rhs = tgt.compose(F.apply(g), F.apply(f))
        if not tgt.eq_mor(lhs, rhs):
            fails.append(("composition", x, y, z))
            break
    from .core import _basis_tuples, _slot_sets
    for n in range(2, n_max + 1):
        done = False
        for slots in _slot_sets(n):
            g = n - len(slots)
            for args, at_obj in _basis_tuples(src, g, max_tuple_degree):
                lhs = F.apply(src.p_apply(n, slots, args, at_object=at_obj))
                rhs = tgt.p_apply(
                    n, slots, tuple(F.apply(a) for a in args),
                    at_object=F.apply_obj(at_obj) if at_obj is not None else None)
                if not tgt.eq_mor(lhs, rhs):
                    fails.append(("tower", n, slots))
                    done = True
                    break
            if done:
                break
    return not fails, fails
