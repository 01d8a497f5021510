"""Text serialization for matrices and graded complexes (golden files).

Format:
    matrix <rows> <cols>
    <r> <c> <num>/<den>
    ...

    complex [complete]
    dims <d>:<n> <d>:<n> ...
    <d> <r> <c> <num>/<den>      # entry of the differential leaving degree d
"""

from __future__ import annotations

from .field import QQ
from .sparse import SparseMatrix
from .complexes import GradedComplex


def matrix_to_text(m):
    lines = [f"matrix {m.rows} {m.cols}"]
    F = m.field
    for (r, c) in sorted(m.entries):
        lines.append(f"{r} {c} {F.to_str(m.entries[(r, c)])}")
    return "\n".join(lines) + "\n"


def matrix_from_text(text, field=QQ):
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "matrix":
        raise ValueError("not a matrix block")
    rows, cols = int(head[1]), int(head[2])
    ent = {}
    for ln in lines[1:]:
        r, c, v = ln.split()
        ent[(int(r), int(c))] = field.parse(v)
    return SparseMatrix(rows, cols, ent, field)


def complex_to_text(cx):
    head = "complex complete" if cx.complete else "complex"
    dims = " ".join(f"{d}:{cx.dims[d]}" for d in sorted(cx.dims))
    lines = [head, f"dims {dims}"]
    F = cx.field
    for d in sorted(cx.diff):
        m = cx.diff[d]
        for (r, c) in sorted(m.entries):
            lines.append(f"{d} {r} {c} {F.to_str(m.entries[(r, c)])}")
    return "\n".join(lines) + "\n"


def complex_from_text(text, field=QQ):
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "complex":
        raise ValueError("not a complex block")
    complete = len(head) > 1 and head[1] == "complete"
    if not lines[1].startswith("dims"):
        raise ValueError("missing dims header")
    dims = {}
    for part in lines[1].split()[1:]:
        d, n = part.split(":")
        dims[int(d)] = int(n)
    ents = {}
    for ln in lines[2:]:
        d, r, c, v = ln.split()
        ents.setdefault(int(d), {})[(int(r), int(c))] = field.parse(v)
    diffs = {}
    for d, ent in ents.items():
        diffs[d] = SparseMatrix(dims.get(d + 1, 0), dims.get(d, 0), ent, field)
    return GradedComplex(field, dims, diffs, complete)
