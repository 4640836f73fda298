"""Text formats: TetGen ``.node/.ele/.face``, OFF, chains, curves and weights.

Chain files list one simplex per line: its vertex ids followed by an integer
coefficient.  Ids given out of increasing order denote the simplex with that
orientation, so the coefficient picks up the sign of the sorting
permutation.  Repeated simplices are summed.  ``#`` starts a comment.

Curve files hold one point per line; an optional first line ``closed`` or
``open`` (default) says whether the last point joins the first.

Weight files hold ``vertex ids... weight`` lines; the dimension is read off
the number of ids.  Simplices that are not listed get weight 1.
"""

from __future__ import annotations

import os
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

from .deform import PLCurve
from .errors import (
    InconsistentIndexing,
    NonIntegerCoefficient,
    NonTriangularFace,
    ParseError,
    UnknownSimplex,
)
from .rational import parse_rational
from .simplicial import Chain, SimplicialComplex, build_complex, permutation_sign


def _data_lines(path):
    """``(line number, tokens)`` for every non-empty line with comments stripped."""
    with open(path) as fh:
        for no, raw in enumerate(fh, start=1):
            toks = raw.split("#", 1)[0].split()
            if toks:
                yield no, toks


def _ints(toks, no, path, what):
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise ParseError(f"expected integer {what}, got {' '.join(toks)!r}", no, path) from None


def _floats(toks, no, path):
    try:
        return [float(t) for t in toks]
    except ValueError:
        raise ParseError(f"expected coordinates, got {' '.join(toks)!r}", no, path) from None


# ---------------------------------------------------------------------------
# TetGen
# ---------------------------------------------------------------------------


def _tetgen_node(path):
    lines = _data_lines(path)
    try:
        no, head = next(lines)
    except StopIteration:
        raise ParseError("empty .node file", None, path) from None
    count, dim = _ints(head[:2], no, path, "header")
    pts, ids = [], []
    for no, toks in lines:
        if len(toks) < dim + 1:
            raise ParseError(f"node line needs an id and {dim} coordinates", no, path)
        ids.append(_ints(toks[:1], no, path, "node id")[0])
        pts.append(_floats(toks[1 : dim + 1], no, path))
    if len(pts) != count:
        raise ParseError(f"header announces {count} nodes, found {len(pts)}", None, path)
    base = ids[0] if ids else 0
    if base not in (0, 1):
        raise InconsistentIndexing(f"first node id is {base}; expected 0 or 1", None, path)
    if ids != list(range(base, base + count)):
        raise InconsistentIndexing("node ids are not consecutive", None, path)
    return np.array(pts, dtype=float).reshape(count, dim), base


def _tetgen_cells(path, per_cell_default, base, nv):
    lines = _data_lines(path)
    try:
        no, head = next(lines)
    except StopIteration:
        raise ParseError("empty file", None, path) from None
    count = _ints(head[:1], no, path, "header")[0]
    per = per_cell_default
    if per_cell_default == 4 and len(head) > 1:
        per = _ints(head[1:2], no, path, "header")[0]
        if per != 4:
            raise ParseError(f"only 4-node tetrahedra are supported, got {per}", no, path)
    cells = []
    for no, toks in lines:
        vals = _ints(toks[: per + 1], no, path, "vertex ids")
        if len(vals) < per + 1:
            raise ParseError(f"expected an id and {per} vertex ids", no, path)
        verts = [v - base for v in vals[1:]]
        for v in verts:
            if not 0 <= v < nv:
                raise InconsistentIndexing(f"vertex id {v + base} out of range for {base}-based ids", no, path)
        cells.append((tuple(verts), no))
    if len(cells) != count:
        raise ParseError(f"header announces {count} entries, found {len(cells)}", None, path)
    return cells


def _tetgen_paths(node_path, ele_path=None, face_path=None):
    node_path = Path(node_path)
    if node_path.suffix not in (".node", ".ele", ".face"):
        stem = node_path
    else:
        stem = node_path.with_suffix("")
    node = stem.with_suffix(".node")
    ele = Path(ele_path) if ele_path else stem.with_suffix(".ele")
    face = Path(face_path) if face_path else None
    if face is None and stem.with_suffix(".face").exists():
        face = stem.with_suffix(".face")
    return node, ele, face


def parse_tetgen(node_path, ele_path=None, face_path=None):
    """``(complex, face chain or None)``; missing ``.ele``/``.face`` paths are derived from the ``.node`` stem."""
    node, ele, face = _tetgen_paths(node_path, ele_path, face_path)
    coords, base = _tetgen_node(node)
    tets = _tetgen_cells(ele, 4, base, len(coords))
    K = build_complex([t for t, _ in tets], coords)
    chain = None
    if face is not None and Path(face).exists():
        acc = {}
        for tri, no in _tetgen_cells(face, 3, base, len(coords)):
            if tuple(sorted(tri)) not in K:
                raise UnknownSimplex(f"face {tri} is not a triangle of the mesh", tri, no, face)
            idx = K.index(tri)
            acc[idx] = acc.get(idx, 0) + permutation_sign(tri)
        chain = Chain(2, K.count(2), acc)
    return K, chain


def write_tetgen(K: SimplicialComplex, stem, base: int = 1, faces: Chain | None = None) -> None:
    stem = Path(stem)
    X = K.coords
    q = X.shape[1]
    node = [f"{len(X)} {q} 0 0"] + [f"{i + base} " + " ".join(repr(float(v)) for v in p) for i, p in enumerate(X)]
    tets = K.simplices(3)
    ele = [f"{len(tets)} 4 0"] + [f"{i + base} " + " ".join(str(v + base) for v in t) for i, t in enumerate(tets)]
    atomic_write(stem.with_suffix(".node"), "\n".join(node) + "\n")
    atomic_write(stem.with_suffix(".ele"), "\n".join(ele) + "\n")
    if faces is not None:
        rows = []
        for idx, c in faces.items():
            tri = K.simplex(2, idx)
            if c < 0:
                tri = (tri[1], tri[0], tri[2])
            for _ in range(abs(c)):
                rows.append(" ".join(str(v + base) for v in tri))
        lines = [f"{len(rows)} 0"] + [f"{i + base} {r}" for i, r in enumerate(rows)]
        atomic_write(stem.with_suffix(".face"), "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# OFF
# ---------------------------------------------------------------------------


def parse_off(path) -> SimplicialComplex:
    lines = _data_lines(path)
    try:
        no, head = next(lines)
    except StopIteration:
        raise ParseError("empty OFF file", None, path) from None
    if not head[0].upper().endswith("OFF"):
        raise ParseError(f"missing OFF header, got {head[0]!r}", no, path)
    counts = head[1:]
    if not counts:
        try:
            no, counts = next(lines)
        except StopIteration:
            raise ParseError("missing OFF counts line", None, path) from None
    nv, nf = _ints(counts[:2], no, path, "counts")
    pts, faces = [], []
    for no, toks in lines:
        if len(pts) < nv:
            pts.append(_floats(toks[:3], no, path))
            continue
        if len(faces) >= nf:
            break
        vals = _ints(toks, no, path, "face")
        if vals[0] != 3:
            raise NonTriangularFace(f"face with {vals[0]} vertices", no, path)
        tri = vals[1:4]
        if len(tri) != 3:
            raise ParseError("truncated face line", no, path)
        if any(not 0 <= v < nv for v in tri):
            raise InconsistentIndexing(f"face refers to vertex outside 0..{nv - 1}", no, path)
        faces.append(tuple(tri))
    if len(pts) != nv or len(faces) != nf:
        raise ParseError(f"expected {nv} vertices and {nf} faces, found {len(pts)} and {len(faces)}", None, path)
    return build_complex(faces, np.array(pts, dtype=float).reshape(nv, 3))


def write_off(K: SimplicialComplex, path) -> None:
    X = K.coords
    if X.shape[1] < 3:
        X = np.hstack([X, np.zeros((len(X), 3 - X.shape[1]))])
    tris = K.simplices(2)
    out = ["OFF", f"{len(X)} {len(tris)} 0"]
    out += [" ".join(repr(float(v)) for v in p[:3]) for p in X]
    out += [f"3 {a} {b} {c}" for a, b, c in tris]
    atomic_write(path, "\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# chains, curves, weights
# ---------------------------------------------------------------------------


def parse_chain(path, K: SimplicialComplex, d: int) -> Chain:
    acc: dict[int, int] = {}
    for no, toks in _data_lines(path):
        if len(toks) != d + 2:
            raise ParseError(f"expected {d + 1} vertex ids and a coefficient", no, path)
        verts = tuple(_ints(toks[:-1], no, path, "vertex ids"))
        try:
            coeff = int(toks[-1])
        except ValueError:
            raise NonIntegerCoefficient(f"coefficient {toks[-1]!r} is not an integer", no, path) from None
        if len(set(verts)) != len(verts):
            raise ParseError(f"repeated vertex in {verts}", no, path)
        key = tuple(sorted(verts))
        if key not in K:
            raise UnknownSimplex(f"{d}-simplex {verts} is not in the complex", verts, no, path)
        idx = K.index(key)
        acc[idx] = acc.get(idx, 0) + permutation_sign(verts) * coeff
    return Chain(d, K.count(d), acc)


def format_chain(K: SimplicialComplex, c: Chain) -> str:
    return "".join(" ".join(map(str, K.simplex(c.dim, i))) + f" {v}\n" for i, v in c.items())


def write_chain(K: SimplicialComplex, c: Chain, path) -> None:
    atomic_write(path, format_chain(K, c))


def parse_curve(path) -> PLCurve:
    closed = False
    pts = []
    for no, toks in _data_lines(path):
        if not pts and toks[0].lower() in ("closed", "open"):
            closed = toks[0].lower() == "closed"
            continue
        pts.append(_floats(toks, no, path))
    if len({len(p) for p in pts}) > 1:
        raise ParseError("points of different dimensions", None, path)
    try:
        return PLCurve(np.array(pts, dtype=float), closed)
    except ValueError as exc:
        raise ParseError(str(exc), None, path) from None


def write_curve(curve: PLCurve, path) -> None:
    lines = ["closed" if curve.closed else "open"] + [" ".join(repr(float(v)) for v in p) for p in curve.points]
    atomic_write(path, "\n".join(lines) + "\n")


def parse_weights(path, K: SimplicialComplex, dim: int) -> tuple[Fraction, ...]:
    w = [Fraction(1)] * K.count(dim)
    for no, toks in _data_lines(path):
        verts = _ints(toks[:-1], no, path, "vertex ids")
        if len(verts) != dim + 1:
            continue
        key = tuple(sorted(verts))
        if key not in K:
            raise UnknownSimplex(f"simplex {tuple(verts)} is not in the complex", tuple(verts), no, path)
        try:
            w[K.index(key)] = parse_rational(toks[-1])
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad weight {toks[-1]!r}", no, path) from None
    return tuple(w)


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the same directory and rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
