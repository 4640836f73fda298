"""Small named complexes used by the tests, the acceptance suite and the CLI demos."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .simplicial import SimplicialComplex, build_complex


def single_triangle(equilateral: bool = True) -> SimplicialComplex:
    if equilateral:
        coords = [(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)]
    else:
        coords = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    return build_complex([(0, 1, 2)], coords)


def square() -> SimplicialComplex:
    """Unit square split along the diagonal v0-v2."""
    return build_complex([(0, 1, 2), (0, 2, 3)], [(0, 0), (1, 0), (1, 1), (0, 1)])


def tetrahedron() -> SimplicialComplex:
    coords = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    return build_complex([(0, 1, 2, 3)], coords)


def regular_tetrahedron() -> SimplicialComplex:
    coords = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    return build_complex([(0, 1, 2, 3)], np.array(coords, dtype=float) / math.sqrt(8))


def tetrahedron_boundary() -> SimplicialComplex:
    """Boundary of a tetrahedron: a triangulated 2-sphere."""
    coords = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    return build_complex(list(combinations(range(4), 3)), coords)


def octahedron() -> SimplicialComplex:
    coords = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    tris = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    return build_complex(tris, coords)


def torus(n: int = 4, m: int = 4, R: float = 2.0, r: float = 1.0) -> SimplicialComplex:
    """``n x m`` grid on the torus, each square split along one diagonal (needs n, m >= 3)."""
    if n < 3 or m < 3:
        raise ValueError("a grid torus needs at least 3 x 3 vertices")

    def vid(i, j):
        return (i % n) * m + (j % m)

    coords = []
    for i in range(n):
        for j in range(m):
            u, v = 2 * math.pi * i / n, 2 * math.pi * j / m
            coords.append(((R + r * math.cos(v)) * math.cos(u), (R + r * math.cos(v)) * math.sin(u), r * math.sin(v)))
    tris = []
    for i in range(n):
        for j in range(m):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris += [(a, b, c), (a, c, d)]
    return build_complex(tris, coords)


def annulus(segments: int = 4, rings: int = 1, r0: float = 1.0, dr: float = 1.0) -> SimplicialComplex:
    """Planar annulus: ``rings`` bands of ``2·segments`` triangles between concentric circles.

    Vertex ``k·segments + i`` sits on circle ``k`` at angle ``2πi/segments``.
    """
    if segments < 3:
        raise ValueError("an annulus needs at least 3 segments")
    coords = []
    for k in range(rings + 1):
        rad = r0 + k * dr
        for i in range(segments):
            a = 2 * math.pi * i / segments
            coords.append((rad * math.cos(a), rad * math.sin(a)))
    tris = []
    for k in range(rings):
        for i in range(segments):
            j = (i + 1) % segments
            a, b = k * segments + i, k * segments + j
            c, d = a + segments, b + segments
            tris += [(a, c, d), (a, d, b)]
    return build_complex(tris, coords)


def moebius_strip() -> SimplicialComplex:
    """Five-vertex twisted strip: triangles ``{i, i+1, i+2} mod 5``."""
    coords = []
    for i in range(5):
        u = 2 * math.pi * i / 5
        v = 0.5 if i % 2 == 0 else -0.5
        rad = 1 + v * math.cos(u / 2)
        coords.append((rad * math.cos(u), rad * math.sin(u), v * math.sin(u / 2)))
    tris = [(i, (i + 1) % 5, (i + 2) % 5) for i in range(5)]
    return build_complex(tris, coords)


def equilateral_mesh(n: int = 2, edge: float = 1.0) -> SimplicialComplex:
    """Parallelogram of ``2n²`` equilateral triangles."""
    def vid(i, j):
        return j * (n + 1) + i

    coords = [((i + j / 2) * edge, j * math.sqrt(3) / 2 * edge) for j in range(n + 1) for i in range(n + 1)]
    tris = []
    for j in range(n):
        for i in range(n):
            tris += [(vid(i, j), vid(i + 1, j), vid(i, j + 1)), (vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1))]
    return build_complex(tris, coords)


def cube_tets(n: int = 1) -> SimplicialComplex:
    """``n³`` unit cubes, each cut into six tetrahedra around its main diagonal."""
    def vid(i, j, k):
        return (i * (n + 1) + j) * (n + 1) + k

    coords = [(i, j, k) for i in range(n + 1) for j in range(n + 1) for k in range(n + 1)]
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    tets = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for p in perms:
                    cur = [i, j, k]
                    path = [vid(*cur)]
                    for axis in p:
                        cur[axis] += 1
                        path.append(vid(*cur))
                    tets.append(tuple(path))
    return build_complex(tets, np.array(coords, dtype=float))


def random_complex(rng: np.random.Generator, d: int, max_top: int = 8, n_vertices: int | None = None):
    """Random pure complex of ``1..max_top`` distinct ``(d+1)``-simplices on few vertices."""
    k = d + 2
    nv = n_vertices or int(rng.integers(k, k + 4))
    pool = list(combinations(range(nv), k))
    count = int(rng.integers(1, min(max_top, len(pool)) + 1))
    pick = rng.choice(len(pool), size=count, replace=False)
    return build_complex([pool[i] for i in sorted(pick)], n_vertices=nv)


ALL = {
    "triangle": single_triangle,
    "square": square,
    "tetrahedron": tetrahedron,
    "sphere": tetrahedron_boundary,
    "octahedron": octahedron,
    "torus": torus,
    "annulus": annulus,
    "moebius": moebius_strip,
    "equilateral": equilateral_mesh,
    "cube": cube_tets,
}
