"""Euclidean measurements of simplices and the mesh regularity constants.

For an ``l``-simplex ``σ`` we use

* ``D(σ)``  longest edge,
* ``P(σ)``  sum of the ``(l-1)``-volumes of its facets (two for an edge,
  since a vertex has counting measure one),
* ``r_σ``  half the inradius, where the inradius is ``l·V/P``,
* ``V_l(B_σ)``  volume of the ``l``-ball of radius ``r_σ``.

``κ1 = max D·P/V_l(B_σ)`` and ``κ2 = max D/r_σ`` over all simplices of
dimension ``1..p``; vertices are left out because their diameter is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateSimplex, DimensionOutOfRange
from .simplicial import SimplicialComplex, build_complex

DEGENERACY_TOL = 1e-12


def simplex_volume(points) -> float:
    """``l``-volume of the simplex spanned by ``l+1`` points in R^q (Gram determinant)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    ell = pts.shape[0] - 1
    if ell == 0:
        return 1.0
    if ell > pts.shape[1]:
        raise DimensionOutOfRange(f"{ell} + 1 points cannot span an {ell}-simplex in R^{pts.shape[1]}")
    G = pts[1:] - pts[0]
    det = float(np.linalg.det(G @ G.T))
    return math.sqrt(max(det, 0.0)) / math.factorial(ell)


def volumes(K: SimplicialComplex, ell: int) -> np.ndarray:
    """Volumes of all ``ell``-simplices of ``K`` (vectorized Gram determinants)."""
    simp = np.array(K.simplices(ell), dtype=np.int64).reshape(-1, ell + 1)
    if ell == 0:
        return np.ones(len(simp))
    if len(simp) == 0:
        return np.zeros(0)
    pts = K.coords[simp]
    G = pts[:, 1:, :] - pts[:, :1, :]
    gram = np.einsum("nik,njk->nij", G, G)
    det = np.linalg.det(gram)
    return np.sqrt(np.clip(det, 0.0, None)) / math.factorial(ell)


def ball_volume(ell: int, radius: float) -> float:
    return math.pi ** (ell / 2) * radius**ell / math.gamma(ell / 2 + 1)


def diameter(points) -> float:
    pts = np.asarray(points, dtype=float)
    best = 0.0
    for i, j in combinations(range(len(pts)), 2):
        best = max(best, float(np.linalg.norm(pts[i] - pts[j])))
    return best


def incenter(points) -> np.ndarray:
    """Center of the inscribed ball: vertices weighted by the volume of the opposite facet."""
    pts = np.asarray(points, dtype=float)
    ell = len(pts) - 1
    w = np.array([simplex_volume(np.delete(pts, i, axis=0)) for i in range(ell + 1)])
    return (w[:, None] * pts).sum(axis=0) / w.sum()


@dataclass(frozen=True)
class SimplexGeometry:
    dim: int
    index: int
    volume: float
    diameter: float
    perimeter: float
    inradius_half: float
    ball_volume: float

    @property
    def kappa1_term(self) -> float:
        return self.diameter * self.perimeter / self.ball_volume

    @property
    def kappa2_term(self) -> float:
        return self.diameter / self.inradius_half

    @property
    def expansion_factor(self) -> float:
        """``4(D·P/V(B) + D/r)``, the admissible mass expansion of one center projection."""
        return 4.0 * (self.kappa1_term + self.kappa2_term)


def geometry_of_points(points, dim: int | None = None, index: int = -1) -> SimplexGeometry:
    pts = np.asarray(points, dtype=float)
    ell = len(pts) - 1 if dim is None else dim
    if ell < 1:
        raise DimensionOutOfRange("vertices have no regularity data")
    vol = simplex_volume(pts)
    diam = diameter(pts)
    if diam == 0.0 or vol <= DEGENERACY_TOL * diam**ell:
        raise DegenerateSimplex(f"{ell}-simplex {index} has zero volume", simplex=(ell, index))
    per = sum(simplex_volume(np.delete(pts, i, axis=0)) for i in range(ell + 1))
    r = 0.5 * ell * vol / per
    return SimplexGeometry(ell, index, vol, diam, per, r, ball_volume(ell, r))


def simplex_geometry(K: SimplicialComplex, ell: int, index: int) -> SimplexGeometry:
    simplex = K.simplex(ell, index)
    try:
        return geometry_of_points(K.points(simplex), ell, index)
    except DegenerateSimplex as exc:
        raise DegenerateSimplex(str(exc), simplex=simplex) from None


@dataclass(frozen=True)
class RegularityReport:
    dim: int
    kappa1: float
    kappa2: float
    delta: float
    per_simplex: tuple[SimplexGeometry, ...]
    kappa1_at: tuple[int, int]
    kappa2_at: tuple[int, int]

    @property
    def theta(self) -> float:
        return self.kappa1 + self.kappa2


def regularity_report(K: SimplicialComplex) -> RegularityReport:
    """Per-simplex geometry for dimensions ``1..p`` and the maxima ``κ1, κ2, Δ``."""
    if K.dim < 1:
        raise DimensionOutOfRange("a complex without edges has no regularity constants")
    per = []
    for ell in range(1, K.dim + 1):
        for i in range(K.count(ell)):
            per.append(simplex_geometry(K, ell, i))
    g1 = max(per, key=lambda g: g.kappa1_term)
    g2 = max(per, key=lambda g: g.kappa2_term)
    delta = max(g.diameter for g in per)
    return RegularityReport(K.dim, g1.kappa1_term, g2.kappa2_term, delta, tuple(per),
                            (g1.dim, g1.index), (g2.dim, g2.index))


# ---------------------------------------------------------------------------
# midpoint subdivision
# ---------------------------------------------------------------------------


def midpoint_subdivide(K: SimplicialComplex) -> SimplicialComplex:
    """Split every edge at its midpoint: edges 1-to-2, triangles 1-to-4, tetrahedra 1-to-8.

    The inner octahedron of a tetrahedron is cut along its shortest diagonal
    (first one on ties).  Vertex ``nv + e`` is the midpoint of edge ``e``.
    """
    if K.dim > 3:
        raise DimensionOutOfRange("midpoint subdivision is implemented up to dimension 3")
    nv = K.n_vertices
    edges = K.simplices(1) if K.dim >= 1 else ()
    mid = {e: nv + i for i, e in enumerate(edges)}
    coords = None
    if K.has_coords:
        X = K.coords
        extra = np.array([(X[a] + X[b]) / 2 for a, b in edges]).reshape(-1, X.shape[1])
        coords = np.vstack([X, extra])

    def m(a, b):
        return mid[(a, b) if a < b else (b, a)]

    out = []
    for s in K.maximal_simplices():
        if len(s) == 1:
            out.append(s)
        elif len(s) == 2:
            a, b = s
            out += [(a, m(a, b)), (m(a, b), b)]
        elif len(s) == 3:
            a, b, c = s
            out += [(a, m(a, b), m(a, c)), (b, m(a, b), m(b, c)), (c, m(a, c), m(b, c)),
                    (m(a, b), m(a, c), m(b, c))]
        else:
            out += _split_tet(s, m, coords)
    return build_complex(out, coords, nv + len(edges))


def _split_tet(s, m, coords):
    a, b, c, d = s
    out = [(a, m(a, b), m(a, c), m(a, d)), (b, m(a, b), m(b, c), m(b, d)),
           (c, m(a, c), m(b, c), m(c, d)), (d, m(a, d), m(b, d), m(c, d))]
    diagonals = [((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))]
    if coords is not None:
        lengths = [np.linalg.norm(coords[m(*p)] - coords[m(*q)]) for p, q in diagonals]
        (x, y), (z, w) = diagonals[int(np.argmin(lengths))]
    else:
        (x, y), (z, w) = diagonals[0]
    p, q = m(x, y), m(z, w)
    ring = [m(x, z), m(x, w), m(y, w), m(y, z)]
    for i in range(4):
        out.append((p, q, ring[i], ring[(i + 1) % 4]))
    return out
