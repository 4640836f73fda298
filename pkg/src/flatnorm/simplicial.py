"""Oriented simplicial complexes, integer chains and boundary matrices.

Every simplex is stored as a strictly increasing tuple of vertex ids; that
tuple *is* its canonical orientation.  Simplices of each dimension are sorted
lexicographically, so the index of a simplex depends only on the set of
simplices in the complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateSimplex,
    DimensionMismatch,
    DimensionOutOfRange,
    IndexOutOfRange,
    MissingCoordinates,
    NegativeWeight,
    UnknownSimplex,
)

Simplex = tuple[int, ...]


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation that sorts ``seq`` (entries must be distinct)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class SimplicialComplex:
    """Immutable finite simplicial complex, optionally embedded in R^q."""

    __slots__ = ("_coords", "_simplices", "_index", "_n_vertices", "_bd_cache")

    def __init__(self, simplices: Sequence[Sequence[Simplex]], coords: np.ndarray | None, n_vertices: int):
        self._simplices = tuple(tuple(level) for level in simplices)
        self._index = tuple({s: i for i, s in enumerate(level)} for level in self._simplices)
        self._n_vertices = n_vertices
        if coords is not None:
            coords = np.array(coords, dtype=float)
            coords.setflags(write=False)
        self._coords = coords
        self._bd_cache: dict[int, BoundaryMatrix] = {}

    # -- basic shape ----------------------------------------------------------

    @property
    def dim(self) -> int:
        """Top dimension ``p``."""
        return len(self._simplices) - 1

    @property
    def ambient_dim(self) -> int | None:
        return None if self._coords is None else int(self._coords.shape[1])

    @property
    def coords(self) -> np.ndarray:
        if self._coords is None:
            raise MissingCoordinates("complex has no vertex coordinates")
        return self._coords

    @property
    def has_coords(self) -> bool:
        return self._coords is not None

    @property
    def n_vertices(self) -> int:
        return self._n_vertices

    def simplices(self, dim: int) -> tuple[Simplex, ...]:
        if dim < 0 or dim > self.dim:
            return ()
        return self._simplices[dim]

    def count(self, dim: int) -> int:
        return len(self.simplices(dim))

    def counts(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self._simplices)

    def simplex(self, dim: int, index: int) -> Simplex:
        return self._simplices[dim][index]

    def index(self, simplex: Iterable[int]) -> int:
        key = tuple(sorted(simplex))
        dim = len(key) - 1
        try:
            return self._index[dim][key]
        except (IndexError, KeyError):
            raise UnknownSimplex(f"simplex {key} is not in the complex", simplex=key) from None

    def __contains__(self, simplex) -> bool:
        key = tuple(sorted(simplex))
        dim = len(key) - 1
        return 0 <= dim <= self.dim and key in self._index[dim]

    def maximal_simplices(self) -> list[Simplex]:
        """Simplices that are not a face of any other simplex (all dimensions)."""
        covered: set[Simplex] = set()
        for dim in range(1, self.dim + 1):
            for s in self._simplices[dim]:
                for i in range(len(s)):
                    covered.add(s[:i] + s[i + 1 :])
        out = []
        for dim in range(self.dim + 1):
            out.extend(s for s in self._simplices[dim] if s not in covered)
        return out

    def is_pure(self) -> bool:
        return all(len(s) == self.dim + 1 for s in self.maximal_simplices())

    def skeleton(self, dim: int) -> "SimplicialComplex":
        return SimplicialComplex(self._simplices[: dim + 1], self._coords, self._n_vertices)

    def points(self, simplex: Simplex) -> np.ndarray:
        return self.coords[list(simplex)]

    # -- chains ---------------------------------------------------------------

    def chain(self, dim: int, coefficients: Mapping | Iterable = ()) -> "Chain":
        """Build a ``dim``-chain.

        Keys may be simplex indices or vertex tuples.  A tuple given in a
        non-increasing order denotes the simplex with that orientation, so its
        coefficient is multiplied by the sign of the sorting permutation.
        """
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        acc: dict[int, int] = {}
        size = self.count(dim)
        for key, value in items:
            if isinstance(key, (int, np.integer)):
                idx, sign = int(key), 1
                if not 0 <= idx < size:
                    raise IndexOutOfRange(f"{dim}-simplex index {idx} out of range [0, {size})")
            else:
                key = tuple(int(v) for v in key)
                if len(key) != dim + 1:
                    raise DimensionMismatch(f"{key} is not a {dim}-simplex")
                if len(set(key)) != len(key):
                    raise DegenerateSimplex(f"repeated vertex in {key}", simplex=key)
                idx, sign = self.index(key), permutation_sign(key)
            acc[idx] = acc.get(idx, 0) + sign * int(value)
        return Chain(dim, size, acc)

    def zero_chain(self, dim: int) -> "Chain":
        return Chain(dim, self.count(dim), {})

    # -- boundary -------------------------------------------------------------

    def boundary_matrix(self, d: int) -> "BoundaryMatrix":
        return boundary_matrix(self, d)

    def __repr__(self) -> str:
        return f"SimplicialComplex(counts={self.counts()}, ambient_dim={self.ambient_dim})"


def build_complex(simplices: Iterable[Iterable[int]], coords=None, n_vertices: int | None = None) -> SimplicialComplex:
    """Close ``simplices`` under taking faces and index everything.

    When ``coords`` is given every coordinate row becomes a vertex, otherwise
    vertices ``0..max_id`` (or ``0..n_vertices-1``) are created.
    """
    tops: list[Simplex] = []
    for s in simplices:
        t = tuple(int(v) for v in s)
        if not t:
            continue
        if len(set(t)) != len(t):
            raise DegenerateSimplex(f"repeated vertex in simplex {t}", simplex=t)
        if min(t) < 0:
            raise IndexOutOfRange(f"negative vertex id in {t}")
        tops.append(tuple(sorted(t)))

    if coords is not None:
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        nv = coords.shape[0]
        if n_vertices is not None and n_vertices != nv:
            raise DimensionMismatch("n_vertices disagrees with coordinate count")
    else:
        nv = n_vertices if n_vertices is not None else (1 + max((max(t) for t in tops), default=-1))
    for t in tops:
        if t[-1] >= nv:
            raise IndexOutOfRange(f"vertex id {t[-1]} in {t} but only {nv} vertices")

    top_dim = max((len(t) - 1 for t in tops), default=0)
    levels: list[set[Simplex]] = [set() for _ in range(top_dim + 1)]
    levels[0].update((v,) for v in range(nv))
    for t in set(tops):
        k = len(t)
        if t in levels[k - 1]:
            continue
        for r in range(2, k + 1):
            levels[r - 1].update(combinations(t, r))
    if coords is not None and coords.shape[1] < top_dim:
        raise DimensionOutOfRange(f"{top_dim}-simplices cannot be embedded in R^{coords.shape[1]}")
    return SimplicialComplex([sorted(level) for level in levels], coords, nv)


@dataclass(frozen=True, eq=False)
class Chain:
    """Sparse integer chain over the elementary ``dim``-simplices of a complex."""

    dim: int
    size: int
    _coeffs: Mapping[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        clean = {}
        for k, v in dict(self._coeffs).items():
            k = int(k)
            if not 0 <= k < self.size:
                raise IndexOutOfRange(f"{self.dim}-simplex index {k} out of range [0, {self.size})")
            if v:
                clean[k] = int(v)
        object.__setattr__(self, "_coeffs", MappingProxyType(dict(sorted(clean.items()))))

    @classmethod
    def from_dense(cls, dim: int, values: Sequence[int]) -> "Chain":
        vals = [int(v) for v in values]
        return cls(dim, len(vals), {i: v for i, v in enumerate(vals) if v})

    @property
    def coefficients(self) -> Mapping[int, int]:
        return self._coeffs

    def items(self):
        return self._coeffs.items()

    def support(self) -> tuple[int, ...]:
        return tuple(self._coeffs)

    def __getitem__(self, idx: int) -> int:
        return self._coeffs.get(idx, 0)

    def __len__(self) -> int:
        return len(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.size, dtype=np.int64)
        for k, v in self._coeffs.items():
            out[k] = v
        return out

    def norm1(self) -> int:
        return sum(abs(v) for v in self._coeffs.values())

    def _check(self, other: "Chain"):
        if not isinstance(other, Chain) or other.dim != self.dim or other.size != self.size:
            raise DimensionMismatch("chains live in different chain groups")

    def __add__(self, other: "Chain") -> "Chain":
        self._check(other)
        acc = dict(self._coeffs)
        for k, v in other.items():
            acc[k] = acc.get(k, 0) + v
        return Chain(self.dim, self.size, acc)

    def __neg__(self) -> "Chain":
        return Chain(self.dim, self.size, {k: -v for k, v in self.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, scalar: int) -> "Chain":
        return Chain(self.dim, self.size, {k: scalar * v for k, v in self.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Chain)
            and self.dim == other.dim
            and self.size == other.size
            and dict(self._coeffs) == dict(other._coeffs)
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.size, tuple(self._coeffs.items())))

    def __repr__(self) -> str:
        return f"Chain(dim={self.dim}, {dict(self._coeffs)})"


@dataclass(frozen=True)
class BoundaryMatrix:
    """Sparse signed incidence matrix of d-simplices (rows) against (d+1)-simplices (columns)."""

    d: int
    n_rows: int
    n_cols: int
    columns: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def entries(self) -> list[tuple[int, int, int]]:
        return [(i, j, s) for j, col in enumerate(self.columns) for i, s in col]

    def rows(self) -> list[list[tuple[int, int]]]:
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.n_rows)]
        for j, col in enumerate(self.columns):
            for i, s in col:
                out[i].append((j, s))
        return out

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.int64)
        for j, col in enumerate(self.columns):
            for i, s in col:
                out[i, j] = s
        return out

    def to_scipy(self):
        from scipy.sparse import csc_matrix

        rows, cols, vals = [], [], []
        for j, col in enumerate(self.columns):
            for i, s in col:
                rows.append(i)
                cols.append(j)
                vals.append(s)
        return csc_matrix((vals, (rows, cols)), shape=self.shape, dtype=np.int64)


def boundary_matrix(K: SimplicialComplex, d: int) -> BoundaryMatrix:
    """Matrix of ``∂_{d+1}``: deleting vertex ``i`` from a (d+1)-simplex gives sign ``(-1)^i``."""
    if not 0 <= d < K.dim:
        raise DimensionOutOfRange(f"need 0 <= d < {K.dim}, got d={d}")
    cached = K._bd_cache.get(d)
    if cached is not None:
        return cached
    row_index = K._index[d]
    cols = []
    for tau in K.simplices(d + 1):
        col = []
        for i in range(len(tau)):
            col.append((row_index[tau[:i] + tau[i + 1 :]], -1 if i % 2 else 1))
        col.sort()
        cols.append(tuple(col))
    B = BoundaryMatrix(d, K.count(d), K.count(d + 1), tuple(cols))
    K._bd_cache[d] = B
    return B


def apply_boundary(B: BoundaryMatrix, s: Chain) -> Chain:
    """Exact product ``B · s``."""
    if s.dim != B.d + 1 or s.size != B.n_cols:
        raise DimensionMismatch(
            f"boundary of {B.d + 1}-chains of length {B.n_cols} applied to a {s.dim}-chain of length {s.size}"
        )
    acc: dict[int, int] = {}
    for j, v in s.items():
        for i, sign in B.columns[j]:
            acc[i] = acc.get(i, 0) + sign * v
    return Chain(B.d, B.n_rows, acc)


def chain_mass(c: Chain, weights: Sequence) -> Rational | float:
    """Weighted l1 mass ``sum_i w_i |c_i|``."""
    if len(weights) != c.size:
        raise DimensionMismatch(f"{len(weights)} weights for a chain group of rank {c.size}")
    total = 0
    for i, v in c.items():
        w = weights[i]
        if w < 0:
            raise NegativeWeight(f"weight {w} of simplex {i} is negative")
        total += w * abs(v)
    for w in weights:
        if w < 0:
            raise NegativeWeight(f"weight {w} is negative")
    return total
