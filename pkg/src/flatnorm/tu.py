"""Certificates of total unimodularity for boundary matrices.

Sufficient conditions are tried from cheapest to most expensive:

1. caller's assurance that the complex is a geometric ``(d+1)``-complex in R^{d+1},
2. the ``(d+1)``-simplices form an orientable pseudomanifold,
3. for ``d <= 1``, the signed dual graph of the triangles is balanced
   (no strip of triangles glued with a twist),
4. exhaustive subdeterminant enumeration for small matrices.

A ``NotTU`` verdict always carries a square submatrix whose exact determinant
has absolute value at least two.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import SizeCapExceeded, WrongDimension
from .simplicial import BoundaryMatrix, SimplicialComplex, boundary_matrix

DEFAULT_SIZE_CAP = 12
FULL_CYCLE_SEARCH_LIMIT = 4000


class Verdict(str, Enum):
    TU = "TU"
    NOT_TU = "NotTU"
    UNKNOWN = "Unknown"


class Reason(str, Enum):
    ORIENTABLE_MANIFOLD = "OrientableManifold"
    CODIM_ONE_EMBEDDED = "CodimOneEmbedded"
    NO_MOEBIUS = "NoMoebius"
    BRUTE_FORCE = "BruteForce"
    MOEBIUS_FOUND = "MoebiusFound"
    SUBDETERMINANT_WITNESS = "SubdeterminantWitness"
    NONE = "None"


@dataclass(frozen=True)
class TuCertificate:
    verdict: Verdict
    reason: Reason
    cycle: tuple[int, ...] = ()
    rows: tuple[int, ...] = ()
    cols: tuple[int, ...] = ()
    det: int | None = None
    note: str = ""

    @property
    def is_tu(self) -> bool:
        return self.verdict is Verdict.TU

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict.value, "reason": self.reason.value}
        if self.cycle:
            out["cycle"] = list(self.cycle)
        if self.det is not None:
            out.update(rows=list(self.rows), cols=list(self.cols), det=self.det)
        if self.note:
            out["note"] = self.note
        return out


# ---------------------------------------------------------------------------
# exact determinants
# ---------------------------------------------------------------------------


def bareiss_det(M: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    A = [[int(v) for v in row] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k] != 0:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * A[n - 1][n - 1]


def _dense(B) -> list[list[int]]:
    if isinstance(B, BoundaryMatrix):
        return B.to_dense().tolist()
    return np.asarray(B, dtype=np.int64).tolist()


def brute_force_tu(B, size_cap: int = DEFAULT_SIZE_CAP) -> TuCertificate:
    """Check every square submatrix; the first ``|det| >= 2`` is returned as the witness."""
    A = _dense(B)
    m = len(A)
    n = len(A[0]) if m else 0
    if min(m, n) > size_cap:
        raise SizeCapExceeded(f"min(m, n) = {min(m, n)} exceeds the brute-force cap {size_cap}")
    for i in range(m):
        for j in range(n):
            if A[i][j] not in (-1, 0, 1):
                return TuCertificate(Verdict.NOT_TU, Reason.SUBDETERMINANT_WITNESS, rows=(i,), cols=(j,), det=A[i][j])
    col_support = [frozenset(i for i in range(m) if A[i][j]) for j in range(n)]
    for k in range(2, min(m, n) + 1):
        for cols in combinations(range(n), k):
            if any(not col_support[j] for j in cols):
                continue
            support = sorted(set().union(*(col_support[j] for j in cols)))
            if len(support) < k:
                continue
            for rows in combinations(support, k):
                det = bareiss_det([[A[i][j] for j in cols] for i in rows])
                if abs(det) >= 2:
                    return TuCertificate(Verdict.NOT_TU, Reason.SUBDETERMINANT_WITNESS, rows=rows, cols=cols, det=det)
    return TuCertificate(Verdict.TU, Reason.BRUTE_FORCE)


# ---------------------------------------------------------------------------
# parity union-find
# ---------------------------------------------------------------------------


class ParityUnionFind:
    """Union-find that tracks the parity of each element relative to its root."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.parity = [0] * n
        self.rank = [0] * n

    def find(self, a: int) -> tuple[int, int]:
        path = []
        while self.parent[a] != a:
            path.append(a)
            a = self.parent[a]
        root = a
        # compress, accumulating parity from the top of the path down
        acc = 0
        for node in reversed(path):
            acc ^= self.parity[node]
            self.parity[node] = acc
            self.parent[node] = root
        return root, (self.parity[path[0]] if path else 0)

    def union(self, a: int, b: int, rel: int) -> bool:
        """Impose ``parity(a) xor parity(b) == rel``; False when this contradicts earlier unions."""
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            return (pa ^ pb) == rel
        if self.rank[ra] < self.rank[rb]:
            ra, rb, pa, pb = rb, ra, pb, pa
        self.parent[rb] = ra
        self.parity[rb] = pa ^ pb ^ rel
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


# ---------------------------------------------------------------------------
# orientability and twisted strips
# ---------------------------------------------------------------------------


def _gluings(B: BoundaryMatrix):
    """``(a, b, rel, row)`` for every pair of columns sharing a row.

    ``rel = 1`` when the two columns induce the same sign on the shared row,
    so one of them must be flipped for a consistent orientation.
    """
    out = []
    for i, entries in enumerate(B.rows()):
        for (a, sa), (b, sb) in combinations(entries, 2):
            out.append((a, b, 1 if sa == sb else 0, i))
    return out


def check_orientable_manifold(K: SimplicialComplex, d: int) -> bool:
    """True when the ``(d+1)``-simplices form an orientable pseudomanifold (boundary allowed)."""
    if K.dim != d + 1 or d < 0 or not K.is_pure():
        return False
    B = boundary_matrix(K, d)
    uf = ParityUnionFind(B.n_cols)
    for entries in B.rows():
        if len(entries) > 2:
            return False
    for a, b, rel, _ in _gluings(B):
        if not uf.union(a, b, rel):
            return False
    return True


def moebius_certificate(B: BoundaryMatrix) -> TuCertificate:
    """Balance test of the signed dual graph of a boundary matrix's columns."""
    glue = _gluings(B)
    uf = ParityUnionFind(B.n_cols)
    conflict = False
    for a, b, rel, _ in glue:
        if not uf.union(a, b, rel):
            conflict = True
    if not conflict:
        return TuCertificate(Verdict.TU, Reason.NO_MOEBIUS)
    for cycle, rows in _negative_cycles(B.n_cols, glue):
        sub = [[_entry(B, i, j) for j in cycle] for i in rows]
        det = bareiss_det(sub)
        if abs(det) >= 2:
            return TuCertificate(Verdict.NOT_TU, Reason.MOEBIUS_FOUND, cycle=tuple(cycle),
                                 rows=tuple(rows), cols=tuple(cycle), det=det)
    return TuCertificate(Verdict.UNKNOWN, Reason.NONE,
                         note="twisted dual cycle found but no cycle submatrix has |det| >= 2")


def _entry(B: BoundaryMatrix, i: int, j: int) -> int:
    for r, s in B.columns[j]:
        if r == i:
            return s
    return 0


def _negative_cycles(n: int, glue):
    """Shortest closed walks of odd total parity, one per start node, that are simple cycles."""
    adj: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
    for a, b, rel, row in glue:
        adj[a].append((b, rel, row))
        adj[b].append((a, rel, row))
    starts = range(n)
    if n > FULL_CYCLE_SEARCH_LIMIT:
        starts = sorted({a for a, b, rel, row in glue})[:FULL_CYCLE_SEARCH_LIMIT]
    seen_cycles = set()
    found = []
    for src in starts:
        walk = _odd_walk(adj, src)
        if walk is None:
            continue
        nodes, rows = walk
        if len(set(nodes)) != len(nodes) or len(set(rows)) != len(rows):
            continue
        key = frozenset(nodes)
        if key in seen_cycles:
            continue
        seen_cycles.add(key)
        found.append((nodes, rows))
    found.sort(key=lambda c: (len(c[0]), c[0]))
    return found


def _odd_walk(adj, src):
    """BFS in the parity double cover from ``(src, 0)`` to ``(src, 1)``."""
    parent = {(src, 0): None}
    queue = deque([(src, 0)])
    while queue:
        state = queue.popleft()
        node, par = state
        for nb, rel, row in adj[node]:
            nxt = (nb, par ^ rel)
            if nxt in parent:
                continue
            parent[nxt] = (state, row)
            if nxt == (src, 1):
                nodes, rows = [], []
                cur = nxt
                while parent[cur] is not None:
                    prev, r = parent[cur]
                    rows.append(r)
                    nodes.append(prev[0])
                    cur = prev
                nodes.reverse()
                rows.reverse()
                return nodes, rows
            queue.append(nxt)
    return None


def check_moebius_free(K: SimplicialComplex) -> TuCertificate:
    """Twisted-strip test on the triangles of ``K`` (matrix of ``∂_2``)."""
    if K.dim < 2:
        raise WrongDimension(f"the twisted-strip test needs triangles; complex has dimension {K.dim}")
    return moebius_certificate(boundary_matrix(K, 1))


def certify(K: SimplicialComplex, d: int, embedded_codim_one: bool = False,
            size_cap: int = DEFAULT_SIZE_CAP) -> TuCertificate:
    """Best available verdict for ``[∂_{d+1}]``; ``Unknown`` when nothing applies."""
    if embedded_codim_one:
        if K.ambient_dim in (None, d + 1):
            return TuCertificate(Verdict.TU, Reason.CODIM_ONE_EMBEDDED, note="caller asserts a geometric embedding")
    if check_orientable_manifold(K.skeleton(d + 1) if K.dim > d + 1 else K, d):
        return TuCertificate(Verdict.TU, Reason.ORIENTABLE_MANIFOLD)
    B = boundary_matrix(K, d)
    if d == 0:
        # graph incidence matrices have no twisted strips
        return TuCertificate(Verdict.TU, Reason.NO_MOEBIUS)
    if d == 1:
        cert = moebius_certificate(B)
        if cert.verdict is not Verdict.UNKNOWN:
            return cert
    if min(B.shape) <= size_cap:
        return brute_force_tu(B, size_cap)
    return TuCertificate(Verdict.UNKNOWN, Reason.NONE)
