"""Mass bounds for pushing a current onto a skeleton, and an executable
retraction of piecewise-linear curves onto the 1-skeleton.

The retraction works top-down.  At level ``l`` every part of the curve lying
in the interior of an ``l``-simplex ``σ`` is projected radially from a center
``a`` (sampled in the ball of half the inradius) onto the boundary of ``σ``.
Curve pieces are kept as pairs of sparse barycentric points, so the carrier
of a piece (the smallest face containing it) is exact: its vertex set is the
union of the supports of its two endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CenterSamplingFailed, CurveOutsideComplex, DimensionOutOfRange, InvalidDimension
from .geometry import (
    RegularityReport,
    geometry_of_points,
    incenter,
    midpoint_subdivide,
    regularity_report,
    volumes,
)
from .simplicial import Chain, SimplicialComplex, apply_boundary, boundary_matrix, chain_mass

ZERO = 1e-12
LOCATE_TOL = 1e-9


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeformationBounds:
    d: int
    k: int
    theta: float
    delta: float
    mass_t: float
    mass_bdt: float
    bound_MP: float
    bound_MdP: float
    bound_MR: float
    bound_MQ: float
    bound_flat_distance: float


def deformation_bounds(R: RegularityReport, d: int, mass_t: float, mass_bdt: float) -> DeformationBounds:
    """Mass of the pushed current, its boundary, and the two homotopy pieces."""
    if not 0 <= d < R.dim:
        raise InvalidDimension(f"need 0 <= d < p = {R.dim}, got d = {d}")
    if mass_t < 0 or mass_bdt < 0:
        raise ValueError("masses must be nonnegative")
    k = R.dim - d
    g = 4.0 * R.theta
    D = R.delta
    return DeformationBounds(
        d, k, R.theta, D, mass_t, mass_bdt,
        bound_MP=g**k * mass_t + D * g ** (k + 1) * mass_bdt,
        bound_MdP=g ** (k + 1) * mass_bdt,
        bound_MR=D * g**k * mass_t,
        bound_MQ=D * g**k * (1 + g) * mass_bdt,
        bound_flat_distance=D * g**k * (mass_t + (1 + g) * mass_bdt),
    )


@dataclass(frozen=True)
class SullivanBounds:
    mass_P: float
    mass_dP: float
    flat_distance: float


def sullivan_bounds(q: int, d: int, kappa2: float, delta: float, mass_t: float, mass_bdt: float,
                    mass_p: float | None = None, mass_bdp: float | None = None) -> SullivanBounds:
    """Cell-complex deformation bounds written with this package's constants.

    When ``mass_p``/``mass_bdp`` are omitted the flat-distance bound is
    evaluated at the two mass bounds themselves.
    """
    if d < 1 or q < d:
        raise InvalidDimension(f"need 1 <= d <= q, got d = {d}, q = {q}")
    e = q - d + 1
    base = (d + 1) / (2 * d) * kappa2
    mp = math.comb(q, d) * (2 * d * base ** (d + 1)) ** e * mass_t
    mdp = math.comb(q, d - 1) * (2 * d * base**d) ** e * mass_bdt
    fp = mp if mass_p is None else mass_p
    fdp = mdp if mass_bdp is None else mass_bdp
    return SullivanBounds(mp, mdp, e * delta * (fp + fdp))


@dataclass(frozen=True)
class BoundComparison:
    ours: DeformationBounds
    sullivan: SullivanBounds

    @property
    def flat_ratio(self) -> float:
        """Sullivan's flat-distance bound over ours (``inf`` if ours is zero)."""
        if self.ours.bound_flat_distance == 0:
            return math.inf if self.sullivan.flat_distance > 0 else 1.0
        return self.sullivan.flat_distance / self.ours.bound_flat_distance

    @property
    def ours_strictly_smaller(self) -> bool:
        return self.ours.bound_flat_distance < self.sullivan.flat_distance


def compare_bounds(K: SimplicialComplex, d: int, mass_t: float, mass_bdt: float,
                   report: RegularityReport | None = None) -> BoundComparison:
    R = report or regularity_report(K)
    ours = deformation_bounds(R, d, mass_t, mass_bdt)
    theirs = sullivan_bounds(K.ambient_dim, d, R.kappa2, R.delta, mass_t, mass_bdt)
    return BoundComparison(ours, theirs)


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PLCurve:
    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if len(pts) < 2:
            raise ValueError("a curve needs at least two points")
        seq = np.vstack([pts, pts[:1]]) if self.closed else pts
        if np.any(np.linalg.norm(np.diff(seq, axis=0), axis=1) == 0):
            raise ValueError("consecutive curve points must be distinct")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def segments(self):
        pts = self.points
        n = len(pts)
        last = n if self.closed else n - 1
        for i in range(last):
            yield pts[i], pts[(i + 1) % n]

    def length(self) -> float:
        return float(sum(np.linalg.norm(b - a) for a, b in self.segments()))


Bary = dict  # vertex id -> barycentric weight


@dataclass(frozen=True)
class LevelStep:
    level: int
    simplex: int
    center: tuple[float, ...]
    factor: float
    allowed: float


@dataclass
class RetractionTrace:
    snapped: Chain
    mass_before: float
    mass_after: float
    pushed_mass: float
    per_level: list[LevelStep] = field(default_factory=list)
    resamples: int = 0
    expansion_bound: float = math.inf
    closed: bool = False

    @property
    def within_bound(self) -> bool:
        return self.mass_after <= self.expansion_bound * self.mass_before * (1 + 1e-12)


def _clean(b: np.ndarray, verts: Sequence[int]) -> Bary:
    b = np.where(b < ZERO, 0.0, b)
    b = b / b.sum()
    return {v: float(w) for v, w in zip(verts, b) if w > 0.0}


def _bary_in(points: np.ndarray, x: np.ndarray):
    """Barycentric coordinates of ``x`` in the simplex ``points`` and the distance to its affine hull."""
    E = (points[1:] - points[0]).T
    lam, *_ = np.linalg.lstsq(E, x - points[0], rcond=None)
    resid = float(np.linalg.norm(E @ lam - (x - points[0])))
    return np.concatenate([[1.0 - lam.sum()], lam]), resid


def _in_ambient(curve: PLCurve, q: int) -> PLCurve:
    """Pad planar curve points with zero coordinates to match a mesh stored in higher dimension."""
    have = curve.points.shape[1]
    if have == q:
        return curve
    if have > q:
        raise CurveOutsideComplex(f"curve points have {have} coordinates, the mesh only {q}")
    pad = np.zeros((len(curve.points), q - have))
    return PLCurve(np.hstack([curve.points, pad]), curve.closed)


def locate_curve(K: SimplicialComplex, curve: PLCurve) -> list[tuple[Bary, Bary]]:
    """Split the curve into straight pieces, each inside one top simplex."""
    X = K.coords
    curve = _in_ambient(curve, X.shape[1])
    tops = [s for s in K.maximal_simplices() if len(s) > 1]
    if not tops:
        raise CurveOutsideComplex("complex has no edges")
    lo = np.array([X[list(s)].min(axis=0) for s in tops])
    hi = np.array([X[list(s)].max(axis=0) for s in tops])
    scale = float(np.ptp(X, axis=0).max()) or 1.0
    tol = LOCATE_TOL * scale
    pieces: list[tuple[Bary, Bary]] = []
    for p0, p1 in curve.segments():
        seg_lo = np.minimum(p0, p1) - tol
        seg_hi = np.maximum(p0, p1) + tol
        cand = np.nonzero(np.all(hi >= seg_lo, axis=1) & np.all(lo <= seg_hi, axis=1))[0]
        intervals = []
        for ci in cand:
            s = tops[ci]
            pts = X[list(s)]
            b0, r0 = _bary_in(pts, p0)
            b1, r1 = _bary_in(pts, p1)
            if r0 > tol or r1 > tol:
                continue
            a, b = 0.0, 1.0
            db = b1 - b0
            ok = True
            for i in range(len(s)):
                # need b0_i + t db_i >= -tol
                if abs(db[i]) < 1e-15:
                    if b0[i] < -LOCATE_TOL:
                        ok = False
                        break
                    continue
                t = (-LOCATE_TOL - b0[i]) / db[i]
                if db[i] > 0:
                    a = max(a, t)
                else:
                    b = min(b, t)
            if ok and b - a > 1e-12:
                intervals.append((max(a, 0.0), min(b, 1.0), s, b0, db))
        intervals.sort(key=lambda it: (it[0], -it[1]))
        cur = 0.0
        while cur < 1.0 - 1e-12:
            best = None
            for it in intervals:
                if it[0] <= cur + 1e-12 and it[1] > cur + 1e-12 and (best is None or it[1] > best[1]):
                    best = it
            if best is None:
                raise CurveOutsideComplex(f"segment {p0.tolist()} -> {p1.tolist()} leaves |K| at parameter {cur:.6g}")
            end = min(best[1], 1.0)
            if end > 1.0 - 1e-12:
                end = 1.0
            _, _, s, b0, db = best
            pieces.append((_clean(b0 + cur * db, s), _clean(b0 + end * db, s)))
            cur = end
    return pieces


def _to_xyz(X: np.ndarray, b: Bary) -> np.ndarray:
    return sum(w * X[v] for v, w in b.items())


def _piece_length(X, piece) -> float:
    return float(np.linalg.norm(_to_xyz(X, piece[1]) - _to_xyz(X, piece[0])))


def _carrier(piece) -> tuple[int, ...]:
    return tuple(sorted(set(piece[0]) | set(piece[1])))


class _CenterHit(Exception):
    pass


def _project_piece(verts, ba: np.ndarray, piece):
    """Radial projection from the center with barycentric ``ba`` onto the boundary of ``verts``."""
    b0 = np.array([piece[0].get(v, 0.0) for v in verts])
    b1 = np.array([piece[1].get(v, 0.0) for v in verts])
    r0 = b0 / ba
    dr = (b1 - b0) / ba
    out = []
    s = 0.0
    while s < 1.0:
        vals = r0 + s * dr
        mn = vals.min()
        if mn > 1.0 - 1e-9:
            raise _CenterHit
        ties = np.nonzero(vals <= mn + 1e-12)[0]
        i = int(min(ties, key=lambda j: (dr[j], j)))
        nxt = 1.0
        for j in range(len(verts)):
            if dr[j] < dr[i] - 1e-15:
                sj = (r0[j] - r0[i]) / (dr[i] - dr[j])
                if s + 1e-12 < sj < nxt:
                    nxt = sj
        ends = []
        for u in (s, nxt):
            bx = b0 + u * (b1 - b0)
            rho = bx[i] / ba[i]
            if rho > 1.0 - 1e-9:
                raise _CenterHit
            img = ba + (bx - ba) / (1.0 - rho)
            img[i] = 0.0
            ends.append(_clean(img, verts))
        out.append((ends[0], ends[1]))
        s = nxt
    return out


def _sample_ball(rng, center: np.ndarray, basis: np.ndarray, radius: float, count: int) -> np.ndarray:
    ell = basis.shape[1]
    g = rng.standard_normal((count, ell))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = radius * rng.random(count) ** (1.0 / ell)
    return center + (g * rad[:, None]) @ basis.T


def retract_curve(K: SimplicialComplex, curve: PLCurve, center_samples: int = 16, retries: int = 4,
                  seed: int | None = 0) -> RetractionTrace:
    """Push a PL curve onto the 1-skeleton and read off the integer edge chain."""
    if K.dim < 2:
        raise DimensionOutOfRange("retraction needs a complex of dimension at least 2")
    X = K.coords
    rng = np.random.default_rng(seed)
    pieces = locate_curve(K, curve)
    mass_before = curve.length()
    trace_levels: list[LevelStep] = []
    resamples = 0
    report = regularity_report(K)

    for ell in range(K.dim, 1, -1):
        groups: dict[tuple[int, ...], list[int]] = {}
        for idx, pc in enumerate(pieces):
            car = _carrier(pc)
            if len(car) == ell + 1:
                groups.setdefault(car, []).append(idx)
        if not groups:
            continue
        replaced: dict[int, list] = {}
        for simplex in sorted(groups):
            verts = list(simplex)
            pts = X[verts]
            geo = geometry_of_points(pts, ell, K.index(simplex))
            allowed = geo.expansion_factor
            own = [pieces[i] for i in groups[simplex]]
            before = sum(_piece_length(X, pc) for pc in own)
            c = incenter(pts)
            basis, _ = np.linalg.qr((pts[1:] - pts[0]).T)
            basis = basis[:, :ell]
            best = None
            for attempt in range(retries + 1):
                if attempt:
                    resamples += 1
                for a in _sample_ball(rng, c, basis, geo.inradius_half, center_samples):
                    ba, _ = _bary_in(pts, a)
                    try:
                        images = [_project_piece(verts, ba, pc) for pc in own]
                    except _CenterHit:
                        resamples += 1
                        continue
                    after = sum(_piece_length(X, q) for img in images for q in img)
                    factor = after / before if before > 0 else 1.0
                    if best is None or factor < best[0]:
                        best = (factor, a, images)
                if best is not None and best[0] <= allowed:
                    break
            if best is None or best[0] > allowed:
                raise CenterSamplingFailed(
                    f"no center in {ell}-simplex {simplex} met the expansion factor {allowed:.6g}", simplex=simplex)
            factor, a, images = best
            for i, img in zip(groups[simplex], images):
                replaced[i] = img
            trace_levels.append(LevelStep(ell, geo.index, tuple(float(v) for v in a), float(factor), float(allowed)))
        new = []
        for idx, pc in enumerate(pieces):
            new.extend(replaced.get(idx, [pc]))
        pieces = new

    pushed = sum(_piece_length(X, pc) for pc in pieces)
    snapped = _edge_chain(K, pieces)
    lengths = volumes(K, 1)
    mass_after = float(chain_mass(snapped, lengths))
    k = K.dim - 1
    trace = RetractionTrace(snapped, mass_before, mass_after, pushed, trace_levels, resamples,
                            (4.0 * report.theta) ** k, curve.closed)
    if curve.closed:
        if not apply_boundary(boundary_matrix(K, 0), snapped).is_zero():
            raise AssertionError("closed curve retracted to a chain with nonzero boundary")
        if not trace.within_bound:
            raise AssertionError(f"mass expansion {mass_after / mass_before:.6g} exceeds {(4.0 * report.theta) ** k:.6g}")
    return trace


def _round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def _edge_chain(K: SimplicialComplex, pieces) -> Chain:
    """Net signed traversal of every edge, rounded half away from zero."""
    net: dict[int, float] = {}
    for pc in pieces:
        car = _carrier(pc)
        if len(car) == 1:
            continue
        if len(car) != 2:
            raise AssertionError(f"piece left off the 1-skeleton on {car}")
        u, v = car
        amount = pc[1].get(v, 0.0) - pc[0].get(v, 0.0)
        e = K.index(car)
        net[e] = net.get(e, 0.0) + amount
    return Chain(1, K.count(1), {e: _round_half_away(x) for e, x in net.items()})


# ---------------------------------------------------------------------------
# refinement study
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RefinementRow:
    level: int
    delta: float
    flat_distance_bound: float
    mass_gap: float
    mass_before: float
    mass_after: float


def refinement_convergence(K: SimplicialComplex, curve: PLCurve, levels: int, center_samples: int = 16,
                           seed: int | None = 0) -> list[RefinementRow]:
    """Retract the curve on ``K`` and on ``levels`` successive midpoint subdivisions of it."""
    rows = []
    mass_bdt = 0.0 if curve.closed else 2.0
    for level in range(levels + 1):
        R = regularity_report(K)
        tr = retract_curve(K, curve, center_samples=center_samples, seed=seed)
        b = deformation_bounds(R, 1, tr.mass_before, mass_bdt)
        rows.append(RefinementRow(level, R.delta, b.bound_flat_distance, abs(tr.mass_after - tr.mass_before),
                                  tr.mass_before, tr.mass_after))
        if level < levels:
            K = midpoint_subdivide(K)
    return rows


def polygon(points, closed: bool = True) -> PLCurve:
    return PLCurve(np.asarray(points, dtype=float), closed)


def square_curve(center, side: float) -> PLCurve:
    cx, cy = center[0], center[1]
    h = side / 2
    return polygon([(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)])
