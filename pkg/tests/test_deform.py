import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from flatnorm import fixtures
from flatnorm.deform import (
    PLCurve,
    compare_bounds,
    deformation_bounds,
    polygon,
    refinement_convergence,
    retract_curve,
    square_curve,
    sullivan_bounds,
)
from flatnorm.errors import CurveOutsideComplex, InvalidDimension
from flatnorm.geometry import RegularityReport, regularity_report
from flatnorm.simplicial import apply_boundary, boundary_matrix


def _report(dim, k1, k2, delta):
    return RegularityReport(dim, k1, k2, delta, (), (dim, 0), (dim, 0))


# symbolic forms, written out independently of the implementation
_th, _D, _T, _dT, _k = sp.symbols("theta Delta T dT k", positive=True)
_g = 4 * _th
SYMBOLIC = {
    "bound_MP": _g**_k * _T + _D * _g ** (_k + 1) * _dT,
    "bound_MdP": _g ** (_k + 1) * _dT,
    "bound_MR": _D * _g**_k * _T,
    "bound_MQ": _D * _g**_k * (1 + _g) * _dT,
    "bound_flat_distance": _D * _g**_k * (_T + (1 + _g) * _dT),
}


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.floats(0.1, 100), st.floats(0.1, 100), st.floats(0.01, 10),
       st.floats(0, 50), st.floats(0, 50), st.data())
def test_bounds_match_symbolic_recomputation(p, k1, k2, delta, mt, mbt, data):
    d = data.draw(st.integers(0, p - 1))
    b = deformation_bounds(_report(p, k1, k2, delta), d, mt, mbt)
    assert b.k == p - d
    subs = {_th: sp.Float(k1, 30) + sp.Float(k2, 30), _D: sp.Float(delta, 30), _T: sp.Float(mt, 30),
            _dT: sp.Float(mbt, 30), _k: p - d}
    for name, expr in SYMBOLIC.items():
        ref = float(expr.subs(subs).evalf(30))
        assert getattr(b, name) == pytest.approx(ref, rel=1e-12, abs=0), name


def test_bound_examples():
    R = regularity_report(fixtures.single_triangle())
    b = deformation_bounds(R, 1, 1.0, 0.0)
    assert R.theta == pytest.approx(52.76, abs=5e-3)
    assert b.bound_MP == pytest.approx(211.06, abs=5e-3)
    assert b.bound_MQ == 0 and b.bound_MdP == 0
    z = deformation_bounds(R, 1, 0.0, 0.0)
    assert z.bound_MP == z.bound_MdP == z.bound_MR == z.bound_MQ == z.bound_flat_distance == 0
    with pytest.raises(InvalidDimension):
        deformation_bounds(R, 2, 1.0, 0.0)


def test_sullivan_examples():
    s = sullivan_bounds(3, 1, 4 * math.sqrt(3), 1.0, 1.0, 0.0)
    # 3 * (2 * kappa2^2)^3 with kappa2^2 = 48
    assert s.mass_P == pytest.approx(3 * 96**3, rel=1e-12)
    assert s.mass_P == pytest.approx(2_654_208, rel=1e-12)
    assert s.mass_dP == 0
    assert sullivan_bounds(3, 1, 7.0, 1.0, 1.0, 1.0, mass_p=0, mass_bdp=0).flat_distance == 0
    eq = sullivan_bounds(2, 2, 5.0, 1.0, 1.0, 1.0)
    assert eq.mass_P == pytest.approx(2 * 2 * (0.75 * 5.0) ** 3)
    with pytest.raises(InvalidDimension):
        sullivan_bounds(2, 0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(InvalidDimension):
        sullivan_bounds(1, 2, 1.0, 1.0, 1.0, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.data(), st.floats(1, 50), st.floats(0.01, 5), st.floats(0, 10), st.floats(0, 10))
def test_sullivan_symbolic(q, data, kappa2, delta, mt, mbt):
    d = data.draw(st.integers(1, q))
    s = sullivan_bounds(q, d, kappa2, delta, mt, mbt)
    e = q - d + 1
    K2 = sp.Float(kappa2, 30)
    base = sp.Rational(d + 1, 2 * d) * K2
    mp = sp.binomial(q, d) * (2 * d * base ** (d + 1)) ** e * sp.Float(mt, 30)
    mdp = sp.binomial(q, d - 1) * (2 * d * base**d) ** e * sp.Float(mbt, 30)
    assert s.mass_P == pytest.approx(float(mp), rel=1e-12, abs=0)
    assert s.mass_dP == pytest.approx(float(mdp), rel=1e-12, abs=0)
    assert s.flat_distance == pytest.approx(float(e * sp.Float(delta, 30) * (mp + mdp)), rel=1e-12, abs=0)


@pytest.mark.parametrize("mesh", [fixtures.cube_tets(1), fixtures.regular_tetrahedron(), fixtures.cube_tets(2)])
def test_ours_below_sullivan_for_surfaces_in_tet_meshes(mesh):
    cmp = compare_bounds(mesh, 2, 1.0, 1.0)
    assert cmp.ours_strictly_smaller
    assert cmp.flat_ratio > 1


def test_curve_on_skeleton_is_fixed():
    K = fixtures.single_triangle()
    curve = polygon([(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)], closed=True)
    tr = retract_curve(K, curve)
    assert tr.per_level == []
    assert tr.snapped == K.chain(1, {(0, 1): 1, (1, 2): 1, (2, 0): 1})
    assert tr.mass_after == pytest.approx(tr.mass_before)


def test_median_segment_goes_around_two_edges():
    K = fixtures.single_triangle()
    curve = PLCurve(np.array([(0.0, 0.0), (0.75, math.sqrt(3) / 4)]), closed=False)
    tr = retract_curve(K, curve, seed=1)
    # the interior of the median is pushed onto 0 -> 1 -> m or 0 -> 2 -> m
    assert tr.pushed_mass == pytest.approx(1.5, rel=1e-9)
    assert tr.snapped in (K.chain(1, {(0, 1): 1, (1, 2): 1}), K.chain(1, {(0, 2): 1, (2, 1): 1}))
    step, = tr.per_level
    assert step.factor == pytest.approx(1.5 / (math.sqrt(3) / 2), rel=1e-9)
    assert step.factor <= step.allowed


def test_curve_outside_complex_rejected():
    K = fixtures.single_triangle()
    with pytest.raises(CurveOutsideComplex):
        retract_curve(K, polygon([(0.2, 0.1), (3.0, 3.0), (0.3, 0.1)]))


def _oracle_pushed_length(tri, curve_pts, a, samples=5000):
    """Length of the radial projection of a dense resampling of the closed curve."""
    M = np.vstack([tri.T, np.ones(3)])
    ba = np.linalg.solve(M, np.append(a, 1.0))
    seq = np.vstack([curve_pts, curve_pts[:1]])
    dense = np.vstack([np.linspace(p, q, samples, endpoint=False) for p, q in zip(seq[:-1], seq[1:])])
    bx = np.linalg.solve(M, np.vstack([dense.T, np.ones(len(dense))])).T
    step = bx - ba
    with np.errstate(divide="ignore"):
        ts = np.where(step < 0, ba / -step, np.inf)
    out = a + ts.min(axis=1)[:, None] * (dense - a)
    out = np.vstack([out, out[:1]])
    return float(np.linalg.norm(np.diff(out, axis=0), axis=1).sum())


def test_square_in_triangle_against_center_grid_oracle():
    K = fixtures.equilateral_mesh(2, edge=2.0)
    curve = square_curve((2.0, 0.9), 0.5)
    tr = retract_curve(K, curve, seed=0)
    assert apply_boundary(boundary_matrix(K, 0), tr.snapped).is_zero()
    step, = tr.per_level
    tri_ids = K.simplex(2, step.simplex)
    tri = K.coords[list(tri_ids)]
    # exhaustive grid over the half-inradius ball
    r = math.sqrt(3) / 3 / 2
    c = tri.mean(axis=0)
    grid = [c + (u, v) for u in np.linspace(-r, r, 21) for v in np.linspace(-r, r, 21) if u * u + v * v <= r * r]
    best = min(_oracle_pushed_length(tri, curve.points, a) for a in grid)
    assert tr.pushed_mass == pytest.approx(_oracle_pushed_length(tri, curve.points, np.array(step.center)), rel=1e-4)
    assert tr.pushed_mass >= best * (1 - 1e-2)
    inside = np.all(np.abs(np.array(step.center) - (2.0, 0.9)) < 0.25)
    if inside:
        assert tr.snapped.norm1() == 3
    else:
        assert tr.snapped.is_zero()


def _random_closed_curve(rng, n):
    # points strictly inside the parallelogram spanned by equilateral_mesh(n)
    pts = []
    for _ in range(int(rng.integers(3, 7))):
        u, v = rng.uniform(0.05, n - 0.05, size=2)
        pts.append((u + v / 2, v * math.sqrt(3) / 2))
    return polygon(pts)


def test_random_closed_curves_snap_to_cycles_within_bound():
    K = fixtures.equilateral_mesh(3)
    rng = np.random.default_rng(2024)
    done = 0
    for trial in range(20):
        curve = _random_closed_curve(rng, 3)
        tr = retract_curve(K, curve, seed=trial)
        assert apply_boundary(boundary_matrix(K, 0), tr.snapped).is_zero()
        assert tr.mass_after <= tr.expansion_bound * tr.mass_before
        assert all(s.factor <= s.allowed for s in tr.per_level)
        done += 1
    assert done == 20


def test_refinement_halves_delta_and_bound():
    K = fixtures.equilateral_mesh(2, edge=2.0)
    rows = refinement_convergence(K, square_curve((2.0, 0.9), 0.5), levels=3)
    assert len(rows) == 4
    for a, b in zip(rows, rows[1:]):
        assert b.delta == pytest.approx(a.delta / 2, rel=1e-12)
        assert b.flat_distance_bound == pytest.approx(a.flat_distance_bound / 2, rel=1e-9)
        assert b.mass_gap <= a.mass_gap + 1e-12
