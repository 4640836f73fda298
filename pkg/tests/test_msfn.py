import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatnorm import fixtures
from flatnorm.errors import DimensionMismatch, DimensionOutOfRange, InfeasibleProblem, NegativeWeight
from flatnorm.msfn import (
    MsfnProblem,
    SolverPath,
    compute_msfn,
    flat_distance,
    formulate,
    lambda_sweep,
    ohcp_mode,
    unit_weights,
)
from flatnorm.simplicial import apply_boundary, boundary_matrix, chain_mass

from oracles import brute_force_msfn, homologous_search


def _square_boundary(K):
    return K.chain(1, {(0, 1): 1, (1, 2): 1, (2, 3): 1, (3, 0): 1})


def test_square_large_lambda_keeps_input():
    K = fixtures.square()
    r = compute_msfn(MsfnProblem(K, 1, _square_boundary(K), 5))
    assert r.flat_norm == 4
    assert r.x == _square_boundary(K)
    assert r.s.is_zero()
    assert r.solver_path is SolverPath.LP_ONLY


def test_square_boundary_breaks_at_area_ratio():
    K = fixtures.square()
    sweep = lambda_sweep(K, 1, _square_boundary(K), [Fraction(k, 2) for k in range(13)])
    _assert_scale_laws(sweep, Fraction(4))
    assert [(b.lo, b.hi, b.crossing) for b in sweep.breakpoints] == [(Fraction(7, 2), 4, 4)]


def test_square_small_lambda_fills_square():
    K = fixtures.square()
    r = compute_msfn(MsfnProblem(K, 1, _square_boundary(K), Fraction(1, 2)))
    assert r.flat_norm == Fraction(1, 2)
    assert r.x.is_zero()
    assert r.s == K.chain(2, {0: 1, 1: 1})


def test_square_path_at_lambda_one():
    # t = v0->v1->v2; swapping in the diagonal costs sqrt2 + lambda/2
    K = fixtures.square()
    t = K.chain(1, {(0, 1): 1, (1, 2): 1})
    r = compute_msfn(MsfnProblem(K, 1, t, 1))
    assert float(r.flat_norm) == pytest.approx(math.sqrt(2) + 0.5, rel=1e-12)
    assert r.x == K.chain(1, {(0, 2): 1})


def test_boundary_of_simplex_at_zero_scale():
    K = fixtures.tetrahedron()
    t = apply_boundary(boundary_matrix(K, 2), K.chain(3, {0: 1}))
    r = compute_msfn(MsfnProblem(K, 2, t, 0))
    assert r.flat_norm == 0
    assert r.x.is_zero()


def test_zero_chain():
    K = fixtures.square()
    r = compute_msfn(MsfnProblem(K, 1, K.zero_chain(1), 1))
    assert r.flat_norm == 0 and r.x.is_zero() and r.s.is_zero()


def test_vertex_chain_d0():
    K = fixtures.single_triangle()
    t = K.chain(0, {0: 1, 1: -1})
    r = compute_msfn(MsfnProblem(K, 0, t, 0))
    assert r.flat_norm == 0
    r = compute_msfn(MsfnProblem(K, 0, t, 3))
    assert r.flat_norm == 2


def test_problem_validation():
    K = fixtures.square()
    with pytest.raises(DimensionOutOfRange):
        MsfnProblem(K, 2, K.zero_chain(2), 1)
    with pytest.raises(DimensionMismatch):
        MsfnProblem(K, 1, K.zero_chain(0), 1)
    with pytest.raises(NegativeWeight):
        MsfnProblem(K, 1, K.zero_chain(1), -1)
    with pytest.raises(NegativeWeight):
        MsfnProblem(K, 1, K.zero_chain(1), 1, w=[1, 1, 1, 1, -1])
    with pytest.raises(DimensionMismatch):
        MsfnProblem(K, 1, K.zero_chain(1), 1, w=[1, 1])


def test_multiplicity_cap_shape_and_infeasibility():
    K = fixtures.single_triangle()
    P = MsfnProblem(K, 1, K.chain(1, {0: 1}), 1, multiplicity_cap=True)
    lp = formulate(P)
    assert (lp.n_rows, lp.n_vars) == (11, 16)
    assert formulate(MsfnProblem(K, 1, K.zero_chain(1), 1)).n_rows == 3
    with pytest.raises(InfeasibleProblem):
        compute_msfn(MsfnProblem(K, 1, K.chain(1, {0: 3}), 1, multiplicity_cap=True))


def test_multiplicity_cap_forces_split():
    # t = 2*edge cannot keep x = t under the cap, so some mass must move to s
    K = fixtures.square()
    t = K.chain(1, {(0, 2): 2})
    r = compute_msfn(MsfnProblem(K, 1, t, 100, multiplicity_cap=True))
    assert all(abs(v) <= 1 for _, v in r.x.items())
    assert all(abs(v) <= 1 for _, v in r.s.items())


def test_moebius_regression_needs_branching():
    K = fixtures.moebius_strip()
    t = K.chain(1, {(1, 0): 1, (0, 3): 1, (3, 1): 1})
    r = compute_msfn(MsfnProblem(K, 1, t, 0, unit_weights(K, 1), unit_weights(K, 2)))
    assert r.solver_path is SolverPath.BRANCH_AND_BOUND
    assert not r.lp_was_integral
    assert r.lp_objective == Fraction(5, 2)
    assert r.flat_norm == 3
    B = boundary_matrix(K, 1).to_dense()
    ref, _ = brute_force_msfn(B, t.to_dense(), [1] * K.count(1), [1] * K.count(2), 0, box=2)
    assert ref == 3


def _random_instance(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(0, 2))
    K = fixtures.random_complex(rng, d, max_top=6)
    t = K.chain(d, {i: int(v) for i, v in enumerate(rng.integers(-2, 3, size=K.count(d)))})
    w = [Fraction(int(a), int(b)) for a, b in zip(rng.integers(1, 4, K.count(d)), rng.integers(1, 3, K.count(d)))]
    v = [Fraction(int(a), int(b)) for a, b in zip(rng.integers(1, 4, K.count(d + 1)), rng.integers(1, 3, K.count(d + 1)))]
    lam = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)][int(rng.integers(0, 4))]
    return K, d, t, w, v, lam


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_brute_force(seed):
    K, d, t, w, v, lam = _random_instance(seed)
    r = compute_msfn(MsfnProblem(K, d, t, lam, w, v))
    B = boundary_matrix(K, d).to_dense()
    ref, _ = brute_force_msfn(B, t.to_dense(), w, v, lam, box=2)
    assert r.flat_norm <= ref
    if all(abs(c) <= 2 for _, c in r.s.items()):
        assert r.flat_norm == ref
    assert r.x == t - apply_boundary(boundary_matrix(K, d), r.s)
    assert r.flat_norm == r.x_mass + lam * r.s_mass


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_orientation_equivariance(seed):
    K, d, t, w, v, lam = _random_instance(seed)
    a = compute_msfn(MsfnProblem(K, d, t, lam, w, v))
    b = compute_msfn(MsfnProblem(K, d, -t, lam, w, v))
    assert a.flat_norm == b.flat_norm


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_flat_norm_bounded_by_input_mass(seed):
    K, d, t, w, v, lam = _random_instance(seed)
    P = MsfnProblem(K, d, t, lam, w, v)
    assert compute_msfn(P).flat_norm <= P.input_mass()


def _assert_scale_laws(sweep, input_mass):
    lams, F = sweep.lambdas, sweep.values
    assert all(f <= input_mass for f in F)
    assert all(a <= b for a, b in zip(F, F[1:]))
    slopes = [(F[i + 1] - F[i]) / (lams[i + 1] - lams[i]) for i in range(len(F) - 1)]
    assert all(a >= b for a, b in zip(slopes, slopes[1:]))


def test_square_sweep_scale_laws_and_breakpoint():
    K = fixtures.square()
    t = K.chain(1, {(0, 1): 1, (1, 2): 1})
    grid = [Fraction(k, 8) for k in range(0, 33)]
    sweep = lambda_sweep(K, 1, t, grid)
    _assert_scale_laws(sweep, Fraction(2))
    assert len(sweep.breakpoints) == 1
    bp = sweep.breakpoints[0]
    target = 2 * (2 - math.sqrt(2))
    assert bp.lo <= target <= bp.hi
    assert float(bp.crossing) == pytest.approx(target, rel=1e-9)


def test_sweep_scale_laws_on_torus():
    K = fixtures.torus()
    rng = np.random.default_rng(5)
    t = K.chain(1, {i: int(v) for i, v in enumerate(rng.integers(-1, 2, size=K.count(1)))})
    w, v = unit_weights(K, 1), unit_weights(K, 2)
    sweep = lambda_sweep(K, 1, t, [Fraction(k, 4) for k in range(13)], w, v)
    _assert_scale_laws(sweep, Fraction(sum(abs(c) for _, c in t.items())))


def test_ohcp_on_annulus_matches_search():
    K = fixtures.annulus(segments=5)
    # a cycle around the hole that detours through the outer ring
    t = K.chain(1, {(0, 1): 1, (1, 6): 1, (6, 7): 1, (7, 2): 1, (2, 3): 1, (3, 4): 1, (4, 0): 1})
    assert apply_boundary(boundary_matrix(K, 0), t).is_zero()
    r = ohcp_mode(K, 1, t)
    ref, _ = homologous_search(boundary_matrix(K, 1).to_dense(), t.to_dense(), box=1)
    assert all(abs(c) <= 1 for _, c in r.s.items())
    assert r.flat_norm == ref == 5
    assert not r.x.is_zero()


def test_flat_distance_symmetric():
    K = fixtures.square()
    a = K.chain(1, {(0, 1): 1, (1, 2): 1})
    b = K.chain(1, {(0, 3): 1, (3, 2): 1})
    d1 = flat_distance(K, 1, a, b, 1)
    d2 = flat_distance(K, 1, b, a, 1)
    assert d1.flat_norm == d2.flat_norm == 1
    assert chain_mass(d1.s, [1, 1]) == 2
