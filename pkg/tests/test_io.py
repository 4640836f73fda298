from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from flatnorm import fixtures
from flatnorm.deform import PLCurve
from flatnorm.errors import (
    InconsistentIndexing,
    NonIntegerCoefficient,
    NonTriangularFace,
    ParseError,
    UnknownSimplex,
)
from flatnorm.io import (
    parse_chain,
    parse_curve,
    parse_off,
    parse_tetgen,
    parse_weights,
    write_chain,
    write_curve,
    write_off,
    write_tetgen,
)
from flatnorm.simplicial import apply_boundary, boundary_matrix
from flatnorm.tu import Verdict, check_moebius_free

DATA = Path(__file__).parent / "data"


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_tetgen_one_based_with_faces():
    K, faces = parse_tetgen(DATA / "tet1.node")
    assert K.counts() == (4, 6, 4, 1)
    assert faces is not None
    assert sorted(abs(v) for _, v in faces.items()) == [1, 1, 1, 1]
    # the outward faces are exactly the boundary of the tetrahedron
    assert faces == apply_boundary(boundary_matrix(K, 2), K.chain(3, {0: 1}))


def test_tetgen_zero_based_matches_one_based():
    K0, faces0 = parse_tetgen(DATA / "tet0.node")
    K1, _ = parse_tetgen(DATA / "tet1.node")
    assert faces0 is None
    assert K0.simplices(3) == K1.simplices(3)
    assert np.array_equal(K0.coords, K1.coords)


def test_tetgen_roundtrip(tmp_path):
    K = fixtures.cube_tets(1)
    t = apply_boundary(boundary_matrix(K, 2), K.chain(3, {0: 1, 2: -1}))
    for base in (0, 1):
        write_tetgen(K, tmp_path / f"cube{base}", base=base, faces=t)
        K2, t2 = parse_tetgen(tmp_path / f"cube{base}.node")
        assert K2.simplices(3) == K.simplices(3)
        assert np.allclose(K2.coords, K.coords)
        assert t2 == t


def test_tetgen_bad_vertex_reference(tmp_path):
    _write(tmp_path, "bad.node", "4 3 0 0\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n")
    _write(tmp_path, "bad.ele", "1 4 0\n1 1 2 3 9\n")
    with pytest.raises(InconsistentIndexing):
        parse_tetgen(tmp_path / "bad.node")


def test_off_roundtrip_and_moebius_file():
    K = parse_off(DATA / "moebius.off")
    assert K.counts() == fixtures.moebius_strip().counts()
    assert check_moebius_free(K).verdict is Verdict.NOT_TU
    S = parse_off(DATA / "tetra_boundary.off")
    assert S.counts() == (4, 6, 4)


def test_off_write_read(tmp_path):
    K = fixtures.torus()
    write_off(K, tmp_path / "t.off")
    K2 = parse_off(tmp_path / "t.off")
    assert K2.simplices(2) == K.simplices(2)
    assert np.allclose(K2.coords, K.coords)


def test_off_errors(tmp_path):
    quad = _write(tmp_path, "q.off", "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")
    with pytest.raises(NonTriangularFace) as info:
        parse_off(quad)
    assert info.value.line == 7
    with pytest.raises(ParseError):
        parse_off(_write(tmp_path, "h.off", "PLY\n"))
    with pytest.raises(InconsistentIndexing):
        parse_off(_write(tmp_path, "i.off", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n"))
    with pytest.raises(ParseError):
        parse_off(_write(tmp_path, "s.off", "OFF\n3 2 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n"))


def test_chain_file_parsing(tmp_path):
    K = fixtures.square()
    assert parse_chain(DATA / "square_path.chain", K, 1) == K.chain(1, {(0, 1): 1, (1, 2): 1})
    # reversed orientation flips the sign; duplicates are summed
    p = _write(tmp_path, "c.chain", "# comment\n1 0 2\n0 1 1\n2 3 4\n")
    assert parse_chain(p, K, 1) == K.chain(1, {(0, 1): -1, (2, 3): 4})
    with pytest.raises(NonIntegerCoefficient):
        parse_chain(_write(tmp_path, "f.chain", "0 1 1.5\n"), K, 1)
    with pytest.raises(UnknownSimplex) as info:
        parse_chain(_write(tmp_path, "u.chain", "0 1 1\n1 3 1\n"), K, 1)
    assert info.value.line == 2
    with pytest.raises(ParseError):
        parse_chain(_write(tmp_path, "w.chain", "0 1 2 1\n"), K, 1)


def test_chain_roundtrip(tmp_path):
    K = fixtures.torus()
    rng = np.random.default_rng(4)
    c = K.chain(1, {i: int(v) for i, v in enumerate(rng.integers(-3, 4, size=K.count(1)))})
    write_chain(K, c, tmp_path / "c.chain")
    assert parse_chain(tmp_path / "c.chain", K, 1) == c


def test_curve_roundtrip(tmp_path):
    curve = parse_curve(DATA / "square.curve")
    assert curve.closed
    assert curve.length() == pytest.approx(2.0)
    write_curve(curve, tmp_path / "c.curve")
    again = parse_curve(tmp_path / "c.curve")
    assert again.closed and np.array_equal(again.points, curve.points)
    open_curve = PLCurve(np.array([[0.0, 0.0], [1.0, 0.0]]))
    write_curve(open_curve, tmp_path / "o.curve")
    assert not parse_curve(tmp_path / "o.curve").closed
    with pytest.raises(ParseError):
        parse_curve(_write(tmp_path, "bad.curve", "0 0\n0 0\n"))


def test_weights_file(tmp_path):
    K = fixtures.square()
    p = _write(tmp_path, "w.txt", "0 1 1/2\n2 0 3\n")
    w = parse_weights(p, K, 1)
    assert w[K.index((0, 1))] == Fraction(1, 2)
    assert w[K.index((0, 2))] == 3
    assert w[K.index((1, 2))] == 1
    with pytest.raises(UnknownSimplex):
        parse_weights(_write(tmp_path, "u.txt", "1 3 2\n"), K, 1)
