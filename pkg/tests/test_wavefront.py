import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from lagsurf.lattice import Mod2Class, RationalManifold
from lagsurf.surfaces import SurfaceType
from lagsurf.wavefront import (
    OrientedSectionPair,
    ParseError,
    add_four_by_surgery,
    block_det_identity,
    block_det_sides,
    exact_det,
    find_tangencies,
    handle_sign,
    handle_sign_from_index,
    intersection_index,
    parse_expression,
    surgery_outcome,
)
from lagsurf.wavefront.fixtures import (
    DEFORMED_BOX,
    DEFORMED_MINUS,
    NAMED,
    WHITNEY_BOX,
    WHITNEY_MINUS,
    WHITNEY_PLUS,
    resolve,
)

X1, X2 = sp.symbols("x1 x2", real=True)


def to_sympy(text):
    # the fixtures never put unary minus in front of a power, so ** precedence agrees
    return sp.sympify(text.replace("^", "**"), locals={"x1": X1, "x2": X2}, rational=True)


def interior_points(n, radius, centre=(0.0, 0.0), seed=0):
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(0, 1, n))
    th = rng.uniform(0, 2 * np.pi, n)
    return centre[0] + r * np.cos(th), centre[1] + r * np.sin(th)


# -- parser -------------------------------------------------------------------

@pytest.mark.parametrize("text, x1, x2, expected", [
    ("x1", 2.0, 3.0, 2.0),
    ("x1 + x2 * 2", 1.0, 3.0, 7.0),
    ("(x1 + x2) * 2", 1.0, 3.0, 8.0),
    ("x1 - x2 - 1", 5.0, 2.0, 2.0),
    ("8 / 4 / 2", 0.0, 0.0, 1.0),
    ("x1^2", 3.0, 0.0, 9.0),
    ("-x1^2", 3.0, 0.0, 9.0),
    ("-(x1^2)", 3.0, 0.0, -9.0),
    ("x1^-1", 4.0, 0.0, 0.25),
    ("x1^(1/2)", 9.0, 0.0, 3.0),
    ("x1^(-3/2)", 4.0, 0.0, 0.125),
    ("x1^1.5", 4.0, 0.0, 8.0),
    ("sqrt(x1 + x2)", 7.0, 2.0, 3.0),
    (".5*x1", 4.0, 0.0, 2.0),
    ("  x1 ", 1.0, 0.0, 1.0),
])
def test_parse_and_evaluate(text, x1, x2, expected):
    assert parse_expression(text).value(x1, x2) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("text, pos", [
    ("x1 + + x2", 5),
    ("x3", 0),
    ("(x1", 3),
    ("x1 x2", 3),
    ("x1^x2", 3),
    ("x1^(1/0)", 6),
    ("", 0),
    ("sin(x1)", 0),
])
def test_parse_errors(text, pos):
    with pytest.raises(ParseError) as e:
        parse_expression(text)
    assert e.value.position == pos


def test_unknown_identifier_message():
    with pytest.raises(ParseError, match="unknown identifier 'y'"):
        parse_expression("x1 + y")


def test_domain_mask():
    h = parse_expression(WHITNEY_PLUS)
    assert np.isnan(h.value(1.0, 1.0))
    assert np.isnan(parse_expression("sqrt(x1)").value(-1.0, 0.0))
    assert h.value(0.0, 0.0) == pytest.approx(-1 / 3)


FIXTURES = {
    "whitney+": (WHITNEY_PLUS, 0.9, (0.0, 0.0)),
    "whitney-": (WHITNEY_MINUS, 0.9, (0.0, 0.0)),
    "deformed-": (DEFORMED_MINUS, 0.4, (-0.5, 0.0)),
    "rational": ("(x1^3 - 2*x1*x2 + 1/7) / (1 + x1^2 + x2^2) + sqrt(2 + x1)", 0.9, (0.0, 0.0)),
}


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_symbolic_matches_sympy(name):
    text, radius, centre = FIXTURES[name]
    h = parse_expression(text)
    e = to_sympy(text)
    grad = [sp.lambdify((X1, X2), sp.diff(e, v), "numpy") for v in (X1, X2)]
    hess = [[sp.lambdify((X1, X2), sp.diff(e, a, b), "numpy") for b in (X1, X2)] for a in (X1, X2)]
    x1, x2 = interior_points(200, radius, centre, seed=1)
    g = h.gradient(x1, x2)
    H = h.hessian(x1, x2)
    for i in range(2):
        np.testing.assert_allclose(g[i], grad[i](x1, x2), rtol=1e-10, atol=1e-10)
        for j in range(2):
            np.testing.assert_allclose(H[i, j], hess[i][j](x1, x2), rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_symbolic_matches_finite_differences(name):
    text, radius, centre = FIXTURES[name]
    h = parse_expression(text)
    x1, x2 = interior_points(1000, radius, centre, seed=2)
    d = 1e-5
    fd_g = np.stack([(h.value(x1 + d, x2) - h.value(x1 - d, x2)) / (2 * d),
                     (h.value(x1, x2 + d) - h.value(x1, x2 - d)) / (2 * d)])
    g = h.gradient(x1, x2)
    assert np.max(np.abs(g - fd_g)) < 1e-6
    fd_h = np.stack([(h.gradient(x1 + d, x2) - h.gradient(x1 - d, x2)) / (2 * d),
                     (h.gradient(x1, x2 + d) - h.gradient(x1, x2 - d)) / (2 * d)], axis=1)
    # fd_h[i, j] = d/dx_j of g_i
    assert np.max(np.abs(h.hessian(x1, x2) - fd_h)) < 1e-6


# -- tangencies ------------------------------------------------------------------

def test_whitney_tangency():
    ts = find_tangencies(resolve("whitney-"), resolve("whitney+"), WHITNEY_BOX)
    assert len(ts) == 1
    (t,) = ts
    assert np.hypot(*t.point) < 1e-8
    np.testing.assert_allclose(np.array(t.hessian), 2 * np.eye(2), atol=1e-6)
    assert t.sgn == 1 and t.transversal and t.hessian_det == pytest.approx(4)


def test_whitney_order_does_not_change_sign():
    # in the plane det(-M) = det(M)
    (t,) = find_tangencies(resolve("whitney+"), resolve("whitney-"), WHITNEY_BOX)
    assert t.sgn == 1


def test_parallel_planes_have_no_tangency():
    assert find_tangencies(parse_expression("x1"), parse_expression("2*x1"), WHITNEY_BOX) == []


def test_degenerate_tangency_is_flagged():
    ts = find_tangencies(parse_expression("0"), parse_expression("x1^3 + x2^2"), ((-0.5, 0.5), (-0.5, 0.5)), grid=8)
    assert ts and all(not t.transversal and t.sgn == 0 for t in ts)


def test_saddle_has_negative_sign():
    (t,) = find_tangencies(parse_expression("x2^2"), parse_expression("x1^2"), ((-1, 1), (-1, 1)), grid=8)
    assert t.sgn == -1 and t.hessian_det == pytest.approx(-4)


def deformed_slope(x1):
    # d/dx1 of the deformed lower sheet along x2 = 0, derived by hand
    u = (x1 + 0.5) ** 2 / 0.01
    return -x1 * np.sqrt(1 - x1 * x1) - 0.2 * (2 * (x1 + 0.5) / 0.01) / (1 + u) ** 2


def test_deformed_fixture_against_brentq():
    xs = np.linspace(-0.95, -0.05, 20001)
    f = deformed_slope(xs) - 1
    brackets = np.flatnonzero(np.sign(f[:-1]) != np.sign(f[1:]))
    roots = [brentq(lambda x: deformed_slope(x) - 1, xs[i], xs[i + 1], xtol=1e-15) for i in brackets]
    assert len(roots) == 2
    ts = find_tangencies(resolve("deformed-"), resolve("x1"), DEFORMED_BOX)
    assert len(ts) == 2
    for t, r in zip(ts, roots):
        assert t.point[0] == pytest.approx(r, abs=1e-10)
        assert abs(t.point[1]) < 1e-10


def test_deformed_fixture_frozen_values():
    ts = find_tangencies(resolve("deformed-"), resolve("const:x1"), DEFORMED_BOX)
    assert [t.sgn for t in ts] == [-1, 1]
    assert all(t.transversal for t in ts)
    a, b = (t.point[0] for t in ts)
    assert a < b < 0
    assert a == pytest.approx(-0.660143070211, abs=1e-9)
    assert b == pytest.approx(-0.514568894782, abs=1e-9)
    # sign check against an exact sympy Hessian at the located points
    e = X1 - to_sympy(DEFORMED_MINUS)
    H = sp.hessian(e, (X1, X2))
    for t in ts:
        at = {X1: sp.Float(t.point[0], 30), X2: sp.Float(t.point[1], 30)}
        det = float(H.subs(at).evalf(30).det())
        assert np.sign(det) == t.sgn
        assert det == pytest.approx(t.hessian_det, rel=1e-8)


@pytest.mark.parametrize("pair, box", [
    (("whitney-", "whitney+"), WHITNEY_BOX),
    (("deformed-", "x1"), DEFORMED_BOX),
    (("x2^2", "x1^2 + x1*x2"), ((-1, 1), (-1, 1))),
])
def test_residual_bound(pair, box):
    h1, h2 = (resolve(p) for p in pair)
    g = h2 - h1
    for t in find_tangencies(h1, h2, box):
        assert np.hypot(*g.gradient(*t.point)) <= 1e-10


def test_tsv_format():
    (t,) = find_tangencies(resolve("whitney-"), resolve("whitney+"), WHITNEY_BOX)
    assert t.tsv() == "0\t0\t4\t1\ttrue"
    assert set(NAMED) == {"whitney+", "whitney-", "deformed-"}


# -- sign calculus --------------------------------------------------------------

def test_intersection_index_examples():
    assert intersection_index(OrientedSectionPair(1, -1), 1, 2) == 1
    assert intersection_index(OrientedSectionPair(1, 1), 1, 1) == 1
    assert intersection_index(OrientedSectionPair(1, 1), 1, 2) == -1


def test_handle_sign_examples():
    assert handle_sign(OrientedSectionPair(1, -1), 1) == 1
    assert handle_sign(OrientedSectionPair(1, 1), 1) == -1
    assert handle_sign(OrientedSectionPair(-1, -1), -1) == 1
    with pytest.raises(ValueError):
        handle_sign(OrientedSectionPair(1, 1), 0)


def test_handle_sign_composition():
    for s1, s2, sgn, n in itertools.product((1, -1), (1, -1), (1, -1), range(1, 5)):
        pair = OrientedSectionPair(s1, s2)
        ind = intersection_index(pair, sgn, n)
        assert ind == (-1) ** (n * (n - 1) // 2) * s1 * s2 * sgn
        assert handle_sign_from_index(ind, n) == handle_sign(pair, sgn) == -s1 * s2 * sgn


def test_surgery_outcomes():
    sphere_dp = SurfaceType(True, 0, 0, 1, 1)
    out = surgery_outcome("self", [sphere_dp], 1)
    assert out.surface == SurfaceType.torus()
    assert surgery_outcome("self", [sphere_dp], -1).surface == SurfaceType.nonorientable(2)
    n3 = SurfaceType(False, 0, 3, 1, 1)
    for e in (1, -1):
        assert surgery_outcome("self", [n3], e).surface == SurfaceType.nonorientable(5)
    X = RationalManifold.cp2_blowup(2)
    A, B = Mod2Class.parse(X, "H"), Mod2Class.parse(X, "E1")
    j = surgery_outcome("join", [SurfaceType.nonorientable(1), SurfaceType.torus()], 1, [A, B])
    assert j.surface == SurfaceType.nonorientable(3) and str(j.cls) == "H+E1"
    assert j.surface.euler == 1 + 0 - 2
    with pytest.raises(ValueError):
        surgery_outcome("self", [SurfaceType.torus()], 1)
    with pytest.raises(ValueError):
        surgery_outcome("twist", [sphere_dp], 1)


@given(st.booleans(), st.integers(0, 4), st.integers(1, 5), st.sampled_from([1, -1]))
def test_surgery_drops_euler_by_two(orientable, g, c, e):
    L = SurfaceType(True, g, 0, 1, 1) if orientable else SurfaceType(False, 0, c, 1, 1)
    assert surgery_outcome("self", [L], e).surface.euler == L.euler - 2


def test_add_four_chain_from_fixtures():
    (tw,) = find_tangencies(resolve("whitney-"), resolve("whitney+"), WHITNEY_BOX)
    p1, p2 = find_tangencies(resolve("deformed-"), resolve("x1"), DEFORMED_BOX)
    X = RationalManifold.cp2_blowup(1)
    for L, cls in ((SurfaceType.nonorientable(2), Mod2Class.parse(X, "H+E1")),
                   (SurfaceType.torus(), Mod2Class.zero(X)),
                   (SurfaceType.nonorientable(1), Mod2Class.parse(X, "H"))):
        r = add_four_by_surgery(L, tw.sgn, p1.sgn, p2.sgn, cls)
        assert r.cls == cls
        assert r.surface.euler == L.euler - 4
        assert not r.surface.orientable and r.surface.embedded
        assert [s.euler for s in r.stages] == [L.euler, L.euler - 2, L.euler - 4]
    r = add_four_by_surgery(SurfaceType.sphere(), tw.sgn, p1.sgn, p2.sgn)
    assert r.handle_signs == (1, 1, -1)
    assert r.surface == SurfaceType.nonorientable(4)


# -- determinants ------------------------------------------------------------------

def test_block_det_examples():
    assert block_det_sides([[0, 0], [0, 0]], [[2, 0], [0, 2]]) == (4, 4)
    A = [[1, 2], [3, 4]]
    assert block_det_sides(A, A) == (0, 0)


def test_exact_det_against_sympy():
    rng = random.Random(3)
    for n in range(1, 7):
        for _ in range(30):
            M = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
            assert exact_det(M) == sp.Matrix(M).det()
    M = [[Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 5), 1]]
    assert exact_det(M) == Fraction(1, 2) - Fraction(1, 15)
    assert exact_det([[0, 1], [1, 0]]) == -1


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_block_det_identity_random(n):
    rng = random.Random(n)
    for _ in range(200):
        A = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
        B = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
        assert block_det_identity(A, B)
    left, right = block_det_sides(A, B)
    assert left == (sp.Matrix(B) - sp.Matrix(A)).det() == right
