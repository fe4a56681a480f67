import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lagsurf.lattice import (
    CP2Signature,
    IntegralClass,
    LatticeError,
    Mod2Class,
    ProductSignature,
    RationalManifold,
    canonical_class,
    enumerate_mod2_classes,
    lift,
    mod2_reduce,
    orbit_signature,
    pairing,
    permute_exceptional,
    w2_pairing,
)
from conftest import cp2

S = RationalManifold.s2xs2()


def gram(X):
    # independent construction of the intersection matrix
    if X.is_product:
        return np.array([[0, 1], [1, 0]])
    return np.diag([1] + [-1] * X.k)


def test_manifold_parse_and_json():
    assert RationalManifold.parse("cp2+3") == cp2(3)
    assert RationalManifold.parse("s2xs2") == S
    assert str(cp2(5)) == "cp2+5"
    assert RationalManifold.from_json(cp2(4).to_json()) == cp2(4)
    assert RationalManifold.from_json(S.to_json()) == S
    assert cp2(4).to_json() == {"kind": "CP2BlowUp", "k": 4}
    assert RationalManifold.parse("cp2") == cp2(0)
    for bad in ("cp2+-1", "s2", "CP2+1x"):
        with pytest.raises(LatticeError):
            RationalManifold.parse(bad)


def test_form_matches_gram():
    for X in (cp2(0), cp2(3), S):
        assert np.array_equal(np.array(X.form()), gram(X))


def test_pairing_examples():
    X = cp2(1)
    H = IntegralClass.basis(X, "H")
    assert pairing(H, H) == 1
    X4 = cp2(4)
    Z1 = IntegralClass(X4, (1, -1, -1, -1, 0))
    assert pairing(Z1, canonical_class(X4)) == 0
    d = IntegralClass(S, (1, -1))
    assert pairing(d, d) == -2


def test_canonical_class():
    assert canonical_class(cp2(0)).coeffs == (-3,)
    assert canonical_class(cp2(2)).coeffs == (-3, 1, 1)
    K = canonical_class(S)
    assert K.coeffs == (-2, -2)
    assert pairing(K, K) == 8


@given(st.integers(0, 10).flatmap(lambda k: st.tuples(
    st.just(k),
    *[st.lists(st.integers(-20, 20), min_size=k + 1, max_size=k + 1) for _ in range(3)],
    st.integers(-5, 5),
)))
def test_pairing_bilinear_symmetric(data):
    k, x, y, z, n = data
    X = cp2(k)
    x, y, z = (IntegralClass(X, tuple(v)) for v in (x, y, z))
    assert pairing(x, y) == pairing(y, x)
    assert pairing(x + y * n, z) == pairing(x, z) + n * pairing(y, z)
    assert pairing(x, y) == int(np.array(x.coeffs) @ gram(X) @ np.array(y.coeffs))


def test_mod2_reduce_examples():
    assert str(mod2_reduce(IntegralClass(cp2(6), (2, -1, -1, -1, -1, -1, -1)))) == "E1+E2+E3+E4+E5+E6"
    assert str(mod2_reduce(IntegralClass(cp2(4), (1, -1, -1, -1, 0)))) == "H+E1+E2+E3"
    assert mod2_reduce(IntegralClass(cp2(2), (0, 0, 0))).is_zero


def test_lift_examples():
    assert lift(Mod2Class.parse(cp2(1), "H+E1")).coeffs == (1, 1)
    assert lift(Mod2Class.zero(cp2(1))).coeffs == (0, 0)
    assert lift(Mod2Class.parse(S, "B+F")).coeffs == (1, 1)


def test_mod2_parse_and_str():
    X = cp2(5)
    A = Mod2Class.parse(X, "H+E2+E5")
    assert A.bits == (1, 0, 1, 0, 0, 1)
    assert str(A) == "H+E2+E5"
    assert str(Mod2Class.parse(X, "0")) == "0"
    assert Mod2Class.parse(X, "E2+E2").is_zero
    for bad in ("E6", "H+", "", "Q", "B"):
        with pytest.raises(LatticeError):
            Mod2Class.parse(X, bad)
    assert Mod2Class(X, (1, 2, 3, 0, 0, -1)).bits == (1, 0, 1, 0, 0, 1)
    with pytest.raises(LatticeError):
        Mod2Class(X, (1, 0))


def test_orbit_signature():
    assert orbit_signature(Mod2Class.parse(cp2(6), "H+E2+E5")) == CP2Signature(1, 2)
    assert orbit_signature(Mod2Class.parse(cp2(3), "E3")) == CP2Signature(0, 1)
    assert orbit_signature(Mod2Class.parse(S, "B")) == ProductSignature(1, 0)


def test_enumeration_counts():
    assert [str(A) for A in enumerate_mod2_classes(cp2(1))] == ["H", "E1", "H+E1"]
    assert len(list(enumerate_mod2_classes(S, include_zero=True))) == 4
    assert sum(1 for _ in enumerate_mod2_classes(cp2(12))) == 8191


def test_enumeration_is_exhaustive_and_distinct():
    for k in range(5):
        got = {A.bits for A in enumerate_mod2_classes(cp2(k), include_zero=True)}
        assert got == set(itertools.product((0, 1), repeat=k + 1))


def test_w2_is_self_pairing_mod_2():
    # Wu formula checked against the independent gram matrix
    for k in range(7):
        X = cp2(k)
        for A in enumerate_mod2_classes(X, include_zero=True):
            v = np.array(A.bits)
            assert w2_pairing(A) == int(v @ gram(X) @ v) % 2


def test_permute_exceptional():
    X = cp2(3)
    A = Mod2Class.parse(X, "H+E1")
    assert str(permute_exceptional(A, [3, 1, 2])) == "H+E3"
    with pytest.raises(LatticeError):
        permute_exceptional(A, [1, 1, 2])
    with pytest.raises(LatticeError):
        permute_exceptional(A, [1, 2])


@given(st.permutations(list(range(1, 7))), st.lists(st.integers(0, 1), min_size=7, max_size=7))
def test_permutation_preserves_signature(perm, bits):
    A = Mod2Class(cp2(6), tuple(bits))
    assert orbit_signature(permute_exceptional(A, perm)) == orbit_signature(A)
