"""Integral and mod-2 second homology of rational 4-manifolds.

Bases are fixed: ``(H, E1, ..., Ek)`` for CP^2 blown up at k points and
``(B, F)`` for S^2 x S^2.  Every coefficient vector in the package uses
these orders, so certificates replay bit-exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

CP2_BLOWUP = "CP2BlowUp"
S2XS2 = "S2xS2"


class LatticeError(ValueError):
    """Malformed class or a class used with the wrong manifold."""


@dataclass(frozen=True)
class RationalManifold:
    kind: str
    k: int = 0

    def __post_init__(self):
        if self.kind == CP2_BLOWUP:
            if not isinstance(self.k, int) or self.k < 0:
                raise LatticeError(f"blow-up count must be a nonnegative integer, got {self.k!r}")
        elif self.kind == S2XS2:
            if self.k != 0:
                raise LatticeError("S2xS2 carries no blow-up count")
        else:
            raise LatticeError(f"unknown manifold kind {self.kind!r}")

    @classmethod
    def cp2_blowup(cls, k: int) -> "RationalManifold":
        return cls(CP2_BLOWUP, k)

    @classmethod
    def s2xs2(cls) -> "RationalManifold":
        return cls(S2XS2)

    @classmethod
    def parse(cls, text: str) -> "RationalManifold":
        """Parse the CLI spelling ``cp2+k`` or ``s2xs2``."""
        t = text.strip().lower()
        if t == "s2xs2":
            return cls.s2xs2()
        m = re.fullmatch(r"cp2(?:\+(\d+))?", t)
        if m is None:
            raise LatticeError(f"cannot parse manifold {text!r}; expected cp2+k or s2xs2")
        return cls.cp2_blowup(int(m.group(1) or 0))

    @property
    def is_product(self) -> bool:
        return self.kind == S2XS2

    @property
    def b2(self) -> int:
        return 2 if self.is_product else self.k + 1

    @property
    def basis_names(self) -> tuple[str, ...]:
        if self.is_product:
            return ("B", "F")
        return ("H",) + tuple(f"E{i}" for i in range(1, self.k + 1))

    def form(self) -> list[list[int]]:
        """Intersection matrix in the fixed basis."""
        n = self.b2
        if self.is_product:
            return [[0, 1], [1, 0]]
        return [[(1 if i == 0 else -1) if i == j else 0 for j in range(n)] for i in range(n)]

    def to_json(self) -> dict:
        if self.is_product:
            return {"kind": S2XS2}
        return {"kind": CP2_BLOWUP, "k": self.k}

    @classmethod
    def from_json(cls, data: dict) -> "RationalManifold":
        if not isinstance(data, dict) or "kind" not in data:
            raise LatticeError("manifold must be an object with a 'kind'")
        if data["kind"] == S2XS2:
            if set(data) != {"kind"}:
                raise LatticeError("S2xS2 manifold takes no other fields")
            return cls.s2xs2()
        if set(data) != {"kind", "k"}:
            raise LatticeError("CP2BlowUp manifold needs exactly 'kind' and 'k'")
        k = data["k"]
        if isinstance(k, bool) or not isinstance(k, int):
            raise LatticeError("manifold k must be an integer")
        return cls(data["kind"], k)

    def __str__(self):
        return "s2xs2" if self.is_product else f"cp2+{self.k}"


@dataclass(frozen=True)
class IntegralClass:
    manifold: RationalManifold
    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(map(int, self.coeffs))
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) != self.manifold.b2:
            raise LatticeError(
                f"class has {len(coeffs)} coefficients but b2({self.manifold}) = {self.manifold.b2}"
            )

    def _check_same(self, other: "IntegralClass"):
        if other.manifold != self.manifold:
            raise LatticeError(f"classes live in different manifolds: {self.manifold} vs {other.manifold}")

    def __add__(self, other: "IntegralClass") -> "IntegralClass":
        self._check_same(other)
        return IntegralClass(self.manifold, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "IntegralClass") -> "IntegralClass":
        self._check_same(other)
        return IntegralClass(self.manifold, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "IntegralClass":
        return IntegralClass(self.manifold, tuple(-a for a in self.coeffs))

    def __mul__(self, n: int) -> "IntegralClass":
        return IntegralClass(self.manifold, tuple(n * a for a in self.coeffs))

    __rmul__ = __mul__

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.coeffs) + ")"

    @classmethod
    def parse(cls, manifold: RationalManifold, text: str) -> "IntegralClass":
        m = re.fullmatch(r"\s*\(\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\)\s*", text)
        if m is None:
            raise LatticeError(f"cannot parse integral class {text!r}")
        return cls(manifold, tuple(int(c) for c in m.group(1).split(",")))

    @classmethod
    def basis(cls, manifold: RationalManifold, name: str) -> "IntegralClass":
        try:
            i = manifold.basis_names.index(name)
        except ValueError:
            raise LatticeError(f"{name!r} is not a basis class of {manifold}") from None
        return cls(manifold, tuple(int(j == i) for j in range(manifold.b2)))


@dataclass(frozen=True)
class Mod2Class:
    manifold: RationalManifold
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(self.bits)
        if not set(bits) <= {0, 1}:
            bits = tuple(int(b) & 1 for b in bits)
        object.__setattr__(self, "bits", bits)
        if len(bits) != self.manifold.b2:
            raise LatticeError(
                f"class has {len(bits)} bits but b2({self.manifold}) = {self.manifold.b2}"
            )

    @classmethod
    def zero(cls, manifold: RationalManifold) -> "Mod2Class":
        return cls(manifold, (0,) * manifold.b2)

    @property
    def is_zero(self) -> bool:
        return not any(self.bits)

    def __add__(self, other: "Mod2Class") -> "Mod2Class":
        if other.manifold != self.manifold:
            raise LatticeError(f"classes live in different manifolds: {self.manifold} vs {other.manifold}")
        return Mod2Class(self.manifold, tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def __str__(self):
        names = [n for n, b in zip(self.manifold.basis_names, self.bits) if b]
        return "+".join(names) if names else "0"

    @classmethod
    def parse(cls, manifold: RationalManifold, text: str) -> "Mod2Class":
        """Parse ``H+E1+E3``, ``B+F`` or ``0``; repeated terms cancel mod 2."""
        t = text.replace(" ", "")
        if t == "0":
            return cls.zero(manifold)
        if not t:
            raise LatticeError("empty class string")
        names = manifold.basis_names
        bits = [0] * manifold.b2
        for term in t.split("+"):
            if term not in names:
                raise LatticeError(f"unknown basis class {term!r} for {manifold} (expected one of {', '.join(names)})")
            bits[names.index(term)] ^= 1
        return cls(manifold, tuple(bits))


class CP2Signature(NamedTuple):
    a: int
    m: int


class ProductSignature(NamedTuple):
    p: int
    q: int


def pairing(x: IntegralClass, y: IntegralClass) -> int:
    """Intersection number of two integral classes."""
    if x.manifold != y.manifold:
        raise LatticeError(f"classes live in different manifolds: {x.manifold} vs {y.manifold}")
    c, d = x.coeffs, y.coeffs
    if x.manifold.is_product:
        return c[0] * d[1] + c[1] * d[0]
    return c[0] * d[0] - sum(a * b for a, b in zip(c[1:], d[1:]))


def canonical_class(X: RationalManifold) -> IntegralClass:
    if X.is_product:
        return IntegralClass(X, (-2, -2))
    return IntegralClass(X, (-3,) + (1,) * X.k)


def mod2_reduce(z: IntegralClass) -> Mod2Class:
    return Mod2Class(z.manifold, tuple(c % 2 for c in z.coeffs))


def lift(A: Mod2Class) -> IntegralClass:
    """The 0/1 integral lift."""
    return IntegralClass(A.manifold, A.bits)


def w2_pairing(A: Mod2Class) -> int:
    """<w2(X), A>, computed as the self-intersection of a lift mod 2."""
    z = lift(A)
    return pairing(z, z) % 2


def orbit_signature(A: Mod2Class) -> CP2Signature | ProductSignature:
    if A.manifold.is_product:
        return ProductSignature(*A.bits)
    return CP2Signature(A.bits[0], sum(A.bits[1:]))


def enumerate_mod2_classes(X: RationalManifold, include_zero: bool = False) -> Iterator[Mod2Class]:
    """All classes of X; bit j of the running index is the coefficient of basis element j."""
    n = X.b2
    for i in range(0 if include_zero else 1, 1 << n):
        yield Mod2Class(X, tuple((i >> j) & 1 for j in range(n)))


def permute_exceptional(A: Mod2Class, perm: Sequence[int]) -> Mod2Class:
    """Move the coefficient of E_i to E_perm[i-1] (perm is a 1-based image list)."""
    X = A.manifold
    if X.is_product:
        raise LatticeError("S2xS2 has no exceptional classes to permute")
    if sorted(perm) != list(range(1, X.k + 1)):
        raise LatticeError(f"{list(perm)} is not a permutation of 1..{X.k}")
    bits = [A.bits[0]] + [0] * X.k
    for i, target in enumerate(perm, start=1):
        bits[target] = A.bits[i]
    return Mod2Class(X, tuple(bits))

