"""Pontrjagin square arithmetic and the realizability oracle for non-orientable Lagrangians."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .lattice import (
    IntegralClass,
    LatticeError,
    Mod2Class,
    RationalManifold,
    canonical_class,
    lift,
    mod2_reduce,
    orbit_signature,
    pairing,
    w2_pairing,
)

REALIZABLE = "realizable"
NOT_REALIZABLE = "not_realizable"

OK = "ok"
CONGRUENCE_FAILS = "congruence_fails"
ZERO_CLASS_KLEIN_BOTTLE = "zero_class_klein_bottle"
ZERO_CLASS_NOT_MULTIPLE_OF_4 = "zero_class_not_multiple_of_4"
EULER_TOO_LARGE = "euler_too_large"


class NotNonorientableEuler(ValueError):
    """Raised for Euler numbers no non-orientable closed surface has."""


@dataclass(frozen=True)
class PontrjaginValue:
    residue: int

    def __post_init__(self):
        object.__setattr__(self, "residue", self.residue % 4)

    @property
    def representative(self) -> int:
        """The residue moved into {-2, -1, 0, 1}."""
        return self.residue - 4 if self.residue >= 2 else self.residue


@dataclass(frozen=True)
class RealizabilityAnswer:
    verdict: str
    reason: str
    minimal_genus: Optional[int] = None
    max_euler: Optional[int] = None

    @property
    def realizable(self) -> bool:
        return self.verdict == REALIZABLE


def pontrjagin_square(A: Mod2Class) -> PontrjaginValue:
    z = lift(A)
    return PontrjaginValue(pairing(z, z))


def audin_check(A: Mod2Class, chi: int) -> bool:
    return (pontrjagin_square(A).residue - chi) % 4 == 0


def immersion_parity_check(A: Mod2Class, chi: int) -> bool:
    return (chi - w2_pairing(A)) % 2 == 0


def minimal_genus(A: Mod2Class) -> int:
    """Fewest crosscaps of an embedded non-orientable Lagrangian in a nonzero class."""
    if A.is_zero:
        raise LatticeError("minimal genus formula applies to nonzero classes only")
    return 2 - pontrjagin_square(A).representative


def realizable_nonorientable(X: RationalManifold, A: Mod2Class, chi: int) -> RealizabilityAnswer:
    if A.manifold != X:
        raise LatticeError(f"class belongs to {A.manifold}, not {X}")
    if chi > 1:
        raise NotNonorientableEuler(f"{chi} is not a non-orientable Euler number (need chi <= 1)")
    if A.is_zero:
        if chi % 4:
            return RealizabilityAnswer(NOT_REALIZABLE, ZERO_CLASS_NOT_MULTIPLE_OF_4)
        if chi == 0:
            return RealizabilityAnswer(NOT_REALIZABLE, ZERO_CLASS_KLEIN_BOTTLE)
        return RealizabilityAnswer(REALIZABLE, OK, max_euler=-4)
    P = pontrjagin_square(A)
    genus = 2 - P.representative
    best = P.representative
    if not audin_check(A, chi):
        return RealizabilityAnswer(NOT_REALIZABLE, CONGRUENCE_FAILS, genus, best)
    if chi > best:
        # unreachable for chi <= 1: the congruence already pins chi <= best
        return RealizabilityAnswer(NOT_REALIZABLE, EULER_TOO_LARGE, genus, best)
    return RealizabilityAnswer(REALIZABLE, OK, genus, best)


def zt_class(t: int, k: int) -> IntegralClass:
    """The sphere class t H - E1 - ... - E_{2t+1} - (t-1) E_{2t+2}, padded to CP2 # k."""
    if t < 0:
        raise LatticeError("t must be nonnegative")
    if k < 2 * t + 2:
        raise LatticeError(f"Z_{t} needs at least {2 * t + 2} blow-ups, got {k}")
    coeffs = [t] + [-1] * (2 * t + 1) + [-(t - 1)] + [0] * (k - 2 * t - 2)
    return IntegralClass(RationalManifold.cp2_blowup(k), tuple(coeffs))


def zt_min_blowups(t: int) -> int:
    """Smallest CP2 # k containing the support of Z_t.

    The E_{2t+2} coefficient vanishes exactly at t = 1, so Z_1 = H - E1 - E2 - E3
    already lives in CP2 # 3.
    """
    return 2 * t + 1 if t == 1 else 2 * t + 2


def sphere_class_check(X: RationalManifold, Z: IntegralClass) -> bool:
    """Arithmetic half of the Li-Wu criterion: Z.K = 0 and Z.Z = -2."""
    if Z.manifold != X:
        raise LatticeError(f"class belongs to {Z.manifold}, not {X}")
    return pairing(Z, canonical_class(X)) == 0 and pairing(Z, Z) == -2


def sphere_advisory(A: Mod2Class) -> bool:
    """Whether A is, up to relabelling, the reduction of a Z_t sphere (or B+F) fitting in its ambient."""
    X = A.manifold
    if X.is_product:
        return A.bits == (1, 1)
    a, m = orbit_signature(A)
    if a == 0 and m % 4 == 2:
        return True
    if a == 1 and m % 4 == 3:
        t = (m - 3) // 2 + 1
        return zt_min_blowups(t) <= X.k
    return False


def signature(X: RationalManifold) -> int:
    return 0 if X.is_product else 1 - X.k


def is_characteristic(A: Mod2Class) -> bool:
    """A reduces w2(X), i.e. equals the reduction of the canonical class."""
    return A == mod2_reduce(canonical_class(A.manifold))


def characteristic_obstruction(A: Mod2Class, chi: int) -> bool:
    """True when no embedded N_{2-chi} can carry the characteristic class A.

    Guillou-Marin for a characteristic surface F gives sign(X) - e(normal) = 2 Brown(F)
    mod 16.  A Lagrangian has e(normal) = -chi, and the Brown invariant of a form
    on H_1(N_c; Z/2) is a sum of c terms +-1 mod 8.
    """
    if not is_characteristic(A) or chi > 1:
        return False
    c = 2 - chi
    total = signature(A.manifold) + chi
    if total % 2:
        return True
    need = (total // 2) % 8
    return all((b - need) % 8 for b in range(-c, c + 1, 2))

