"""Sign calculus for Lagrangian surgery on wavefronts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ..lattice import Mod2Class
from ..surfaces import SurfaceType

SELF = "self"
JOIN = "join"


def _unit(v: int, what: str) -> int:
    if v not in (1, -1):
        raise ValueError(f"{what} must be +1 or -1, got {v!r}")
    return v


@dataclass(frozen=True)
class OrientedSectionPair:
    """Orientation signs s(L1), s(L2) of two sections relative to the base."""

    s1: int
    s2: int

    def __post_init__(self):
        _unit(self.s1, "s1")
        _unit(self.s2, "s2")

    @property
    def s(self) -> int:
        return self.s1 * self.s2


def _swap_sign(n: int) -> int:
    # sign of reordering (x1..xn, y1..yn) into (x1, y1, ..., xn, yn)
    return -1 if (n * (n - 1) // 2) % 2 else 1


def intersection_index(pair: OrientedSectionPair, sgn: int, n: int = 2) -> int:
    if n < 1:
        raise ValueError("dimension must be positive")
    return _swap_sign(n) * pair.s * _unit(sgn, "sgn")


def handle_sign(pair: OrientedSectionPair, sgn: int) -> int:
    """Sign of the Lagrangian handle at a transverse point of two sections."""
    return -pair.s * _unit(sgn, "sgn")


def handle_sign_from_index(index: int, n: int) -> int:
    """Handle sign (-1)^{n(n-1)/2 + 1} ind(l1, l2) for a linear handle in R^{2n}."""
    return -_swap_sign(n) * _unit(index, "index")


@dataclass(frozen=True)
class SurgeryOutcome:
    surface: SurfaceType
    handle_sign: int
    cls: Optional[Mod2Class] = None


def surgery_outcome(
    config: str,
    surfaces: Sequence[SurfaceType],
    handle_sign: int,
    classes: Optional[Sequence[Mod2Class]] = None,
    mutual_points: int = 1,
) -> SurgeryOutcome:
    """Topology after resolving one transverse double point of a Lagrangian surface.

    ``config="self"`` resolves a self-intersection of one connected surface: an
    orientable surface gains a torus for a positive handle and a Klein bottle
    for a negative one; a non-orientable one gains either (they agree).  The
    mod-2 class is unchanged.

    ``config="join"`` resolves one of ``mutual_points`` intersections between two
    surfaces, giving their connected sum; the remaining mutual points become
    double points of the result and the classes add.
    """
    _unit(handle_sign, "handle_sign")
    if config == SELF:
        if len(surfaces) != 1:
            raise ValueError("self surgery takes one surface")
        (L,) = surfaces
        if L.double_points < 1:
            raise ValueError("self surgery needs a double point")
        base = SurfaceType(L.orientable, L.genus, L.crosscaps, 1, L.double_points - 1)
        handle = SurfaceType.torus() if (L.orientable and handle_sign > 0) else SurfaceType.nonorientable(2)
        cls = classes[0] if classes else None
        return SurgeryOutcome(base.connect_sum(handle), handle_sign, cls)
    if config == JOIN:
        if len(surfaces) != 2:
            raise ValueError("join surgery takes two surfaces")
        if mutual_points < 1:
            raise ValueError("join surgery needs a mutual intersection point")
        L1, L2 = surfaces
        joined = L1.connect_sum(L2)
        joined = SurfaceType(joined.orientable, joined.genus, joined.crosscaps, 1,
                             joined.double_points + mutual_points - 1)
        cls = classes[0] + classes[1] if classes else None
        return SurgeryOutcome(joined, handle_sign, cls)
    raise ValueError(f"unknown surgery configuration {config!r}")


@dataclass(frozen=True)
class ChainResult:
    surface: SurfaceType
    cls: Optional[Mod2Class]
    handle_signs: tuple[int, int, int]
    stages: tuple[SurfaceType, ...]


def add_four_by_surgery(
    L: SurfaceType,
    sgn_whitney: int,
    sgn_p1: int,
    sgn_p2: int,
    cls: Optional[Mod2Class] = None,
    whitney_pair: OrientedSectionPair = OrientedSectionPair(1, -1),
    crossing_pair: OrientedSectionPair = OrientedSectionPair(1, 1),
) -> ChainResult:
    """Three surgeries turning L into L # 4RP^2 with a null-homologous Whitney sphere.

    The sphere has one double point p (tangency of its two sheets, sign
    ``sgn_whitney``) and meets L at p1, p2 (signs ``sgn_p1``, ``sgn_p2``
    against the deformed lower sheet).  Order: join at p1, then resolve p, then p2.
    """
    if not L.embedded:
        raise ValueError("L must be embedded")
    sphere = SurfaceType(True, 0, 0, 1, 1)
    e_p = handle_sign(whitney_pair, sgn_whitney)
    e_p1 = handle_sign(crossing_pair, sgn_p1)
    e_p2 = handle_sign(crossing_pair, sgn_p2)
    zero = Mod2Class.zero(cls.manifold) if cls is not None else None
    classes = (zero, cls) if cls is not None else None
    s3 = surgery_outcome(JOIN, (sphere, L), e_p1, classes, mutual_points=2)
    s4 = surgery_outcome(SELF, (s3.surface,), e_p, (s3.cls,) if cls is not None else None)
    s5 = surgery_outcome(SELF, (s4.surface,), e_p2, (s4.cls,) if cls is not None else None)
    return ChainResult(s5.surface, s5.cls, (e_p1, e_p, e_p2), (s3.surface, s4.surface, s5.surface))


# -- exact determinants ------------------------------------------------------

def exact_det(M: Sequence[Sequence]) -> int | Fraction:
    """Determinant by fraction-free (Bareiss) elimination; exact for ints and Fractions."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("matrix must be square")
    if n == 0:
        return 1
    integral = all(isinstance(v, int) for row in M for v in row)
    A = [list(row) if integral else [Fraction(v) for v in row] for row in M]
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
        pivot = A[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * pivot - A[i][k] * A[k][j]
                A[i][j] = num // prev if integral else num / prev
        prev = pivot
    return sign * A[n - 1][n - 1]


def block_matrix(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    """[[I, A], [I, B]]."""
    n = len(A)
    eye = [[int(i == j) for j in range(n)] for i in range(n)]
    return [eye[i] + list(A[i]) for i in range(n)] + [eye[i] + list(B[i]) for i in range(n)]


def block_det_sides(A: Sequence[Sequence], B: Sequence[Sequence]):
    """(det [[I, A], [I, B]], det(B - A))."""
    n = len(A)
    if len(B) != n or any(len(r) != n for r in A) or any(len(r) != n for r in B):
        raise ValueError("A and B must be n x n")
    diff = [[B[i][j] - A[i][j] for j in range(n)] for i in range(n)]
    return exact_det(block_matrix(A, B)), exact_det(diff)


def block_det_identity(A: Sequence[Sequence], B: Sequence[Sequence]) -> bool:
    left, right = block_det_sides(A, B)
    return left == right
