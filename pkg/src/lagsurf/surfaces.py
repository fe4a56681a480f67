"""Closed surface topology: spheres with handles and with crosscaps."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class SurfaceType:
    """A closed surface, possibly immersed with transverse double points.

    Orientable surfaces are described by ``genus``, non-orientable ones by
    ``crosscaps`` (N_c = c RP^2).  ``components`` counts connected pieces of a
    disjoint union, with ``genus``/``crosscaps`` summed over the pieces.
    """

    orientable: bool
    genus: int = 0
    crosscaps: int = 0
    components: int = 1
    double_points: int = 0

    def __post_init__(self):
        if self.components < 1 or self.double_points < 0 or self.genus < 0:
            raise ValueError(f"invalid surface data {self!r}")
        if self.orientable and self.crosscaps:
            raise ValueError("orientable surfaces have no crosscaps")
        if not self.orientable and self.genus:
            raise ValueError("describe non-orientable surfaces by crosscaps only")
        if not self.orientable and self.crosscaps < self.components:
            raise ValueError("a non-orientable surface needs at least one crosscap")

    @classmethod
    def sphere(cls) -> "SurfaceType":
        return cls(True, genus=0)

    @classmethod
    def torus(cls) -> "SurfaceType":
        return cls(True, genus=1)

    @classmethod
    def nonorientable(cls, crosscaps: int) -> "SurfaceType":
        return cls(False, crosscaps=crosscaps)

    @property
    def euler(self) -> int:
        if self.orientable:
            return 2 * self.components - 2 * self.genus
        return 2 * self.components - self.crosscaps

    @property
    def embedded(self) -> bool:
        return self.double_points == 0

    def connect_sum(self, other: "SurfaceType") -> "SurfaceType":
        """Connected sum of two connected surfaces; double points are carried along."""
        if self.components != 1 or other.components != 1:
            raise ValueError("connected sum needs connected surfaces")
        points = self.double_points + other.double_points
        if self.orientable and other.orientable:
            return SurfaceType(True, genus=self.genus + other.genus, double_points=points)
        crosscaps = _as_crosscaps(self) + _as_crosscaps(other)
        return SurfaceType(False, crosscaps=crosscaps, double_points=points)

    def add_crosscaps(self, n: int = 1) -> "SurfaceType":
        """This surface # n RP^2."""
        if n < 1:
            raise ValueError("need at least one crosscap")
        return replace(self, orientable=False, genus=0, crosscaps=_as_crosscaps(self) + n)

    def short(self) -> str:
        if not self.orientable:
            name = f"N{self.crosscaps}"
        elif self.genus == 0:
            name = "S2"
        elif self.genus == 1:
            name = "T2"
        else:
            name = f"Sigma{self.genus}"
        if self.double_points:
            name += f"[{self.double_points}dp]"
        return name


def _as_crosscaps(s: SurfaceType) -> int:
    # Sigma_g # RP^2 = N_{2g+1}
    return 2 * s.genus if s.orientable else s.crosscaps
