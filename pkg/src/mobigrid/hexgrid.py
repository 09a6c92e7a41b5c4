"""Hexagonal lattice coordinates and the cell -> AO -> VO coverage map."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple


class HexCoord(NamedTuple):
    q: int
    r: int

    def __str__(self) -> str:
        return f"{self.q},{self.r}"

    @classmethod
    def parse(cls, text: str) -> "HexCoord":
        q, r = text.split(",")
        return cls(int(q), int(r))


# Axial offsets for lattice directions 0..5, counterclockwise from +q.
AXIAL_OFFSETS = (
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
)


def neighbor(cell: HexCoord, heading: int) -> HexCoord:
    """Adjacent cell one step along a lattice direction."""
    if heading not in range(6):
        raise ValueError(f"heading must be in 0..5, got {heading}")
    dq, dr = AXIAL_OFFSETS[heading]
    return HexCoord(cell.q + dq, cell.r + dr)


def hex_distance(a: HexCoord, b: HexCoord) -> int:
    dq = a.q - b.q
    dr = a.r - b.r
    return max(abs(dq), abs(dr), abs(dq + dr))


def hex_disk(center: HexCoord, radius: int) -> list[HexCoord]:
    """All cells within `radius` lattice steps of `center`, sorted."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    cells = []
    for dq in range(-radius, radius + 1):
        for dr in range(max(-radius, -dq - radius), min(radius, -dq + radius) + 1):
            cells.append(HexCoord(center.q + dq, center.r + dr))
    return sorted(cells)


class MoveClass(Enum):
    SAME_AO = "same_ao"
    INTRA_VO = "intra_vo"
    INTER_VO = "inter_vo"
    OUT_OF_COVERAGE = "out_of_coverage"


@dataclass(frozen=True)
class TopologyMap:
    """Immutable assignment of lattice cells to AOs and AOs to VOs."""

    cells: dict[HexCoord, int]
    ao_to_vo: dict[int, int]
    vo_count: int
    aos_per_vo: int
    _coverage: tuple[HexCoord, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_coverage", tuple(sorted(self.cells)))

    def in_coverage(self, cell: HexCoord) -> bool:
        return cell in self.cells

    def ao_of(self, cell: HexCoord) -> int | None:
        return self.cells.get(cell)

    def vo_of(self, cell: HexCoord) -> int | None:
        ao = self.cells.get(cell)
        return None if ao is None else self.ao_to_vo[ao]

    @property
    def coverage_cells(self) -> tuple[HexCoord, ...]:
        return self._coverage


def build_topology(vo_count: int, aos_per_vo: int, ao_radius: int = 0) -> TopologyMap:
    """Lay out vo_count * aos_per_vo AO clusters in a contiguous chain.

    Each AO is a hex disk of `ao_radius` around its center; centers are
    spaced 2*ao_radius + 1 apart along the q axis so adjacent clusters
    touch. AO i belongs to VO i // aos_per_vo.
    """
    if vo_count < 1 or aos_per_vo < 1:
        raise ValueError("vo_count and aos_per_vo must be >= 1")
    if ao_radius < 0:
        raise ValueError("ao_radius must be >= 0")
    cells: dict[HexCoord, int] = {}
    ao_to_vo: dict[int, int] = {}
    spacing = 2 * ao_radius + 1
    for ao in range(vo_count * aos_per_vo):
        center = HexCoord(ao * spacing, 0)
        for cell in hex_disk(center, ao_radius):
            cells[cell] = ao
        ao_to_vo[ao] = ao // aos_per_vo
    return TopologyMap(cells, ao_to_vo, vo_count, aos_per_vo)


def classify_transition(topo: TopologyMap, frm: HexCoord, to: HexCoord) -> MoveClass:
    """Classify a one-step move for location-update vs handover handling."""
    from_ao = topo.ao_of(frm)
    if from_ao is None:
        raise ValueError(f"move origin {frm} is out of coverage")
    to_ao = topo.ao_of(to)
    if to_ao is None:
        return MoveClass.OUT_OF_COVERAGE
    if to_ao == from_ao:
        return MoveClass.SAME_AO
    if topo.ao_to_vo[to_ao] == topo.ao_to_vo[from_ao]:
        return MoveClass.INTRA_VO
    return MoveClass.INTER_VO
