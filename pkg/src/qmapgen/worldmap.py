"""World grid: influence fields, ownership, cities, razing, transfers.

A nation's influence at a cell is the sum of the distance kernel over its
living cities. Cell ownership is the influence argmax (lowest nation index on
exact ties), or unclaimed when nobody reaches it. Incremental updates are
engineered to be bit-identical to a from-scratch recomputation: every cell
value is always the sum of kernel contributions taken in city-list order, so
additions append a term and removals replay the affected cells from scratch
in the same order.

Grid coordinates are (row, col); "row-major order" sorts by row, then col.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np

from .policy import Tactic, TacticKind

__all__ = [
    "MapConfig",
    "City",
    "NationStats",
    "PlacementOutcome",
    "Transfer",
    "WorldMap",
    "kernel",
    "influence_stamp",
    "detect_transfers",
    "stats",
    "UNCLAIMED",
]

UNCLAIMED = -1
_OFF_MAP = -2

Cell = tuple[int, int]


def kernel(d: float, r: float) -> float:
    """Influence of a city at Euclidean distance d for reach parameter r.

    1 + min(1, 1/d) out to r, then 1/d out to 2r, then zero. At the city
    itself the min saturates and the value is 2.
    """
    if d < 0:
        raise ValueError("distance cannot be negative")
    if d <= r:
        return 2.0 if d == 0 else 1.0 + min(1.0, 1.0 / d)
    if d <= 2 * r:
        return 1.0 / d
    return 0.0


@lru_cache(maxsize=None)
def influence_stamp(r: int) -> np.ndarray:
    """Kernel values on the (4r+1)^2 offset grid around a city (read-only)."""
    half = 2 * r
    offs = np.arange(-half, half + 1)
    dist = np.hypot(offs[:, None], offs[None, :])
    stamp = np.zeros_like(dist)
    near = dist <= r
    far = (dist > r) & (dist <= 2 * r)
    with np.errstate(divide="ignore"):
        inv = np.where(dist > 0, 1.0 / dist, np.inf)
    stamp[near] = 1.0 + np.minimum(1.0, inv[near])
    stamp[far] = inv[far]
    stamp.setflags(write=False)
    return stamp


@dataclass(frozen=True)
class MapConfig:
    L: int
    r: int
    aggressive_threshold: Optional[float] = None

    def __post_init__(self) -> None:
        if self.L < 16:
            raise ValueError("grid side must be at least 16")
        if self.r < 1:
            raise ValueError("influence radius must be at least 1")
        if 2 * self.r >= self.L:
            raise ValueError("influence diameter must fit inside the grid")
        if self.aggressive_threshold is None:
            # the reach of a single city at distance r/2
            object.__setattr__(
                self, "aggressive_threshold", 1.0 + min(1.0, 2.0 / self.r)
            )

    @property
    def city_disc(self) -> float:
        return math.pi * self.r * self.r

    def to_dict(self) -> dict:
        return {"L": self.L, "r": self.r, "aggressive_threshold": self.aggressive_threshold}

    @classmethod
    def from_dict(cls, data: dict) -> "MapConfig":
        return cls(int(data["L"]), int(data["r"]), data.get("aggressive_threshold"))


@dataclass
class City:
    owner: int
    row: int
    col: int
    is_capital: bool = False
    placed_round: int = 0

    @property
    def cell(self) -> Cell:
        return (self.row, self.col)

    def to_dict(self) -> dict:
        return {
            "owner": self.owner,
            "cell": [self.row, self.col],
            "capital": self.is_capital,
            "placed_round": self.placed_round,
        }


@dataclass(frozen=True)
class NationStats:
    area: int
    frontier: int
    lost: int
    gained: int

    def to_dict(self) -> dict:
        return {
            "area": self.area,
            "frontier": self.frontier,
            "lost": self.lost,
            "gained": self.gained,
        }


@dataclass(frozen=True)
class PlacementOutcome:
    cell: Cell
    razed: tuple[Cell, ...] = ()
    # the count/cap the razing decision saw, for audits
    pre_count: int = 0
    pre_cap: int = 0


@dataclass(frozen=True)
class Transfer:
    cell: Cell
    old_owner: int
    new_owner: int


@dataclass
class Borders:
    """Nation j's border cells, grouped by what lies on the other side."""

    neighbours: dict[int, list[Cell]]
    frontier: list[Cell]


class WorldMap:
    def __init__(self, config: MapConfig, num_nations: int):
        self.config = config
        self.num_nations = num_nations
        L = config.L
        self.cities: list[City] = []
        self.ruins = np.zeros((L, L), dtype=bool)
        self.influence = np.zeros((num_nations, L, L), dtype=np.float64)
        self.ownership = np.full((L, L), UNCLAIMED, dtype=np.int32)
        self._occupied: dict[Cell, City] = {}

    @classmethod
    def create(
        cls, config: MapConfig, num_nations: int, capitals: Iterable[Cell]
    ) -> "WorldMap":
        world = cls(config, num_nations)
        capitals = list(capitals)
        if len(capitals) != num_nations:
            raise ValueError("need exactly one capital per nation")
        for owner, cell in enumerate(capitals):
            world.add_city(owner, tuple(cell), placed_round=0, is_capital=True)
        return world

    def clone(self) -> "WorldMap":
        other = WorldMap(self.config, self.num_nations)
        other.cities = [City(**vars(c)) for c in self.cities]
        other.ruins = self.ruins.copy()
        other.influence = self.influence.copy()
        other.ownership = self.ownership.copy()
        other._occupied = {c.cell: c for c in other.cities}
        return other

    # -- queries ---------------------------------------------------------

    def living_cities(self, nation: int) -> list[City]:
        return [c for c in self.cities if c.owner == nation]

    def city_count(self, nation: int) -> int:
        return sum(1 for c in self.cities if c.owner == nation)

    def area(self, nation: int) -> int:
        return int((self.ownership == nation).sum())

    def city_cap(self, nation: int) -> int:
        return max(1, int(self.area(nation) // self.config.city_disc))

    def is_eliminated(self, nation: int) -> bool:
        return self.city_count(nation) == 0

    def city_at(self, cell: Cell) -> Optional[City]:
        return self._occupied.get(tuple(cell))

    # -- influence bookkeeping --------------------------------------------

    def _patch_box(self, row: int, col: int) -> tuple[int, int, int, int]:
        half = 2 * self.config.r
        L = self.config.L
        return (
            max(0, row - half),
            min(L, row + half + 1),
            max(0, col - half),
            min(L, col + half + 1),
        )

    def _add_stamp(self, nation: int, row: int, col: int) -> None:
        half = 2 * self.config.r
        r0, r1, c0, c1 = self._patch_box(row, col)
        stamp = influence_stamp(self.config.r)
        self.influence[nation, r0:r1, c0:c1] += stamp[
            r0 - row + half : r1 - row + half, c0 - col + half : c1 - col + half
        ]

    def _replay_box(self, box: tuple[int, int, int, int], nations: Iterable[int]) -> None:
        """Rebuild influence rows inside `box` from scratch, in city-list
        order, so removals stay bit-identical to a full recompute."""
        r0, r1, c0, c1 = box
        half = 2 * self.config.r
        stamp = influence_stamp(self.config.r)
        nations = set(nations)
        for nation in nations:
            self.influence[nation, r0:r1, c0:c1] = 0.0
        for city in self.cities:
            if city.owner not in nations:
                continue
            cr0, cr1, cc0, cc1 = self._patch_box(city.row, city.col)
            ir0, ir1 = max(r0, cr0), min(r1, cr1)
            ic0, ic1 = max(c0, cc0), min(c1, cc1)
            if ir0 >= ir1 or ic0 >= ic1:
                continue
            self.influence[city.owner, ir0:ir1, ic0:ic1] += stamp[
                ir0 - city.row + half : ir1 - city.row + half,
                ic0 - city.col + half : ic1 - city.col + half,
            ]

    def _refresh_ownership(self, box: Optional[tuple[int, int, int, int]] = None) -> None:
        if box is None:
            box = (0, self.config.L, 0, self.config.L)
        r0, r1, c0, c1 = box
        sub = self.influence[:, r0:r1, c0:c1]
        best = sub.max(axis=0)
        arg = sub.argmax(axis=0).astype(np.int32)
        self.ownership[r0:r1, c0:c1] = np.where(best > 0.0, arg, UNCLAIMED)

    def recompute(self, changed: Optional[Iterable[Cell]] = None) -> None:
        """Rebuild influence and ownership; `changed` limits the work to the
        reach of the given city cells, with bit-identical results."""
        if changed is None:
            self.influence[:] = 0.0
            for city in self.cities:
                self._add_stamp(city.owner, city.row, city.col)
            self._refresh_ownership()
            return
        for row, col in changed:
            box = self._patch_box(row, col)
            self._replay_box(box, range(self.num_nations))
            self._refresh_ownership(box)

    # -- mutations ---------------------------------------------------------

    def add_city(
        self, nation: int, cell: Cell, placed_round: int, is_capital: bool = False
    ) -> City:
        row, col = cell
        if not (0 <= row < self.config.L and 0 <= col < self.config.L):
            raise ValueError(f"cell {cell} out of bounds")
        if self.ruins[row, col]:
            raise ValueError(f"cell {cell} is a ruin")
        if (row, col) in self._occupied:
            raise ValueError(f"cell {cell} already holds a city")
        city = City(nation, row, col, is_capital, placed_round)
        self.cities.append(city)
        self._occupied[(row, col)] = city
        self._add_stamp(nation, row, col)
        self._refresh_ownership(self._patch_box(row, col))
        return city

    def raze_city(self, city: City) -> None:
        """Remove a city; its cell becomes a permanent ruin."""
        self.cities.remove(city)
        del self._occupied[city.cell]
        self.ruins[city.row, city.col] = True
        box = self._patch_box(city.row, city.col)
        self._replay_box(box, [city.owner])
        self._refresh_ownership(box)

    # -- borders and candidates ---------------------------------------------

    def _shifted_ownership(self) -> list[np.ndarray]:
        own = self.ownership
        out = []
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            shifted = np.full_like(own, _OFF_MAP)
            src_r = slice(max(0, -dr), own.shape[0] - max(0, dr))
            dst_r = slice(max(0, dr), own.shape[0] - max(0, -dr))
            src_c = slice(max(0, -dc), own.shape[1] - max(0, dc))
            dst_c = slice(max(0, dc), own.shape[1] - max(0, -dc))
            shifted[dst_r, dst_c] = own[src_r, src_c]
            out.append(shifted)
        return out

    def borders(self, nation: int) -> Borders:
        """Cells of `nation` that touch another nation or unclaimed ground."""
        own_mask = self.ownership == nation
        L = self.config.L
        frontier_codes: list[np.ndarray] = []
        neighbour_codes: dict[int, list[np.ndarray]] = {}
        for shifted in self._shifted_ownership():
            frontier_mask = own_mask & (shifted == UNCLAIMED)
            frontier_codes.append(np.flatnonzero(frontier_mask))
            other = own_mask & (shifted >= 0) & (shifted != nation)
            codes = np.flatnonzero(other)
            for k in np.unique(shifted[other]):
                sel = shifted.reshape(-1)[codes] == k
                neighbour_codes.setdefault(int(k), []).append(codes[sel])

        def decode(code_lists: list[np.ndarray]) -> list[Cell]:
            if not code_lists:
                return []
            codes = np.unique(np.concatenate(code_lists))
            return [(int(c) // L, int(c) % L) for c in codes]

        return Borders(
            neighbours={k: decode(v) for k, v in sorted(neighbour_codes.items())},
            frontier=decode(frontier_codes),
        )

    def _placeable(self, cells: list[Cell]) -> list[Cell]:
        return [
            cell
            for cell in cells
            if not self.ruins[cell] and cell not in self._occupied
        ]

    def candidate_cells(self, nation: int, tactic: Tactic) -> list[Cell]:
        """Row-major-ordered cells where `tactic` may place a city."""
        borders = self.borders(nation)
        if tactic.kind is TacticKind.EXPLORE:
            return self._placeable(borders.frontier)
        cells = self._placeable(borders.neighbours.get(tactic.target, []))
        if tactic.kind is TacticKind.DEFEND:
            return cells
        thr = self.config.aggressive_threshold
        return [c for c in cells if self.influence[nation][c] <= thr]

    def _objective(self, nation: int, tactic: Tactic, cell: Cell) -> float:
        field_owner = nation if tactic.kind is not TacticKind.ATTACK else tactic.target
        return float(self.influence[field_owner][cell])

    def can_make_room(self, nation: int) -> bool:
        """Whether a further city could be placed under the cap rules,
        razing included; pure query, no mutation."""
        if self.city_count(nation) < self.city_cap(nation):
            return True
        return any(not c.is_capital for c in self.living_cities(nation))

    def _make_room(self, nation: int) -> Optional[list[Cell]]:
        """Raze one city if the cap has been reached; None if impossible.

        The victim is the non-capital city of maximal own influence, ties by
        row-major cell order. The capital itself is never razed.
        """
        if self.city_count(nation) < self.city_cap(nation):
            return []
        victims = sorted(
            (c for c in self.living_cities(nation) if not c.is_capital),
            key=lambda c: (-self.influence[nation, c.row, c.col], c.row, c.col),
        )
        if not victims:
            return None
        self.raze_city(victims[0])
        return [victims[0].cell]

    def place_city(
        self, nation: int, tactic: Tactic, placed_round: int
    ) -> Optional[PlacementOutcome]:
        """Place under `tactic`; returns None when infeasible.

        The cell is the objective argmin over the tactic's candidates (own
        influence for defend/explore, the target's for attack), row-major on
        ties. Razing to satisfy the cap happens before the new city lands.
        """
        if self.is_eliminated(nation):
            raise ValueError(f"nation {nation} has no cities")
        candidates = self.candidate_cells(nation, tactic)
        if not candidates:
            return None
        values = [self._objective(nation, tactic, cell) for cell in candidates]
        chosen = candidates[int(np.argmin(values))]
        pre_count, pre_cap = self.city_count(nation), self.city_cap(nation)
        razed = self._make_room(nation)
        if razed is None:
            return None
        self.add_city(nation, chosen, placed_round)
        return PlacementOutcome(chosen, tuple(razed), pre_count, pre_cap)

    def place_at(
        self, nation: int, cell: Cell, placed_round: int
    ) -> Optional[PlacementOutcome]:
        """Directly place at `cell` (player-controlled path); same cap and
        razing rules, no tactic objective."""
        cell = tuple(cell)
        row, col = cell
        if not (0 <= row < self.config.L and 0 <= col < self.config.L):
            raise ValueError("out of bounds")
        if self.ruins[cell]:
            raise ValueError("ruin")
        if cell in self._occupied:
            raise ValueError("occupied")
        pre_count, pre_cap = self.city_count(nation), self.city_cap(nation)
        razed = self._make_room(nation)
        if razed is None:
            return None
        self.add_city(nation, cell, placed_round)
        return PlacementOutcome(cell, tuple(razed), pre_count, pre_cap)


def detect_transfers(before: WorldMap, after: WorldMap) -> list[Transfer]:
    """Report and apply city ownership changes, in row-major cell order.

    A city standing on a cell that another nation now out-influences changes
    hands. Owner fields are updated, influence moves with the city, and a
    nation that loses its capital promotes its oldest remaining city. Knock-on
    ownership shifts caused by the moved influence are left for the next
    detection pass.
    """
    del before  # the city owner fields carry the pre-round assignment
    flips: list[tuple[City, Transfer]] = []
    for city in sorted(after.cities, key=lambda c: (c.row, c.col)):
        new_owner = int(after.ownership[city.row, city.col])
        if new_owner != city.owner:
            flips.append(
                (city, Transfer(city.cell, city.owner, new_owner))
            )
    if not flips:
        return []
    lost_capital: set[int] = set()
    for city, transfer in flips:
        if city.is_capital:
            lost_capital.add(city.owner)
        city.owner = transfer.new_owner
        city.is_capital = False
    touched = {transfer.old_owner for _, transfer in flips}
    touched |= {transfer.new_owner for _, transfer in flips}
    for city, _ in flips:
        box = after._patch_box(city.row, city.col)
        after._replay_box(box, touched)
        after._refresh_ownership(box)
    for nation in sorted(lost_capital):
        remaining = after.living_cities(nation)
        if remaining:
            remaining[0].is_capital = True
    return [transfer for _, transfer in flips]


def stats(before: WorldMap, after: WorldMap, nation: int) -> NationStats:
    """Round statistics for one nation: area, frontier length, cells lost,
    and cells conquered from other nations (expansion into unclaimed ground
    does not count as a gain)."""
    was_mine = before.ownership == nation
    is_mine = after.ownership == nation
    lost = int((was_mine & ~is_mine).sum())
    gained = int((is_mine & ~was_mine & (before.ownership >= 0)).sum())
    return NationStats(
        area=int(is_mine.sum()),
        frontier=len(after.borders(nation).frontier),
        lost=lost,
        gained=gained,
    )
