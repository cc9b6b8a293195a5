"""Round orchestrator: tomography, placements, transfer gates, feedback.

A round runs as: one snapshot of the network; each living nation (ascending
index) picks and places a city, ownership updating as it goes; city transfers
are detected against the round-start map and answered with war gates along
coupling edges (or a defeat rotation off them); finally each standard nation
receives its feedback rotation. Frozen-policy "opponent" nations never
receive single-qubit gates, only the shared cz of a war gate.

Everything is driven by one master seed, fanned out per component, so a run
is replayable byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Sequence

import networkx as nx
import numpy as np

from . import qsim
from .policy import (
    Tactic,
    defeat_rotation,
    feedback_directive,
    payoffs,
    select_action,
    synthesize_rotation,
    war_gate,
)
from .qsim import BlochVector, CouplingMap, apply_1q, init_network
from .seeds import derive_seed
from .tomography import exact_snapshot, plan_settings, sampled_snapshot
from .worldmap import (
    Cell,
    MapConfig,
    WorldMap,
    detect_transfers,
    stats,
)

__all__ = [
    "RunConfig",
    "RoundRecord",
    "Game",
    "MissingPlacementError",
    "ExperimentSummary",
    "bicoloring",
    "initial_layout",
    "run_experiment",
    "serialize_history",
    "HISTORY_FORMAT_VERSION",
]

HISTORY_FORMAT_VERSION = 1

EVEN_STATE = BlochVector(
    1.0 / math.sqrt(3.0), 1.0 / math.sqrt(3.0), 1.0 / math.sqrt(3.0)
)


class MissingPlacementError(RuntimeError):
    """A human-controlled nation has not submitted its placement."""

    def __init__(self, waiting: list[int]):
        super().__init__(f"waiting for placements from nations {waiting}")
        self.waiting = waiting


def bicoloring(coupling: CouplingMap) -> tuple[frozenset[int], frozenset[int]]:
    """Two-color the coupling graph; raises on odd cycles."""
    color: dict[int, int] = {}
    for start in range(coupling.n):
        if start in color:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            v = stack.pop()
            for u in coupling.neighbours(v):
                if u not in color:
                    color[u] = 1 - color[v]
                    stack.append(u)
                elif color[u] == color[v]:
                    raise ValueError(
                        "coupling map is not bipartite; cannot assign opponents"
                    )
    a = frozenset(v for v, c in color.items() if c == 0)
    return a, frozenset(range(coupling.n)) - a


@dataclass(frozen=True)
class RunConfig:
    coupling: CouplingMap
    map_config: MapConfig
    rounds: int = 20
    seed: int = 0
    tomography_mode: str = "exact"
    shots: int = 8192
    opponent_coloring: str = "none"  # none | colorA | colorB
    human_nations: frozenset[int] = frozenset()
    initial_layout: Optional[tuple[Cell, ...]] = None

    def __post_init__(self) -> None:
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")
        if self.tomography_mode not in ("exact", "sampled"):
            raise ValueError(f"unknown tomography mode {self.tomography_mode!r}")
        if self.opponent_coloring not in ("none", "colorA", "colorB"):
            raise ValueError(f"unknown opponent coloring {self.opponent_coloring!r}")
        if self.shots < 1:
            raise ValueError("shots must be positive")
        humans = frozenset(int(j) for j in self.human_nations)
        for j in humans:
            if not 0 <= j < self.coupling.n:
                raise ValueError(f"human nation {j} out of range")
        object.__setattr__(self, "human_nations", humans)
        if self.initial_layout is not None:
            layout = tuple((int(r), int(c)) for r, c in self.initial_layout)
            if len(layout) != self.coupling.n:
                raise ValueError("initial layout needs one capital per nation")
            object.__setattr__(self, "initial_layout", layout)
        if humans & self.opponents():
            raise ValueError("human nations cannot be opponents")

    def opponents(self) -> frozenset[int]:
        if self.opponent_coloring == "none":
            return frozenset()
        a, b = bicoloring(self.coupling)
        return a if self.opponent_coloring == "colorA" else b

    def to_dict(self) -> dict:
        return {
            "coupling": self.coupling.to_dict(),
            "map": self.map_config.to_dict(),
            "rounds": self.rounds,
            "seed": self.seed,
            "tomography_mode": self.tomography_mode,
            "shots": self.shots,
            "opponent_coloring": self.opponent_coloring,
            "human_nations": sorted(self.human_nations),
            "initial_layout": (
                None
                if self.initial_layout is None
                else [list(c) for c in self.initial_layout]
            ),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "RunConfig":
        return cls(
            coupling=CouplingMap.from_dict(data["coupling"]),
            map_config=MapConfig.from_dict(data["map"]),
            rounds=int(data.get("rounds", 20)),
            seed=int(data.get("seed", 0)),
            tomography_mode=data.get("tomography_mode", "exact"),
            shots=int(data.get("shots", 8192)),
            opponent_coloring=data.get("opponent_coloring", "none"),
            human_nations=frozenset(data.get("human_nations", ())),
            initial_layout=(
                None
                if data.get("initial_layout") is None
                else tuple(tuple(c) for c in data["initial_layout"])
            ),
        )


@dataclass
class RoundRecord:
    round: int
    tactics: list[Optional[dict]]
    placements: list[dict]
    transfers: list[dict]
    nation_stats: list[dict]
    bloch: list[list[float]]
    gates: list[dict]

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "tactics": self.tactics,
            "placements": self.placements,
            "transfers": self.transfers,
            "stats": self.nation_stats,
            "bloch": self.bloch,
            "gates": self.gates,
        }


def initial_layout(
    coupling: CouplingMap, config: MapConfig, seed: int
) -> list[Cell]:
    """Seeded force-directed capitals: coupling-graph neighbours tend to end
    up with adjacent territories.

    The layout is packed so typical nearest-neighbour capitals sit about 3r
    apart: nations contest ground from the first rounds (the engine's whole
    feedback loop feeds on contact) while the map edge stays open for
    expansion. Retries until all capitals are at least two cells apart.
    """
    graph = nx.Graph()
    graph.add_nodes_from(range(coupling.n))
    graph.add_edges_from(coupling.sorted_edges())
    target_sep = 3.0 * config.r
    for attempt in range(32):
        pos = nx.spring_layout(
            graph, seed=derive_seed(seed, "layout", attempt) % (2**32)
        )
        coords = np.array([pos[v] for v in range(coupling.n)], dtype=float)
        for axis in range(2):
            lo, hi = coords[:, axis].min(), coords[:, axis].max()
            if hi - lo < 1e-12:
                coords[:, axis] = 0.5
            else:
                coords[:, axis] = (coords[:, axis] - lo) / (hi - lo)
        if coupling.n > 1:
            nn = [
                min(
                    float(np.hypot(*(coords[i] - coords[j])))
                    for j in range(coupling.n)
                    if j != i
                )
                for i in range(coupling.n)
            ]
            unit_sep = max(float(np.median(nn)), 1e-6)
        else:
            unit_sep = 1.0
        span = min(target_sep / unit_sep, config.L - 2.0 * (2 * config.r + 2))
        base = (config.L - 1 - span) / 2.0
        cells = [
            (int(round(base + y * span)), int(round(base + x * span)))
            for x, y in coords
        ]
        ok = all(
            math.hypot(a[0] - b[0], a[1] - b[1]) >= 2.0
            for i, a in enumerate(cells)
            for b in cells[i + 1 :]
        )
        if ok:
            return cells
    raise RuntimeError(
        f"could not lay out {coupling.n} capitals with 2-cell separation"
    )


class Game:
    """One full generation run: world, network, and the growing history."""

    def __init__(self, config: RunConfig):
        self.config = config
        n = config.coupling.n
        self.opponents = config.opponents()
        if config.initial_layout is not None:
            self.capitals = [tuple(c) for c in config.initial_layout]
        else:
            self.capitals = initial_layout(
                config.coupling, config.map_config, config.seed
            )
        self.world = WorldMap.create(config.map_config, n, self.capitals)
        self.network = init_network(n, config.coupling, EVEN_STATE)
        self.records: list[RoundRecord] = []

    @property
    def n(self) -> int:
        return self.config.coupling.n

    @property
    def rounds_played(self) -> int:
        return len(self.records)

    @property
    def finished(self) -> bool:
        return self.rounds_played >= self.config.rounds

    # -- per-round machinery -------------------------------------------------

    def live_nations(self) -> list[int]:
        return [j for j in range(self.n) if not self.world.is_eliminated(j)]

    def neighbour_map(self) -> dict[int, set[int]]:
        return {
            j: set(self.world.borders(j).neighbours)
            for j in self.live_nations()
        }

    def pair_set(self, neighbours: Mapping[int, set[int]]) -> set[tuple[int, int]]:
        """Pairs tomography must cover: shared borders plus coupling edges
        between living nations (war gates act along the latter)."""
        pairs = {
            (min(j, k), max(j, k)) for j, ks in neighbours.items() for k in ks
        }
        live = set(neighbours)
        pairs |= {
            (j, k) for j, k in self.config.coupling.sorted_edges()
            if j in live and k in live
        }
        return pairs

    def snapshot(self, pairs: Iterable[tuple[int, int]], round_index: int):
        if self.config.tomography_mode == "exact":
            return exact_snapshot(self.network, pairs)
        plan = plan_settings(pairs, self.n, self.config.shots)
        return sampled_snapshot(
            self.network, plan, derive_seed(self.config.seed, "tomo", round_index)
        )

    def feasible_tactics(self, j: int, neighbours: set[int]) -> set[Tactic]:
        if not self.world.can_make_room(j):
            return set()
        feasible = set()
        if self.world.candidate_cells(j, Tactic.explore()):
            feasible.add(Tactic.explore())
        for k in neighbours:
            if self.world.candidate_cells(j, Tactic.defend(k)):
                feasible.add(Tactic.defend(k))
            if self.world.candidate_cells(j, Tactic.attack(k)):
                feasible.add(Tactic.attack(k))
        return feasible

    def advisor(self, j: int) -> tuple[Optional[Tactic], Optional[Cell]]:
        """The tactic and cell the engine would choose for nation j now."""
        if self.world.is_eliminated(j):
            return None, None
        neighbours = self.neighbour_map()
        snap = self.snapshot(self.pair_set(neighbours), self.rounds_played + 1)
        table = payoffs(snap, neighbours)
        feasible = self.feasible_tactics(j, neighbours.get(j, set()))
        if not feasible:
            return None, None
        tactic = select_action(j, table, feasible)
        cells = self.world.candidate_cells(j, tactic)
        values = [self.world._objective(j, tactic, cell) for cell in cells]
        return tactic, cells[int(np.argmin(values))]

    def run_round(
        self, human_placements: Optional[Mapping[int, Cell]] = None
    ) -> RoundRecord:
        if self.finished:
            raise RuntimeError("the configured number of rounds has been played")
        human_placements = dict(human_placements or {})
        round_index = self.rounds_played + 1
        world = self.world
        before = world.clone()
        live = self.live_nations()
        waiting = [
            j for j in live if j in self.config.human_nations
            and j not in human_placements
        ]
        if waiting:
            raise MissingPlacementError(waiting)

        neighbours = self.neighbour_map()
        snap = self.snapshot(self.pair_set(neighbours), round_index)
        table = payoffs(snap, neighbours)

        tactics: list[Optional[dict]] = [None] * self.n
        placements: list[dict] = []
        for j in live:
            if j in self.config.human_nations:
                try:
                    outcome = world.place_at(j, human_placements[j], round_index)
                except ValueError:
                    outcome = None  # cell invalidated earlier this round
                if outcome is not None:
                    tactics[j] = {"kind": "human", "target": None}
            else:
                feasible = self.feasible_tactics(j, neighbours[j])
                if not feasible:
                    continue
                tactic = select_action(j, table, feasible)
                outcome = world.place_city(j, tactic, round_index)
                if outcome is None:
                    continue
                tactics[j] = tactic.to_dict()
            if outcome is not None:
                placements.append(
                    {
                        "nation": j,
                        "cell": list(outcome.cell),
                        "razed": [list(c) for c in outcome.razed],
                    }
                )

        gates: list[dict] = []
        transfer_records: list[dict] = []
        for transfer in detect_transfers(before, world):
            loser, winner = transfer.old_owner, transfer.new_owner
            if self.config.coupling.has_edge(loser, winner):
                rotated = [q for q in (loser, winner) if q not in self.opponents]
                war_gate(
                    self.network,
                    snap,
                    loser,
                    winner,
                    rotate_j=loser not in self.opponents,
                    rotate_k=winner not in self.opponents,
                )
                gates.append(
                    {"kind": "war", "pair": [loser, winner], "rotated": rotated}
                )
                answer = "war"
            elif loser not in self.opponents:
                defeat_rotation(self.network, loser)
                gates.append({"kind": "defeat", "qubit": loser})
                answer = "defeat"
            else:
                answer = "none"
            transfer_records.append(
                {
                    "cell": list(transfer.cell),
                    "from": loser,
                    "to": winner,
                    "gate": answer,
                }
            )

        nation_stats = [stats(before, world, j) for j in range(self.n)]
        for j in range(self.n):
            if j in self.opponents or world.is_eliminated(j):
                continue
            directive = feedback_directive(
                j, nation_stats[j], self.config.map_config.r
            )
            if directive is None:
                continue
            current = qsim.bloch_vector(self.network, j)
            gate = synthesize_rotation(current, directive.target, directive.fraction)
            apply_1q(self.network, j, gate)
            gates.append(
                {
                    "kind": "feedback",
                    "qubit": j,
                    "target": list(directive.target),
                    "fraction": directive.fraction,
                }
            )

        record = RoundRecord(
            round=round_index,
            tactics=tactics,
            placements=placements,
            transfers=transfer_records,
            nation_stats=[s.to_dict() for s in nation_stats],
            bloch=[list(qsim.bloch_vector(self.network, j)) for j in range(self.n)],
            gates=gates,
        )
        self.records.append(record)
        return record

    def run(
        self,
        placements: Optional[Sequence[Mapping[int, Cell]]] = None,
    ) -> dict:
        """Play all remaining rounds; `placements[i]` feeds the humans of
        round i+1. Returns the history document."""
        while not self.finished:
            provided = None
            if placements is not None and self.rounds_played < len(placements):
                provided = placements[self.rounds_played]
            self.run_round(provided)
        return self.history()

    def history(self) -> dict:
        config = self.config.to_dict()
        config["capitals"] = [list(c) for c in self.capitals]
        config["opponents"] = sorted(self.opponents)
        return {
            "format_version": HISTORY_FORMAT_VERSION,
            "config": config,
            "rounds": [r.to_dict() for r in self.records],
        }


def serialize_history(history: Mapping) -> str:
    """Canonical byte-stable encoding of a history document."""
    return json.dumps(history, sort_keys=True, separators=(",", ":")) + "\n"


@dataclass
class ExperimentSummary:
    """Per-round area aggregates, split by nation group."""

    rows: list[tuple[int, str, float, float]]  # (round, group, mean, std)

    def final_mean(self, group: str) -> float:
        last_round = max(rnd for rnd, g, _, _ in self.rows if g == group)
        return next(
            m for rnd, g, m, _ in self.rows if g == group and rnd == last_round
        )

    def to_csv(self) -> str:
        lines = ["round,group,mean_area,std_area"]
        for rnd, group, mean, std in self.rows:
            lines.append(f"{rnd},{group},{mean!r},{std!r}")
        return "\n".join(lines) + "\n"


def _one_run(config: RunConfig) -> list[list[int]]:
    """Per-round, per-nation areas of a single game."""
    game = Game(config)
    areas = []
    while not game.finished:
        game.run_round()
        areas.append([game.world.area(j) for j in range(game.n)])
    return areas


def run_experiment(
    config: RunConfig,
    runs: int,
    opponents: bool = True,
    workers: int = 1,
) -> ExperimentSummary:
    """Replicated runs with the two opponent bicolorings alternating.

    Half the runs freeze one color class, half the other, each run on its own
    derived seed; aggregates are the mean and population deviation of nation
    area per round, grouped standard vs opponent.
    """
    if runs < 1:
        raise ValueError("need at least one run")
    if opponents:
        bicoloring(config.coupling)  # raises early on non-bipartite maps
    configs = []
    for i in range(runs):
        coloring = ("colorA" if i % 2 == 0 else "colorB") if opponents else "none"
        configs.append(
            replace(
                config,
                seed=derive_seed(config.seed, "run", i),
                opponent_coloring=coloring,
                human_nations=frozenset(),
            )
        )
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_run, configs))
    else:
        results = [_one_run(c) for c in configs]

    samples: dict[tuple[int, str], list[int]] = {}
    for cfg, areas in zip(configs, results):
        frozen = cfg.opponents()
        for round_index, row in enumerate(areas, start=1):
            for j, area in enumerate(row):
                group = "opponent" if j in frozen else "standard"
                samples.setdefault((round_index, group), []).append(area)
    rows = []
    for (round_index, group), values in sorted(samples.items()):
        arr = np.asarray(values, dtype=float)
        rows.append((round_index, group, float(arr.mean()), float(arr.std())))
    return ExperimentSummary(rows)
