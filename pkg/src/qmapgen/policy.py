"""The quantum government: payoffs, action choice, and feedback gates.

Axis-to-tendency assignment: x encodes defence, z aggression, y exploration.
A nation's payoff toward neighbour k under axis P is its own single P value
plus the sum of its three P-row correlations with k. The feasible tactic with
the highest payoff wins; ties fall to axis order X < Y < Z, then the lowest
neighbour index.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Mapping, Optional

import numpy as np

from .qsim import AxisAngle, BlochVector, NetworkState, PauliAxis, apply_1q, apply_cz
from . import qsim

if TYPE_CHECKING:
    from .tomography import TomographySnapshot
    from .worldmap import NationStats

__all__ = [
    "TacticKind",
    "Tactic",
    "PayoffTable",
    "FeedbackDirective",
    "DEFEND_POLE",
    "EXPLORE_POLE",
    "ATTACK_POLE",
    "payoffs",
    "ranked_actions",
    "select_action",
    "synthesize_rotation",
    "rotate_vector",
    "feedback_directive",
    "war_gate",
    "defeat_rotation",
]

logger = logging.getLogger(__name__)

DEFEND_POLE = BlochVector(1.0, 0.0, 0.0)
EXPLORE_POLE = BlochVector(0.0, 1.0, 0.0)
ATTACK_POLE = BlochVector(0.0, 0.0, 1.0)

EXPLORE_FRACTION = 0.25


class TacticKind(str, Enum):
    DEFEND = "defend"
    ATTACK = "attack"
    EXPLORE = "explore"


@dataclass(frozen=True)
class Tactic:
    kind: TacticKind
    target: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind is TacticKind.EXPLORE:
            if self.target is not None:
                raise ValueError("explore takes no target")
        elif self.target is None:
            raise ValueError(f"{self.kind.value} needs a target nation")

    @classmethod
    def defend(cls, k: int) -> "Tactic":
        return cls(TacticKind.DEFEND, k)

    @classmethod
    def attack(cls, k: int) -> "Tactic":
        return cls(TacticKind.ATTACK, k)

    @classmethod
    def explore(cls) -> "Tactic":
        return cls(TacticKind.EXPLORE)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "target": self.target}


# axis -> (tactic kind, pole state the feedback rotation moves toward)
AXIS_TACTIC = {
    PauliAxis.X: TacticKind.DEFEND,
    PauliAxis.Y: TacticKind.EXPLORE,
    PauliAxis.Z: TacticKind.ATTACK,
}


@dataclass
class PayoffTable:
    """Payoff entries keyed (nation, neighbour-or-None, axis).

    Nations without geopolitical neighbours carry singles-only rows keyed
    with neighbour None.
    """

    entries: dict[tuple[int, Optional[int], PauliAxis], float]

    def rows(self) -> list[tuple[int, Optional[int], str, float]]:
        """Stable serialization order: by (nation, neighbour, axis)."""
        keys = sorted(
            self.entries,
            key=lambda t: (t[0], -1 if t[1] is None else t[1], int(t[2])),
        )
        return [(j, k, p.name, self.entries[(j, k, p)]) for j, k, p in keys]


@dataclass(frozen=True)
class FeedbackDirective:
    nation: int
    target: BlochVector
    fraction: float


def payoffs(
    snapshot: "TomographySnapshot",
    neighbours: Mapping[int, Iterable[int]],
) -> PayoffTable:
    """Payoff of each axis for each nation against each of its neighbours."""
    entries: dict[tuple[int, Optional[int], PauliAxis], float] = {}
    for j in sorted(neighbours):
        ks = sorted(neighbours[j])
        if not ks:
            for p in PauliAxis:
                entries[(j, None, p)] = snapshot.singles[j][p]
            continue
        for k in ks:
            for p in PauliAxis:
                try:
                    corr = sum(
                        snapshot.correlation(j, p, k, q) for q in PauliAxis
                    )
                except KeyError as exc:
                    raise LookupError(
                        f"snapshot is missing pair ({j},{k}); tomography must "
                        "cover every neighbour pair"
                    ) from exc
                entries[(j, k, p)] = snapshot.singles[j][p] + corr
    return PayoffTable(entries)


def ranked_actions(j: int, table: PayoffTable) -> list[tuple[float, Tactic]]:
    """Nation j's candidate tactics, best first, with the pinned tie-break.

    Explore appears once per neighbour row; scanning for the first feasible
    entry therefore realizes the max-over-neighbours explore payoff.
    """
    raw = [
        (value, p, k)
        for (jj, k, p), value in table.entries.items()
        if jj == j
    ]
    raw.sort(key=lambda t: (-t[0], int(t[1]), -1 if t[2] is None else t[2]))
    ranked: list[tuple[float, Tactic]] = []
    for value, p, k in raw:
        kind = AXIS_TACTIC[p]
        if kind is TacticKind.EXPLORE:
            ranked.append((value, Tactic.explore()))
        elif k is not None:
            ranked.append((value, Tactic(kind, k)))
        # defend/attack rows without a target can never be acted on
    return ranked


def select_action(j: int, table: PayoffTable, feasible: set[Tactic]) -> Tactic:
    """Highest-payoff feasible tactic for nation j."""
    if not feasible:
        raise ValueError(f"nation {j} has an empty feasible set")
    for _, tactic in ranked_actions(j, table):
        if tactic in feasible:
            return tactic
    raise LookupError(f"no feasible tactic for nation {j} appears in the table")


def rotate_vector(vec, gate: AxisAngle) -> np.ndarray:
    """Rodrigues rotation of a 3-vector (right-handed, same convention as
    the statevector gates)."""
    v = np.asarray(vec, dtype=float)
    k = np.asarray(gate.axis, dtype=float)
    c, s = math.cos(gate.angle), math.sin(gate.angle)
    return v * c + np.cross(k, v) * s + k * float(np.dot(k, v)) * (1.0 - c)


def synthesize_rotation(current, target, fraction: float) -> AxisAngle:
    """Rotation taking `current` a fraction of the way toward `target`.

    Rotations preserve the Bloch norm, so the reachable endpoint is the
    target direction rescaled to |current|. A near-zero current gives the
    identity (there is no meaningful direction to rotate).
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    cur = np.asarray(current, dtype=float)
    tgt = np.asarray(target, dtype=float)
    cur_norm = float(np.linalg.norm(cur))
    if cur_norm < 1e-6:
        logger.info("degenerate Bloch vector %s: feedback rotation skipped", current)
        return AxisAngle.identity()
    tgt_norm = float(np.linalg.norm(tgt))
    if tgt_norm < 1e-12:
        raise ValueError("target direction is undefined")
    a = cur / cur_norm
    b = tgt / tgt_norm
    cross = np.cross(a, b)
    sin_theta = float(np.linalg.norm(cross))
    cos_theta = float(np.dot(a, b))
    if sin_theta < 1e-12:
        if cos_theta > 0.0:
            return AxisAngle.identity()
        # antiparallel: fixed deterministic perpendicular
        axis = np.cross(a, [1.0, 0.0, 0.0])
        if np.linalg.norm(axis) < 1e-12:
            axis = np.cross(a, [0.0, 1.0, 0.0])
        axis /= np.linalg.norm(axis)
        return AxisAngle(tuple(axis), fraction * math.pi)
    theta = math.atan2(sin_theta, cos_theta)
    return AxisAngle(tuple(cross / sin_theta), fraction * theta)


def feedback_directive(
    nation: int, stats: "NationStats", r: float
) -> Optional[FeedbackDirective]:
    """Pick the pole a nation drifts toward from its round statistics.

    The largest of (frontier length, area lost, area gained) wins, ties
    resolved in that listing order. Frontier moves a fixed quarter of the
    way to the explore pole; losses and gains move by area / (pi r^2),
    clamped at a full rotation.
    """
    f, lost, gained = stats.frontier, stats.lost, stats.gained
    if min(f, lost, gained) < 0:
        raise ValueError("nation statistics cannot be negative")
    if f == 0 and lost == 0 and gained == 0:
        return None
    disc = math.pi * r * r
    best = max(f, lost, gained)
    if f == best:
        return FeedbackDirective(nation, EXPLORE_POLE, EXPLORE_FRACTION)
    if lost == best:
        return FeedbackDirective(nation, DEFEND_POLE, min(1.0, lost / disc))
    return FeedbackDirective(nation, ATTACK_POLE, min(1.0, gained / disc))


def war_gate(
    state: NetworkState,
    snapshot: "TomographySnapshot",
    j: int,
    k: int,
    rotate_j: bool = True,
    rotate_k: bool = True,
) -> NetworkState:
    """Drive the pair toward the mutual attack/defence correlation.

    Each qubit is rotated as close as possible to its x-pole state (using the
    snapshot's view of it), then cz entangles them. The rotate flags let the
    orchestrator exempt frozen-policy nations from the single-qubit part.
    """
    if not state.coupling.has_edge(j, k):
        raise qsim.CouplingViolationError(
            f"coupling violation: war gate needs edge ({j},{k})"
        )
    if rotate_j:
        apply_1q(state, j, synthesize_rotation(snapshot.singles[j], DEFEND_POLE, 1.0))
    if rotate_k:
        apply_1q(state, k, synthesize_rotation(snapshot.singles[k], DEFEND_POLE, 1.0))
    return apply_cz(state, j, k)


def defeat_rotation(state: NetworkState, j: int) -> NetworkState:
    """Send a defeated nation fully toward its x-pole (defensive) state."""
    current = qsim.bloch_vector(state, j)
    return apply_1q(state, j, synthesize_rotation(current, DEFEND_POLE, 1.0))
