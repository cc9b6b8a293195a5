"""Bloch-vector snapshots of the network: exact or sample-based.

A snapshot holds every qubit's (x, y, z) triple plus the nine pairwise
correlation values for each required pair. Exact mode reads the statevector;
sampled mode schedules measurement settings via greedy graph coloring and
estimates the same quantities from shot counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

import numpy as np

from . import qsim
from .qsim import BlochVector, NetworkState, PauliAxis
from .seeds import derive_seed

__all__ = [
    "MeasurementPlan",
    "TomographySnapshot",
    "normalize_pairs",
    "exact_snapshot",
    "plan_settings",
    "sampled_snapshot",
    "DEFAULT_SHOTS",
]

DEFAULT_SHOTS = 8192

Pair = tuple[int, int]


def normalize_pairs(pairs: Iterable[Iterable[int]], n: int) -> frozenset[Pair]:
    """Canonicalize to j < k tuples and range-check against the network."""
    out = set()
    for raw in pairs:
        j, k = raw
        if j == k:
            raise ValueError(f"pair ({j},{k}) is a self-loop")
        if not (0 <= j < n and 0 <= k < n):
            raise ValueError(f"pair ({j},{k}) out of range for n={n}")
        out.add((min(j, k), max(j, k)))
    return frozenset(out)


@dataclass(frozen=True)
class MeasurementPlan:
    """Per-qubit axis assignments covering every (P, Q) combo of every pair."""

    n: int
    pairs: frozenset[Pair]
    settings: tuple[tuple[PauliAxis, ...], ...]
    shots_per_setting: int = DEFAULT_SHOTS

    def covers(self, pairs: Iterable[Pair] | None = None) -> bool:
        """True when every ordered axis combo of every pair has a setting."""
        wanted = self.pairs if pairs is None else normalize_pairs(pairs, self.n)
        for j, k in wanted:
            seen = {(s[j], s[k]) for s in self.settings}
            if len(seen) < 9:
                return False
        return True


@dataclass
class TomographySnapshot:
    """All single-qubit Bloch vectors plus pairwise correlation entries."""

    singles: list[BlochVector]
    correlations: dict[tuple[Pair, PauliAxis, PauliAxis], float]
    mode: str  # "exact" or "sampled"
    tolerance: float = 1e-9

    def pairs(self) -> frozenset[Pair]:
        return frozenset(pair for pair, _, _ in self.correlations)

    def correlation(self, j: int, p: PauliAxis, k: int, q: PauliAxis) -> float:
        """<P_j Q_k>, accepting either argument order of the stored pair."""
        if j < k:
            return self.correlations[((j, k), p, q)]
        return self.correlations[((k, j), q, p)]

    def validate(self) -> None:
        """Uncertainty constraints, at the mode's statistical tolerance."""
        tol = self.tolerance
        for j, vec in enumerate(self.singles):
            if vec.norm() ** 2 > 1.0 + tol:
                raise ValueError(f"qubit {j} Bloch norm exceeds 1: {vec}")
        for pair in self.pairs():
            for fixed in PauliAxis:
                row = sum(self.correlations[(pair, p, fixed)] ** 2 for p in PauliAxis)
                col = sum(self.correlations[(pair, fixed, q)] ** 2 for q in PauliAxis)
                if row > 1.0 + tol or col > 1.0 + tol:
                    raise ValueError(
                        f"pair {pair} correlation constraint violated "
                        f"(axis {fixed.name}: row {row:.6f}, col {col:.6f})"
                    )

    def to_dict(self) -> dict:
        values: dict[str, float] = {}
        for j, vec in enumerate(self.singles):
            for axis in PauliAxis:
                values[f"q{j}:{axis.name}"] = vec[axis]
        for (j, k), p, q in sorted(self.correlations):
            values[f"q{j}q{k}:{p.name}{q.name}"] = self.correlations[((j, k), p, q)]
        return {"mode": self.mode, "tolerance": self.tolerance, "values": values}

    @classmethod
    def from_dict(cls, data: Mapping) -> "TomographySnapshot":
        values = data["values"]
        singles_raw: dict[int, dict[PauliAxis, float]] = {}
        correlations: dict[tuple[Pair, PauliAxis, PauliAxis], float] = {}
        for key, val in values.items():
            qubits_part, axes_part = key.split(":")
            indices = [int(tok) for tok in qubits_part.replace("q", " ").split()]
            if len(indices) == 1:
                singles_raw.setdefault(indices[0], {})[PauliAxis[axes_part]] = val
            else:
                j, k = indices
                p, q = PauliAxis[axes_part[0]], PauliAxis[axes_part[1]]
                correlations[((j, k), p, q)] = val
        n = max(singles_raw) + 1 if singles_raw else 0
        singles = [
            BlochVector(
                singles_raw[j][PauliAxis.X],
                singles_raw[j][PauliAxis.Y],
                singles_raw[j][PauliAxis.Z],
            )
            for j in range(n)
        ]
        return cls(
            singles, correlations, data["mode"], float(data.get("tolerance", 1e-9))
        )


def exact_snapshot(state: NetworkState, pairs: Iterable[Pair]) -> TomographySnapshot:
    """Snapshot read directly off the statevector; entries equal
    qsim.expect bit for bit."""
    wanted = normalize_pairs(pairs, state.n)
    singles = [qsim.bloch_vector(state, q) for q in range(state.n)]
    correlations = {
        ((j, k), p, q): qsim.expect(state, [(p, j), (q, k)])
        for j, k in sorted(wanted)
        for p in PauliAxis
        for q in PauliAxis
    }
    snap = TomographySnapshot(singles, correlations, "exact")
    snap.validate()
    return snap


def _greedy_coloring(pairs: frozenset[Pair]) -> dict[int, int]:
    """Proper coloring of the pair graph, vertices taken in index order."""
    adj: dict[int, set[int]] = {}
    for j, k in pairs:
        adj.setdefault(j, set()).add(k)
        adj.setdefault(k, set()).add(j)
    colors: dict[int, int] = {}
    for v in sorted(adj):
        taken = {colors[u] for u in adj[v] if u in colors}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return colors


def plan_settings(
    pairs: Iterable[Pair],
    n: int,
    shots_per_setting: int = DEFAULT_SHOTS,
) -> MeasurementPlan:
    """Schedule settings so every pair sees all nine axis combos.

    The pair graph is greedily colored; each unordered color pair emits nine
    settings (one per ordered axis combo, the lower color class measuring the
    first axis). Qubits outside both classes measure Z, so axes a qubit is
    never assigned cannot be estimated and default to zero downstream.
    """
    wanted = normalize_pairs(pairs, n)
    colors = _greedy_coloring(wanted)
    classes: dict[int, list[int]] = {}
    for v, c in colors.items():
        classes.setdefault(c, []).append(v)

    settings: list[tuple[PauliAxis, ...]] = []
    for a, b in sorted(
        (a, b) for a in classes for b in classes if a < b
    ):
        for p, q in product(PauliAxis, repeat=2):
            setting = [PauliAxis.Z] * n
            for v in classes[a]:
                setting[v] = p
            for v in classes[b]:
                setting[v] = q
            settings.append(tuple(setting))
    if not settings:
        settings.append(tuple([PauliAxis.Z] * n))
    plan = MeasurementPlan(n, wanted, tuple(settings), shots_per_setting)
    assert plan.covers()
    return plan


def sampled_snapshot(
    state: NetworkState,
    plan: MeasurementPlan,
    seed: int,
) -> TomographySnapshot:
    """Estimate the snapshot from shot counts under `plan`.

    Each setting samples on its own stream derived from `seed`, so the result
    is reproducible and independent of any evaluation order. Estimates are
    clamped to [-1, 1].
    """
    if not plan.covers():
        raise ValueError("measurement plan does not cover its pairs")
    n = state.n
    single_sum = np.zeros((n, 3), dtype=np.int64)
    single_cnt = np.zeros((n, 3), dtype=np.int64)
    pair_sum: dict[tuple[Pair, PauliAxis, PauliAxis], int] = {}
    pair_cnt: dict[tuple[Pair, PauliAxis, PauliAxis], int] = {}

    for idx, setting in enumerate(plan.settings):
        rng = np.random.default_rng(derive_seed(seed, "setting", idx))
        out = qsim.sample(state, setting, plan.shots_per_setting, rng)
        bits = (out[:, None] >> np.arange(n)) & 1
        signs = (1 - 2 * bits).astype(np.int64)
        for q in range(n):
            single_sum[q, setting[q]] += int(signs[:, q].sum())
            single_cnt[q, setting[q]] += plan.shots_per_setting
        for j, k in plan.pairs:
            key = ((j, k), setting[j], setting[k])
            pair_sum[key] = pair_sum.get(key, 0) + int((signs[:, j] * signs[:, k]).sum())
            pair_cnt[key] = pair_cnt.get(key, 0) + plan.shots_per_setting

    def clamp(v: float) -> float:
        return min(1.0, max(-1.0, v))

    singles = []
    for q in range(n):
        comps = []
        for axis in PauliAxis:
            cnt = int(single_cnt[q, axis])
            comps.append(clamp(single_sum[q, axis] / cnt) if cnt else 0.0)
        singles.append(BlochVector(*comps))

    correlations = {
        ((j, k), p, q): clamp(pair_sum[((j, k), p, q)] / pair_cnt[((j, k), p, q)])
        for j, k in plan.pairs
        for p in PauliAxis
        for q in PauliAxis
    }
    snap = TomographySnapshot(
        singles,
        correlations,
        "sampled",
        tolerance=6.0 / math.sqrt(plan.shots_per_setting),
    )
    snap.validate()
    return snap
