"""Shared test utilities: dense-matrix oracles and random-state builders."""

import math
from functools import reduce

import numpy as np

from qmapgen.qsim import (
    AxisAngle,
    BlochVector,
    CouplingMap,
    NetworkState,
    PauliAxis,
    apply_1q,
    apply_cz,
    init_network,
)

I2 = np.eye(2, dtype=complex)
PAULI = {
    PauliAxis.X: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliAxis.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    PauliAxis.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_expect(state: NetworkState, terms) -> float:
    """Independent oracle: build the full 2^n x 2^n operator and contract.

    Qubit 0 is the least significant bit, so it is the last kron factor.
    """
    mats = [I2] * state.n
    for axis, q in terms:
        mats[q] = PAULI[axis]
    full = reduce(np.kron, reversed(mats))
    return float((state.amplitudes.conj() @ full @ state.amplitudes).real)


def random_axis_angle(rng: np.random.Generator) -> AxisAngle:
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return AxisAngle(tuple(axis), rng.uniform(0.0, 2.0 * math.pi))


def random_unit_bloch(rng: np.random.Generator) -> BlochVector:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return BlochVector(*v)


def oracle_select_action(j, table, feasible):
    """Independent re-derivation of action choice: repeated linear max scans
    with explicit tie comparisons, no sorting, no shared code path."""
    from qmapgen.policy import Tactic

    remaining = [
        (value, p, k) for (jj, k, p), value in table.entries.items() if jj == j
    ]
    while remaining:
        best = None
        for entry in remaining:
            if best is None:
                best = entry
                continue
            value, p, k = entry
            bv, bp, bk = best
            kk = -1 if k is None else k
            bkk = -1 if bk is None else bk
            if value > bv or (value == bv and (int(p), kk) < (int(bp), bkk)):
                best = entry
        remaining.remove(best)
        value, p, k = best
        if p == PauliAxis.Y:
            tactic = Tactic.explore()
        elif k is None:
            continue
        elif p == PauliAxis.X:
            tactic = Tactic.defend(k)
        else:
            tactic = Tactic.attack(k)
        if tactic in feasible:
            return tactic
    return None


def random_network(
    rng: np.random.Generator,
    n: int,
    gates: int = 12,
    coupling: CouplingMap | None = None,
) -> NetworkState:
    """Product start plus a random mix of rotations and edge cz gates."""
    if coupling is None:
        coupling = CouplingMap.ring(n) if n >= 3 else CouplingMap.path(n)
    state = init_network(n, coupling, BlochVector(0.0, 0.0, 1.0))
    edges = coupling.sorted_edges()
    for _ in range(gates):
        if edges and rng.random() < 0.35:
            j, k = edges[rng.integers(len(edges))]
            apply_cz(state, j, k)
        else:
            apply_1q(state, int(rng.integers(n)), random_axis_angle(rng))
    return state
