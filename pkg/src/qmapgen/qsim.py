"""Exact pure-statevector emulator for a small qubit network.

Amplitude ordering: qubit 0 is the least significant bit of the state index,
so amplitude ``amps[s]`` belongs to the basis state whose bit ``j`` is
``(s >> j) & 1``. Measurement outcome bit 0 corresponds to the +1 eigenvalue
of the measured axis.

Single-qubit gates are given in axis-angle form and act on the Bloch sphere
as right-handed rotations. Two-qubit gates are restricted to cz along the
edges of a coupling map.
"""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "PauliAxis",
    "BlochVector",
    "AxisAngle",
    "CouplingMap",
    "NetworkState",
    "StatevectorCapError",
    "CouplingViolationError",
    "DEFAULT_QUBIT_CAP",
    "init_network",
    "apply_1q",
    "apply_cz",
    "expect",
    "sample",
    "bloch_vector",
]

logger = logging.getLogger(__name__)

DEFAULT_QUBIT_CAP = 20
NORM_TOL = 1e-9


class StatevectorCapError(ValueError):
    """Raised when a network would exceed the exact-emulation qubit cap."""


class CouplingViolationError(ValueError):
    """Raised when a two-qubit gate is requested on a non-edge pair."""


class PauliAxis(IntEnum):
    """Measurement axis. The order X < Y < Z is fixed and used for
    tie-breaking and serialization."""

    X = 0
    Y = 1
    Z = 2

    def __str__(self) -> str:
        return self.name

    @classmethod
    def from_name(cls, name: str) -> "PauliAxis":
        return cls[name.upper()]


class BlochVector(NamedTuple):
    """Per-qubit expectation triple (x, y, z); each component in [-1, 1]."""

    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def validate(self, tol: float = NORM_TOL) -> None:
        if self.x * self.x + self.y * self.y + self.z * self.z > 1.0 + tol:
            raise ValueError(f"Bloch vector {self} lies outside the unit sphere")

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


@dataclass(frozen=True)
class AxisAngle:
    """Rotation of the Bloch sphere: unit axis plus an angle in [0, 2*pi)."""

    axis: tuple[float, float, float]
    angle: float

    def __post_init__(self) -> None:
        ax = np.asarray(self.axis, dtype=float)
        if abs(float(np.linalg.norm(ax)) - 1.0) > NORM_TOL:
            raise ValueError(f"rotation axis {self.axis} is not unit length")
        object.__setattr__(self, "axis", (float(ax[0]), float(ax[1]), float(ax[2])))
        object.__setattr__(self, "angle", float(self.angle) % (2.0 * math.pi))

    @classmethod
    def identity(cls) -> "AxisAngle":
        return cls((0.0, 0.0, 1.0), 0.0)

    def matrix(self) -> np.ndarray:
        """SU(2) matrix exp(-i*angle/2 * axis.sigma)."""
        nx, ny, nz = self.axis
        half = 0.5 * self.angle
        c, s = math.cos(half), math.sin(half)
        return np.array(
            [
                [c - 1j * s * nz, -s * ny - 1j * s * nx],
                [s * ny - 1j * s * nx, c + 1j * s * nz],
            ],
            dtype=complex,
        )


@dataclass(frozen=True)
class CouplingMap:
    """Graph of qubit pairs on which two-qubit gates are permitted."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("coupling map needs at least one qubit")
        normalized = set()
        for j, k in self.edges:
            if j == k:
                raise ValueError(f"self-loop on qubit {j}")
            if not (0 <= j < self.n and 0 <= k < self.n):
                raise ValueError(f"edge ({j},{k}) out of range for n={self.n}")
            normalized.add((min(j, k), max(j, k)))
        object.__setattr__(self, "edges", frozenset(normalized))
        if self.n > 1 and not self._connected():
            warnings.warn(f"coupling map on {self.n} qubits is not connected", stacklevel=2)

    def _connected(self) -> bool:
        adj: dict[int, set[int]] = {q: set() for q in range(self.n)}
        for j, k in self.edges:
            adj[j].add(k)
            adj[k].add(j)
        seen = {0}
        stack = [0]
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return len(seen) == self.n

    def has_edge(self, j: int, k: int) -> bool:
        return (min(j, k), max(j, k)) in self.edges

    def neighbours(self, j: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == j:
                out.add(b)
            elif b == j:
                out.add(a)
        return out

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "CouplingMap":
        return cls(n, frozenset((int(j), int(k)) for j, k in edges))

    @classmethod
    def path(cls, n: int) -> "CouplingMap":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def ring(cls, n: int) -> "CouplingMap":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_dict(cls, data: dict) -> "CouplingMap":
        return cls.from_edges(int(data["n"]), data["edges"])

    @classmethod
    def from_file(cls, path) -> "CouplingMap":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_file(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")


@dataclass
class NetworkState:
    """Pure n-qubit state plus the coupling map its gates must respect.

    The amplitude array is owned by exactly one actor at a time; gate
    functions mutate it in place and return the same object.
    """

    n: int
    amplitudes: np.ndarray
    coupling: CouplingMap

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2**self.n,):
            raise ValueError("amplitude length does not match qubit count")
        if self.coupling.n != self.n:
            raise ValueError("coupling map size does not match qubit count")
        norm = float(np.sum(np.abs(self.amplitudes) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} is not 1")

    def copy(self) -> "NetworkState":
        return NetworkState(self.n, self.amplitudes.copy(), self.coupling)

    def _renormalize_if_drifting(self) -> None:
        norm = float(np.sum(np.abs(self.amplitudes) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            logger.warning("statevector norm drifted to %.3e; renormalizing", norm)
            self.amplitudes /= math.sqrt(norm)


def init_network(
    n: int,
    coupling: CouplingMap,
    target: BlochVector,
    cap: int = DEFAULT_QUBIT_CAP,
) -> NetworkState:
    """Prepare a product state with every qubit's Bloch vector at `target`.

    All qubits start at (0, 0, 1) and are rotated to the target direction.
    Unitary preparation lands on the unit sphere, so `target` must be a unit
    vector (within tolerance).
    """
    if n < 1:
        raise ValueError("need at least one qubit")
    if n > cap:
        raise StatevectorCapError(
            f"n={n} exceeds the statevector cap of {cap} qubits"
        )
    target = BlochVector(*target)
    target.validate()
    if abs(target.norm() - 1.0) > 1e-6:
        raise ValueError(
            f"cannot prepare |target|={target.norm():.6f}: unitary preparation "
            "of a product state reaches only unit Bloch vectors"
        )
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    state = NetworkState(n, amps, coupling)
    gate = _rotation_between((0.0, 0.0, 1.0), tuple(target))
    for q in range(n):
        apply_1q(state, q, gate)
    return state


def _rotation_between(src: tuple[float, float, float], dst: tuple[float, float, float]) -> AxisAngle:
    """Axis-angle rotation carrying unit vector src onto unit vector dst."""
    a = np.asarray(src, dtype=float)
    b = np.asarray(dst, dtype=float)
    cross = np.cross(a, b)
    dot = float(np.dot(a, b))
    sin_theta = float(np.linalg.norm(cross))
    if sin_theta < 1e-12:
        if dot > 0.0:
            return AxisAngle.identity()
        # antiparallel: any perpendicular axis works; pick deterministically
        perp = np.cross(a, [1.0, 0.0, 0.0])
        if np.linalg.norm(perp) < 1e-12:
            perp = np.cross(a, [0.0, 1.0, 0.0])
        perp /= np.linalg.norm(perp)
        return AxisAngle(tuple(perp), math.pi)
    axis = cross / sin_theta
    return AxisAngle(tuple(axis), math.atan2(sin_theta, dot))


def _apply_matrix(amps: np.ndarray, n: int, qubit: int, mat: np.ndarray) -> None:
    """Apply a 2x2 matrix to `qubit` in place (qubit 0 = LSB)."""
    view = amps.reshape(2 ** (n - 1 - qubit), 2, 2**qubit)
    low = view[:, 0, :].copy()
    high = view[:, 1, :]
    view[:, 0, :] = mat[0, 0] * low + mat[0, 1] * high
    view[:, 1, :] = mat[1, 0] * low + mat[1, 1] * high


def apply_1q(state: NetworkState, qubit: int, gate: AxisAngle) -> NetworkState:
    """Rotate one qubit; preserves state norm and the qubit's Bloch norm."""
    if not (0 <= qubit < state.n):
        raise IndexError(f"qubit {qubit} out of range for n={state.n}")
    _apply_matrix(state.amplitudes, state.n, qubit, gate.matrix())
    state._renormalize_if_drifting()
    return state


def apply_cz(state: NetworkState, j: int, k: int) -> NetworkState:
    """Apply cz to {j, k}; the pair must be a coupling-map edge."""
    if j == k:
        raise ValueError("cz needs two distinct qubits")
    if not (0 <= j < state.n and 0 <= k < state.n):
        raise IndexError(f"pair ({j},{k}) out of range for n={state.n}")
    if not state.coupling.has_edge(j, k):
        raise CouplingViolationError(
            f"coupling violation: ({j},{k}) is not an edge of the coupling map"
        )
    lo, hi = min(j, k), max(j, k)
    view = state.amplitudes.reshape(
        2 ** (state.n - 1 - hi), 2, 2 ** (hi - lo - 1), 2, 2**lo
    )
    view[:, 1, :, 1, :] *= -1.0
    return state


def _pauli_apply(amps: np.ndarray, n: int, axis: PauliAxis, qubit: int) -> np.ndarray:
    """Return P_qubit |psi> for a single Pauli factor."""
    out = amps.copy()
    view = out.reshape(2 ** (n - 1 - qubit), 2, 2**qubit)
    if axis == PauliAxis.X:
        view[:, [0, 1], :] = view[:, [1, 0], :]
    elif axis == PauliAxis.Y:
        low = view[:, 0, :].copy()
        view[:, 0, :] = -1j * view[:, 1, :]
        view[:, 1, :] = 1j * low
    else:
        view[:, 1, :] *= -1.0
    return out


def expect(state: NetworkState, terms: Sequence[tuple[PauliAxis, int]]) -> float:
    """Exact expectation of a product of one or two single-qubit Paulis.

    `terms` is a list of (axis, qubit) factors on distinct qubits.
    """
    if not 1 <= len(terms) <= 2:
        raise ValueError("expect() takes one or two Pauli factors")
    qubits = [q for _, q in terms]
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubit index in {terms}")
    for q in qubits:
        if not (0 <= q < state.n):
            raise IndexError(f"qubit {q} out of range for n={state.n}")
    phi = state.amplitudes
    for axis, q in terms:
        phi = _pauli_apply(phi, state.n, PauliAxis(axis), q)
    value = float(np.vdot(state.amplitudes, phi).real)
    return min(1.0, max(-1.0, value))


def bloch_vector(state: NetworkState, qubit: int) -> BlochVector:
    """Exact (x, y, z) expectation triple of one qubit."""
    return BlochVector(
        expect(state, [(PauliAxis.X, qubit)]),
        expect(state, [(PauliAxis.Y, qubit)]),
        expect(state, [(PauliAxis.Z, qubit)]),
    )


# Basis-change matrices mapping each axis' eigenbasis onto the computational
# basis: outcome bit 0 <-> +1 eigenvalue.
_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_H_SDG = _HADAMARD @ np.diag([1.0, -1j])

_BASIS_CHANGE = {
    PauliAxis.X: _HADAMARD,
    PauliAxis.Y: _H_SDG,
    PauliAxis.Z: None,
}


def sample(
    state: NetworkState,
    setting: Sequence[PauliAxis],
    shots: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw `shots` outcomes from the Born distribution of the basis-rotated
    state. Each outcome is an integer whose bit j is the result for qubit j.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if len(setting) != state.n:
        raise ValueError("setting must assign an axis to every qubit")
    rotated = state.amplitudes.copy()
    for q, axis in enumerate(setting):
        mat = _BASIS_CHANGE[PauliAxis(axis)]
        if mat is not None:
            _apply_matrix(rotated, state.n, q, mat)
    probs = np.abs(rotated) ** 2
    probs /= probs.sum()
    return rng.choice(2**state.n, size=shots, p=probs)
