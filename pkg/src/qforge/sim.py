"""
Dense statevector simulation.

States are numpy complex128 arrays of length 2**n, little-endian: bit q of
a basis index is the value of qubit q. The same kernels act on arrays of
shape (2**n, k), which is how unitaries are extracted column-wise.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from math import comb
from typing import Sequence

import numpy as np

from .ir import Circuit, CircuitError, GateKind, GateOp

_SQ2 = 1 / np.sqrt(2)

_FIXED_1Q = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.Sdg: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    GateKind.Tdg: np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=complex),
}


def gate_matrix(kind: GateKind, angles: Sequence[float] = ()) -> np.ndarray:
    """2x2 matrix of a single-qubit kind (the target action for CX/CZ/CP)."""
    if kind in _FIXED_1Q:
        return _FIXED_1Q[kind]
    if kind is GateKind.CX or kind is GateKind.CCX:
        return _FIXED_1Q[GateKind.X]
    if kind is GateKind.CZ:
        return _FIXED_1Q[GateKind.Z]
    (t,) = angles
    c, s = np.cos(t / 2), np.sin(t / 2)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.RZ:
        return np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]], dtype=complex)
    if kind in (GateKind.P, GateKind.CP):
        return np.array([[1, 0], [0, np.exp(1j * t)]], dtype=complex)
    raise CircuitError(f"no matrix for {kind.name}")


class SimulationError(ValueError):
    pass


# -- kernels ----------------------------------------------------------------


def _idx(n: int, fixed: dict[int, int]) -> tuple:
    idx = [slice(None)] * n
    for q, bit in fixed.items():
        # length-1 slices keep the result a view even when every axis is fixed
        idx[n - 1 - q] = slice(bit, bit + 1)
    return tuple(idx)


def _apply_1q(v: np.ndarray, n: int, m: np.ndarray, target: int, controls: Sequence[int]) -> None:
    base = {c: 1 for c in controls}
    lo = v[_idx(n, {**base, target: 0})]
    hi = v[_idx(n, {**base, target: 1})]
    m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    if m01 == 0 and m10 == 0:
        if m00 != 1:
            lo *= m00
        if m11 != 1:
            hi *= m11
        return
    if m00 == 0 and m11 == 0 and m01 == 1 and m10 == 1:
        tmp = lo.copy()
        lo[...] = hi
        hi[...] = tmp
        return
    tmp = lo.copy()
    lo *= m00
    lo += m01 * hi
    hi *= m11
    hi += m10 * tmp


def _apply_swap(v: np.ndarray, n: int, a: int, b: int, controls: Sequence[int]) -> None:
    base = {c: 1 for c in controls}
    x = v[_idx(n, {**base, a: 0, b: 1})]
    y = v[_idx(n, {**base, a: 1, b: 0})]
    tmp = x.copy()
    x[...] = y
    y[...] = tmp


def apply_op(v: np.ndarray, n: int, op: GateOp) -> None:
    """Apply one gate in place to ``v`` viewed with shape (2,)*n + batch."""
    kind = op.kind
    qs = op.flat_qubits
    if kind.is_directive:
        return
    if kind is GateKind.Measure:
        raise SimulationError("measurement encountered; use sample() for measured circuits")
    if kind is GateKind.SWAP:
        _apply_swap(v, n, qs[0], qs[1], ())
    elif kind is GateKind.CSWAP:
        _apply_swap(v, n, qs[1], qs[2], (qs[0],))
    else:
        m = gate_matrix(kind, op.angles)
        _apply_1q(v, n, m, qs[-1], qs[:-1])


def _as_state(n: int, initial) -> np.ndarray:
    dim = 1 << n
    if initial is None:
        psi = np.zeros(dim, dtype=complex)
        psi[0] = 1
        return psi
    arr = np.asarray(initial)
    # a length-n input is a classical bit list (2**n != n for n >= 1)
    if arr.ndim == 1 and len(arr) == n:
        if np.iscomplexobj(arr) or not np.isin(arr, (0, 1)).all():
            raise SimulationError(f"bit list must contain only 0/1, got {arr.tolist()}")
        return basis_state(n, arr.astype(int).tolist())
    if arr.ndim == 0 or arr.shape[0] != dim:
        raise SimulationError(f"input of length {arr.shape[0]} does not match {n} qubits (dimension {dim})")
    return np.array(arr, dtype=complex)


def basis_index(bits: Sequence[int]) -> int:
    """Index of the basis state where qubit i holds ``bits[i]``."""
    return sum(int(b) << i for i, b in enumerate(bits))


def index_bits(index: int, n: int) -> list[int]:
    return [(index >> i) & 1 for i in range(n)]


def basis_state(n: int, bits: Sequence[int] | int) -> np.ndarray:
    idx = bits if isinstance(bits, (int, np.integer)) else basis_index(bits)
    if isinstance(bits, (list, tuple)) and len(bits) != n:
        raise SimulationError(f"expected {n} bits, got {len(bits)}")
    psi = np.zeros(1 << n, dtype=complex)
    psi[idx] = 1
    return psi


def zero_state(n: int) -> np.ndarray:
    return basis_state(n, 0)


def bitstring(index: int, n: int) -> str:
    """Render a basis index with qubit 0 as the rightmost character."""
    return format(index, f"0{n}b") if n else ""


# -- public operations ------------------------------------------------------


def run(circuit: Circuit, initial=None) -> np.ndarray:
    """Apply the circuit to ``initial`` (state vector, bit list, or |0...0> when None)."""
    n = circuit.num_qubits
    psi = _as_state(n, initial)
    for op in circuit:
        if op.kind is GateKind.Measure:
            raise SimulationError("measurement encountered; use sample() for measured circuits")
    v = psi.reshape((2,) * n + psi.shape[1:])
    for op in circuit:
        apply_op(v, n, op)
    return psi


def unitary_of(circuit: Circuit, max_qubits: int = 12) -> np.ndarray:
    n = circuit.num_qubits
    if n > max_qubits:
        raise SimulationError(f"{n} qubits exceeds the dense-unitary cap of {max_qubits}")
    u = np.eye(1 << n, dtype=complex)
    return run(circuit, u)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|^2, clipped to [0, 1]."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise SimulationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(min(1.0, max(0.0, abs(np.vdot(a, b)) ** 2)))


@dataclass(frozen=True)
class ShotCounts:
    counts: dict[str, int]
    shots: int
    seed: int

    def __getitem__(self, key: str) -> int:
        return self.counts.get(key, 0)

    def frequency(self, key: str) -> float:
        return self.counts.get(key, 0) / self.shots


def _split_measurements(circuit: Circuit) -> tuple[Circuit, list[tuple[int, int]]]:
    body = circuit.empty_like()
    measured: list[tuple[int, int]] = []
    done: set[int] = set()
    for op in circuit:
        if op.kind is GateKind.Measure:
            measured.append((op.qubits[0].flat, op.clbits[0].flat))
            done.add(op.qubits[0].flat)
        elif not op.kind.is_directive and done & set(op.flat_qubits):
            raise SimulationError("gates after measurement on the same qubit are not supported")
        else:
            body._ops.append(op)
    return body, measured


def probabilities(psi: np.ndarray) -> np.ndarray:
    p = np.abs(psi) ** 2
    return p / p.sum()


def sample(circuit: Circuit, shots: int, seed: int = 0, initial=None) -> ShotCounts:
    """Sample measurement outcomes.

    Measure ops select which qubits are read and into which clbits; keys are
    clbit strings with clbit 0 rightmost. Without Measure ops every qubit is
    read and keys have qubit 0 rightmost.
    """
    if shots < 1:
        raise SimulationError("shots must be >= 1")
    body, measured = _split_measurements(circuit)
    psi = run(body, initial)
    rng = np.random.default_rng(seed)
    hits = rng.multinomial(shots, probabilities(psi))
    n = circuit.num_qubits
    counts: dict[str, int] = {}
    for index in np.flatnonzero(hits):
        if measured:
            bits = ["0"] * circuit.num_clbits
            for q, c in measured:
                bits[c] = "1" if (index >> q) & 1 else "0"
            key = "".join(reversed(bits))
        else:
            key = bitstring(int(index), n)
        counts[key] = counts.get(key, 0) + int(hits[index])
    return ShotCounts(dict(sorted(counts.items())), shots, seed)


# -- Q-sphere ---------------------------------------------------------------


@dataclass(frozen=True)
class QSphereNode:
    index: int
    probability: float
    phase: float
    weight: int
    z: float
    longitude: float


def qsphere(state: np.ndarray, cutoff: float = 1e-12) -> list[QSphereNode]:
    """Place each basis state on a sphere.

    Latitude comes from the Hamming weight (all zeros at the north pole);
    states of equal weight are spread evenly in longitude in ascending index
    order over all C(n, w) slots of that ring.
    """
    psi = np.asarray(state)
    n = int(psi.size).bit_length() - 1
    if 1 << n != psi.size:
        raise SimulationError("state length is not a power of two")
    probs = np.abs(psi) ** 2
    weights = np.array([bin(i).count("1") for i in range(psi.size)])
    rank = np.zeros(psi.size, dtype=int)
    seen = [0] * (n + 1)
    for i, w in enumerate(weights):
        rank[i] = seen[w]
        seen[w] += 1
    nodes = []
    for i in range(psi.size):
        if probs[i] < cutoff:
            continue
        w = int(weights[i])
        phase = float(np.angle(psi[i]))
        if phase <= -np.pi + 1e-12:
            phase = float(np.pi)
        nodes.append(QSphereNode(
            index=i,
            probability=float(probs[i]),
            phase=phase,
            weight=w,
            z=1 - 2 * w / n if n else 1.0,
            longitude=float(2 * np.pi * rank[i] / comb(n, w)),
        ))
    return nodes


def qsphere_json(state: np.ndarray, indent: int | None = 2) -> str:
    return json.dumps([asdict(node) for node in qsphere(state)], indent=indent)


def derive_seed(seed: int, index: int) -> int:
    """Independent, reproducible child seed for case/probe ``index``."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])
