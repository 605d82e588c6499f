"""
Vertical/horizontal slicing and AP/PM/AR block categorization.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Literal

import numpy as np

from .ir import Circuit, CircuitError, GateKind, GateOp, compose, strip_breakbarriers
from .sim import fidelity, run, unitary_of

SliceMode = Literal["standalone", "accumulated"]


@dataclass(frozen=True)
class SliceSet:
    mode: SliceMode
    slices: list[Circuit]
    cut_positions: list[int]

    def __len__(self) -> int:
        return len(self.slices)

    def __iter__(self):
        return iter(self.slices)

    def __getitem__(self, i: int) -> Circuit:
        return self.slices[i]


def vslice(circuit: Circuit, mode: SliceMode = "standalone") -> SliceSet:
    """Cut the circuit at its break-barriers.

    Standalone mode returns the segments between cuts; accumulated mode
    returns the prefixes, so the last slice is the whole circuit without
    break-barriers. Ordinary barriers never cut.
    """
    if mode not in ("standalone", "accumulated"):
        raise ValueError(f"unknown slicing mode {mode!r}")
    cuts = [i for i, op in enumerate(circuit) if op.kind is GateKind.BreakBarrier]
    segments: list[list[GateOp]] = [[]]
    for op in circuit:
        if op.kind is GateKind.BreakBarrier:
            segments.append([])
        else:
            segments[-1].append(op)
    slices = []
    acc: list[GateOp] = []
    for k, seg in enumerate(segments, start=1):
        acc = acc + seg if mode == "accumulated" else seg
        piece = circuit.empty_like(f"{circuit.name}.slice{k}")
        piece._ops = list(acc)
        slices.append(piece)
    return SliceSet(mode, slices, cuts)


@dataclass(frozen=True)
class WireReduction:
    kept_qubits: list[int]
    removed_qubits: list[int]
    reduced: Circuit
    original_qubits: int

    def embed(self, reduced_state: np.ndarray) -> np.ndarray:
        """Lift a reduced-width state to full width with |0> on removed wires."""
        full = np.zeros(1 << self.original_qubits, dtype=complex)
        full[self._index_map()] = reduced_state
        return full

    def restrict(self, full_state: np.ndarray) -> np.ndarray:
        """Inverse of embed; assumes the removed wires carry |0>."""
        return np.asarray(full_state)[self._index_map()].copy()

    def _index_map(self) -> np.ndarray:
        r = np.arange(1 << len(self.kept_qubits))
        out = np.zeros_like(r)
        for i, q in enumerate(self.kept_qubits):
            out |= ((r >> i) & 1) << q
        return out


def hslice(circuit: Circuit) -> WireReduction:
    """Remove idle wires.

    A wire is idle when no gate or measurement touches it; barriers do not
    count as use. Kept qubits are renumbered in their original order and
    registers that lose every qubit are dropped.
    """
    used = set()
    for op in circuit:
        if not op.kind.is_directive:
            used.update(op.flat_qubits)
    kept = [q for q in range(circuit.num_qubits) if q in used]
    removed = [q for q in range(circuit.num_qubits) if q not in used]
    if not removed:
        return WireReduction(kept, removed, circuit.copy(), circuit.num_qubits)
    if not kept:
        # keep one wire so the reduced circuit is still a valid circuit
        kept, removed = [0], removed[1:]
    new_index = {q: i for i, q in enumerate(kept)}
    qregs = []
    for name, size in circuit.qregs:
        left = sum(1 for q in circuit.qubits if q.register == name and q.flat in new_index)
        if left:
            qregs.append((name, left))
    reduced = Circuit(qregs=qregs, cregs=circuit.cregs, name=circuit.name)
    for op in circuit:
        qs = [new_index[q] for q in op.flat_qubits if q in new_index]
        if op.kind is GateKind.BreakBarrier:
            reduced.apply(op.kind, range(reduced.num_qubits), span=op.span)
        elif op.kind is GateKind.Barrier:
            if qs:
                reduced.apply(op.kind, qs, span=op.span)
        else:
            reduced.apply(op.kind, qs, op.angles, [c.flat for c in op.clbits], span=op.span)
    return WireReduction(kept, removed, reduced, circuit.num_qubits)


def verify_recomposition(slice_set: SliceSet, original: Circuit, tolerance: float = 1e-9) -> bool:
    """Check that the standalone slices compose back to the original circuit's action on |0...0>."""
    if slice_set.mode != "standalone":
        raise ValueError("recomposition is defined for standalone slices only")
    whole = slice_set.slices[0]
    for piece in slice_set.slices[1:]:
        whole = compose(whole, piece)
    got = run(strip_breakbarriers(whole))
    want = run(strip_breakbarriers(original))
    return fidelity(got, want) >= 1 - tolerance


# -- categorization ---------------------------------------------------------


class Category(str, Enum):
    AP = "AP"
    PM = "PM"
    AR = "AR"

    def __str__(self) -> str:
        return self.value


AP_GATES = frozenset({GateKind.X, GateKind.CX, GateKind.CCX, GateKind.SWAP, GateKind.CSWAP})
PM_GATES = frozenset({GateKind.Z, GateKind.S, GateKind.Sdg, GateKind.T, GateKind.Tdg,
                      GateKind.RZ, GateKind.P, GateKind.CZ, GateKind.CP})
AR_GATES = frozenset({GateKind.H, GateKind.RX, GateKind.RY, GateKind.Y})


@dataclass(frozen=True)
class BlockCategory:
    verdict: Category
    method: Literal["gate-set", "unitary"]
    monomial: bool = False
    notes: list[str] = field(default_factory=list)


def is_diagonal(u: np.ndarray, atol: float = 1e-9) -> bool:
    off = u - np.diag(np.diag(u))
    return bool(np.all(np.abs(off) <= atol))


def is_monomial(u: np.ndarray, atol: float = 1e-9) -> bool:
    """One unit-modulus entry per row and column, zeros elsewhere."""
    mag = np.abs(u)
    nonzero = mag > atol
    if not (np.all(nonzero.sum(axis=0) == 1) and np.all(nonzero.sum(axis=1) == 1)):
        return False
    return bool(np.all(np.abs(mag[nonzero] - 1) <= atol))


def is_permutation(u: np.ndarray, atol: float = 1e-9, up_to_global_phase: bool = True) -> bool:
    """A 0/1 permutation matrix, optionally after dividing out one common phase."""
    if not is_monomial(u, atol):
        return False
    entries = u[np.abs(u) > atol]
    if up_to_global_phase:
        entries = entries * np.conj(entries[0])
    return bool(np.all(np.abs(entries - 1) <= atol))


def categorize(circuit: Circuit, max_unitary_qubits: int = 10, *,
               force_unitary: bool = False) -> BlockCategory:
    """Classify a block as amplitude-permutation, phase-modulation or amplitude-redistribution.

    Pure gate sets decide directly. Mixed sets and anything containing
    H/RX/RY/Y are settled from the dense unitary when the block is small
    enough; above ``max_unitary_qubits`` the gate-set guess stands.
    """
    kinds = {op.kind for op in circuit if not op.kind.is_directive}
    if GateKind.Measure in kinds:
        raise CircuitError("cannot categorize a circuit containing measurements")
    if not force_unitary:
        if kinds <= AP_GATES:
            return BlockCategory(Category.AP, "gate-set", notes=["empty block"] if not kinds else [])
        if kinds <= PM_GATES:
            return BlockCategory(Category.PM, "gate-set")
    if circuit.num_qubits > max_unitary_qubits:
        if kinds & AR_GATES:
            note = "contains superposition-creating gates, unverified"
        else:
            note = "mixed gate set, unverified"
        return BlockCategory(Category.AR, "gate-set", notes=[note])

    u = unitary_of(circuit, max_qubits=max(max_unitary_qubits, circuit.num_qubits))
    if is_diagonal(u):
        return BlockCategory(Category.PM, "unitary")
    if is_permutation(u):
        return BlockCategory(Category.AP, "unitary")
    if is_monomial(u):
        return BlockCategory(Category.AR, "unitary", monomial=True,
                             notes=["permutation with non-uniform phases"])
    return BlockCategory(Category.AR, "unitary")
