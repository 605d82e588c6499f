"""
Bug injection for exercising testers against known faults.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ..ir import Circuit, CircuitError, GateKind, GateOp, SourceSpan
from ..sim import unitary_of

MUTATION_KINDS = ("extraGate", "missingGate", "wrongQubit", "wrongOrder", "phaseShift", "skipInitialization")

_INJECTED = "injected"


@dataclass(frozen=True)
class Mutation:
    """A fault to inject.

    ``target`` is an op index (insertion point for extraGate, default the
    end). ``qubits``/``gate``/``angle`` parameterize the new or changed op.
    ``seed`` drives the random choice in wrongQubit when no qubits are given.
    """

    kind: str
    target: int | None = None
    qubits: tuple[int, ...] | None = None
    gate: GateKind | str | None = None
    angle: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in MUTATION_KINDS:
            raise ValueError(f"unknown mutation {self.kind!r}; expected one of {', '.join(MUTATION_KINDS)}")
        if self.qubits is not None:
            object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))


def _span(index: int) -> SourceSpan:
    return SourceSpan(_INJECTED, index, 0)


def _gate_indices(circuit: Circuit) -> list[int]:
    return [i for i, op in enumerate(circuit) if not op.kind.is_directive and op.kind is not GateKind.Measure]


def _resolve_target(circuit: Circuit, m: Mutation) -> int:
    if m.target is None:
        raise CircuitError(f"{m.kind} needs a target op index")
    if not 0 <= m.target < len(circuit):
        raise CircuitError(f"target {m.target} out of range for {len(circuit)} ops")
    return m.target


def inject_bug(circuit: Circuit, mutation: Mutation) -> Circuit:
    """Return a mutated copy; touched ops carry the provenance label 'injected'."""
    ops = list(circuit.ops)
    out = circuit.empty_like(f"{circuit.name}_{mutation.kind}")
    kind = mutation.kind

    if kind == "extraGate":
        if mutation.gate is None or mutation.qubits is None:
            raise CircuitError("extraGate needs a gate and qubits")
        at = len(ops) if mutation.target is None else mutation.target
        if not 0 <= at <= len(ops):
            raise CircuitError(f"insertion point {at} out of range")
        g = GateKind.parse(mutation.gate)
        angles = () if g.num_angles == 0 else (mutation.angle if mutation.angle is not None else 0.0,)
        scratch = circuit.empty_like()
        scratch.apply(g, mutation.qubits, angles, span=_span(at))
        ops.insert(at, scratch.ops[0])

    elif kind == "missingGate":
        del ops[_resolve_target(circuit, mutation)]

    elif kind == "wrongQubit":
        i = _resolve_target(circuit, mutation)
        op = ops[i]
        if op.kind.is_directive:
            raise CircuitError("cannot retarget a barrier")
        if mutation.qubits is not None:
            new = mutation.qubits
        else:
            rng = random.Random(mutation.seed)
            choices = [q for q in range(circuit.num_qubits) if q not in op.flat_qubits]
            if not choices:
                raise CircuitError("no spare qubit to move the op onto")
            slot = rng.randrange(len(op.qubits))
            new = list(op.flat_qubits)
            new[slot] = rng.choice(choices)
        if tuple(new) == op.flat_qubits:
            raise CircuitError("wrongQubit must change the operands")
        scratch = circuit.empty_like()
        scratch.apply(op.kind, new, op.angles, [c.flat for c in op.clbits], span=_span(i))
        ops[i] = scratch.ops[0]

    elif kind == "wrongOrder":
        i = _resolve_target(circuit, mutation)
        if i + 1 >= len(ops):
            raise CircuitError("wrongOrder needs an op after the target")
        a, b = ops[i], ops[i + 1]
        if a == b:
            raise CircuitError("swapping identical adjacent ops would not change the circuit")
        ops[i], ops[i + 1] = replace(b, span=_span(i)), replace(a, span=_span(i + 1))

    elif kind == "phaseShift":
        i = _resolve_target(circuit, mutation)
        op = ops[i]
        if not op.angles:
            raise CircuitError(f"op {i} ({op.kind.value}) has no angle to shift")
        if not mutation.angle:
            raise CircuitError("phaseShift needs a nonzero angle")
        ops[i] = replace(op, angles=(op.angles[0] + mutation.angle,) + op.angles[1:], span=_span(i))

    elif kind == "skipInitialization":
        # drop the first single-qubit gate on each (selected) wire
        only = GateKind.parse(mutation.gate) if mutation.gate is not None else None
        wires = set(mutation.qubits) if mutation.qubits is not None else set(range(circuit.num_qubits))
        seen: set[int] = set()
        drop: set[int] = set()
        for i in _gate_indices(circuit):
            op = ops[i]
            qs = set(op.flat_qubits)
            fresh = qs - seen
            seen |= qs
            if len(qs) == 1 and fresh & wires and (only is None or op.kind is only):
                drop.add(i)
        if not drop:
            raise CircuitError("no initialization gate found to skip")
        ops = [op for i, op in enumerate(ops) if i not in drop]

    out._ops = ops
    return out


def is_silent_mutation(original: Circuit, mutated: Circuit, tol: float = 1e-10) -> bool:
    """True when the mutation leaves the unitary unchanged up to global phase."""
    if original.num_qubits != mutated.num_qubits:
        return False
    u, v = unitary_of(original), unitary_of(mutated)
    overlap = np.vdot(u.ravel(), v.ravel())
    if abs(overlap) < tol:
        return False
    phase = overlap / abs(overlap)
    return bool(np.max(np.abs(u * phase - v)) <= tol)


def injected_ops(circuit: Circuit) -> Sequence[tuple[int, GateOp]]:
    return [(i, op) for i, op in enumerate(circuit) if op.span.origin == _INJECTED]
