"""
Circuit intermediate representation.

Every gate carries a SourceSpan recording where it entered the circuit:
the parser stores file/line/column, the builder methods store a label
plus the line of the calling code.

Qubit ordering is little-endian: qubit 0 is the least-significant bit of
a basis-state index.
"""
from __future__ import annotations

import math
import operator
import re
import sys
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator, Sequence


class CircuitError(ValueError):
    """Raised for structurally invalid circuits or gate applications."""


class GateKind(Enum):
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    Sdg = "sdg"
    T = "t"
    Tdg = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    P = "p"
    CX = "cx"
    CZ = "cz"
    CP = "cp"
    SWAP = "swap"
    CCX = "ccx"
    CSWAP = "cswap"
    Measure = "measure"
    Barrier = "barrier"
    BreakBarrier = "breakbarrier"

    @property
    def num_qubits(self) -> int | None:
        """Fixed qubit arity, or None for barriers (variable width)."""
        return _QUBIT_ARITY.get(self)

    @property
    def num_angles(self) -> int:
        return 1 if self in _ANGLE_KINDS else 0

    @property
    def is_directive(self) -> bool:
        return self in (GateKind.Barrier, GateKind.BreakBarrier)

    @classmethod
    def parse(cls, name: str | GateKind) -> GateKind:
        """Look a kind up by qasm name or enum name, case-insensitively."""
        if isinstance(name, GateKind):
            return name
        key = name.strip().lower()
        for kind in cls:
            if kind.value == key or kind.name.lower() == key:
                return kind
        raise CircuitError(f"unknown gate kind {name!r}")

    def __repr__(self) -> str:
        return f"GateKind.{self.name}"


_QUBIT_ARITY = {
    **{k: 1 for k in (GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S,
                      GateKind.Sdg, GateKind.T, GateKind.Tdg, GateKind.RX, GateKind.RY,
                      GateKind.RZ, GateKind.P, GateKind.Measure)},
    **{k: 2 for k in (GateKind.CX, GateKind.CZ, GateKind.CP, GateKind.SWAP)},
    GateKind.CCX: 3,
    GateKind.CSWAP: 3,
}
_ANGLE_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.P, GateKind.CP})

_ADJOINT = {
    GateKind.S: GateKind.Sdg,
    GateKind.Sdg: GateKind.S,
    GateKind.T: GateKind.Tdg,
    GateKind.Tdg: GateKind.T,
}


@dataclass(frozen=True)
class QubitRef:
    register: str
    index: int
    flat: int

    def __str__(self) -> str:
        return f"{self.register}[{self.index}]"


@dataclass(frozen=True)
class ClbitRef:
    register: str
    index: int
    flat: int

    def __str__(self) -> str:
        return f"{self.register}[{self.index}]"


@dataclass(frozen=True)
class SourceSpan:
    origin: str
    line: int
    column: int = 0

    def __str__(self) -> str:
        return f"{self.origin}:{self.line}:{self.column}"


@dataclass(frozen=True)
class GateOp:
    """One instruction. Equality ignores the source span."""

    kind: GateKind
    qubits: tuple[QubitRef, ...]
    angles: tuple[float, ...] = ()
    clbits: tuple[ClbitRef, ...] = ()
    span: SourceSpan = field(default=SourceSpan("builder", 0), compare=False)

    @property
    def flat_qubits(self) -> tuple[int, ...]:
        return tuple(q.flat for q in self.qubits)

    def __str__(self) -> str:
        args = ",".join(str(q) for q in self.qubits)
        params = f"({','.join(f'{a:.6g}' for a in self.angles)})" if self.angles else ""
        tail = f" -> {','.join(str(c) for c in self.clbits)}" if self.clbits else ""
        return f"{self.kind.value}{params} {args}{tail}"


@dataclass(frozen=True)
class GateStats:
    histogram: dict[GateKind, int]

    @property
    def total(self) -> int:
        return sum(self.histogram.values())

    def get(self, kind: GateKind | str, default: int = 0) -> int:
        return self.histogram.get(GateKind.parse(kind), default)

    def __str__(self) -> str:
        inner = ", ".join(f"{k.name}:{v}" for k, v in self.histogram.items())
        return "{" + inner + "}"


def _caller_line() -> int:
    # first frame outside this module
    frame = sys._getframe(1)
    while frame is not None and frame.f_code.co_filename == __file__:
        frame = frame.f_back
    return frame.f_lineno if frame is not None else 0


_QUBIT_TOKEN = re.compile(r"^\s*([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]\s*$")


class Circuit:
    """An ordered list of GateOps over qubit and classical registers.

    The builder methods (``h``, ``cx``, ...) append in place and return the
    circuit so calls can be chained. Everything else in the package treats
    circuits as values and returns new ones.
    """

    def __init__(
        self,
        num_qubits: int | None = None,
        num_clbits: int = 0,
        *,
        qregs: Sequence[tuple[str, int]] | None = None,
        cregs: Sequence[tuple[str, int]] | None = None,
        name: str = "circuit",
    ):
        if qregs is None:
            if num_qubits is None:
                raise CircuitError("num_qubits or qregs is required")
            qregs = [("q", num_qubits)]
        if cregs is None:
            cregs = [("c", num_clbits)] if num_clbits else []
        self.qregs: tuple[tuple[str, int], ...] = tuple((n, int(s)) for n, s in qregs)
        self.cregs: tuple[tuple[str, int], ...] = tuple((n, int(s)) for n, s in cregs)
        names = [n for n, _ in self.qregs + self.cregs]
        if len(set(names)) != len(names):
            raise CircuitError(f"duplicate register names in {names}")
        if any(s < 1 for _, s in self.qregs + self.cregs):
            raise CircuitError("registers must have size >= 1")
        self.num_qubits = sum(s for _, s in self.qregs)
        self.num_clbits = sum(s for _, s in self.cregs)
        if self.num_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        if num_qubits is not None and num_qubits != self.num_qubits:
            raise CircuitError("num_qubits disagrees with qregs")
        self.name = name
        self._qubits = tuple(
            QubitRef(reg, i, flat)
            for flat, (reg, i) in enumerate((r, i) for r, s in self.qregs for i in range(s))
        )
        self._clbits = tuple(
            ClbitRef(reg, i, flat)
            for flat, (reg, i) in enumerate((r, i) for r, s in self.cregs for i in range(s))
        )
        self._ops: list[GateOp] = []

    # -- structure ---------------------------------------------------------

    @property
    def ops(self) -> tuple[GateOp, ...]:
        return tuple(self._ops)

    @property
    def qubits(self) -> tuple[QubitRef, ...]:
        return self._qubits

    @property
    def clbits(self) -> tuple[ClbitRef, ...]:
        return self._clbits

    def __len__(self) -> int:
        return len(self._ops)

    def __iter__(self) -> Iterator[GateOp]:
        return iter(self._ops)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (self.num_qubits == other.num_qubits
                and self.num_clbits == other.num_clbits
                and self._ops == other._ops)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Circuit(num_qubits={self.num_qubits}, num_clbits={self.num_clbits}, ops={len(self._ops)})"

    def empty_like(self, name: str | None = None) -> Circuit:
        return Circuit(qregs=self.qregs, cregs=self.cregs, name=name or self.name)

    def copy(self, name: str | None = None) -> Circuit:
        out = self.empty_like(name)
        out._ops = list(self._ops)
        return out

    def qubit(self, ref: int | str | QubitRef) -> QubitRef:
        """Resolve a flat index, ``"reg[i]"`` string, or QubitRef to this circuit's QubitRef."""
        if isinstance(ref, QubitRef):
            ref = ref.flat
        if isinstance(ref, str):
            m = _QUBIT_TOKEN.match(ref)
            if not m:
                raise CircuitError(f"cannot parse qubit reference {ref!r}")
            reg, idx = m.group(1), int(m.group(2))
            for q in self._qubits:
                if q.register == reg and q.index == idx:
                    return q
            raise CircuitError(f"no qubit {ref!r} in circuit")
        try:
            ref = operator.index(ref)
        except TypeError:
            raise CircuitError(f"bad qubit reference {ref!r}") from None
        if not 0 <= ref < self.num_qubits:
            raise CircuitError(f"qubit index {ref} out of range for {self.num_qubits} qubits")
        return self._qubits[ref]

    def clbit(self, ref: int | ClbitRef) -> ClbitRef:
        if isinstance(ref, ClbitRef):
            ref = ref.flat
        ref = int(ref)
        if not 0 <= ref < self.num_clbits:
            raise CircuitError(f"clbit index {ref} out of range for {self.num_clbits} clbits")
        return self._clbits[ref]

    # -- appending ---------------------------------------------------------

    def _check(self, op: GateOp) -> GateOp:
        """Validate op against this circuit and rebind its refs to our registers."""
        kind = op.kind
        arity = kind.num_qubits
        if kind is GateKind.BreakBarrier:
            if op.flat_qubits and sorted(op.flat_qubits) != list(range(self.num_qubits)):
                raise CircuitError("breakbarrier must span all qubits")
            if op.angles:
                raise CircuitError("breakbarrier carries no angles")
            qubits = self._qubits
        else:
            if arity is not None and len(op.qubits) != arity:
                raise CircuitError(
                    f"{kind.value} expects {arity} qubit(s), got {len(op.qubits)}")
            if arity is None and not op.qubits:
                raise CircuitError(f"{kind.value} needs at least one qubit")
            qubits = tuple(self.qubit(q.flat) for q in op.qubits)
        if len(set(q.flat for q in qubits)) != len(qubits):
            raise CircuitError(f"duplicate qubit in {kind.value} {[str(q) for q in qubits]}")
        if len(op.angles) != kind.num_angles:
            raise CircuitError(
                f"{kind.value} expects {kind.num_angles} angle(s), got {len(op.angles)}")
        if kind is GateKind.Measure:
            if len(op.clbits) != 1:
                raise CircuitError("measure needs exactly one classical bit")
            clbits = (self.clbit(op.clbits[0].flat),)
        elif op.clbits:
            raise CircuitError(f"{kind.value} takes no classical bits")
        else:
            clbits = ()
        return GateOp(kind, qubits, tuple(float(a) for a in op.angles), clbits, op.span)

    def append(self, op: GateOp) -> Circuit:
        self._ops.append(self._check(op))
        return self

    def apply(
        self,
        kind: GateKind | str,
        qubits: Iterable[int | str | QubitRef],
        angles: Iterable[float] = (),
        clbits: Iterable[int] = (),
        *,
        label: str = "builder",
        span: SourceSpan | None = None,
    ) -> Circuit:
        kind = GateKind.parse(kind)
        qrefs = tuple(self.qubit(q) for q in qubits)
        crefs = tuple(self.clbit(c) for c in clbits)
        if span is None:
            span = SourceSpan(label, _caller_line(), 0)
        return self.append(GateOp(kind, qrefs, tuple(angles), crefs, span))

    def extend(self, other: Circuit, qubits: Sequence[int] | None = None,
               clbits: Sequence[int] | None = None) -> Circuit:
        """Append other's ops, mapping its qubit i onto ``qubits[i]`` (identity by default).

        Break-barriers of ``other`` are dropped unless the mapping is the identity
        on a circuit of the same width.
        """
        qmap = list(range(other.num_qubits)) if qubits is None else list(qubits)
        cmap = list(range(other.num_clbits)) if clbits is None else list(clbits)
        if len(qmap) != other.num_qubits:
            raise CircuitError("qubit map length must equal the appended circuit's width")
        identity = qmap == list(range(self.num_qubits))
        for op in other:
            if op.kind is GateKind.BreakBarrier:
                if identity:
                    self._ops.append(replace(op, qubits=self._qubits))
                continue
            self.append(GateOp(
                op.kind,
                tuple(self.qubit(qmap[q.flat]) for q in op.qubits),
                op.angles,
                tuple(self.clbit(cmap[c.flat]) for c in op.clbits),
                op.span,
            ))
        return self

    # -- builder methods ---------------------------------------------------

    def x(self, q, *, label="builder"): return self.apply(GateKind.X, [q], label=label)
    def y(self, q, *, label="builder"): return self.apply(GateKind.Y, [q], label=label)
    def z(self, q, *, label="builder"): return self.apply(GateKind.Z, [q], label=label)
    def h(self, q, *, label="builder"): return self.apply(GateKind.H, [q], label=label)
    def s(self, q, *, label="builder"): return self.apply(GateKind.S, [q], label=label)
    def sdg(self, q, *, label="builder"): return self.apply(GateKind.Sdg, [q], label=label)
    def t(self, q, *, label="builder"): return self.apply(GateKind.T, [q], label=label)
    def tdg(self, q, *, label="builder"): return self.apply(GateKind.Tdg, [q], label=label)

    def rx(self, theta, q, *, label="builder"): return self.apply(GateKind.RX, [q], [theta], label=label)
    def ry(self, theta, q, *, label="builder"): return self.apply(GateKind.RY, [q], [theta], label=label)
    def rz(self, theta, q, *, label="builder"): return self.apply(GateKind.RZ, [q], [theta], label=label)
    def p(self, theta, q, *, label="builder"): return self.apply(GateKind.P, [q], [theta], label=label)

    def cx(self, c, t, *, label="builder"): return self.apply(GateKind.CX, [c, t], label=label)
    def cz(self, a, b, *, label="builder"): return self.apply(GateKind.CZ, [a, b], label=label)
    def cp(self, theta, c, t, *, label="builder"): return self.apply(GateKind.CP, [c, t], [theta], label=label)
    def swap(self, a, b, *, label="builder"): return self.apply(GateKind.SWAP, [a, b], label=label)
    def ccx(self, c1, c2, t, *, label="builder"): return self.apply(GateKind.CCX, [c1, c2, t], label=label)
    def cswap(self, c, a, b, *, label="builder"): return self.apply(GateKind.CSWAP, [c, a, b], label=label)

    def measure(self, q, c, *, label="builder"):
        return self.apply(GateKind.Measure, [q], clbits=[c], label=label)

    def barrier(self, *qubits, label="builder"):
        qs = qubits or range(self.num_qubits)
        return self.apply(GateKind.Barrier, qs, label=label)

    def breakbarrier(self, *, label="builder"):
        """Mark a vertical cut point for the slicer."""
        return self.apply(GateKind.BreakBarrier, range(self.num_qubits), label=label)


# -- functional operations --------------------------------------------------


def add_gate(circuit: Circuit, op: GateOp) -> Circuit:
    """Return a copy of ``circuit`` with ``op`` appended."""
    out = circuit.copy()
    return out.append(op)


def gate_loc(
    circuit: Circuit,
    kind: GateKind | str,
    qubits: Iterable[int | str | QubitRef] | None = None,
) -> list[tuple[int, SourceSpan]]:
    """Find every op of ``kind`` acting on (at least) all of ``qubits``.

    Matching is by superset: asking for CCX on q0,q1 finds Toffolis that
    use those two qubits as any of their three operands.
    """
    kind = GateKind.parse(kind)
    wanted = {circuit.qubit(q).flat for q in qubits} if qubits else set()
    return [
        (i, op.span)
        for i, op in enumerate(circuit)
        if op.kind is kind and wanted <= set(op.flat_qubits)
    ]


def count_ops(circuit: Circuit) -> GateStats:
    counts = Counter(op.kind for op in circuit if op.kind is not GateKind.BreakBarrier)
    return GateStats({k: counts[k] for k in GateKind if counts[k]})


def compose(first: Circuit, second: Circuit) -> Circuit:
    """Ops of ``first`` followed by ops of ``second`` on the same qubits."""
    if first.num_qubits != second.num_qubits:
        raise CircuitError(
            f"cannot compose {first.num_qubits}-qubit and {second.num_qubits}-qubit circuits")
    cregs = first.cregs if first.num_clbits >= second.num_clbits else second.cregs
    out = Circuit(qregs=first.qregs, cregs=cregs, name=first.name)
    out._ops = list(first._ops)
    for op in second:
        if op.kind is GateKind.BreakBarrier:
            out._ops.append(replace(op, qubits=out.qubits))
        else:
            out.append(op)
    return out


def inverse(circuit: Circuit) -> Circuit:
    """Reverse the op order and replace each gate by its adjoint."""
    out = circuit.empty_like(f"{circuit.name}_dg")
    for op in reversed(circuit.ops):
        if op.kind is GateKind.Measure:
            raise CircuitError("cannot invert a circuit containing measurements")
        kind = _ADJOINT.get(op.kind, op.kind)
        angles = tuple(-a for a in op.angles)
        out._ops.append(replace(op, kind=kind, angles=angles))
    return out


def strip_breakbarriers(circuit: Circuit) -> Circuit:
    out = circuit.empty_like()
    out._ops = [op for op in circuit if op.kind is not GateKind.BreakBarrier]
    return out


def ops_equal(a: Iterable[GateOp], b: Iterable[GateOp], atol: float = 1e-12) -> bool:
    """Op-list equality with an angle tolerance; spans are ignored."""
    a, b = list(a), list(b)
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if (x.kind, x.flat_qubits, tuple(c.flat for c in x.clbits)) != \
                (y.kind, y.flat_qubits, tuple(c.flat for c in y.clbits)):
            return False
        if len(x.angles) != len(y.angles):
            return False
        if any(not math.isclose(p, q, rel_tol=0.0, abs_tol=atol) for p, q in zip(x.angles, y.angles)):
            return False
    return True
