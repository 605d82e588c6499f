"""
Reference circuits for common subroutines.

Also builds periodic input states and generates test vectors over the six
single-qubit basis states.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import acos, pi, sqrt
from typing import Sequence

import numpy as np

from .ir import Circuit, CircuitError, inverse
from .sim import run

SUBROUTINE_KINDS = ("full_adder", "diffusion", "w_state", "ghz", "dicke", "qft", "qpe", "cluster_1d")


def full_adder(label: str = "full_adder") -> Circuit:
    """4-qubit adder: inputs A, B, Cin on q0..q2 and |0> on q3; outputs A, B, S, Cout."""
    qc = Circuit(4, name="full_adder")
    qc.ccx(0, 1, 3, label=label)
    qc.cx(0, 1, label=label)
    qc.ccx(1, 2, 3, label=label)
    qc.cx(1, 2, label=label)
    qc.cx(0, 1, label=label)
    return qc


FULL_ADDER_CASES = [
    {"name": "test 1", "input": [1, 1, 1, 0], "expected_output": [1, 1, 1, 1]},
    {"name": "test 2", "input": [0, 0, 0, 0], "expected_output": [0, 0, 0, 0]},
    {"name": "test 3", "input": [1, 0, 1, 0], "expected_output": [1, 0, 0, 1]},
    {"name": "test 4", "input": [0, 1, 0, 0], "expected_output": [0, 1, 1, 0]},
    {"name": "test 5", "input": [1, 1, 0, 0], "expected_output": [1, 1, 0, 1]},
]


def qft(n: int, label: str = "qft") -> Circuit:
    """QFT|j> = sum_k e^{2 pi i jk / 2^n} |k> / sqrt(2^n) in little-endian indexing.

    n Hadamards, n(n-1)/2 controlled phases and floor(n/2) swaps. The
    Hadamard/rotation ladder starts at the most significant qubit so that
    the little-endian unitary is exactly the DFT matrix.
    """
    if n < 1:
        raise CircuitError("qft needs n >= 1")
    qc = Circuit(n, name=f"qft{n}")
    for j in reversed(range(n)):
        qc.h(j, label=label)
        for k in reversed(range(j)):
            qc.cp(pi / 2 ** (j - k), k, j, label=label)
    for j in range(n // 2):
        qc.swap(j, n - j - 1, label=label)
    return qc


def ghz(n: int, label: str = "ghz") -> Circuit:
    if n < 1:
        raise CircuitError("ghz needs n >= 1")
    qc = Circuit(n, name=f"ghz{n}")
    qc.h(0, label=label)
    for i in range(1, n):
        qc.cx(i - 1, i, label=label)
    return qc


def cluster_1d(n: int, label: str = "cluster_1d") -> Circuit:
    if n < 1:
        raise CircuitError("cluster state needs n >= 1")
    qc = Circuit(n, name=f"cluster{n}")
    for i in range(n):
        qc.h(i, label=label)
    for i in range(n - 1):
        qc.cz(i, i + 1, label=label)
    return qc


def _cry(qc: Circuit, theta: float, c: int, t: int, label: str) -> None:
    qc.ry(theta / 2, t, label=label)
    qc.cx(c, t, label=label)
    qc.ry(-theta / 2, t, label=label)
    qc.cx(c, t, label=label)


def _ccry(qc: Circuit, theta: float, c1: int, c2: int, t: int, label: str) -> None:
    _cry(qc, theta / 2, c2, t, label)
    qc.cx(c1, c2, label=label)
    _cry(qc, -theta / 2, c2, t, label)
    qc.cx(c1, c2, label=label)
    _cry(qc, theta / 2, c1, t, label)


def w_state(n: int, label: str = "w_state") -> Circuit:
    """Cascade that moves weight 1/n of the excitation onto each qubit in turn."""
    if n < 2:
        raise CircuitError("W state needs n >= 2")
    qc = Circuit(n, name=f"w{n}")
    qc.x(0, label=label)
    for k in range(n - 1):
        _cry(qc, 2 * acos(sqrt(1 / (n - k))), k, k + 1, label)
        qc.cx(k + 1, k, label=label)
    return qc


def dicke(n: int, k: int, label: str = "dicke") -> Circuit:
    """Deterministic Dicke-state preparation from split-and-cyclic-shift blocks."""
    if not 1 <= k <= n:
        raise CircuitError(f"dicke needs 1 <= k <= n, got n={n}, k={k}")
    qc = Circuit(n, name=f"dicke{n}_{k}")
    q = lambda pos: pos - 1  # noqa: E731  positions are 1-based in the construction

    def scs(l: int, m: int) -> None:
        qc.cx(q(l - 1), q(l), label=label)
        _cry(qc, 2 * acos(sqrt(1 / l)), q(l), q(l - 1), label)
        qc.cx(q(l - 1), q(l), label=label)
        for i in range(2, m + 1):
            qc.cx(q(l - i), q(l), label=label)
            _ccry(qc, 2 * acos(sqrt(i / l)), q(l), q(l - i + 1), q(l - i), label)
            qc.cx(q(l - i), q(l), label=label)

    for pos in range(n - k + 1, n + 1):
        qc.x(q(pos), label=label)
    for l in range(n, k, -1):
        scs(l, k)
    for l in range(k, 1, -1):
        scs(l, l - 1)
    return qc


def _mcz(qc: Circuit, qubits: Sequence[int], ancillas: Sequence[int], label: str) -> None:
    """Phase-flip the all-ones state of ``qubits``."""
    n = len(qubits)
    if n == 1:
        qc.z(qubits[0], label=label)
    elif n == 2:
        qc.cz(qubits[0], qubits[1], label=label)
    elif n == 3:
        qc.h(qubits[2], label=label)
        qc.ccx(qubits[0], qubits[1], qubits[2], label=label)
        qc.h(qubits[2], label=label)
    else:
        if len(ancillas) < n - 2:
            raise CircuitError(f"{n}-controlled Z needs {n - 2} ancillas")
        chain = [(qubits[0], qubits[1], ancillas[0])]
        for i in range(2, n - 1):
            chain.append((qubits[i], ancillas[i - 2], ancillas[i - 1]))
        for c1, c2, t in chain:
            qc.ccx(c1, c2, t, label=label)
        qc.cz(ancillas[n - 3], qubits[-1], label=label)
        for c1, c2, t in reversed(chain):
            qc.ccx(c1, c2, t, label=label)


def _ancilla_count(n: int) -> int:
    return max(0, n - 2) if n > 3 else 0


def _diffusion_ops(qc: Circuit, n: int, label: str) -> None:
    work = list(range(n))
    anc = list(range(n, n + _ancilla_count(n)))
    for q in work:
        qc.h(q, label=label)
    for q in work:
        qc.x(q, label=label)
    _mcz(qc, work, anc, label)
    for q in work:
        qc.x(q, label=label)
    for q in work:
        qc.h(q, label=label)


def diffusion(n: int, label: str = "diffusion") -> Circuit:
    """Grover diffusion on n qubits; n > 3 adds n-2 ancillas above the work register."""
    if n < 1:
        raise CircuitError("diffusion needs n >= 1")
    qc = Circuit(n + _ancilla_count(n), name=f"diffusion{n}")
    _diffusion_ops(qc, n, label)
    return qc


def grover_oracle(n: int, marked: int, label: str = "oracle") -> Circuit:
    qc = Circuit(n + _ancilla_count(n), name=f"oracle{n}")
    _oracle_ops(qc, n, marked, label)
    return qc


def _oracle_ops(qc: Circuit, n: int, marked: int, label: str) -> None:
    if not 0 <= marked < 1 << n:
        raise CircuitError(f"marked state {marked} out of range for {n} qubits")
    flips = [q for q in range(n) if not (marked >> q) & 1]
    for q in flips:
        qc.x(q, label=label)
    _mcz(qc, list(range(n)), list(range(n, n + _ancilla_count(n))), label)
    for q in flips:
        qc.x(q, label=label)


def grover(n: int = 3, marked: int = 5, iterations: int = 1, breakbarriers: bool = True) -> Circuit:
    """Uniform preparation, then (oracle, diffusion) rounds, with break-barriers between stages."""
    qc = Circuit(n + _ancilla_count(n), name=f"grover{n}")
    for q in range(n):
        qc.h(q, label="prep")
    for _ in range(iterations):
        if breakbarriers:
            qc.breakbarrier()
        _oracle_ops(qc, n, marked, "oracle")
        if breakbarriers:
            qc.breakbarrier()
        _diffusion_ops(qc, n, "diffusion")
    return qc


def qpe(n_count: int, phase: float, label: str = "qpe") -> Circuit:
    """Phase estimation of P(2*pi*phase) on one target qubit (index n_count).

    The target is prepared in |1>. The counting register ends in the
    little-endian binary expansion of phase * 2**n_count.
    """
    if n_count < 1:
        raise CircuitError("qpe needs at least one counting qubit")
    target = n_count
    qc = Circuit(n_count + 1, name=f"qpe{n_count}")
    qc.x(target, label=label)
    for j in range(n_count):
        qc.h(j, label=label)
    for j in range(n_count):
        qc.cp(2 * pi * phase * 2 ** j, j, target, label=label)
    qc.extend(inverse(qft(n_count, label=label)), list(range(n_count)))
    return qc


# -- periodic states --------------------------------------------------------


@dataclass(frozen=True)
class PeriodicStateSpec:
    n: int
    period: int
    shift: int = 0


def make_periodic_state(n: int | PeriodicStateSpec, period: int | None = None, shift: int = 0) -> np.ndarray:
    """Uniform superposition over the indices k with (k - shift) mod period == 0."""
    if isinstance(n, PeriodicStateSpec):
        n, period, shift = n.n, n.period, n.shift
    if period is None:
        raise ValueError("period is required")
    if period < 1:
        raise ValueError("period must be >= 1")
    if not 0 <= shift < period:
        raise ValueError(f"shift must satisfy 0 <= shift < period, got {shift} with period {period}")
    support = np.arange(1 << n)
    mask = (support - shift) % period == 0
    if not mask.any():
        raise ValueError(f"no basis state of {n} qubits matches period {period}, shift {shift}")
    psi = np.zeros(1 << n, dtype=complex)
    psi[mask] = 1 / np.sqrt(mask.sum())
    return psi


# -- subroutine specs and test generation -----------------------------------


@dataclass(frozen=True)
class SubroutineSpec:
    kind: str
    n: int = 1
    k: int | None = None
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in SUBROUTINE_KINDS:
            raise CircuitError(f"unknown subroutine {self.kind!r}; choose from {SUBROUTINE_KINDS}")
        if self.kind == "dicke" and (self.k is None or not 1 <= self.k <= self.n):
            raise CircuitError(f"dicke needs 1 <= k <= n, got n={self.n}, k={self.k}")
        if self.kind == "w_state" and self.n < 2:
            raise CircuitError("W state needs n >= 2")
        if self.n < 1:
            raise CircuitError("subroutines need n >= 1")


def build_subroutine(spec: SubroutineSpec) -> Circuit:
    if spec.kind == "full_adder":
        return full_adder()
    if spec.kind == "diffusion":
        return diffusion(spec.n)
    if spec.kind == "w_state":
        return w_state(spec.n)
    if spec.kind == "ghz":
        return ghz(spec.n)
    if spec.kind == "dicke":
        return dicke(spec.n, spec.k)
    if spec.kind == "qft":
        return qft(spec.n)
    if spec.kind == "qpe":
        return qpe(spec.n, spec.phase)
    return cluster_1d(spec.n)


_BASIS_1Q = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / np.sqrt(2),
    "i": np.array([1, 1j], dtype=complex) / np.sqrt(2),
    "-i": np.array([1, -1j], dtype=complex) / np.sqrt(2),
}


def product_state(label: str, n: int) -> np.ndarray:
    """The n-fold tensor power of one of the six single-qubit basis states."""
    one = _BASIS_1Q[label]
    psi = np.array([1], dtype=complex)
    for _ in range(n):
        psi = np.kron(one, psi)
    return psi


def generate_test_cases(spec: SubroutineSpec | Circuit) -> list:
    """Six cases named 'test 0', 'test 1', 'test +', 'test -', 'test i', 'test -i'.

    Inputs are uniform products over every qubit of the circuit; expected
    outputs are whatever the reference circuit produces on them.
    """
    from .testkit.vectors import TestCase

    circuit = spec if isinstance(spec, Circuit) else build_subroutine(spec)
    n = circuit.num_qubits
    cases = []
    for name in ("0", "1", "+", "-", "i", "-i"):
        psi = product_state(name, n)
        cases.append(TestCase(f"test {name}", psi, run(circuit, psi.copy())))
    return cases
