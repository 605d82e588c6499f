"""
Swap-test phase estimation and phase-error localization for
phase-modulation blocks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..analysis import Category, categorize
from ..ir import Circuit, CircuitError, GateKind, compose
from ..sim import derive_seed, run, sample

DEFAULT_SHOTS = 8192


class CategoryError(ValueError):
    pass


@dataclass(frozen=True)
class SwapTestResult:
    """Outcome of one swap test.

    ``s`` estimates the squared overlap |<a|b>|^2 as 1 - 2*P(1). For two
    single-qubit states differing by a relative phase, s = (1 + cos dtheta)/2.
    Exact runs have ``shots`` and ``ones`` set to None and zero stderr.
    """

    shots: int | None
    ones: int | None
    p1: float
    seed: int | None = None

    @property
    def p0(self) -> float:
        return 1 - self.p1

    @property
    def s(self) -> float:
        return 1 - 2 * self.p1

    @property
    def delta_theta(self) -> float:
        """Relative phase magnitude in [0, pi]; the sign is not observable."""
        return math.acos(min(1.0, max(-1.0, 2 * self.s - 1)))

    @property
    def stderr(self) -> float:
        if self.shots is None:
            return 0.0
        return 2 * math.sqrt(self.p1 * (1 - self.p1) / self.shots)


def swap_harness(n: int) -> Circuit:
    """Ancilla q0, register A on q1..qn, register B on q(n+1)..q(2n), one clbit."""
    qc = Circuit(2 * n + 1, 1, name=f"swap_test{n}")
    qc.h(0, label="swap_test")
    for i in range(n):
        qc.cswap(0, 1 + i, 1 + n + i, label="swap_test")
    qc.h(0, label="swap_test")
    qc.measure(0, 0, label="swap_test")
    return qc


def _finish(harness: Circuit, initial, shots: int | None, seed: int) -> SwapTestResult:
    if shots is None:
        body = harness.empty_like()
        body._ops = [op for op in harness if op.kind is not GateKind.Measure]
        psi = run(body, initial)
        p1 = float(np.sum(np.abs(psi[1::2]) ** 2))
        return SwapTestResult(None, None, min(1.0, max(0.0, p1)))
    if shots < 1:
        raise ValueError("shots must be >= 1")
    counts = sample(harness, shots, seed, initial)
    ones = counts["1"]
    return SwapTestResult(shots, ones, ones / shots, seed)


def swap_test(prep_a: Circuit, prep_b: Circuit, shots: int | None = DEFAULT_SHOTS,
              seed: int = 0) -> SwapTestResult:
    """Swap test between the states prepared by two circuits from |0...0>.

    ``shots=None`` evaluates the ancilla probability exactly.
    """
    n = prep_a.num_qubits
    if prep_b.num_qubits != n:
        raise CircuitError("swap test needs preparations of equal width")
    harness = Circuit(2 * n + 1, 1, name=f"swap_test{n}")
    harness.extend(prep_a, [1 + i for i in range(n)])
    harness.extend(prep_b, [1 + n + i for i in range(n)])
    harness.extend(swap_harness(n))
    return _finish(harness, None, shots, seed)


def swap_test_states(a: np.ndarray, b: np.ndarray, shots: int | None = DEFAULT_SHOTS,
                     seed: int = 0) -> SwapTestResult:
    """Swap test with the two registers initialised directly to state vectors."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("swap test needs states of equal dimension")
    n = int(a.size).bit_length() - 1
    ancilla = np.array([1, 0], dtype=complex)
    initial = np.kron(b, np.kron(a, ancilla))
    return _finish(swap_harness(n), initial, shots, seed)


def pair_probe(n: int, a: int, b: int) -> Circuit:
    """Circuit preparing (|a> + |b>)/sqrt(2) from |0...0>."""
    if a == b or not (0 <= a < 1 << n and 0 <= b < 1 << n):
        raise ValueError(f"probe needs two distinct basis indices below {1 << n}")
    diff = a ^ b
    pivot = (diff & -diff).bit_length() - 1
    qc = Circuit(n, name=f"probe_{a}_{b}")
    qc.h(pivot, label="probe")
    for q in range(n):
        if q != pivot and (diff >> q) & 1:
            qc.cx(pivot, q, label="probe")
    for q in range(n):
        if (a >> q) & 1:
            qc.x(q, label="probe")
    return qc


@dataclass(frozen=True)
class PhaseLocalizationReport:
    total_delta: float
    per_qubit: list[tuple[int, float]]
    shots_per_probe: int | None
    results: dict[str, SwapTestResult] = field(default_factory=dict)
    extra: list[tuple[tuple[int, int], float]] = field(default_factory=list)

    def suspects(self, threshold: float = 0.1) -> list[int]:
        """Qubits whose estimated phase error exceeds ``threshold`` radians."""
        return [q for q, d in self.per_qubit if d > threshold]


def localize_phase_error(dut: Circuit, eo: Circuit, shots_per_probe: int | None = DEFAULT_SHOTS,
                         seed: int = 0, *, check_category: bool = True,
                         extra_probes: Sequence[tuple[int, int]] = ()) -> PhaseLocalizationReport:
    """Estimate where dut's phases differ from eo's using O(n) swap tests.

    The all-qubit probe (|0..0> + |1..1>)/sqrt(2) measures the summed phase
    error; each probe (|0..0> + |e_j>)/sqrt(2) isolates qubit j. Pairwise
    probes such as (|110> + |111>) can be added for controlled-phase suspects.
    """
    n = dut.num_qubits
    if eo.num_qubits != n:
        raise CircuitError("dut and eo must have the same width")
    if check_category:
        for which, c in (("dut", dut), ("eo", eo)):
            cat = categorize(c)
            # the identity is diagonal even though an empty block reports AP
            if cat.verdict is not Category.PM and any(not op.kind.is_directive for op in c):
                raise CategoryError(f"{which} is {cat.verdict.value}, not a phase-modulation block")

    results: dict[str, SwapTestResult] = {}

    def probe(key: str, k: int, a: int, b: int) -> float:
        prep = pair_probe(n, a, b)
        res = swap_test(compose(prep, dut), compose(prep, eo), shots_per_probe, derive_seed(seed, k))
        results[key] = res
        return res.delta_theta

    total = probe("total", 0, 0, (1 << n) - 1) if n > 1 else None
    per_qubit = [(j, probe(f"q{j}", 1 + j, 0, 1 << j)) for j in range(n)]
    if total is None:
        total = per_qubit[0][1]
        results["total"] = results["q0"]
    extra = [((a, b), probe(f"{a}+{b}", 1 + n + i, a, b)) for i, (a, b) in enumerate(extra_probes)]
    return PhaseLocalizationReport(total, per_qubit, shots_per_probe, results, extra)
