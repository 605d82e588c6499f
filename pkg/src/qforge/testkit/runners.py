"""
Test execution: classical-bit and statevector testers, and the
inverse-composition equivalence test.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from ..ir import Circuit, CircuitError, compose, inverse
from ..sim import basis_state, bitstring, derive_seed, fidelity, index_bits, run, sample
from .planning import sigma
from .vectors import Payload, TestCase, _encode

Status = Literal["PASS", "FAIL", "ERROR"]

BASIS_TOL = 1e-9
RENDER_CUTOFF = 0.005
RENDER_MAX_TERMS = 16


def render_state(psi: np.ndarray, digits: int = 2) -> str:
    """Render amplitudes as ``0.71|011> + -0.71|101>`` with qubit 0 rightmost."""
    psi = np.asarray(psi)
    n = int(psi.size).bit_length() - 1
    idx = [i for i in np.flatnonzero(np.abs(psi) >= RENDER_CUTOFF)]
    if len(idx) > RENDER_MAX_TERMS:
        idx = sorted(sorted(idx, key=lambda i: -abs(psi[i]))[:RENDER_MAX_TERMS])
        tail = " + ..."
    else:
        tail = ""
    terms = []
    for i in idx:
        a = psi[i]
        if abs(a.imag) < RENDER_CUTOFF:
            coef = f"{a.real:.{digits}f}"
        elif abs(a.real) < RENDER_CUTOFF:
            coef = f"{a.imag:.{digits}f}j"
        else:
            coef = f"({a.real:.{digits}f}{a.imag:+.{digits}f}j)"
        terms.append(f"{coef}|{bitstring(int(i), n)}>")
    return (" + ".join(terms) or "0") + tail


def render_payload(value: Payload | None) -> str:
    if value is None:
        return "-"
    if isinstance(value, np.ndarray):
        return render_state(value)
    return str([int(b) for b in value])


@dataclass
class CaseResult:
    name: str
    status: Status
    input: Payload
    actual: Payload | None
    expected: Payload
    fidelity: float | None = None
    message: str = ""

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "status": self.status,
            "input": _encode(self.input),
            "actual": None if self.actual is None else _encode(self.actual),
            "expected_output": _encode(self.expected),
        }
        if self.fidelity is not None:
            out["fidelity"] = self.fidelity
        if self.message:
            out["message"] = self.message
        return out


@dataclass
class TestReport:
    mode: str
    cases: list[CaseResult] = field(default_factory=list)

    __test__ = False

    def count(self, status: Status) -> int:
        return sum(1 for c in self.cases if c.status == status)

    @property
    def passed(self) -> bool:
        return all(c.status == "PASS" for c in self.cases)

    @property
    def failing(self) -> list[str]:
        return [c.name for c in self.cases if c.status != "PASS"]

    def summary(self) -> dict[str, int]:
        return {"total": len(self.cases), "passed": self.count("PASS"),
                "failed": self.count("FAIL"), "errors": self.count("ERROR")}

    def render(self) -> str:
        blocks = []
        for c in self.cases:
            lines = [
                f"Testing {c.name}:",
                f"Result:  {c.status}",
                f"Input:  {render_payload(c.input)}",
                f"Output:  {render_payload(c.actual)}",
                f"Expected Output:  {render_payload(c.expected)}",
            ]
            if c.fidelity is not None:
                lines.append(f"Fidelity:  {c.fidelity:.6f}")
            if c.message:
                lines.append(f"Note:  {c.message}")
            blocks.append("\n".join(lines))
        s = self.summary()
        blocks.append(f"{s['total']} tests: {s['passed']} passed, {s['failed']} failed, "
                      f"{s['errors']} errors")
        return "\n\n".join(blocks) + "\n"

    def to_json(self) -> dict:
        return {"mode": self.mode, "cases": [c.to_json() for c in self.cases],
                "summary": self.summary(), "passed": self.passed}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _as_case(case) -> TestCase:
    if isinstance(case, TestCase):
        return case
    inp, out = case["input"], case["expected_output"]
    if inp and isinstance(inp[0], (complex, float)) or isinstance(inp, np.ndarray):
        inp, out = np.asarray(inp, dtype=complex), np.asarray(out, dtype=complex)
    return TestCase(case["name"], inp, out)


def _state_payload(value: Payload, n: int) -> np.ndarray | None:
    if isinstance(value, np.ndarray):
        return value
    if len(value) != n:
        return None
    return basis_state(n, list(value))


def p_class_tester(circuit: Circuit, cases: Sequence[TestCase | dict]) -> TestReport:
    """Run classical-bit cases: one exact run per case, outputs read back as bits."""
    n = circuit.num_qubits
    report = TestReport("pclass")
    for raw in cases:
        case = _as_case(raw)
        if not case.classical or len(case.input) != n or len(case.expected_output) != n:
            report.cases.append(CaseResult(case.name, "ERROR", case.input, None, case.expected_output,
                                           message=f"expected {n}-bit input and output lists"))
            continue
        psi = run(circuit, list(case.input))
        top = int(np.argmax(np.abs(psi)))
        if abs(abs(psi[top]) ** 2 - 1) > BASIS_TOL:
            report.cases.append(CaseResult(
                case.name, "ERROR", case.input, psi, case.expected_output,
                message="block is not amplitude-permutation on this input"))
            continue
        bits = index_bits(top, n)
        status = "PASS" if bits == list(case.expected_output) else "FAIL"
        report.cases.append(CaseResult(case.name, status, case.input, bits, case.expected_output))
    return report


def f_quant_tester(circuit: Circuit, cases: Sequence[TestCase | dict], epsilon: float = 1e-4, *,
                   shots: int | None = None, seed: int = 0, z: float = 3.0) -> TestReport:
    """Run statevector cases; PASS when fidelity(actual, expected) >= 1 - epsilon.

    With ``shots`` the fidelity is estimated by a sampled swap test and a
    case passes when ``s + z * stderr >= 1 - epsilon``.
    """
    from .swap import swap_test_states

    dim = 1 << circuit.num_qubits
    report = TestReport("fquant" if shots is None else f"fquant-shots({shots})")
    for i, raw in enumerate(cases):
        case = _as_case(raw)
        inp = _state_payload(case.input, circuit.num_qubits)
        exp = _state_payload(case.expected_output, circuit.num_qubits)
        if inp is None or exp is None or inp.size != dim or exp.size != dim:
            report.cases.append(CaseResult(case.name, "ERROR", case.input, None, case.expected_output,
                                           message=f"dimension mismatch: circuit needs length {dim}"))
            continue
        actual = run(circuit, inp)
        if shots is None:
            fid = fidelity(actual, exp)
            ok = fid >= 1 - epsilon
        else:
            res = swap_test_states(actual, exp, shots, derive_seed(seed, i))
            fid = res.s
            ok = res.s + z * res.stderr >= 1 - epsilon
        report.cases.append(CaseResult(case.name, "PASS" if ok else "FAIL", inp, actual, exp, fid))
    return report


@dataclass(frozen=True)
class EquivalenceResult:
    p_all_zero: float
    passed: bool
    mode: str
    shots: int | None = None
    seed: int | None = None
    epsilon: float = 1e-6


def equivalence_test(dut: Circuit, tv: Circuit | None, eo: Circuit, *, shots: int | None = None,
                     seed: int = 0, epsilon: float = 1e-6, z: float = 3.0) -> EquivalenceResult:
    """Run tv, then dut, then the inverse of eo on |0...0> and check for |0...0>.

    ``eo`` is the full expected-output preparation: when the dut is fed by a
    test-vector circuit, eo must include that preparation too.
    """
    if tv is None:
        tv = dut.empty_like()
    if not dut.num_qubits == tv.num_qubits == eo.num_qubits:
        raise CircuitError("dut, tv and eo must act on the same number of qubits")
    check = compose(compose(tv, dut), inverse(eo))
    if shots is None:
        psi = run(check)
        p0 = float(abs(psi[0]) ** 2)
        return EquivalenceResult(p0, p0 >= 1 - epsilon, "exact", epsilon=epsilon)
    counts = sample(check, shots, seed)
    p0 = counts[bitstring(0, dut.num_qubits)] / shots
    ok = p0 + z * sigma(p0, shots) >= 1 - epsilon
    return EquivalenceResult(p0, ok, f"shots({shots})", shots, seed, epsilon)
