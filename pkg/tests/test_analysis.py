import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from strategies import AP_KINDS, PM_KINDS, circuits
from qforge.analysis import (Category, categorize, hslice, is_diagonal, is_monomial, is_permutation,
                             verify_recomposition, vslice)
from qforge.ir import Circuit, CircuitError, GateKind, compose, ops_equal, strip_breakbarriers
from qforge.library import diffusion, full_adder, ghz, grover, grover_oracle, qft
from qforge.sim import fidelity, run, unitary_of


def test_grover_standalone_slices():
    g = grover(3, 5)
    slices = vslice(g)
    assert len(slices) == 3
    assert slices.cut_positions == [3, 9]
    assert [s.name for s in slices] == ["grover3.slice1", "grover3.slice2", "grover3.slice3"]
    assert all(op.kind is GateKind.H for op in slices[0])
    joined = [op for s in slices for op in s]
    assert ops_equal(joined, strip_breakbarriers(g))


def test_grover_accumulated_slices():
    g = grover(3, 5)
    acc = vslice(g, "accumulated")
    assert ops_equal(acc[-1], strip_breakbarriers(g))
    assert fidelity(run(acc[-1]), run(strip_breakbarriers(g))) == pytest.approx(1)
    seg = [len(s) for s in vslice(g)]
    assert [len(s) for s in acc] == [seg[0], seg[0] + seg[1], sum(seg)]


def test_no_breakbarrier_single_slice():
    c = full_adder()
    (only,) = vslice(c).slices
    assert ops_equal(only, c)


def test_barrier_does_not_cut():
    c = Circuit(2).h(0).barrier().x(1)
    assert len(vslice(c)) == 1


def test_bad_mode():
    with pytest.raises(ValueError):
        vslice(Circuit(1), "sideways")


def test_slice_spans_survive():
    g = grover(3, 5)
    assert vslice(g)[1].ops[0].span.origin == "oracle"


def test_hslice_removes_idle_wire():
    c = Circuit(4).h(0).cx(0, 1).barrier(0, 1, 2, 3).cx(1, 2)
    red = hslice(c)
    assert red.removed_qubits == [3] and red.kept_qubits == [0, 1, 2]
    assert red.reduced.num_qubits == 3


def test_hslice_full_use_is_identity():
    c = full_adder()
    red = hslice(c)
    assert red.removed_qubits == [] and red.reduced == c


def test_hslice_drops_empty_registers():
    c = Circuit(qregs=[("a", 2), ("b", 2)]).h(0).cx(0, 1)
    assert hslice(c).reduced.qregs == (("a", 2),)


def test_hslice_all_idle_keeps_one_wire():
    red = hslice(Circuit(3))
    assert red.reduced.num_qubits == 1 and red.removed_qubits == [1, 2]


def test_verify_recomposition():
    g = grover(3, 5)
    assert verify_recomposition(vslice(g), g, 1e-9)
    broken = vslice(g)
    broken.slices[1].x(0)
    assert not verify_recomposition(broken, g, 1e-9)
    assert verify_recomposition(vslice(full_adder()), full_adder())
    with pytest.raises(ValueError):
        verify_recomposition(vslice(g, "accumulated"), g)


@st.composite
def idle_wire_circuits(draw):
    n = draw(st.integers(4, 6))
    idle = draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 2))
    active = [q for q in range(n) if q not in idle]
    inner = draw(circuits(max_qubits=len(active), min_qubits=len(active), barriers=False))
    c = Circuit(n, name="padded")
    for q in active:
        c.h(q)
    c.extend(inner, active)
    return c, sorted(idle)


@settings(max_examples=20, deadline=None)
@given(idle_wire_circuits(), st.integers(0, 2**32 - 1))
def test_hslice_embedding_identity(case, seed):
    c, idle = case
    red = hslice(c)
    assert red.removed_qubits == idle
    assert red.reduced.num_qubits == c.num_qubits - len(idle)
    rng = np.random.default_rng(seed)
    k = red.reduced.num_qubits
    psi = rng.normal(size=1 << k) + 1j * rng.normal(size=1 << k)
    psi /= np.linalg.norm(psi)
    reduced_out = run(red.reduced, psi)
    full_out = run(c, red.embed(psi))
    assert np.allclose(red.embed(reduced_out), full_out, atol=1e-10)
    assert np.allclose(red.restrict(full_out), reduced_out, atol=1e-10)


# -- categorization ---------------------------------------------------------


@pytest.mark.parametrize("circuit, verdict", [
    (Circuit(2).x(0), Category.AP),
    (Circuit(2).t(0), Category.PM),
    (full_adder(), Category.AP),
    (Circuit(3).t(0).t(1).t(2), Category.PM),
    (grover_oracle(3, 5), Category.PM),
    (qft(3), Category.AR),
    (ghz(3), Category.AR),
    (Circuit(2), Category.AP),
])
def test_category_examples(circuit, verdict):
    assert categorize(circuit).verdict is verdict


def test_grover_iterator_is_ar():
    iterator = compose(grover_oracle(3, 5), diffusion(3))
    cat = categorize(iterator)
    assert cat.verdict is Category.AR and cat.method == "unitary"


def test_mixed_ap_pm_resolved_by_unitary():
    cat = categorize(Circuit(1).x(0).z(0))
    assert cat.verdict is Category.AR and cat.monomial and cat.method == "unitary"
    cat = categorize(Circuit(1).h(0).x(0).h(0))
    assert cat.verdict is Category.PM and cat.method == "unitary"
    cat = categorize(Circuit(1).h(0).z(0).h(0))
    assert cat.verdict is Category.AP and cat.method == "unitary"


def test_global_phase_permutation_is_ap():
    # Y = i X Z: monomial with phases i and -i, not a global phase
    assert categorize(Circuit(1).y(0)).monomial
    # RX(pi) = -i X: permutation up to a global phase
    cat = categorize(Circuit(1).rx(np.pi, 0))
    assert cat.verdict is Category.AP


def test_cap_falls_back_to_gate_set():
    big = Circuit(4).h(0).x(1)
    cat = categorize(big, max_unitary_qubits=3)
    assert cat.verdict is Category.AR and cat.method == "gate-set" and "unverified" in cat.notes[0]
    mixed = Circuit(4).x(0).t(1)
    assert "mixed" in categorize(mixed, max_unitary_qubits=3).notes[0]


def test_measurement_rejected():
    with pytest.raises(CircuitError):
        categorize(Circuit(1, 1).measure(0, 0))


def test_matrix_predicates():
    x = np.array([[0, 1], [1, 0]])
    assert is_permutation(x) and is_monomial(x) and not is_diagonal(x)
    assert is_permutation(1j * x) and not is_permutation(1j * x, up_to_global_phase=False)
    assert not is_permutation(np.array([[0, 1], [-1, 0]]))
    assert not is_monomial(np.ones((2, 2)) / np.sqrt(2))


@settings(max_examples=40, deadline=None)
@given(circuits(max_qubits=5))
def test_unitary_verdicts_satisfy_matrix_invariants(c):
    cat = categorize(c, force_unitary=True)
    u = unitary_of(c)
    if cat.verdict is Category.PM:
        assert np.allclose(u, np.diag(np.diag(u)), atol=1e-9)
    elif cat.verdict is Category.AP:
        nz = u[abs(u) > 1e-9]
        assert len(nz) == len(u) and np.allclose(nz, nz[0], atol=1e-9) and np.allclose(abs(nz), 1)
    else:
        assert not (is_diagonal(u) or is_permutation(u))


@settings(max_examples=40, deadline=None)
@given(circuits(max_qubits=6, kinds=AP_KINDS, barriers=False))
def test_ap_gate_circuits_give_exact_permutations(c):
    u = unitary_of(c)
    assert np.all((abs(u) < 1e-10) | (abs(u - 1) < 1e-10))
    assert np.all(abs(u).sum(axis=0).round(10) == 1)
    assert categorize(c).verdict is Category.AP


@settings(max_examples=30, deadline=None)
@given(circuits(max_qubits=5, kinds=PM_KINDS, barriers=False))
def test_pm_gate_circuits_are_diagonal(c):
    assume(len(c) > 0)
    assert is_diagonal(unitary_of(c))
    assert categorize(c).verdict is Category.PM
