import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from strategies import circuits
from qforge.ir import Circuit, strip_breakbarriers
from qforge.library import full_adder, ghz, make_periodic_state, qft
from qforge.sim import (SimulationError, basis_state, bitstring, derive_seed, fidelity, probabilities, qsphere,
                        qsphere_json, run, sample, unitary_of)

SQ = 1 / math.sqrt(2)


def test_bell_state():
    psi = run(Circuit(2).h(0).cx(0, 1), [1, 0, 0, 0])
    assert np.allclose(psi, [SQ, 0, 0, SQ])


def test_x_on_qubit_zero_is_index_one():
    psi = run(Circuit(2).x(0))
    assert np.argmax(abs(psi)) == 1


def test_bit_list_input_is_little_endian():
    psi = run(Circuit(3), [1, 0, 0])
    assert psi[1] == 1
    assert bitstring(1, 3) == "001"


def test_qft_on_periodic_state_matches_dft_oracle():
    psi = make_periodic_state(3, 2, 1)
    want = oracles.dft_matrix(3) @ psi
    assert np.allclose(want, np.array([1, 0, 0, 0, -1, 0, 0, 0]) * SQ, atol=1e-12)
    assert np.allclose(run(qft(3), psi), want, atol=1e-9)


def test_run_rejects_bad_inputs():
    with pytest.raises(SimulationError, match="dimension"):
        run(Circuit(2), np.ones(8) / math.sqrt(8))
    with pytest.raises(SimulationError):
        run(Circuit(2), [0, 2])
    with pytest.raises(SimulationError, match="measurement"):
        run(Circuit(1, 1).measure(0, 0))


def test_run_does_not_mutate_input():
    psi = basis_state(2, 0)
    run(Circuit(2).x(0), psi)
    assert psi[0] == 1


def test_sample_deterministic_state():
    counts = sample(Circuit(3), 100, seed=1)
    assert counts.counts == {"000": 100}


def test_sample_ghz_binomial_bound():
    counts = sample(ghz(3), 10_000, seed=7)
    sigma = math.sqrt(0.25 / 10_000)
    assert abs(counts.frequency("000") - 0.5) <= 3 * sigma
    assert set(counts.counts) == {"000", "111"}


def test_sample_same_seed_same_counts():
    assert sample(ghz(4), 5000, seed=11) == sample(ghz(4), 5000, seed=11)
    assert sample(ghz(4), 5000, seed=11) != sample(ghz(4), 5000, seed=12)


def test_sample_measured_clbits_order():
    c = Circuit(3, 2).x(2).measure(2, 0).measure(0, 1)
    assert sample(c, 10).counts == {"01": 10}


def test_sample_rejects_zero_shots():
    with pytest.raises(SimulationError):
        sample(Circuit(1), 0)


def test_x_unitary_matches_two_qubit_permutation():
    u = unitary_of(Circuit(2).x(0))
    want = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.array_equal(u, want)


def test_empty_circuit_unitary_is_identity():
    assert np.array_equal(unitary_of(Circuit(3)), np.eye(8))


def test_full_adder_unitary_is_permutation():
    u = unitary_of(full_adder())
    assert np.all(np.sum(abs(u) > 1e-9, axis=0) == 1)
    assert np.all(np.sum(abs(u) > 1e-9, axis=1) == 1)
    assert np.allclose(u[abs(u) > 1e-9], 1)
    for i in range(16):
        bits = [(i >> k) & 1 for k in range(4)]
        out = oracles.full_adder_truth(*bits)
        assert u[sum(b << k for k, b in enumerate(out)), i] == 1


def test_unitary_cap():
    with pytest.raises(SimulationError):
        unitary_of(Circuit(5), max_qubits=4)


def test_fidelity_examples():
    plus = np.array([SQ, SQ])
    shifted = np.array([SQ, SQ * np.exp(1j * math.pi / 3)])
    assert fidelity(plus, plus) == pytest.approx(1)
    assert fidelity(np.array([1, 0]), np.array([0, 1])) == 0
    assert fidelity(plus, shifted) == pytest.approx(0.75, abs=1e-12)
    with pytest.raises(SimulationError):
        fidelity(plus, np.ones(4) / 2)


def test_qsphere_ghz():
    nodes = qsphere(run(ghz(3)))
    assert [(n.index, n.z) for n in nodes] == [(0, 1.0), (7, -1.0)]
    assert all(n.probability == pytest.approx(0.5) and n.phase == pytest.approx(0) for n in nodes)


def test_qsphere_ground_state():
    (node,) = qsphere(basis_state(3, 0))
    assert node.z == 1 and node.probability == 1


def test_qsphere_signed_uniform_state():
    c = Circuit(3)
    for q in range(3):
        c.h(q).z(q)
    nodes = qsphere(run(c))
    assert len(nodes) == 8
    flipped = [n.index for n in nodes if n.phase == pytest.approx(math.pi)]
    assert flipped == [1, 2, 4, 7]
    ring = [n.longitude for n in nodes if n.weight == 1]
    assert ring == pytest.approx([0, 2 * math.pi / 3, 4 * math.pi / 3])
    doc = json.loads(qsphere_json(run(c)))
    assert set(doc[0]) == {"index", "probability", "phase", "weight", "z", "longitude"}


def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(0, 1) == derive_seed(0, 1)
    assert len({derive_seed(0, i) for i in range(50)}) == 50


@st.composite
def circuit_and_state(draw, max_qubits=4):
    c = draw(circuits(max_qubits=max_qubits))
    v = np.array(draw(st.lists(st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False),
                               min_size=1 << c.num_qubits, max_size=1 << c.num_qubits)))
    if np.linalg.norm(v) < 1e-3:
        v = basis_state(c.num_qubits, 0)
    return c, v / np.linalg.norm(v)


@settings(max_examples=60, deadline=None)
@given(circuit_and_state())
def test_norm_preserved(pair):
    c, psi = pair
    assert np.linalg.norm(run(c, psi)) == pytest.approx(1, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(circuit_and_state(max_qubits=3), circuit_and_state(max_qubits=3),
       st.complex_numbers(max_magnitude=2, allow_nan=False), st.complex_numbers(max_magnitude=2, allow_nan=False))
def test_linearity(p1, p2, a, b):
    c, psi = p1
    _, phi = p2
    if phi.size != psi.size:
        phi = np.roll(psi, 1)
    lhs = run(c, a * psi + b * phi)
    rhs = a * run(c, psi) + b * run(c, phi)
    assert np.allclose(lhs, rhs, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(circuit_and_state(max_qubits=5))
def test_engine_matches_kronecker_oracle(pair):
    c, psi = pair
    u = oracles.circuit_unitary(c)
    assert np.allclose(u @ psi, run(c, psi), atol=1e-9)
    assert np.allclose(unitary_of(c), u, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(circuits(max_qubits=4))
def test_unitary_is_unitary(c):
    u = unitary_of(c)
    assert np.allclose(u.conj().T @ u, np.eye(len(u)), atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(circuits(max_qubits=4), st.integers(0, 2**32 - 1))
def test_sample_frequencies_within_five_sigma(c, seed):
    shots = 4000
    probs = probabilities(run(strip_breakbarriers(c)))
    counts = sample(c, shots, seed)
    assert sum(counts.counts.values()) == shots
    for i, p in enumerate(probs):
        sigma = math.sqrt(p * (1 - p) / shots)
        assert abs(counts.frequency(bitstring(i, c.num_qubits)) - p) <= 5 * sigma + 1e-12
