import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from qforge.ir import CircuitError, GateKind, count_ops
from qforge.library import (FULL_ADDER_CASES, PeriodicStateSpec, SubroutineSpec, build_subroutine,
                            cluster_1d, dicke, diffusion, full_adder, generate_test_cases, ghz,
                            grover_oracle, make_periodic_state, product_state, qft, qpe, w_state)
from qforge.sim import basis_index, basis_state, index_bits, probabilities, run, unitary_of

SQ = 1 / math.sqrt(2)


def test_ghz3_state():
    want = np.zeros(8)
    want[[0, 7]] = SQ
    assert np.allclose(run(ghz(3)), want)


@pytest.mark.parametrize("n", range(1, 9))
def test_qft_gate_counts(n):
    stats = count_ops(qft(n))
    assert stats.get("h") == n and stats.get("cp") == n * (n - 1) // 2 and stats.get("swap") == n // 2


@pytest.mark.parametrize("n", range(1, 7))
def test_qft_is_dft(n):
    assert np.allclose(unitary_of(qft(n)), oracles.dft_matrix(n), atol=1e-9)


def test_full_adder_sum_and_carry_case():
    out = run(full_adder(), [1, 0, 1, 0])
    assert index_bits(int(np.argmax(abs(out))), 4) == [1, 0, 0, 1]


@pytest.mark.parametrize("index", range(16))
def test_full_adder_truth_table(index):
    bits = index_bits(index, 4)
    out = run(full_adder(), bits)
    assert out[basis_index(oracles.full_adder_truth(*bits))] == pytest.approx(1)


def test_bundled_adder_cases_agree_with_oracle():
    for case in FULL_ADDER_CASES:
        assert oracles.full_adder_truth(*case["input"]) == case["expected_output"]


def test_dicke_3_2_amplitudes():
    want = np.zeros(8)
    want[[3, 5, 6]] = 1 / math.sqrt(3)
    assert np.allclose(run(dicke(3, 2)), want, atol=1e-12)


@pytest.mark.parametrize("n, k", [(n, k) for n in range(1, 7) for k in range(1, n + 1)])
def test_dicke_support_is_uniform_weight_k(n, k):
    psi = run(dicke(n, k))
    for i, a in enumerate(psi):
        if oracles.hamming_weight(i) == k:
            assert a == pytest.approx(1 / math.sqrt(math.comb(n, k)), abs=1e-10)
        else:
            assert abs(a) < 1e-10


@pytest.mark.parametrize("n", range(2, 8))
def test_w_state_support(n):
    psi = run(w_state(n))
    for i, a in enumerate(psi):
        want = 1 / math.sqrt(n) if oracles.hamming_weight(i) == 1 else 0
        assert a == pytest.approx(want, abs=1e-10)


def test_cluster_state_signs():
    n = 4
    psi = run(cluster_1d(n))
    for i, a in enumerate(psi):
        b = index_bits(i, n)
        sign = (-1) ** sum(b[j] * b[j + 1] for j in range(n - 1))
        assert a == pytest.approx(sign / math.sqrt(2 ** n))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_diffusion_is_reflection_about_uniform(n):
    u = unitary_of(diffusion(n))
    dim = 1 << n
    block = u[:dim, :dim]  # ancillas start and end in |0>
    s = np.full(dim, 1 / math.sqrt(dim))
    want = 2 * np.outer(s, s) - np.eye(dim)
    assert oracles.equal_up_to_phase(block, want)
    assert np.allclose(abs(u[dim:, :dim]), 0, atol=1e-10)


@pytest.mark.parametrize("n, marked", [(2, 1), (3, 5), (4, 9), (5, 30)])
def test_oracle_flips_marked_only(n, marked):
    dim = 1 << n
    d = np.diag(unitary_of(grover_oracle(n, marked)))[:dim]
    want = np.ones(dim)
    want[marked] = -1
    assert np.allclose(d, want)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2 ** n - 1))))
def test_qpe_exact_phase(case):
    n, m = case
    probs = probabilities(run(qpe(n, m / 2 ** n)))
    counting = probs.reshape(2, 2 ** n).sum(axis=0)
    assert counting[m] >= 0.99


def test_periodic_state_examples():
    psi = make_periodic_state(3, 2, 1)
    assert np.allclose(psi, [0, .5, 0, .5, 0, .5, 0, .5])
    assert np.allclose(make_periodic_state(3, 1, 0), np.full(8, 1 / math.sqrt(8)))
    assert np.flatnonzero(make_periodic_state(PeriodicStateSpec(3, 4, 2))).tolist() == [2, 6]
    assert np.allclose(make_periodic_state(3, 4, 2)[[2, 6]], SQ)
    with pytest.raises(ValueError):
        make_periodic_state(3, 2, 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, 2 ** n)))
       .flatmap(lambda t: st.tuples(st.just(t[0]), st.just(t[1]), st.integers(0, t[1] - 1))))
def test_periodic_support_property(case):
    n, r, l = case
    psi = make_periodic_state(n, r, l)
    support = [k for k in range(2 ** n) if (k - l) % r == 0]
    assert np.flatnonzero(psi).tolist() == support
    assert np.allclose(psi[support], 1 / math.sqrt(len(support)))


@pytest.mark.parametrize("kwargs", [
    dict(kind="dicke", n=3, k=0), dict(kind="dicke", n=3, k=4), dict(kind="w_state", n=1),
    dict(kind="qft", n=0), dict(kind="toffoli"),
])
def test_invalid_specs(kwargs):
    with pytest.raises(CircuitError):
        SubroutineSpec(**kwargs)


def test_build_subroutine_dispatch():
    assert build_subroutine(SubroutineSpec("full_adder")) == full_adder()
    assert build_subroutine(SubroutineSpec("qft", 3)) == qft(3)
    assert GateKind.Measure not in {op.kind for op in build_subroutine(SubroutineSpec("qpe", 3, phase=0.25))}


def test_generated_case_names_and_inputs():
    cases = generate_test_cases(SubroutineSpec("ghz", 2))
    assert [c.name for c in cases] == ["test 0", "test 1", "test +", "test -", "test i", "test -i"]
    assert np.allclose(cases[0].input, basis_state(2, 0))
    assert np.allclose(cases[1].input, basis_state(2, 3))
    assert np.allclose(cases[4].input, np.kron([SQ, 1j * SQ], [SQ, 1j * SQ]))


def test_generated_w2_and_dicke_test0():
    w = generate_test_cases(SubroutineSpec("w_state", 2))[0].expected_output
    assert np.allclose(w, [0, 0.707, 0.707, 0], atol=5e-3)
    d = generate_test_cases(SubroutineSpec("dicke", 3, 2))[0].expected_output
    want = np.zeros(8)
    want[[3, 5, 6]] = 0.577
    assert np.allclose(d, want, atol=5e-3)


def test_ghz1_test0():
    assert np.allclose(generate_test_cases(SubroutineSpec("ghz", 1))[0].expected_output, [0.707, 0.707], atol=1e-3)


@pytest.mark.parametrize("spec", [SubroutineSpec("w_state", 3), SubroutineSpec("dicke", 4, 2),
                                  SubroutineSpec("qft", 3), SubroutineSpec("diffusion", 4),
                                  SubroutineSpec("cluster_1d", 3), SubroutineSpec("full_adder")])
def test_generated_outputs_normalized_and_self_consistent(spec):
    circuit = build_subroutine(spec)
    for case in generate_test_cases(spec):
        assert np.linalg.norm(case.expected_output) == pytest.approx(1, abs=1e-10)
        assert np.allclose(run(circuit, case.input), case.expected_output)


def test_product_state_labels():
    assert np.allclose(product_state("-", 1), [SQ, -SQ])
    assert np.allclose(product_state("-i", 1), [SQ, -1j * SQ])
    with pytest.raises(KeyError):
        product_state("x", 1)
