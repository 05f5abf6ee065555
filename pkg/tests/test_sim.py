from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given
from hypothesis import strategies as st

from exciteq.circuit import Circuit, cnot, cz, h, mcry, rx, ry, rz, x
from exciteq.fermion import Excitation
from exciteq.pauli import PauliSum, PauliTerm
from exciteq.sim import (
    MAX_QUBITS,
    SeriesDivergence,
    StateVector,
    apply_circuit,
    apply_gate,
    circuit_unitary,
    evolve_exact,
    expectation,
    mcry_matrix,
    prepare_determinant,
)
from exciteq.synth import synth_qeb


def random_hermitian_paulisum(nq: int, n_terms: int, rng) -> PauliSum:
    terms = []
    for _ in range(n_terms):
        terms.append(PauliTerm(rng.normal(), int(rng.integers(1 << nq)), int(rng.integers(1 << nq))))
    ps = PauliSum(terms)
    return (ps + ps.adjoint()) / 2


def test_prepare_determinant():
    psi = prepare_determinant("1100")
    assert psi.nq == 4
    assert np.flatnonzero(psi.amplitudes).tolist() == [0b0011]
    with pytest.raises(ValueError):
        prepare_determinant("1102")
    with pytest.raises(ValueError):
        prepare_determinant("10", nq=3)


def test_statevector_validation():
    with pytest.raises(ValueError):
        StateVector(np.ones(3))
    with pytest.raises(ValueError):
        StateVector.basis(0, MAX_QUBITS + 1)


def test_x_twice_is_identity():
    psi = prepare_determinant("101")
    once = apply_gate(psi, x(1))
    assert np.flatnonzero(once.amplitudes).tolist() == [0b111]
    np.testing.assert_allclose(apply_gate(once, x(1)).amplitudes, psi.amplitudes)


def test_known_gate_actions():
    plus = apply_gate(prepare_determinant("0"), h(0))
    np.testing.assert_allclose(plus.amplitudes, [1 / math.sqrt(2)] * 2)
    bell = apply_gate(plus.__class__(np.kron([1, 0], plus.amplitudes)), cnot(0, 1))
    np.testing.assert_allclose(bell.amplitudes, [1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2)], atol=1e-15)
    np.testing.assert_allclose(circuit_unitary(Circuit(1, [ry(0, math.pi)])), [[0, -1], [1, 0]], atol=1e-15)
    np.testing.assert_allclose(circuit_unitary(Circuit(2, [cz(0, 1)])), np.diag([1, 1, 1, -1]))


def test_qeb_quarter_turn_moves_electron():
    c = synth_qeb(Excitation((0,), (1,)), math.pi / 2)
    out = apply_circuit(prepare_determinant("10"), c)
    np.testing.assert_allclose(abs(out.amplitudes), [0, 0, 1, 0], atol=1e-14)


@given(st.lists(st.tuples(st.sampled_from(["rx", "ry", "rz", "h", "cnot"]),
                          st.permutations(range(3)), st.floats(-4, 4)), max_size=15))
def test_norm_preserved(ops):
    gates = []
    for kind, q, a in ops:
        gates.append(cnot(q[0], q[1]) if kind == "cnot" else h(q[0]) if kind == "h" else
                     {"rx": rx, "ry": ry, "rz": rz}[kind](q[0], a))
    rng = np.random.default_rng(len(ops))
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi = StateVector(v / np.linalg.norm(v))
    assert abs(apply_circuit(psi, Circuit(3, gates)).norm - 1) < 1e-12


def test_unnormalized_and_mcry_rejected():
    with pytest.raises(ValueError):
        apply_circuit(StateVector(np.array([1.0, 1.0])), Circuit(1, [h(0)]))
    with pytest.raises(ValueError):
        apply_circuit(prepare_determinant("00"), Circuit(2, [mcry(1, [(0, True)], 0.1)]))
    with pytest.raises(ValueError):
        circuit_unitary(Circuit(13))


def test_mcry_unitary_matches_oracle():
    g = mcry(1, [(0, True), (3, False)], 0.9)
    np.testing.assert_allclose(circuit_unitary(Circuit(4, [g]), allow_mcry=True), mcry_matrix(g, 4), atol=1e-15)


def test_expectation():
    z0 = PauliSum.parse("(1.0) Z0")
    assert expectation(prepare_determinant("00"), z0) == 1.0
    assert expectation(prepare_determinant("10"), z0) == -1.0
    with pytest.raises(ValueError):
        expectation(prepare_determinant("00"), PauliSum.parse("(1.0i) Z0"))


def test_evolve_matches_eigendecomposition(rng):
    op = random_hermitian_paulisum(6, 12, rng)
    m = op.to_matrix(6)
    v = rng.normal(size=64) + 1j * rng.normal(size=64)
    v /= np.linalg.norm(v)
    for tau in (1e-3, 0.1, 0.7):
        w, u = np.linalg.eigh(m)
        ref = u @ (np.exp(1j * tau * w) * (u.conj().T @ v))
        np.testing.assert_allclose(evolve_exact(v, op, tau).amplitudes, ref, atol=1e-11)
        np.testing.assert_allclose(evolve_exact(v, op, tau).amplitudes, sla.expm(1j * tau * m) @ v, atol=1e-11)


def test_evolve_additive_in_time(rng):
    op = random_hermitian_paulisum(4, 6, rng)
    v = StateVector.basis(3, 4)
    a = evolve_exact(evolve_exact(v, op, 0.2), op, 0.3)
    np.testing.assert_allclose(a.amplitudes, evolve_exact(v, op, 0.5).amplitudes, atol=1e-12)


def test_evolve_single_pauli():
    # exp(i t X) |0> = cos t |0> + i sin t |1>
    t = 0.37
    out = evolve_exact(prepare_determinant("0"), PauliSum.parse("(1.0) X0"), t)
    np.testing.assert_allclose(out.amplitudes, [math.cos(t), 1j * math.sin(t)], atol=1e-15)


def test_evolve_divergence():
    with pytest.raises(SeriesDivergence):
        evolve_exact(prepare_determinant("0"), PauliSum.parse("(1.0) X0"), 500.0, max_terms=20)
    with pytest.raises(ValueError):
        evolve_exact(prepare_determinant("0"), PauliSum.parse("(1.0) X0"), math.nan)


def test_global_phase_leaves_expectation_unchanged(rng):
    op = random_hermitian_paulisum(3, 5, rng)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    v /= np.linalg.norm(v)
    assert abs(expectation(v, op) - expectation(v * np.exp(0.8j), op)) < 1e-13
