from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from exciteq.pauli import PauliSum, PauliTerm, commutes, format_coefficient, multiply, parse_coefficient

NQ = 4
LETTER = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
}


def dense(term: PauliTerm, nq: int = NQ) -> np.ndarray:
    """Kronecker-product matrix with qubit 0 least significant."""
    out = np.array([[1.0 + 0j]])
    for q in range(nq):
        ch = dict(term.letters()).get(q, "I")
        out = np.kron(LETTER[ch], out)
    return term.coeff * out


masks = st.integers(0, (1 << NQ) - 1)
coeffs = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
terms = st.builds(PauliTerm, coeffs, masks, masks)


def test_letters_and_str():
    t = PauliTerm.from_letters("X0 Z2 Y5", -0.5j)
    assert str(t) == "(-0.5i) X0 Z2 Y5"
    assert PauliTerm.parse(str(t)) == t
    assert str(PauliTerm(1.0)) == "(1.0) I"


def test_known_products():
    x, y, z = (PauliTerm.from_letters(s) for s in ("X0", "Y0", "Z0"))
    assert multiply(x, y) == PauliTerm(1j, 0, 1)
    assert multiply(y, x) == PauliTerm(-1j, 0, 1)
    assert multiply(z, x) == PauliTerm(1j, 1, 1)
    assert multiply(x, x) == PauliTerm(1.0 + 0j, 0, 0)


@given(terms, terms)
def test_product_matches_dense(a, b):
    np.testing.assert_allclose(dense(multiply(a, b)), dense(a) @ dense(b), atol=1e-12)


@given(terms, terms)
def test_commutation_matches_dense(a, b):
    da, db = dense(PauliTerm(1, a.x, a.z)), dense(PauliTerm(1, b.x, b.z))
    assert commutes(a, b) == np.allclose(da @ db, db @ da)


@given(st.lists(terms, max_size=6))
def test_sum_matrix_and_apply(ts):
    ps = PauliSum(ts)
    expected = sum((dense(t) for t in ts), np.zeros((1 << NQ, 1 << NQ), dtype=complex))
    np.testing.assert_allclose(ps.to_matrix(NQ), expected, atol=1e-12)
    psi = np.arange(1 << NQ) * (1 + 0.5j)
    np.testing.assert_allclose(ps.apply(psi), expected @ psi, atol=1e-10)


@given(st.lists(terms, max_size=5), st.lists(terms, max_size=5))
def test_sum_product_and_commutator(a, b):
    A, B = PauliSum(a), PauliSum(b)
    np.testing.assert_allclose((A * B).to_matrix(NQ), A.to_matrix(NQ) @ B.to_matrix(NQ), atol=1e-10)
    ma, mb = A.to_matrix(NQ), B.to_matrix(NQ)
    np.testing.assert_allclose(A.commutator(B).to_matrix(NQ), ma @ mb - mb @ ma, atol=1e-10)


@given(st.lists(terms, max_size=5))
def test_adjoint_and_hermiticity(ts):
    A = PauliSum(ts)
    np.testing.assert_allclose(A.adjoint().to_matrix(NQ), A.to_matrix(NQ).conj().T, atol=1e-12)
    H = A + A.adjoint()
    assert H.is_hermitian()
    assert (A - A.adjoint()).is_antihermitian()


@given(st.lists(terms, max_size=5))
def test_text_round_trip(ts):
    A = PauliSum(ts)
    assert PauliSum.parse(str(A)) == A


def test_pruning_and_cancellation():
    a = PauliSum.parse("(0.5) X0\n(-0.5) X0\n(1e-20) Z1")
    assert len(a) == 0
    assert str(a) == "(0.0) I"


@pytest.mark.parametrize("c", [1.0, -0.25, 0.5j, -1e-3j, 0.1 + 0.2j, -3.5 - 1j])
def test_coefficient_format_round_trip(c):
    assert parse_coefficient(format_coefficient(c)) == c


def test_linear_algebra_ops():
    a = PauliSum.parse("(1.0) X0\n(2.0) Z1")
    b = PauliSum.parse("(1.0) X0")
    assert (a - b) == PauliSum.parse("(2.0) Z1")
    assert (2 * b).coefficient(1, 0) == 2.0
    assert (a / 2).coefficient(0, 2) == 1.0
    assert a.allclose(a + PauliSum.parse("(1e-14) Y3"))
