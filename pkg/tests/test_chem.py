from __future__ import annotations

import numpy as np
import pytest

from exciteq.chem import (
    FcidumpError,
    build_hamiltonian,
    denominator,
    fci_solve,
    fixture_names,
    hf_energy,
    hf_occupation,
    load_fixture,
    mp_floor,
    number_operator,
    occupation_to_index,
    orbital_energies,
    parse_fcidump,
    sector_indices,
    serialize_fcidump,
    sz_operator,
)
from exciteq.fermion import Excitation
from exciteq.pauli import PauliSum

ONE_ORBITAL = """&FCI NORB=1,NELEC=2,MS2=0,
 ORBSYM=1,
 ISYM=1,
&END
 0.7 1 1 1 1
 -1.25 1 1 0 0
 0.3 0 0 0 0
"""


def test_one_orbital_hamiltonian():
    ints = parse_fcidump(ONE_ORBITAL)
    assert (ints.n_spatial, ints.n_electrons, ints.ms2) == (1, 2, 0)
    ham = build_hamiltonian(ints)
    diag = ham.matrix.toarray()
    # H = h (n_a + n_b) + U n_a n_b + E_nuc
    np.testing.assert_allclose(np.diag(diag).real, [0.3, 0.3 - 1.25, 0.3 - 1.25, 0.3 - 2.5 + 0.7], atol=1e-14)
    assert np.count_nonzero(diag - np.diag(np.diag(diag))) == 0


def test_fortran_exponent_and_slash_terminator():
    ints = parse_fcidump("&FCI NORB=1,NELEC=1 /\n 1.5D-01 1 1 0 0\n")
    assert ints.h[0, 0] == 0.15


@pytest.mark.parametrize("text, message", [
    ("NORB=1 NELEC=2\n0.1 1 1 0 0\n", "header"),
    ("&FCI NORB=1,NELEC=2 &END\n0.1 2 1 0 0\n", "range"),
    ("&FCI NORB=1,NELEC=2 &END\n0.1 1 1 0\n", "expected"),
    ("&FCI NORB=2,NELEC=2 &END\n0.1 1 2 0 0\n0.2 2 1 0 0\n", "inconsistent"),
    ("&FCI NORB=2,NELEC=2 &END\n0.1 1 2 2 2\n0.2 2 1 2 2\n", "inconsistent"),
    ("&FCI NORB=1,NELEC=3 &END\n", "invalid"),
    ("&FCI NORB=1,NELEC=2 &END\n0.1 1 0 1 0\n", "mixed"),
])
def test_malformed_fcidump(text, message):
    with pytest.raises(FcidumpError, match=message):
        parse_fcidump(text)


@pytest.mark.parametrize("name", fixture_names())
def test_fixture_round_trip(name):
    ints, _ = load_fixture(name)
    again = parse_fcidump(serialize_fcidump(ints))
    assert again.e_nuc == ints.e_nuc
    np.testing.assert_array_equal(again.h, ints.h)
    np.testing.assert_array_equal(again.g, ints.g)
    ints.check_symmetry()


@pytest.mark.parametrize("name", ["h2", "h4"])
def test_fixture_energies(name):
    ints, meta = load_fixture(name)
    occ = hf_occupation(ints)
    assert abs(hf_energy(ints) - meta["hf"]) < 1e-9
    ham = build_hamiltonian(ints)
    e_fci, psi = fci_solve(ham, ints.n_electrons)
    assert abs(e_fci - meta["fci"]) < 1e-9
    assert e_fci <= hf_energy(ints)
    assert abs(psi.norm - 1) < 1e-12
    # <HF|H|HF> equals the closed-form HF energy
    i = occupation_to_index(occ)
    assert abs(ham.matrix[i, i].real - hf_energy(ints)) < 1e-12
    eps = orbital_energies(ints)
    np.testing.assert_allclose(eps[::2], meta["orbital_energies"], atol=1e-8)
    np.testing.assert_allclose(eps[::2], eps[1::2], atol=1e-12)


def test_stretched_h6_energies(h6_stretched):
    _, meta = load_fixture("h6-stretched")
    assert abs(h6_stretched.hf_energy - meta["hf"]) < 1e-9
    assert abs(h6_stretched.fci_energy - meta["fci"]) < 1e-9


def test_hamiltonian_symmetries():
    ints, _ = load_fixture("h4")
    ham = build_hamiltonian(ints)
    assert ham.paulis.is_hermitian()
    h = ham.matrix
    for op in (number_operator(ints.nq), sz_operator(ints.nq)):
        m = op.to_sparse(ints.nq)
        assert abs(h @ m - m @ h).max() < 1e-12


def test_number_and_sz_operators():
    n = number_operator(4).to_matrix(4)
    sz = sz_operator(4).to_matrix(4)
    for b in range(16):
        assert n[b, b] == bin(b).count("1")
        alpha = bin(b & 0b0101).count("1")
        beta = bin(b & 0b1010).count("1")
        assert sz[b, b] == (alpha - beta) / 2


def test_fci_on_toy_operators():
    e, psi = fci_solve(PauliSum.parse("(1.0) Z0"), 1, sz=None, nq=1)
    assert e == -1.0
    assert abs(abs(psi.amplitudes[1]) - 1) < 1e-15
    with pytest.raises(ValueError):
        fci_solve(PauliSum.parse("(1.0) Z0"), 3, nq=2)


def test_sector_indices():
    idx = sector_indices(4, 2, 0.0)
    assert sorted(idx.tolist()) == [0b0011, 0b0110, 0b1001, 0b1100]
    assert len(sector_indices(4, 2, None)) == 6


def test_denominator_and_floor():
    eps = np.array([-1.0, -1.0, 0.5, 0.5])
    assert denominator(Excitation((0,), (2,)), eps) == -1.5
    assert mp_floor(-1e-9) == (-1e-6, True)
    assert mp_floor(0.0) == (1e-6, True)
    assert mp_floor(0.3) == (0.3, False)


def test_odd_electrons_need_explicit_occupation():
    ints = parse_fcidump("&FCI NORB=1,NELEC=1 &END\n-1.0 1 1 0 0\n")
    with pytest.raises(ValueError):
        hf_occupation(ints)
    assert hf_energy(ints, occupied=[0]) == -1.0
