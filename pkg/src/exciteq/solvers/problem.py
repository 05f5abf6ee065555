"""Everything a solver needs about one molecule, computed once."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..chem import (
    MolecularIntegrals,
    QubitHamiltonian,
    build_hamiltonian,
    fci_solve,
    hf_energy,
    hf_occupation,
    load_fixture,
    occupation_to_index,
    orbital_energies,
)


@dataclass
class Problem:
    ham: QubitHamiltonian
    n_electrons: int
    occupied: tuple[int, ...]
    eps: np.ndarray
    hf_energy: float
    fci_energy: float | None = None

    @property
    def nq(self) -> int:
        return self.ham.nq

    @property
    def reference(self) -> int:
        return occupation_to_index(self.occupied)

    @classmethod
    def from_integrals(cls, ints: MolecularIntegrals, occupied=None, with_fci: bool = False,
                       sz: float | None = None) -> Problem:
        occ = tuple(hf_occupation(ints) if occupied is None else sorted(occupied))
        ham = build_hamiltonian(ints)
        if sz is None:
            sz = (sum(1 for q in occ if q % 2 == 0) - sum(1 for q in occ if q % 2 == 1)) / 2.0
        fci = fci_solve(ham, len(occ), sz)[0] if with_fci else None
        return cls(ham, len(occ), occ, orbital_energies(ints, occ), hf_energy(ints, occ), fci)

    @classmethod
    def from_fixture(cls, name: str, with_fci: bool = True) -> Problem:
        ints, _meta = load_fixture(name)
        return cls.from_integrals(ints, with_fci=with_fci)
