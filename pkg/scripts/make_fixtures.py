"""Regenerate the bundled FCIDUMP fixtures and their metadata sidecars.

Requires pyscf (development only; the package itself never imports it).
Run from the repository root:  python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from pyscf import ao2mo, fci, gto, scf

from exciteq.chem import MolecularIntegrals, serialize_fcidump

OUT = Path(__file__).resolve().parents[1] / "src" / "exciteq" / "data"

SYSTEMS = {
    "h2_0.735": (2, 0.735),
    "h4_1.5": (4, 1.5),
    "h6_1.0": (6, 1.0),
    "h6_2.0": (6, 2.0),
}


def chain(n_atoms: int, spacing: float) -> str:
    return "; ".join(f"H 0 0 {i * spacing:.6f}" for i in range(n_atoms))


def build(stem: str, n_atoms: int, spacing: float) -> None:
    geometry = chain(n_atoms, spacing)
    mol = gto.M(atom=geometry, basis="sto-6g", unit="Angstrom", symmetry=False, verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    if not mf.converged:
        raise RuntimeError(f"RHF did not converge for {stem}")
    c = mf.mo_coeff
    norb = c.shape[1]
    h = c.T @ mf.get_hcore() @ c
    g = ao2mo.restore(1, ao2mo.kernel(mol, c), norb)
    ints = MolecularIntegrals(norb, mol.nelectron, mol.energy_nuc(), h, g)
    e_fci, _ = fci.FCI(mf).kernel()
    (OUT / f"{stem}.FCIDUMP").write_text(serialize_fcidump(ints, tol=1e-14))
    meta = {
        "hf": float(mf.e_tot),
        "fci": float(e_fci),
        "geometry": geometry,
        "basis": "STO-6G",
        "unit": "Angstrom",
        "orbital_energies": [float(e) for e in np.asarray(mf.mo_energy)],
    }
    (OUT / f"{stem}.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"{stem}: norb={norb} hf={mf.e_tot:.10f} fci={e_fci:.10f}")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for stem, (n, r) in SYSTEMS.items():
        build(stem, n, r)
