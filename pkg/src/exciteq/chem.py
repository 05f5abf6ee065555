"""Molecular Hamiltonians from FCIDUMP integrals, HF references and exact FCI.

Spin-orbital ``P = 2*p + s`` holds spatial orbital ``p`` with spin ``s``
(0 = alpha, 1 = beta), so alpha orbitals sit on even qubits.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np

from .fermion import jw_ladder
from .pauli import PauliSum, _I_POW, _phase_exponent
from .sim import MAX_QUBITS, StateVector

SYMMETRY_TOL = 1e-10
HAMILTONIAN_PRUNE = 1e-12

FIXTURES = {
    "h2": "h2_0.735",
    "h4": "h4_1.5",
    "h6": "h6_1.0",
    "h6-stretched": "h6_2.0",
}


class FcidumpError(ValueError):
    """Malformed or inconsistent FCIDUMP content."""


@dataclass
class MolecularIntegrals:
    n_spatial: int
    n_electrons: int
    e_nuc: float
    h: np.ndarray
    g: np.ndarray
    ms2: int = 0

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=np.float64)
        self.g = np.asarray(self.g, dtype=np.float64)
        n = self.n_spatial
        if self.h.shape != (n, n) or self.g.shape != (n, n, n, n):
            raise ValueError("integral arrays do not match the orbital count")

    @property
    def nq(self) -> int:
        return 2 * self.n_spatial

    def check_symmetry(self, tol: float = SYMMETRY_TOL) -> None:
        if np.abs(self.h - self.h.T).max(initial=0.0) > tol:
            raise FcidumpError("one-electron integrals are not symmetric")
        g = self.g
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if np.abs(g - g.transpose(perm)).max(initial=0.0) > tol:
                raise FcidumpError("two-electron integrals lack 8-fold symmetry")

    @cached_property
    def h_spin(self) -> np.ndarray:
        """One-electron integrals over spin-orbitals."""
        return np.kron(self.h, np.eye(2))

    @cached_property
    def v_spin(self) -> np.ndarray:
        """Antisymmetrised ``<PQ||RS>`` over spin-orbitals."""
        n = self.nq
        spin = np.arange(n) % 2
        spatial = np.arange(n) // 2
        # <PQ|RS> = (pr|qs) with spin(P)=spin(R), spin(Q)=spin(S)
        phys = self.g[np.ix_(spatial, spatial, spatial, spatial)].transpose(0, 2, 1, 3)
        same = spin[:, None] == spin[None, :]
        phys = phys * same[:, None, :, None] * same[None, :, None, :]
        return phys - phys.transpose(0, 1, 3, 2)


# -- FCIDUMP ------------------------------------------------------------------------

_HEADER_END = re.compile(r"&END|/", re.IGNORECASE)


def _header_int(header: str, key: str) -> int:
    m = re.search(rf"\b{key}\s*=\s*(-?\d+)", header, re.IGNORECASE)
    if m is None:
        raise FcidumpError(f"FCIDUMP header lacks {key}")
    return int(m.group(1))


def _set_checked(arr: np.ndarray, idx_list, value: float, where: str) -> None:
    for idx in idx_list:
        old = arr[idx]
        if not np.isnan(old) and abs(old - value) > SYMMETRY_TOL:
            raise FcidumpError(f"inconsistent duplicate integral at {where}: {old} vs {value}")
        arr[idx] = value


def parse_fcidump(text: str) -> MolecularIntegrals:
    start = text.upper().find("&FCI")
    end = _HEADER_END.search(text, start + 4) if start >= 0 else None
    if end is None:
        raise FcidumpError("missing &FCI ... &END header")
    header = text[start:end.start()]
    body_offset = text.count("\n", 0, end.end()) + 1
    lines = text[end.end():].splitlines()
    norb = _header_int(header, "NORB")
    nelec = _header_int(header, "NELEC")
    ms2 = _header_int(header, "MS2") if re.search(r"\bMS2\b", header, re.IGNORECASE) else 0
    if norb < 1 or nelec < 0 or nelec > 2 * norb:
        raise FcidumpError(f"invalid header values NORB={norb} NELEC={nelec}")

    h = np.full((norb, norb), np.nan)
    g = np.full((norb,) * 4, np.nan)
    e_nuc = 0.0
    for lineno, line in enumerate(lines, start=body_offset):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise FcidumpError(f"line {lineno}: expected 'value i j k l'")
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError as exc:
            raise FcidumpError(f"line {lineno}: {exc}") from None
        if any(x < 0 or x > norb for x in (i, j, k, l)):
            raise FcidumpError(f"line {lineno}: orbital index out of range 1..{norb}")
        if i == j == k == l == 0:
            e_nuc = value
        elif k == 0 and l == 0:
            if j == 0:
                continue  # orbital energy line; recomputed from integrals instead
            p, q = i - 1, j - 1
            _set_checked(h, [(p, q), (q, p)], value, f"line {lineno}")
        else:
            if 0 in (i, j, k, l):
                raise FcidumpError(f"line {lineno}: mixed zero and nonzero indices")
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            idx = {(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                   (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)}
            _set_checked(g, idx, value, f"line {lineno}")
    ints = MolecularIntegrals(norb, nelec, e_nuc, np.nan_to_num(h), np.nan_to_num(g), ms2)
    return ints


def read_fcidump(path: str | Path) -> MolecularIntegrals:
    return parse_fcidump(Path(path).read_text())


def serialize_fcidump(ints: MolecularIntegrals, tol: float = 0.0) -> str:
    """FCIDUMP text listing each symmetry-unique integral once (``repr`` floats)."""
    n = ints.n_spatial
    out = [
        f"&FCI NORB={n},NELEC={ints.n_electrons},MS2={ints.ms2},",
        "ORBSYM=" + ",".join("1" for _ in range(n)) + ",",
        "ISYM=1,",
        "&END",
    ]
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(n):
                for l in range(k + 1):
                    if k * (k + 1) // 2 + l > ij:
                        continue
                    v = ints.g[i, j, k, l]
                    if abs(v) > tol:
                        out.append(f"{float(v)!r} {i + 1} {j + 1} {k + 1} {l + 1}")
    for i in range(n):
        for j in range(i + 1):
            v = ints.h[i, j]
            if abs(v) > tol:
                out.append(f"{float(v)!r} {i + 1} {j + 1} 0 0")
    out.append(f"{float(ints.e_nuc)!r} 0 0 0 0")
    return "\n".join(out) + "\n"


# -- Hamiltonian ----------------------------------------------------------------------

@dataclass
class QubitHamiltonian:
    paulis: PauliSum
    nq: int
    constant: float = 0.0
    _sparse: object = field(default=None, repr=False, compare=False)

    @property
    def matrix(self):
        """CSR matrix over all ``2**nq`` basis states (cached)."""
        if self._sparse is None:
            self._sparse = self.paulis.to_sparse(self.nq)
        return self._sparse

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self.matrix @ psi


def _term_list(ps: PauliSum) -> list[tuple[int, int, complex]]:
    return [(t.x, t.z, t.coeff) for t in ps]


def _accumulate(acc: dict, left, right, scale: float) -> None:
    for x1, z1, c1 in left:
        for x2, z2, c2 in right:
            key = (x1 ^ x2, z1 ^ z2)
            acc[key] = acc.get(key, 0j) + scale * c1 * c2 * _I_POW[_phase_exponent(x1, z1, x2, z2)]


def build_hamiltonian(ints: MolecularIntegrals) -> QubitHamiltonian:
    """``H = sum h_PQ a^P a_Q + sum_{P<Q, R<S} <PQ||RS> a^P a^Q a_S a_R + E_nuc``."""
    n = ints.nq
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit simulation cap")
    create = [_term_list(jw_ladder(p, "create")) for p in range(n)]
    annih = [_term_list(jw_ladder(p, "annihilate")) for p in range(n)]
    acc: dict[tuple[int, int], complex] = {(0, 0): complex(ints.e_nuc)}
    h, v = ints.h_spin, ints.v_spin
    for p, q in itertools.product(range(n), repeat=2):
        if h[p, q] != 0.0:
            _accumulate(acc, create[p], annih[q], h[p, q])
    pairs = list(itertools.combinations(range(n), 2))
    cc = {}
    aa = {}
    for p, q in pairs:
        d: dict = {}
        _accumulate(d, create[p], create[q], 1.0)
        cc[p, q] = [(x, z, c) for (x, z), c in d.items() if c != 0]
        d = {}
        _accumulate(d, annih[q], annih[p], 1.0)
        aa[p, q] = [(x, z, c) for (x, z), c in d.items() if c != 0]
    for p, q in pairs:
        for r, s in pairs:
            val = v[p, q, r, s]
            if abs(val) > 1e-15:
                _accumulate(acc, cc[p, q], aa[r, s], val)
    cleaned = {}
    for key, c in acc.items():
        if abs(c.imag) > 1e-10:
            raise AssertionError("Hamiltonian picked up an imaginary coefficient")
        if abs(c.real) > HAMILTONIAN_PRUNE:
            cleaned[key] = complex(c.real, 0.0)
    return QubitHamiltonian(PauliSum(cleaned, tol=0.0), n, float(ints.e_nuc))


def number_operator(nq: int) -> PauliSum:
    return sum((PauliSum.identity(0.5) - PauliSum.parse(f"(0.5) Z{q}") for q in range(nq)), PauliSum())


def sz_operator(nq: int) -> PauliSum:
    """``S_z = sum_q s_q (1 - Z_q)/2`` with ``s_q = +1/2`` on even, ``-1/2`` on odd qubits."""
    out = PauliSum()
    for q in range(nq):
        s = 0.5 if q % 2 == 0 else -0.5
        out = out + PauliSum.parse(f"({s * 0.5}) I\n({-s * 0.5}) Z{q}")
    return out


# -- references ------------------------------------------------------------------------

def hf_occupation(ints: MolecularIntegrals, n_electrons: int | None = None) -> tuple[int, ...]:
    """Aufbau-filled occupied spin-orbitals (lowest ``N`` qubits)."""
    ne = ints.n_electrons if n_electrons is None else n_electrons
    if ne % 2:
        raise ValueError("odd electron count: supply an explicit occupation")
    if ne > ints.nq:
        raise ValueError("more electrons than spin-orbitals")
    return tuple(range(ne))


def hf_determinant(ints: MolecularIntegrals, n_electrons: int | None = None) -> tuple[int, ...]:
    """HF occupation as a bit list indexed by qubit."""
    occ = set(hf_occupation(ints, n_electrons))
    return tuple(1 if q in occ else 0 for q in range(ints.nq))


def occupation_to_index(occupied) -> int:
    return sum(1 << q for q in occupied)


def orbital_energies(ints: MolecularIntegrals, occupied=None) -> np.ndarray:
    """Fock diagonal ``eps_P = h_PP + sum_{Q occ} <PQ||PQ>`` per spin-orbital."""
    occ = list(hf_occupation(ints) if occupied is None else occupied)
    v = ints.v_spin
    diag = np.einsum("pqpq->pq", v)
    return np.diag(ints.h_spin) + diag[:, occ].sum(axis=1)


def hf_energy(ints: MolecularIntegrals, occupied=None) -> float:
    occ = list(hf_occupation(ints) if occupied is None else occupied)
    v = ints.v_spin
    one = sum(ints.h_spin[p, p] for p in occ)
    two = 0.5 * sum(v[p, q, p, q] for p in occ for q in occ)
    return float(one + two + ints.e_nuc)


def denominator(exc, eps: np.ndarray) -> float:
    """``sum eps_occ - sum eps_vir`` for an excitation."""
    return float(sum(eps[i] for i in exc.occ) - sum(eps[a] for a in exc.vir))


# -- FCI -------------------------------------------------------------------------------

def sector_indices(nq: int, n_electrons: int | None, sz: float | None = None) -> np.ndarray:
    basis = np.arange(1 << nq, dtype=np.int64)
    pop = np.bitwise_count(basis)
    mask = np.ones(basis.size, dtype=bool)
    if n_electrons is not None:
        mask &= pop == n_electrons
    if sz is not None:
        even = sum(1 << q for q in range(0, nq, 2))
        n_alpha = np.bitwise_count(basis & even)
        mask &= np.isclose((2 * n_alpha - pop) / 2.0, sz)
    return basis[mask]


def fci_solve(ham: QubitHamiltonian | PauliSum, n_electrons: int | None, sz: float | None = 0.0,
              nq: int | None = None) -> tuple[float, StateVector]:
    """Lowest eigenpair inside the fixed ``N`` / ``S_z`` sector.

    The returned vector's largest-magnitude amplitude is real and positive.
    """
    if isinstance(ham, PauliSum):
        nq = nq or ham.min_qubits
        ham = QubitHamiltonian(ham, nq)
    if ham.nq > MAX_QUBITS:
        raise ValueError(f"FCI is capped at {MAX_QUBITS} qubits")
    idx = sector_indices(ham.nq, n_electrons, sz)
    if idx.size == 0:
        raise ValueError(f"empty sector for N={n_electrons}, Sz={sz}")
    sub = ham.matrix[idx][:, idx].toarray()
    if np.abs(sub - sub.conj().T).max(initial=0.0) > 1e-10:
        raise ValueError("Hamiltonian is not Hermitian")
    w, vecs = np.linalg.eigh(sub)
    vec = vecs[:, 0]
    k = int(np.argmax(np.abs(vec)))
    vec = vec * (abs(vec[k]) / vec[k])
    full = np.zeros(1 << ham.nq, dtype=np.complex128)
    full[idx] = vec
    return float(w[0]), StateVector(full)


# -- fixtures ----------------------------------------------------------------------------

def fixture_names() -> list[str]:
    return sorted(FIXTURES)


def _fixture_stem(name: str) -> str:
    key = name.lower()
    if key in FIXTURES:
        return FIXTURES[key]
    if key in FIXTURES.values():
        return key
    raise KeyError(f"unknown fixture {name!r}; choose from {fixture_names()}")


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("exciteq") / "data" / f"{_fixture_stem(name)}.FCIDUMP"))


def load_fixture(name: str) -> tuple[MolecularIntegrals, dict]:
    """Parsed integrals plus the recorded metadata (``hf``, ``fci``, ...)."""
    path = fixture_path(name)
    meta = json.loads(path.with_suffix(".json").read_text())
    return read_fcidump(path), meta


def mp_floor(delta: float, floor: float = 1e-6) -> tuple[float, bool]:
    """Clamp ``|delta|`` to ``floor`` keeping its sign; report whether clamped."""
    if abs(delta) >= floor:
        return delta, False
    return math.copysign(floor, delta if delta != 0 else 1.0), True
