"""Excitation operators and their Jordan-Wigner images.

Qubit ``q`` is spin-orbital ``q``; spins are interleaved (alpha on even,
beta on odd qubits).  A fermionic excitation with occupied indices
``o1 < ... < on`` and virtual indices ``v1 < ... < vn`` is

    kappa = a^v1 ... a^vn  a_o1 ... a_on  -  h.c.

and its qubit counterpart ``Q`` is the same product of qubit ladder operators
(no parity strings).  With this ordering the fermionic circuit needs the
rank-dependent rotation sign ``(-1)**(n(n-1)/2)`` relative to ``Q`` when every
occupied index lies below every virtual one.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import _kernels
from .pauli import PauliSum, PauliTerm

ORACLE_MAX_QUBITS = 12


class ExcitationFlavor(enum.Enum):
    FERMIONIC = "fermionic"
    QUBIT = "qubit"

    @classmethod
    def parse(cls, value: str | ExcitationFlavor) -> ExcitationFlavor:
        if isinstance(value, cls):
            return value
        v = value.strip().lower()
        aliases = {"f": cls.FERMIONIC, "fermion": cls.FERMIONIC, "q": cls.QUBIT}
        return aliases.get(v) or cls(v)


@dataclass(frozen=True, order=False)
class Excitation:
    """Excitation moving ``rank`` particles from ``occ`` to ``vir``.

    Both index tuples are strictly increasing and disjoint.  Use
    :meth:`from_indices` to canonicalise unsorted input.
    """

    occ: tuple[int, ...]
    vir: tuple[int, ...]

    def __post_init__(self):
        occ, vir = tuple(self.occ), tuple(self.vir)
        object.__setattr__(self, "occ", occ)
        object.__setattr__(self, "vir", vir)
        if len(occ) == 0 or len(occ) != len(vir):
            raise ValueError(f"occupied and virtual lists must have equal nonzero length: {occ} / {vir}")
        if any(i < 0 for i in occ + vir):
            raise ValueError("indices must be non-negative")
        for lst in (occ, vir):
            if any(a >= b for a, b in zip(lst, lst[1:])):
                raise ValueError(f"index list must be strictly increasing: {lst}")
        if set(occ) & set(vir):
            raise ValueError(f"occupied and virtual indices overlap: {occ} / {vir}")

    @classmethod
    def from_indices(cls, occ: Iterable[int], vir: Iterable[int]) -> Excitation:
        occ = sorted(int(i) for i in occ)
        vir = sorted(int(i) for i in vir)
        if len(set(occ)) != len(occ) or len(set(vir)) != len(vir):
            raise ValueError("repeated index")
        return cls(tuple(occ), tuple(vir))

    @classmethod
    def parse(cls, text: str) -> Excitation:
        """Parse ``"occ:1,2,5;vir:8,9,11"`` (``;`` or whitespace separated)."""
        m = re.fullmatch(r"\s*occ\s*:\s*([\d,\s]+?)\s*[;\s]\s*vir\s*:\s*([\d,\s]+?)\s*", text)
        if m is None:
            raise ValueError(f"cannot parse excitation {text!r}; expected 'occ:1,2;vir:5,6'")
        occ = [int(t) for t in m.group(1).replace(" ", "").split(",") if t]
        vir = [int(t) for t in m.group(2).replace(" ", "").split(",") if t]
        return cls.from_indices(occ, vir)

    @property
    def rank(self) -> int:
        return len(self.occ)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.occ + self.vir))

    @property
    def occ_mask(self) -> int:
        return sum(1 << i for i in self.occ)

    @property
    def vir_mask(self) -> int:
        return sum(1 << i for i in self.vir)

    @property
    def min_qubits(self) -> int:
        return max(self.occ + self.vir) + 1

    def gap_qubits(self) -> tuple[int, ...]:
        """Spectators carrying a parity Z in every Jordan-Wigner string.

        These are the qubits strictly inside each pair ``(s1,s2), (s3,s4), ...``
        of the sorted index list.
        """
        s = self.indices
        out: list[int] = []
        for k in range(0, len(s), 2):
            out.extend(range(s[k] + 1, s[k + 1]))
        return tuple(out)

    def sort_key(self) -> tuple:
        return (self.rank, self.occ, self.vir)

    def __lt__(self, other: Excitation) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"occ:{','.join(map(str, self.occ))};vir:{','.join(map(str, self.vir))}"


# -- ladder operators ---------------------------------------------------------

def _ladder(index: int, create: bool, parity_string: bool, nq: int | None) -> PauliSum:
    if index < 0 or (nq is not None and index >= nq):
        raise ValueError(f"spin-orbital {index} out of range for {nq} qubits")
    zstr = ((1 << index) - 1) if parity_string else 0
    bit = 1 << index
    y_coeff = -0.5j if create else 0.5j
    return PauliSum([PauliTerm(0.5, bit, zstr), PauliTerm(y_coeff, bit, zstr | bit)])


def jw_ladder(index: int, kind: str, nq: int | None = None) -> PauliSum:
    """Jordan-Wigner image of ``a^p`` (``kind='create'``) or ``a_p``."""
    if kind not in ("create", "annihilate"):
        raise ValueError("kind must be 'create' or 'annihilate'")
    return _ladder(index, kind == "create", True, nq)


def qubit_ladder(index: int, kind: str, nq: int | None = None) -> PauliSum:
    """Qubit ladder operator ``Q^p = (X - iY)/2`` or ``Q_p``: no parity string."""
    if kind not in ("create", "annihilate"):
        raise ValueError("kind must be 'create' or 'annihilate'")
    return _ladder(index, kind == "create", False, nq)


@lru_cache(maxsize=4096)
def excitation_to_paulisum(exc: Excitation, flavor: ExcitationFlavor) -> PauliSum:
    """Anti-Hermitian generator (kappa or Q) as a sum of ``2**(2n-1)`` strings."""
    flavor = ExcitationFlavor.parse(flavor)
    ladder = jw_ladder if flavor is ExcitationFlavor.FERMIONIC else qubit_ladder
    op = PauliSum.identity()
    for v in exc.vir:
        op = op * ladder(v, "create")
    for o in exc.occ:
        op = op * ladder(o, "annihilate")
    return (op - op.adjoint()).prune()


# -- exact action ---------------------------------------------------------------

def ladder_sequence(exc: Excitation) -> list[tuple[int, bool]]:
    """Operators of the excitation product in application order, ``(index, create)``."""
    seq = [(o, False) for o in reversed(exc.occ)]
    seq += [(v, True) for v in reversed(exc.vir)]
    return seq


def fermionic_sign(exc: Excitation, basis_state: int) -> int:
    """Sign of ``T|b>`` for the excitation part ``T`` acting on a source state."""
    cur = basis_state
    sign = 1
    for p, create in ladder_sequence(exc):
        occupied = (cur >> p) & 1
        if occupied == create:
            return 0
        if (cur & ((1 << p) - 1)).bit_count() % 2:
            sign = -sign
        cur ^= 1 << p
    return sign


@dataclass(frozen=True)
class ExcitationAction:
    """Basis-state pairs on which ``exp(theta*G)`` acts as a plane rotation.

    ``G|src> = sign*|dst>`` and ``G|dst> = -sign*|src>``; every other basis
    state is annihilated by ``G``.
    """

    src: np.ndarray
    dst: np.ndarray
    sign: np.ndarray


@lru_cache(maxsize=8192)
def excitation_action(exc: Excitation, flavor: ExcitationFlavor, nq: int) -> ExcitationAction:
    flavor = ExcitationFlavor.parse(flavor)
    if exc.min_qubits > nq:
        raise ValueError(f"{exc} does not fit in {nq} qubits")
    basis = np.arange(1 << nq, dtype=np.int64)
    occ_m, vir_m = exc.occ_mask, exc.vir_mask
    src = basis[((basis & occ_m) == occ_m) & ((basis & vir_m) == 0)]
    dst = src ^ (occ_m | vir_m)
    sign = np.ones(src.shape[0], dtype=np.float64)
    if flavor is ExcitationFlavor.FERMIONIC:
        cur = src.copy()
        for p, _create in ladder_sequence(exc):
            below = cur & np.int64((1 << p) - 1)
            sign *= 1.0 - 2.0 * _kernels.parity(below)
            cur ^= np.int64(1 << p)
    for arr in (src, dst, sign):
        arr.setflags(write=False)
    return ExcitationAction(src, dst, sign)


def matrix_of(exc: Excitation, flavor: ExcitationFlavor, nq: int, cap: int = ORACLE_MAX_QUBITS) -> np.ndarray:
    """Dense matrix of the generator built from its Pauli strings (test oracle)."""
    if nq > cap:
        raise ValueError(f"dense oracle capped at {cap} qubits, got {nq}")
    return excitation_to_paulisum(exc, ExcitationFlavor.parse(flavor)).to_matrix(nq)
