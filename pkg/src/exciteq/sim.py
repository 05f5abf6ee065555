"""Dense statevector simulation: gates, expectation values, exact evolution.

Basis index ``b`` has qubit ``q`` in ``|1>`` iff bit ``q`` of ``b`` is set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .circuit import Circuit, Gate, GateKind
from .pauli import PauliSum

MAX_QUBITS = 16
UNITARY_MAX_QUBITS = 12
NORM_TOL = 1e-10
TAYLOR_TOL = 1e-14
TAYLOR_MAX_TERMS = 200


class SeriesDivergence(RuntimeError):
    """Taylor evolution did not reach tolerance within the term cap."""


@dataclass
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size == 0 or amps.size & (amps.size - 1):
            raise ValueError("amplitude vector length must be a power of two")
        nq = amps.size.bit_length() - 1
        if nq > MAX_QUBITS:
            raise ValueError(f"dense simulation is capped at {MAX_QUBITS} qubits, got {nq}")
        self.amplitudes = amps

    @property
    def nq(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> StateVector:
        return StateVector(self.amplitudes.copy())

    @classmethod
    def basis(cls, index: int, nq: int) -> StateVector:
        if not 0 <= index < (1 << nq):
            raise ValueError(f"basis index {index} out of range for {nq} qubits")
        if nq > MAX_QUBITS:
            raise ValueError(f"dense simulation is capped at {MAX_QUBITS} qubits, got {nq}")
        amps = np.zeros(1 << nq, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)


def prepare_determinant(occupation: str | Sequence[int], nq: int | None = None) -> StateVector:
    """Basis state with qubit ``q`` set iff ``occupation[q]`` is 1.

    A string like ``"1100"`` lists qubit 0 first.
    """
    bits = [int(c) for c in occupation]
    if any(b not in (0, 1) for b in bits):
        raise ValueError("occupation entries must be 0 or 1")
    if nq is not None and len(bits) != nq:
        raise ValueError(f"occupation has length {len(bits)}, expected {nq}")
    if not bits:
        raise ValueError("occupation must cover at least one qubit")
    index = sum(1 << q for q, b in enumerate(bits) if b)
    return StateVector.basis(index, len(bits))


def occupation_index(occupied: Iterable[int]) -> int:
    return sum(1 << q for q in set(occupied))


# -- gates --------------------------------------------------------------------

_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def gate_matrix(kind: GateKind, angle: float | None = None) -> np.ndarray:
    """2x2 action on the target.  Rotations use ``R_P(a) = exp(-i a P / 2)``."""
    if kind in (GateKind.X, GateKind.CNOT):
        return _X
    if kind is GateKind.H:
        return _H
    if kind is GateKind.CZ:
        return _Z
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind in (GateKind.RY, GateKind.MCRY):
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind is GateKind.RZ:
        return np.array([[complex(c, -s), 0], [0, complex(c, s)]], dtype=np.complex128)
    raise ValueError(f"unknown gate kind {kind}")


def _control_masks(gate: Gate) -> tuple[int, int]:
    mask = val = 0
    for q, positive in gate.controls:
        mask |= 1 << q
        if positive:
            val |= 1 << q
    return mask, val


def _apply_to_block(block: np.ndarray, gate: Gate, allow_mcry: bool = False) -> None:
    if gate.kind is GateKind.MCRY and not allow_mcry:
        raise ValueError("decompose MCRy gates before simulation")
    mask, val = _control_masks(gate)
    _kernels.apply_1q(block, gate.target, np.int64(mask), np.int64(val), gate_matrix(gate.kind, gate.angle))


def _check_state(psi: StateVector, nq: int) -> None:
    if psi.nq < nq:
        raise ValueError(f"state has {psi.nq} qubits, circuit needs {nq}")
    if abs(psi.norm - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm {psi.norm:.3e})")


def apply_gate(psi: StateVector, gate: Gate) -> StateVector:
    if max(gate.qubits) >= psi.nq:
        raise ValueError(f"gate touches qubit {max(gate.qubits)} of a {psi.nq}-qubit state")
    _check_state(psi, 1)
    block = psi.amplitudes.copy().reshape(-1, 1)
    _apply_to_block(block, gate)
    return StateVector(block.reshape(-1))


def apply_circuit(psi: StateVector, circuit: Circuit) -> StateVector:
    _check_state(psi, circuit.nq)
    block = psi.amplitudes.copy().reshape(-1, 1)
    for g in circuit:
        _apply_to_block(block, g)
    return StateVector(block.reshape(-1))


def circuit_unitary(circuit: Circuit | Iterable[Gate], nq: int | None = None, allow_mcry: bool = False) -> np.ndarray:
    """Dense unitary whose column ``b`` is the circuit applied to ``|b>``."""
    if isinstance(circuit, Circuit):
        nq = max(nq or 0, circuit.nq)
    if nq is None:
        raise ValueError("qubit count required for a bare gate list")
    if nq > UNITARY_MAX_QUBITS:
        raise ValueError(f"unitary extraction is capped at {UNITARY_MAX_QUBITS} qubits, got {nq}")
    u = np.eye(1 << nq, dtype=np.complex128)
    for g in circuit:
        _apply_to_block(u, g, allow_mcry=allow_mcry)
    return u


def mcry_matrix(gate: Gate, nq: int) -> np.ndarray:
    """Dense matrix of a multi-controlled Ry, built entry by entry (oracle)."""
    if gate.kind is not GateKind.MCRY:
        raise ValueError("expected an MCRy gate")
    dim = 1 << nq
    m = np.zeros((dim, dim), dtype=np.complex128)
    r = gate_matrix(GateKind.RY, gate.angle)
    t = gate.target
    for b in range(dim):
        fires = all(((b >> q) & 1) == int(pos) for q, pos in gate.controls)
        if not fires:
            m[b, b] = 1.0
            continue
        bit = (b >> t) & 1
        for out in (0, 1):
            m[(b & ~(1 << t)) | (out << t), b] = r[out, bit]
    return m


# -- operators ------------------------------------------------------------------

def _operator_and_check(op, check_hermitian: bool = True):
    if isinstance(op, PauliSum):
        if check_hermitian and not op.is_hermitian():
            raise ValueError("operator is not Hermitian")
        return op
    if sp.issparse(op) or isinstance(op, np.ndarray):
        return op
    raise TypeError(f"unsupported operator type {type(op).__name__}")


def _matvec(op, v: np.ndarray) -> np.ndarray:
    if isinstance(op, PauliSum):
        return op.apply(v)
    return op @ v


def expectation(psi: StateVector | np.ndarray, op: PauliSum | sp.spmatrix | np.ndarray) -> float:
    """``<psi|O|psi>`` for Hermitian ``O``; the imaginary residue must be tiny."""
    op = _operator_and_check(op)
    v = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi, dtype=np.complex128)
    val = np.vdot(v, _matvec(op, v))
    scale = max(1.0, abs(val.real))
    if abs(val.imag) > 1e-10 * scale:
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}; operator not Hermitian?")
    return float(val.real)


def evolve_exact(psi: StateVector | np.ndarray, op, tau: float, tol: float = TAYLOR_TOL,
                 max_terms: int = TAYLOR_MAX_TERMS) -> StateVector:
    """``exp(i tau O)|psi>`` by a vector Taylor series.

    Terms are summed until the latest one has norm below ``tol``.
    """
    if not math.isfinite(tau):
        raise ValueError("evolution time must be finite")
    op = _operator_and_check(op)
    v = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi, dtype=np.complex128)
    out = v.astype(np.complex128, copy=True)
    term = out.copy()
    for k in range(1, max_terms + 1):
        term = _matvec(op, term) * (1j * tau / k)
        out += term
        if np.linalg.norm(term) < tol:
            return StateVector(out)
    raise SeriesDivergence(f"Taylor series not converged after {max_terms} terms; split tau={tau}")
