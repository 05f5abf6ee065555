"""Disentangled UCC ansatz states and their statevector action.

``ops[0]`` acts first on the reference, so the trial state is
``exp(t_K G_K) ... exp(t_1 G_1) |Phi>``.  :meth:`AnsatzState.append` adds an
operator that acts last (ADAPT growth); :meth:`AnsatzState.prepend` adds one
that acts first, right next to the reference (selected-PQE growth).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..circuit import Circuit, GateCount
from ..fermion import Excitation, ExcitationFlavor, excitation_action
from ..sim import StateVector, apply_circuit
from ..synth import CircuitFamily, count_formula, synth


def default_family(flavor: ExcitationFlavor) -> CircuitFamily:
    return CircuitFamily.FEB if flavor is ExcitationFlavor.FERMIONIC else CircuitFamily.QEB


@dataclass
class AnsatzState:
    nq: int
    reference: int
    ops: list[tuple[Excitation, ExcitationFlavor]] = field(default_factory=list)
    params: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=np.float64).copy()
        self.ops = [(exc, ExcitationFlavor.parse(fl)) for exc, fl in self.ops]
        if len(self.ops) != self.params.size:
            raise ValueError("ops and params must have equal length")
        if not np.all(np.isfinite(self.params)):
            raise ValueError("parameters must be finite")

    def __len__(self) -> int:
        return len(self.ops)

    @property
    def excitations(self) -> list[Excitation]:
        return [exc for exc, _ in self.ops]

    def append(self, exc: Excitation, flavor: ExcitationFlavor, param: float = 0.0) -> None:
        if exc.min_qubits > self.nq:
            raise ValueError(f"{exc} does not fit in {self.nq} qubits")
        self.ops.append((exc, ExcitationFlavor.parse(flavor)))
        self.params = np.append(self.params, float(param))

    def prepend(self, exc: Excitation, flavor: ExcitationFlavor, param: float = 0.0) -> None:
        if exc.min_qubits > self.nq:
            raise ValueError(f"{exc} does not fit in {self.nq} qubits")
        self.ops.insert(0, (exc, ExcitationFlavor.parse(flavor)))
        self.params = np.insert(self.params, 0, float(param))

    def copy(self) -> AnsatzState:
        return AnsatzState(self.nq, self.reference, list(self.ops), self.params.copy())

    def reference_vector(self) -> np.ndarray:
        v = np.zeros(1 << self.nq, dtype=np.complex128)
        v[self.reference] = 1.0
        return v

    def actions(self):
        return [excitation_action(exc, fl, self.nq) for exc, fl in self.ops]


def apply_exponential(psi: np.ndarray, exc: Excitation, flavor: ExcitationFlavor, theta: float) -> None:
    """In-place ``psi <- exp(theta*G)|psi>`` as a product of plane rotations."""
    act = excitation_action(exc, flavor, psi.size.bit_length() - 1)
    _kernels.rotate_pairs(psi, act.src, act.dst, act.sign, math.cos(theta), math.sin(theta))


def apply_generator(psi: np.ndarray, exc: Excitation, flavor: ExcitationFlavor) -> np.ndarray:
    act = excitation_action(exc, flavor, psi.size.bit_length() - 1)
    return _kernels.generator_apply(psi, act.src, act.dst, act.sign)


def apply_ops(psi: np.ndarray, state: AnsatzState, inverse: bool = False) -> np.ndarray:
    """Apply ``U`` (or ``U^dagger``) in place and return ``psi``."""
    items = list(zip(state.ops, state.params))
    if inverse:
        for (exc, fl), t in reversed(items):
            apply_exponential(psi, exc, fl, -t)
    else:
        for (exc, fl), t in items:
            apply_exponential(psi, exc, fl, t)
    return psi


def ansatz_apply(state: AnsatzState, psi0: np.ndarray | StateVector | None = None,
                 backend: str = "exact", family: CircuitFamily | None = None) -> np.ndarray:
    """``U(t)|psi0>`` (``psi0`` defaults to the reference determinant).

    ``backend="exact"`` applies each exponential as plane rotations;
    ``backend="circuit"`` simulates the synthesized gate sequence instead.
    """
    if psi0 is None:
        psi = state.reference_vector()
    else:
        amps = psi0.amplitudes if isinstance(psi0, StateVector) else psi0
        psi = np.array(amps, dtype=np.complex128)
    if backend == "exact":
        return apply_ops(psi, state)
    if backend == "circuit":
        return apply_circuit(StateVector(psi), ansatz_circuit(state, family)).amplitudes
    raise ValueError(f"unknown backend {backend!r}")


def ansatz_circuit(state: AnsatzState, family: CircuitFamily | str | None = None) -> Circuit:
    """Gate sequence for ``U(t)`` (reference preparation excluded)."""
    circ = Circuit(state.nq)
    for (exc, fl), t in zip(state.ops, state.params):
        fam = default_family(fl) if family is None else _family_for(CircuitFamily.parse(family), fl)
        circ.extend(synth(exc, fam, float(t), nq=state.nq))
    return circ


def _family_for(family: CircuitFamily, flavor: ExcitationFlavor) -> CircuitFamily:
    if family.flavor is not flavor:
        raise ValueError(f"{family.value} circuits realise {family.flavor.value} excitations, not {flavor.value}")
    return family


def ansatz_gate_count(state: AnsatzState | list[Excitation], family: CircuitFamily | str) -> GateCount:
    """Total closed-form gate count of the ansatz in one circuit family."""
    family = CircuitFamily.parse(family)
    excs = state.excitations if isinstance(state, AnsatzState) else list(state)
    total = GateCount()
    for exc in excs:
        total = total + count_formula(exc, family)
    return total
