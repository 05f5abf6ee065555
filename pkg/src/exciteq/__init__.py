"""CNOT-efficient excitation circuits and dUCC eigensolvers on a statevector."""

from ._kernels import BACKEND
from .circuit import Circuit, Gate, GateCount, GateKind, count_gates
from .fermion import Excitation, ExcitationFlavor, excitation_to_paulisum, matrix_of
from .pauli import PauliSum, PauliTerm
from .synth import (
    CircuitFamily,
    count_formula,
    decompose_mcry,
    qeb_cnot_count,
    synth,
    synth_feb,
    synth_qeb,
    synth_qeb_single_reduced,
    synth_standard,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Circuit",
    "CircuitFamily",
    "Excitation",
    "ExcitationFlavor",
    "Gate",
    "GateCount",
    "GateKind",
    "PauliSum",
    "PauliTerm",
    "count_formula",
    "count_gates",
    "decompose_mcry",
    "excitation_to_paulisum",
    "matrix_of",
    "qeb_cnot_count",
    "synth",
    "synth_feb",
    "synth_qeb",
    "synth_qeb_single_reduced",
    "synth_standard",
]
