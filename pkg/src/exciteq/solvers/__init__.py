"""Eigensolvers built on dUCC ansatz states."""

from .ansatz import (
    AnsatzState,
    ansatz_apply,
    ansatz_circuit,
    ansatz_gate_count,
    apply_exponential,
    apply_generator,
    apply_ops,
    default_family,
)
from .pools import OperatorPool, PoolKind, build_pool
from .pqe import (
    ComplexStateError,
    DIISResult,
    diis_extrapolate,
    excited_determinant,
    fixed_pqe_solve,
    pqe_solve,
    residual_exact,
    residual_projection,
    select_operators,
    spqe_residual_screen,
    spqe_solve,
    unselected_residual_sum,
)
from .problem import Problem
from .report import SCHEMA_VERSION, TRACE_COLUMNS, SolveReport, TraceRow
from .vqe import (
    BFGSResult,
    adapt_vqe_solve,
    bfgs_minimize,
    energy,
    energy_and_gradient,
    fixed_vqe_solve,
    pool_gradients,
    vqe_solve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
