"""Solver run reports and iteration traces."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields

SCHEMA_VERSION = 1
TRACE_COLUMNS = ("macro", "micro", "energy", "norm", "n_params", "cnot_count")


@dataclass
class TraceRow:
    macro: int
    micro: int
    energy: float
    norm: float
    n_params: int
    cnot_count: int


@dataclass
class SolveReport:
    solver: str
    flavor: str
    energy: float
    converged: bool
    n_params: int = 0
    ops: list[str] = field(default_factory=list)
    params: list[float] = field(default_factory=list)
    hf_energy: float | None = None
    fci_energy: float | None = None
    gate_count: dict[str, dict[str, int]] = field(default_factory=dict)
    n_residual_evals: int = 0
    n_gradient_evals: int = 0
    n_vqe_gradient_evals: int = 0
    n_energy_evals: int = 0
    n_macro: int = 0
    n_micro: int = 0
    unselected_residual_sum: float | None = None
    trace: list[TraceRow] = field(default_factory=list)
    events: list[str] = field(default_factory=list)
    state: object = field(default=None, repr=False, compare=False)

    @property
    def fci_error(self) -> float | None:
        if self.fci_energy is None:
            return None
        return self.energy - self.fci_energy

    def log(self, macro: int, micro: int, energy: float, norm: float, n_params: int, cnot_count: int) -> None:
        self.trace.append(TraceRow(macro, micro, float(energy), float(norm), int(n_params), int(cnot_count)))

    def to_dict(self, include_trace: bool = False) -> dict:
        d = {"schema_version": SCHEMA_VERSION}
        for f in fields(self):
            if f.name in ("state", "trace"):
                continue
            d[f.name] = getattr(self, f.name)
        if include_trace:
            d["trace"] = [asdict(row) for row in self.trace]
        d["fci_error"] = self.fci_error
        return d

    def to_json(self, include_trace: bool = False, **kwargs) -> str:
        return json.dumps(self.to_dict(include_trace), **kwargs)

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row in self.trace:
            w.writerow([row.macro, row.micro, repr(row.energy), repr(row.norm), row.n_params, row.cnot_count])
        return buf.getvalue()
