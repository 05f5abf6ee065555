"""Gate-level circuit IR with exact gate tallies."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class GateKind(str, enum.Enum):
    X = "X"
    H = "H"
    RX = "Rx"
    RY = "Ry"
    RZ = "Rz"
    CNOT = "CNOT"
    CZ = "CZ"
    MCRY = "MCRy"


SINGLE_QUBIT = frozenset({GateKind.X, GateKind.H, GateKind.RX, GateKind.RY, GateKind.RZ})
ROTATIONS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.MCRY})
SELF_INVERSE = frozenset({GateKind.X, GateKind.H, GateKind.CNOT, GateKind.CZ})


@dataclass(frozen=True)
class Gate:
    """One gate.  ``controls`` holds ``(qubit, positive)`` pairs; ``positive``
    is False for an anti-control (fires on ``|0>``)."""

    kind: GateKind
    target: int
    controls: tuple[tuple[int, bool], ...] = ()
    angle: float | None = None

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        controls = tuple((int(q), bool(p)) for q, p in self.controls)
        object.__setattr__(self, "controls", controls)
        if kind in (GateKind.CNOT, GateKind.CZ) and len(controls) != 1:
            raise ValueError(f"{kind.value} needs exactly one control")
        if kind in SINGLE_QUBIT and controls:
            raise ValueError(f"{kind.value} takes no controls")
        if kind is GateKind.MCRY and not controls:
            raise ValueError("MCRy needs at least one control")
        if kind in ROTATIONS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{kind.value} needs a finite angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise ValueError(f"{kind.value} takes no angle")
        qubits = [q for q, _ in controls]
        if self.target in qubits or len(set(qubits)) != len(qubits):
            raise ValueError("controls must be distinct and disjoint from the target")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,) + tuple(q for q, _ in self.controls)

    def inverse(self) -> Gate:
        if self.kind in SELF_INVERSE:
            return self
        return Gate(self.kind, self.target, self.controls, -self.angle)

    def to_json(self) -> dict:
        d: dict = {"kind": self.kind.value, "target": self.target}
        if self.controls:
            d["controls"] = [[q, "+" if p else "-"] for q, p in self.controls]
        if self.angle is not None:
            d["angle"] = self.angle
        return d

    @classmethod
    def from_json(cls, d: dict) -> Gate:
        controls = tuple((int(q), pol == "+") for q, pol in d.get("controls", []))
        return cls(GateKind(d["kind"]), int(d["target"]), controls, d.get("angle"))


# convenience constructors
def x(q: int) -> Gate:
    return Gate(GateKind.X, q)


def h(q: int) -> Gate:
    return Gate(GateKind.H, q)


def rx(q: int, angle: float) -> Gate:
    return Gate(GateKind.RX, q, angle=angle)


def ry(q: int, angle: float) -> Gate:
    return Gate(GateKind.RY, q, angle=angle)


def rz(q: int, angle: float) -> Gate:
    return Gate(GateKind.RZ, q, angle=angle)


def cnot(control: int, target: int, positive: bool = True) -> Gate:
    return Gate(GateKind.CNOT, target, ((control, positive),))


def cz(control: int, target: int) -> Gate:
    return Gate(GateKind.CZ, target, ((control, True),))


def mcry(target: int, controls: Sequence[tuple[int, bool]], angle: float) -> Gate:
    return Gate(GateKind.MCRY, target, tuple(controls), angle)


@dataclass(frozen=True)
class GateCount:
    single_qubit: int = 0
    cnot: int = 0
    cz: int = 0

    def __add__(self, other: GateCount) -> GateCount:
        return GateCount(self.single_qubit + other.single_qubit, self.cnot + other.cnot, self.cz + other.cz)

    def as_dict(self) -> dict[str, int]:
        return {"single_qubit": self.single_qubit, "cnot": self.cnot, "cz": self.cz}


@dataclass
class Circuit:
    nq: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        if self.nq < 1:
            raise ValueError("circuit needs at least one qubit")
        gates, self.gates = list(self.gates), []
        self.extend(gates)

    def append(self, gate: Gate) -> Circuit:
        if any(q < 0 or q >= self.nq for q in gate.qubits):
            raise ValueError(f"gate {gate} touches a qubit outside 0..{self.nq - 1}")
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> Circuit:
        for g in gates:
            self.append(g)
        return self

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def compose(self, other: Circuit) -> Circuit:
        """``other`` runs after ``self``."""
        return Circuit(max(self.nq, other.nq), self.gates + other.gates)

    def inverse(self) -> Circuit:
        return Circuit(self.nq, [g.inverse() for g in reversed(self.gates)])

    def to_json(self) -> dict:
        return {"nq": self.nq, "gates": [g.to_json() for g in self.gates]}

    def dumps(self, **kwargs) -> str:
        return json.dumps(self.to_json(), **kwargs)

    @classmethod
    def from_json(cls, d: dict | str) -> Circuit:
        if isinstance(d, str):
            d = json.loads(d)
        return cls(int(d["nq"]), [Gate.from_json(g) for g in d["gates"]])


def compose(a: Circuit, b: Circuit) -> Circuit:
    return a.compose(b)


def inverse(c: Circuit) -> Circuit:
    return c.inverse()


def count_gates(c: Circuit | Iterable[Gate]) -> GateCount:
    sq = cx = czc = 0
    for g in c:
        if g.kind in SINGLE_QUBIT:
            sq += 1
        elif g.kind is GateKind.CNOT:
            cx += 1
        elif g.kind is GateKind.CZ:
            czc += 1
        else:
            raise ValueError("decompose MCRy gates before counting")
    return GateCount(sq, cx, czc)
