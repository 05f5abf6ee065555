"""Circuits for ``exp(theta*kappa)`` and ``exp(theta*Q)`` plus closed-form gate counts.

Four constructions are provided:

* standard fermionic / standard qubit: one Pauli-string exponential per term
  of the Jordan-Wigner image, each built from a basis change, a CNOT parity
  staircase and a single Rz;
* QEB: a CNOT wrapper that maps the two coupled configurations onto a single
  qubit, then a multi-controlled Ry;
* FEB: the QEB skeleton with the fermionic sign restored by a parity
  staircase over the gap qubits and a pair of CZ gates.

Rotation conventions: ``R_P(a) = exp(-i a P / 2)``.
"""

from __future__ import annotations

import enum
import math

from .circuit import Circuit, Gate, GateCount, GateKind, cnot, cz, h, mcry, rx, ry, rz
from .fermion import Excitation, ExcitationFlavor, excitation_to_paulisum, fermionic_sign


class CircuitFamily(enum.Enum):
    STANDARD_FERMIONIC = "standard-fermionic"
    STANDARD_QUBIT = "standard-qubit"
    FEB = "feb"
    QEB = "qeb"

    @classmethod
    def parse(cls, value: str | CircuitFamily) -> CircuitFamily:
        if isinstance(value, cls):
            return value
        v = value.strip().lower().replace("_", "-")
        aliases = {
            "standardfermionic": cls.STANDARD_FERMIONIC,
            "sf": cls.STANDARD_FERMIONIC,
            "standardqubit": cls.STANDARD_QUBIT,
            "sq": cls.STANDARD_QUBIT,
        }
        return aliases.get(v.replace("-", "")) or cls(v)

    @property
    def flavor(self) -> ExcitationFlavor:
        if self in (CircuitFamily.STANDARD_FERMIONIC, CircuitFamily.FEB):
            return ExcitationFlavor.FERMIONIC
        return ExcitationFlavor.QUBIT


def _nq(exc: Excitation, nq: int | None) -> int:
    if nq is None:
        return exc.min_qubits
    if nq < exc.min_qubits:
        raise ValueError(f"{exc} needs at least {exc.min_qubits} qubits")
    return nq


def _staircase(qubits: list[int]) -> list[Gate]:
    return [cnot(a, b) for a, b in zip(qubits, qubits[1:])]


# -- standard circuits ----------------------------------------------------------

def synth_standard(exc: Excitation, flavor: ExcitationFlavor | str, theta: float,
                   nq: int | None = None) -> Circuit:
    """Product of single-string exponentials, one per term of the generator.

    The generator's strings mutually commute, so the product is exact.  Each
    term has coefficient ``i*alpha`` and contributes ``exp(i*theta*alpha*P)``,
    realised as ``Rz(-2*theta*alpha)`` on the last qubit of the string's
    support after mapping X (by H) and Y (by Rx(pi/2)) onto Z.
    """
    flavor = ExcitationFlavor.parse(flavor)
    circ = Circuit(_nq(exc, nq))
    for term in excitation_to_paulisum(exc, flavor):
        if abs(term.coeff.real) > 1e-12:
            raise AssertionError("excitation generator must be anti-Hermitian")
        alpha = term.coeff.imag
        letters = term.letters()
        pre: list[Gate] = []
        post: list[Gate] = []
        for q, ch in letters:
            if ch == "X":
                pre.append(h(q))
                post.append(h(q))
            elif ch == "Y":
                pre.append(rx(q, math.pi / 2))
                post.append(rx(q, -math.pi / 2))
        support = [q for q, _ in letters]
        ladder = _staircase(support)
        circ.extend(pre)
        circ.extend(ladder)
        circ.append(rz(support[-1], -2.0 * theta * alpha))
        circ.extend(reversed(ladder))
        circ.extend(post)
    return circ


# -- multi-controlled Ry ------------------------------------------------------------

def _mcry_block(target: int, controls: list[tuple[int, bool]], angle: float, forward: bool) -> list[Gate]:
    if not controls:
        return [ry(target, angle)]
    *rest, (c, positive) = controls
    a, b = (angle / 2, -angle / 2) if positive else (angle / 2, angle / 2)
    cx = cnot(c, target)
    if forward:
        return _mcry_block(target, rest, a, True) + [cx] + _mcry_block(target, rest, b, False) + [cx]
    return [cx] + _mcry_block(target, rest, b, True) + [cx] + _mcry_block(target, rest, a, False)


def cancel_cnot_pairs(gates: list[Gate]) -> list[Gate]:
    """Drop pairs of identical CNOTs separated only by CNOTs on the same target.

    Such CNOTs commute with each other, so each removed pair is an identity.
    """
    out = list(gates)
    changed = True
    while changed:
        changed = False
        for i, g in enumerate(out):
            if g.kind is not GateKind.CNOT:
                continue
            for j in range(i + 1, len(out)):
                other = out[j]
                if other.kind is not GateKind.CNOT or other.target != g.target:
                    break
                if other == g:
                    del out[j]
                    del out[i]
                    changed = True
                    break
            if changed:
                break
    return out


def decompose_mcry(gate: Gate) -> Circuit:
    """Rewrite an MCRy with ``k`` controls as ``2**k`` Ry and ``2**k`` CNOTs.

    Controls are peeled from the highest qubit index down.  A positive control
    splits the angle into ``+a/2, -a/2`` around its CNOT pair, an
    anti-control into ``+a/2, +a/2``, so no X gates are needed.  Nested blocks
    alternate between forward and backward order so that neighbouring CNOTs
    cancel.
    """
    if gate.kind is not GateKind.MCRY:
        raise ValueError("decompose_mcry expects an MCRy gate")
    controls = sorted(gate.controls)
    gates = cancel_cnot_pairs(_mcry_block(gate.target, controls, gate.angle, True))
    return Circuit(max(gate.qubits) + 1, gates)


# -- QEB / FEB --------------------------------------------------------------------

def _qeb_wrapper(exc: Excitation) -> list[Gate]:
    occ, vir = exc.occ, exc.vir
    n = exc.rank
    pn, p2n = occ[-1], vir[-1]
    gates = [cnot(pn, occ[m]) for m in range(n - 1)]
    gates += [cnot(p2n, vir[m]) for m in range(n - 1)]
    gates.append(cnot(p2n, pn))
    return gates


def _qeb_core(exc: Excitation, angle: float) -> Gate:
    pn = exc.occ[-1]
    controls = [(q, False) for q in exc.occ[:-1] + exc.vir[:-1]]
    controls.append((pn, True))
    return mcry(exc.vir[-1], controls, angle)


def _qeb_skeleton(exc: Excitation, angle: float, decompose: bool) -> list[Gate]:
    wrapper = _qeb_wrapper(exc)
    core = _qeb_core(exc, angle)
    body = list(decompose_mcry(core)) if decompose else [core]
    return wrapper + body + wrapper[::-1]


def synth_qeb(exc: Excitation, theta: float, nq: int | None = None, decompose: bool = True) -> Circuit:
    """Circuit for ``exp(theta*Q)``.

    The wrapper leaves qubit ``occ[-1]`` set for both coupled configurations
    and every other active qubit clear, except ``vir[-1]`` which tells them
    apart; a single Ry(2*theta) on ``vir[-1]`` conditioned on that pattern
    performs the rotation.
    """
    return Circuit(_nq(exc, nq), _qeb_skeleton(exc, 2.0 * theta, decompose))


def synth_qeb_single_reduced(exc: Excitation, theta: float, nq: int | None = None) -> Circuit:
    """Two-CNOT circuit for a rank-1 ``exp(theta*Q)``.

    Local basis changes turn ``Q`` into ``i(X X + Z Z)/2`` on the pair, and a
    CNOT conjugation maps that onto ``X`` on ``occ`` plus ``Z`` on ``vir``.
    """
    if exc.rank != 1:
        raise ValueError("the reduced circuit covers single excitations only")
    o, v = exc.occ[0], exc.vir[0]
    pre = [rz(v, math.pi / 2), rx(o, math.pi / 2), rx(v, math.pi / 2)]
    core = [cnot(o, v), rx(o, -theta), rz(v, -theta), cnot(o, v)]
    post = [g.inverse() for g in reversed(pre)]
    return Circuit(_nq(exc, nq), pre + core + post)


def feb_sign_factor(rank: int) -> int:
    """``f = floor(n/2) mod 2``."""
    return (rank // 2) % 2


def synth_feb(exc: Excitation, theta: float, nq: int | None = None, decompose: bool = True,
              f: int | None = None) -> Circuit:
    """Circuit for ``exp(theta*kappa)``.

    Relative to ``Q``, ``kappa`` picks up ``(-1)`` per occupied gap qubit
    times a fixed sign set by the index layout; for particle-hole indices that
    fixed sign is ``(-1)**f``.  The gap parity is gathered on the last gap
    qubit by a CNOT staircase and applied through CZ gates around the core,
    using ``Z Ry(a) Z = Ry(-a)``.  ``f`` may be overridden to probe the sign.
    """
    f_default = feb_sign_factor(exc.rank)
    f_used = f_default if f is None else int(f) % 2
    s0 = fermionic_sign(exc, exc.occ_mask)
    # s0 * (-1)**f_default is +1 whenever every occupied index precedes every
    # virtual one; the extra factor covers general index layouts
    layout = s0 * (-1) ** f_default
    angle = (-1) ** f_used * layout * 2.0 * theta

    gaps = list(exc.gap_qubits())
    ladder = _staircase(gaps)
    sign_gates = [cz(gaps[-1], exc.vir[-1])] if gaps else []
    gates = ladder + sign_gates + _qeb_skeleton(exc, angle, decompose) + sign_gates + ladder[::-1]
    return Circuit(_nq(exc, nq), gates)


def synth(exc: Excitation, family: CircuitFamily | str, theta: float, nq: int | None = None) -> Circuit:
    family = CircuitFamily.parse(family)
    if family is CircuitFamily.STANDARD_FERMIONIC:
        return synth_standard(exc, ExcitationFlavor.FERMIONIC, theta, nq)
    if family is CircuitFamily.STANDARD_QUBIT:
        return synth_standard(exc, ExcitationFlavor.QUBIT, theta, nq)
    if family is CircuitFamily.FEB:
        return synth_feb(exc, theta, nq)
    return synth_qeb(exc, theta, nq)


# -- closed-form counts ---------------------------------------------------------------

def count_formula(exc: Excitation, family: CircuitFamily | str) -> GateCount:
    """Gate counts from closed-form expressions, without building a circuit."""
    family = CircuitFamily.parse(family)
    n = exc.rank
    s = exc.indices
    n_strings = 2 ** (2 * n - 1)
    if family in (CircuitFamily.STANDARD_FERMIONIC, CircuitFamily.STANDARD_QUBIT):
        single = (4 * n + 1) * n_strings
        if family is CircuitFamily.STANDARD_QUBIT:
            return GateCount(single, (2 * n - 1) * 2 ** (2 * n), 0)
        alternating = sum(s[2 * j + 1] - s[2 * j] for j in range(n))
        return GateCount(single, (alternating + n - 1) * 2 ** (2 * n), 0)
    qeb_cnot = n_strings + 4 * n - 2
    if family is CircuitFamily.QEB:
        return GateCount(n_strings, qeb_cnot, 0)
    gap = sum(s[2 * j + 1] - s[2 * j] - 1 for j in range(n))
    if gap == 0:
        return GateCount(n_strings, qeb_cnot, 0)
    return GateCount(n_strings, qeb_cnot + 2 * (gap - 1), 2)


def qeb_cnot_count(n: int, identities: bool = False) -> int:
    """QEB CNOTs at rank ``n``.

    With ``identities`` the count drops to 2 for singles (see
    :func:`synth_qeb_single_reduced`) and by one for higher ranks, where a
    wrapper CNOT merges into the MCRy decomposition at the price of extra
    single-qubit gates.
    """
    full = 2 ** (2 * n - 1) + 4 * n - 2
    if not identities:
        return full
    return 2 if n == 1 else full - 1


def cnot_reduction(n: int, identities: bool = False) -> float:
    """Fractional CNOT saving of QEB over the standard qubit circuit at rank ``n``."""
    std = (2 * n - 1) * 2 ** (2 * n)
    return 1.0 - qeb_cnot_count(n, identities) / std


def single_qubit_reduction(n: int) -> float:
    return 1.0 - 2 ** (2 * n - 1) / ((4 * n + 1) * 2 ** (2 * n - 1))
