"""Projective solvers: residuals, DIIS, PQE micro-iterations and selected PQE."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from ..chem import QubitHamiltonian, denominator, mp_floor
from ..fermion import Excitation, ExcitationFlavor, excitation_action
from ..sim import evolve_exact
from ..synth import CircuitFamily
from .ansatz import AnsatzState, apply_exponential, apply_ops, ansatz_gate_count, default_family
from .pools import PoolKind, build_pool
from .problem import Problem
from .report import SolveReport

REAL_TOL = 1e-10
DEFAULT_DT = 1e-3


class ComplexStateError(ValueError):
    """The trial state has non-negligible imaginary amplitudes."""


# -- residuals ------------------------------------------------------------------------

def excited_determinant(exc: Excitation, flavor: ExcitationFlavor, ref: int, nq: int) -> tuple[int, float] | None:
    """``G|ref> = s|b>``; returns ``(b, s)`` or None when ``G`` annihilates ``ref``."""
    act = excitation_action(exc, flavor, nq)
    hit = np.flatnonzero(act.src == ref)
    if hit.size:
        k = hit[0]
        return int(act.dst[k]), float(act.sign[k])
    hit = np.flatnonzero(act.dst == ref)
    if hit.size:
        k = hit[0]
        return int(act.src[k]), -float(act.sign[k])
    return None


def _target(exc, flavor, ref, nq):
    t = excited_determinant(exc, flavor, ref, nq)
    if t is None:
        raise ValueError(f"{exc} annihilates the reference determinant")
    return t


def _check_real(psi: np.ndarray) -> None:
    worst = float(np.abs(psi.imag).max(initial=0.0))
    if worst > REAL_TOL:
        raise ComplexStateError(f"trial state has imaginary amplitude {worst:.3e}")


def _energy(ham: QubitHamiltonian, psi: np.ndarray) -> float:
    return float(np.vdot(psi, ham.matrix @ psi).real)


def transformed_energy(state: AnsatzState, ham: QubitHamiltonian, chi: np.ndarray) -> float:
    """``<chi|U^dagger H U|chi>`` for a real vector ``chi``."""
    psi = apply_ops(np.array(chi, dtype=np.complex128), state)
    _check_real(psi)
    return _energy(ham, psi)


def residual_exact(state: AnsatzState, ham: QubitHamiltonian, mu: Excitation,
                   flavor: ExcitationFlavor | str = ExcitationFlavor.FERMIONIC,
                   e0: float | None = None) -> float:
    """Residual from three energies of the transformed Hamiltonian.

    With ``|Omega> = exp(pi/4 G_mu)|Phi> = (|Phi> + |Phi_mu>)/sqrt(2)`` and a
    real state, ``r_mu = E(Omega) - (E(Phi_mu) + E(Phi))/2``.  Pass ``e0`` to
    reuse a cached ``E(Phi)``.
    """
    flavor = ExcitationFlavor.parse(flavor)
    ref = state.reference_vector()
    phi_mu = np.zeros_like(ref)
    b, s = _target(mu, flavor, state.reference, state.nq)
    phi_mu[b] = s
    omega = ref.copy()
    apply_exponential(omega, mu, flavor, math.pi / 4)
    if e0 is None:
        e0 = transformed_energy(state, ham, ref)
    return transformed_energy(state, ham, omega) - 0.5 * (transformed_energy(state, ham, phi_mu) + e0)


@dataclass
class Sigma:
    energy: float
    psi: np.ndarray
    sigma: np.ndarray


def sigma_vector(state: AnsatzState, ham: QubitHamiltonian) -> Sigma:
    """``U|Phi>``, its energy and ``U^dagger H U|Phi>``."""
    psi = apply_ops(state.reference_vector(), state)
    _check_real(psi)
    hpsi = ham.matrix @ psi
    energy = float(np.vdot(psi, hpsi).real)
    return Sigma(energy, psi, apply_ops(hpsi, state, inverse=True))


def residuals_projection(sig: Sigma, targets: list[tuple[int, float]]) -> np.ndarray:
    """``r_mu = <Phi_mu|U^dagger H U|Phi> = s_mu * sigma[b_mu]``."""
    if not targets:
        return np.zeros(0)
    b = np.array([t[0] for t in targets], dtype=np.int64)
    s = np.array([t[1] for t in targets])
    vals = s * sig.sigma[b]
    if np.abs(vals.imag).max() > REAL_TOL * max(1.0, np.abs(vals.real).max()):
        raise ComplexStateError("residuals acquired an imaginary part")
    return vals.real.copy()


def residual_projection(state: AnsatzState, ham: QubitHamiltonian, mu: Excitation,
                        flavor: ExcitationFlavor | str = ExcitationFlavor.FERMIONIC) -> float:
    flavor = ExcitationFlavor.parse(flavor)
    target = _target(mu, flavor, state.reference, state.nq)
    return float(residuals_projection(sigma_vector(state, ham), [target])[0])


# -- DIIS ---------------------------------------------------------------------------

@dataclass
class DIISResult:
    t: np.ndarray
    r: np.ndarray
    coeffs: np.ndarray
    fallback: bool


def diis_extrapolate(t_history, r_history, cond_max: float = 1e12) -> DIISResult:
    """Pulay extrapolation: minimise ``|sum c_i r_i|`` with ``sum c_i = 1``.

    Returns ``sum c_i t_i`` and ``sum c_i r_i``.  When the bordered system is
    ill-conditioned the oldest entries are dropped; if fewer than two remain
    the newest entry is returned with ``fallback=True``.
    """
    if len(t_history) != len(r_history):
        raise ValueError("parameter and residual histories differ in length")
    if len(t_history) < 2:
        raise ValueError("DIIS needs at least two history entries")
    T = np.array([np.asarray(t, dtype=np.float64) for t in t_history])
    R = np.array([np.asarray(r, dtype=np.float64) for r in r_history])
    for start in range(len(T) - 1):
        Ts, Rs = T[start:], R[start:]
        m = len(Ts)
        B = Rs @ Rs.T
        scale = np.abs(np.diag(B)).max()
        if scale == 0.0:
            break
        A = np.zeros((m + 1, m + 1))
        A[:m, :m] = B / scale
        A[:m, m] = A[m, :m] = -1.0
        cond = np.linalg.cond(A)
        if not np.isfinite(cond) or cond > cond_max:
            continue
        rhs = np.zeros(m + 1)
        rhs[m] = -1.0
        c = np.linalg.solve(A, rhs)[:m]
        coeffs = np.zeros(len(T))
        coeffs[start:] = c
        return DIISResult(c @ Ts, c @ Rs, coeffs, False)
    return DIISResult(T[-1].copy(), R[-1].copy(), np.eye(len(T))[-1], True)


# -- PQE ------------------------------------------------------------------------------

def _family(flavor: ExcitationFlavor, family) -> CircuitFamily:
    return default_family(flavor) if family is None else CircuitFamily.parse(family)


def _cnots(state: AnsatzState, family: CircuitFamily) -> int:
    return ansatz_gate_count(state, family).cnot if len(state) else 0


def pqe_solve(state: AnsatzState, problem: Problem, eps_r: float = 1e-5, max_micro: int = 50,
              diis_depth: int = 8, residual: str = "projection", denominator_floor: float = 1e-6,
              report: SolveReport | None = None, macro: int = 0, family=None) -> SolveReport:
    """Drive all in-ansatz residuals to zero, updating ``state.params`` in place.

    Each micro-iteration applies ``t <- t + r / Delta`` (``Delta`` the
    orbital-energy denominator) to the DIIS-extrapolated parameters and
    residuals.  Non-convergence is recorded in the report, not raised.
    """
    if len(state) == 0:
        raise ValueError("PQE needs a nonempty ansatz")
    if residual not in ("projection", "energy"):
        raise ValueError("residual must be 'projection' or 'energy'")
    flavors = {fl for _, fl in state.ops}
    flavor = next(iter(flavors)) if len(flavors) == 1 else ExcitationFlavor.FERMIONIC
    fam = _family(flavor, family)
    if report is None:
        report = SolveReport("pqe", flavor.value, problem.hf_energy, False,
                             hf_energy=problem.hf_energy, fci_energy=problem.fci_energy)
    targets = [_target(exc, fl, state.reference, state.nq) for exc, fl in state.ops]
    deltas = np.empty(len(state))
    for k, (exc, _fl) in enumerate(state.ops):
        raw = denominator(exc, problem.eps)
        if raw == 0.0 and denominator_floor <= 0.0:
            raise ZeroDivisionError(f"zero orbital-energy denominator for {exc}")
        deltas[k], clamped = mp_floor(raw, denominator_floor)
        if clamped:
            report.events.append(f"denominator-floor macro={macro} op={exc}")
    t_hist: deque = deque(maxlen=max(diis_depth, 1))
    r_hist: deque = deque(maxlen=max(diis_depth, 1))
    cnots = _cnots(state, fam)
    converged = False
    energy = problem.hf_energy
    for micro in range(1, max_micro + 1):
        sig = sigma_vector(state, problem.ham)
        energy = sig.energy
        if residual == "projection":
            r = residuals_projection(sig, targets)
        else:
            r = np.array([residual_exact(state, problem.ham, exc, fl, e0=energy) for exc, fl in state.ops])
        report.n_residual_evals += len(state)
        report.n_micro += 1
        norm = float(np.linalg.norm(r))
        report.log(macro, micro, energy, norm, len(state), cnots)
        if norm <= eps_r:
            converged = True
            break
        if micro == max_micro:
            break
        step = r / deltas
        # DIIS over updated amplitudes with denominator-weighted residuals as errors
        t_hist.append(state.params + step)
        r_hist.append(step)
        new = t_hist[-1]
        if diis_depth >= 2 and len(t_hist) >= 2:
            d = diis_extrapolate(list(t_hist), list(r_hist))
            if d.fallback:
                report.events.append(f"diis-fallback macro={macro} micro={micro}")
            else:
                new = d.t
        state.params = np.array(new)
    if not converged:
        report.events.append(f"pqe-not-converged macro={macro}")
    report.energy = energy
    report.converged = converged
    _finish(report, state, fam)
    return report


def _finish(report: SolveReport, state: AnsatzState, family: CircuitFamily) -> None:
    report.n_params = len(state)
    report.ops = [str(exc) for exc in state.excitations]
    report.params = [float(t) for t in state.params]
    flavor = family.flavor
    report.gate_count = {
        fam.value: ansatz_gate_count(state, fam).as_dict()
        for fam in CircuitFamily if fam.flavor is flavor
    }
    report.state = state


# -- selected PQE -----------------------------------------------------------------------

def spqe_residual_screen(state: AnsatzState, ham: QubitHamiltonian, candidates,
                         flavor: ExcitationFlavor | str = ExcitationFlavor.FERMIONIC,
                         dt: float = DEFAULT_DT) -> dict[Excitation, float]:
    """Estimate ``|r_nu|^2`` for every candidate from one prepared state.

    ``|r~> = U^dagger exp(i dt H) U |Phi>`` is formed exactly; candidate
    ``nu`` maps to determinant ``b_nu`` and gets ``|<b_nu|r~>|^2 / dt^2``
    (the infinite-shot limit of sampling ``|r~>``).  Operators already in the
    ansatz are skipped.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    flavor = ExcitationFlavor.parse(flavor)
    psi = apply_ops(state.reference_vector(), state)
    evolved = evolve_exact(psi, ham.matrix, dt).amplitudes
    rt = apply_ops(evolved, state, inverse=True)
    present = set(state.excitations)
    out: dict[Excitation, float] = {}
    for exc in candidates:
        if exc in present:
            continue
        t = excited_determinant(exc, flavor, state.reference, state.nq)
        if t is None:
            continue
        out[exc] = float(abs(rt[t[0]]) ** 2 / dt**2)
    return out


def select_operators(importances: dict[Excitation, float], omega: float) -> list[Excitation]:
    """Keep the largest importances so that the discarded ones sum to at most ``omega**2``.

    Survivors are returned in decreasing importance; an empty list means the
    selection has converged.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    ascending = sorted(importances.items(), key=lambda kv: (kv[1], kv[0].sort_key()))
    budget = omega**2
    discarded = 0.0
    cut = 0
    for _exc, val in ascending:
        if discarded + val > budget:
            break
        discarded += val
        cut += 1
    survivors = ascending[cut:]
    survivors.sort(key=lambda kv: (-kv[1], kv[0].sort_key()))
    return [exc for exc, _ in survivors]


def unselected_residual_sum(state: AnsatzState, problem: Problem, candidates,
                            flavor: ExcitationFlavor) -> float:
    """``sum |r_nu|`` over candidates outside the ansatz (exact residuals)."""
    present = set(state.excitations)
    targets = []
    for exc in candidates:
        if exc in present:
            continue
        t = excited_determinant(exc, flavor, state.reference, state.nq)
        if t is not None:
            targets.append(t)
    r = residuals_projection(sigma_vector(state, problem.ham), targets)
    return float(np.abs(r).sum())


def spqe_solve(problem: Problem, flavor: ExcitationFlavor | str = ExcitationFlavor.FERMIONIC,
               omega: float = 1e-2, dt: float = DEFAULT_DT, eps_r: float = 1e-5, max_micro: int = 50,
               diis_depth: int = 8, max_macro: int = 50, pool_kind: PoolKind | str = PoolKind.FULL,
               residual: str = "projection", family=None) -> SolveReport:
    """Grow a dUCC ansatz in batches chosen by the residual screen, solving PQE after each batch.

    Selected operators leave the pool.  At convergence the report carries
    ``sum |r_nu|`` over the remaining pool, which bounds the energy error.
    """
    flavor = ExcitationFlavor.parse(flavor)
    fam = _family(flavor, family)
    pool = list(build_pool(pool_kind, problem.occupied, problem.nq))
    state = AnsatzState(problem.nq, problem.reference)
    report = SolveReport("spqe", flavor.value, problem.hf_energy, False,
                         hf_energy=problem.hf_energy, fci_energy=problem.fci_energy)
    macro_converged = False
    pqe_ok = True
    for macro in range(1, max_macro + 1):
        imp = spqe_residual_screen(state, problem.ham, pool, flavor, dt)
        report.n_residual_evals += 1
        selected = select_operators(imp, omega)
        report.n_macro = macro
        report.log(macro, 0, report.energy, math.sqrt(sum(imp.values())), len(state), _cnots(state, fam))
        if not selected:
            macro_converged = True
            break
        chosen = set(selected)
        # in decreasing importance, each new operator enters next to the reference
        for exc in selected:
            state.prepend(exc, flavor, 0.0)
        pool = [exc for exc in pool if exc not in chosen]
        pqe_solve(state, problem, eps_r, max_micro, diis_depth, residual, report=report, macro=macro, family=fam)
        pqe_ok = report.converged
    if len(state) == 0:
        report.energy = problem.hf_energy
    report.converged = macro_converged and pqe_ok
    if not macro_converged:
        report.events.append("spqe-max-macro-reached")
    report.solver = "spqe"
    report.unselected_residual_sum = unselected_residual_sum(state, problem, pool, flavor)
    _finish(report, state, fam)
    return report


def fixed_pqe_solve(problem: Problem, flavor: ExcitationFlavor | str = ExcitationFlavor.FERMIONIC,
                    pool_kind: PoolKind | str = PoolKind.SD, **kwargs) -> SolveReport:
    """PQE on a fixed dUCC ansatz holding every operator of a pool."""
    flavor = ExcitationFlavor.parse(flavor)
    pool = build_pool(pool_kind, problem.occupied, problem.nq)
    state = AnsatzState(problem.nq, problem.reference, [(e, flavor) for e in pool], np.zeros(len(pool)))
    report = pqe_solve(state, problem, **kwargs)
    report.n_macro = 1
    return report
