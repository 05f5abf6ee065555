"""Variational solvers: BFGS-optimised dUCC and ADAPT-VQE."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..fermion import Excitation, ExcitationFlavor
from .ansatz import AnsatzState, apply_exponential, apply_generator, apply_ops
from .pools import PoolKind, build_pool
from .pqe import _cnots, _family, _finish
from .problem import Problem
from .report import SolveReport


def energy(state: AnsatzState, problem: Problem, params: np.ndarray | None = None) -> float:
    st = state if params is None else AnsatzState(state.nq, state.reference, state.ops, params)
    psi = apply_ops(st.reference_vector(), st)
    return float(np.vdot(psi, problem.ham.matrix @ psi).real)


def energy_and_gradient(state: AnsatzState, problem: Problem,
                        params: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """Energy and its exact parameter gradient by one forward and one reverse sweep.

    ``dE/dt_k = 2 Re <lambda_k| G_k |psi_k>`` where ``psi_k`` is the state
    after the first ``k`` exponentials and ``lambda_k`` is ``H|psi>`` pulled
    back through the later ones.
    """
    params = state.params if params is None else np.asarray(params, dtype=np.float64)
    st = AnsatzState(state.nq, state.reference, state.ops, params)
    psi = apply_ops(st.reference_vector(), st)
    lam = problem.ham.matrix @ psi
    e = float(np.vdot(psi, lam).real)
    grad = np.empty(len(st))
    for k in range(len(st) - 1, -1, -1):
        exc, fl = st.ops[k]
        grad[k] = 2.0 * np.vdot(lam, apply_generator(psi, exc, fl)).real
        apply_exponential(psi, exc, fl, -params[k])
        apply_exponential(lam, exc, fl, -params[k])
    return e, grad


@dataclass
class BFGSResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    n_iter: int
    converged: bool
    line_search_failed: bool
    n_fun: int
    n_grad: int


def bfgs_minimize(fun: Callable[[np.ndarray], float],
                  fun_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
                  x0: np.ndarray, gtol: float = 1e-5, max_iter: int = 50,
                  c1: float = 1e-4, min_step: float = 1e-12) -> BFGSResult:
    """Quasi-Newton minimisation with an inverse-Hessian BFGS update.

    Steps use backtracking (halving) until the Armijo sufficient-decrease
    condition holds.  Converged when the gradient 2-norm is at most ``gtol``.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    n = x.size
    f, g = fun_grad(x)
    n_fun, n_grad = 1, 1
    hinv = np.eye(n)
    failed = False
    it = 0
    while True:
        if np.linalg.norm(g) <= gtol:
            return BFGSResult(x, f, g, it, True, failed, n_fun, n_grad)
        if it >= max_iter:
            return BFGSResult(x, f, g, it, False, failed, n_fun, n_grad)
        it += 1
        p = -hinv @ g
        slope = float(g @ p)
        if slope >= 0:
            hinv = np.eye(n)
            p = -g
            slope = float(g @ p)
        alpha = 1.0
        while True:
            f_new = fun(x + alpha * p)
            n_fun += 1
            if f_new <= f + c1 * alpha * slope:
                break
            alpha *= 0.5
            if alpha < min_step:
                failed = True
                return BFGSResult(x, f, g, it, False, failed, n_fun, n_grad)
        s = alpha * p
        x_new = x + s
        f_new, g_new = fun_grad(x_new)
        n_fun += 1
        n_grad += 1
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12:
            rho = 1.0 / sy
            v = np.eye(n) - rho * np.outer(s, y)
            hinv = v @ hinv @ v.T + rho * np.outer(s, s)
        x, f, g = x_new, f_new, g_new


def vqe_solve(state: AnsatzState, problem: Problem, gtol: float = 1e-5, max_iter: int = 50,
              report: SolveReport | None = None, macro: int = 0, family=None) -> SolveReport:
    """Minimise the ansatz energy over its parameters, in place."""
    if len(state) == 0:
        raise ValueError("VQE needs a nonempty ansatz")
    flavor = state.ops[0][1]
    fam = _family(flavor, family)
    if report is None:
        report = SolveReport("vqe", flavor.value, problem.hf_energy, False,
                             hf_energy=problem.hf_energy, fci_energy=problem.fci_energy)
    res = bfgs_minimize(lambda x: energy(state, problem, x),
                        lambda x: energy_and_gradient(state, problem, x),
                        state.params, gtol=gtol, max_iter=max_iter)
    state.params = res.x
    report.n_energy_evals += res.n_fun
    report.n_vqe_gradient_evals += res.n_grad * len(state)
    report.n_micro += res.n_iter
    report.log(macro, res.n_iter, res.fun, float(np.linalg.norm(res.grad)), len(state), _cnots(state, fam))
    if res.line_search_failed:
        report.events.append(f"line-search-failed macro={macro}")
    if not res.converged:
        report.events.append(f"vqe-not-converged macro={macro}")
    report.energy = res.fun
    report.converged = res.converged
    _finish(report, state, fam)
    return report


def pool_gradients(state: AnsatzState, problem: Problem, candidates,
                   flavor: ExcitationFlavor) -> np.ndarray:
    """``<psi|[H, G_nu]|psi> = 2 Re <H psi|G_nu psi>`` for every candidate."""
    psi = apply_ops(state.reference_vector(), state)
    hpsi = problem.ham.matrix @ psi
    return np.array([2.0 * np.vdot(hpsi, apply_generator(psi, exc, flavor)).real for exc in candidates])


def adapt_vqe_solve(problem: Problem, pool_kind: PoolKind | str = PoolKind.GSD,
                    flavor: ExcitationFlavor | str = ExcitationFlavor.QUBIT, eps_g: float = 1e-3,
                    max_macro: int = 100, gtol: float = 1e-5, max_iter: int = 50,
                    family=None) -> SolveReport:
    """Append the largest-gradient pool operator, re-optimise, repeat.

    The pool never drains, so an operator may be chosen again.  Stops when
    every pool gradient is below ``eps_g`` in magnitude.
    """
    flavor = ExcitationFlavor.parse(flavor)
    fam = _family(flavor, family)
    pool: list[Excitation] = list(build_pool(pool_kind, problem.occupied, problem.nq))
    state = AnsatzState(problem.nq, problem.reference)
    report = SolveReport("adapt-vqe", flavor.value, problem.hf_energy, False,
                         hf_energy=problem.hf_energy, fci_energy=problem.fci_energy)
    grads_converged = False
    vqe_ok = True
    for macro in range(1, max_macro + 1):
        g = pool_gradients(state, problem, pool, flavor)
        report.n_gradient_evals += len(pool)
        report.n_macro = macro
        gmax = float(np.abs(g).max(initial=0.0))
        report.log(macro, 0, report.energy, gmax, len(state), _cnots(state, fam))
        if gmax < eps_g:
            grads_converged = True
            break
        # first maximum wins, and the pool is in canonical order
        best = int(np.argmax(np.abs(g)))
        state.append(pool[best], flavor, 0.0)
        vqe_solve(state, problem, gtol, max_iter, report=report, macro=macro, family=fam)
        vqe_ok = report.converged
    report.converged = grads_converged and vqe_ok
    if not grads_converged:
        report.events.append("adapt-max-macro-reached")
    _finish(report, state, fam)
    return report


def fixed_vqe_solve(problem: Problem, flavor: ExcitationFlavor | str = ExcitationFlavor.FERMIONIC,
                    pool_kind: PoolKind | str = PoolKind.SD, **kwargs) -> SolveReport:
    """VQE on a fixed dUCC ansatz holding every operator of a pool."""
    flavor = ExcitationFlavor.parse(flavor)
    pool = build_pool(pool_kind, problem.occupied, problem.nq)
    state = AnsatzState(problem.nq, problem.reference, [(e, flavor) for e in pool], np.zeros(len(pool)))
    report = vqe_solve(state, problem, **kwargs)
    report.n_macro = 1
    return report
