"""Time the numpy and numba statevector kernels side by side.

    python benchmarks/bench_kernels.py [--nq 16] [--repeat 5]

Also times one end-to-end SPQE run per backend in a fresh interpreter, since
the backend is fixed at import time by ``EXCITEQ_NUMBA``.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from exciteq._kernels import _numba, _numpy
from exciteq.circuit import GateKind
from exciteq.fermion import Excitation, ExcitationFlavor, excitation_action
from exciteq.sim import gate_matrix

SOLVE_SNIPPET = """
import time
from exciteq import BACKEND
from exciteq.solvers import Problem, spqe_solve
p = Problem.from_fixture("h6-stretched")
spqe_solve(p, "fermionic", omega=1e-2)  # warm-up and JIT compile
t = time.perf_counter()
spqe_solve(p, "fermionic", omega=1e-2)
print(BACKEND, time.perf_counter() - t)
"""


def bench(label: str, fn, repeat: int) -> float:
    fn()  # warm-up (JIT compile)
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<28s} {best * 1e3:9.3f} ms")
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--nq", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-solve", action="store_true")
    args = ap.parse_args()
    nq = args.nq
    rng = np.random.default_rng(0)
    psi = rng.normal(size=1 << nq) + 1j * rng.normal(size=1 << nq)
    psi /= np.linalg.norm(psi)
    ry = gate_matrix(GateKind.RY, 0.3)
    exc = Excitation((0, 1, 2), (nq - 3, nq - 2, nq - 1))
    act = excitation_action(exc, ExcitationFlavor.FERMIONIC, nq)
    nterms = 64
    xs = rng.integers(0, 1 << nq, size=nterms, dtype=np.int64)
    zs = rng.integers(0, 1 << nq, size=nterms, dtype=np.int64)
    coefs = rng.normal(size=nterms) + 0j

    timings = {}
    for name, mod in (("numpy", _numpy), ("numba", _numba)):
        print(f"{name} ({nq} qubits)")
        block = psi.copy().reshape(-1, 1)
        v = psi.copy()
        timings[name] = [
            bench("apply_1q (controlled Ry)", lambda: mod.apply_1q(block, nq // 2, np.int64(1), np.int64(1), ry),
                  args.repeat),
            bench("rotate_pairs (triple)", lambda: mod.rotate_pairs(v, act.src, act.dst, act.sign, 0.9, 0.1),
                  args.repeat),
            bench(f"pauli_apply ({nterms} strings)", lambda: mod.pauli_apply(xs, zs, coefs, psi), args.repeat),
        ]
    ratio = np.array(timings["numpy"]) / np.array(timings["numba"])
    print("speed-up numba over numpy:", ", ".join(f"{r:.1f}x" for r in ratio))

    if not args.skip_solve:
        print("SPQE on stretched H6 (12 qubits):")
        for flag in ("0", "1"):
            env = dict(os.environ, EXCITEQ_NUMBA=flag)
            out = subprocess.run([sys.executable, "-c", SOLVE_SNIPPET], env=env, capture_output=True,
                                 text=True, check=True).stdout.split()
            print(f"  {out[0]:<6s} {float(out[1]):8.2f} s")


if __name__ == "__main__":
    main()
