from __future__ import annotations

import functools

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def _problem(name: str):
    from exciteq.solvers import Problem

    return Problem.from_fixture(name)


@pytest.fixture(scope="session")
def h2():
    return _problem("h2")


@pytest.fixture(scope="session")
def h4():
    return _problem("h4")


@pytest.fixture(scope="session")
def h6_stretched():
    return _problem("h6-stretched")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def kron_ladder(p: int, nq: int, create: bool) -> np.ndarray:
    """Jordan-Wigner ladder built by Kronecker products; qubit 0 is the least significant factor."""
    lower = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
    z = np.diag([1.0, -1.0]).astype(complex)
    eye = np.eye(2, dtype=complex)
    mats = [z if q < p else (lower if q == p else eye) for q in range(nq)]
    out = np.array([[1.0 + 0j]])
    for m in mats:  # build qubit nq-1 (x) ... (x) qubit 0
        out = np.kron(m, out)
    return out.conj().T if create else out


def kron_qubit_ladder(p: int, nq: int, create: bool) -> np.ndarray:
    lower = np.array([[0, 1], [0, 0]], dtype=complex)
    out = np.array([[1.0 + 0j]])
    for q in range(nq):
        out = np.kron(lower if q == p else np.eye(2), out)
    return out.conj().T if create else out


def kron_generator(occ, vir, nq: int, fermionic: bool = True) -> np.ndarray:
    """``prod a^v  prod a_o (ascending) - h.c.`` from Kronecker-built ladders."""
    lad = kron_ladder if fermionic else kron_qubit_ladder
    op = np.eye(1 << nq, dtype=complex)
    for v in vir:
        op = op @ lad(v, nq, True)
    for o in occ:
        op = op @ lad(o, nq, False)
    return op - op.conj().T


# -- acceptance summary: one PASS/FAIL line per criterion ---------------------------------

_CRITERIA: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_c" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.failed:
        _CRITERIA[name] = "FAIL"
    elif report.when == "call" and name not in _CRITERIA:
        _CRITERIA[name] = "PASS" if report.passed else "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        num = int(name[len("test_c"):].split("_")[0])
        label = name.split("_", 2)[2].replace("_", " ")
        terminalreporter.write_line(f"criterion {num:2d} {_CRITERIA[name]:4s} {label}")
