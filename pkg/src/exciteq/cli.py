"""Command-line interface: ``exciteq {synth,count,solve,fci}``.

Exit codes: 0 success, 2 bad arguments or configuration, 3 circuit
verification failure, 4 unreadable or malformed integral file, 5 solver did
not converge (the partial report is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .circuit import count_gates
from .fermion import Excitation, matrix_of
from .synth import CircuitFamily, count_formula, synth

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_CHEM, EXIT_NONCONVERGED = 0, 2, 3, 4, 5
VERIFY_TOL = 1e-10
VERIFY_MAX_QUBITS = 12
WORKED_EXAMPLE = "occ:1,2,5;vir:8,9,11"

log = logging.getLogger("exciteq")


class ConfigError(Exception):
    pass


class ChemFileError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _families(value: str) -> list[CircuitFamily]:
    if value.strip().lower() == "all":
        return list(CircuitFamily)
    return [CircuitFamily.parse(v) for v in value.split(",")]


# -- synth --------------------------------------------------------------------------------

def cmd_synth(args) -> int:
    try:
        exc = Excitation.parse(args.op)
        family = CircuitFamily.parse(args.family)
    except ValueError as err:
        raise ConfigError(str(err)) from None
    if not math.isfinite(args.theta):
        raise ConfigError("theta must be finite")
    nq = args.nq if args.nq is not None else exc.min_qubits
    if nq < exc.min_qubits:
        raise ConfigError(f"{exc} needs at least {exc.min_qubits} qubits")
    circ = synth(exc, family, args.theta, nq=nq)
    counts = count_gates(circ)
    out = {
        "schema_version": SCHEMA_VERSION,
        "op": str(exc),
        "family": family.value,
        "theta": args.theta,
        "counts": counts.as_dict(),
        "formula_counts": count_formula(exc, family).as_dict(),
        "circuit": circ.to_json(),
    }
    code = EXIT_OK
    if args.verify:
        if nq > VERIFY_MAX_QUBITS:
            raise ConfigError(f"--verify supports at most {VERIFY_MAX_QUBITS} qubits")
        import scipy.linalg

        from .sim import circuit_unitary

        exact = scipy.linalg.expm(args.theta * matrix_of(exc, family.flavor, nq))
        dev = float(np.abs(circuit_unitary(circ) - exact).max())
        out["verify"] = {"max_deviation": dev, "tolerance": VERIFY_TOL, "passed": dev <= VERIFY_TOL}
        if dev > VERIFY_TOL:
            code = EXIT_VERIFY
    print(_dump(out))
    return code


# -- count ---------------------------------------------------------------------------------

def _scheme_excitation(rank: int, scheme: str) -> Excitation:
    if scheme == "consecutive":
        return Excitation(tuple(range(rank)), tuple(range(rank, 2 * rank)))
    if scheme == "spread":
        # one empty qubit between consecutive indices
        idx = list(range(0, 4 * rank, 2))
        return Excitation(tuple(idx[:rank]), tuple(idx[rank:]))
    raise ConfigError(f"unknown index scheme {scheme!r}")


def _parse_ranks(text: str) -> list[int]:
    try:
        if "-" in text:
            lo, hi = (int(v) for v in text.split("-", 1))
            ranks = list(range(lo, hi + 1))
        else:
            ranks = [int(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse ranks {text!r}") from None
    if not ranks or min(ranks) < 1:
        raise ConfigError("ranks must be >= 1")
    return ranks


def cmd_count(args) -> int:
    try:
        families = _families(args.family)
    except ValueError as err:
        raise ConfigError(str(err)) from None
    if args.example:
        rows = [(Excitation.parse(WORKED_EXAMPLE), fam) for fam in families]
    else:
        rows = [(_scheme_excitation(n, args.scheme), fam) for n in _parse_ranks(args.ranks) for fam in families]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "family", "op", "single_qubit", "cnot", "cz"])
    for exc, fam in rows:
        c = count_formula(exc, fam)
        w.writerow([exc.rank, fam.value, str(exc), c.single_qubit, c.cnot, c.cz])
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


# -- solve ----------------------------------------------------------------------------------

SOLVE_DEFAULTS = {
    "fcidump": None,
    "fixture": None,
    "solver": "spqe",
    "flavor": "feb",
    "pool": None,
    "omega": 1e-2,
    "eps_g": 1e-3,
    "eps_r": 1e-5,
    "dt": 1e-3,
    "gtol": 1e-5,
    "max_micro": 50,
    "max_macro": 50,
    "max_iter": 50,
    "diis_depth": 8,
    "fci": False,
    "ops": None,
    "params": None,
    "output": None,
    "trace": None,
}
SOLVERS = ("pqe", "spqe", "vqe", "adapt-vqe", "ucc-fixed")
POSITIVE = ("omega", "eps_g", "eps_r", "dt", "gtol")
COUNTS = ("max_micro", "max_macro", "max_iter")


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - set(SOLVE_DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return data


def resolve_config(args) -> dict:
    cfg = dict(SOLVE_DEFAULTS)
    cfg.update(load_config(args.config))
    for key in SOLVE_DEFAULTS:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            cfg[key] = val
    if cfg["solver"] not in SOLVERS:
        raise ConfigError(f"solver must be one of {', '.join(SOLVERS)}")
    for key in POSITIVE:
        if not (isinstance(cfg[key], (int, float)) and cfg[key] > 0):
            raise ConfigError(f"{key} must be positive")
    for key in COUNTS:
        if not (isinstance(cfg[key], int) and cfg[key] >= 1):
            raise ConfigError(f"{key} must be a positive integer")
    if not isinstance(cfg["diis_depth"], int) or cfg["diis_depth"] < 0:
        raise ConfigError("diis_depth must be a non-negative integer")
    if (cfg["fcidump"] is None) == (cfg["fixture"] is None):
        raise ConfigError("give exactly one of --fcidump or --fixture")
    try:
        cfg["family"] = CircuitFamily.parse(cfg["flavor"])
    except ValueError:
        raise ConfigError(f"unknown flavor {cfg['flavor']!r}") from None
    if cfg["pool"] is None:
        cfg["pool"] = {"adapt-vqe": "gsd", "spqe": "full"}.get(cfg["solver"], "sd")
    return cfg


def _load_integrals(cfg: dict):
    from .chem import FcidumpError, load_fixture, read_fcidump

    try:
        if cfg["fixture"] is not None:
            return load_fixture(cfg["fixture"])[0]
        return read_fcidump(cfg["fcidump"])
    except KeyError as err:
        raise ConfigError(str(err)) from None
    except (OSError, FcidumpError) as err:
        raise ChemFileError(str(err)) from None


def _ucc_fixed(problem, cfg, flavor):
    from .solvers import AnsatzState, SolveReport, build_pool, energy
    from .solvers.pqe import _finish

    if cfg["ops"]:
        try:
            excs = [Excitation.parse(op) for op in cfg["ops"]]
        except ValueError as err:
            raise ConfigError(str(err)) from None
    else:
        excs = list(build_pool(cfg["pool"], problem.occupied, problem.nq))
    params = cfg["params"] if cfg["params"] is not None else [0.0] * len(excs)
    if len(params) != len(excs):
        raise ConfigError("params and ops differ in length")
    state = AnsatzState(problem.nq, problem.reference, [(e, flavor) for e in excs], params)
    e = energy(state, problem)
    report = SolveReport("ucc-fixed", flavor.value, e, True, hf_energy=problem.hf_energy,
                         fci_energy=problem.fci_energy, n_energy_evals=1)
    report.log(0, 0, e, 0.0, len(state), 0)
    _finish(report, state, cfg["family"])
    return report


def run_solver(cfg: dict):
    from .solvers import Problem, adapt_vqe_solve, fixed_pqe_solve, fixed_vqe_solve, spqe_solve

    ints = _load_integrals(cfg)
    try:
        problem = Problem.from_integrals(ints, with_fci=cfg["fci"])
    except ValueError as err:
        raise ConfigError(str(err)) from None
    fam = cfg["family"]
    flavor = fam.flavor
    solver = cfg["solver"]
    pqe_kw = dict(eps_r=cfg["eps_r"], max_micro=cfg["max_micro"], diis_depth=cfg["diis_depth"], family=fam)
    if solver == "spqe":
        return spqe_solve(problem, flavor, omega=cfg["omega"], dt=cfg["dt"], max_macro=cfg["max_macro"],
                          pool_kind=cfg["pool"], **pqe_kw)
    if solver == "pqe":
        return fixed_pqe_solve(problem, flavor, cfg["pool"], **pqe_kw)
    if solver == "vqe":
        return fixed_vqe_solve(problem, flavor, cfg["pool"], gtol=cfg["gtol"], max_iter=cfg["max_iter"], family=fam)
    if solver == "adapt-vqe":
        return adapt_vqe_solve(problem, cfg["pool"], flavor, eps_g=cfg["eps_g"], max_macro=cfg["max_macro"],
                               gtol=cfg["gtol"], max_iter=cfg["max_iter"], family=fam)
    return _ucc_fixed(problem, cfg, flavor)


def cmd_solve(args) -> int:
    cfg = resolve_config(args)
    report = run_solver(cfg)
    text = _dump(report.to_dict())
    if cfg["output"]:
        Path(cfg["output"]).write_text(text + "\n")
    else:
        print(text)
    if cfg["trace"]:
        Path(cfg["trace"]).write_text(report.trace_csv())
    if not report.converged:
        log.warning("solver did not converge: %s", "; ".join(report.events[-3:]))
        return EXIT_NONCONVERGED
    return EXIT_OK


# -- fci -------------------------------------------------------------------------------------

def cmd_fci(args) -> int:
    from .chem import build_hamiltonian, fci_solve

    if (args.fcidump is None) == (args.fixture is None):
        raise ConfigError("give exactly one of --fcidump or --fixture")
    ints = _load_integrals({"fcidump": args.fcidump, "fixture": args.fixture})
    nelec = ints.n_electrons if args.nelec is None else args.nelec
    sz = ints.ms2 / 2.0 if args.sz is None else args.sz
    try:
        e, _ = fci_solve(build_hamiltonian(ints), nelec, sz)
    except ValueError as err:
        raise ConfigError(str(err)) from None
    print(_dump({"schema_version": SCHEMA_VERSION, "energy": e, "n_electrons": nelec, "sz": sz, "nq": ints.nq}))
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="exciteq", description="Excitation circuits and dUCC eigensolvers.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="emit the circuit for one excitation as JSON")
    s.add_argument("--op", required=True, help='excitation, e.g. "occ:1,2,5;vir:8,9,11"')
    s.add_argument("--family", default="feb", help="feb | qeb | standard-fermionic | standard-qubit")
    s.add_argument("--theta", type=float, default=0.1)
    s.add_argument("--nq", type=int, default=None, help="register size (default: smallest that fits)")
    s.add_argument("--verify", action="store_true", help="compare against the exact exponential")
    s.set_defaults(func=cmd_synth)

    c = sub.add_parser("count", help="closed-form gate counts as CSV")
    c.add_argument("--ranks", default="1-6", help='e.g. "1-6" or "1,3"')
    c.add_argument("--family", default="all", help="comma list of families or 'all'")
    c.add_argument("--scheme", default="consecutive", choices=["consecutive", "spread"],
                   help="index layout used for index-dependent counts")
    c.add_argument("--example", action="store_true", help=f"counts for {WORKED_EXAMPLE}")
    c.set_defaults(func=cmd_count)

    v = sub.add_parser("solve", help="run an eigensolver on an FCIDUMP")
    v.add_argument("--config", default=None, help="JSON file with solve options; flags win")
    v.add_argument("--fcidump", default=None)
    v.add_argument("--fixture", default=None, help="bundled molecule: h2, h4, h6, h6-stretched")
    v.add_argument("--solver", default=None, help="|".join(SOLVERS))
    v.add_argument("--flavor", default=None, help="feb | qeb | standard-fermionic | standard-qubit")
    v.add_argument("--pool", default=None, help="full | sd | gsd")
    v.add_argument("--omega", type=float, default=None)
    v.add_argument("--eps-g", dest="eps_g", type=float, default=None)
    v.add_argument("--eps-r", dest="eps_r", type=float, default=None)
    v.add_argument("--dt", type=float, default=None)
    v.add_argument("--gtol", type=float, default=None)
    v.add_argument("--max-micro", dest="max_micro", type=int, default=None)
    v.add_argument("--max-macro", dest="max_macro", type=int, default=None)
    v.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    v.add_argument("--diis-depth", dest="diis_depth", type=int, default=None)
    v.add_argument("--ops", nargs="+", default=None, help="ucc-fixed operators")
    v.add_argument("--params", nargs="+", type=float, default=None, help="ucc-fixed amplitudes")
    v.add_argument("--fci", action="store_true", default=None, help="add the exact reference energy")
    v.add_argument("--output", default=None, help="write the JSON report here instead of stdout")
    v.add_argument("--trace", default=None, help="write the iteration trace CSV here")
    v.set_defaults(func=cmd_solve)

    f = sub.add_parser("fci", help="exact ground-state energy in a fixed N/Sz sector")
    f.add_argument("--fcidump", default=None)
    f.add_argument("--fixture", default=None)
    f.add_argument("--nelec", type=int, default=None)
    f.add_argument("--sz", type=float, default=None)
    f.set_defaults(func=cmd_fci)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s", stream=sys.stderr)
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except ChemFileError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CHEM


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
