"""Pauli strings in symplectic (x_mask, z_mask) form and their weighted sums.

A string is the tensor product over qubits of ``I, X, Z, Y`` selected by the
bit pair ``(x_q, z_q)``: ``(0,0)=I, (1,0)=X, (0,1)=Z, (1,1)=Y``.  The letters
are the Hermitian Paulis; all phase lives in the coefficient.  Internally the
string equals ``i**popcount(x & z) * X^x Z^z``, which is what the kernels use.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import _kernels

PRUNE_TOL = 1e-14

_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def _letter(x: int, z: int, q: int) -> str:
    return "IXZY"[((x >> q) & 1) | (((z >> q) & 1) << 1)]


def format_coefficient(c: complex) -> str:
    c = complex(c)
    if c.imag == 0.0:
        return f"({c.real!r})"
    if c.real == 0.0:
        return f"({c.imag!r}i)"
    sign = "+" if c.imag >= 0 else ""
    return f"({c.real!r}{sign}{c.imag!r}i)"


def parse_coefficient(text: str) -> complex:
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError(f"coefficient must be parenthesised: {text!r}")
    body = body[1:-1].strip().replace("i", "j")
    return complex(body)


@dataclass(frozen=True)
class PauliTerm:
    coeff: complex
    x: int = 0
    z: int = 0

    @classmethod
    def from_letters(cls, letters: Mapping[int, str] | str, coeff: complex = 1.0) -> PauliTerm:
        """Build from ``{qubit: letter}`` or a string such as ``"X0 Y3"``."""
        if isinstance(letters, str):
            items = []
            for tok in letters.split():
                if tok == "I":
                    continue
                items.append((int(tok[1:]), tok[0]))
        else:
            items = list(letters.items())
        x = z = 0
        for q, ch in items:
            ch = ch.upper()
            if ch not in "IXYZ":
                raise ValueError(f"unknown Pauli letter {ch!r}")
            if ch in "XY":
                x |= 1 << q
            if ch in "ZY":
                z |= 1 << q
        return cls(complex(coeff), x, z)

    @property
    def key(self) -> tuple[int, int]:
        return (self.x, self.z)

    @property
    def support(self) -> int:
        return self.x | self.z

    def letters(self) -> list[tuple[int, str]]:
        sup = self.support
        return [(q, _letter(self.x, self.z, q)) for q in range(sup.bit_length()) if (sup >> q) & 1]

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            return multiply(self, other)
        return PauliTerm(self.coeff * other, self.x, self.z)

    __rmul__ = __mul__

    def adjoint(self) -> PauliTerm:
        return PauliTerm(self.coeff.conjugate(), self.x, self.z)

    def __str__(self) -> str:
        body = " ".join(f"{ch}{q}" for q, ch in self.letters()) or "I"
        return f"{format_coefficient(self.coeff)} {body}"

    @classmethod
    def parse(cls, text: str) -> PauliTerm:
        m = re.fullmatch(r"\s*(\([^)]*\))\s*(.*?)\s*", text)
        if m is None:
            raise ValueError(f"cannot parse Pauli term {text!r}")
        return cls.from_letters(m.group(2), parse_coefficient(m.group(1)))

    def to_matrix(self, nq: int) -> np.ndarray:
        return PauliSum([self]).to_matrix(nq)


def _phase_exponent(x1: int, z1: int, x2: int, z2: int) -> int:
    """Power of ``i`` produced when multiplying two Hermitian strings."""
    y1 = (x1 & z1).bit_count()
    y2 = (x2 & z2).bit_count()
    x3, z3 = x1 ^ x2, z1 ^ z2
    y3 = (x3 & z3).bit_count()
    # P = i^y X^x Z^z and Z^z1 X^x2 = (-1)^|z1&x2| X^x2 Z^z1
    return (y1 + y2 - y3 + 2 * (z1 & x2).bit_count()) % 4


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    k = _phase_exponent(a.x, a.z, b.x, b.z)
    return PauliTerm(a.coeff * b.coeff * _I_POW[k], a.x ^ b.x, a.z ^ b.z)


def commutes(a: PauliTerm, b: PauliTerm) -> bool:
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2 == 0


class PauliSum:
    """Immutable linear combination of Pauli strings keyed by ``(x, z)``."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[PauliTerm] | Mapping[tuple[int, int], complex] = (), tol: float = PRUNE_TOL):
        acc: dict[tuple[int, int], complex] = {}
        if isinstance(terms, Mapping):
            items = ((k, complex(v)) for k, v in terms.items())
        else:
            items = ((t.key, t.coeff) for t in terms)
        for k, c in items:
            acc[k] = acc.get(k, 0j) + c
        self._terms = {k: c for k, c in acc.items() if abs(c) > tol}

    @classmethod
    def _raw(cls, terms: dict[tuple[int, int], complex]) -> PauliSum:
        obj = cls.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> PauliSum:
        return cls([PauliTerm(complex(coeff), 0, 0)])

    # -- container protocol -------------------------------------------------
    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        for (x, z) in sorted(self._terms, key=lambda k: (k[1], k[0])):
            yield PauliTerm(self._terms[(x, z)], x, z)

    def __contains__(self, key) -> bool:
        if isinstance(key, PauliTerm):
            key = key.key
        return key in self._terms

    def coefficient(self, x: int, z: int) -> complex:
        return self._terms.get((x, z), 0j)

    @property
    def terms(self) -> dict[tuple[int, int], complex]:
        return dict(self._terms)

    @property
    def support(self) -> int:
        s = 0
        for x, z in self._terms:
            s |= x | z
        return s

    @property
    def min_qubits(self) -> int:
        return self.support.bit_length()

    # -- algebra ------------------------------------------------------------
    def __add__(self, other) -> PauliSum:
        other = _as_sum(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0j) + c
        return PauliSum(out)

    __radd__ = __add__

    def __neg__(self) -> PauliSum:
        return PauliSum._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> PauliSum:
        return self + (-_as_sum(other))

    def __rsub__(self, other) -> PauliSum:
        return _as_sum(other) + (-self)

    def scale(self, factor: complex) -> PauliSum:
        return PauliSum({k: c * factor for k, c in self._terms.items()})

    def __mul__(self, other) -> PauliSum:
        if isinstance(other, (PauliSum, PauliTerm)):
            other = _as_sum(other)
            out: dict[tuple[int, int], complex] = {}
            for (x1, z1), c1 in self._terms.items():
                for (x2, z2), c2 in other._terms.items():
                    k = _phase_exponent(x1, z1, x2, z2)
                    key = (x1 ^ x2, z1 ^ z2)
                    out[key] = out.get(key, 0j) + c1 * c2 * _I_POW[k]
            return PauliSum(out)
        return self.scale(other)

    def __rmul__(self, other) -> PauliSum:
        if isinstance(other, PauliTerm):
            return _as_sum(other) * self
        return self.scale(other)

    def __truediv__(self, other) -> PauliSum:
        return self.scale(1.0 / other)

    def adjoint(self) -> PauliSum:
        return PauliSum._raw({k: c.conjugate() for k, c in self._terms.items()})

    def prune(self, tol: float = PRUNE_TOL) -> PauliSum:
        return PauliSum._raw({k: c for k, c in self._terms.items() if abs(c) > tol})

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def is_antihermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.real) <= tol for c in self._terms.values())

    def commutator(self, other) -> PauliSum:
        other = _as_sum(other)
        return self * other - other * self

    def allclose(self, other, atol: float = 1e-12) -> bool:
        diff = self - _as_sum(other)
        return all(abs(c) <= atol for c in diff._terms.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, (PauliSum, PauliTerm)):
            return NotImplemented
        return self._terms == _as_sum(other)._terms

    __hash__ = None

    # -- numerics -----------------------------------------------------------
    def to_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Kernel form: masks plus coefficients of ``X^x Z^z`` (phase folded in)."""
        terms = list(self)
        xs = np.fromiter((t.x for t in terms), dtype=np.int64, count=len(terms))
        zs = np.fromiter((t.z for t in terms), dtype=np.int64, count=len(terms))
        coefs = np.array(
            [t.coeff * _I_POW[(t.x & t.z).bit_count() % 4] for t in terms], dtype=np.complex128
        )
        return xs, zs, coefs

    def apply(self, psi: np.ndarray) -> np.ndarray:
        xs, zs, coefs = self.to_arrays()
        return _kernels.pauli_apply(xs, zs, coefs, np.ascontiguousarray(psi, dtype=np.complex128))

    def to_sparse(self, nq: int):
        import scipy.sparse as sp

        if self.min_qubits > nq:
            raise ValueError(f"operator acts on {self.min_qubits} qubits, asked for {nq}")
        xs, zs, coefs = self.to_arrays()
        dim = 1 << nq
        if len(xs) == 0:
            return sp.csr_matrix((dim, dim), dtype=np.complex128)
        rows, cols, vals = _kernels.pauli_coo(xs, zs, coefs, nq)
        mat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
        mat.sum_duplicates()
        mat.eliminate_zeros()
        return mat

    def to_matrix(self, nq: int) -> np.ndarray:
        return self.to_sparse(nq).toarray()

    # -- text -----------------------------------------------------------------
    def __str__(self) -> str:
        return "\n".join(str(t) for t in self) if self._terms else "(0.0) I"

    def __repr__(self) -> str:
        return f"PauliSum({len(self)} terms)"

    @classmethod
    def parse(cls, text: str) -> PauliSum:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        return cls([PauliTerm.parse(ln) for ln in lines], tol=0.0).prune()


def _as_sum(obj) -> PauliSum:
    if isinstance(obj, PauliSum):
        return obj
    if isinstance(obj, PauliTerm):
        return PauliSum([obj])
    if isinstance(obj, (int, float, complex)):
        return PauliSum.identity(obj)
    raise TypeError(f"cannot combine PauliSum with {type(obj).__name__}")
