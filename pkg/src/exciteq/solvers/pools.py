"""Operator pools: particle-hole (full or singles/doubles) and generalized SD."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from ..fermion import Excitation


class PoolKind(enum.Enum):
    FULL = "full"
    SD = "sd"
    GSD = "gsd"

    @classmethod
    def parse(cls, value: str | PoolKind) -> PoolKind:
        if isinstance(value, cls):
            return value
        return cls(value.strip().lower())


@dataclass(frozen=True)
class OperatorPool:
    kind: PoolKind
    candidates: tuple[Excitation, ...]

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)


def _n_alpha(indices) -> int:
    return sum(1 for q in indices if q % 2 == 0)


def _particle_hole(occupied: list[int], virtual: list[int], max_rank: int) -> list[Excitation]:
    out = []
    for n in range(1, max_rank + 1):
        for occ in itertools.combinations(occupied, n):
            na = _n_alpha(occ)
            for vir in itertools.combinations(virtual, n):
                if _n_alpha(vir) == na:
                    out.append(Excitation(occ, vir))
    return out


def _generalized_sd(nq: int) -> list[Excitation]:
    out = []
    for p, q in itertools.combinations(range(nq), 2):
        if p % 2 == q % 2:
            out.append(Excitation((p,), (q,)))
    pairs = list(itertools.combinations(range(nq), 2))
    for a, b in itertools.combinations(pairs, 2):
        if set(a) & set(b):
            continue
        if sorted(q % 2 for q in a) == sorted(q % 2 for q in b):
            # a->b and b->a differ only by sign; keep one
            out.append(Excitation(a, b))
    return out


def build_pool(kind: PoolKind | str, reference: int | list[int] | tuple[int, ...], nq: int,
               max_rank: int | None = None) -> OperatorPool:
    """Sz-conserving excitations of one kind, deduplicated and canonically ordered.

    ``reference`` is the occupied qubit list (or its basis index).  The full
    particle-hole pool reaches rank ``N`` (or ``max_rank``); GSD ignores the
    occupation and draws from all spin-orbital pairs.
    """
    kind = PoolKind.parse(kind)
    if isinstance(reference, int):
        occupied = [q for q in range(nq) if (reference >> q) & 1]
    else:
        occupied = sorted(set(int(q) for q in reference))
    if any(q < 0 or q >= nq for q in occupied):
        raise ValueError("reference occupies a qubit outside the register")
    virtual = [q for q in range(nq) if q not in occupied]
    if kind is PoolKind.GSD:
        cands = _generalized_sd(nq)
    else:
        top = min(len(occupied), len(virtual))
        if kind is PoolKind.SD:
            top = min(top, 2)
        if max_rank is not None:
            top = min(top, max_rank)
        cands = _particle_hole(occupied, virtual, top)
    return OperatorPool(kind, tuple(sorted(set(cands), key=Excitation.sort_key)))
