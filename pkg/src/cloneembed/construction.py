"""The gadget operations phi_p, m_p^{q1,q2} and the generator systems built from them."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .family import IndexFamily
from .lattice import FiniteLattice, Ideal
from .ops import Operation, coords


class UnknownIndex(KeyError):
    pass


class InadmissibleTriple(ValueError):
    pass


class WellDefinednessViolation(AssertionError):
    pass


# Generator symbols. Identity of a gadget is by label, never by table.


@dataclass(frozen=True, order=True)
class Phi:
    p: int
    arity = 1

    def __str__(self):
        return f"phi{self.p}"


@dataclass(frozen=True, order=True)
class M:
    p: int
    q1: int
    q2: int
    arity = 3

    def __str__(self):
        return f"m{self.p}_{self.q1}_{self.q2}"


@dataclass(frozen=True, order=True)
class Spoilt:
    """A spoilt member of the clone used as a generator; ``key`` indexes an inventory."""

    key: int
    arity: int = field(compare=False, default=1)

    def __str__(self):
        return f"s{self.key}/{self.arity}"


def phi_table(fam: IndexFamily, p: int) -> np.ndarray:
    if not 0 <= p < len(fam):
        raise UnknownIndex(p)
    size = fam.ground.size
    t = np.full(size, 4, dtype=np.uint8)
    t[2] = 2
    for a in fam.ground.A:
        t[a] = 1 if a in fam.sets[p] else 0
    return t


def build_phi(fam: IndexFamily, p: int) -> Operation:
    return Operation(fam.ground.size, 1, phi_table(fam, p))


def m_table(phi_q1: np.ndarray, phi_q2: np.ndarray, phi_p: np.ndarray) -> np.ndarray:
    """Evaluate the three-case definition of m over all of X^3, asserting case overlap agrees."""
    size = phi_p.shape[0]
    x, y, z = coords(size, 3)
    case1 = (y == phi_q1[x]) & (z == phi_q2[x])
    case2 = (
        ((x == 2) | (y == 2) | (z == 2))
        & (y != 1) & (y != 4)
        & (z != 1) & (z != 4)
    )
    out = np.full(x.shape[0], 4, dtype=np.uint8)
    out[case2] = 2
    out[case1] = phi_p[x[case1]]
    both = case1 & case2
    if (phi_p[x[both]] != 2).any():
        raise WellDefinednessViolation("phi_p(x) and 2 disagree on an overlap tuple")
    return out


@dataclass(frozen=True, eq=False)
class GeneratorSystem:
    lattice: FiniteLattice
    family: IndexFamily
    phi: dict  # p -> Operation
    m: dict  # (p, q1, q2) -> Operation

    @property
    def size(self) -> int:
        return self.family.ground.size

    @property
    def A(self) -> tuple[int, ...]:
        return self.family.ground.A

    def op(self, sym) -> Operation:
        if isinstance(sym, Phi):
            return self.phi[sym.p]
        if isinstance(sym, M):
            return self.m[(sym.p, sym.q1, sym.q2)]
        raise UnknownIndex(sym)

    @cached_property
    def phi_symbols(self) -> list[Phi]:
        return [Phi(p) for p in sorted(self.phi)]

    @cached_property
    def m_symbols(self) -> list[M]:
        return [M(*k) for k in sorted(self.m)]

    @cached_property
    def phi_keys(self) -> dict:
        """Unary table bytes -> p."""
        return {self.phi[p].table.tobytes(): p for p in sorted(self.phi)}

    def phi_of(self, table) -> int | None:
        return self.phi_keys.get(np.asarray(table, dtype=np.uint8).tobytes())

    def to_json(self) -> dict:
        return {
            "ground_size": self.size,
            "phi": [{"label": str(Phi(p)), "p": p, **self.phi[p].to_json()} for p in sorted(self.phi)],
            "m": [
                {"label": str(M(*k)), "p": k[0], "q1": k[1], "q2": k[2], **self.m[k].to_json()}
                for k in sorted(self.m)
            ],
        }


def admissible_triples(L: FiniteLattice) -> list[tuple[int, int, int]]:
    return [
        (p, q1, q2)
        for p in L.elements
        for q1 in L.elements
        for q2 in L.elements
        if L.le(p, L.join[q1][q2])
    ]


def build_m(L: FiniteLattice, phi: dict, p: int, q1: int, q2: int) -> Operation:
    if not L.le(p, L.join[q1][q2]):
        raise InadmissibleTriple((p, q1, q2))
    size = phi[p].size
    return Operation(size, 3, m_table(phi[q1].table, phi[q2].table, phi[p].table))


def build_system(L: FiniteLattice, fam: IndexFamily) -> GeneratorSystem:
    if len(fam) != L.size:
        raise ValueError(f"family indexes {len(fam)} sets but the lattice has {L.size} elements")
    phi = {p: build_phi(fam, p) for p in L.elements}
    m = {t: build_m(L, phi, *t) for t in admissible_triples(L)}
    return GeneratorSystem(L, fam, phi, m)


def generators_for_ideal(sys: GeneratorSystem, ideal, spoilt=()) -> list[tuple[str, object]]:
    """Phi_I, all of M, then the spoilt inventory, each tagged with its provenance."""
    members = ideal.members if isinstance(ideal, Ideal) else frozenset(ideal)
    out = [("phi", Phi(p)) for p in sorted(members)]
    out += [("m", s) for s in sys.m_symbols]
    out += [("spoilt", s) for s in spoilt]
    return out


FAULT_KINDS = ("phi", "m")


def inject_fault(sys: GeneratorSystem, kind: str = "phi") -> tuple[GeneratorSystem, dict]:
    """Copy of ``sys`` with one table cell corrupted, for testing that the suites notice.

    ``phi``: flip phi_p at the first point of A between 0 and 1 (p is the top
    element), leaving the m tables built from the original phi.
    ``m``: overwrite the cell ``(a, phi_q1(a), phi_q2(a))`` of the first m so it
    no longer agrees with phi_p there.
    """
    a = sys.A[0]
    phi, m = dict(sys.phi), dict(sys.m)
    if kind == "phi":
        p = sys.lattice.top
        t = sys.phi[p].table.copy()
        t[a] = 1 - t[a]
        phi[p] = Operation(sys.size, 1, t)
        where = {"table": str(Phi(p)), "cell": [a], "old": int(sys.phi[p].table[a]), "new": int(t[a])}
    elif kind == "m":
        key = min(sys.m)
        p, q1, q2 = key
        s = sys.size
        cell = (a * s + int(sys.phi[q1].table[a])) * s + int(sys.phi[q2].table[a])
        t = sys.m[key].table.copy()
        t[cell] = 4 if t[cell] != 4 else 2
        m[key] = Operation(s, 3, t)
        where = {
            "table": str(M(*key)),
            "cell": [a, int(sys.phi[q1].table[a]), int(sys.phi[q2].table[a])],
            "old": int(sys.m[key].table[cell]),
            "new": int(t[cell]),
        }
    else:
        raise ValueError(f"unknown fault kind {kind!r}; expected one of {FAULT_KINDS}")
    return GeneratorSystem(sys.lattice, sys.family, phi, m), {"kind": kind, **where}
