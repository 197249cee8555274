"""Finite lattices and the ideal calculus of their join-semilattice of compact elements.

For a finite lattice every element is compact, so the semilattice of compact
elements is the whole lattice and every (nonempty) ideal is principal.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class LatticeError(ValueError):
    pass


class NotAPartialOrder(LatticeError):
    pass


class NotALattice(LatticeError):
    def __init__(self, pair, kind):
        self.pair = pair
        self.kind = kind
        super().__init__(f"no unique {kind} for pair {pair}")


class UnknownElement(LatticeError):
    pass


class EmptyGenerator(LatticeError):
    pass


def _closure(n: int, pairs: Iterable[tuple[int, int]]) -> list[list[bool]]:
    leq = [[i == j for j in range(n)] for i in range(n)]
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise UnknownElement(f"pair {(i, j)} out of range for {n} elements")
        leq[i][j] = True
    return leq


def _check_order(leq: list[list[bool]]) -> None:
    n = len(leq)
    for i in range(n):
        if not leq[i][i]:
            raise NotAPartialOrder(f"not reflexive at {i}")
    for i, j in itertools.combinations(range(n), 2):
        if leq[i][j] and leq[j][i]:
            raise NotAPartialOrder(f"not antisymmetric: {i} and {j}")
    for i, j, k in itertools.product(range(n), repeat=3):
        if leq[i][j] and leq[j][k] and not leq[i][k]:
            raise NotAPartialOrder(f"not transitive: {i} <= {j} <= {k}")


@dataclass(frozen=True, eq=False)
class FiniteLattice:
    """A finite lattice given by its order relation, with join and meet tables.

    Elements are the ids ``0..n-1``; ``names`` are display labels only.
    """

    names: tuple[str, ...]
    leq: tuple[tuple[bool, ...], ...]
    join: tuple[tuple[int, ...], ...]
    meet: tuple[tuple[int, ...], ...]
    bottom: int
    top: int
    _down: tuple[frozenset, ...] = field(repr=False, default=())

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def elements(self) -> range:
        return range(self.size)

    def le(self, x: int, y: int) -> bool:
        return self.leq[x][y]

    def down(self, x: int) -> frozenset:
        self._check(x)
        return self._down[x]

    def join_all(self, xs: Iterable[int]) -> int:
        acc = self.bottom
        for x in xs:
            acc = self.join[acc][x]
        return acc

    def meet_all(self, xs: Iterable[int]) -> int:
        acc = self.top
        for x in xs:
            acc = self.meet[acc][x]
        return acc

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownElement(name) from None

    def _check(self, x: int) -> None:
        if not (isinstance(x, int) and 0 <= x < self.size):
            raise UnknownElement(x)

    def covers(self) -> list[tuple[int, int]]:
        """Covering pairs ``(x, y)`` with ``x < y`` and nothing strictly between."""
        out = []
        for x, y in itertools.permutations(self.elements, 2):
            if self.leq[x][y] and not any(
                z not in (x, y) and self.leq[x][z] and self.leq[z][y] for z in self.elements
            ):
                out.append((x, y))
        return sorted(out)

    def relabel(self, perm: Sequence[int]) -> "FiniteLattice":
        """Copy with element ``i`` renamed to ``perm[i]``."""
        n = self.size
        pairs = [(perm[i], perm[j]) for i in range(n) for j in range(n) if self.leq[i][j]]
        names = [""] * n
        for i in range(n):
            names[perm[i]] = self.names[i]
        return complete_from_order(n, pairs, names)

    def to_json(self) -> dict:
        pairs = [[i, j] for i in self.elements for j in self.elements if i != j and self.leq[i][j]]
        return {"elements": list(self.names), "leq": pairs}

    def __repr__(self) -> str:
        return f"FiniteLattice({list(self.names)})"


def complete_from_order(
    n: int, pairs: Iterable[tuple[int, int]], names: Sequence[str] | None = None
) -> FiniteLattice:
    """Build a lattice from an order relation on ``n`` elements.

    ``pairs`` lists ``(i, j)`` meaning ``i <= j``; reflexive pairs may be
    omitted. The relation must already be transitive.
    """
    if n < 1:
        raise NotAPartialOrder("a lattice needs at least one element")
    leq = _closure(n, pairs)
    _check_order(leq)
    join = [[0] * n for _ in range(n)]
    meet = [[0] * n for _ in range(n)]
    for i, j in itertools.product(range(n), repeat=2):
        ub = [k for k in range(n) if leq[i][k] and leq[j][k]]
        least = [k for k in ub if all(leq[k][u] for u in ub)]
        if len(least) != 1:
            raise NotALattice((i, j), "least upper bound")
        lb = [k for k in range(n) if leq[k][i] and leq[k][j]]
        greatest = [k for k in lb if all(leq[u][k] for u in lb)]
        if len(greatest) != 1:
            raise NotALattice((i, j), "greatest lower bound")
        join[i][j] = least[0]
        meet[i][j] = greatest[0]
    bottom = next(k for k in range(n) if all(leq[k]))
    top = next(k for k in range(n) if all(leq[i][k] for i in range(n)))
    if names is None:
        names = [str(i) for i in range(n)]
    if len(names) != n or len(set(names)) != n:
        raise LatticeError("element names must be distinct and match the size")
    down = tuple(frozenset(i for i in range(n) if leq[i][x]) for x in range(n))
    return FiniteLattice(
        names=tuple(names),
        leq=tuple(tuple(r) for r in leq),
        join=tuple(tuple(r) for r in join),
        meet=tuple(tuple(r) for r in meet),
        bottom=bottom,
        top=top,
        _down=down,
    )


def lattice_from_json(data: dict) -> FiniteLattice:
    names = data["elements"]
    pairs = [tuple(p) for p in data.get("leq", [])]
    for p in pairs:
        if len(p) != 2 or not all(isinstance(v, int) for v in p):
            raise LatticeError(f"malformed order pair {list(p)}")
    return complete_from_order(len(names), pairs, names)


def load_lattice(path: str | Path) -> FiniteLattice:
    with open(path) as fh:
        return lattice_from_json(json.load(fh))


# --- ideals ----------------------------------------------------------------


@dataclass(frozen=True)
class Ideal:
    members: frozenset

    def __contains__(self, x) -> bool:
        return x in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __le__(self, other: "Ideal") -> bool:
        return self.members <= other.members


def is_ideal(L: FiniteLattice, s: Iterable[int]) -> bool:
    s = frozenset(s)
    if not s:
        return False
    for x in s:
        if not L.down(x) <= s:
            return False
    return all(L.join[x][y] in s for x in s for y in s)


def principal_ideal(L: FiniteLattice, x: int) -> Ideal:
    return Ideal(L.down(x))


def generated_ideal(L: FiniteLattice, s: Iterable[int]) -> Ideal:
    """Smallest ideal containing ``s``: down-closure of the join-closure."""
    s = set(s)
    if not s:
        raise EmptyGenerator("the empty set generates no ideal")
    for x in s:
        L._check(x)
    closed = set(s)
    frontier = list(s)
    while frontier:
        x = frontier.pop()
        for y in list(closed):
            z = L.join[x][y]
            if z not in closed:
                closed.add(z)
                frontier.append(z)
    out = set()
    for x in closed:
        out |= L.down(x)
    return Ideal(frozenset(out))


def ideal_join(L: FiniteLattice, i: Ideal, j: Ideal) -> Ideal:
    return generated_ideal(L, i.members | j.members)


def ideal_meet(L: FiniteLattice, i: Ideal, j: Ideal) -> Ideal:
    return Ideal(i.members & j.members)


def all_ideals(L: FiniteLattice) -> list[Ideal]:
    """All nonempty down- and join-closed subsets, ordered by their top element."""
    return [principal_ideal(L, x) for x in L.elements]


def scan_ideals(L: FiniteLattice) -> list[Ideal]:
    """Brute-force counterpart of :func:`all_ideals` over every subset."""
    out = []
    for r in range(1, L.size + 1):
        for combo in itertools.combinations(L.elements, r):
            if is_ideal(L, combo):
                out.append(Ideal(frozenset(combo)))
    return out


def ideal_top(L: FiniteLattice, i: Ideal) -> int:
    return L.join_all(i.members)


# --- fixtures --------------------------------------------------------------


def chain(n: int) -> FiniteLattice:
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    if n == 1:
        names = ["bot"]
    else:
        names = ["bot"] + [f"c{i}" for i in range(1, n - 1)] + ["top"]
    return complete_from_order(n, pairs, names)


def m3() -> FiniteLattice:
    # bot, a, b, c, top
    pairs = [(0, k) for k in range(5)] + [(k, 4) for k in range(5)]
    return complete_from_order(5, pairs, ["bot", "a", "b", "c", "top"])


def n5() -> FiniteLattice:
    # bot < a < c < top, bot < b < top
    pairs = [(0, k) for k in range(5)] + [(k, 4) for k in range(5)] + [(1, 3)]
    return complete_from_order(5, pairs, ["bot", "a", "b", "c", "top"])


def b2() -> FiniteLattice:
    pairs = [(0, k) for k in range(4)] + [(k, 3) for k in range(4)]
    return complete_from_order(4, pairs, ["bot", "a", "b", "top"])


FIXTURES = {
    "one": lambda: chain(1),
    "chain2": lambda: chain(2),
    "chain3": lambda: chain(3),
    "b2": b2,
    "m3": m3,
    "n5": n5,
}
