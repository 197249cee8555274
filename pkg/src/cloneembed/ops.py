"""Finitary operations on {0..n-1} stored as dense value tables.

A tuple ``(x1, ..., xk)`` is encoded as ``sum(x_j * n**(k-j))``, i.e. the last
variable runs fastest.
"""

from __future__ import annotations

import hashlib

import numpy as np

MAX_ARITY = 4
MAX_SIZE = 12


class ArityMismatch(ValueError):
    pass


class PositionOutOfRange(ValueError):
    pass


def _check_caps(size: int, arity: int) -> None:
    if arity < 1 or arity > MAX_ARITY:
        raise ArityMismatch(f"arity {arity} outside 1..{MAX_ARITY}")
    if size < 1 or size > MAX_SIZE:
        raise ValueError(f"base set size {size} outside 1..{MAX_SIZE}")


def coords(size: int, arity: int) -> np.ndarray:
    """``(arity, size**arity)`` array; row j holds coordinate j of each encoded tuple."""
    grid = np.indices((size,) * arity, dtype=np.intp)
    return grid.reshape(arity, -1)


class Operation:
    """An operation of fixed arity on a base set of ``size`` points.

    Equality and hashing are extensional.
    """

    __slots__ = ("size", "arity", "table", "_key")

    def __init__(self, size: int, arity: int, table):
        _check_caps(size, arity)
        t = np.asarray(table, dtype=np.uint8).reshape(-1)
        if t.shape[0] != size**arity:
            raise ArityMismatch(f"table length {t.shape[0]} != {size}**{arity}")
        if t.size and int(t.max()) >= size:
            raise ValueError("table value outside the base set")
        t = t.copy()
        t.flags.writeable = False
        self.size = size
        self.arity = arity
        self.table = t
        self._key = None

    @property
    def key(self) -> bytes:
        if self._key is None:
            self._key = bytes([self.arity]) + self.table.tobytes()
        return self._key

    def __eq__(self, other):
        return isinstance(other, Operation) and self.size == other.size and self.key == other.key

    def __hash__(self):
        return hash((self.size, self.key))

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise ArityMismatch(f"expected {self.arity} arguments, got {len(args)}")
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return int(self.table[idx])

    def __repr__(self):
        if self.arity == 1:
            return f"Operation(1, {self.table.tolist()})"
        return f"Operation({self.arity}, <{self.digest()[:12]}>)"

    def digest(self) -> str:
        return hashlib.sha256(self.key).hexdigest()

    def values(self) -> set[int]:
        return set(np.unique(self.table).tolist())

    def to_json(self) -> dict:
        return {"arity": self.arity, "table": self.table.tolist()}

    @classmethod
    def from_json(cls, size: int, data: dict) -> "Operation":
        return cls(size, data["arity"], data["table"])


def projection(size: int, n: int, i: int) -> Operation:
    if not 1 <= i <= n:
        raise PositionOutOfRange(f"position {i} outside 1..{n}")
    return Operation(size, n, coords(size, n)[i - 1])


def identity(size: int) -> Operation:
    return projection(size, 1, 1)


def compose(f: Operation, gs) -> Operation:
    """Superposition ``f(g1, ..., gm)``; all ``g`` share one arity."""
    gs = list(gs)
    if len(gs) != f.arity:
        raise ArityMismatch(f"{f.arity}-ary operation given {len(gs)} arguments")
    n = {g.arity for g in gs}
    if len(n) != 1:
        raise ArityMismatch("inner operations have different arities")
    if any(g.size != f.size for g in gs):
        raise ArityMismatch("operations live on different base sets")
    idx = np.zeros(gs[0].table.shape[0], dtype=np.intp)
    for g in gs:
        idx = idx * f.size + g.table
    return Operation(f.size, n.pop(), f.table[idx])


def depends_on(f: Operation, i: int) -> bool:
    if not 1 <= i <= f.arity:
        raise PositionOutOfRange(f"position {i} outside 1..{f.arity}")
    t = f.table.reshape((f.size,) * f.arity)
    t = np.moveaxis(t, i - 1, 0)
    return bool((t != t[0]).any())


def essential_positions(f: Operation) -> tuple[int, ...]:
    return tuple(i for i in range(1, f.arity + 1) if depends_on(f, i))


def add_dummies(f: Operation, n: int, i: int) -> Operation:
    """The ``n``-ary operation ``(x1..xn) -> f(xi)`` for unary ``f``."""
    if f.arity != 1:
        raise ArityMismatch("add_dummies expects a unary operation")
    if not 1 <= i <= n:
        raise PositionOutOfRange(f"position {i} outside 1..{n}")
    return compose(f, [projection(f.size, n, i)])
