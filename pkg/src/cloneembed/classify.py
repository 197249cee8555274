"""Distracted and spoilt operations.

A member ``t`` of the clone is unspoilt when substituting unary members for its
variables can land in Phi. The search only ranges over ``Phi + {id}`` per
coordinate; :func:`classify_spoilt_wide` widens it to arbitrary unary
candidates for cross-validation on small systems.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .ops import ArityMismatch, Operation

ID = -1  # label of the identity in a substitution tuple


@dataclass(frozen=True)
class SpoiltVerdict:
    spoilt: bool
    witness: tuple | None = None  # per coordinate: ID or p (meaning phi_p)
    result: int | None = None  # p with t(witness) = phi_p


def is_distracted(f: Operation, A) -> bool:
    if f.arity != 1:
        raise ArityMismatch("distracted is defined for unary operations only")
    vals = f.table[list(A)]
    return bool(((vals == 2) | (vals == 4)).any())


def distracted_rows(tables: np.ndarray, A) -> np.ndarray:
    """Row mask of unary tables that are distracted."""
    vals = tables[:, list(A)]
    return ((vals == 2) | (vals == 4)).any(axis=1)


class Substitutions:
    """All substitutions of ``Phi + {id}`` into ``n`` coordinates, evaluated in bulk.

    Substitution tuples are ordered lexicographically with ``id`` first and
    then ``phi_p`` by increasing ``p``.
    """

    def __init__(self, sys, n: int):
        self.sys = sys
        self.n = n
        size = sys.size
        self.labels = [ID] + sorted(sys.phi)
        unary = np.stack(
            [np.arange(size, dtype=np.intp)] + [sys.phi[p].table.astype(np.intp) for p in sorted(sys.phi)]
        )
        self.tuples = np.array(list(itertools.product(range(len(self.labels)), repeat=n)), dtype=np.intp)
        idx = np.zeros((self.tuples.shape[0], size), dtype=np.intp)
        for c in range(n):
            idx = idx * size + unary[self.tuples[:, c]]
        self.idx = idx
        self.pow = size ** np.arange(size - 1, -1, -1, dtype=np.int64)
        keys = np.array([int(sys.phi[p].table.astype(np.int64) @ self.pow) for p in sorted(sys.phi)], dtype=np.int64)
        order = np.argsort(keys)
        self._phi_keys = keys[order]
        self._phi_ps = np.array(sorted(sys.phi), dtype=np.intp)[order]

    @property
    def count(self) -> int:
        return self.tuples.shape[0]

    def label_tuple(self, k: int) -> tuple:
        return tuple(self.labels[c] for c in self.tuples[k])

    def profile(self, tables: np.ndarray) -> np.ndarray:
        """``(N, count, size)`` unary results of every substitution."""
        return tables[:, self.idx]

    def codes(self, tables: np.ndarray, chunk: int = 4096) -> np.ndarray:
        """``(N, count)`` array: p where the substitution yields phi_p, else -1."""
        tables = np.atleast_2d(tables)
        out = np.empty((tables.shape[0], self.count), dtype=np.int16)
        for lo in range(0, tables.shape[0], chunk):
            prof = tables[lo : lo + chunk][:, self.idx].astype(np.int64)
            keys = prof @ self.pow
            pos = np.searchsorted(self._phi_keys, keys)
            pos = np.minimum(pos, len(self._phi_keys) - 1)
            hit = self._phi_keys[pos] == keys
            out[lo : lo + chunk] = np.where(hit, self._phi_ps[pos], -1)
        return out


_SUBS: dict = {}


def substitutions(sys, n: int) -> Substitutions:
    key = (id(sys), n)
    hit = _SUBS.get(key)
    if hit is None or hit.sys is not sys:
        hit = _SUBS[key] = Substitutions(sys, n)
    return hit


def verdict_from_codes(subs: Substitutions, row: np.ndarray) -> SpoiltVerdict:
    hits = np.flatnonzero(row >= 0)
    if hits.size == 0:
        return SpoiltVerdict(True)
    k = int(hits[0])
    return SpoiltVerdict(False, subs.label_tuple(k), int(row[k]))


def classify_spoilt(f: Operation, sys) -> SpoiltVerdict:
    subs = substitutions(sys, f.arity)
    return verdict_from_codes(subs, subs.codes(f.table[None, :])[0])


def classify_spoilt_wide(f: Operation, sys, unary_pool) -> bool:
    """Unspoilt test over an arbitrary pool of unary tables (slow, exhaustive)."""
    pool = [np.asarray(u, dtype=np.intp) for u in unary_pool]
    size = sys.size
    for combo in itertools.product(pool, repeat=f.arity):
        idx = np.zeros(size, dtype=np.intp)
        for u in combo:
            idx = idx * size + u
        if sys.phi_of(f.table[idx]) is not None:
            return False
    return True


def witness_uniqueness(subs: Substitutions, row: np.ndarray, essential) -> dict:
    """For each essential coordinate, the set of labels used across all witnesses."""
    hits = np.flatnonzero(row >= 0)
    out = {}
    for i in essential:
        out[i] = sorted({subs.labels[c] for c in subs.tuples[hits, i - 1]})
    return out


def essential_mask(tables: np.ndarray, size: int, n: int) -> np.ndarray:
    """``(N, n)`` bool: whether each table depends on each coordinate."""
    t = tables.reshape((tables.shape[0],) + (size,) * n)
    out = np.zeros((tables.shape[0], n), dtype=bool)
    for i in range(n):
        moved = np.moveaxis(t, i + 1, 1)
        out[:, i] = (moved != moved[:, :1]).reshape(tables.shape[0], -1).any(axis=1)
    return out


class Inventory:
    """Spoilt and unspoilt members of a bounded enumeration of the full clone, per arity."""

    def __init__(self, sys, slices: dict):
        self.sys = sys
        self.slices = slices
        self.codes = {n: substitutions(sys, n).codes(en.tables) for n, en in slices.items()}
        self.unspoilt = {n: np.flatnonzero((c >= 0).any(axis=1)) for n, c in self.codes.items()}
        self.spoilt = {n: np.flatnonzero(~(c >= 0).any(axis=1)) for n, c in self.codes.items()}

    @property
    def partial(self) -> bool:
        return any(en.exhausted for en in self.slices.values())

    def spoilt_generators(self) -> list:
        """``(symbol, operation)`` for every spoilt member, keyed in arity-major order."""
        from .construction import Spoilt

        out = []
        for n in sorted(self.slices):
            en = self.slices[n]
            for j in self.spoilt[n].tolist():
                out.append((Spoilt(len(out), n), en.operation(j)))
        return out

    def spoilt_keys(self, n: int) -> set:
        en = self.slices.get(n)
        if en is None:
            return set()
        return {en.tables[j].tobytes() for j in self.spoilt[n].tolist()}

    def summary(self) -> dict:
        return {
            str(n): {
                **en.summary(),
                "spoilt": int(self.spoilt[n].size),
                "unspoilt": int(self.unspoilt[n].size),
            }
            for n, en in sorted(self.slices.items())
        }


def spoilt_inventory(sys, max_arity: int, depth: int, budget: int, max_work=None) -> Inventory:
    from .enumeration import enumerate_clone

    gens = sys.phi_symbols + sys.m_symbols
    slices = {
        n: enumerate_clone(sys, gens, n, depth, budget, max_work=max_work) for n in range(1, max_arity + 1)
    }
    return Inventory(sys, slices)
