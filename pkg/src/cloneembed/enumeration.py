"""Bounded closure of a generator set under superposition.

Operations are deduplicated extensionally; each distinct table keeps the first
term that produced it, so the stored witnesses form a hash-consed DAG. Terms
are generated level by level (level d = minimal term depth d). Within a level,
argument tuples are visited in shells of increasing maximal rank, where the
newest operations get the smallest ranks; a budget-truncated run therefore
samples every generator instead of exhausting the first one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .classify import ID, substitutions
from .construction import Phi, Spoilt
from .ops import Operation, coords
from .terms import App, Var

log = logging.getLogger(__name__)

CHUNK_CELLS = 1 << 21


class BudgetExhausted(Exception):
    """Raised only on request; enumerations normally just set ``exhausted``."""


@dataclass
class Enumeration:
    sys: object
    arity: int
    gens: list  # symbols, indexable by origin[0]
    gen_tables: list
    tables: np.ndarray = None
    depth: list = field(default_factory=list)
    origin: list = field(default_factory=list)  # None for variables, else (gen index, arg op indices)
    exhausted: bool = False
    saturated: bool = False
    max_depth: int = 0
    work: int = 0
    _index: dict = field(default_factory=dict, repr=False)
    _terms: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.depth)

    @property
    def size(self) -> int:
        return self.sys.size

    def index_of(self, table) -> int | None:
        return self._index.get(np.asarray(table, dtype=np.uint8).tobytes())

    def __contains__(self, op) -> bool:
        t = op.table if isinstance(op, Operation) else op
        return self.index_of(t) is not None

    def operation(self, j: int) -> Operation:
        return Operation(self.size, self.arity, self.tables[j])

    def term(self, j: int):
        hit = self._terms.get(j)
        if hit is not None:
            return hit
        o = self.origin[j]
        if o is None:
            t = Var(j + 1)
        else:
            g, args = o
            t = App(self.gens[g], tuple(self._arg_term(a) for a in args))
        self._terms[j] = t
        return t

    def _arg_term(self, a):
        if isinstance(a, Var):
            return a
        return self.term(a)

    def __iter__(self):
        for j in range(len(self)):
            yield self.term(j), self.operation(j)

    def keys(self) -> set:
        return set(self._index)

    def _add(self, row: np.ndarray, depth: int, origin) -> int:
        j = len(self.depth)
        self._index[row.tobytes()] = j
        self.depth.append(depth)
        self.origin.append(origin)
        return j

    def summary(self) -> dict:
        return {
            "arity": self.arity,
            "members": len(self),
            "max_depth": self.max_depth,
            "exhausted": self.exhausted,
            "saturated": self.saturated,
            "work": self.work,
        }


def _shell(s: int, r: int, limit: int):
    """Rank tuples in ``[0..s]^r`` whose maximum is ``s``, in chunks of at most ``limit`` rows."""
    for j in range(r):
        shape = (s,) * j + (1,) + (s + 1,) * (r - 1 - j)
        total = int(np.prod(shape))
        for lo in range(0, total, limit):
            flat = np.arange(lo, min(total, lo + limit))
            cols = np.stack(np.unravel_index(flat, shape), axis=1)
            cols[:, j] = s
            yield cols


def _resolve_gens(sys, generators, extra):
    syms, tables = [], []
    for g in generators:
        sym = g[1] if isinstance(g, tuple) else g
        if isinstance(sym, Spoilt):
            op = extra[sym.key]
        else:
            op = sys.op(sym)
        syms.append(sym)
        tables.append(op.table)
    return syms, tables


def _new_rows(res: np.ndarray, seen: dict):
    """Indices of rows in ``res`` not yet in ``seen``, first occurrence only, in order."""
    view = np.ascontiguousarray(res).view(np.dtype((np.void, res.shape[1]))).ravel()
    _, first = np.unique(view, return_index=True)
    first.sort()
    return [i for i in first.tolist() if res[i].tobytes() not in seen]


def enumerate_clone(sys, generators, arity: int, depth: int, budget: int, extra=None, max_work=None):
    """Breadth-first closure of ``generators`` at a fixed arity.

    Stops after ``depth`` levels, once ``budget`` distinct operations are
    held, or after ``max_work`` candidate tuples (default ``20 * budget``).
    """
    if arity < 1 or depth < 0 or budget < 1:
        raise ValueError("need arity >= 1, depth >= 0, budget >= 1")
    if max_work is None:
        max_work = 20 * budget
    syms, gtabs = _resolve_gens(sys, generators, extra)
    size = sys.size
    width = size**arity
    en = Enumeration(sys, arity, syms, gtabs)
    rows = []
    for i, row in enumerate(coords(size, arity).astype(np.uint8)):
        if row.tobytes() in en._index:
            continue
        if len(en) >= budget:
            en.exhausted = True
            break
        en._add(row, 0, None)
        rows.append(row)
    tables = np.array(rows, dtype=np.uint8).reshape(-1, width)
    levels = [0, len(en)]  # levels[d] = first index of level d
    for d in range(1, depth + 1):
        if en.exhausted:
            break
        new = np.arange(levels[d - 1], levels[d])
        if new.size == 0:
            en.saturated = True
            break
        order = np.concatenate([new, np.arange(0, levels[d - 1])])
        n_new = new.size
        pool = tables
        fresh = []
        stop = False
        for s in range(order.size):
            for g, (sym, gt) in enumerate(zip(syms, gtabs)):
                r = sym.arity
                limit = max(1, CHUNK_CELLS // (width * r))
                for ranks in _shell(s, r, limit):
                    if s >= n_new:
                        ranks = ranks[(ranks < n_new).any(axis=1)]
                        if ranks.shape[0] == 0:
                            continue
                    args = order[ranks]
                    idx = np.zeros((args.shape[0], width), dtype=np.intp)
                    for c in range(r):
                        idx = idx * size + pool[args[:, c]]
                    res = gt[idx]
                    en.work += args.shape[0]
                    for i in _new_rows(res, en._index):
                        if len(en) >= budget:
                            en.exhausted = True
                            stop = True
                            break
                        en._add(res[i], d, (g, tuple(int(a) for a in args[i])))
                        fresh.append(res[i])
                    if stop:
                        break
                    if en.work >= max_work:
                        en.exhausted = True
                        stop = True
                        break
                if stop:
                    break
            if stop:
                break
        if fresh:
            tables = np.concatenate([tables, np.array(fresh, dtype=np.uint8)])
        levels.append(len(en))
        en.max_depth = d
        if stop:
            break
    else:
        if depth >= 1 and levels[-1] == levels[-2]:
            en.saturated = True
    en.tables = tables
    return en


# --- the unspoilt core ------------------------------------------------------


@dataclass
class Closure(Enumeration):
    """Unspoilt part of a bounded closure, with one substitution witness per member."""

    witness: list = field(default_factory=list)  # per member: (label tuple, p)
    rejected: int = 0

    def signature(self) -> frozenset:
        """All p such that some dummy-extended phi_p is a member."""
        out = set()
        g = coords(self.size, self.arity)
        for p, op in self.sys.phi.items():
            for i in range(self.arity):
                if self.index_of(op.table[g[i]]) is not None:
                    out.add(p)
                    break
        return frozenset(out)


def unspoilt_closure(sys, allowed, arity: int, depth: int, budget: int, max_work=None) -> Closure:
    """Enumerate unspoilt members of the closure of ``Phi_allowed + M``.

    Candidates are restricted to the shapes an unspoilt term can take:
    projections, ``phi_p(x_i)`` with ``p`` allowed, and ``m(x_i, t2, t3)``
    where a single substitution from ``Phi + {id}`` sends ``x_i`` to ``id``,
    ``t2`` to ``phi_q1`` and ``t3`` to ``phi_q2``. Every member is therefore
    unspoilt by construction; that nothing unspoilt is missed is checked
    against :func:`enumerate_clone` on small systems.
    """
    if max_work is None:
        max_work = 20 * budget
    allowed = sorted(set(allowed))
    subs = substitutions(sys, arity)
    size = sys.size
    width = size**arity
    msyms = sys.m_symbols
    syms = [Phi(p) for p in sorted(sys.phi)] + list(msyms)
    gtabs = [sys.op(s).table for s in syms]
    n_phi = len(sys.phi)
    phi_pos = {p: k for k, p in enumerate(sorted(sys.phi))}
    cl = Closure(sys, arity, syms, gtabs)
    g = coords(size, arity).astype(np.uint8)
    rows = []
    for i in range(arity):
        if len(cl) >= budget:
            cl.exhausted = True
            break
        cl._add(g[i], 0, None)
        cl.witness.append(None)
        rows.append(g[i])
    tables = np.array(rows, dtype=np.uint8).reshape(-1, width)
    codes = subs.codes(tables)
    for j, row in enumerate(codes):
        hit = int(np.flatnonzero(row >= 0)[0])
        cl.witness[j] = (subs.label_tuple(hit), int(row[hit]))
    # substitutions with coordinate i set to id, per i
    id_subs = [np.flatnonzero(subs.tuples[:, i] == 0) for i in range(arity)]
    levels = [0, len(cl)]
    for d in range(1, depth + 1):
        if cl.exhausted:
            break
        lo, hi = levels[d - 1], levels[d]
        if hi == lo:
            cl.saturated = True
            break
        isnew = np.zeros(hi, dtype=bool)
        isnew[lo:hi] = True
        streams = []
        if d == 1:
            phi_rows = [(phi_pos[p], i, -1, -1) for p in allowed for i in range(arity)]
            if phi_rows:
                streams.append(iter([np.array(phi_rows, dtype=np.intp)]))
        limit = max(1, CHUNK_CELLS // width)
        for mk, sym in enumerate(msyms):
            streams.append(_m_candidates(n_phi + mk, sym, codes[:hi], isnew, id_subs, limit))
        fresh, fresh_codes = [], []
        stop = False
        for block in _round_robin(streams):
            res = np.empty((block.shape[0], width), dtype=np.uint8)
            is_phi = block[:, 2] < 0
            for k in np.flatnonzero(is_phi):
                res[k] = gtabs[block[k, 0]][g[block[k, 1]]]
            mrows = np.flatnonzero(~is_phi)
            if mrows.size:
                b = block[mrows]
                idx = g[b[:, 1]].astype(np.intp) * size * size
                idx += tables[b[:, 2]].astype(np.intp) * size
                idx += tables[b[:, 3]]
                res[mrows] = gtabs[b[0, 0]][idx]
            cl.work += block.shape[0]
            new_idx = _new_rows(res, cl._index)
            if new_idx:
                new_codes = subs.codes(res[new_idx])
            for n_i, i in enumerate(new_idx):
                if len(cl) >= budget:
                    cl.exhausted = True
                    stop = True
                    break
                gk, xi, t2, t3 = (int(v) for v in block[i])
                if t2 < 0:
                    origin = (gk, (Var(xi + 1),))
                else:
                    origin = (gk, (Var(xi + 1), t2, t3))
                row = new_codes[n_i]
                hits = np.flatnonzero(row >= 0)
                if hits.size == 0:
                    # only possible when the gadget tables are inconsistent
                    cl.rejected += 1
                    continue
                hit = int(hits[0])
                cl._add(res[i], d, origin)
                cl.witness.append((subs.label_tuple(hit), int(row[hit])))
                fresh.append(res[i])
                fresh_codes.append(row)
            if stop:
                break
            if cl.work >= max_work:
                cl.exhausted = True
                stop = True
                break
        if fresh:
            tables = np.concatenate([tables, np.array(fresh, dtype=np.uint8)])
            codes = np.concatenate([codes, np.array(fresh_codes, dtype=codes.dtype)])
        levels.append(len(cl))
        cl.max_depth = d
        if stop:
            break
    else:
        if depth >= 1 and levels[-1] == levels[-2]:
            cl.saturated = True
    cl.tables = tables
    cl.codes = codes
    return cl


def _m_candidates(gk, sym, codes, isnew, id_subs, limit):
    """Blocks of ``(gk, i, t2, t3)`` rows: some substitution with ``x_i -> id`` sends
    ``t2`` to ``phi_q1`` and ``t3`` to ``phi_q2``, and ``t2`` or ``t3`` is new."""
    for i, ks in enumerate(id_subs):
        for k in ks:
            col = codes[:, k]
            b2 = np.flatnonzero(col == sym.q1)
            b3 = np.flatnonzero(col == sym.q2)
            if b2.size == 0 or b3.size == 0:
                continue
            n2, n3 = isnew[b2], isnew[b3]
            if not (n2.any() or n3.any()):
                continue
            step = max(1, limit // b3.size)
            for lo in range(0, b2.size, step):
                aa, bb = np.meshgrid(b2[lo : lo + step], b3, indexing="ij")
                keep = n2[lo : lo + step, None] | n3[None, :]
                t2, t3 = aa[keep], bb[keep]
                if t2.size:
                    yield np.column_stack([np.full(t2.size, gk), np.full(t2.size, i), t2, t3])


def _round_robin(streams):
    streams = list(streams)
    while streams:
        alive = []
        for st in streams:
            block = next(st, None)
            if block is not None:
                yield block
                alive.append(st)
        streams = alive


def witness_labels(labels) -> str:
    return "(" + ", ".join("id" if c == ID else f"phi{c}" for c in labels) + ")"


@dataclass
class Representations:
    """Reduced unspoilt terms of one arity, kept without extensional dedup."""

    arity: int
    terms: list
    tables: np.ndarray
    codes: np.ndarray
    exhausted: bool = False


def representations(sys, arity: int, depth: int, limit: int, allowed=None) -> Representations:
    """Reduced terms of unspoilt operations up to ``depth``, at most ``limit`` of them.

    Uses the candidate shapes of :func:`unspoilt_closure` but keeps every
    syntactically distinct reduced term.
    """
    from .terms import reduce

    allowed = sorted(sys.phi) if allowed is None else sorted(set(allowed))
    subs = substitutions(sys, arity)
    size = sys.size
    width = size**arity
    msyms = sys.m_symbols
    g = coords(size, arity).astype(np.uint8)
    terms = [Var(i + 1) for i in range(arity)]
    tables = g.copy()
    codes = subs.codes(tables)
    known = set(terms)
    id_subs = [np.flatnonzero(subs.tuples[:, i] == 0) for i in range(arity)]
    levels = [0, len(terms)]
    exhausted = False
    for d in range(1, depth + 1):
        lo, hi = levels[d - 1], levels[d]
        if hi == lo or exhausted:
            break
        new_terms, new_rows = [], []
        if d == 1:
            for p in allowed:
                for i in range(arity):
                    t = App(Phi(p), (Var(i + 1),))
                    known.add(t)
                    new_terms.append(t)
                    new_rows.append(sys.phi[p].table[g[i]])
        isnew = np.zeros(hi, dtype=bool)
        isnew[lo:hi] = True
        streams = [
            _m_candidates(mk, sym, codes[:hi], isnew, id_subs, max(1, CHUNK_CELLS // width))
            for mk, sym in enumerate(msyms)
        ]
        for block in _round_robin(streams):
            if len(terms) + len(new_terms) >= limit:
                exhausted = True
                break
            sym = msyms[int(block[0, 0])]
            idx = g[block[:, 1]].astype(np.intp) * size * size
            idx += tables[block[:, 2]].astype(np.intp) * size
            idx += tables[block[:, 3]]
            res = sys.op(sym).table[idx]
            for row, (_, i, t2, t3) in zip(res, block.tolist()):
                t = reduce(App(sym, (Var(i + 1), terms[t2], terms[t3])))
                if t in known:
                    continue
                if len(terms) + len(new_terms) >= limit:
                    exhausted = True
                    break
                known.add(t)
                new_terms.append(t)
                new_rows.append(row)
        if new_terms:
            terms.extend(new_terms)
            rows = np.array(new_rows, dtype=np.uint8)
            tables = np.concatenate([tables, rows])
            codes = np.concatenate([codes, subs.codes(rows)])
        levels.append(len(terms))
    return Representations(arity, terms, tables, codes, exhausted)
