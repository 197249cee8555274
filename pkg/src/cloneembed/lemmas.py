"""Executable checks of the distracted/spoilt calculus over bounded enumerations.

Every suite returns a dict with ``name``, ``status``, ``instances``, ``partial``
and the first ``counterexample`` (a term and its table) when one is found.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .classify import ID, Inventory, distracted_rows, essential_mask, spoilt_inventory, substitutions
from .config import Bounds
from .construction import M, Phi
from .enumeration import unspoilt_closure
from .terms import App, Var, evaluate, phi_leaves_on, reduce, substitute, to_sexpr
from .embedding import FAIL, PASS, INCONCLUSIVE, when4_holds

log = logging.getLogger(__name__)

IN_RANGE = np.zeros(256, dtype=bool)
IN_RANGE[[0, 1, 2, 4]] = True

INSERT_UNARIES = 16  # distracted unaries tried at the essential coordinate
INSERT_FILLERS = 4  # extra distracted unaries allowed in other coordinates
INSERT_SAMPLE = 2000  # enumerated operations per arity and source
LEAF_SAMPLE = 1500  # closure terms per arity for leaf stability


@dataclass
class LemmaContext:
    sys: object
    bounds: Bounds
    inventory: Inventory
    closures: dict  # arity -> Closure over all of Phi

    @property
    def partial(self) -> bool:
        return self.inventory.partial or any(c.exhausted for c in self.closures.values())

    def sources(self, n: int):
        """``(label, enumeration)`` pairs that hold members of the clone at arity n."""
        out = []
        if n in self.inventory.slices:
            out.append(("full", self.inventory.slices[n]))
        if n in self.closures:
            out.append(("core", self.closures[n]))
        return out


def lemma_context(sys, bounds: Bounds, inventory: Inventory | None = None) -> LemmaContext:
    if inventory is None:
        inventory = spoilt_inventory(sys, bounds.max_arity, bounds.depth, bounds.budget, bounds.max_work)
    closures = {
        n: unspoilt_closure(sys, sys.phi, n, bounds.depth, bounds.budget, max_work=bounds.max_work)
        for n in range(1, bounds.max_arity + 1)
    }
    return LemmaContext(sys, bounds, inventory, closures)


def _result(name, failure, instances, partial=False, **extra) -> dict:
    if failure is not None:
        status = FAIL
    elif instances == 0:
        status = INCONCLUSIVE
    else:
        status = PASS
    return {
        "name": name,
        "status": status,
        "instances": int(instances),
        "partial": bool(partial),
        "counterexample": failure,
        **extra,
    }


def _cex(en, j, **extra) -> dict:
    return {"term": to_sexpr(en.term(j)), "table": en.tables[j].tolist(), **extra}


def _sample(rows: np.ndarray, cap: int) -> np.ndarray:
    if rows.size <= cap:
        return rows
    return rows[np.linspace(0, rows.size - 1, cap).astype(np.intp)]


# --- construction -------------------------------------------------------------


def construction_suite(sys) -> dict:
    """Overlap consistency of every m over all of X^3, and the range of every generator.

    The case analysis is redone point by point, independently of the
    vectorized table builder.
    """
    size = sys.size
    points = range(size)
    failure, checked = None, 0
    for p, op in sorted(sys.phi.items()):
        checked += 1
        if not op.values() <= {0, 1, 2, 4}:
            failure = failure or {"generator": str(Phi(p)), "values": sorted(op.values())}
    for (p, q1, q2), op in sorted(sys.m.items()):
        fp, f1, f2 = sys.phi[p].table, sys.phi[q1].table, sys.phi[q2].table
        if not op.values() <= {0, 1, 2, 4}:
            failure = failure or {"generator": str(M(p, q1, q2)), "values": sorted(op.values())}
        for x, y, z in itertools.product(points, repeat=3):
            first = y == f1[x] and z == f2[x]
            second = 2 in (x, y, z) and y not in (1, 4) and z not in (1, 4)
            checked += 1
            if first and second and fp[x] != 2:
                failure = failure or {"generator": str(M(p, q1, q2)), "tuple": [x, y, z], "reason": "overlap"}
            expect = int(fp[x]) if first else 2 if second else 4
            if op(x, y, z) != expect:
                failure = failure or {"generator": str(M(p, q1, q2)), "tuple": [x, y, z], "expected": expect}
        for a in points:
            checked += 1
            if op(a, int(f1[a]), int(f2[a])) != fp[a]:
                failure = failure or {"generator": str(M(p, q1, q2)), "reason": "m(x, phi_q1 x, phi_q2 x) != phi_p x", "x": a}
    return _result("construction", failure, checked, generators=len(sys.phi) + len(sys.m))


# --- the lemmas -----------------------------------------------------------------


def range_suite(ctx: LemmaContext) -> dict:
    failure, n_checked = None, 0
    for n in sorted(ctx.closures):
        for label, en in ctx.sources(n):
            comp = np.array([o is not None for o in en.origin], dtype=bool)
            ok = IN_RANGE[en.tables].all(axis=1)
            bad = np.flatnonzero(comp & ~ok)
            n_checked += int(comp.sum())
            if bad.size and failure is None:
                failure = _cex(en, int(bad[0]), source=label)
    return _result("rangeInA", failure, n_checked, ctx.partial)


def unary_distracted_suite(ctx: LemmaContext) -> dict:
    """Unary members outside Phi + {id} are distracted, and distracted iff spoilt."""
    sys = ctx.sys
    inv = ctx.inventory
    en = inv.slices[1]
    skip = set(sys.phi_keys) | {np.arange(sys.size, dtype=np.uint8).tobytes()}
    dis = distracted_rows(en.tables, sys.A)
    spoilt = ~(inv.codes[1] >= 0).any(axis=1)
    failure, n = None, 0
    for j in range(len(en)):
        if en.tables[j].tobytes() in skip:
            continue
        n += 1
        if not dis[j] and failure is None:
            failure = _cex(en, j, reason="not distracted")
    iff_bad = np.flatnonzero(dis != spoilt)
    if iff_bad.size and failure is None:
        failure = _cex(en, int(iff_bad[0]), reason="distracted and spoilt disagree")
    return _result("allUnaryDistracted", failure, n + len(en), inv.slices[1].exhausted)


def inserting_distracted_suite(ctx: LemmaContext) -> dict:
    """Putting a distracted unary into an essential coordinate gives a distracted unary."""
    sys = ctx.sys
    size = sys.size
    unary = ctx.inventory.slices[1]
    dis = np.flatnonzero(distracted_rows(unary.tables, sys.A))
    if dis.size == 0:
        return _result("insertingDistracted", None, 0, ctx.partial)
    us = unary.tables[dis[:INSERT_UNARIES]].astype(np.intp)
    fill = np.concatenate([
        np.arange(size, dtype=np.intp)[None, :],
        np.stack([sys.phi[p].table for p in sorted(sys.phi)]).astype(np.intp),
        unary.tables[dis[:INSERT_FILLERS]].astype(np.intp),
    ])
    failure, n_checked = None, 0
    for n in sorted(ctx.closures):
        for label, en in ctx.sources(n):
            ess = essential_mask(en.tables, size, n)
            for i in range(n):
                rows = _sample(np.flatnonzero(ess[:, i]), INSERT_SAMPLE)
                if rows.size == 0:
                    continue
                tabs = en.tables[rows]
                others = list(itertools.product(range(fill.shape[0]), repeat=n - 1))
                idx = []
                for u in us:
                    for combo in others:
                        cols = list(combo[:i]) + [None] + list(combo[i:])
                        v = np.zeros(size, dtype=np.intp)
                        for c in cols:
                            v = v * size + (u if c is None else fill[c])
                        idx.append(v)
                idx = np.array(idx)
                for lo in range(0, idx.shape[0], 256):
                    block = idx[lo : lo + 256]
                    res = tabs[:, block]  # (rows, combos, size)
                    vals = res[:, :, list(sys.A)]
                    ok = ((vals == 2) | (vals == 4)).any(axis=2)
                    n_checked += ok.size
                    if not ok.all() and failure is None:
                        r, c = (int(v) for v in np.argwhere(~ok)[0])
                        failure = _cex(en, int(rows[r]), source=label, coordinate=i + 1,
                                       composite=res[r, c].tolist())
    return _result("insertingDistracted", failure, n_checked, ctx.partial,
                   caps={"unaries": INSERT_UNARIES, "fillers": INSERT_FILLERS, "sample": INSERT_SAMPLE})


def composition_suite(ctx_or_sys) -> dict:
    """For every m and every (t1, t2, t3) in (Phi + {id})^3, exhaustively."""
    sys = getattr(ctx_or_sys, "sys", ctx_or_sys)
    subs = substitutions(sys, 3)
    failure, n = None, 0
    for sym in sys.m_symbols:
        table = sys.op(sym).table
        res = table[subs.idx]  # (count, size)
        vals = res[:, list(sys.A)]
        dis = ((vals == 2) | (vals == 4)).any(axis=1)
        for k in range(subs.count):
            n += 1
            labels = subs.label_tuple(k)
            if labels == (ID, sym.q1, sym.q2):
                ok = np.array_equal(res[k], sys.phi[sym.p].table)
            else:
                ok = bool(dis[k])
            if not ok and failure is None:
                names = ["id" if c == ID else str(Phi(c)) for c in labels]
                failure = {"generator": str(sym), "substitution": names, "composite": res[k].tolist()}
    return _result("composition", failure, n)


def inserting2_suite(ctx: LemmaContext) -> dict:
    """Unspoilt members fed 2 at an essential coordinate stay in {2, 4}."""
    size = ctx.sys.size
    failure, n = None, 0
    for k in sorted(ctx.closures):
        for label, en in ctx.sources(k):
            rows = np.flatnonzero((_codes(ctx, label, k) >= 0).any(axis=1))
            tabs = en.tables[rows].reshape((rows.size,) + (size,) * k)
            ess = essential_mask(en.tables[rows], size, k)
            for i in range(k):
                sl = np.take(tabs, 2, axis=i + 1).reshape(rows.size, -1)
                ok = ((sl == 2) | (sl == 4)).all(axis=1) | ~ess[:, i]
                n += int(ess[:, i].sum())
                if not ok.all() and failure is None:
                    failure = _cex(en, int(rows[np.flatnonzero(~ok)[0]]), source=label, coordinate=i + 1)
    return _result("inserting2", failure, n, ctx.partial)


def _codes(ctx, label, n):
    return ctx.inventory.codes[n] if label == "full" else ctx.closures[n].codes


def uniqueness_suite(ctx: LemmaContext) -> dict:
    """At an essential coordinate, all witnesses reaching the same phi_p agree."""
    size = ctx.sys.size
    failure, n = None, 0
    for k in sorted(ctx.closures):
        subs = substitutions(ctx.sys, k)
        for label, en in ctx.sources(k):
            codes = _codes(ctx, label, k)
            rows = np.flatnonzero((codes >= 0).any(axis=1))
            ess = essential_mask(en.tables[rows], size, k)
            c = codes[rows]
            for i in range(k):
                lab = subs.tuples[:, i]
                for p in sorted(ctx.sys.phi):
                    hit = c == p
                    lo = np.where(hit, lab, 1 << 30).min(axis=1)
                    hi = np.where(hit, lab, -1).max(axis=1)
                    has = hit.any(axis=1) & ess[:, i]
                    n += int(has.sum())
                    bad = np.flatnonzero(has & (lo != hi))
                    if bad.size and failure is None:
                        j = int(rows[bad[0]])
                        failure = _cex(en, j, source=label, coordinate=i + 1, result=str(Phi(p)))
    return _result("uniqueness", failure, n, ctx.partial)


def _unary_term(label):
    x = Var(1)
    return x if label == ID else App(Phi(label), (x,))


def leaf_stability_suite(ctx: LemmaContext) -> dict:
    """Specializing all but one variable along a witness keeps the y-leaves.

    For closure members t depending on every variable and each coordinate i,
    s_i(x, y) substitutes the witness into every coordinate but i and y into
    coordinate i. After reduction s_i must keep exactly the phi-leaves that t
    had on x_i, be unspoilt, depend on both variables, and satisfy the
    leaf characterization of where it takes the value 4 at (2, a).
    """
    sys = ctx.sys
    subs2 = substitutions(sys, 2)
    failure, n = None, 0
    for k in sorted(ctx.closures):
        if k < 2:
            continue
        cl = ctx.closures[k]
        ess = essential_mask(cl.tables, sys.size, k).all(axis=1)
        for j in _sample(np.flatnonzero(ess), LEAF_SAMPLE).tolist():
            t = reduce(cl.term(j))
            wit, _ = cl.witness[j]
            for i in range(k):
                mapping = {
                    c + 1: (Var(2) if c == i else _unary_term(wit[c])) for c in range(k)
                }
                s = reduce(substitute(t, mapping))
                op = evaluate(s, sys, 2)
                n += 1
                why = None
                if phi_leaves_on(s, 2) != phi_leaves_on(t, i + 1):
                    why = "y-leaves changed"
                elif not (op.table.reshape(sys.size, sys.size) != op.table.reshape(sys.size, sys.size)[:1]).any():
                    why = "s_i does not depend on x"
                elif not (op.table.reshape(sys.size, sys.size) != op.table.reshape(sys.size, sys.size)[:, :1]).any():
                    why = "s_i does not depend on y"
                elif not (subs2.codes(op.table[None, :]) >= 0).any():
                    why = "s_i is spoilt"
                elif when4_holds(sys, s, op.table) is not None:
                    why = "value 4 at (2, a) disagrees with the y-leaves"
                if why and failure is None:
                    failure = {"term": to_sexpr(t), "coordinate": i + 1, "specialized": to_sexpr(s), "reason": why}
    return _result("leafStability", failure, n, ctx.partial)


def core_agreement_suite(ctx: LemmaContext) -> dict:
    """The pruned unspoilt closure agrees with the unspoilt part of the full enumeration.

    Every unspoilt member of the full enumeration found within the core's
    completed depth must be in the core, and when the full enumeration is
    complete the converse must hold at equal depth.
    """
    failure, n = None, 0
    partial = False
    for k in sorted(ctx.closures):
        en = ctx.inventory.slices[k]
        cl = ctx.closures[k]
        depth = np.array(en.depth)
        uns = ctx.inventory.unspoilt[k]
        if cl.exhausted:
            partial = True
            continue
        limit = np.inf if cl.saturated else cl.max_depth
        for j in uns.tolist():
            if depth[j] > limit:
                continue
            n += 1
            if en.tables[j].tobytes() not in cl._index and failure is None:
                failure = _cex(en, j, reason="unspoilt member missing from the core closure")
        if en.exhausted:
            partial = True
            continue
        full = {en.tables[j].tobytes() for j in uns.tolist()}
        cdepth = np.array(cl.depth)
        limit = np.inf if en.saturated else en.max_depth
        for j in range(len(cl)):
            if cdepth[j] > limit:
                continue
            n += 1
            if cl.tables[j].tobytes() not in full and failure is None:
                failure = _cex(cl, j, reason="core member missing from the full enumeration")
    return _result("coreAgreement", failure, n, partial)


LEMMA_SUITES = {
    "rangeInA": range_suite,
    "allUnaryDistracted": unary_distracted_suite,
    "insertingDistracted": inserting_distracted_suite,
    "composition": composition_suite,
    "inserting2": inserting2_suite,
    "uniqueness": uniqueness_suite,
    "leafStability": leaf_stability_suite,
    "coreAgreement": core_agreement_suite,
}


def run_lemma_suites(sys, bounds: Bounds, inventory: Inventory | None = None) -> list[dict]:
    ctx = lemma_context(sys, bounds, inventory)
    out = []
    for name, fn in LEMMA_SUITES.items():
        log.info("lemma suite %s", name)
        out.append(fn(ctx))
    return out
