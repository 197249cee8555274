"""The map I -> C_I from ideals to clones, checked at bounded depth.

A fragment of C_I is its spoilt inventory (shared by every ideal) together
with the unspoilt core closure of Phi_I + M. Spoilt generators never yield an
unspoilt composite, so every check that concerns membership of phi_p, which
is unspoilt, is decided by the core alone.
"""

from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classify import Inventory, spoilt_inventory
from .config import Bounds
from .construction import M, Phi
from .enumeration import representations, unspoilt_closure
from .lattice import FiniteLattice, Ideal, all_ideals, generated_ideal, ideal_join, ideal_meet, principal_ideal
from .ops import coords
from .terms import App, Var, evaluate, phi_leaves_on, to_sexpr

log = logging.getLogger(__name__)

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"


class NotInGeneratedIdeal(ValueError):
    pass


def worst(statuses) -> str:
    statuses = list(statuses)
    if FAIL in statuses:
        return FAIL
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return PASS


def threads_from_env() -> int:
    try:
        return max(1, int(os.environ.get("CLONEEMBED_THREADS", "1")))
    except ValueError:
        return 1


# --- constructive witnesses -------------------------------------------------


def derive_phi_witness(sys, gens, p: int):
    """A unary term over Phi_gens + M that evaluates to phi_p.

    Picks a smallest ``F`` within ``gens`` with ``p <= join(F)``, builds
    phi of the growing joins of ``F`` one m-step at a time, then finishes with
    ``m_p^{J,J}`` unless ``p`` is the full join ``J`` itself.
    """
    L = sys.lattice
    gens = sorted(set(gens.members if isinstance(gens, Ideal) else gens))
    if not gens or p not in generated_ideal(L, gens):
        raise NotInGeneratedIdeal(f"{L.names[p]} is not in the ideal generated by {[L.names[g] for g in gens]}")
    x = Var(1)
    if p in gens:
        t = App(Phi(p), (x,))
    else:
        F = next(
            combo
            for r in range(1, len(gens) + 1)
            for combo in itertools.combinations(gens, r)
            if L.le(p, L.join_all(combo))
        )
        t = App(Phi(F[0]), (x,))
        acc = F[0]
        for f in F[1:]:
            nxt = L.join[acc][f]
            t = App(M(nxt, acc, f), (x, t, App(Phi(f), (x,))))
            acc = nxt
        if acc != p:
            t = App(M(p, acc, acc), (x, t, t))
    if evaluate(t, sys, 1) != sys.phi[p]:
        raise AssertionError(f"witness {to_sexpr(t)} does not evaluate to phi_{p}")
    return t


def pair_witness(sys, p: int, q1: int, q2: int):
    """``m_p^{q1,q2}(x, phi_q1(x), phi_q2(x))``; evaluates to phi_p when the gadgets are sound."""
    x = Var(1)
    return App(M(p, q1, q2), (x, App(Phi(q1), (x,)), App(Phi(q2), (x,))))


# --- fragments --------------------------------------------------------------


@dataclass
class CloneFragment:
    allowed: frozenset  # indices whose phi is a generator
    bounds: Bounds
    cores: dict  # arity -> Closure
    spoilt: dict  # arity -> set of table keys
    _keys: dict = field(default_factory=dict, repr=False)

    @property
    def exhausted(self) -> bool:
        return any(c.exhausted for c in self.cores.values())

    @property
    def saturated(self) -> dict:
        return {n: c.saturated for n, c in self.cores.items()}

    def members(self, n: int) -> set:
        if n not in self._keys:
            self._keys[n] = self.cores[n].keys() | self.spoilt.get(n, set())
        return self._keys[n]

    def signature(self) -> frozenset:
        out = set()
        for core in self.cores.values():
            out |= core.signature()
        return frozenset(out)

    def phi_term(self, p: int):
        """A member term realizing (a dummy-extension of) phi_p, if any."""
        for n, core in sorted(self.cores.items()):
            g = coords(core.size, n)
            for i in range(n):
                j = core.index_of(core.sys.phi[p].table[g[i]])
                if j is not None:
                    return core.term(j)
        return None

    def summary(self) -> dict:
        return {
            "generators_phi": sorted(self.allowed),
            "arities": {
                str(n): {**c.summary(), "spoilt_members": len(self.spoilt.get(n, ()))}
                for n, c in sorted(self.cores.items())
            },
        }


def clone_fragment(sys, ideal, bounds: Bounds, inventory: Inventory | None = None) -> CloneFragment:
    allowed = frozenset(ideal.members if isinstance(ideal, Ideal) else ideal)
    cores = {
        n: unspoilt_closure(sys, allowed, n, bounds.depth, bounds.budget, max_work=bounds.max_work)
        for n in range(1, bounds.max_arity + 1)
    }
    spoilt = {}
    if inventory is not None:
        spoilt = {n: inventory.spoilt_keys(n) for n in range(1, bounds.max_arity + 1)}
    return CloneFragment(allowed, bounds, cores, spoilt)


# --- the leaf characterization ------------------------------------------------


def when4_holds(sys, term, table: np.ndarray):
    """Check ``r(2,a) = 4 iff a in union{A_v : phi_v(y) leaf}`` over all a in A.

    Returns the first failing ``a`` or ``None``.
    """
    size = sys.size
    cover = set()
    for v in phi_leaves_on(term, 2):
        cover |= sys.family.sets[v]
    for a in sys.A:
        if (table[2 * size + a] == 4) != (a in cover):
            return a
    return None


def when4_case_terms(sym: M):
    """The three shapes from the leaf-characterization case analysis, with expected covers."""
    x, y = Var(1), Var(2)
    return [
        ("m(y, x, phi_q2(y))", App(sym, (y, x, App(Phi(sym.q2), (y,)))), {sym.q2}),
        ("m(x, y, phi_q2(x))", App(sym, (x, y, App(Phi(sym.q2), (x,)))), set()),
        ("m(x, phi_q1(y), phi_q2(y))", App(sym, (x, App(Phi(sym.q1), (y,)), App(Phi(sym.q2), (y,)))), {sym.q1, sym.q2}),
    ]


def when4_suite(sys, bounds: Bounds) -> dict:
    reps = representations(sys, 2, bounds.depth, bounds.representations)
    size = sys.size
    t = reps.tables.reshape(-1, size, size)
    both = (t != t[:, :1, :]).any(axis=(1, 2)) & (t != t[:, :, :1]).any(axis=(1, 2))
    unspoilt = (reps.codes >= 0).any(axis=1)
    checked, failure = 0, None
    for j in np.flatnonzero(both & unspoilt).tolist():
        checked += 1
        bad = when4_holds(sys, reps.terms[j], reps.tables[j])
        if bad is not None and failure is None:
            failure = {"term": to_sexpr(reps.terms[j]), "a": bad, "table": reps.tables[j].tolist()}
    cases, case_failure = 0, None
    for sym in sys.m_symbols:
        for name, term, qs in when4_case_terms(sym):
            op = evaluate(term, sys, 2)
            cover = set().union(*(sys.family.sets[q] for q in qs)) if qs else set()
            expect = {a: (4 if a in cover else 2) for a in sys.A}
            got = {a: op(2, a) for a in sys.A}
            ok = got == expect and phi_leaves_on(term, 2) == frozenset(qs if name != "m(x, y, phi_q2(x))" else ())
            ok = ok and when4_holds(sys, term, op.table) is None
            cases += 1
            if not ok and case_failure is None:
                case_failure = {"case": name, "term": to_sexpr(term), "got": got, "expected": expect}
    status = FAIL if failure or case_failure else PASS
    return {
        "name": "when4",
        "status": status,
        "representations": len(reps.terms),
        "checked": checked,
        "partial": reps.exhausted,
        "case_examples": cases,
        "counterexample": failure or case_failure,
    }


# --- the embedding check ------------------------------------------------------


def _check(name, status, **extra) -> dict:
    return {"name": name, "status": status, **extra}


def verify_embedding(L: FiniteLattice, sys, bounds: Bounds, inventory: Inventory | None = None, threads: int | None = None) -> dict:
    """Run soundness, completeness, injectivity, join and meet checks over all ideals."""
    if inventory is None:
        inventory = spoilt_inventory(sys, bounds.max_arity, bounds.depth, bounds.budget, bounds.max_work)
    ideals = all_ideals(L)
    threads = threads or threads_from_env()
    cache: dict = {}

    def frag(allowed: frozenset) -> CloneFragment:
        if allowed not in cache:
            cache[allowed] = clone_fragment(sys, allowed, bounds, inventory)
        return cache[allowed]

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            built = list(pool.map(lambda i: clone_fragment(sys, i, bounds, inventory), ideals))
        for i, f in zip(ideals, built):
            cache[i.members] = f
    frags = [frag(i.members) for i in ideals]
    sigs = [f.signature() for f in frags]
    label = lambda s: [L.names[v] for v in sorted(s)]  # noqa: E731

    # (a) soundness
    sound = []
    for x, (I, f, sig) in enumerate(zip(ideals, frags, sigs)):
        extra = sorted(sig - I.members)
        if extra:
            st = FAIL
            cex = {"p": L.names[extra[0]], "term": to_sexpr(f.phi_term(extra[0]))}
        else:
            st, cex = (INCONCLUSIVE if f.exhausted else PASS), None
        sound.append({"ideal": L.names[x], "signature": label(sig), "status": st, "counterexample": cex})

    # (b) completeness: witnesses for every generating subset, and generators present
    comp, n_wit = [], 0
    subsets = [frozenset(c) for r in range(1, L.size + 1) for c in itertools.combinations(L.elements, r)]
    for x, (I, f, sig) in enumerate(zip(ideals, frags, sigs)):
        st, cex = PASS, None
        missing = sorted(I.members - sig)
        if missing:
            st = INCONCLUSIVE if (bounds.depth < 1 or f.exhausted) else FAIL
            cex = {"missing": label(missing)}
        for S in subsets:
            if generated_ideal(L, S) != I:
                continue
            for p in sorted(I.members):
                try:
                    derive_phi_witness(sys, S, p)
                    n_wit += 1
                except (AssertionError, NotInGeneratedIdeal) as e:
                    st, cex = FAIL, {"generators": label(S), "p": L.names[p], "error": str(e)}
        comp.append({"ideal": L.names[x], "status": st, "counterexample": cex})

    # (c) injectivity
    inj_st, inj_cex = PASS, None
    for (x, sx), (y, sy) in itertools.combinations(enumerate(sigs), 2):
        if sx == sy:
            st = INCONCLUSIVE if (frags[x].exhausted or frags[y].exhausted) else FAIL
            inj_st = worst([inj_st, st])
            inj_cex = inj_cex or {"ideals": [L.names[x], L.names[y]], "signature": label(sx)}

    # (d) joins and (e) meets, over unordered pairs
    grids = {n: coords(sys.size, n) for n in range(1, bounds.max_arity + 1)}
    joins, meets = [], []
    for x, y in itertools.combinations_with_replacement(L.elements, 2):
        I, J = ideals[x], ideals[y]
        target = ideal_join(L, I, J)
        st, cex = PASS, None
        if target != principal_ideal(L, L.join[x][y]):
            st, cex = FAIL, {"reason": "ideal join does not match the lattice join"}
        f = frag(I.members | J.members)
        sig = f.signature()
        n_pair = 0
        for p in sorted(target.members):
            for q1 in sorted(I.members):
                for q2 in sorted(J.members):
                    if L.le(p, L.join[q1][q2]):
                        n_pair += 1
                        if evaluate(pair_witness(sys, p, q1, q2), sys, 1) != sys.phi[p]:
                            st = FAIL
                            cex = cex or {"witness": to_sexpr(pair_witness(sys, p, q1, q2))}
        if sig - target.members:
            p = min(sig - target.members)
            st, cex = FAIL, cex or {"p": L.names[p], "term": to_sexpr(f.phi_term(p))}
        elif sig != target.members and st == PASS:
            st = INCONCLUSIVE if (f.exhausted or bounds.depth < 2) else FAIL
            cex = {"missing": label(target.members - sig)}
        elif st == PASS and f.exhausted:
            st = INCONCLUSIVE
        joins.append({
            "pair": [L.names[x], L.names[y]], "expected": label(target.members), "signature": label(sig),
            "pair_witnesses": n_pair, "status": st, "counterexample": cex,
        })

        target = ideal_meet(L, I, J)
        st, cex = PASS, None
        if target != principal_ideal(L, L.meet[x][y]):
            st, cex = FAIL, {"reason": "ideal meet does not match the lattice meet"}
        fi, fj = frags[x], frags[y]
        common = set()
        for n in range(1, bounds.max_arity + 1):
            common |= fi.members(n) & fj.members(n)
        sig = set()
        for p, op in sys.phi.items():
            if any(op.table[grids[n][i]].tobytes() in common for n in grids for i in range(n)):
                sig.add(p)
        if sig != set(target.members):
            st = FAIL if (sig - target.members or not (fi.exhausted or fj.exhausted)) else INCONCLUSIVE
            cex = cex or {"signature": label(sig)}
        elif st == PASS and (fi.exhausted or fj.exhausted):
            st = INCONCLUSIVE
        meets.append({
            "pair": [L.names[x], L.names[y]], "expected": label(target.members), "signature": label(sorted(sig)),
            "status": st, "counterexample": cex,
        })

    # monotonicity of fragments along inclusion of ideals
    mono_st, mono_cex = PASS, None
    for x, y in itertools.permutations(L.elements, 2):
        if ideals[x] <= ideals[y]:
            for n in range(1, bounds.max_arity + 1):
                if not frags[x].members(n) <= frags[y].members(n):
                    st = INCONCLUSIVE if frags[y].exhausted else FAIL
                    mono_st = worst([mono_st, st])
                    mono_cex = mono_cex or {"ideals": [L.names[x], L.names[y]], "arity": n}

    checks = [
        _check("soundness", worst(s["status"] for s in sound), per_ideal=sound),
        _check("completeness", worst(c["status"] for c in comp), witnesses=n_wit, per_ideal=comp),
        _check("injectivity", inj_st, counterexample=inj_cex),
        _check("join", worst(j["status"] for j in joins), per_pair=joins),
        _check("meet", worst(m["status"] for m in meets), per_pair=meets),
        _check("monotonicity", mono_st, counterexample=mono_cex),
    ]
    return {
        "name": "embedding",
        "status": worst(c["status"] for c in checks),
        "ideals": [{"element": L.names[x], "members": label(I.members)} for x, I in enumerate(ideals)],
        "fragments": {L.names[x]: f.summary() for x, f in enumerate(frags)},
        "inventory": inventory.summary(),
        "checks": checks,
        "notes": [
            "Arbitrary nonempty joins and meets in a finite lattice reduce to binary ones, so pairs suffice.",
            "Spoilt members are truncated to the inventory at these bounds; composites of spoilt operations "
            "stay spoilt, so the phi-signature does not depend on the truncation.",
            "Absence of phi_p at bounded depth is bounded evidence, not a certificate.",
        ],
    }
