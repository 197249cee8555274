"""Terms over generator symbols, with variables standing in for projections."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .construction import M, Phi, Spoilt
from .ops import Operation, coords, projection


class MalformedTerm(ValueError):
    pass


@dataclass(frozen=True)
class Var:
    index: int  # 1-based

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class App:
    sym: object
    args: tuple

    def __post_init__(self):
        if len(self.args) != self.sym.arity:
            raise MalformedTerm(f"{self.sym} takes {self.sym.arity} arguments, got {len(self.args)}")

    def __str__(self):
        return f"{self.sym}({', '.join(map(str, self.args))})"


Term = Union[Var, App]


def app(sym, *args) -> App:
    return App(sym, tuple(args))


def depth(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    return 1 + max(depth(a) for a in t.args)


def node_count(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(node_count(a) for a in t.args)


def variables(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.index])
    return frozenset().union(*(variables(a) for a in t.args))


def subterms(t: Term):
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def substitute(t: Term, mapping: dict) -> Term:
    """Replace ``Var(i)`` by ``mapping[i]``; unmapped variables stay."""
    if isinstance(t, Var):
        return mapping.get(t.index, t)
    return App(t.sym, tuple(substitute(a, mapping) for a in t.args))


# --- evaluation ------------------------------------------------------------


def _resolve(sys, sym, extra):
    if isinstance(sym, Spoilt):
        if extra is None or sym.key not in extra:
            raise MalformedTerm(f"no table for spoilt generator {sym}")
        return extra[sym.key]
    return sys.op(sym)


def eval_table(t: Term, sys, arity: int, extra=None) -> np.ndarray:
    size = sys.size
    grid = coords(size, arity)
    cache = {}

    def go(u):
        if u in cache:
            return cache[u]
        if isinstance(u, Var):
            if not 1 <= u.index <= arity:
                raise MalformedTerm(f"variable {u} outside arity {arity}")
            out = grid[u.index - 1]
        else:
            f = _resolve(sys, u.sym, extra)
            idx = np.zeros(grid.shape[1], dtype=np.intp)
            for a in u.args:
                idx = idx * size + go(a)
            out = f.table[idx].astype(np.intp)
        cache[u] = out
        return out

    return go(t).astype(np.uint8)


def evaluate(t: Term, sys, arity: int, extra=None) -> Operation:
    """The ``arity``-ary operation a term induces; ``extra`` maps spoilt keys to tables."""
    if isinstance(t, Var):
        if not 1 <= t.index <= arity:
            raise MalformedTerm(f"variable {t} outside arity {arity}")
        return projection(sys.size, arity, t.index)
    return Operation(sys.size, arity, eval_table(t, sys, arity, extra))


# --- leaves and reduction --------------------------------------------------


def is_leaf(t: Term) -> bool:
    return isinstance(t, App) and all(isinstance(a, Var) for a in t.args)


def leaves(t: Term) -> frozenset:
    """Subterms holding exactly one generator symbol, i.e. generators applied to variables."""
    return frozenset(s for s in subterms(t) if is_leaf(s))


def phi_leaves_on(t: Term, var: int) -> frozenset:
    """Indices ``v`` such that ``phi_v(x_var)`` is a leaf of ``t``."""
    return frozenset(
        s.sym.p for s in leaves(t) if isinstance(s.sym, Phi) and s.args[0] == Var(var)
    )


def _is_redex(t: Term) -> bool:
    if not (isinstance(t, App) and isinstance(t.sym, M)):
        return False
    s, u, w = t.args
    return u == App(Phi(t.sym.q1), (s,)) and w == App(Phi(t.sym.q2), (s,))


def reduce_once(t: Term) -> Term:
    if isinstance(t, Var):
        return t
    t = App(t.sym, tuple(reduce_once(a) for a in t.args))
    if _is_redex(t):
        return App(Phi(t.sym.p), (t.args[0],))
    return t


def reduce(t: Term) -> Term:
    """Rewrite ``m_p^{q1,q2}(s, phi_q1(s), phi_q2(s))`` to ``phi_p(s)`` innermost-first until none remain."""
    while True:
        r = reduce_once(t)
        if r == t:
            return r
        t = r


def is_reduced(t: Term) -> bool:
    return not any(_is_redex(s) for s in subterms(t))


# --- text form -------------------------------------------------------------


def to_sexpr(t: Term) -> str:
    if isinstance(t, Var):
        return str(t)
    return "(" + " ".join([str(t.sym)] + [to_sexpr(a) for a in t.args]) + ")"


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _symbol(name: str):
    if m := re.fullmatch(r"phi(\d+)", name):
        return Phi(int(m[1]))
    if m := re.fullmatch(r"m(\d+)_(\d+)_(\d+)", name):
        return M(int(m[1]), int(m[2]), int(m[3]))
    if m := re.fullmatch(r"s(\d+)/(\d+)", name):
        return Spoilt(int(m[1]), int(m[2]))
    raise MalformedTerm(f"unknown symbol {name!r}")


def parse_sexpr(text: str) -> Term:
    tokens = _TOKEN.findall(text)
    pos = 0

    def go():
        nonlocal pos
        if pos >= len(tokens):
            raise MalformedTerm("unexpected end of term")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            sym = _symbol(tokens[pos])
            pos += 1
            args = []
            while pos < len(tokens) and tokens[pos] != ")":
                args.append(go())
            pos += 1
            return App(sym, tuple(args))
        if m := re.fullmatch(r"x(\d+)", tok):
            return Var(int(m[1]))
        raise MalformedTerm(f"unexpected token {tok!r}")

    t = go()
    if pos != len(tokens):
        raise MalformedTerm("trailing tokens")
    return t
