"""Ground sets X = {0,1,2,4} + A and index families (A_p) over A."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

DISTINGUISHED = (0, 1, 2, 4)

# Ground sets are capped so operation tables stay small.
MAX_GROUND = 12


class SizeLimit(ValueError):
    pass


@dataclass(frozen=True)
class GroundSet:
    size: int

    def __post_init__(self):
        if self.size < 5:
            raise ValueError("ground set needs the four distinguished points and a nonempty A")

    @property
    def distinguished(self) -> tuple[int, ...]:
        return DISTINGUISHED

    @property
    def A(self) -> tuple[int, ...]:
        return tuple(x for x in range(self.size) if x not in DISTINGUISHED)


@dataclass(frozen=True)
class IndexFamily:
    ground: GroundSet
    sets: tuple[frozenset, ...]  # sets[p] is A_p

    def __post_init__(self):
        a = set(self.ground.A)
        for p, s in enumerate(self.sets):
            if not s <= a:
                raise ValueError(f"A_{p} is not a subset of A")

    def __len__(self) -> int:
        return len(self.sets)

    def witness(self, p: int) -> int | None:
        """Smallest point of A_p outside every other A_q, if any."""
        rest = set().union(*(s for q, s in enumerate(self.sets) if q != p))
        own = sorted(self.sets[p] - rest)
        return own[0] if own else None

    def to_json(self) -> dict:
        return {
            "ground_size": self.ground.size,
            "A": list(self.ground.A),
            "sets": {str(p): sorted(s) for p, s in enumerate(self.sets)},
        }

    @classmethod
    def from_json(cls, data: dict) -> "IndexFamily":
        ground = GroundSet(int(data["ground_size"]))
        if sorted(data.get("A", ground.A)) != list(ground.A):
            raise ValueError("A must be the ground set minus {0,1,2,4}")
        sets = data["sets"]
        return cls(ground, tuple(frozenset(sets[str(p)]) for p in range(len(sets))))


def singleton_family(n: int) -> IndexFamily:
    """Disjoint singletons over a ground set of size ``n + 4``."""
    if n < 1:
        raise ValueError("need at least one index")
    ground = GroundSet(n + 4)
    return IndexFamily(ground, tuple(frozenset([a]) for a in ground.A))


def independent_family(n: int, cap: int = MAX_GROUND) -> IndexFamily:
    """A_p = {S : p in S} over A = all subsets S of an n-element index set.

    The subset with bitmask ``b`` is encoded by the ``b``-th point of A.
    """
    if n < 1:
        raise ValueError("need at least one index")
    size = 2**n + 4
    if size > cap:
        raise SizeLimit(f"ground set of size {size} exceeds cap {cap}")
    ground = GroundSet(size)
    pts = ground.A
    sets = tuple(frozenset(pts[b] for b in range(2**n) if b >> p & 1) for p in range(n))
    return IndexFamily(ground, sets)


def check_noncovering(fam: IndexFamily):
    """Return ``None`` if every A_p escapes the union of the others, else ``(p, cover)``."""
    for p, s in enumerate(fam.sets):
        others = [q for q in range(len(fam)) if q != p]
        if not s - set().union(*(fam.sets[q] for q in others)):
            cover = [q for q in others if fam.sets[q] & s]
            return p, cover
    return None


def is_independent(fam: IndexFamily) -> bool:
    """Exhaustive check that every Boolean combination of members is nonempty."""
    a = set(fam.ground.A)
    k = len(fam)
    for signs in itertools.product((None, True, False), repeat=k):
        region = set(a)
        for s, sign in zip(fam.sets, signs):
            if sign is True:
                region &= s
            elif sign is False:
                region -= s
        if not region:
            return False
    return True
