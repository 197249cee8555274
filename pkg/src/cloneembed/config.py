from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Bounds:
    """Enumeration bounds shared by every suite.

    ``budget`` caps distinct operations per enumerated arity; ``work`` caps
    candidate tuples per enumeration (``None`` means ``20 * budget``);
    ``representations`` caps the terms kept without extensional dedup.
    """

    max_arity: int = 2
    depth: int = 3
    budget: int = 200_000
    work: int | None = None
    representations: int = 50_000

    def __post_init__(self):
        if self.max_arity < 1 or self.depth < 0 or self.budget < 1:
            raise ValueError(f"invalid bounds {self}")

    @property
    def max_work(self) -> int:
        return self.work if self.work is not None else 20 * self.budget

    def to_json(self) -> dict:
        d = asdict(self)
        d["work"] = self.max_work
        return d


DEFAULT_BOUNDS = Bounds()
LEMMA_BOUNDS = Bounds(max_arity=3, depth=3)
