"""Meet and join on tuples over {0,1}, [0,k] (k-submodular order) and the k-diamond."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

BOT = "bot"
TOP = "top"

Point = tuple


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeFamily:
    """A coordinatewise lattice-like structure.

    ``kind`` is ``"boolean"`` (labels 0, 1), ``"ksub"`` (labels 0..k, or a
    custom labelling with 0 as the bottom, e.g. (0, 1, -1) for the
    bisubmodular case) or ``"diamond"`` (labels bot, 1..k, top).
    """

    kind: str
    k: int = 1
    labels: tuple = ()

    def __post_init__(self):
        if self.kind not in ("boolean", "ksub", "diamond"):
            raise LatticeError(f"unknown lattice kind {self.kind!r}")
        if self.k < 1:
            raise LatticeError("k must be a positive integer")
        if not self.labels:
            object.__setattr__(self, "labels", _default_labels(self.kind, self.k))
        if len(set(self.labels)) != len(self.labels):
            raise LatticeError("duplicate labels")
        if self.kind == "ksub" and (0 not in self.labels or len(self.labels) != self.k + 1):
            raise LatticeError("ksub labels must contain 0 and have k+1 entries")

    @classmethod
    def boolean(cls):
        return cls("boolean", 1)

    @classmethod
    def ksub(cls, k: int):
        return cls("ksub", k)

    @classmethod
    def bisubmodular(cls):
        return cls("ksub", 2, (0, 1, -1))

    @classmethod
    def diamond(cls, k: int):
        return cls("diamond", k)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LatticeError(f"label {label!r} is not in {self.labels}") from None

    def meet(self, a, b):
        if self.kind == "boolean":
            return min(a, b)
        if self.kind == "ksub":
            return a if a == b else 0
        # diamond
        if a == b:
            return a
        if a == TOP:
            return b
        if b == TOP:
            return a
        return BOT

    def join(self, a, b):
        if self.kind == "boolean":
            return max(a, b)
        if self.kind == "ksub":
            if a == 0:
                return b
            if b == 0:
                return a
            return a if a == b else 0
        if a == b:
            return a
        if a == BOT:
            return b
        if b == BOT:
            return a
        return TOP

    def validate(self, x: Sequence[Hashable]) -> Point:
        x = tuple(x)
        if not x:
            raise LatticeError("points must have positive length")
        for a in x:
            self.index(a)
        return x

    def sort_key(self, x: Sequence[Hashable]):
        return tuple(self.labels.index(a) for a in x)


def _default_labels(kind: str, k: int) -> tuple:
    if kind == "boolean":
        return (0, 1)
    if kind == "ksub":
        return tuple(range(k + 1))
    return (BOT,) + tuple(range(1, k + 1)) + (TOP,)


def meet_join(family: LatticeFamily, x: Sequence, y: Sequence) -> tuple[Point, Point]:
    """Return the coordinatewise (meet, join) of ``x`` and ``y``."""
    x = family.validate(x)
    y = family.validate(y)
    if len(x) != len(y):
        raise LatticeError(f"length mismatch: {len(x)} != {len(y)}")
    meet = tuple(family.meet(a, b) for a, b in zip(x, y))
    join = tuple(family.join(a, b) for a, b in zip(x, y))
    return meet, join


def closure_meet_join(family: LatticeFamily, points: Iterable[Sequence]) -> list[Point]:
    """Smallest superset of ``points`` closed under pairwise meet and join.

    Worklist saturation; the result is sorted by label index.
    """
    pts = [family.validate(p) for p in points]
    if not pts:
        return []
    length = len(pts[0])
    if any(len(p) != length for p in pts):
        raise LatticeError("mixed point lengths")
    closed: set[Point] = set()
    order: list[Point] = []
    work = sorted(set(pts), key=family.sort_key)
    while work:
        p = work.pop()
        if p in closed:
            continue
        new = []
        for q in order:
            for r in meet_join(family, p, q):
                if r not in closed and r != p:
                    new.append(r)
        closed.add(p)
        order.append(p)
        work.extend(new)
    return sorted(closed, key=family.sort_key)


def point_to_json(x: Sequence) -> list[str]:
    return [str(a) for a in x]


def point_from_json(data: Sequence[str], family: LatticeFamily) -> Point:
    lookup = {str(label): label for label in family.labels}
    try:
        return family.validate(lookup[str(s)] for s in data)
    except KeyError as exc:
        raise LatticeError(f"unknown label {exc.args[0]!r}") from None
