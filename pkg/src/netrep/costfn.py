"""Dense cost-function tables over a finite labelled domain.

A :class:`CostFunction` stores ``|D|**n`` extended-rational values in
row-major order of the domain labels.  The module also provides the
weighted-relational-clone operations (scaling, addition, partial
minimization), property checks and the fixture functions used throughout
the package.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterator, Optional, Sequence

from .extrat import INF, ExtRat, format_extrat, scale, to_extrat
from .lattice import BOT, TOP, LatticeFamily


class CostFunctionError(ValueError):
    pass


@dataclass(frozen=True)
class CostFunction:
    domain: tuple
    arity: int
    table: tuple

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        if len(set(self.domain)) != len(self.domain) or not self.domain:
            raise CostFunctionError("domain must be a non-empty list of distinct labels")
        if self.arity < 1:
            raise CostFunctionError("arity must be at least 1")
        table = tuple(to_extrat(v) for v in self.table)
        if len(table) != len(self.domain) ** self.arity:
            raise CostFunctionError(
                f"table has {len(table)} entries, expected {len(self.domain) ** self.arity}"
            )
        object.__setattr__(self, "table", table)

    @classmethod
    def from_callable(cls, domain: Sequence, arity: int, fn: Callable[..., object]):
        domain = tuple(domain)
        table = [fn(*x) for x in itertools.product(domain, repeat=arity)]
        return cls(domain, arity, tuple(table))

    @classmethod
    def constant(cls, domain: Sequence, arity: int, value=0):
        domain = tuple(domain)
        return cls(domain, arity, (to_extrat(value),) * len(domain) ** arity)

    def points(self) -> Iterator[tuple]:
        return itertools.product(self.domain, repeat=self.arity)

    def index(self, x: Sequence) -> int:
        if len(x) != self.arity:
            raise CostFunctionError(f"expected {self.arity} coordinates, got {len(x)}")
        d = len(self.domain)
        idx = 0
        for a in x:
            try:
                idx = idx * d + self.domain.index(a)
            except ValueError:
                raise CostFunctionError(f"label {a!r} not in domain {self.domain}") from None
        return idx

    def __call__(self, *x) -> ExtRat:
        if len(x) == 1 and isinstance(x[0], (tuple, list)):
            x = tuple(x[0])
        return self.table[self.index(x)]

    def items(self):
        return zip(self.points(), self.table)

    def dom(self) -> list[tuple]:
        return [x for x, v in self.items() if v is not INF]

    def to_json(self) -> dict:
        return {
            "domain": [str(a) for a in self.domain],
            "arity": self.arity,
            "table": {",".join(str(a) for a in x): format_extrat(v) for x, v in self.items()},
        }

    @classmethod
    def from_json(cls, data: dict, domain: Optional[Sequence] = None):
        """Parse the JSON form.  Labels are read back as ints where possible."""
        labels = tuple(domain) if domain is not None else tuple(parse_label(s) for s in data["domain"])
        if [str(a) for a in labels] != [str(s) for s in data["domain"]]:
            raise CostFunctionError("domain labels do not match the JSON domain")
        arity = int(data["arity"])
        raw = data["table"]
        table = []
        for x in itertools.product(labels, repeat=arity):
            key = ",".join(str(a) for a in x)
            if key not in raw:
                raise CostFunctionError(f"missing table entry {key!r}")
            table.append(to_extrat(raw[key]))
        if len(raw) != len(table):
            raise CostFunctionError("table has entries outside the domain")
        return cls(labels, arity, tuple(table))


def parse_label(text: str) -> Hashable:
    try:
        return int(text)
    except ValueError:
        return text


# ---------------------------------------------------------------------------
# properties

PROPERTIES = ("submodular", "ksubmodular", "diamond_submodular",
              "monotone_nondecreasing", "monotone_nonincreasing")


@dataclass(frozen=True)
class PropertyResult:
    holds: bool
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.holds


def _family_for(f: CostFunction, prop: str, k: Optional[int]) -> LatticeFamily:
    labels = set(f.domain)
    if prop == "submodular":
        if labels != {0, 1}:
            raise CostFunctionError("submodularity needs the domain {0, 1}")
        return LatticeFamily.boolean()
    if prop == "ksubmodular":
        if k is None:
            k = len(f.domain) - 1
        if len(f.domain) != k + 1 or 0 not in labels:
            raise CostFunctionError(f"{k}-submodularity needs k+1 labels including 0")
        return LatticeFamily("ksub", k, tuple(f.domain))
    if prop == "diamond_submodular":
        if k is None:
            k = len(f.domain) - 2
        if labels != {BOT, TOP, *range(1, k + 1)}:
            raise CostFunctionError(f"{k}-diamond submodularity needs labels bot, 1..{k}, top")
        return LatticeFamily.diamond(k)
    raise CostFunctionError(f"unknown property {prop!r}")


def check_property(f: CostFunction, prop: str, k: Optional[int] = None) -> PropertyResult:
    """Check a lattice inequality or coordinatewise monotonicity.

    On failure the witness is the lexicographically first violating pair
    ``(x, y)`` or, for monotonicity, ``(x, x')`` where ``x'`` raises one
    coordinate of ``x`` by a single step in domain order.
    """
    if prop in ("monotone_nondecreasing", "monotone_nonincreasing"):
        return _check_monotone(f, prop == "monotone_nondecreasing")
    family = _family_for(f, prop, k)
    pts = list(f.points())
    vals = f.table
    for i, x in enumerate(pts):
        fx = vals[i]
        if fx is INF:
            continue
        for j in range(i + 1, len(pts)):
            fy = vals[j]
            if fy is INF:
                continue
            y = pts[j]
            m = tuple(family.meet(a, b) for a, b in zip(x, y))
            jn = tuple(family.join(a, b) for a, b in zip(x, y))
            if fx + fy < f(m) + f(jn):
                return PropertyResult(False, (x, y))
    return PropertyResult(True)


def _check_monotone(f: CostFunction, nondecreasing: bool) -> PropertyResult:
    for x in f.points():
        for c in range(f.arity):
            pos = f.domain.index(x[c])
            if pos + 1 == len(f.domain):
                continue
            up = x[:c] + (f.domain[pos + 1],) + x[c + 1:]
            lo, hi = f(x), f(up)
            ok = lo <= hi if nondecreasing else hi <= lo
            if not ok:
                return PropertyResult(False, (x, up))
    return PropertyResult(True)


# ---------------------------------------------------------------------------
# clone operations

def scale_shift(f: CostFunction, alpha, beta) -> CostFunction:
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    if alpha < 0:
        raise CostFunctionError("alpha must be nonnegative")
    table = tuple(INF if v is INF else scale(alpha, v) + beta for v in f.table)
    return CostFunction(f.domain, f.arity, table)


def add(f: CostFunction, g: CostFunction, s1: Sequence[int], s2: Sequence[int], n: int) -> CostFunction:
    """``h(x) = f(x[s1]) + g(x[s2])`` with 1-based index maps ``s1``, ``s2`` into [n]."""
    if f.domain != g.domain:
        raise CostFunctionError("domain mismatch")
    if len(s1) != f.arity or len(s2) != g.arity:
        raise CostFunctionError("index maps must match the arities")
    for s in itertools.chain(s1, s2):
        if not 1 <= s <= n:
            raise CostFunctionError(f"index {s} out of range 1..{n}")

    def h(*x):
        return f(tuple(x[i - 1] for i in s1)) + g(tuple(x[i - 1] for i in s2))

    return CostFunction.from_callable(f.domain, n, h)


def partial_min(f: CostFunction, keep: int, drop: int) -> CostFunction:
    """Minimize out the last ``drop`` coordinates."""
    if keep < 1 or drop < 0 or keep + drop != f.arity:
        raise CostFunctionError("need keep >= 1 and keep + drop == arity")
    if drop == 0:
        return f
    block = len(f.domain) ** drop
    table = tuple(min(f.table[i * block:(i + 1) * block]) for i in range(len(f.table) // block))
    return CostFunction(f.domain, keep, table)


def _binary_domain(f: CostFunction):
    if set(f.domain) != {0, 1}:
        raise CostFunctionError("operation needs the domain {0, 1}")


def complement_function(f: CostFunction) -> CostFunction:
    """``x -> f(1 - x)`` on {0,1}^n."""
    _binary_domain(f)
    return CostFunction.from_callable(f.domain, f.arity, lambda *x: f(tuple(1 - a for a in x)))


def brute_force_min(f: CostFunction) -> tuple[ExtRat, tuple]:
    """Global minimum and lexicographically least minimizer (in domain order)."""
    best = None
    best_x = None
    for x, v in f.items():
        if best is None or v < best:
            best, best_x = v, x
    return best, best_x


# ---------------------------------------------------------------------------
# fixtures

BUILTIN_NAMES = ("weighted_equality", "diamond_distance", "and2", "and3", "bisub3",
                 "ksub2", "h0", "h1", "h2")


def diamond_domain(k: int) -> tuple:
    return (BOT,) + tuple(range(1, k + 1)) + (TOP,)


def builtin_function(name: str, k: Optional[int] = None, domain: Optional[Sequence] = None) -> CostFunction:
    if name == "weighted_equality":
        dom = tuple(domain) if domain is not None else (0, 1)
        return CostFunction.from_callable(dom, 2, lambda x, y: 0 if x == y else INF)
    if name == "diamond_distance":
        if k is None or k < 1:
            raise CostFunctionError("diamond_distance needs k >= 1")

        def d(x, y):
            if x == y:
                return 0
            if {x, y} <= {BOT, TOP}:
                return 2
            if BOT in (x, y) or TOP in (x, y):
                return 1
            return 2

        return CostFunction.from_callable(diamond_domain(k), 2, d)
    if name == "and2":
        return CostFunction.from_callable((0, 1), 2, lambda x, y: 1 if x == y == 1 else 0)
    if name == "and3":
        return CostFunction.from_callable((0, 1), 3, lambda x, y, z: 1 if x == y == z == 1 else 0)
    if name == "bisub3":
        special = {(0, 0, 0): -1, (0, 1, 1): 1, (1, 0, 1): 1, (1, 1, 0): 1, (1, 1, 1): 2}
        return CostFunction.from_callable((0, 1, -1), 3, lambda *x: special.get(x, 0))
    if name == "ksub2":
        if k is None or k < 1:
            raise CostFunctionError("ksub2 needs k >= 1")
        special = {(0, 0): -1, (1, 1): 1}
        return CostFunction.from_callable(range(k + 1), 2, lambda *x: special.get(x, 0))
    if name == "h0":
        return CostFunction((0, 1), 1, (0, INF))
    if name == "h1":
        return CostFunction((0, 1), 1, (INF, 0))
    if name == "h2":
        return builtin_function("weighted_equality")
    raise CostFunctionError(f"unknown builtin function {name!r}")
