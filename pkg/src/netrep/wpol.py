"""Operation tables, weighted polymorphisms and nonmembership refutations.

A weighted polymorphism is stored by its finite support.  The two standard
ones, ``omega2`` (arity 4, bisubmodular domain) and ``omega_k`` (arity 8,
domain [0, k]), are materialized by evaluating their lattice terms on the
bit encodings: every argument is encoded, the term is evaluated with
bitwise and/or, the result is retracted and decoded.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .costfn import CostFunction, builtin_function
from .encoding import Encoding, standard_encoding
from .extrat import INF, format_extrat, to_extrat

MAX_TABLE = 1 << 24


class WpolError(ValueError):
    pass


def _grid(d: int, m: int) -> np.ndarray:
    """Row-major argument indices, shape (m, d**m)."""
    if d ** m > MAX_TABLE:
        raise WpolError(f"operation table of size {d}^{m} is too large")
    dtype = np.uint8 if d < 256 else np.uint16
    return np.indices((d,) * m, dtype=dtype).reshape(m, -1)


@dataclass(frozen=True, eq=False)
class OperationTable:
    """A total m-ary operation on a labelled domain.

    ``table`` holds output label indices in row-major order of the inputs.
    """

    domain: tuple
    arity: int
    table: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        t = np.asarray(self.table, dtype=np.int32).ravel()
        if t.size != len(self.domain) ** self.arity:
            raise WpolError("operation table has the wrong size")
        if t.size and (t.min() < 0 or t.max() >= len(self.domain)):
            raise WpolError("operation table leaves the domain")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def __eq__(self, other):
        if not isinstance(other, OperationTable):
            return NotImplemented
        return (self.domain == other.domain and self.arity == other.arity
                and np.array_equal(self.table, other.table))

    def __hash__(self):
        return hash((self.domain, self.arity, self.table.tobytes()))

    def __call__(self, *args):
        d = len(self.domain)
        if len(args) != self.arity:
            raise WpolError(f"expected {self.arity} arguments")
        idx = 0
        for a in args:
            idx = idx * d + self.domain.index(a)
        return self.domain[self.table[idx]]

    def projection_index(self) -> Optional[int]:
        """1-based i if this is the projection e_i, else None."""
        grid = _grid(len(self.domain), self.arity)
        for i in range(self.arity):
            if np.array_equal(self.table, grid[i]):
                return i + 1
        return None

    def to_json(self) -> dict:
        labels = [str(a) for a in self.domain]
        table = {}
        for args, out in zip(itertools.product(labels, repeat=self.arity), self.table.tolist()):
            table[",".join(args)] = labels[out]
        out = {"domain": labels, "arity": self.arity, "table": table}
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, data: dict, domain: Optional[Sequence] = None):
        labels = [str(a) for a in data["domain"]]
        dom = tuple(domain) if domain is not None else tuple(_label(s) for s in labels)
        m = int(data["arity"])
        raw = data["table"]
        pos = {s: i for i, s in enumerate(labels)}
        try:
            table = [pos[raw[",".join(args)]] for args in itertools.product(labels, repeat=m)]
        except KeyError as exc:
            raise WpolError(f"operation table misses or mislabels {exc}") from None
        return cls(dom, m, np.array(table), data.get("name", ""))


def _label(s: str):
    try:
        return int(s)
    except ValueError:
        return s


def projection(domain: Sequence, arity: int, i: int) -> OperationTable:
    """e_i (1-based)."""
    if not 1 <= i <= arity:
        raise WpolError("projection index out of range")
    return OperationTable(tuple(domain), arity, _grid(len(domain), arity)[i - 1], f"e{i}")


def apply_operation(phi: OperationTable, tuples: Sequence[Sequence]) -> tuple:
    """Coordinatewise application to m points of D^n."""
    if len(tuples) != phi.arity:
        raise WpolError(f"need {phi.arity} tuples, got {len(tuples)}")
    n = len(tuples[0])
    if any(len(t) != n for t in tuples):
        raise WpolError("tuples have different lengths")
    return tuple(phi(*(t[j] for t in tuples)) for j in range(n))


def term_operation(enc: Encoding, arity: int, term: Callable, name: str = "") -> OperationTable:
    """The operation ``a -> decode(rho(term(encode(a_1), ..., encode(a_m))))``.

    ``term`` receives integer bitmask arrays and combines them with ``&`` and
    ``|``.
    """
    d = len(enc.domain)
    grid = _grid(d, arity)
    codes = np.array(enc.sigma_int, dtype=np.int64)
    bits = [codes[g] for g in grid]
    raw = np.asarray(term(*bits), dtype=np.int64)
    rho = np.array(enc.rho, dtype=np.int64)
    decode = np.full(2 ** enc.k, -1, dtype=np.int64)
    for i, c in enumerate(enc.sigma_int):
        decode[c] = i
    out = decode[rho[raw]]
    return OperationTable(enc.domain, arity, out, name)


@dataclass(frozen=True)
class WeightedPolymorphism:
    arity: int
    domain: tuple
    support: tuple  # ((OperationTable, Fraction), ...)
    name: str = ""
    note: str = ""

    @property
    def weights(self) -> tuple:
        return tuple(w for _, w in self.support)

    def to_json(self, tables: bool = True) -> dict:
        ops = []
        for op, w in self.support:
            entry = {"weight": format_extrat(w), "name": op.name}
            if tables:
                entry["op"] = op.to_json()
            ops.append(entry)
        out = {"name": self.name, "arity": self.arity, "domain": [str(a) for a in self.domain],
               "support": ops}
        if self.note:
            out["note"] = self.note
        return out

    @classmethod
    def from_json(cls, data: dict):
        """Parse; entries without a table are looked up in the standard wpol named by ``name``."""
        domain = tuple(_label(s) for s in data["domain"])
        arity = int(data["arity"])
        std = None
        support = []
        for entry in data["support"]:
            w = Fraction(entry["weight"])
            if "op" in entry:
                op = OperationTable.from_json(entry["op"], domain)
            else:
                if std is None:
                    std = _standard_by_name(data.get("name", ""))
                ops = {o.name: o for o, _ in std.support}
                if entry.get("name") not in ops:
                    raise WpolError(f"unknown operation {entry.get('name')!r}")
                op = ops[entry["name"]]
            if op.arity != arity or op.domain != domain:
                raise WpolError("operation does not match the arity or domain")
            support.append((op, w))
        return cls(arity, domain, tuple(support), data.get("name", ""), data.get("note", ""))


@dataclass(frozen=True)
class WpolCheck:
    weights_sum_zero: bool
    negatives_are_projections: bool
    inequality_holds: bool
    violation: Optional[tuple] = None  # (function index, tuples, value)
    tuples_checked: int = 0
    exhaustive: bool = True

    def __bool__(self):
        return self.weights_sum_zero and self.negatives_are_projections and self.inequality_holds


def validate_wpol(omega: WeightedPolymorphism, sample: Sequence[CostFunction],
                  limit: int = 1_000_000, samples: int = 200_000, seed: int = 0) -> WpolCheck:
    """Necessary-condition check of a weighted polymorphism on sample functions.

    For each function, all ``|dom f|^m`` argument tuples are tried when that
    is at most ``limit``; otherwise ``samples`` tuples are drawn with a
    seeded generator.  Passing never proves that omega is a weighted
    polymorphism of an infinite language.
    """
    for f in sample:
        if tuple(f.domain) != omega.domain:
            raise WpolError(f"function domain {f.domain} differs from {omega.domain}")
    total = sum(omega.weights, Fraction(0))
    neg_ok = all(w >= 0 or op.projection_index() is not None for op, w in omega.support)
    checked = 0
    exhaustive = True
    for fi, f in enumerate(sample):
        res = _superposition_scan(omega, f, limit, samples, seed)
        checked += res[0]
        exhaustive = exhaustive and res[1]
        if res[2] is not None:
            return WpolCheck(total == 0, neg_ok, False, (fi,) + res[2], checked, exhaustive)
    return WpolCheck(total == 0, neg_ok, True, None, checked, exhaustive)


def _superposition_scan(omega, f, limit, samples, seed):
    m = omega.arity
    n = f.arity
    d = len(f.domain)
    dom_pts = [p for p, v in f.items() if v is not INF]
    if not dom_pts:
        return 0, True, None
    pts = np.array([[f.domain.index(a) for a in p] for p in dom_pts], dtype=np.int64)
    # f on a common denominator; INF marked separately
    finite = [v for v in f.table if v is not INF]
    den = math.lcm(*(v.denominator for v in finite)) if finite else 1
    ftab = np.array([0 if v is INF else int(v * den) for v in f.table], dtype=object)
    finf = np.array([v is INF for v in f.table])
    wden = math.lcm(*(w.denominator for w in omega.weights))
    weights = [int(w * wden) for w in omega.weights]
    P = len(dom_pts)
    count = P ** m
    exhaustive = count <= limit
    if exhaustive:
        def batches():
            chunk = 1 << 16
            for start in range(0, count, chunk):
                lin = np.arange(start, min(count, start + chunk), dtype=np.int64)
                yield np.stack([(lin // P ** (m - 1 - i)) % P for i in range(m)], axis=1)
        total = count
    else:
        rng = np.random.default_rng(seed)

        def batches():
            left = samples
            while left:
                b = min(left, 1 << 16)
                left -= b
                yield rng.integers(0, P, size=(b, m))
        total = samples
    powers = [d ** (m - 1 - i) for i in range(m)]
    fpow = [d ** (n - 1 - j) for j in range(n)]
    for combo in batches():
        acc = np.zeros(len(combo), dtype=object)
        bad = np.zeros(len(combo), dtype=bool)
        for (op, _), w in zip(omega.support, weights):
            if w == 0:
                continue
            fidx = np.zeros(len(combo), dtype=np.int64)
            for j in range(n):
                arg = np.zeros(len(combo), dtype=np.int64)
                for i in range(m):
                    arg += pts[combo[:, i], j] * powers[i]
                fidx += op.table[arg].astype(np.int64) * fpow[j]
            if w > 0:
                bad |= finf[fidx]
            acc = acc + ftab[fidx] * w
        viol = bad | (acc > 0)
        if viol.any():
            r = int(np.argmax(viol))
            tuples = tuple(dom_pts[c] for c in combo[r].tolist())
            return total, exhaustive, (tuples, refutation_value(omega, f, tuples))
    return total, exhaustive, None


@dataclass(frozen=True)
class Contribution:
    name: str
    weight: Fraction
    output: tuple
    value: object
    contribution: object


def refutation_terms(omega: WeightedPolymorphism, f: CostFunction, tuples: Sequence[Sequence]) -> list:
    if tuple(f.domain) != omega.domain:
        raise WpolError("function and weighted polymorphism have different domains")
    tuples = [tuple(t) for t in tuples]
    if len(tuples) != omega.arity:
        raise WpolError(f"need {omega.arity} tuples, got {len(tuples)}")
    for t in tuples:
        if len(t) != f.arity:
            raise WpolError(f"tuple {t} has the wrong length")
        if f(t) is INF:
            raise WpolError(f"tuple {t} is outside dom f")
    out = []
    for op, w in omega.support:
        y = apply_operation(op, tuples)
        v = f(y)
        if v is INF:
            c = INF if w > 0 else (Fraction(0) if w == 0 else None)
            if c is None:
                raise WpolError("negative weight on an infinite value")
        else:
            c = w * v
        out.append(Contribution(op.name, w, y, v, c))
    return out


def refutation_value(omega: WeightedPolymorphism, f: CostFunction, tuples: Sequence[Sequence]):
    """``sum_phi omega(phi) f(phi(tuples))``; positive means f is not in any language admitting omega."""
    total = Fraction(0)
    for c in refutation_terms(omega, f, tuples):
        total = total + c.contribution
    return total


# ---------------------------------------------------------------------------
# the standard constructions

def _omega2_terms():
    return [
        ("phi1", lambda a, b, c, d: a & b),
        ("phi2", lambda a, b, c, d: (a | b) & c),
        ("phi3", lambda a, b, c, d: (a | b | c) & d),
        ("phi4", lambda a, b, c, d: a | b | c | d),
    ]


def _omega_k_terms():
    p14 = lambda b1, b4, b2, b5: (b1 | b4) & (b2 | b5)  # noqa: E731
    p78 = lambda b1, b7, b2, b8: (b1 | b7) & (b2 | b8)  # noqa: E731
    return [
        ("phi1", 3, (lambda b1, b2, b3, b4, b5, b6, b7, b8: b1 & b4)),
        ("phi2", 2, (lambda b1, b2, b3, b4, b5, b6, b7, b8: b1 & b7)),
        ("phi3", 2, (lambda b1, b2, b3, b4, b5, b6, b7, b8: b2 & b5)),
        ("phi4", 3, (lambda b1, b2, b3, b4, b5, b6, b7, b8: b2 & b8)),
        ("phi5", 1, (lambda b1, b2, b3, b4, b5, b6, b7, b8: (b1 | b4) & b3)),
        ("phi6", 1, (lambda b1, b2, b3, b4, b5, b6, b7, b8: (b2 | b8) & b6)),
        ("phi7", 2, (lambda b1, b2, b3, b4, b5, b6, b7, b8: p14(b1, b4, b2, b5) & b3)),
        ("phi8", 2, (lambda b1, b2, b3, b4, b5, b6, b7, b8: p78(b1, b7, b2, b8) & b6)),
        ("phi9", 2, (lambda b1, b2, b3, b4, b5, b6, b7, b8:
                      (b1 | b2 | b4 | b5) & (b1 | b2 | b7 | b8))),
        ("phi10", 1, (lambda b1, b2, b3, b4, b5, b6, b7, b8:
                       (p14(b1, b4, b2, b5) | b3) & (b2 | b6 | b8))),
        ("phi11", 1, (lambda b1, b2, b3, b4, b5, b6, b7, b8:
                       (p78(b1, b7, b2, b8) | b6) & (b1 | b3 | b4))),
        ("phi12", 1, (lambda b1, b2, b3, b4, b5, b6, b7, b8:
                       (p14(b1, b4, b2, b5) | b3) & (p78(b1, b7, b2, b8) | b6))),
        ("phi13", 1, (lambda b1, b2, b3, b4, b5, b6, b7, b8:
                       p14(b1, b4, b2, b5) | p78(b1, b7, b2, b8) | b3 | b6)),
        ("phi14", 1, (lambda b1, b2, b3, b4, b5, b6, b7, b8:
                       (b1 | b2 | b4 | b5 | b7 | b8) & (p14(b1, b4, b2, b5) | b2 | b3 | b6 | b8))),
        ("phi15", 1, (lambda b1, b2, b3, b4, b5, b6, b7, b8:
                       (b1 | b2 | b4 | b5 | b7 | b8) & (p78(b1, b7, b2, b8) | b1 | b3 | b4 | b6))),
        ("phi16", 2, (lambda b1, b2, b3, b4, b5, b6, b7, b8: b1 | b2 | b3 | b4 | b5 | b6 | b7 | b8)),
    ]


OMEGA_K_PROJECTION_WEIGHTS = (-5, -5, -3, -3, -2, -3, -2, -3)

OMEGA2_TUPLES = ((0, 1, -1), (0, -1, -1), (0, -1, 1), (-1, 1, 1))
OMEGA_K_TUPLES = ((1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3))


def _omega2() -> WeightedPolymorphism:
    enc = standard_encoding("pair")
    support = [(projection(enc.domain, 4, i), Fraction(-1)) for i in range(1, 5)]
    support += [(term_operation(enc, 4, fn, name), Fraction(1)) for name, fn in _omega2_terms()]
    return WeightedPolymorphism(4, enc.domain, tuple(support), "omega2")


def _omega_k(k: int) -> WeightedPolymorphism:
    enc = standard_encoding("unary", k)
    support = [(projection(enc.domain, 8, i + 1), Fraction(w))
               for i, w in enumerate(OMEGA_K_PROJECTION_WEIGHTS)]
    support += [(term_operation(enc, 8, fn, name), Fraction(w)) for name, w, fn in _omega_k_terms()]
    note = ""
    if k > 3:
        note = (f"terms evaluated with the unary({k}) encoding; on labels 0..3 this is the "
                "unary(3) construction embedded in [0,k]")
    return WeightedPolymorphism(8, enc.domain, tuple(support), f"omega_k({k})", note)


def standard_wpol(name: str, k: Optional[int] = None):
    """``(omega, canonical tuples, target function)`` for ``omega2`` or ``omega_k``."""
    if name == "omega2":
        return _omega2(), OMEGA2_TUPLES, builtin_function("bisub3")
    if name == "omega_k":
        if k is None or k < 3:
            raise WpolError("omega_k needs k >= 3")
        return _omega_k(k), OMEGA_K_TUPLES, builtin_function("ksub2", k)
    raise WpolError(f"unknown weighted polymorphism {name!r}")


def _standard_by_name(name: str) -> WeightedPolymorphism:
    if name == "omega2":
        return standard_wpol("omega2")[0]
    if name.startswith("omega_k(") and name.endswith(")"):
        return standard_wpol("omega_k", int(name[8:-1]))[0]
    raise WpolError(f"cannot resolve operations of {name!r} without tables")


def parse_wpol_name(text: str):
    """``omega2``, ``omega_k:3`` or ``omega_k(3)``."""
    if text == "omega2":
        return "omega2", None
    for sep in (":", "("):
        if text.startswith("omega_k" + sep):
            return "omega_k", int(text[8:].rstrip(")"))
    raise WpolError(f"unknown weighted polymorphism {text!r}")


def certificate(omega: WeightedPolymorphism, f: CostFunction, tuples: Sequence[Sequence]) -> dict:
    terms = refutation_terms(omega, f, tuples)
    total = Fraction(0)
    for c in terms:
        total = total + c.contribution
    return {
        "omega": omega.name,
        "function": f.to_json(),
        "tuples": [[str(a) for a in t] for t in tuples],
        "contributions": [
            {"op": c.name, "weight": format_extrat(c.weight), "output": [str(a) for a in c.output],
             "value": format_extrat(c.value), "contribution": format_extrat(c.contribution)}
            for c in terms
        ],
        "total": format_extrat(total),
        "refutes": total > 0,
    }


def verify_certificate(data: dict) -> bool:
    """Recompute every term of a refutation certificate from scratch."""
    omega = _standard_by_name(data["omega"])
    f = CostFunction.from_json(data["function"])
    tuples = [tuple(_label(a) for a in t) for t in data["tuples"]]
    fresh = certificate(omega, f, tuples)
    return fresh == data and to_extrat(data["total"]) > 0


__all__ = [
    "OperationTable", "WeightedPolymorphism", "WpolCheck", "WpolError", "Contribution",
    "apply_operation", "projection", "term_operation", "validate_wpol", "refutation_terms",
    "refutation_value", "standard_wpol", "parse_wpol_name", "certificate", "verify_certificate",
    "OMEGA2_TUPLES", "OMEGA_K_TUPLES",
]
