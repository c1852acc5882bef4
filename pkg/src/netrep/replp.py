"""Decide membership of f in the (k, rho, sigma)-submodular representable class.

f on D^n is representable iff some submodular g on {0,1}^(kn) satisfies
``g(sigma(x)) = f(x)`` for all x and ``g(rho(v)) <= g(v)`` blockwise.  With
extended values, ``dom g`` must contain the sigma-image of ``dom f`` and be
closed under componentwise meet, join and blockwise rho; g is therefore
searched on the smallest such set and fixed to +inf elsewhere.  Restricting
to that set only removes constraints, so the decision is unchanged.

No constant offset is used: the representable class is closed under adding
constants, so ``f = g o sigma`` exactly loses nothing.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .costfn import CostFunction, check_property
from .encoding import (Encoding, EncodingError, bits_to_int, encode_tuple, int_to_bits,
                       retract_int, bitstring)
from .extrat import INF, format_extrat
from .ratlp import Feasible, Infeasible, LinSystem, check_farkas, feasible

MAX_BITS = 10


class RepresentabilityError(ValueError):
    pass


def _check_aligned(f: CostFunction, enc: Encoding):
    if tuple(f.domain) != tuple(enc.domain):
        if set(map(str, f.domain)) == set(map(str, enc.domain)) and len(f.domain) == len(enc.domain):
            raise RepresentabilityError(
                f"label order differs: function {f.domain} vs encoding {enc.domain}")
        raise RepresentabilityError(f"domain mismatch: function {f.domain} vs encoding {enc.domain}")
    if enc.k * f.arity > MAX_BITS:
        raise RepresentabilityError(f"k*n = {enc.k * f.arity} exceeds the cap of {MAX_BITS}")


def sigma_image(f: CostFunction, enc: Encoding) -> dict:
    """Packed sigma-image of every point of D^n mapped to f's value there."""
    return {bits_to_int(encode_tuple(enc, x)): v for x, v in f.items()}


def _closure_ints(seed: Iterable[int], enc: Encoding, n: int) -> list[int]:
    closed: set = set()
    order: list = []
    work = sorted(set(seed), reverse=True)
    while work:
        p = work.pop()
        if p in closed:
            continue
        cand = [retract_int(enc, p, n)]
        for q in order:
            cand.append(p & q)
            cand.append(p | q)
        closed.add(p)
        order.append(p)
        work.extend(c for c in cand if c not in closed)
    return sorted(closed)


def dom_closure(f: CostFunction, enc: Encoding) -> list[tuple]:
    """Smallest set containing sigma(dom f) closed under meet, join and blockwise rho."""
    _check_aligned(f, enc)
    seed = [bits_to_int(encode_tuple(enc, x)) for x in f.dom()]
    width = enc.k * f.arity
    return [int_to_bits(v, width) for v in _closure_ints(seed, enc, f.arity)]


@dataclass(frozen=True)
class RepSystem:
    system: LinSystem
    variables: tuple        # packed bit vectors, one per LP variable
    conflict: Optional[tuple]  # point x with f(x) = inf whose code is forced finite
    stats: dict


def build_system(f: CostFunction, enc: Encoding, dom: Optional[Iterable] = None) -> RepSystem:
    """Linear system over the values ``g(v)``, v in the closure of sigma(dom f).

    Rows: ``g(sigma(x)) = f(x)`` for x in dom f; ``g(u) + g(v) - g(u&v) -
    g(u|v) >= 0`` for every unordered pair; ``g(v) - g(rho(v)) >= 0`` for
    every v.  ``dom`` overrides the variable set (it must be closed).
    """
    _check_aligned(f, enc)
    n = f.arity
    width = enc.k * n
    if dom is None:
        variables = _closure_ints((bits_to_int(encode_tuple(enc, x)) for x in f.dom()), enc, n)
    else:
        variables = sorted({v if isinstance(v, int) else bits_to_int(v) for v in dom})
        vs = set(variables)
        for a in variables:
            if retract_int(enc, a, n) not in vs or any((a & b) not in vs or (a | b) not in vs for b in variables):
                raise RepresentabilityError("the supplied dom is not meet/join/rho closed")
    index = {v: i for i, v in enumerate(variables)}
    conflict = None
    equalities = []
    for x, value in f.items():
        code = bits_to_int(encode_tuple(enc, x))
        if value is INF:
            if code in index and conflict is None:
                conflict = x
            continue
        if code not in index:
            raise RepresentabilityError("supplied dom misses the code of a finite point")
        equalities.append(({index[code]: 1}, value))
    submod = []
    for a in range(len(variables)):
        u = variables[a]
        for b in range(a + 1, len(variables)):
            v = variables[b]
            row: dict = {}
            for w, c in ((u, 1), (v, 1), (u & v, -1), (u | v, -1)):
                j = index[w]
                row[j] = row.get(j, 0) + c
            submod.append((row, 0))
    retract = []
    for v in variables:
        r = retract_int(enc, v, n)
        row = {index[v]: 1}
        row[index[r]] = row.get(index[r], 0) - 1
        retract.append((row, 0))
    system = LinSystem.build(len(variables), equalities, submod + retract)
    stats = {
        "bits": width,
        "variables": len(variables),
        "equality_rows": len(equalities),
        "submodular_rows": len(submod),
        "retraction_rows": len(retract),
    }
    return RepSystem(system, tuple(variables), conflict, stats)


@dataclass(frozen=True)
class RepDecision:
    feasible: bool
    witness: Optional[CostFunction]
    farkas: Optional[Infeasible]
    conflict: Optional[tuple]
    dom_used: tuple
    stats: dict
    system: LinSystem = field(repr=False, compare=False, default=None)

    @property
    def verdict(self) -> str:
        return "feasible" if self.feasible else "infeasible"

    def to_json(self) -> dict:
        width = self.stats["bits"]
        out = {
            "verdict": self.verdict,
            "stats": {k: v for k, v in self.stats.items() if k != "seconds"},
            "dom_used": [bitstring(int_to_bits(v, width)) for v in self.dom_used],
        }
        if self.witness is not None:
            out["witness"] = {bitstring(int_to_bits(v, width)): format_extrat(self.witness.table[v])
                              for v in self.dom_used}
        if self.farkas is not None:
            out["farkas"] = self.farkas.to_json()
        if self.conflict is not None:
            out["dom_conflict"] = [str(a) for a in self.conflict]
        return out


def decide_representable(f: CostFunction, enc: Encoding, dom: Optional[Iterable] = None) -> RepDecision:
    """Exact decision with a verified witness g or a Farkas certificate.

    Infeasibility also rules out (k, rho, sigma)-network representability,
    since every network-representable function is submodular representable.
    """
    start = time.perf_counter()
    rs = build_system(f, enc, dom)
    stats = dict(rs.stats)
    width = stats["bits"]
    if rs.conflict is not None:
        stats["seconds"] = time.perf_counter() - start
        return RepDecision(False, None, None, rs.conflict, rs.variables, stats, rs.system)
    result = feasible(rs.system)
    stats["seconds"] = time.perf_counter() - start
    if isinstance(result, Feasible):
        table = [INF] * (2 ** width)
        for v, val in zip(rs.variables, result.x):
            table[v] = val
        g = CostFunction((0, 1), width, tuple(table)) if width else None
        if g is not None and not verify_witness(g, f, enc):
            raise AssertionError("internal error: LP witness fails verify_witness")
        return RepDecision(True, g, None, None, rs.variables, stats, rs.system)
    return RepDecision(False, None, result, None, rs.variables, stats, rs.system)


def verify_witness(g: CostFunction, f: CostFunction, enc: Encoding) -> bool:
    """g submodular, ``g o sigma == f`` and ``g(v) >= g(rho(v))`` everywhere."""
    n = f.arity
    width = enc.k * n
    if tuple(g.domain) != (0, 1) or g.arity != width:
        return False
    if not check_property(g, "submodular"):
        return False
    for x, value in f.items():
        if g.table[bits_to_int(encode_tuple(enc, x))] != value:
            return False
    for v in range(2 ** width):
        gv = g.table[v]
        if gv is not INF and gv < g.table[retract_int(enc, v, n)]:
            return False
    return True


def verify_decision_json(data: dict, f: CostFunction, enc: Encoding) -> bool:
    """Re-check an archived decision against a freshly built system."""
    rs = build_system(f, enc)
    width = rs.stats["bits"]
    if data["verdict"] == "feasible":
        table = [INF] * (2 ** width)
        for key, val in data["witness"].items():
            table[int(key, 2)] = Fraction(val)
        return verify_witness(CostFunction((0, 1), width, tuple(table)), f, enc)
    if "dom_conflict" in data:
        return rs.conflict is not None and [str(a) for a in rs.conflict] == data["dom_conflict"]
    if "farkas" not in data:
        return False
    try:
        cert = Infeasible.from_json(data["farkas"])
    except (KeyError, ValueError):
        return False
    return check_farkas(rs.system, cert)
