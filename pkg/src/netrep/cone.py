"""The cone of retractable networks without extra nodes.

With only s, t and designated nodes, ``c_min`` at a pinning x is the cut
``C(X_x)`` itself, a linear form in the capacities.  Retractability is
then the finite list of homogeneous inequalities
``C(X_x) - C(X_rho(x)) >= 0`` together with ``c >= 0``, so the retractable
networks form a pointed polyhedral cone.  Its extreme rays are enumerated
by the double description method in exact integer arithmetic.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .encoding import Encoding, retract_blocks
from .network import S, T, Network, NetworkError, designated, node
from .ratlp import Feasible, LinSystem, nonneg_combination


class ConeError(ValueError):
    pass


@dataclass(frozen=True)
class ConeSpec:
    n: int
    enc: Encoding
    include_st: bool = False

    @property
    def edges(self) -> tuple:
        """Edge variables in (from, to) order: s first, then designated nodes in (i, l) order, t last."""
        des = designated(self.n, self.enc.k)
        out = []
        for u in [S] + des:
            for v in des + [T]:
                if u != v and (self.include_st or (u, v) != (S, T)):
                    out.append((u, v))
        return tuple(out)

    def to_json(self) -> dict:
        return {"n": self.n, "encoding": self.enc.to_json(), "include_st": self.include_st}

    def digest(self) -> str:
        text = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def cut_row(spec: ConeSpec, x: Sequence[int]) -> dict:
    """Coefficients of ``C(X_x)`` over the edge variables."""
    side = {S} | {v for v, b in zip(designated(spec.n, spec.enc.k), x) if b}
    return {j: 1 for j, (u, v) in enumerate(spec.edges) if u in side and v not in side}


def build_cone(spec: ConeSpec) -> LinSystem:
    """Homogeneous system: ``c >= 0`` and one row per pinning moved by rho."""
    rows = []
    for x in itertools.product((0, 1), repeat=spec.n * spec.enc.k):
        rx = retract_blocks(spec.enc, x)
        if rx == x:
            continue
        row = cut_row(spec, x)
        for j, a in cut_row(spec, rx).items():
            row[j] = row.get(j, 0) - a
        rows.append(({j: a for j, a in row.items() if a}, 0))
    m = len(spec.edges)
    return LinSystem.build(m, inequalities=rows, nonneg=range(m))


# ---------------------------------------------------------------------------
# exact integer linear algebra

def _rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in rows if any(r)]
    if not a:
        return 0
    ncols = len(a[0])
    rank = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][c]
        for i in range(rank + 1, len(a)):
            ai = a[i]
            f = ai[c]
            ar = a[rank]
            for j in range(c, ncols):
                ai[j] = (ai[j] * p - f * ar[j]) // prev
        prev = p
        rank += 1
        if rank == len(a):
            break
    return rank


def _primitive(v: Sequence[int]) -> tuple:
    g = 0
    for a in v:
        g = math.gcd(g, a)
    return tuple(a // g for a in v) if g > 1 else tuple(v)


def _dense_rows(sys: LinSystem) -> list:
    """All rows ``a.x >= 0`` as primitive integer tuples (bounds included), canonically sorted."""
    m = sys.num_vars
    if sys.equalities:
        raise ConeError("equality rows are not supported; split them into two inequalities")
    out = set()
    for row, b in sys.inequalities:
        if b != 0:
            raise ConeError("the system is not homogeneous")
        den = math.lcm(*(a.denominator for _, a in row)) if row else 1
        dense = [0] * m
        for j, a in row:
            dense[j] = int(a * den)
        if any(dense):
            out.add(_primitive(dense))
    for j in sys.nonneg:
        out.add(tuple(1 if i == j else 0 for i in range(m)))
    return sorted(out, reverse=True)


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b) if x and y)


@dataclass(frozen=True)
class Ray:
    vector: tuple  # primitive nonnegative integers over the edge variables

    def network(self, spec: ConeSpec) -> Network:
        edges = [(u, v, c) for (u, v), c in zip(spec.edges, self.vector) if c]
        return Network.build(edges, spec.n, spec.enc.k)


def extreme_rays(sys: LinSystem) -> list:
    """Extreme rays of ``{x : rows >= 0}`` by double description.

    The cone must be pointed.  Rows are inserted in a canonical order (so the
    output does not depend on how the system lists them) starting from the
    orthant when every variable is bounded below by 0.  Two rays are combined
    only if they are adjacent, tested by the rank of their common tight
    rows.  Every returned ray is re-checked and certified extreme.
    """
    m = sys.num_vars
    rows = _dense_rows(sys)
    units = [tuple(1 if i == j else 0 for i in range(m)) for j in range(m)]
    if set(units) <= set(rows):
        done = list(units)
        rays = list(units)
        pending = [r for r in rows if r not in set(units)]
    else:
        raise ConeError("the cone must contain x >= 0 among its rows (pointed, orthant start)")
    for a in pending:
        vals = [_dot(a, r) for r in rays]
        pos = [r for r, v in zip(rays, vals) if v > 0]
        neg = [r for r, v in zip(rays, vals) if v < 0]
        zero = [r for r, v in zip(rays, vals) if v == 0]
        new = []
        if pos and neg:
            tight = {r: frozenset(i for i, row in enumerate(done) if _dot(row, r) == 0) for r in rays}
            pv = {r: v for r, v in zip(rays, vals)}
            for p in pos:
                for q in neg:
                    common = tight[p] & tight[q]
                    if len(common) < m - 2:
                        continue
                    # combinatorial test first, rank test decides
                    if any(r != p and r != q and common <= tight[r] for r in rays):
                        continue
                    if _rank([done[i] for i in common]) != m - 2:
                        continue
                    c = tuple(pv[p] * y - pv[q] * x for x, y in zip(p, q))
                    new.append(_primitive(c))
        rays = sorted(set(pos + zero + new))
        done.append(a)
    out = []
    for r in sorted(set(rays)):
        if any(_dot(row, r) < 0 for row in rows):
            raise AssertionError("double description produced a ray outside the cone")
        if _rank([row for row in rows if _dot(row, r) == 0]) != m - 1:
            raise AssertionError("double description produced a non-extreme ray")
        out.append(Ray(r))
    return out


def is_extreme(sys: LinSystem, vector: Sequence[int]) -> bool:
    rows = _dense_rows(sys)
    v = tuple(vector)
    if not any(v) or any(_dot(row, v) < 0 for row in rows):
        return False
    return _rank([row for row in rows if _dot(row, v) == 0]) == sys.num_vars - 1


# ---------------------------------------------------------------------------
# symmetry

def swap_signs(n: int) -> dict:
    """i^1 <-> i^2 for every i (the +/- exchange of the pair encoding)."""
    return {node(i, l): node(i, 3 - l) for i in range(1, n + 1) for l in (1, 2)}


def swap_variables(k: int, a: int = 1, b: int = 2) -> dict:
    return {node(i, l): node(j, l) for i, j in ((a, b), (b, a)) for l in range(1, k + 1)}


def _edge_perm(edges: Sequence, perm: Mapping) -> list:
    pos = {e: j for j, e in enumerate(edges)}
    if perm.get(S, S) != S or perm.get(T, T) != T:
        raise ConeError("permutations must fix s and t")
    out = []
    for u, v in edges:
        img = (perm.get(u, u), perm.get(v, v))
        if img not in pos:
            raise ConeError(f"permutation maps edge {(u, v)} outside the edge set")
        out.append(pos[img])
    if sorted(out) != list(range(len(edges))):
        raise ConeError("permutation is not a bijection on the edge set")
    return out


def permute_vector(edges: Sequence, perm: Mapping, vector: Sequence) -> tuple:
    """The capacity vector of the relabelled network."""
    target = _edge_perm(edges, perm)
    out = [0] * len(vector)
    for j, t in enumerate(target):
        out[t] = vector[j]
    return tuple(out)


@dataclass(frozen=True)
class Orbit:
    representative: Ray
    size: int
    members: tuple


def symmetry_reduce(rays: Sequence[Ray], edges: Sequence, generators: Sequence[Mapping]) -> list:
    """One lexicographically least representative per orbit of the generated group."""
    maps = [_edge_perm(edges, g) for g in generators]
    remaining = {r.vector for r in rays}
    out = []
    while remaining:
        start = min(remaining)
        orbit = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for tmap in maps:
                w = [0] * len(v)
                for j, t in enumerate(tmap):
                    w[t] = v[j]
                w = tuple(w)
                if w not in orbit:
                    orbit.add(w)
                    frontier.append(w)
        if not orbit <= remaining:
            raise ConeError("the ray set is not closed under the symmetry group")
        remaining -= orbit
        members = tuple(Ray(v) for v in sorted(orbit))
        out.append(Orbit(Ray(min(orbit)), len(orbit), members))
    return sorted(out, key=lambda o: o.representative.vector)


# ---------------------------------------------------------------------------
# decomposition and export

def capacity_vector(net: Network, spec: ConeSpec) -> tuple:
    if net.extra_nodes:
        raise ConeError("networks with extra nodes are outside the cone")
    if (net.n, net.k) != (spec.n, spec.enc.k):
        raise ConeError("network shape differs from the cone spec")
    pos = {e: j for j, e in enumerate(spec.edges)}
    vec = [Fraction(0)] * len(pos)
    for u, v, c in net.edges:
        if (u, v) not in pos:
            raise ConeError(f"edge {(u, v)} is outside the edge policy")
        if not isinstance(c, Fraction) and not isinstance(c, int):
            raise ConeError("infinite capacities are outside the cone")
        vec[pos[(u, v)]] = Fraction(c)
    return tuple(vec)


def decompose(net: Network, rays: Sequence[Ray], spec: ConeSpec):
    """Nonnegative ray coefficients reproducing the network, or a Farkas certificate."""
    return nonneg_combination(capacity_vector(net, spec), [r.vector for r in rays])


def export_rays(directory, spec: ConeSpec, rays: Sequence[Ray], orbits: Optional[Sequence[Orbit]] = None) -> dict:
    """Write one network JSON per ray plus ``manifest.json``; returns the manifest."""
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    names = {}
    for i, r in enumerate(rays):
        name = f"ray_{i:03d}.json"
        names[r.vector] = name
        (path / name).write_text(json.dumps(r.network(spec).to_json(), sort_keys=True, indent=1) + "\n")
    manifest = {
        "spec": spec.to_json(),
        "spec_sha256": spec.digest(),
        "edges": [f"{u}->{v}" for u, v in spec.edges],
        "ray_count": len(rays),
        "rays": [{"file": names[r.vector], "vector": list(r.vector)} for r in rays],
    }
    if orbits is not None:
        manifest["orbit_count"] = len(orbits)
        manifest["orbits"] = [{"representative": names.get(o.representative.vector),
                               "size": o.size} for o in orbits]
    (path / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    return manifest


__all__ = [
    "ConeSpec", "ConeError", "Ray", "Orbit", "build_cone", "cut_row", "extreme_rays", "is_extreme",
    "symmetry_reduce", "swap_signs", "swap_variables", "permute_vector", "capacity_vector",
    "decompose", "export_rays",
]
