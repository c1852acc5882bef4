"""Directed s-t networks with exact (extended rational) capacities.

Designated nodes are named ``"i^l"`` (1-based) and carry the k bits of the
i-th variable.  Cut values are computed by an exact Edmonds-Karp max-flow on
integers obtained by clearing denominators; infinite capacities stay
symbolic.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .costfn import CostFunction
from .encoding import Encoding, encode_tuple, retract_blocks, standard_encoding
from .extrat import INF, ExtRat, format_extrat, to_extrat

S = "s"
T = "t"


class NetworkError(ValueError):
    pass


class NotRetractableError(NetworkError):
    pass


def node(i: int, l: int) -> str:
    return f"{i}^{l}"


def designated(n: int, k: int) -> list[str]:
    """Designated nodes in (i, l) order; this is also the bit order of pinnings."""
    return [node(i, l) for i in range(1, n + 1) for l in range(1, k + 1)]


def _parse_designated(name: str):
    head, sep, tail = name.partition("^")
    if sep and head.isdigit() and tail.isdigit():
        return int(head), int(tail)
    return None


def _node_key(name: str):
    if name == S:
        return (0, 0, 0, "")
    if name == T:
        return (3, 0, 0, "")
    d = _parse_designated(name)
    if d is not None:
        return (1, d[0], d[1], "")
    return (2, 0, 0, name)


@dataclass(frozen=True)
class Network:
    nodes: tuple
    edges: tuple  # sorted ((u, v, cap), ...) with parallel edges merged
    n: int = 0
    k: int = 1

    @classmethod
    def build(cls, edges: Iterable, n: int = 0, k: int = 1, nodes: Iterable[str] = ()):
        caps: dict = {}
        for e in edges:
            u, v, c = e
            c = to_extrat(c)
            if c < 0:
                raise NetworkError(f"negative capacity on ({u}, {v})")
            if u == v:
                raise NetworkError(f"self-loop at {u}")
            if v == S:
                raise NetworkError("edges into s are not allowed")
            if u == T:
                raise NetworkError("edges out of t are not allowed")
            caps[(u, v)] = caps.get((u, v), Fraction(0)) + c
        allnodes = {S, T, *designated(n, k), *nodes}
        for u, v in caps:
            allnodes.update((u, v))
        for name in allnodes:
            d = _parse_designated(name)
            if d is not None and not (1 <= d[0] <= n and 1 <= d[1] <= k):
                raise NetworkError(f"designated node {name} outside [{n}]x[{k}]")
        ordered = tuple(sorted(allnodes, key=_node_key))
        edge_list = tuple(sorted(((u, v, c) for (u, v), c in caps.items()),
                                 key=lambda e: (_node_key(e[0]), _node_key(e[1]))))
        return cls(ordered, edge_list, n, k)

    @property
    def capacity(self) -> dict:
        return {(u, v): c for u, v, c in self.edges}

    @property
    def extra_nodes(self) -> list[str]:
        return [v for v in self.nodes if _node_key(v)[0] == 2]

    def designated_nodes(self) -> list[str]:
        return designated(self.n, self.k)

    def cut_value(self, side: Iterable[str]) -> ExtRat:
        """Capacity of the edges leaving ``side | {s}``."""
        side = set(side) | {S}
        if T in side:
            raise NetworkError("a cut may not contain t")
        total: ExtRat = Fraction(0)
        for u, v, c in self.edges:
            if u in side and v not in side:
                total = total + c
        return total

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "nodes": list(self.nodes),
            "edges": [{"from": u, "to": v, "cap": format_extrat(c)} for u, v, c in self.edges],
        }

    @classmethod
    def from_json(cls, data: Mapping):
        try:
            edges = [(e["from"], e["to"], e["cap"]) for e in data["edges"]]
            return cls.build(edges, int(data.get("n", 0)), int(data.get("k", 1)), data.get("nodes", ()))
        except (KeyError, TypeError) as exc:
            raise NetworkError(f"malformed network JSON: {exc}") from None


@dataclass(frozen=True)
class CutResult:
    value: ExtRat
    cut: frozenset
    flow: ExtRat


def _inf_reachable(edges, source: str) -> set:
    adj: dict = {}
    for u, v, c in edges:
        if c is INF:
            adj.setdefault(u, []).append(v)
    seen = {source}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _min_cut_edges(nodes: Sequence[str], edges: Sequence) -> CutResult:
    if T in _inf_reachable(edges, S):
        return CutResult(INF, frozenset({S}), INF)
    finite = [c for _, _, c in edges if c is not INF]
    denom = math.lcm(*(c.denominator for c in finite)) if finite else 1
    big = sum(int(c * denom) for c in finite) + 1
    residual: dict = {v: {} for v in nodes}
    for u, v, c in edges:
        cap = big if c is INF else int(c * denom)
        residual[u][v] = residual[u].get(v, 0) + cap
        residual[v].setdefault(u, 0)
    flow = 0
    while True:
        parent = {S: None}
        queue = deque([S])
        while queue and T not in parent:
            u = queue.popleft()
            for v, r in residual[u].items():
                if r > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if T not in parent:
            break
        push = None
        v = T
        while parent[v] is not None:
            u = parent[v]
            push = residual[u][v] if push is None else min(push, residual[u][v])
            v = u
        v = T
        while parent[v] is not None:
            u = parent[v]
            residual[u][v] -= push
            residual[v][u] += push
            v = u
        flow += push
    side = frozenset(parent)
    value = Fraction(flow, denom)
    # dual check: the residual-reachable set is a cut of the flow value
    check: ExtRat = Fraction(0)
    for u, v, c in edges:
        if u in side and v not in side:
            check = check + c
    if check != value:
        raise AssertionError(f"max-flow {value} differs from cut capacity {check}")
    return CutResult(value, side, value)


def min_cut(net: Network) -> CutResult:
    """Minimum s-t cut; the returned side is the minimal minimum cut."""
    return _min_cut_edges(net.nodes, net.edges)


Pinning = Union[Mapping[str, int], Sequence[int]]


def _pin_map(net: Network, n: int, k: int, pin: Pinning) -> dict:
    names = designated(n, k)
    if isinstance(pin, Mapping):
        if set(pin) != set(names):
            raise NetworkError("pinning must assign every designated node exactly")
        out = dict(pin)
    else:
        pin = tuple(pin)
        if len(pin) != len(names):
            raise NetworkError(f"pinning needs {len(names)} bits, got {len(pin)}")
        out = dict(zip(names, pin))
    for name, b in out.items():
        if b not in (0, 1):
            raise NetworkError(f"pin of {name} must be 0 or 1")
        if name not in net.nodes:
            raise NetworkError(f"network lacks designated node {name}")
    return out


def pinned_min_cut(net: Network, n: int, k: int, pin: Pinning) -> CutResult:
    pins = _pin_map(net, n, k, pin)
    extra = [(S, v, INF) if b else (v, T, INF) for v, b in pins.items()]
    return _min_cut_edges(net.nodes, list(net.edges) + extra)


def c_min(net: Network, n: int, k: int, pin: Pinning) -> ExtRat:
    """Minimum cut capacity among cuts agreeing with a total pinning."""
    return pinned_min_cut(net, n, k, pin).value


@dataclass(frozen=True)
class RetractResult:
    holds: bool
    counterexample: Optional[tuple] = None

    def __bool__(self):
        return self.holds


def cmin_table(net: Network, n: int, k: int) -> dict:
    """``c_min`` for every kn-bit pinning, keyed by bit tuple."""
    return {x: c_min(net, n, k, x) for x in itertools.product((0, 1), repeat=n * k)}


def is_retractable(net: Network, n: int, enc: Encoding) -> RetractResult:
    """Check ``c_min(x) >= c_min(rho(x))`` for all 2^(kn) pinnings (one max-flow each)."""
    k = enc.k
    missing = [v for v in designated(n, k) if v not in net.nodes]
    if missing:
        raise NetworkError(f"missing designated nodes {missing}")
    table = cmin_table(net, n, k)
    for x, value in table.items():
        if value < table[retract_blocks(enc, x)]:
            return RetractResult(False, x)
    return RetractResult(True)


def eval_representation(net: Network, n: int, enc: Encoding, kappa=0, verify: bool = False) -> CostFunction:
    """The function ``x -> c_min(sigma(x_1), ..., sigma(x_n)) + kappa`` on D^n."""
    kappa = Fraction(kappa)
    if verify:
        res = is_retractable(net, n, enc)
        if not res:
            raise NotRetractableError(f"network is not ({n}, rho)-retractable; counterexample {res.counterexample}")
    for v in designated(n, enc.k):
        if v not in net.nodes:
            raise NetworkError(f"missing designated node {v}")

    def f(*x):
        return c_min(net, n, enc.k, encode_tuple(enc, x)) + kappa

    return CostFunction.from_callable(enc.domain, n, f)


def complement_network(net: Network) -> Network:
    """Reverse internal edges and swap source and sink attachments."""
    edges = []
    for u, v, c in net.edges:
        if u == S and v == T:
            edges.append((u, v, c))
        elif u == S:
            edges.append((v, T, c))
        elif v == T:
            edges.append((S, u, c))
        else:
            edges.append((v, u, c))
    return Network.build(edges, net.n, net.k, net.nodes)


def network_sum(a: Network, b: Network) -> Network:
    """Union sharing s, t and designated nodes; extra nodes are renamed apart."""
    if (a.n, a.k) != (b.n, b.k):
        raise NetworkError("networks must share n and k")
    ra = {v: f"a.{v}" for v in a.extra_nodes}
    rb = {v: f"b.{v}" for v in b.extra_nodes}
    edges = [(ra.get(u, u), ra.get(v, v), c) for u, v, c in a.edges]
    edges += [(rb.get(u, u), rb.get(v, v), c) for u, v, c in b.edges]
    return Network.build(edges, a.n, a.k, list(ra.values()) + list(rb.values()))


GADGETS = ("h0", "h1", "h2", "halfpair")


def gadget(name: str) -> tuple[Network, Encoding, Fraction]:
    ident = standard_encoding("identity")
    one = node(1, 1)
    if name == "h0":
        return Network.build([(one, T, INF)], 1, 1), ident, Fraction(0)
    if name == "h1":
        return Network.build([(S, one, INF)], 1, 1), ident, Fraction(0)
    if name == "h2":
        two = node(2, 1)
        return Network.build([(one, two, INF), (two, one, INF)], 2, 1), ident, Fraction(0)
    if name == "halfpair":
        half = Fraction(1, 2)
        net = Network.build([(node(1, 1), node(2, 2), half), (node(2, 1), node(1, 2), half)], 2, 2)
        return net, standard_encoding("star1"), Fraction(0)
    raise NetworkError(f"unknown gadget {name!r}")
