"""(k, rho, sigma) encodings of a finite domain into k-bit blocks.

``sigma`` maps each domain label to a k-bit pattern (the set of patterns is
E), ``rho`` is a retraction of all of {0,1}^k onto E.  Bit patterns are
tuples of 0/1; internally they are also handled as integers with the first
coordinate as the most significant bit so that integer order equals
lexicographic order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .costfn import diamond_domain, parse_label
from .lattice import BOT, TOP


class EncodingError(ValueError):
    pass


Bits = tuple


def bits_to_int(bits: Sequence[int]) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | b
    return v


def int_to_bits(v: int, width: int) -> Bits:
    return tuple((v >> (width - 1 - i)) & 1 for i in range(width))


def bitstring(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


def parse_bitstring(text: str) -> Bits:
    if not text or set(text) - {"0", "1"}:
        raise EncodingError(f"bad bitstring {text!r}")
    return tuple(int(c) for c in text)


@dataclass(frozen=True)
class Encoding:
    k: int
    domain: tuple
    sigma: tuple  # sigma[i] = bit pattern of domain[i]
    rho: tuple    # rho[m] = retracted pattern (as int) of the pattern with int value m
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise EncodingError("k must be at least 1")
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "sigma", tuple(tuple(int(b) for b in s) for s in self.sigma))
        object.__setattr__(self, "rho", tuple(int(r) for r in self.rho))
        if len(self.sigma) != len(self.domain):
            raise EncodingError("sigma must list one pattern per domain label")
        if len(set(self.domain)) != len(self.domain):
            raise EncodingError("duplicate domain labels")
        if any(len(s) != self.k or set(s) - {0, 1} for s in self.sigma):
            raise EncodingError("sigma patterns must be k-bit vectors")
        if len(set(self.sigma)) != len(self.sigma):
            raise EncodingError("sigma is not injective")
        if len(self.rho) != 2 ** self.k:
            raise EncodingError("rho must be a full table on {0,1}^k")
        image = set(self.sigma_int)
        for m, r in enumerate(self.rho):
            if r not in image:
                raise EncodingError(f"rho maps {bitstring(int_to_bits(m, self.k))} outside E")
        for m in image:
            if self.rho[m] != m:
                raise EncodingError(f"rho does not fix {bitstring(int_to_bits(m, self.k))} in E")

    @property
    def sigma_int(self) -> tuple:
        return tuple(bits_to_int(s) for s in self.sigma)

    @property
    def E(self) -> frozenset:
        return frozenset(self.sigma)

    def sigma_of(self, label) -> Bits:
        try:
            return self.sigma[self.domain.index(label)]
        except ValueError:
            raise EncodingError(f"label {label!r} not in domain {self.domain}") from None

    def decode(self, bits: Sequence[int]):
        """Inverse of sigma on E."""
        bits = tuple(bits)
        try:
            return self.domain[self.sigma.index(bits)]
        except ValueError:
            raise EncodingError(f"pattern {bitstring(bits)} is not in E") from None

    def rho_of(self, bits: Sequence[int]) -> Bits:
        bits = tuple(bits)
        if len(bits) != self.k:
            raise EncodingError("pattern length differs from k")
        return int_to_bits(self.rho[bits_to_int(bits)], self.k)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "domain": [str(a) for a in self.domain],
            "sigma": {str(a): bitstring(s) for a, s in zip(self.domain, self.sigma)},
            "rho": {bitstring(int_to_bits(m, self.k)): bitstring(int_to_bits(r, self.k))
                    for m, r in enumerate(self.rho)},
        }

    @classmethod
    def from_json(cls, data: dict):
        k = int(data["k"])
        domain = tuple(parse_label(s) for s in data["domain"])
        sigma = tuple(parse_bitstring(data["sigma"][str(a)]) for a in domain)
        rho = []
        for m in range(2 ** k):
            key = bitstring(int_to_bits(m, k))
            if key not in data["rho"]:
                raise EncodingError(f"rho misses {key}")
            rho.append(bits_to_int(parse_bitstring(data["rho"][key])))
        return cls(k, domain, sigma, tuple(rho))


def _from_maps(k: int, domain, sigma_fn, rho_fn, name: str) -> Encoding:
    sigma = tuple(sigma_fn(a) for a in domain)
    rho = tuple(bits_to_int(rho_fn(int_to_bits(m, k))) for m in range(2 ** k))
    return Encoding(k, tuple(domain), sigma, rho, name)


def _unit(k: int, i: int) -> Bits:
    return tuple(1 if j == i else 0 for j in range(1, k + 1))


ENCODING_NAMES = ("identity", "unary", "pair", "tilde", "star1", "star2", "diamond")


def standard_encoding(name: str, k: Optional[int] = None) -> Encoding:
    if name == "identity":
        return _from_maps(1, (0, 1), lambda a: (a,), lambda b: b, "identity")
    if name in ("unary", "pair"):
        if name == "pair":
            k, domain = 2, (0, 1, -1)
        else:
            if k is None or k < 1:
                raise EncodingError("unary encoding needs k >= 1")
            domain = tuple(range(k + 1))
        units = {_unit(k, i) for i in range(1, k + 1)}

        def sigma(a):
            if a == 0:
                return (0,) * k
            return _unit(k, 2 if a == -1 else a)

        return _from_maps(k, domain, sigma, lambda b: b if b in units else (0,) * k,
                          name if name == "pair" else f"unary({k})")
    if name == "tilde":
        if k is None or k < 1:
            raise EncodingError("tilde encoding needs k >= 1")

        def sig(a):
            if a == 0:
                return (0,) * (2 * k)
            return _unit(k, a) + tuple(1 - b for b in _unit(k, a))

        image = {sig(i) for i in range(1, k + 1)}
        return _from_maps(2 * k, range(k + 1), sig,
                          lambda b: b if b in image else (0,) * (2 * k), f"tilde({k})")
    if name in ("star1", "star2"):
        one, zero = ((1, 0), (0, 1)) if name == "star1" else ((0, 1), (1, 0))
        return _from_maps(2, (0, 1), lambda a: one if a == 1 else zero,
                          lambda b: (1, 0) if b == (1, 0) else (0, 1), name)
    if name == "diamond":
        if k is None or k < 2:
            raise EncodingError("diamond encoding needs k >= 2 (for k = 1 the atom and top collide)")
        units = {_unit(k, i) for i in range(1, k + 1)}

        def sigma(a):
            if a == TOP:
                return (1,) * k
            if a == BOT:
                return (0,) * k
            return _unit(k, a)

        def rho(b):
            if b == (0,) * k or b in units:
                return b
            return (1,) * k

        return _from_maps(k, diamond_domain(k), sigma, rho, f"diamond({k})")
    raise EncodingError(f"unknown encoding {name!r}")


def encode_tuple(enc: Encoding, x: Sequence) -> Bits:
    out: tuple = ()
    for a in x:
        out += enc.sigma_of(a)
    return out


def decode_tuple(enc: Encoding, v: Sequence[int]) -> tuple:
    v = tuple(v)
    if len(v) % enc.k:
        raise EncodingError("length is not a multiple of k")
    return tuple(enc.decode(v[i:i + enc.k]) for i in range(0, len(v), enc.k))


def retract_blocks(enc: Encoding, v: Sequence[int]) -> Bits:
    v = tuple(v)
    if len(v) % enc.k:
        raise EncodingError("length is not a multiple of k")
    out: tuple = ()
    for i in range(0, len(v), enc.k):
        out += enc.rho_of(v[i:i + enc.k])
    return out


def retract_int(enc: Encoding, v: int, n: int) -> int:
    """Blockwise rho on an integer-packed kn-bit vector."""
    k = enc.k
    mask = (1 << k) - 1
    out = 0
    for i in range(n):
        shift = k * (n - 1 - i)
        out |= enc.rho[(v >> shift) & mask] << shift
    return out


def bar_encoding(enc: Encoding) -> Encoding:
    """Same k and rho, with ``sigma`` precomposed with bit complement."""
    if set(enc.domain) != {0, 1}:
        raise EncodingError("bar_encoding needs the domain {0, 1}")
    sigma = tuple(enc.sigma_of(1 - a) for a in enc.domain)
    return Encoding(enc.k, enc.domain, sigma, enc.rho, f"bar({enc.name})" if enc.name else "")


def all_bits(width: int):
    return itertools.product((0, 1), repeat=width)


__all__ = [
    "Encoding", "EncodingError", "standard_encoding", "encode_tuple", "decode_tuple",
    "retract_blocks", "retract_int", "bar_encoding", "bits_to_int", "int_to_bits",
    "bitstring", "parse_bitstring", "all_bits",
]
