"""Exact rational linear feasibility with a witness or a Farkas certificate.

A :class:`LinSystem` has equality rows ``a.x = b``, inequality rows
``a.x >= b`` and an optional set of variables constrained to be
nonnegative; the remaining variables are free.

:func:`feasible` does not run simplex on the system itself.  It runs an
exact phase-one simplex (revised form, Bland's rule) on the Farkas
alternative, whose rows are indexed by the *variables* of the original
system.  For the representability LPs this keeps the basis at 2^(kn) + 1
rows while the thousands of submodularity constraints become cheap sparse
columns.  Either outcome is converted back: a feasible alternative is a
Farkas certificate, and the phase-one dual of an infeasible alternative is
a primal witness.  Both are re-verified before they are returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .extrat import format_extrat


class LinSystemError(ValueError):
    pass


Row = tuple  # ((var, coef), ...) sorted by var, zero coefficients dropped


def _sparse(coeffs, num_vars: int) -> Row:
    if isinstance(coeffs, Mapping):
        items = coeffs.items()
    else:
        coeffs = list(coeffs)
        if len(coeffs) != num_vars:
            raise LinSystemError(f"dense row has {len(coeffs)} entries, expected {num_vars}")
        items = enumerate(coeffs)
    out = {}
    for j, a in items:
        j = int(j)
        if not 0 <= j < num_vars:
            raise LinSystemError(f"variable index {j} out of range")
        if isinstance(a, float):
            raise LinSystemError("floating point coefficients are not accepted")
        a = Fraction(a)
        if a:
            out[j] = out.get(j, Fraction(0)) + a
    return tuple(sorted((j, a) for j, a in out.items() if a))


@dataclass(frozen=True)
class LinSystem:
    num_vars: int
    equalities: tuple = ()    # ((row, rhs), ...)
    inequalities: tuple = ()  # ((row, rhs), ...) meaning row . x >= rhs
    nonneg: frozenset = frozenset()

    @classmethod
    def build(cls, num_vars: int, equalities: Iterable = (), inequalities: Iterable = (),
              nonneg: Iterable[int] = ()):
        if num_vars < 0:
            raise LinSystemError("num_vars must be nonnegative")
        eqs = tuple((_sparse(a, num_vars), Fraction(b)) for a, b in equalities)
        ineqs = tuple((_sparse(a, num_vars), Fraction(b)) for a, b in inequalities)
        nn = frozenset(int(j) for j in nonneg)
        if any(not 0 <= j < num_vars for j in nn):
            raise LinSystemError("nonnegative variable index out of range")
        return cls(num_vars, eqs, ineqs, nn)

    def residuals(self, x: Sequence[Fraction]):
        for row, b in self.equalities:
            yield "eq", sum((a * x[j] for j, a in row), Fraction(0)) - b
        for row, b in self.inequalities:
            yield "ineq", sum((a * x[j] for j, a in row), Fraction(0)) - b

    def to_json(self) -> dict:
        def enc(rows):
            return [{"coeffs": {str(j): format_extrat(a) for j, a in row}, "rhs": format_extrat(b)}
                    for row, b in rows]
        return {
            "num_vars": self.num_vars,
            "equalities": enc(self.equalities),
            "inequalities": enc(self.inequalities),
            "nonneg": sorted(self.nonneg),
        }

    @classmethod
    def from_json(cls, data: Mapping):
        def dec(rows):
            return [({int(j): Fraction(a) for j, a in r["coeffs"].items()}, Fraction(r["rhs"])) for r in rows]
        return cls.build(int(data["num_vars"]), dec(data.get("equalities", [])),
                         dec(data.get("inequalities", [])), data.get("nonneg", []))


@dataclass(frozen=True)
class Feasible:
    x: tuple
    feasible = True


@dataclass(frozen=True)
class Infeasible:
    """Farkas multipliers.

    ``eq`` (any sign) and ``ineq`` (nonnegative) weight the system rows,
    ``nonneg`` (nonnegative, keyed by variable) weights the bounds
    ``x_j >= 0``.  The weighted sum of rows has zero coefficients and a
    strictly positive right-hand side, i.e. reads ``0 >= positive``.
    """

    eq: tuple
    ineq: tuple
    nonneg: tuple = ()  # ((var, multiplier), ...)
    feasible = False

    def to_json(self) -> dict:
        return {
            "eq": [format_extrat(v) for v in self.eq],
            "ineq": [format_extrat(v) for v in self.ineq],
            "nonneg": {str(j): format_extrat(v) for j, v in self.nonneg},
        }

    @classmethod
    def from_json(cls, data: Mapping):
        return cls(tuple(Fraction(v) for v in data["eq"]),
                   tuple(Fraction(v) for v in data["ineq"]),
                   tuple(sorted((int(j), Fraction(v)) for j, v in data.get("nonneg", {}).items())))


FeasResult = Union[Feasible, Infeasible]


def check_solution(sys: LinSystem, x: Sequence) -> bool:
    """Exact re-substitution of a candidate point."""
    if len(x) != sys.num_vars:
        return False
    x = [Fraction(v) for v in x]
    if any(x[j] < 0 for j in sys.nonneg):
        return False
    for kind, r in sys.residuals(x):
        if (kind == "eq" and r != 0) or (kind == "ineq" and r < 0):
            return False
    return True


def farkas_combination(sys: LinSystem, cert: Infeasible):
    """The combined row (dense coefficients, rhs) of a certificate."""
    coeffs = [Fraction(0)] * sys.num_vars
    rhs = Fraction(0)
    for (row, b), y in zip(sys.equalities, cert.eq):
        for j, a in row:
            coeffs[j] += y * a
        rhs += y * b
    for (row, b), y in zip(sys.inequalities, cert.ineq):
        for j, a in row:
            coeffs[j] += y * a
        rhs += y * b
    for j, y in cert.nonneg:
        coeffs[j] += y
    return coeffs, rhs


def check_farkas(sys: LinSystem, cert: Infeasible) -> bool:
    if len(cert.eq) != len(sys.equalities) or len(cert.ineq) != len(sys.inequalities):
        return False
    if any(y < 0 for y in cert.ineq):
        return False
    if any(y < 0 or j not in sys.nonneg for j, y in cert.nonneg):
        return False
    coeffs, rhs = farkas_combination(sys, cert)
    return all(c == 0 for c in coeffs) and rhs > 0


# ---------------------------------------------------------------------------
# phase one

def _phase_one(columns: Sequence[Mapping[int, int]], rhs: Sequence[int]):
    """Phase-one revised simplex for ``M z = rhs, z >= 0`` over the integers.

    ``columns`` are sparse integer columns of M and ``rhs`` is integral.
    Returns ``("feasible", z)`` with z a dict of nonzero entries, or
    ``("infeasible", w)`` with ``w M <= 0`` and ``w . rhs > 0``.

    The basis inverse is kept fraction-free as an integer matrix over a
    common positive denominator (integer-preserving pivoting, exact
    divisions only).  Bland's rule: lowest-index entering column, lowest
    basic-variable index among tied leaving rows.
    """
    m = len(rhs)
    ncols = len(columns)
    sign = [(-1 if r < 0 else 1) for r in rhs]
    cols = [[(i, sign[i] * int(a)) for i, a in col.items() if a] for col in columns]
    xb = [abs(int(r)) for r in rhs]
    binv = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    den = 1
    basis = [ncols + i for i in range(m)]  # artificial variables have index >= ncols
    in_basis = set(basis)
    while True:
        # den * (c_B B^-1); phase-one costs are 1 on artificials, 0 elsewhere
        y = [0] * m
        for i in range(m):
            if basis[i] >= ncols:
                row = binv[i]
                for j in range(m):
                    if row[j]:
                        y[j] += row[j]
        entering = -1
        for j in range(ncols):
            col = cols[j]
            if not col or j in in_basis:
                continue
            d = 0
            for i, a in col:
                d -= y[i] * a
            if d < 0:
                entering = j
                break
        if entering < 0:
            break
        col = cols[entering]
        u = [0] * m
        for i in range(m):
            row = binv[i]
            s = 0
            for r, a in col:
                s += row[r] * a
            u[i] = s
        leave = -1
        for i in range(m):
            if u[i] > 0:
                if leave < 0:
                    leave = i
                    continue
                lhs, rhs_ = xb[i] * u[leave], xb[leave] * u[i]
                if lhs < rhs_ or (lhs == rhs_ and basis[i] < basis[leave]):
                    leave = i
        if leave < 0:
            raise AssertionError("phase-one problem is bounded; unbounded ratio test")
        piv = u[leave]
        prow = binv[leave]
        xl = xb[leave]
        for i in range(m):
            if i == leave:
                continue
            f = u[i]
            row = binv[i]
            if f:
                for j in range(m):
                    row[j] = (row[j] * piv - f * prow[j]) // den
                xb[i] = (xb[i] * piv - f * xl) // den
            else:
                for j in range(m):
                    if row[j]:
                        row[j] = row[j] * piv // den
                xb[i] = xb[i] * piv // den
        den = piv
        in_basis.discard(basis[leave])
        basis[leave] = entering
        in_basis.add(entering)
    objective = sum(xb[i] for i in range(m) if basis[i] >= ncols)
    if objective == 0:
        return "feasible", {basis[i]: Fraction(xb[i], den) for i in range(m) if basis[i] < ncols and xb[i]}
    return "infeasible", [Fraction(y[i] * sign[i], den) for i in range(m)]


def _normalize(row: Row, b: Fraction):
    """Scale to a primitive integer row; returns (row, rhs, factor)."""
    vals = [a for _, a in row] + ([b] if b else [])
    if not vals:
        return row, b, Fraction(1)
    den = math.lcm(*(v.denominator for v in vals))
    g = math.gcd(*(int(v * den) for v in vals))
    factor = Fraction(den, g)
    return tuple((j, a * factor) for j, a in row), b * factor, factor


def feasible(sys: LinSystem) -> FeasResult:
    """Exact feasibility decision; the returned witness/certificate is re-verified."""
    n = sys.num_vars
    columns = []
    kinds = []  # (kind, index, sign, factor)
    for idx, (row, b) in enumerate(sys.equalities):
        row, b, fac = _normalize(row, b)
        base = {j: a for j, a in row}
        if b:
            base[n] = b
        columns.append(base)
        kinds.append(("eq", idx, 1, fac))
        columns.append({i: -a for i, a in base.items()})
        kinds.append(("eq", idx, -1, fac))
    for idx, (row, b) in enumerate(sys.inequalities):
        row, b, fac = _normalize(row, b)
        base = {j: a for j, a in row}
        if b:
            base[n] = b
        columns.append(base)
        kinds.append(("ineq", idx, 1, fac))
    for j in sorted(sys.nonneg):
        columns.append({j: Fraction(1)})
        kinds.append(("nonneg", j, 1, Fraction(1)))
    rhs = [0] * n + [1]
    # Bland's rule fixes the tie-breaking but leaves the column order free;
    # sparse columns first (bounds, retraction rows) cuts pivots ~10x here.
    order = sorted(range(len(columns)), key=lambda c: len(columns[c]))
    status, data = _phase_one([columns[c] for c in order], rhs)
    if status == "feasible":
        data = {order[c]: z for c, z in data.items()}
        eq = [Fraction(0)] * len(sys.equalities)
        ineq = [Fraction(0)] * len(sys.inequalities)
        nn: dict = {}
        for c, z in data.items():
            kind, idx, sgn, fac = kinds[c]
            if kind == "eq":
                eq[idx] += sgn * z * fac
            elif kind == "ineq":
                ineq[idx] += z * fac
            else:
                nn[idx] = nn.get(idx, Fraction(0)) + z
        cert = Infeasible(tuple(eq), tuple(ineq), tuple(sorted((j, v) for j, v in nn.items() if v)))
        if not check_farkas(sys, cert):
            raise AssertionError("internal error: Farkas certificate failed verification")
        return cert
    tau = data[n]
    x = tuple(-data[j] / tau for j in range(n))
    if not check_solution(sys, x):
        raise AssertionError("internal error: witness failed verification")
    return Feasible(x)


def nonneg_combination(target: Sequence, generators: Sequence[Sequence]) -> FeasResult:
    """Find ``lam >= 0`` with ``sum(lam_i * g_i) == target``."""
    target = [Fraction(t) for t in target]
    dim = len(target)
    for g in generators:
        if len(g) != dim:
            raise LinSystemError("generator dimension mismatch")
    rows = []
    for d in range(dim):
        rows.append(({i: g[d] for i, g in enumerate(generators) if g[d]}, target[d]))
    sys = LinSystem.build(len(generators), equalities=rows, nonneg=range(len(generators)))
    return feasible(sys)
