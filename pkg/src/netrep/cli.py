"""Command-line front end.

Every subcommand reads JSON files (or builtin names such as ``and3``,
``ksub2:3``, ``unary:3``, ``halfpair``) and writes sorted-key JSON to
stdout.  Exit codes: 0 affirmative or feasible, 1 negative or infeasible,
2 usage or validation error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import cone as cone_mod
from . import wpol as wpol_mod
from .costfn import BUILTIN_NAMES, CostFunction, PROPERTIES, builtin_function, check_property
from .encoding import Encoding, bitstring, parse_bitstring, standard_encoding
from .extrat import format_extrat
from .lattice import LatticeFamily, closure_meet_join, point_from_json, point_to_json
from .network import (GADGETS, Network, gadget, is_retractable, eval_representation, min_cut,
                      pinned_min_cut)
from .ratlp import Feasible
from .replp import decide_representable, verify_decision_json

EXIT_YES, EXIT_NO, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(obj, out=None) -> str:
    text = json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    return text


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _name_and_k(text: str):
    name, _, k = text.partition(":")
    return name, (int(k) if k else None)


def load_function(text: str) -> CostFunction:
    name, k = _name_and_k(text)
    if name in BUILTIN_NAMES and not Path(text).exists():
        return builtin_function(name, k)
    return CostFunction.from_json(_load_json(text))


def load_encoding(text: str) -> Encoding:
    name, k = _name_and_k(text)
    if not Path(text).exists() and not text.endswith(".json"):
        return standard_encoding(name, k)
    return Encoding.from_json(_load_json(text))


def load_network(text: str) -> Network:
    if text in GADGETS and not Path(text).exists():
        return gadget(text)[0]
    data = _load_json(text)
    return Network.from_json(data.get("network", data))


def _cut_json(res) -> dict:
    return {"value": format_extrat(res.value), "source_side": sorted(res.cut)}


# ---------------------------------------------------------------------------
# subcommands

def cmd_check(args):
    f = load_function(args.function)
    res = check_property(f, args.property, args.k)
    out = {"property": args.property, "holds": res.holds}
    if res.witness is not None:
        x, y = res.witness
        out["witness"] = {"x": point_to_json(x), "y": point_to_json(y),
                          "f(x)": format_extrat(f(x)), "f(y)": format_extrat(f(y))}
        if args.property not in ("monotone_nondecreasing", "monotone_nonincreasing"):
            fam = _family(f, args.property, args.k)
            m = tuple(fam.meet(a, b) for a, b in zip(x, y))
            j = tuple(fam.join(a, b) for a, b in zip(x, y))
            out["witness"].update({"meet": point_to_json(m), "join": point_to_json(j),
                                   "f(meet)": format_extrat(f(m)), "f(join)": format_extrat(f(j))})
    return (EXIT_YES if res.holds else EXIT_NO), out


def _family(f, prop, k):
    if prop == "submodular":
        return LatticeFamily.boolean()
    if prop == "ksubmodular":
        return LatticeFamily("ksub", k or len(f.domain) - 1, tuple(f.domain))
    return LatticeFamily.diamond(k or len(f.domain) - 2)


def cmd_mincut(args):
    net = load_network(args.network)
    if args.pin:
        res = pinned_min_cut(net, net.n, net.k, parse_bitstring(args.pin))
    else:
        res = min_cut(net)
    return EXIT_YES, _cut_json(res)


def cmd_eval_rep(args):
    net = load_network(args.network)
    enc = load_encoding(args.encoding)
    n = args.n if args.n is not None else net.n
    if args.verify:
        res = is_retractable(net, n, enc)
        if not res:
            return EXIT_NO, {"retractable": False, "counterexample": bitstring(res.counterexample)}
    f = eval_representation(net, n, enc, Fraction(args.kappa))
    return EXIT_YES, {"function": f.to_json()}


def cmd_retractable(args):
    net = load_network(args.network)
    enc = load_encoding(args.encoding)
    res = is_retractable(net, args.n if args.n is not None else net.n, enc)
    out = {"retractable": res.holds}
    if res.counterexample is not None:
        out["counterexample"] = bitstring(res.counterexample)
    return (EXIT_YES if res.holds else EXIT_NO), out


def cmd_decide(args):
    f = load_function(args.function)
    enc = load_encoding(args.encoding)
    d = decide_representable(f, enc)
    out = {"kind": "representability", "function": f.to_json(), "encoding": enc.to_json()}
    out.update(d.to_json())
    if not d.feasible:
        out["note"] = ("not (k, rho, sigma)-submodular representable, "
                       "hence not (k, rho, sigma)-network representable either")
    if args.timing:
        out["seconds"] = round(d.stats["seconds"], 6)
    if args.out:
        _dump(out, args.out)
    return (EXIT_YES if d.feasible else EXIT_NO), out


def cmd_closure(args):
    fam = _family_arg(args.family)
    raw = _load_json(args.points)
    if isinstance(raw, dict):
        raw = raw.get("points", [])
    pts = [_parse_point(p, fam) for p in raw]
    closed = closure_meet_join(fam, pts)
    out = {"family": args.family, "size": len(closed), "closure": [_show_point(p, fam) for p in closed]}
    code = EXIT_YES
    if args.query:
        q = _parse_point(args.query, fam)
        out["query"] = _show_point(q, fam)
        out["member"] = q in set(closed)
        code = EXIT_YES if out["member"] else EXIT_NO
    return code, out


def _family_arg(text: str) -> LatticeFamily:
    name, k = _name_and_k(text)
    if name == "boolean":
        return LatticeFamily.boolean()
    if name == "bisubmodular":
        return LatticeFamily.bisubmodular()
    if name in ("ksub", "diamond") and k:
        return LatticeFamily(name, k)
    raise UsageError(f"unknown lattice family {text!r}")


def _parse_point(p, fam):
    if isinstance(p, str):
        if fam.kind != "boolean":
            raise UsageError("bitstring points need the boolean family")
        return parse_bitstring(p)
    return point_from_json(p, fam)


def _show_point(p, fam):
    return bitstring(p) if fam.kind == "boolean" else point_to_json(p)


def cmd_wpol_refute(args):
    name, k = wpol_mod.parse_wpol_name(args.omega)
    omega, tuples, _ = wpol_mod.standard_wpol(name, k)
    f = load_function(args.function)
    if args.tuples:
        raw = _load_json(args.tuples)
        tuples = [tuple(wpol_mod._label(str(a)) for a in t) for t in raw]
    cert = wpol_mod.certificate(omega, f, tuples)
    cert["kind"] = "wpol_refutation"
    if omega.note:
        cert["note"] = omega.note
    if args.out:
        _dump(cert, args.out)
    return (EXIT_YES if cert["refutes"] else EXIT_NO), cert


def _cone_setup(args):
    enc = load_encoding(args.encoding)
    spec = cone_mod.ConeSpec(args.n, enc, args.include_st)
    rays = cone_mod.extreme_rays(cone_mod.build_cone(spec))
    return spec, rays


def _default_generators(spec):
    gens = []
    if spec.enc.k == 2:
        gens.append(cone_mod.swap_signs(spec.n))
    if spec.n == 2:
        gens.append(cone_mod.swap_variables(spec.enc.k))
    return gens


def cmd_rays(args):
    spec, rays = _cone_setup(args)
    orbits = None
    if args.symmetry:
        orbits = cone_mod.symmetry_reduce(rays, spec.edges, _default_generators(spec))
    if args.out:
        manifest = cone_mod.export_rays(args.out, spec, rays, orbits)
    else:
        manifest = {"spec_sha256": spec.digest(), "ray_count": len(rays),
                    "edges": [f"{u}->{v}" for u, v in spec.edges],
                    "rays": [list(r.vector) for r in rays]}
        if orbits is not None:
            manifest["orbit_count"] = len(orbits)
            manifest["orbit_sizes"] = [o.size for o in orbits]
    return EXIT_YES, manifest


def cmd_decompose(args):
    net = load_network(args.network)
    args.n = net.n
    spec, rays = _cone_setup(args)
    res = cone_mod.decompose(net, rays, spec)
    if isinstance(res, Feasible):
        coeffs = [{"ray": list(r.vector), "coefficient": format_extrat(c)}
                  for r, c in zip(rays, res.x) if c]
        return EXIT_YES, {"decomposable": True, "combination": coeffs}
    return EXIT_NO, {"decomposable": False, "farkas": res.to_json()}


def cmd_fixtures(args):
    root = Path(args.out)
    written = []

    def put(rel, obj):
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        _dump(obj, path)
        written.append(rel)

    for name in BUILTIN_NAMES:
        if name in ("diamond_distance", "ksub2"):
            for k in (2, 3):
                put(f"functions/{name}_{k}.json", builtin_function(name, k).to_json())
        else:
            put(f"functions/{name}.json", builtin_function(name).to_json())
    for name in ("identity", "pair", "star1", "star2"):
        put(f"encodings/{name}.json", standard_encoding(name).to_json())
    for name in ("unary", "tilde", "diamond"):
        for k in (2, 3):
            put(f"encodings/{name}_{k}.json", standard_encoding(name, k).to_json())
    for name in GADGETS:
        net, enc, kappa = gadget(name)
        put(f"gadgets/{name}.json", {"network": net.to_json(), "encoding": enc.to_json(),
                                     "kappa": format_extrat(kappa)})
    omega, tuples, _ = wpol_mod.standard_wpol("omega2")
    put("wpol/omega2.json", {"omega": omega.to_json(), "tuples": [point_to_json(t) for t in tuples]})
    omega, tuples, _ = wpol_mod.standard_wpol("omega_k", 3)
    put("wpol/omega_k_3.json", {"omega": omega.to_json(tables=args.full_tables),
                                "tuples": [point_to_json(t) for t in tuples]})
    put("points/and3_star1_dom.json", [
        "010101", "010110", "011001", "011010", "100101", "100110", "101001"])
    return EXIT_YES, {"written": sorted(written)}


# ---------------------------------------------------------------------------
# certificate re-checking

def verify_certificate_file(path: str) -> tuple[int, dict]:
    data = _load_json(path)
    kind = data.get("kind") if isinstance(data, dict) else None
    if kind == "representability":
        f = CostFunction.from_json(data["function"])
        enc = Encoding.from_json(data["encoding"])
        ok = verify_decision_json(data, f, enc)
    elif kind == "wpol_refutation":
        body = {k: v for k, v in data.items() if k not in ("kind", "note")}
        ok = wpol_mod.verify_certificate(body)
    else:
        raise UsageError("unknown certificate kind")
    return (EXIT_YES if ok else EXIT_NO), {"certificate": kind, "valid": ok}


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="netrep", description=__doc__.splitlines()[0])
    p.add_argument("--verify-certificate", metavar="FILE",
                   help="re-check a certificate written by decide or wpol-refute")
    sub = p.add_subparsers(dest="command")

    s = sub.add_parser("check", help="test a lattice property of a function")
    s.add_argument("--property", required=True, choices=PROPERTIES)
    s.add_argument("--function", required=True)
    s.add_argument("--k", type=int)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("mincut", help="minimum s-t cut, optionally pinned")
    s.add_argument("--network", required=True)
    s.add_argument("--pin", help="bitstring over the designated nodes")
    s.set_defaults(func=cmd_mincut)

    s = sub.add_parser("eval-rep", help="function represented by a network")
    s.add_argument("--network", required=True)
    s.add_argument("--encoding", required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--kappa", default="0")
    s.add_argument("--verify", action="store_true", help="require retractability first")
    s.set_defaults(func=cmd_eval_rep)

    s = sub.add_parser("retractable", help="test (n, rho)-retractability")
    s.add_argument("--network", required=True)
    s.add_argument("--encoding", required=True)
    s.add_argument("--n", type=int)
    s.set_defaults(func=cmd_retractable)

    s = sub.add_parser("decide", help="decide submodular representability exactly")
    s.add_argument("--function", required=True)
    s.add_argument("--encoding", required=True)
    s.add_argument("--out", help="also write the certificate here")
    s.add_argument("--timing", action="store_true", help="include wall time (output is then not reproducible)")
    s.set_defaults(func=cmd_decide)

    s = sub.add_parser("closure", help="meet/join closure of a point set")
    s.add_argument("--points", required=True)
    s.add_argument("--family", default="boolean")
    s.add_argument("--query")
    s.set_defaults(func=cmd_closure)

    s = sub.add_parser("wpol-refute", help="weighted polymorphism refutation value")
    s.add_argument("--omega", required=True, help="omega2 or omega_k:K")
    s.add_argument("--function", required=True)
    s.add_argument("--tuples", help="JSON list of argument tuples (default: canonical)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_wpol_refute)

    for name, func, helptext in (("rays", cmd_rays, "extreme rays of the retractable-network cone"),
                                 ("decompose", cmd_decompose, "write a network as a ray combination")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--encoding", required=True)
        if name == "rays":
            s.add_argument("--n", type=int, required=True)
            s.add_argument("--symmetry", action="store_true")
            s.add_argument("--out", help="directory for ray networks and manifest.json")
        else:
            s.add_argument("--network", required=True)
        s.add_argument("--include-st", action="store_true")
        s.set_defaults(func=func)

    s = sub.add_parser("fixtures", help="write builtin functions, encodings, gadgets and wpols")
    s.add_argument("--out", required=True)
    s.add_argument("--full-tables", action="store_true", help="include omega_k operation tables")
    s.set_defaults(func=cmd_fixtures)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verify_certificate:
            code, out = verify_certificate_file(args.verify_certificate)
        elif args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        else:
            code, out = args.func(args)
    except (UsageError, ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        sys.stderr.write(_dump({"error": type(exc).__name__, "message": str(msg)}))
        return EXIT_USAGE
    sys.stdout.write(_dump(out))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
