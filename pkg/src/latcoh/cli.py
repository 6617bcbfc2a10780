"""Command line entry point: ``latcoh analyze|classify|moves|path|oracle``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from .corpus import SWTable, bundled_sw, load_graph
from .cubes import DEFAULT_BUDGET, RegionError
from .ellipsoid import EnumerationBudgetExceeded
from .graph import GraphError, blow_down, blow_up, cycle_rank, format_lines, parse_graph
from .lattice import Lattice, LatticeError, format_dual
from .laufer import classify, is_almost_rational
from .paths import PathError, h1_upper_bound
from .report import ReportError, property_A_row, run_analyze

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_RESOURCE = 3

log = logging.getLogger("latcoh")


def read_graph(spec: str):
    """A file path, or ``@name`` for a bundled example."""
    if spec.startswith("@"):
        return load_graph(spec[1:])
    p = Path(spec)
    if not p.is_file():
        raise GraphError(f"no such file: {spec}")
    return parse_graph(p.read_text(), p.stem)


def parse_region(text: str):
    if text in ("auto", "effective", "full"):
        return text, None
    if text.startswith("box="):
        body = text[4:]
        if ".." in body:
            lo, hi = body.split("..", 1)
            return "box", ([int(x) for x in lo.split(",")], [int(x) for x in hi.split(",")])
        return "box", int(body)
    raise argparse.ArgumentTypeError(f"bad region {text!r}")


def parse_vector(text: str) -> List[Fraction]:
    try:
        return [Fraction(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad vector {text!r}") from None


def _emit(obj, fmt: str, text: str, out: Optional[str]):
    body = json.dumps(obj, indent=2) + "\n" if fmt == "json" else text
    if out:
        Path(out).write_text(body)
    else:
        sys.stdout.write(body)


def cmd_analyze(args) -> int:
    g = read_graph(args.graph)
    region, box = args.region
    table = bundled_sw()
    if args.sw_file:
        extra = SWTable.from_json(Path(args.sw_file).read_text())
        table = SWTable(table.entries + extra.entries, table.closed_forms)
    rep = run_analyze(g, spinc=args.spinc, qmax=args.qmax, n_max=args.nmax, region=region, box=box,
                      paths=args.paths, sw_table=table, engine=args.engine, jobs=args.jobs,
                     budget=args.budget)
    _emit(rep.to_dict(), args.format, rep.text(), args.output)
    return EXIT_OK


def cmd_classify(args) -> int:
    g = read_graph(args.graph)
    lat = Lattice(g)
    cl = classify(lat)
    cr = cycle_rank(g)
    info = {
        "name": g.name,
        "digest": g.digest(),
        "s": g.s,
        "det": lat.det,
        "discriminant_invariants": list(lat.discriminant.invariants),
        "cycle_rank": cr.c,
        "genus": cr.genus,
        "qhs": cr.is_qhs,
        "K": format_dual(lat.K),
        "classification": cl.to_dict(),
    }
    if cr.c + cr.genus == 0:
        ar = is_almost_rational(g)
        info["almost_rational"] = {"status": ar.status, "witness": ar.witness,
                                   "lowered_euler": ar.lowered_euler, "reason": ar.reason}
    lines = [f"{g.name}: s={g.s} det={lat.det} kind={cl.kind}",
             f"  -K = ({', '.join(format_dual([-x for x in lat.K]))})",
             f"  Z_min = {cl.z_min}, chi(Z_min) = {cl.chi_z_min}, min chi on L_e minus 0 = {cl.min_chi_effective}",
             f"  minimally elliptic: {cl.minimally_elliptic}, Z_min = -K: {cl.z_min_is_minus_k}"]
    if "almost_rational" in info:
        lines.append(f"  almost rational: {info['almost_rational']['status']}")
    _emit(info, args.format, "\n".join(lines) + "\n", None)
    return EXIT_OK


def cmd_moves(args) -> int:
    g = read_graph(args.graph)
    if args.blowup:
        site = tuple(args.blowup.split("-", 1)) if "-" in args.blowup else args.blowup
        new, maps = blow_up(g, site)
    else:
        new = blow_down(g, args.blowdown)
    text = format_lines(new)
    if args.check:
        from .engine import lattice_cohomology
        from .homology import compare_modules

        a = lattice_cohomology(Lattice(g), Lattice(g).K, qmax=args.qmax).module
        b = lattice_cohomology(Lattice(new), Lattice(new).K, qmax=args.qmax).module
        same = compare_modules(a, b, allow_shift=True)
        text += f"# canonical module before: {a.text()}\n# after: {b.text()}\n# equal up to shift: {same}\n"
    sys.stdout.write(text)
    return EXIT_OK


def cmd_path(args) -> int:
    g = read_graph(args.graph)
    lat = Lattice(g)
    lp = args.l_prime if args.l_prime is not None else [Fraction(0)] * g.s
    if len(lp) != g.s:
        raise ReportError(f"l' needs {g.s} coordinates")
    if not lat.in_dual(lp):
        raise ReportError("l' is not in the dual lattice")
    hb = h1_upper_bound(lat, lp, mode=args.search, monotone=not args.mixed)
    res = hb.search
    info = {
        "l_prime": format_dual(lp),
        "bound": hb.bound,
        "step_sum": hb.step_sum,
        "simple": hb.simple,
        "method": res.method,
        "exact": res.exact,
        "search_space": res.search_space,
        "module": res.module.to_dict(),
        "path": res.path.signed_ids(g.ids),
        "steps": [{"vertex": sb.vertex, "sign": sb.sign, "delta": sb.delta, "bound": sb.bound}
                  for sb in hb.steps],
        "notes": res.notes,
    }
    if cycle_rank(g).is_qhs:
        info["property_A"] = property_A_row(lat, lp)
    lines = [f"h^1 bound for c_1 = ({', '.join(format_dual(lp))}): {hb.bound}",
             f"  search: {res.method}, {'exact' if res.exact else 'not exhaustive'} ({res.search_space})",
             f"  path module: {res.module.text()}",
             f"  per-step sum {hb.step_sum}" + ("" if hb.simple is None else f", genus-0 sum {hb.simple}"),
             f"  path ({len(res.path.points) - 1} steps): {' '.join(res.path.signed_ids(g.ids))}"]
    if args.steps:
        lines.append("  step  vertex  delta  bound")
        for sb in hb.steps:
            lines.append(f"  {sb.index:4d}  {('+' if sb.sign > 0 else '-') + sb.vertex:6s}  {sb.delta:5d}  {sb.bound:5d}")
    _emit(info, args.format, "\n".join(lines) + "\n", None)
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .oracles import run_oracles

    g = read_graph(args.graph)
    results = run_oracles(Lattice(g), box=args.box)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.ok for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latcoh", description="Lattice cohomology of negative definite plumbing graphs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    a = sub.add_parser("analyze", help="lattice cohomology per spin^c orbit")
    a.add_argument("graph", help="graph file, or @name for a bundled example")
    a.add_argument("--spinc", default="canonical", help="canonical, all, or an orbit index")
    a.add_argument("--qmax", type=int, default=None)
    a.add_argument("--nmax", type=int, default=None)
    a.add_argument("--region", type=parse_region, default=("auto", None),
                   help="auto, effective, full, box=M or box=lo1,..,los..hi1,..,his")
    a.add_argument("--engine", choices=["auto", "full", "reduced"], default="auto")
    a.add_argument("--format", choices=["json", "text"], default="text")
    a.add_argument("--sw-file", default=None)
    a.add_argument("--paths", choices=["exhaustive", "greedy", "off"], default="exhaustive")
    a.add_argument("--jobs", type=int, default=1)
    a.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum number of lattice points enumerated")
    a.add_argument("-o", "--output", default=None)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("classify", help="rational / elliptic / almost rational tests")
    c.add_argument("graph")
    c.add_argument("--format", choices=["json", "text"], default="text")
    c.set_defaults(func=cmd_classify)

    m = sub.add_parser("moves", help="blow up or blow down, printing the new graph")
    m.add_argument("graph")
    grp = m.add_mutually_exclusive_group(required=True)
    grp.add_argument("--blowup", metavar="SITE", help="vertex id, or a-b for an edge")
    grp.add_argument("--blowdown", metavar="VERTEX")
    m.add_argument("--check", action="store_true", help="compare canonical modules before and after")
    m.add_argument("--qmax", type=int, default=2)
    m.set_defaults(func=cmd_moves)

    pa = sub.add_parser("path", help="path bound for h^1 of a line bundle with given c_1")
    pa.add_argument("graph")
    pa.add_argument("--l-prime", type=parse_vector, default=None, help="comma separated rationals")
    pa.add_argument("--search", choices=["exhaustive", "greedy", "laufer"], default="exhaustive")
    pa.add_argument("--mixed", action="store_true", help="allow decreasing steps (small graphs)")
    pa.add_argument("--steps", action="store_true", help="print the per-step table")
    pa.add_argument("--format", choices=["json", "text"], default="text")
    pa.set_defaults(func=cmd_path)

    o = sub.add_parser("oracle", help="brute-force cross-checks")
    o.add_argument("graph")
    o.add_argument("--box", type=int, default=3)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (RegionError, EnumerationBudgetExceeded, MemoryError) as exc:
        print(f"latcoh: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (GraphError, LatticeError, ReportError, PathError, KeyError, ValueError) as exc:
        print(f"latcoh: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
