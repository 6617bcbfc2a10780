"""Orbit sweeps, the Seiberg-Witten comparison harness and report serialization."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .corpus import SWTable, bundled_sw
from .cubes import DEFAULT_BUDGET
from .graph import PlumbingGraph, cycle_rank
from .homology import ZUModule
from .lattice import Lattice, format_dual, parse_frac, scale, sub
from .laufer import classify, generalized_laufer, is_almost_rational
from .paths import PathError, h1_upper_bound

log = logging.getLogger(__name__)

SCHEMA = "latcoh-report/1"

FORMULAS = {
    "k_r": "K + 2 * (minimal anti-nef representative of the class)",
    "m_k": "min chi_k over the complex, chi_k(x) = -(x, x + k)/2",
    "eu0": "-m_k + rank H^0_red",
    "eu_star": "-m_k + sum_q (-1)^q rank H^q_red",
    "d": "(k^2 + s)/4 - 2 m_k",
    "rhs": "-sw(M,[k]) - (k^2 + s)/8",
    "path_bound": "min over searched paths of eu of the path module, weights of (Gamma, k)",
}


class ReportError(ValueError):
    pass


# ---------------------------------------------------------------- harness

def sw_rhs(lat: Lattice, k: Sequence, sw) -> Fraction:
    if not cycle_rank(lat.graph).is_qhs:
        raise ReportError("the sw identity is stated for rational homology spheres only")
    if sw is None:
        raise ReportError("no sw value supplied")
    return -Fraction(sw) - (lat.square(k) + lat.s) / 8


def conjecture_check(module: ZUModule, rhs: Fraction, almost_rational: Optional[bool]) -> dict:
    """Compare eu0 and eu_star with the sw side; never raises on a mismatch."""
    e0, es = module.eu0(), module.eu_star()
    row = {
        "lhs_eu0": e0,
        "lhs_eustar": es,
        "rhs": str(rhs),
        "hf4_match": e0 == rhs,
        "hf5_match": es == rhs,
        "hf4_is_theorem": bool(almost_rational),
        "warnings": [],
    }
    if almost_rational and e0 != rhs:
        row["warnings"].append("eu0 differs from the sw side on an almost rational graph")
    if es != rhs:
        row["warnings"].append("eu_star differs from the sw side")
    return row


def in_LL(lat: Lattice, lp: Sequence) -> bool:
    """Whether e(l') is the largest nef element l'_ne of its class."""
    _, _, e = generalized_laufer(lat, lp)
    ne = scale(-1, lat.lift_antinef(scale(-1, lp)))
    return tuple(Fraction(x) for x in e) == tuple(Fraction(x) for x in ne)


def property_A_row(lat: Lattice, lp: Sequence, sw=None, h1: Optional[int] = None) -> dict:
    """Right hand side for c_1 = l', the reduction identity, and the optional analytic comparison."""
    lp = tuple(Fraction(x) for x in lp)
    if not lat.in_dual(lp):
        raise ReportError("l' is not in the dual lattice")
    k = sub(lat.K, scale(2, lp))
    l, _, e = generalized_laufer(lat, lp)
    lhs = (-lat.square(k) + lat.square(sub(lat.K, scale(2, e)))) / 8
    rhs_id = -Fraction(lat.pair(l, lp)) - Fraction(lat.chi(lat.K, l))
    row = {
        "l_prime": format_dual(lp),
        "k": format_dual(k),
        "member": in_LL(lat, lp),
        "e": format_dual(e),
        "l": list(l),
        "reduction_lhs": str(lhs),
        "reduction_rhs": str(rhs_id),
        "reduction_ok": lhs == rhs_id,
        "rhs": None,
        "h1": h1,
        "match": None,
    }
    if not row["member"]:
        row["caveat"] = "l' is outside the set where the identity is expected"
    if sw is not None:
        rhs = sw_rhs(lat, k, sw)
        row["rhs"] = str(rhs)
        if h1 is not None:
            row["match"] = rhs == h1
    return row


# ---------------------------------------------------------------- report

@dataclass
class OrbitReport:
    index: int
    k_r: List[Fraction]
    k_square: Fraction
    m_k: int
    n_max: int
    engine: str
    qmax: int
    module: ZUModule
    eu0: int
    eu_star: Optional[int]
    d: Optional[Fraction] = None
    reduced_on: Optional[List[str]] = None
    paths: Optional[dict] = None
    conjecture: Optional[dict] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "k_r": format_dual(self.k_r),
            "k_square": str(self.k_square),
            "m_k": self.m_k,
            "n_max": self.n_max,
            "engine": self.engine,
            "qmax": self.qmax,
            "module": self.module.to_dict(),
            "module_text": self.module.text(),
            "eu0": self.eu0,
            "eu_star": self.eu_star,
            "d": None if self.d is None else str(self.d),
            "reduced_on": self.reduced_on,
            "paths": self.paths,
            "conjecture": self.conjecture,
            "notes": list(self.notes),
        }

    @staticmethod
    def from_dict(data: dict) -> "OrbitReport":
        return OrbitReport(
            data["index"], [parse_frac(x) for x in data["k_r"]], parse_frac(data["k_square"]),
            data["m_k"], data["n_max"], data["engine"], data["qmax"], ZUModule.from_dict(data["module"]),
            data["eu0"], data["eu_star"], None if data["d"] is None else parse_frac(data["d"]),
            data.get("reduced_on"), data.get("paths"), data.get("conjecture"), list(data.get("notes", [])))


@dataclass
class Report:
    graph: dict
    digest: str
    qhs: bool
    classification: dict
    almost_rational: str
    orbits: List[OrbitReport]
    schema: str = SCHEMA
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "graph": self.graph,
            "digest": self.digest,
            "qhs": self.qhs,
            "classification": self.classification,
            "almost_rational": self.almost_rational,
            "formulas": FORMULAS,
            "orbits": [o.to_dict() for o in self.orbits],
            "notes": list(self.notes),
        }

    @staticmethod
    def from_dict(data: dict) -> "Report":
        if data.get("schema") != SCHEMA:
            raise ReportError(f"unsupported report schema {data.get('schema')!r}")
        return Report(data["graph"], data["digest"], data["qhs"], data["classification"],
                      data["almost_rational"], [OrbitReport.from_dict(o) for o in data["orbits"]],
                      data["schema"], list(data.get("notes", [])))

    def text(self) -> str:
        name = self.graph.get("name") or self.digest
        cl = self.classification
        lines = [f"graph {name} (digest {self.digest}), s = {len(self.graph['vertices'])}",
                 f"  kind: {cl['kind']}, Z_min = {cl['z_min']}, chi(Z_min) = {cl['chi_z_min']}, "
                 f"almost rational: {self.almost_rational}"]
        for o in self.orbits:
            lines.append(f"orbit {o.index}: k_r = ({', '.join(format_dual(o.k_r))})")
            lines.append(f"  m_k = {o.m_k}, engine = {o.engine}"
                         + (f" on {','.join(o.reduced_on)}" if o.reduced_on else "")
                         + f", levels <= {o.n_max}, qmax = {o.qmax}")
            for q in o.module.degrees():
                lines.append(f"  H^{q} = {o.module.text(q)}")
            lines.append(f"  eu0 = {o.eu0}, eu* = {'n/a' if o.eu_star is None else o.eu_star}" + ("" if o.d is None else f", d = {o.d}"))
            if o.paths:
                lines.append(f"  path bound: {o.paths['bound']} ({o.paths['method']}, "
                             f"{'exact' if o.paths['exact'] else 'not exhaustive'})")
            if o.conjecture:
                c = o.conjecture
                lines.append(f"  sw side: {c['rhs']}; eu0 match {c['hf4_match']}, eu* match {c['hf5_match']}")
            for n in o.notes:
                lines.append(f"  note: {n}")
        for n in self.notes:
            lines.append(f"note: {n}")
        return "\n".join(lines) + "\n"


def select_orbits(lat: Lattice, spinc) -> List[int]:
    if spinc in (None, "canonical"):
        return [0]
    if spinc == "all":
        return list(range(len(lat.orbits)))
    try:
        idx = int(spinc)
    except (TypeError, ValueError):
        raise ReportError(f"bad spin^c selector {spinc!r}") from None
    if not 0 <= idx < len(lat.orbits):
        raise ReportError(f"orbit index {idx} out of range 0..{len(lat.orbits) - 1}")
    return [idx]


def _sw_for(lat: Lattice, orbit: int, kind: str, sw_table: Optional[SWTable], k) -> Optional[Fraction]:
    if sw_table is not None:
        entry = sw_table.get(lat.graph.digest(), orbit)
        if entry is not None:
            return entry.sw_value(lat.square(k) + lat.s)
    if kind == "rational":
        return -(lat.square(k) + lat.s) / 8
    return None


def analyze_orbit(g: PlumbingGraph, index: int, qmax=None, n_max=None, region="auto", box=None,
                  paths="exhaustive", sw_table: Optional[SWTable] = None, engine="auto",
                  kind: Optional[str] = None, almost_rational: Optional[bool] = None,
                  budget: int = DEFAULT_BUDGET) -> OrbitReport:
    from .engine import lattice_cohomology

    lat = Lattice(g)
    orb = lat.orbits[index]
    k = orb.k_r
    res = lattice_cohomology(lat, k, qmax=qmax, n_max=n_max, region=region, box=box, engine=engine,
                             budget=budget)
    qhs = cycle_rank(g).is_qhs
    d = lat.d_invariant(k, res.m_k) if qhs else None
    out = OrbitReport(index, list(k), lat.square(k), res.m_k, res.n_max, res.engine, res.qmax, res.module,
                      res.module.eu0(), res.module.eu_star(), d, res.reduced_on, notes=list(res.notes))
    dim = len(res.reduced_on) if res.reduced_on else lat.s
    if res.qmax < dim - 1:
        out.notes.append(f"cohomology computed for q <= {res.qmax} only; eu_star left open")
        out.eu_star = None
    elif dim < lat.s:
        out.notes.append(f"the reduced complex has dimension {dim}, so H^q = 0 for q >= {dim}")
    if paths != "off":
        lp = scale(-1, orb.l_ne_bar)
        try:
            hb = h1_upper_bound(lat, lp, mode=paths)
            out.paths = {
                "l_prime": format_dual(lp),
                "bound": hb.bound,
                "step_sum": hb.step_sum,
                "simple": hb.simple,
                "method": hb.search.method,
                "exact": hb.search.exact,
                "search_space": hb.search.search_space,
                "module": hb.search.module.to_dict(),
                "path": hb.search.path.signed_ids(g.ids),
            }
        except PathError as exc:
            out.notes.append(f"path search failed: {exc}")
    if qhs:
        if kind is None:
            kind = classify(lat).kind
        sw = _sw_for(lat, index, kind, sw_table, k)
        if sw is not None:
            out.conjecture = conjecture_check(res.module, sw_rhs(lat, k, sw), almost_rational)
            if out.eu_star is None:
                out.conjecture["lhs_eustar"] = out.conjecture["hf5_match"] = None
                out.conjecture["warnings"] = [w for w in out.conjecture["warnings"] if "eu_star" not in w]
            out.conjecture["sw"] = str(sw)
    return out


def run_analyze(g: PlumbingGraph, spinc="canonical", qmax=None, n_max=None, region="auto", box=None,
                paths="exhaustive", sw_table: Optional[SWTable] = None, engine="auto",
                jobs: int = 1, budget: int = DEFAULT_BUDGET) -> Report:
    """Reports for the selected orbits.  ``sw_table`` defaults to the bundled values."""
    if sw_table is None:
        sw_table = bundled_sw()
    lat = Lattice(g)
    cr = cycle_rank(g)
    cl = classify(lat)
    if cr.is_qhs and len(g.edges) == g.s - 1:
        ar = is_almost_rational(g)
        ar_status = ar.status
        ar_val = ar.value
    else:
        ar_status, ar_val = "not applicable", None
    idx = select_orbits(lat, spinc)
    kw = dict(qmax=qmax, n_max=n_max, region=region, box=box, paths=paths, sw_table=sw_table,
              engine=engine, kind=cl.kind, almost_rational=ar_val, budget=budget)
    if jobs > 1 and len(idx) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futs = [ex.submit(analyze_orbit, g, i, **kw) for i in idx]
            orbits = [f.result() for f in futs]
    else:
        orbits = [analyze_orbit(g, i, **kw) for i in idx]
    notes = []
    if not cr.is_qhs:
        notes.append("not a rational homology sphere: d and sw rows are omitted")
    return Report(g.to_dict(), g.digest(), cr.is_qhs, cl.to_dict(), ar_status, orbits, notes=notes)
