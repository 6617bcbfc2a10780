"""Plumbing graphs: parsing, validation, intersection matrix and blow-up moves."""
from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .linalg import leading_minors


class GraphError(ValueError):
    """Raised for malformed or invalid plumbing graph input."""


@dataclass(frozen=True)
class Vertex:
    id: str
    euler: int
    genus: int = 0


@dataclass(frozen=True)
class PlumbingGraph:
    """Decorated multigraph; vertex order is the lattice basis order."""

    vertices: Tuple[Vertex, ...]
    edges: Tuple[Tuple[str, str], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        ids = [v.id for v in self.vertices]
        if not ids:
            raise GraphError("graph has no vertices")
        dup = [k for k, c in Counter(ids).items() if c > 1]
        if dup:
            raise GraphError(f"duplicate vertex id(s): {', '.join(dup)}")
        known = set(ids)
        for v in self.vertices:
            if v.genus < 0:
                raise GraphError(f"negative genus at vertex {v.id}")
        for a, b in self.edges:
            for x in (a, b):
                if x not in known:
                    raise GraphError(f"edge endpoint {x!r} is not a declared vertex")
            if a == b:
                raise GraphError(f"self-loop at vertex {a!r}")
        if not _connected(ids, self.edges):
            raise GraphError("graph is not connected")

    @property
    def s(self) -> int:
        return len(self.vertices)

    @property
    def ids(self) -> List[str]:
        return [v.id for v in self.vertices]

    @property
    def eulers(self) -> List[int]:
        return [v.euler for v in self.vertices]

    @property
    def genera(self) -> List[int]:
        return [v.genus for v in self.vertices]

    def index(self, vid: str) -> int:
        for i, v in enumerate(self.vertices):
            if v.id == vid:
                return i
        raise GraphError(f"unknown vertex {vid!r}")

    def multiplicity(self, a: str, b: str) -> int:
        return sum(1 for e in self.edges if set(e) == {a, b})

    def degree(self, vid: str) -> int:
        """Number of incident edges, counted with multiplicity."""
        return sum((a == vid) + (b == vid) for a, b in self.edges)

    def neighbours(self, i: int) -> List[int]:
        vid = self.vertices[i].id
        out = []
        for a, b in self.edges:
            if a == vid:
                out.append(self.index(b))
            elif b == vid:
                out.append(self.index(a))
        return out

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "vertices": [{"id": v.id, "euler": v.euler, "genus": v.genus} for v in self.vertices],
            "edges": [list(e) for e in self.edges],
        }

    def digest(self) -> str:
        """Stable hash of the decorated graph (vertex order matters)."""
        payload = json.dumps({k: v for k, v in self.to_dict().items() if k != "name"},
                             sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def with_euler(self, i: int, euler: int) -> "PlumbingGraph":
        vs = list(self.vertices)
        vs[i] = Vertex(vs[i].id, euler, vs[i].genus)
        return PlumbingGraph(tuple(vs), self.edges, self.name)


def _connected(ids: Sequence[str], edges) -> bool:
    adj: Dict[str, set] = {i: set() for i in ids}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {ids[0]}
    stack = [ids[0]]
    while stack:
        x = stack.pop()
        for y in adj[x] - seen:
            seen.add(y)
            stack.append(y)
    return len(seen) == len(ids)


def make_graph(vertices, edges=(), name: str = "") -> PlumbingGraph:
    """Build a graph from ``(id, euler[, genus])`` tuples and id pairs."""
    vs = tuple(Vertex(str(v[0]), int(v[1]), int(v[2]) if len(v) > 2 else 0) for v in vertices)
    es = tuple((str(a), str(b)) for a, b in edges)
    return PlumbingGraph(vs, es, name)


def parse_graph(text: str, name: str = "", check_definite: bool = True) -> PlumbingGraph:
    """Parse either the JSON graph format or the terse ``v``/``e`` line format."""
    stripped = text.strip()
    if not stripped:
        raise GraphError("empty graph description")
    if stripped[0] == "{":
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise GraphError(f"malformed JSON: {exc}") from None
        g = _from_json(data, name)
    else:
        g = _from_lines(stripped, name)
    if check_definite and not check_negative_definite(intersection_matrix(g)):
        raise GraphError("intersection matrix is not negative definite")
    return g


def _from_json(data, name: str) -> PlumbingGraph:
    if not isinstance(data, dict) or "vertices" not in data:
        raise GraphError("top-level object must contain 'vertices'")
    verts = []
    for item in data["vertices"]:
        try:
            verts.append((str(item["id"]), _int(item["euler"]), _int(item.get("genus", 0))))
        except (KeyError, TypeError):
            raise GraphError(f"malformed vertex entry: {item!r}") from None
    edges = []
    for e in data.get("edges", []):
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise GraphError(f"malformed edge entry: {e!r}")
        edges.append((str(e[0]), str(e[1])))
    return make_graph(verts, edges, name or str(data.get("name", "")))


def _from_lines(text: str, name: str) -> PlumbingGraph:
    verts, edges = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "v" and len(tok) in (3, 4):
            verts.append((tok[1], _int(tok[2], lineno), _int(tok[3], lineno) if len(tok) == 4 else 0))
        elif tok[0] == "e" and len(tok) == 3:
            edges.append((tok[1], tok[2]))
        else:
            raise GraphError(f"line {lineno}: cannot parse {raw!r}")
    return make_graph(verts, edges, name)


def _int(x, lineno: Optional[int] = None) -> int:
    if isinstance(x, bool):
        raise GraphError(f"expected an integer, got {x!r}")
    try:
        if isinstance(x, str):
            return int(x)
        if isinstance(x, int):
            return x
    except ValueError:
        pass
    where = f"line {lineno}: " if lineno else ""
    raise GraphError(f"{where}expected an integer, got {x!r}")


def format_lines(g: PlumbingGraph) -> str:
    out = [f"v {v.id} {v.euler} {v.genus}" if v.genus else f"v {v.id} {v.euler}" for v in g.vertices]
    out += [f"e {a} {b}" for a, b in g.edges]
    return "\n".join(out) + "\n"


def intersection_matrix(g: PlumbingGraph) -> Tuple[Tuple[int, ...], ...]:
    idx = {v.id: i for i, v in enumerate(g.vertices)}
    m = [[0] * g.s for _ in range(g.s)]
    for i, v in enumerate(g.vertices):
        m[i][i] = v.euler
    for a, b in g.edges:
        m[idx[a]][idx[b]] += 1
        m[idx[b]][idx[a]] += 1
    return tuple(tuple(r) for r in m)


def check_negative_definite(m) -> bool:
    """Sylvester's criterion: (-1)^k times the k-th leading minor is positive."""
    return all((-1) ** k * d > 0 for k, d in enumerate(leading_minors(m), 1))


@dataclass(frozen=True)
class CycleRank:
    c: int
    genus: int
    b1: int          # rank of H_1(M)
    is_qhs: bool


def cycle_rank(g: PlumbingGraph) -> CycleRank:
    c = len(g.edges) - g.s + 1
    gen = sum(g.genera)
    return CycleRank(c, gen, c + 2 * gen, c == 0 and gen == 0)


# ---------------------------------------------------------------- blow-ups

Site = Union[str, Tuple[str, str]]


@dataclass(frozen=True)
class BlowupMaps:
    """Lattice maps attached to a blow-up ``g -> g'`` (new vertex is last)."""

    old_s: int
    sources: Tuple[int, ...]     # indices i with pi^*(x)_new = sum of x_i

    def pi_upper_star(self, x: Sequence) -> tuple:
        """Pull-back L(g) -> L(g'); also applies to rational cycles."""
        return tuple(x) + (sum(x[i] for i in self.sources),)

    def pi_star(self, z: Sequence) -> tuple:
        """Projection L(g') -> L(g) forgetting the new coordinate."""
        return tuple(z[: self.old_s])

    def c_map(self, k: Sequence) -> tuple:
        """Nonlinear map Char(g) -> Char(g'): pull back, then add E_new."""
        up = self.pi_upper_star(k)
        return up[:-1] + (up[-1] + 1,)


def _fresh_id(g: PlumbingGraph) -> str:
    taken = set(g.ids)
    n = 1
    while f"N{n}" in taken:
        n += 1
    return f"N{n}"


def blow_up(g: PlumbingGraph, site: Site, new_id: Optional[str] = None):
    """Blow up a vertex (smooth point) or an edge (intersection point).

    Returns ``(g', maps)``; the new (-1)-vertex is appended last.
    """
    nid = new_id or _fresh_id(g)
    if nid in g.ids:
        raise GraphError(f"vertex id {nid!r} already used")
    vs = list(g.vertices)
    if isinstance(site, str):
        j0 = g.index(site)
        vs[j0] = Vertex(vs[j0].id, vs[j0].euler - 1, vs[j0].genus)
        vs.append(Vertex(nid, -1, 0))
        edges = g.edges + ((site, nid),)
        sources = (j0,)
    else:
        a, b = site
        i0, j0 = g.index(a), g.index(b)
        if g.multiplicity(a, b) != 1:
            raise GraphError(f"edge {a}-{b} must have multiplicity 1 to be blown up")
        for t in (i0, j0):
            vs[t] = Vertex(vs[t].id, vs[t].euler - 1, vs[t].genus)
        vs.append(Vertex(nid, -1, 0))
        edges, removed = [], False
        for e in g.edges:
            if not removed and set(e) == {a, b}:
                removed = True
                continue
            edges.append(e)
        edges = tuple(edges) + ((a, nid), (nid, b))
        sources = (i0, j0)
    return PlumbingGraph(tuple(vs), tuple(edges), g.name), BlowupMaps(g.s, sources)


def blow_down(g: PlumbingGraph, vid: str) -> PlumbingGraph:
    """Inverse of :func:`blow_up` for a (-1)-vertex of genus 0 with at most two edges."""
    i = g.index(vid)
    v = g.vertices[i]
    deg = g.degree(vid)
    if v.euler != -1 or v.genus != 0 or deg > 2:
        raise GraphError(f"vertex {vid!r} is not a blow-down-able (-1)-vertex")
    if g.s == 1:
        raise GraphError("cannot blow down the only vertex")
    incident = [e for e in g.edges if vid in e]
    others = [a if b == vid else b for a, b in incident]
    if deg == 2 and others[0] == others[1]:
        # a double edge to one vertex: blowing down would create a self-loop
        raise GraphError(f"blowing down {vid!r} would create a self-loop")
    vs = []
    for w in g.vertices:
        if w.id == vid:
            continue
        shift = others.count(w.id)
        vs.append(Vertex(w.id, w.euler + shift, w.genus))
    edges = [e for e in g.edges if vid not in e]
    if deg == 2:
        edges.append((others[0], others[1]))
    return PlumbingGraph(tuple(vs), tuple(edges), g.name)


def relabel_equal(a: PlumbingGraph, b: PlumbingGraph) -> bool:
    """Equality of decorated multigraphs up to a relabelling of vertex ids.

    Small graphs only; tries structure-preserving bijections by backtracking.
    """
    if a.s != b.s or len(a.edges) != len(b.edges):
        return False
    ma, mb = intersection_matrix(a), intersection_matrix(b)
    ga, gb = a.genera, b.genera
    order = list(range(a.s))
    cand = {i: [j for j in range(b.s) if ma[i][i] == mb[j][j] and ga[i] == gb[j]] for i in order}
    assign: Dict[int, int] = {}

    def rec(p: int) -> bool:
        if p == len(order):
            return True
        i = order[p]
        for j in cand[i]:
            if j in assign.values():
                continue
            if all(ma[i][i2] == mb[j][j2] for i2, j2 in assign.items()):
                assign[i] = j
                if rec(p + 1):
                    return True
                del assign[i]
        return False

    return rec(0)


def to_fraction_tuple(xs) -> Tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in xs)
