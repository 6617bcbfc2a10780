"""Path cohomology along lattice paths and upper bounds for h^1 of line bundles."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cubes import DEFAULT_BUDGET, RegionError, WeightSystem, build_region, enumerate_points, genus_correction
from .homology import ZUModule
from .lattice import Cycle, Lattice, add, scale, sub
from .laufer import artin_cycle, generalized_laufer
from .reduction import ReductionUnavailable, laufer_lift, reduced_system

STEP_GUARD = 100_000


class PathError(ValueError):
    pass


@dataclass
class LatticePath:
    points: List[Cycle]
    reaches_infinity: bool = False

    def __post_init__(self):
        pts = [tuple(p) for p in self.points]
        self.points = pts
        if not pts or any(pts[0]):
            raise PathError("a path starts at the zero cycle")
        if len(set(pts)) != len(pts):
            raise PathError("a path visits a lattice point twice")
        for a, b in zip(pts, pts[1:]):
            d = [y - x for x, y in zip(a, b)]
            if sum(abs(t) for t in d) != 1:
                raise PathError(f"{a} -> {b} is not a unit step")

    def steps(self) -> List[Tuple[int, int]]:
        """(vertex index, +1/-1) per step."""
        out = []
        for a, b in zip(self.points, self.points[1:]):
            j = next(i for i, (x, y) in enumerate(zip(a, b)) if x != y)
            out.append((j, b[j] - a[j]))
        return out

    def signed_ids(self, ids: Sequence[str]) -> List[str]:
        return [("+" if sg > 0 else "-") + ids[j] for j, sg in self.steps()]

    @property
    def increasing(self) -> bool:
        return all(sg > 0 for _, sg in self.steps())

    @property
    def end(self) -> Cycle:
        return self.points[-1]


def segment_weight(ws: WeightSystem, a: Cycle, b: Cycle) -> int:
    j = next(i for i, (x, y) in enumerate(zip(a, b)) if x != y)
    lo = a if a[j] < b[j] else b
    return ws.w1(lo, j)


def path_eu(path: LatticePath, ws: WeightSystem) -> int:
    pts = path.points
    total = -ws.w0(pts[0])
    for a, b in zip(pts, pts[1:]):
        total += segment_weight(ws, a, b) - ws.w0(b)
    return total


def path_module(path: LatticePath, ws: WeightSystem) -> ZUModule:
    """Sublevel persistence of the path (a 1-complex): only H^0 can be nonzero."""
    from collections import Counter

    pts = path.points
    w = [ws.w0(p) for p in pts]
    segw = [segment_weight(ws, a, b) for a, b in zip(pts, pts[1:])]
    events = [(w[i], 0, i) for i in range(len(pts))] + [(segw[i], 1, i) for i in range(len(segw))]
    events.sort()
    parent = {}
    birth = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    c: Counter = Counter()
    for val, kind, i in events:
        if kind == 0:
            parent[i] = i
            birth[i] = (val, i)
            continue
        ra, rb = find(i), find(i + 1)
        if birth[ra] > birth[rb]:
            ra, rb = rb, ra
        b = birth[rb][0]
        if val > b:
            c[(0, 2 * b, val - b)] += 1
        parent[rb] = ra
    m = min(w)
    c[(0, 2 * m, None)] += 1
    return ZUModule.build(c)


def in_end_region(lat: Lattice, lp: Sequence, x: Sequence) -> bool:
    """x in l' - K - L_{Q,ne}, i.e. (l' - K - x, E_j) >= 0 for all j."""
    return lat.is_nef(sub(sub(lp, lat.K), x))


def chern_char(lat: Lattice, lp: Sequence) -> tuple:
    """k = K - 2 l'."""
    return sub(lat.K, scale(2, lp))


def artin_path(lat: Lattice, first: int = 0, detour: bool = False) -> LatticePath:
    """Increasing path 0 -> Z_min by Laufer steps starting at E_first.

    With ``detour`` the second step goes to 2 E_first (needs multiplicity >= 2 in Z_min).
    """
    s = lat.s
    x = [0] * s
    pts = [tuple(x)]
    x[first] = 1
    pts.append(tuple(x))
    if detour:
        x[first] = 2
        pts.append(tuple(x))
    for _ in range(STEP_GUARD):
        j = next((j for j in range(s) if lat.pair_basis(x, j) > 0), None)
        if j is None:
            break
        x[j] += 1
        pts.append(tuple(x))
    z, _ = artin_cycle(lat)
    if tuple(x) != tuple(z):
        raise PathError("the detour overshoots Z_min")
    return LatticePath(pts)


def laufer_path(lat: Lattice, lp: Optional[Sequence] = None) -> LatticePath:
    """Laufer steps 0 -> Z_min, then generalized Laufer steps until the end region."""
    s = lat.s
    lp = tuple(lp) if lp is not None else tuple([0] * s)
    zero = tuple([0] * s)
    if in_end_region(lat, lp, zero):
        return LatticePath([zero], True)
    _, seq = artin_cycle(lat)
    pts = [zero]
    for x in seq:
        pts.append(x)
        if in_end_region(lat, lp, x):
            return LatticePath(pts, True)
    _, more, _ = generalized_laufer(lat, sub(lp, lat.K), start=pts[-1])
    for x in more[1:]:
        pts.append(x)
        if in_end_region(lat, lp, x):
            return LatticePath(pts, True)
    return LatticePath(pts, in_end_region(lat, lp, pts[-1]))


def greedy_path(lat: Lattice, lp: Optional[Sequence] = None) -> LatticePath:
    """Increasing path choosing the step of least w_1, then the lowest index."""
    s = lat.s
    lp = tuple(lp) if lp is not None else tuple([0] * s)
    ws = WeightSystem(lat, chern_char(lat, lp))
    x = tuple([0] * s)
    pts = [x]
    for _ in range(STEP_GUARD):
        if in_end_region(lat, lp, x):
            return LatticePath(pts, True)
        j = min(range(s), key=lambda j: (ws.w1(x, j), j))
        x = x[:j] + (x[j] + 1,) + x[j + 1:]
        pts.append(x)
    raise PathError("greedy path did not reach the end region")


@dataclass
class PathSearchResult:
    path: LatticePath
    eu: int
    module: ZUModule
    method: str                # lattice-dp | lifted-dp | greedy | laufer
    exact: bool                # exhaustive over its search space
    search_space: str
    cap: Optional[int] = None
    explored: int = 0
    notes: List[str] = field(default_factory=list)


def _dijkstra(ws: WeightSystem, source, origin: Cycle, expand, goal):
    """Least path-eu walk from ``origin`` until ``goal(point)`` holds.

    States are explored in order of accumulated cost; ``expand(state, point)``
    yields (next state, walk) where the walk lists the lattice points visited
    after ``point``.  Returns (points after origin, states explored).
    """
    if goal(origin):
        return [], 0
    dist = {source: 0}
    prev: Dict = {source: None}
    at = {source: origin}
    walks: Dict = {}
    heap = [(0, source)]
    done = set()
    best = None
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        if best is not None and d > best[0]:
            break
        for y, walk in expand(x, at[x]):
            cost, a, hit = d, at[x], None
            for n, b in enumerate(walk):
                cost += segment_weight(ws, a, b) - ws.w0(b)
                a = b
                if goal(b):
                    hit = n
                    break
            if hit is not None:
                cand = (cost, x, tuple(walk[:hit + 1]))
                if best is None or cand[:2] < best[:2]:
                    best = cand
                continue
            if y in done:
                continue
            if cost < dist.get(y, cost + 1) or (cost == dist.get(y) and x < prev[y]):
                dist[y] = cost
                prev[y] = x
                at[y] = walk[-1]
                walks[y] = walk
                heapq.heappush(heap, (cost, y))
    if best is None:
        return None, len(done)
    chain = [best[1]]
    while prev[chain[-1]] is not None:
        chain.append(prev[chain[-1]])
    out: List[Cycle] = []
    for y in reversed(chain[:-1]):
        out += walks[y]
    return out + list(best[2]), len(done)


def _goals(lat, lp, through):
    legs = [tuple(w) for w in through]
    return [(lambda p, t=t: p == t) for t in legs] + [lambda p: in_end_region(lat, lp, p)]


def _lattice_search(lat, lp, ws, cap, monotone, budget, through=()):
    s = lat.s
    region = build_region(lat, ws.k, "full")
    if monotone:
        region.lower = [0] * s
    pts = enumerate_points(ws, region, cap, budget)
    zero = tuple([0] * s)
    if zero not in pts or any(tuple(w) not in pts for w in through):
        return None, 0
    moves = [(j, 1) for j in range(s)] + ([] if monotone else [(j, -1) for j in range(s)])

    def expand(x, _):
        for j, sg in moves:
            y = x[:j] + (x[j] + sg,) + x[j + 1:]
            if y in pts:
                yield y, [y]

    path, explored = [zero], 0
    for goal in _goals(lat, lp, through):
        seen = set(path)
        walk, n = _dijkstra(ws, path[-1], path[-1],
                            lambda x, p: ((y, w) for y, w in expand(x, p) if y not in seen), goal)
        explored += n
        if walk is None:
            return None, explored
        path += walk
    return LatticePath(path, True), explored


def _lifted_search(lat, lp, ws, cap, budget, through=()):
    """Dijkstra over the reduced lattice; each edge is the lifted full path."""
    from .reduction import reduced_points

    rs = reduced_system(lat, ws.k)
    rpts = reduced_points(rs, cap, budget)
    nu = rs.nu
    zero_bar = tuple([0] * nu)
    if zero_bar not in rpts:
        return None, 0
    if any(rs.lift(zero_bar)):
        raise ReductionUnavailable("lift of the origin is not the origin")
    for w in through:
        wb = tuple(w[v] for v in rs.bad)
        if rs.lift(wb) != tuple(w):
            raise PathError(f"waypoint {tuple(w)} is not a lifted cycle")

    def expand(xb, x):
        for i in range(nu):
            yb = xb[:i] + (xb[i] + 1,) + xb[i + 1:]
            if yb not in rpts:
                continue
            v = rs.bad[i]
            first = x[:v] + (x[v] + 1,) + x[v + 1:]
            yield yb, laufer_lift_steps(ws, first, rs.bad)

    path, explored = [tuple([0] * lat.s)], 0
    for goal in _goals(lat, lp, through):
        src = tuple(path[-1][v] for v in rs.bad)
        walk, n = _dijkstra(ws, src, path[-1], expand, goal)
        explored += n
        if walk is None:
            return None, explored
        path += walk
    return LatticePath(path, True), explored


def laufer_lift_steps(ws: WeightSystem, start: Cycle, frozen: Sequence[int]) -> List[Cycle]:
    fz = set(frozen)
    free = [u for u in range(ws.lat.s) if u not in fz]
    x = tuple(start)
    out = [x]
    for _ in range(STEP_GUARD):
        u = next((u for u in free if ws.step(x, u) <= 0), None)
        if u is None:
            return out
        x = x[:u] + (x[u] + 1,) + x[u + 1:]
        out.append(x)
    raise PathError("lift did not terminate")


def min_eu_path_search(lat: Lattice, lp: Optional[Sequence] = None, mode: str = "exhaustive",
                       cap: Optional[int] = None, budget: int = 100_000, monotone: bool = True,
                       max_cap_growth: int = 32, extra_levels: int = 1,
                       through: Sequence[Sequence[int]] = ()) -> PathSearchResult:
    """Least path eu from 0 to the end region.

    ``exhaustive``: shortest path over all lattice points with chi_k <= cap
    (increasing steps only unless ``monotone`` is False); when the sublevel set
    is over budget, shortest path over Laufer-lifted paths of the reduced
    lattice.  The cap starts at max(chi_k(0), 0) (or ``cap``) and grows until a
    path exists, plus ``extra_levels`` more; the best path found is returned.
    ``through`` lists cycles the path must visit in order.  ``greedy``: the greedy increasing path.  ``laufer``: the Laufer path.
    """
    s = lat.s
    lp = tuple(lp) if lp is not None else tuple([0] * s)
    k = chern_char(lat, lp)
    ws = WeightSystem(lat, k)
    if mode in ("greedy", "laufer"):
        path = greedy_path(lat, lp) if mode == "greedy" else laufer_path(lat, lp)
        return PathSearchResult(path, path_eu(path, ws), path_module(path, ws), mode, False,
                                "single constructed path")
    if mode != "exhaustive":
        raise ValueError(f"unknown search mode {mode!r}")
    start = max(ws.w0(tuple([0] * s)), 0) if cap is None else cap
    notes: List[str] = []
    found: List[PathSearchResult] = []
    too_big = False
    for c in range(start, start + max_cap_growth + 1):
        try:
            if too_big:
                raise RegionError("sublevel set over budget at a lower cap")
            path, explored = _lattice_search(lat, lp, ws, c, monotone, budget, through)
            method, space = "lattice-dp", ("increasing" if monotone else "all") + f" paths inside chi_k <= {c}"
            exact = True
        except RegionError:
            if not monotone:
                raise
            if not too_big:
                notes.append(f"cap {c}: more than {budget} lattice points, searching lifted paths")
            too_big = True
            try:
                path, explored = _lifted_search(lat, lp, ws, c, DEFAULT_BUDGET, through)
            except ReductionUnavailable as exc:
                notes.append(f"no reduction available ({exc}); using the Laufer path")
                lpath = laufer_path(lat, lp)
                return PathSearchResult(lpath, path_eu(lpath, ws), path_module(lpath, ws), "laufer",
                                        False, "single constructed path", notes=notes)
            except RegionError as exc:
                notes.append(f"cap {c}: {exc}")
                break
            method = "lifted-dp"
            space = f"Laufer-lifted increasing paths over the reduced lattice, weights <= {c}"
            exact = False
        if path is None:
            notes.append(f"no path inside cap {c}")
            continue
        found.append(PathSearchResult(path, path_eu(path, ws), path_module(path, ws), method, exact,
                                      space, c, explored, notes))
        if len(found) > extra_levels:
            break
    if not found:
        raise PathError("no path reached the end region; raise the cap")
    best = min(found, key=lambda r: (r.eu, r.cap))
    best.notes = notes
    return best


# ---------------------------------------------------------------- upper bounds

@dataclass
class StepBound:
    index: int
    vertex: str
    sign: int
    delta: int
    bound: int


def step_bounds(lat: Lattice, lp: Sequence, path: LatticePath) -> List[StepBound]:
    """Per-step bound for h^1(L|x_{i+1}) - h^1(L|x_i)."""
    ws = WeightSystem(lat, chern_char(lat, lp))
    out = []
    ids = lat.graph.ids
    genera = lat.graph.genera
    for i, ((j, sg), a, b) in enumerate(zip(path.steps(), path.points, path.points[1:])):
        delta = ws.w0(b) - ws.w0(a)
        if sg < 0:
            bound = 0
        elif delta < 0:
            bound = -delta + genus_correction(genera[j], -delta)
        else:
            bound = genus_correction(genera[j], delta)
        out.append(StepBound(i, ids[j], sg, delta, bound))
    return out


def simple_bound(lat: Lattice, lp: Sequence, path: LatticePath) -> int:
    """Sum of max(0, chi_k(x_i) - chi_k(x_{i+1})), for increasing paths of genus 0 graphs."""
    ws = WeightSystem(lat, chern_char(lat, lp))
    return sum(max(0, ws.w0(a) - ws.w0(b)) for a, b in zip(path.points, path.points[1:]))


@dataclass
class H1Bound:
    bound: int
    step_sum: int
    simple: Optional[int]
    search: PathSearchResult
    steps: List[StepBound]


def h1_upper_bound(lat: Lattice, lp: Optional[Sequence] = None, mode: str = "exhaustive",
                   **kw) -> H1Bound:
    lp = tuple(lp) if lp is not None else tuple([0] * lat.s)
    res = min_eu_path_search(lat, lp, mode=mode, **kw)
    steps = step_bounds(lat, lp, res.path)
    simple = None
    if not any(lat.graph.genera) and res.path.increasing:
        simple = simple_bound(lat, lp, res.path)
    return H1Bound(res.eu, sum(sb.bound for sb in steps), simple, res, steps)
