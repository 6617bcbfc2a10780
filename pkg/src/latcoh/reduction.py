"""Reduced cube complexes over a set of bad vertices.

For a tree of rational curves, let V be a vertex set such that lowering the
Euler numbers on V makes the graph rational.  For a distinguished k_r, the
lattice cohomology of (Gamma, k_r) is computed on the lattice Z^V_{>=0}: a
point x' is lifted to the smallest cycle x with x|V = x' reached by adding
E_u (u not in V) as long as chi_{k_r} does not increase, and gets the weight
chi_{k_r}(x).  Cubes take the max of their vertex weights.  The test suite
checks this against the full complex on every graph where both are feasible.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .cubes import DEFAULT_BUDGET, FilteredCubeComplex, Region, RegionError, WeightSystem, build_complex
from .ellipsoid import EnumerationBudgetExceeded
from .lattice import Cycle, Lattice
from .laufer import bad_vertex_set


class ReductionUnavailable(ValueError):
    pass


@dataclass
class ReducedSystem:
    lat: Lattice
    ws: WeightSystem
    bad: Tuple[int, ...]
    lifts: Dict[Cycle, Cycle]

    @property
    def nu(self) -> int:
        return len(self.bad)

    def embed(self, xbar: Sequence[int]) -> Cycle:
        x = [0] * self.lat.s
        for v, t in zip(self.bad, xbar):
            x[v] = t
        return tuple(x)

    def lift(self, xbar: Sequence[int]) -> Cycle:
        """Lift of x', started from the lift of x' - E_v when that is known.

        This is valid because lift(x' - E_v) + E_v <= lift(x'), and the lift
        sequence never overshoots a stable cycle above its start.
        """
        key = tuple(xbar)
        got = self.lifts.get(key)
        if got is not None:
            return got
        chain = [key]
        start = None
        while True:
            cur = chain[-1]
            i = next((i for i, t in enumerate(cur) if t > 0), None)
            if i is None:
                start = self.embed(cur)
                break
            parent = cur[:i] + (cur[i] - 1,) + cur[i + 1:]
            base = self.lifts.get(parent)
            if base is not None:
                v = self.bad[i]
                start = base[:v] + (base[v] + 1,) + base[v + 1:]
                break
            chain.append(parent)
        for pos in range(len(chain) - 1, -1, -1):
            cur = chain[pos]
            got = laufer_lift(self.ws, start, self.bad)
            self.lifts[cur] = got
            if pos:
                # chain[pos - 1] exceeds cur by one in a single coordinate
                i = next(i for i, (a, b) in enumerate(zip(cur, chain[pos - 1])) if a != b)
                v = self.bad[i]
                start = got[:v] + (got[v] + 1,) + got[v + 1:]
        return self.lifts[key]

    def weight(self, xbar: Sequence[int]) -> int:
        return self.ws.w0(self.lift(xbar))


def laufer_lift(ws: WeightSystem, start: Cycle, frozen: Sequence[int], guard: int = 10 ** 6) -> Cycle:
    """Add E_u (u not frozen, lowest index first) while chi_k does not increase."""
    s = ws.lat.s
    fz = set(frozen)
    free = [u for u in range(s) if u not in fz]
    x = list(start)
    for _ in range(guard):
        t = tuple(x)
        u = next((u for u in free if ws.step(t, u) <= 0), None)
        if u is None:
            return t
        x[u] += 1
    raise RuntimeError("lift did not terminate")


def reduced_system(lat: Lattice, k: Sequence, bad: Optional[Sequence[int]] = None) -> ReducedSystem:
    g = lat.graph
    if any(g.genera) or len(g.edges) != g.s - 1:
        raise ReductionUnavailable("reduction needs a tree of rational curves")
    if not lat.is_distinguished(k):
        raise ReductionUnavailable("reduction needs the distinguished representative k_r")
    if bad is None:
        bad = bad_vertex_set(g)
    if bad is None:
        raise ReductionUnavailable("no bad vertex set found")
    bad = tuple(sorted(bad))
    if not bad:
        # rational graph: one vertex suffices to carry the (contractible) complex
        bad = (0,)
    return ReducedSystem(lat, WeightSystem(lat, k), bad, {})


def reduced_points(rs: ReducedSystem, n_max: int, budget: int = DEFAULT_BUDGET) -> Dict[Cycle, int]:
    """Reduced points x' >= 0 with lifted weight <= n_max."""
    q = rs.lat.chi_form(rs.ws.k).schur(list(rs.bad))
    try:
        cand = q.points(n_max, lower=[0] * rs.nu, budget=budget)
    except EnumerationBudgetExceeded as exc:
        raise RegionError(str(exc)) from None
    out = {}
    for xb in cand:
        w = rs.weight(xb)
        if w <= n_max:
            out[xb] = w
    return out


def reduced_complex(rs: ReducedSystem, n_max: int, qmax: Optional[int] = None,
                    budget: int = DEFAULT_BUDGET) -> FilteredCubeComplex:
    pts = reduced_points(rs, n_max, budget)
    if not pts:
        raise RegionError(f"no reduced point of weight <= {n_max}")
    region = Region("reduced", [0] * rs.nu, None,
                    "reduced lattice on vertices " + ",".join(rs.lat.graph.ids[v] for v in rs.bad))
    return build_complex(pts, rs.nu, n_max, region, qmax=qmax, budget=budget)
