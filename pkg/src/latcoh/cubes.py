"""Weighted cube complexes of (Gamma, k) and their sublevel filtrations."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ellipsoid import EnumerationBudgetExceeded
from .lattice import Cycle, Lattice

Cube = Tuple[Cycle, Tuple[int, ...]]       # (base point, increasing direction set)

DEFAULT_BUDGET = 2_000_000


class RegionError(RuntimeError):
    """Region too small, or enumeration over budget."""


def genus_correction(g: int, n: int) -> int:
    """M^g(n): largest h^0 of a degree g-1-n special bundle on a genus g curve."""
    if g < 0 or n < 0:
        raise ValueError("genus correction needs nonnegative arguments")
    if n >= g:
        return 0
    return (g - 1 - n) // 2 + 1


class WeightSystem:
    """Weights w_q of the cubes of L_R attached to a characteristic element k."""

    def __init__(self, lat: Lattice, k: Sequence):
        self.lat = lat
        self.k = tuple(k)
        self.c = lat.char_vector(k)
        self.genera = tuple(lat.graph.genera)
        self.has_genus = any(self.genera)
        s = lat.s
        self._rows = [[(j, lat.I[i][j]) for j in range(s) if lat.I[i][j]] for i in range(s)]
        self._cache: Dict[Cycle, int] = {}

    def w0(self, l: Cycle) -> int:
        v = self._cache.get(l)
        if v is None:
            quad = 0
            for i, row in enumerate(self._rows):
                li = l[i]
                if li:
                    quad += li * sum(a * l[j] for j, a in row)
            twice = quad + sum(ci * li for ci, li in zip(self.c, l))
            v = -twice // 2
            self._cache[l] = v
        return v

    def step(self, l: Cycle, j: int) -> int:
        """chi_k(l + E_j) - chi_k(l)."""
        return -sum(a * l[i] for i, a in self._rows[j]) - (self.lat.I[j][j] + self.c[j]) // 2

    def w1(self, l: Cycle, j: int) -> int:
        a = self.w0(l)
        b = self.w0(_shift(l, j))
        return max(a, b) + genus_correction(self.genera[j], abs(a - b))

    def wq(self, base: Cycle, dirs: Sequence[int]) -> int:
        """Max of w_1 over the edges of the cube (w_0 for a point)."""
        if not dirs:
            return self.w0(base)
        best = None
        for v in cube_vertices(base, dirs):
            for j in dirs:
                if v[j] == base[j]:
                    w = self.w1(v, j)
                    best = w if best is None or w > best else best
        return best


def _shift(l: Cycle, j: int, c: int = 1) -> Cycle:
    return l[:j] + (l[j] + c,) + l[j + 1:]


def cube_vertices(base: Cycle, dirs: Sequence[int]) -> List[Cycle]:
    out = [base]
    for j in dirs:
        out += [_shift(v, j) for v in out]
    return out


def cube_boundary(cube: Cube) -> List[Tuple[Cube, int]]:
    """Cellular boundary with orientation from the increasing direction order."""
    base, dirs = cube
    out = []
    for r, j in enumerate(dirs):
        rest = dirs[:r] + dirs[r + 1:]
        sign = 1 if r % 2 == 0 else -1
        out.append(((_shift(base, j), rest), sign))
        out.append(((base, rest), -sign))
    return out


@dataclass
class Region:
    kind: str                                  # full | effective | box
    lower: Optional[List[Optional[int]]] = None
    upper: Optional[List[Optional[int]]] = None
    note: str = ""

    def contains(self, p: Cycle) -> bool:
        if self.lower is not None and any(lo is not None and x < lo for x, lo in zip(p, self.lower)):
            return False
        if self.upper is not None and any(hi is not None and x > hi for x, hi in zip(p, self.upper)):
            return False
        return True

    def to_dict(self) -> dict:
        return {"kind": self.kind, "lower": self.lower, "upper": self.upper, "note": self.note}


def build_region(lat: Lattice, k: Sequence, mode: str = "auto", box=None) -> Region:
    """Region of the lattice on which the complex is built.

    ``auto``: the effective orthant when k is a distinguished representative,
    the whole lattice otherwise (sublevel sets are enumerated exactly, so no
    truncation is needed).  ``box``: ``box = (lo, hi)`` cycles, or an integer m
    meaning the box [-m Z, m Z] for the cycle Z with (Z, E_j) < 0.
    """
    s = lat.s
    if mode == "auto":
        if lat.is_distinguished(k):
            return Region("effective", [0] * s, None, "k is distinguished: effective orthant")
        return Region("full", None, None, "exact ellipsoid enumeration over L")
    if mode == "effective":
        if not lat.is_distinguished(k):
            raise RegionError("the effective orthant is valid only for a distinguished representative")
        return Region("effective", [0] * s, None, "effective orthant")
    if mode == "full":
        return Region("full", None, None, "exact ellipsoid enumeration over L")
    if mode == "box":
        if isinstance(box, int):
            z = lat.negative_cycle
            lo, hi = [-box * x for x in z], [box * x for x in z]
        else:
            lo, hi = list(box[0]), list(box[1])
        if len(lo) != s or len(hi) != s or any(a > b for a, b in zip(lo, hi)):
            raise RegionError("malformed box")
        return Region("box", lo, hi, "user box")
    raise RegionError(f"unknown region mode {mode!r}")


@dataclass
class FilteredCubeComplex:
    """Cubes of weight <= n_max, in filtration order (weight, dim, base, dirs)."""

    s: int
    n_max: int
    cubes: List[Cube]
    weights: List[int]
    region: Region
    index: Dict[Cube, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {c: i for i, c in enumerate(self.cubes)}

    @property
    def m_w(self) -> Optional[int]:
        return self.weights[0] if self.weights else None

    def minimizers(self) -> List[Cycle]:
        m = self.m_w
        return [c[0] for c, w in zip(self.cubes, self.weights) if w == m and not c[1]]

    def dim(self, i: int) -> int:
        return len(self.cubes[i][1])

    def boundary(self, i: int) -> List[Tuple[int, int]]:
        return [(self.index[f], sgn) for f, sgn in cube_boundary(self.cubes[i])]

    def points(self, n: Optional[int] = None) -> List[Cycle]:
        return sorted(c[0] for c, w in zip(self.cubes, self.weights)
                      if not c[1] and (n is None or w <= n))

    def counts(self, n: int) -> List[int]:
        out = [0] * (self.s + 1)
        for c, w in zip(self.cubes, self.weights):
            if w <= n:
                out[len(c[1])] += 1
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        return out

    def sublevel(self, n: int) -> List[int]:
        return [i for i, w in enumerate(self.weights) if w <= n]

    def dump(self, levels: Optional[Iterable[int]] = None, with_points: bool = True) -> str:
        """Diagnostic text: per level the cube counts and lattice points."""
        lines = []
        if self.m_w is None:
            return "empty\n"
        for n in (levels if levels is not None else range(self.m_w, self.n_max + 1)):
            cnt = self.counts(n)
            lines.append(f"level {n}: " + " ".join(f"q{q}={c}" for q, c in enumerate(cnt)))
            if with_points:
                for p in self.points(n):
                    lines.append("  (" + ",".join(map(str, p)) + ")")
        return "\n".join(lines) + "\n"


def enumerate_points(ws: WeightSystem, region: Region, n_max: int,
                     budget: int = DEFAULT_BUDGET) -> Dict[Cycle, int]:
    """All lattice points of the region with chi_k <= n_max, exactly."""
    q = ws.lat.chi_form(ws.k)
    try:
        found = q.points_with_values(n_max, region.lower, region.upper, budget)
    except EnumerationBudgetExceeded as exc:
        raise RegionError(str(exc)) from None
    out = {}
    for p, v in found:
        out[p] = int(v)
        ws._cache[p] = int(v)
    return out


def build_complex(points: Dict[Cycle, int], s: int, n_max: int, region: Region,
                  w1=None, qmax: Optional[int] = None, budget: int = DEFAULT_BUDGET) -> FilteredCubeComplex:
    """Cubes with all vertices in ``points`` and weight <= n_max.

    ``w1(l, j)`` gives segment weights; by default the max of the endpoint
    weights.  Higher cubes take the max over their facets, which equals the
    max over their edges.  ``qmax`` bounds the dimension (cubes of dimension
    qmax + 1 are still built so that H^qmax is exact).
    """
    top = s if qmax is None else min(s, qmax + 1)
    layers: List[Dict[Cube, int]] = [{(p, ()): w for p, w in points.items()}]
    total = len(points)
    if top >= 1:
        seg: Dict[Cube, int] = {}
        for p, w in points.items():
            for j in range(s):
                pj = p[:j] + (p[j] + 1,) + p[j + 1:]
                wj = points.get(pj)
                if wj is None:
                    continue
                ww = w1(p, j) if w1 is not None else (w if w > wj else wj)
                if ww <= n_max:
                    seg[(p, (j,))] = ww
        layers.append(seg)
        total += len(seg)
    for q in range(2, top + 1):
        prev = layers[-1]
        cur: Dict[Cube, int] = {}
        for (b, dirs), w in prev.items():
            i = dirs[0]
            for j in range(dirs[-1] + 1, s):
                bj = b[:j] + (b[j] + 1,) + b[j + 1:]
                w2 = prev.get((bj, dirs))
                if w2 is None:
                    continue
                rest = dirs[1:] + (j,)
                w3 = prev.get((b, rest))
                bi = b[:i] + (b[i] + 1,) + b[i + 1:]
                w4 = prev.get((bi, rest))
                if w3 is None or w4 is None:
                    continue
                ww = max(w, w2, w3, w4)
                if ww <= n_max:
                    cur[(b, dirs + (j,))] = ww
        if not cur:
            break
        layers.append(cur)
        total += len(cur)
        if total > budget:
            raise RegionError(f"more than {budget} cubes")
    items = [(w, len(c[1]), c[0], c[1]) for layer in layers for c, w in layer.items()]
    items.sort()
    return FilteredCubeComplex(s, n_max, [(b, d) for _, _, b, d in items], [w for w, *_ in items], region)


def enumerate_sublevel(ws: WeightSystem, region: Region, n_max: int, qmax: Optional[int] = None,
                       budget: int = DEFAULT_BUDGET) -> FilteredCubeComplex:
    pts = enumerate_points(ws, region, n_max, budget)
    if not pts:
        raise RegionError(f"no lattice point of weight <= {n_max} in the region")
    w1 = ws.w1 if ws.has_genus else None
    return build_complex(pts, ws.lat.s, n_max, region, w1=w1, qmax=qmax, budget=budget)
