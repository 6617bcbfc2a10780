"""Laufer-type computation sequences and the classification of graphs."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .graph import GraphError, PlumbingGraph, cycle_rank
from .lattice import SWEEP_LIMIT, Cycle, Lattice, sub

Sequence_ = List[Cycle]


def artin_cycle(lat: Lattice, order: Optional[Sequence[int]] = None) -> Tuple[Cycle, Sequence_]:
    """Artin's fundamental cycle with its Laufer sequence.

    ``order`` is the vertex preference used for tie-breaks (default: index order).
    """
    s = lat.s
    order = list(order) if order is not None else list(range(s))
    x = [0] * s
    x[order[0]] = 1
    seq = [tuple(x)]
    for _ in range(SWEEP_LIMIT):
        j = next((j for j in order if lat.pair_basis(x, j) > 0), None)
        if j is None:
            return tuple(x), seq
        x[j] += 1
        seq.append(tuple(x))
    raise RuntimeError("Laufer sequence did not terminate")


def generalized_laufer(lat: Lattice, lp: Sequence, start: Optional[Sequence[int]] = None,
                       order: Optional[Sequence[int]] = None):
    """Minimal l >= start with lp - l nef.

    Returns ``(l, sequence, e)`` where ``e = lp - l``.
    """
    s = lat.s
    order = list(order) if order is not None else list(range(s))
    x = list(start) if start is not None else [0] * s
    seq = [tuple(x)]
    for _ in range(SWEEP_LIMIT):
        y = sub(lp, x)
        j = next((j for j in order if lat.pair_basis(y, j) < 0), None)
        if j is None:
            return tuple(x), seq, tuple(Fraction(v) for v in y)
        x[j] += 1
        seq.append(tuple(x))
    raise RuntimeError("generalized Laufer sequence did not terminate")


@dataclass
class Classification:
    kind: str                      # rational | elliptic | other
    min_chi_effective: int         # min of chi_K over L_e \ 0
    z_min: Cycle
    chi_z_min: int
    minimally_elliptic: bool
    numerically_gorenstein: bool
    z_min_is_minus_k: bool
    laufer_minimal: bool           # chi(Z_min) = 0 and chi > 0 below Z_min
    elliptic_length: Optional[int] = None
    argmins: List[Cycle] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "min_chi_effective": self.min_chi_effective,
            "z_min": list(self.z_min),
            "chi_z_min": self.chi_z_min,
            "minimally_elliptic": self.minimally_elliptic,
            "numerically_gorenstein": self.numerically_gorenstein,
            "z_min_is_minus_k": self.z_min_is_minus_k,
            "laufer_minimal": self.laufer_minimal,
            "elliptic_length": self.elliptic_length,
        }


def is_rational(lat: Lattice) -> bool:
    z, _ = artin_cycle(lat)
    return lat.chi(lat.K, z) == 1


def classify(lat: Lattice) -> Classification:
    z, _ = artin_cycle(lat)
    chi_z = lat.chi(lat.K, z)
    m, pts = lat.min_chi(lat.K, scope="effective", exclude_zero=True)
    if chi_z == 1:
        kind = "rational"
    elif m == 0:
        kind = "elliptic"
    else:
        kind = "other"
    gor = lat.K_integral
    zk = gor and tuple(-x for x in lat.K) == tuple(z)
    ell = zero_level_components(lat) - 1 if kind == "elliptic" else None
    return Classification(kind, m, z, chi_z, ell == 1, gor, bool(zk), laufer_minimal(lat, z), ell, pts)


def zero_level_components(lat: Lattice) -> int:
    """Connected components of {chi_K <= 0} inside the effective orthant.

    Segments count with their genus-corrected weight.  For an elliptic graph the
    number is l + 1 where l - 1 is the length of the elliptic sequence.
    """
    from .cubes import genus_correction

    pts = lat.chi_form(lat.K).points_with_values(0, lower=[0] * lat.s)
    val = {p: v for p, v in pts}
    parent = {p: p for p in val}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    genera = lat.graph.genera
    for p, v in val.items():
        for j in range(lat.s):
            q = p[:j] + (p[j] + 1,) + p[j + 1:]
            if q in val and max(v, val[q]) + genus_correction(genera[j], abs(v - val[q])) <= 0:
                parent[find(p)] = find(q)
    return len({find(p) for p in val})


def laufer_minimal(lat: Lattice, z: Optional[Cycle] = None) -> bool:
    """Laufer's criterion: chi(Z_min) = 0 and chi > 0 on every 0 < D < Z_min.

    On a minimal graph this is equivalent to Z_min = -K; unlike that identity it
    also recognises non-minimal good resolution graphs.
    """
    if z is None:
        z, _ = artin_cycle(lat)
    if lat.chi(lat.K, z) != 0:
        return False
    zero = tuple([0] * lat.s)
    if sum(z) == 1:
        return True
    m, _ = lat.chi_form(lat.K).minimize(lower=[0] * lat.s, upper=list(z), exclude=[zero, tuple(z)])
    return m > 0


@dataclass
class AlmostRationalResult:
    status: str                    # "true" | "false" | "undetermined"
    witness: Optional[str] = None  # vertex id
    lowered_euler: Optional[int] = None
    reason: str = ""

    @property
    def value(self) -> Optional[bool]:
        return {"true": True, "false": False}.get(self.status)


def ar_refutation(g: PlumbingGraph) -> List[str]:
    """Vertices with -e_j + 2 <= valency; two or more of them rule out almost rationality."""
    return [v.id for v in g.vertices if -v.euler + 2 <= g.degree(v.id)]


def is_almost_rational(g: PlumbingGraph) -> AlmostRationalResult:
    cr = cycle_rank(g)
    if cr.c + cr.genus > 0:
        raise GraphError("almost rationality is defined only for trees of rational curves")
    if is_rational(Lattice(g)):
        return AlmostRationalResult("true", g.ids[0], g.eulers[0], "graph is rational")
    bad = ar_refutation(g)
    if len(bad) >= 2:
        return AlmostRationalResult("false", reason=f"vertices {', '.join(bad)} have -e+2 <= valency")
    bound = -(1 + sum(abs(e) for e in g.eulers) + g.s ** 2)
    # try the vertex failing the valency test first; it is the likely witness
    first = [g.index(b) for b in bad]
    candidates = first + [j for j in range(g.s) if j not in first]
    for j0 in candidates:
        e = g.eulers[j0]
        while e > bound:
            e -= 1
            if is_rational(Lattice(g.with_euler(j0, e))):
                return AlmostRationalResult("true", g.ids[j0], e)
    return AlmostRationalResult("undetermined", reason=f"no witness with Euler number >= {bound}")


def rational_matrix(I, genera) -> bool:
    """chi_K(Z_min) == 1, using only the intersection matrix."""
    s = len(I)
    x = [0] * s
    x[0] = 1
    for _ in range(SWEEP_LIMIT):
        j = next((j for j in range(s) if sum(I[j][i] * x[i] for i in range(s)) > 0), None)
        if j is None:
            break
        x[j] += 1
    zz = sum(x[i] * I[i][j] * x[j] for i in range(s) for j in range(s))
    zk = sum(x[j] * (-I[j][j] - 2 + 2 * genera[j]) for j in range(s))
    return -(zz + zk) == 2


@lru_cache(maxsize=64)
def bad_vertex_set(g: PlumbingGraph, max_size: Optional[int] = None) -> Optional[Tuple[int, ...]]:
    """A smallest vertex set whose Euler numbers, lowered enough, make the graph rational.

    Returns None for graphs with cycles or positive genus (never rational).
    """
    from itertools import combinations

    from .graph import intersection_matrix

    cr = cycle_rank(g)
    if cr.c + cr.genus > 0:
        return None
    base = [list(r) for r in intersection_matrix(g)]
    genera = g.genera
    if rational_matrix(base, genera):
        return ()
    low = -(1 + sum(abs(e) for e in g.eulers) + g.s ** 2)

    def works(combo):
        m = [list(r) for r in base]
        for j in combo:
            m[j][j] = low
        return rational_matrix(m, genera)

    limit = g.s if max_size is None else max_size
    suspects = [g.index(v) for v in ar_refutation(g)]
    for size in range(1, limit + 1):
        # combinations of suspicious vertices first; they are the usual answer
        first = [c for c in combinations(suspects, size)]
        rest = (c for c in combinations(range(g.s), size) if not set(c) <= set(suspects))
        for combo in first:
            if works(combo):
                return combo
        for combo in rest:
            if works(combo):
                return combo
    return None


def h1_reduction(lat: Lattice, lp: Sequence) -> Tuple[Cycle, int]:
    """``(l_{l'}, correction)`` with correction = -(l', l) - chi_K(l)."""
    l, _, _ = generalized_laufer(lat, lp)
    corr = -Fraction(lat.pair(lp, l)) - Fraction(lat.chi(lat.K, l))
    if corr.denominator != 1:
        raise ArithmeticError("non-integral h^1 correction")
    return l, int(corr)


def h1_rational(lat: Lattice, lp: Sequence) -> int:
    if not is_rational(lat):
        raise GraphError("h^1 formula requires a rational graph")
    return h1_reduction(lat, lp)[1]
