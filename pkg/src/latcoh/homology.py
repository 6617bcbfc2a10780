"""Homology of filtered cube complexes and graded Z[U]-modules.

Persistence is computed homologically over GF(p) for a large prime p (a
stand-in for Q); integral data per level comes from sparse elimination with
unit pivots followed by a dense Smith normal form of what is left.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cubes import FilteredCubeComplex
from .linalg import smith_normal_form

PRIME = 2_147_483_647
INF = None


class ModuleError(ValueError):
    """Barcode does not have the shape of a lattice cohomology module."""


# ---------------------------------------------------------------- persistence

@dataclass
class Barcode:
    """Intervals [birth, death) per degree q; death None means infinite."""

    bars: Dict[int, List[Tuple[int, Optional[int]]]]
    qmax: int
    generators: Dict[int, List[int]] = field(default_factory=dict, repr=False)  # birth cube per bar

    def alive(self, q: int, n: int) -> int:
        return sum(1 for b, d in self.bars.get(q, []) if b <= n and (d is None or n < d))

    def finite(self, q: int) -> List[Tuple[int, int]]:
        return [(b, d) for b, d in self.bars.get(q, []) if d is not None]

    def infinite(self, q: int) -> List[int]:
        return [b for b, d in self.bars.get(q, []) if d is None]

    def to_dict(self) -> dict:
        return {str(q): [[b, d] for b, d in sorted(v, key=_bar_key)] for q, v in sorted(self.bars.items())}


def _bar_key(bar):
    b, d = bar
    return (b, float("inf") if d is None else d)


def persistence(cx: FilteredCubeComplex, qmax: Optional[int] = None) -> Barcode:
    """Persistence pairs of the sublevel filtration, by column reduction with clearing."""
    n = len(cx.cubes)
    dims = [len(c[1]) for c in cx.cubes]
    top = max(dims) if dims else 0
    if qmax is None:
        qmax = top
    p = PRIME
    by_dim: Dict[int, List[int]] = defaultdict(list)
    for i, d in enumerate(dims):
        by_dim[d].append(i)
    cleared = set()
    low_to_col: Dict[int, int] = {}
    reduced: Dict[int, Dict[int, int]] = {}
    pairs: Dict[int, int] = {}            # birth index -> death index
    for d in range(min(top, qmax + 1), 0, -1):
        for j in by_dim[d]:
            if j in cleared:
                continue
            col: Dict[int, int] = {}
            for i, sgn in cx.boundary(j):
                v = (col.get(i, 0) + sgn) % p
                if v:
                    col[i] = v
                else:
                    col.pop(i, None)
            while col:
                low = max(col)
                other = low_to_col.get(low)
                if other is None:
                    break
                ocol = reduced[other]
                f = col[low] * pow(ocol[low], p - 2, p) % p
                for i, v in ocol.items():
                    nv = (col.get(i, 0) - f * v) % p
                    if nv:
                        col[i] = nv
                    else:
                        col.pop(i, None)
            if col:
                low = max(col)
                low_to_col[low] = j
                reduced[j] = col
                pairs[low] = j
                cleared.add(low)
    bars: Dict[int, List[Tuple[int, Optional[int]]]] = defaultdict(list)
    gens: Dict[int, List[int]] = defaultdict(list)
    deaths = set(pairs.values())
    for i in range(n):
        d = dims[i]
        if d > qmax or i in deaths:
            continue
        if i in pairs:
            wb, wd = cx.weights[i], cx.weights[pairs[i]]
            if wd > wb:
                bars[d].append((wb, wd))
                gens[d].append(i)
        elif i not in reduced:
            bars[d].append((cx.weights[i], None))
            gens[d].append(i)
    for q in range(qmax + 1):
        bars.setdefault(q, [])
    return Barcode(dict(bars), qmax, dict(gens))


def zero_persistence(cx: FilteredCubeComplex) -> Barcode:
    """Degree 0 bars only, by union-find with the elder rule."""
    parent: Dict[int, int] = {}
    birth: Dict[int, int] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    bars: List[Tuple[int, Optional[int]]] = []
    gens: List[int] = []
    for i, (c, w) in enumerate(zip(cx.cubes, cx.weights)):
        d = len(c[1])
        if d == 0:
            parent[i] = i
            birth[i] = i
        elif d == 1:
            a, b = [f for f, _ in cx.boundary(i)]
            ra, rb = find(a), find(b)
            if ra == rb:
                continue
            # the younger component (later birth in filtration order) dies
            if birth[ra] > birth[rb]:
                ra, rb = rb, ra
            young = birth[rb]
            if cx.weights[young] < w:
                bars.append((cx.weights[young], w))
                gens.append(young)
            parent[rb] = ra
    for r in {find(x) for x in parent}:
        bars.append((cx.weights[birth[r]], None))
        gens.append(birth[r])
    return Barcode({0: bars}, 0, {0: gens})


# ---------------------------------------------------------------- integral homology per level

@dataclass
class LevelHomology:
    level: int
    betti: List[int]                    # free rank of H_q(S_n; Z) = of H^q
    torsion: Dict[int, List[int]]       # homology torsion coefficients per q
    cohomology_torsion: Dict[int, List[int]]

    @property
    def reduced_betti(self) -> List[int]:
        b = list(self.betti)
        if b:
            b[0] -= 1
        return b

    @property
    def has_torsion(self) -> bool:
        return any(self.torsion.values())


def elementary_divisors(cols: List[Dict[int, int]]) -> Tuple[int, List[int]]:
    """Rank and the elementary divisors > 1 of a sparse integer matrix given by columns."""
    cols = [dict(c) for c in cols if c]
    rows: Dict[int, set] = defaultdict(set)
    for ci, c in enumerate(cols):
        for r in c:
            rows[r].add(ci)
    alive = set(range(len(cols)))
    rank = 0
    progress = True
    while progress:
        progress = False
        for ci in sorted(alive, key=lambda c: len(cols[c])):
            if ci not in alive:
                continue
            col = cols[ci]
            if not col:
                alive.discard(ci)
                continue
            piv = None
            best = None
            for r, v in col.items():
                if v in (1, -1):
                    sz = len(rows[r])
                    if best is None or sz < best:
                        piv, best = r, sz
            if piv is None:
                continue
            pv = col[piv]
            for cj in list(rows[piv]):
                if cj == ci:
                    continue
                other = cols[cj]
                f = other[piv] * pv          # pv = +-1 so this divides exactly
                for r, v in col.items():
                    nv = other.get(r, 0) - f * v
                    if nv:
                        if r not in other:
                            rows[r].add(cj)
                        other[r] = nv
                    else:
                        if r in other:
                            del other[r]
                            rows[r].discard(cj)
                if not other:
                    alive.discard(cj)
            for r in col:
                rows[r].discard(ci)
            rows.pop(piv, None)
            cols[ci] = {}
            alive.discard(ci)
            rank += 1
            progress = True
    rest = [cols[c] for c in sorted(alive) if cols[c]]
    if not rest:
        return rank, []
    rlist = sorted({r for c in rest for r in c})
    ridx = {r: i for i, r in enumerate(rlist)}
    dense = [[0] * len(rest) for _ in rlist]
    for j, c in enumerate(rest):
        for r, v in c.items():
            dense[ridx[r]][j] = v
    d, _, _ = smith_normal_form(dense)
    divs = [abs(d[i][i]) for i in range(min(len(rlist), len(rest))) if d[i][i]]
    return rank + len(divs), [x for x in divs if x > 1]


def level_homology(cx: FilteredCubeComplex, n: int, qmax: Optional[int] = None) -> LevelHomology:
    if n > cx.n_max:
        raise ValueError(f"level {n} is beyond the computed cap {cx.n_max}")
    members = cx.sublevel(n)
    by_dim: Dict[int, List[int]] = defaultdict(list)
    for i in members:
        by_dim[cx.dim(i)].append(i)
    top = max(by_dim) if by_dim else -1
    if qmax is None:
        qmax = top
    ranks: Dict[int, int] = {}
    divs: Dict[int, List[int]] = {}
    for d in range(1, min(top, qmax + 1) + 1):
        cols = []
        for j in by_dim[d]:
            col = {}
            for i, sgn in cx.boundary(j):
                col[i] = col.get(i, 0) + sgn
            cols.append({i: v for i, v in col.items() if v})
        ranks[d], divs[d] = elementary_divisors(cols)
    betti, tors = [], {}
    for q in range(0, min(top, qmax) + 1):
        b = len(by_dim[q]) - ranks.get(q, 0) - ranks.get(q + 1, 0)
        betti.append(b)
        tors[q] = divs.get(q + 1, [])
    cotors = {q: tors.get(q - 1, []) for q in range(len(betti))}
    return LevelHomology(n, betti, tors, cotors)


def level_table(cx: FilteredCubeComplex, qmax: Optional[int] = None) -> List[LevelHomology]:
    if cx.m_w is None:
        return []
    return [level_homology(cx, n, qmax) for n in range(cx.m_w, cx.n_max + 1)]


# ---------------------------------------------------------------- Z[U]-modules

@dataclass(frozen=True)
class ZUModule:
    """Direct sum of T^+_{2a} (q = 0) and T_{2b}(m) summands, per degree q.

    ``terms`` holds ``(q, degree, length, multiplicity)`` with length None for T^+.
    """

    terms: Tuple[Tuple[int, int, Optional[int], int], ...]

    @staticmethod
    def build(counter: Dict[Tuple[int, int, Optional[int]], int]) -> "ZUModule":
        items = [(q, d, ln, m) for (q, d, ln), m in counter.items() if m]
        items.sort(key=lambda t: (t[0], t[2] is not None, t[1], t[2] or 0))
        return ZUModule(tuple(items))

    def counter(self) -> Counter:
        return Counter({(q, d, ln): m for q, d, ln, m in self.terms})

    @property
    def tower(self) -> Optional[int]:
        """Degree 2 m_k of the T^+ summand."""
        for q, d, ln, m in self.terms:
            if q == 0 and ln is None:
                return d
        return None

    @property
    def m(self) -> Optional[int]:
        return None if self.tower is None else self.tower // 2

    def degrees(self) -> List[int]:
        return sorted({q for q, *_ in self.terms})

    def rank_reduced(self, q: int) -> int:
        return sum(ln * m for qq, _, ln, m in self.terms if qq == q and ln is not None)

    def reduced(self, q: int) -> "ZUModule":
        return ZUModule(tuple(t for t in self.terms if t[0] == q and t[2] is not None))

    def part(self, q: int) -> "ZUModule":
        return ZUModule(tuple(t for t in self.terms if t[0] == q))

    def is_reduced_zero(self) -> bool:
        return all(t[2] is None for t in self.terms)

    def shifted(self, by: int) -> "ZUModule":
        """Degree shift M[by]: every summand moves to degree d + by."""
        return ZUModule(tuple((q, d + by, ln, m) for q, d, ln, m in self.terms))

    def normalized(self) -> "ZUModule":
        t = self.tower
        return self if t is None else self.shifted(-t)

    def eu0(self) -> int:
        return -self.m + self.rank_reduced(0)

    def eu_star(self) -> int:
        return -self.m + sum((-1) ** q * self.rank_reduced(q) for q in self.degrees())

    # -- serialisation ---------------------------------------------------------
    def text(self, q: Optional[int] = None) -> str:
        qs = [q] if q is not None else self.degrees()
        chunks = []
        for qq in qs:
            parts = []
            for t in self.terms:
                if t[0] != qq:
                    continue
                _, d, ln, m = t
                s = f"T+[{d}]" if ln is None else f"T[{d}]({ln})"
                if m != 1:
                    s += f"^{m}"
                parts.append(s)
            body = " (+) ".join(parts) if parts else "0"
            chunks.append(body if q is not None else f"H^{qq}: {body}")
        return "; ".join(chunks) if chunks else "0"

    def to_dict(self) -> dict:
        out: Dict[str, list] = {}
        for q, d, ln, m in self.terms:
            out.setdefault(str(q), []).append(
                {"birth_degree": d, "length": "inf" if ln is None else ln, "mult": m})
        return out

    @staticmethod
    def from_dict(data: dict) -> "ZUModule":
        c = {}
        for q, items in data.items():
            for it in items:
                ln = None if it["length"] == "inf" else int(it["length"])
                c[(int(q), int(it["birth_degree"]), ln)] = int(it["mult"])
        return ZUModule.build(c)

    @staticmethod
    def parse(text: str) -> "ZUModule":
        """Inverse of :meth:`text` for the ``H^q: ...; H^q: ...`` form."""
        import re

        c: Counter = Counter()
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            head, body = chunk.split(":", 1)
            q = int(head.strip()[2:])
            for term in body.split("(+)"):
                term = term.strip()
                if term == "0":
                    continue
                mt = re.fullmatch(r"T(\+?)\[(-?\d+)\](?:\((\d+)\))?(?:\^(\d+))?", term)
                if not mt:
                    raise ValueError(f"cannot parse summand {term!r}")
                ln = None if mt.group(1) else int(mt.group(3))
                c[(q, int(mt.group(2)), ln)] += int(mt.group(4) or 1)
        return ZUModule.build(c)


def module_decomposition(bc: Barcode, strict: bool = True) -> ZUModule:
    """Translate bars to summands: [a, inf) -> T^+_{2a}, [b, b+m) -> T_{2b}(m)."""
    c: Counter = Counter()
    for q, bars in bc.bars.items():
        infs = [b for b, d in bars if d is None]
        if strict and q == 0 and len(infs) != 1:
            raise ModuleError(f"{len(infs)} infinite bars in degree 0; the region is not stabilized")
        if strict and q > 0 and infs:
            raise ModuleError(f"infinite bar in degree {q}; the region is not stabilized")
        for b, d in bars:
            c[(q, 2 * b, None if d is None else d - b)] += 1
    return ZUModule.build(c)


def eu0(m: ZUModule) -> int:
    return m.eu0()


def eu_star(m: ZUModule) -> int:
    return m.eu_star()


def compare_modules(a: ZUModule, b: ZUModule, allow_shift: bool = False) -> bool:
    if not allow_shift:
        return a.counter() == b.counter()
    if a.tower is not None and b.tower is not None:
        return a.normalized().counter() == b.normalized().counter()
    da = min((t[1] for t in a.terms), default=0)
    db = min((t[1] for t in b.terms), default=0)
    return a.shifted(-da).counter() == b.shifted(-db).counter()


# ---------------------------------------------------------------- graded root

@dataclass
class GradedRoot:
    """Components of S_n per level, and the maps S_n -> S_{n+1}."""

    levels: Dict[int, List[Tuple[Tuple[int, ...], int]]]   # n -> [(representative point, size)]
    edges: List[Tuple[int, Tuple[int, ...], Tuple[int, ...]]]  # (n, rep at n, rep at n+1)
    members: Dict[int, Dict[Tuple[int, ...], List[Tuple[int, ...]]]] = field(repr=False, default_factory=dict)

    def component_of(self, n: int, point) -> Optional[Tuple[int, ...]]:
        for rep, pts in self.members.get(n, {}).items():
            if tuple(point) in pts:
                return rep
        return None

    def leaves(self) -> List[Tuple[int, Tuple[int, ...]]]:
        targets = {(n + 1, b) for n, _, b in self.edges}
        out = []
        for n, comps in self.levels.items():
            for rep, _ in comps:
                if (n, rep) not in targets:
                    out.append((n, rep))
        return sorted(out)

    def bars(self) -> List[Tuple[int, Optional[int]]]:
        """q = 0 bars by the elder rule on the merge tree."""
        out = []
        ns = sorted(self.levels)
        # walk up: a component at n+1 inherits the oldest birth of its preimages
        current = {}
        for n in ns:
            nxt = {}
            for rep, _ in self.levels[n]:
                pre = self._preimages.get((n, rep), [])
                if not pre:
                    nxt[rep] = n
                    continue
                births = sorted(current[r] for r in pre)
                nxt[rep] = births[0]
                out += [(b, n) for b in births[1:] if b < n]
            current = nxt
        out += [(b, None) for b in current.values()]
        return sorted(out, key=_bar_key)

    @property
    def _preimages(self):
        pre = defaultdict(list)
        for n, a, b in self.edges:
            pre[(n + 1, b)].append(a)
        return pre



def graded_root(cx: FilteredCubeComplex, keep_members: bool = True) -> GradedRoot:
    pts = {c[0]: w for c, w in zip(cx.cubes, cx.weights) if not c[1]}
    segs = [(w, c[0], c[1][0]) for c, w in zip(cx.cubes, cx.weights) if len(c[1]) == 1]
    parent: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
    key = {p: (w, p) for p, w in pts.items()}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra == rb:
            return
        if key[ra] <= key[rb]:
            parent[rb] = ra
        else:
            parent[ra] = rb

    if not pts:
        return GradedRoot({}, [])
    lo, hi = cx.m_w, cx.n_max
    by_level_pts = defaultdict(list)
    for p, w in pts.items():
        by_level_pts[w].append(p)
    by_level_segs = defaultdict(list)
    for w, b, j in segs:
        by_level_segs[w].append((b, b[:j] + (b[j] + 1,) + b[j + 1:]))
    levels, edges, members = {}, [], {}
    prev_reps: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
    for n in range(lo, hi + 1):
        for p in by_level_pts.get(n, []):
            parent[p] = p
        for a, b in by_level_segs.get(n, []):
            union(a, b)
        comps = defaultdict(list)
        for p in parent:
            comps[find(p)].append(p)
        levels[n] = sorted((r, len(v)) for r, v in comps.items())
        if keep_members:
            members[n] = {r: set(v) for r, v in comps.items()}
        for r_old in prev_reps:
            edges.append((n - 1, r_old, find(r_old)))
        prev_reps = {r: r for r in comps}
    return GradedRoot(levels, edges, members)
