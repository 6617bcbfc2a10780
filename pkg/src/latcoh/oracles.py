"""Brute-force reference computations used to cross-check the fast paths."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .cubes import FilteredCubeComplex, Region, build_complex
from .homology import Barcode, level_homology, zero_persistence
from .lattice import Lattice, add, to_cycle
from .laufer import generalized_laufer


@dataclass
class OracleResult:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'ok  ' if self.ok else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


def box_points(lo: Sequence[int], hi: Sequence[int]):
    return itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)])


def brute_min_chi(lat: Lattice, k: Sequence, bound: int, effective: bool = False):
    lo = [0 if effective else -bound] * lat.s
    best, arg = None, []
    for x in box_points(lo, [bound] * lat.s):
        v = lat.chi(k, x)
        if best is None or v < best:
            best, arg = v, [x]
        elif v == best:
            arg.append(x)
    return best, sorted(arg)


def pairing_table(lat: Lattice, bound: int) -> List[tuple]:
    """``(x, I x)`` for every x in [0, bound]^s."""
    return [(x, tuple(lat.pairings(x))) for x in box_points([0] * lat.s, [bound] * lat.s)]


def brute_generalized_laufer(lat: Lattice, lp: Sequence, bound: int = 12,
                             table: Optional[List[tuple]] = None) -> Optional[tuple]:
    """Componentwise minimum of all l in [0, bound]^s with l' - l nef, if it is itself admissible."""
    if table is None:
        table = pairing_table(lat, bound)
    p = lat.pairings(lp)
    good = [x for x, ix in table if all(a >= b for a, b in zip(p, ix))]
    if not good:
        return None
    m = tuple(min(col) for col in zip(*good))
    return m if m in set(good) else None


def brute_lift_antinef(lat: Lattice, lp: Sequence, bound: int = 6):
    """Least anti-nef element of l' + L inside the box base + [-bound, bound]^s."""
    base = lat.frac_part(lp)
    cands = []
    for x in box_points([-bound] * lat.s, [bound] * lat.s):
        y = add(base, x)
        if lat.is_antinef(y):
            cands.append(y)
    if not cands:
        return None
    m = tuple(min(col) for col in zip(*cands))
    return m if m in set(cands) else None


def antinef_lift_is_minimal(lat: Lattice, h: Sequence, limit: int = 200_000) -> Optional[bool]:
    """Exhaustive check that no anti-nef element of the class lies below lift_antinef(h).

    Anti-nef elements are effective, so the search runs over the box between
    the fractional representative and the lift.  None when the box exceeds
    ``limit`` points.
    """
    got = lat.lift_antinef(h)
    base = lat.frac_part(h)
    span = [int(g - b) for g, b in zip(got, base)]
    size = 1
    for t in span:
        size *= t + 1
    if size > limit:
        return None
    for x in box_points([0] * lat.s, span):
        y = add(base, x)
        if tuple(y) != tuple(got) and lat.is_antinef(y):
            return False
    return lat.is_antinef(got)


def alive_vs_betti(cx: FilteredCubeComplex, bc: Barcode, qmax: int) -> List[str]:
    """Mismatches between barcode alive-counts and per-level Smith normal form Betti numbers."""
    bad = []
    for n in range(cx.m_w, cx.n_max + 1):
        lh = level_homology(cx, n, qmax)
        for q in range(qmax + 1):
            b = lh.betti[q] if q < len(lh.betti) else 0
            if bc.alive(q, n) != b:
                bad.append(f"level {n}, q={q}: barcode {bc.alive(q, n)} vs SNF {b}")
    return bad


def run_oracles(lat: Lattice, box: int = 3, laufer_bound: int = 12, det_limit: int = 20,
                max_levels: int = 3) -> List[OracleResult]:
    from .engine import lattice_cohomology

    out = []
    s = lat.s
    k = lat.K
    if (2 * box + 1) ** s <= 200_000:
        m, pts = lat.min_chi(k, scope="full")
        bm, bpts = brute_min_chi(lat, k, box)
        out.append(OracleResult("min_chi vs box minimum", m <= bm and (m < bm or set(bpts) <= set(pts)),
                                f"exact {m}, box {bm}"))
        m_e, _ = lat.min_chi(k, scope="effective")
        bme, _ = brute_min_chi(lat, k, box, effective=True)
        out.append(OracleResult("effective min_chi vs box minimum", m_e <= bme, f"exact {m_e}, box {bme}"))
    if s <= 3:
        bad = []
        table = pairing_table(lat, laufer_bound)
        for h in lat.discriminant.reps:
            for shift in box_points([-1] * s, [1] * s):
                lp = add(h, shift)
                l, _, _ = generalized_laufer(lat, lp)
                ref = brute_generalized_laufer(lat, lp, laufer_bound, table)
                if ref is not None and tuple(l) != ref:
                    bad.append(f"{lp}: {l} vs {ref}")
        out.append(OracleResult("generalized Laufer vs brute force", not bad, "; ".join(bad[:3])))
    if abs(lat.det) <= det_limit and s <= 4:
        bad = []
        for h in lat.discriminant.reps:
            got = lat.lift_antinef(h)
            ref = brute_lift_antinef(lat, h)
            if ref is not None and tuple(got) != tuple(ref):
                bad.append(f"{h}: {got} vs {ref}")
        out.append(OracleResult("anti-nef lift vs class search", not bad, "; ".join(bad[:3])))
    for orb in lat.orbits[:4]:
        try:
            res = lattice_cohomology(lat, orb.k_r, qmax=min(2, s - 1), engine="full")
        except Exception as exc:          # resource limits only make the oracle inapplicable
            out.append(OracleResult(f"persistence vs SNF, orbit {orb.index}", True, f"skipped: {exc}"))
            continue
        top = min(res.complex.n_max, res.m_k + max_levels)
        cx = res.complex
        cx_cut = FilteredCubeComplex(cx.s, top, [c for c, w in zip(cx.cubes, cx.weights) if w <= top],
                                     [w for w in cx.weights if w <= top], cx.region)
        bad = alive_vs_betti(cx_cut, res.barcode, res.qmax)
        out.append(OracleResult(f"persistence vs SNF, orbit {orb.index}", not bad, "; ".join(bad[:3])))
    return out


def toy_weight(n: int) -> int:
    """w_0(n) = [|n|/2] + 4 {|n|/2} on Z."""
    a = abs(n)
    return a // 2 + (2 if a % 2 else 0)


def toy_bars_direct(levels: int) -> List[tuple]:
    """Finite bars of the s = 1 toy filtration by tracking intervals of Z level by level.

    Points with |n| <= 2 levels + 4 suffice: anything farther has weight > levels + 1.
    """
    span = range(-2 * levels - 4, 2 * levels + 5)
    born: dict = {}
    bars = []
    prev: List[tuple] = []
    for lev in range(0, levels + 2):
        alive = [n for n in span if toy_weight(n) <= lev]
        comps, run = [], []
        for n in alive:
            if run and n != run[-1] + 1:
                comps.append((run[0], run[-1]))
                run = []
            run.append(n)
        if run:
            comps.append((run[0], run[-1]))
        for c in comps:
            pre = [p for p in prev if c[0] <= p[0] and p[1] <= c[1]]
            if not pre:
                born[c] = lev
                continue
            births = sorted(born.pop(p) for p in pre)
            born[c] = births[0]
            bars += [(b, lev) for b in births[1:]]
        prev = comps
    return sorted(b for b in bars if b[0] <= levels)


def toy_bars_engine(levels: int) -> List[tuple]:
    pts = {(n,): toy_weight(n) for n in range(-2 * levels - 4, 2 * levels + 5) if toy_weight(n) <= levels + 1}
    cx = build_complex(pts, 1, levels + 1, Region("box", [-2 * levels - 4], [2 * levels + 4]))
    bars = zero_persistence(cx).bars[0]
    return sorted((b, d) for b, d in bars if d is not None and b <= levels)
