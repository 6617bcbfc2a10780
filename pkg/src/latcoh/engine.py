"""Lattice cohomology of (Gamma, k): choose a complex, pick n_max, run persistence."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .cubes import (DEFAULT_BUDGET, FilteredCubeComplex, RegionError, WeightSystem, build_region,
                    enumerate_sublevel)
from .homology import Barcode, ZUModule, module_decomposition, persistence, zero_persistence
from .lattice import Lattice
from .reduction import ReductionUnavailable, reduced_complex, reduced_system

log = logging.getLogger(__name__)

MARGIN = 2
MAX_EXTRA_LEVELS = 40


@dataclass
class CohomologyResult:
    k: tuple
    m_k: int
    n_max: int
    stable_level: int
    engine: str                       # full | reduced
    module: ZUModule
    barcode: Barcode
    complex: FilteredCubeComplex = field(repr=False)
    qmax: int = 0
    reduced_on: Optional[List[str]] = None
    notes: List[str] = field(default_factory=list)


def _stable_level(bc: Barcode, m: int) -> int:
    last = m
    for q, bars in bc.bars.items():
        for b, d in bars:
            if d is not None:
                last = max(last, d)
            elif not (q == 0 and b == m):
                last = max(last, b + 1)
    return last


def _settled(bc: Barcode, m: int, n_max: int, margin: int) -> bool:
    infinite = [(q, b) for q, bars in bc.bars.items() for b, d in bars if d is None]
    if infinite != [(0, m)]:
        return False
    return n_max >= _stable_level(bc, m) + margin


def choose_engine(lat: Lattice, k: Sequence, engine: str, region: str) -> str:
    if engine in ("full", "reduced"):
        return engine
    if region not in ("auto", "effective"):
        return "full"
    try:
        rs = reduced_system(lat, k)
    except ReductionUnavailable:
        return "full"
    return "reduced" if rs.nu < lat.s else "full"


def lattice_cohomology(lat: Lattice, k: Sequence, qmax: Optional[int] = None, n_max: Optional[int] = None,
                       region: str = "auto", box=None, engine: str = "auto", margin: int = MARGIN,
                       budget: int = DEFAULT_BUDGET) -> CohomologyResult:
    """H^*(Gamma, k) as a graded Z[U]-module.

    Without ``n_max`` the cap grows until every bar but the tower has died and
    ``margin`` further levels have been seen.  ``engine`` is ``full``,
    ``reduced`` or ``auto`` (reduced when available and smaller).
    """
    k = tuple(k)
    eng = choose_engine(lat, k, engine, region)
    if eng == "reduced":
        rs = reduced_system(lat, k)
        dim = rs.nu
        m_k, _ = lat.min_chi(k, scope="effective")
        reg = None

        def build(n):
            return reduced_complex(rs, n, qmax=qmax, budget=budget)
        reduced_on = [lat.graph.ids[v] for v in rs.bad]
    else:
        ws = WeightSystem(lat, k)
        reg = build_region(lat, k, region, box)
        dim = lat.s
        scope = "effective" if reg.kind == "effective" else "full"
        if reg.kind == "box":
            m_k, _ = lat.chi_form(k).minimize(lower=reg.lower, upper=reg.upper)
            m_k = int(m_k)
        else:
            m_k, _ = lat.min_chi(k, scope=scope)

        def build(n):
            return enumerate_sublevel(ws, reg, n, qmax=qmax, budget=budget)
        reduced_on = None
    q_eff = dim - 1 if qmax is None else min(qmax, dim - 1)
    q_eff = max(q_eff, 0)
    notes = []

    def bars(cx):
        return zero_persistence(cx) if q_eff == 0 else persistence(cx, qmax=q_eff)
    if n_max is not None:
        cx = build(n_max)
        bc = bars(cx)
        if not _settled(bc, m_k, n_max, 0):
            notes.append(f"n_max={n_max} does not reach the stable range")
    else:
        n = m_k + margin
        while True:
            cx = build(n)
            bc = bars(cx)
            if _settled(bc, m_k, n, margin):
                break
            target = max(n + 1, _stable_level(bc, m_k) + margin)
            if target > m_k + MAX_EXTRA_LEVELS:
                raise RegionError(f"no stabilization below level {m_k + MAX_EXTRA_LEVELS}")
            log.info("raising n_max from %d to %d", n, target)
            n = target
        n_max = n
    truncated = bool(notes)
    if reg is not None and reg.kind == "box":
        notes.append("box region: bars alive at the cap are reported as computed")
        truncated = True
    module = module_decomposition(bc, strict=not truncated)
    return CohomologyResult(k, m_k, n_max, _stable_level(bc, m_k), eng, module, bc, cx, q_eff,
                            reduced_on, notes)
