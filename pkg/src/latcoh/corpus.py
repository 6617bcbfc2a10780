"""Bundled example graphs and externally supplied Seiberg-Witten values."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Optional, Tuple

from .graph import PlumbingGraph, parse_graph

RATIONAL = ("a1", "a3", "a5", "chain_325", "d4", "e8", "tree_rat", "star_235")
ALMOST_RATIONAL = RATIONAL + ("x2y3z7", "star_334", "star_2311", "star_four")
ELLIPTIC = ("el4", "el5", "x2y3z7", "star_334", "star_2311", "star_four")
NON_AR = ("nv1", "c4", "pu5")


def _data():
    return resources.files("latcoh") / "data"


def graph_names() -> List[str]:
    return sorted(p.name[:-6] for p in (_data() / "graphs").iterdir() if p.name.endswith(".graph"))


def load_graph(name: str) -> PlumbingGraph:
    path = _data() / "graphs" / f"{name}.graph"
    if not path.is_file():
        raise KeyError(f"no bundled graph named {name!r}")
    return parse_graph(path.read_text(), name)


@dataclass
class SWValue:
    """sw(M,[k]) for one orbit; exactly one of sw, casson, rhs is the given datum."""

    graph: str
    digest: str
    orbit: int
    sw: Optional[Fraction] = None
    casson: Optional[Fraction] = None
    rhs: Optional[Fraction] = None
    source: str = ""
    note: str = ""

    def sw_value(self, k_square_plus_s: Fraction) -> Fraction:
        if self.sw is not None:
            return self.sw
        if self.casson is not None:
            return self.casson
        return -self.rhs - Fraction(k_square_plus_s) / 8


class SWTable:
    def __init__(self, entries: List[SWValue], closed_forms: Optional[Dict[str, str]] = None):
        self.entries = entries
        self.closed_forms = closed_forms or {}
        self._by_key: Dict[Tuple[str, int], SWValue] = {(e.digest, e.orbit): e for e in entries}

    def get(self, digest: str, orbit: int) -> Optional[SWValue]:
        return self._by_key.get((digest, orbit))

    @classmethod
    def from_json(cls, text: str) -> "SWTable":
        data = json.loads(text)
        out = []
        for e in data.get("entries", []):
            given = [key for key in ("sw", "casson", "rhs") if key in e]
            if len(given) != 1:
                raise ValueError(f"sw entry for {e.get('graph')!r} needs exactly one of sw, casson, rhs")
            out.append(SWValue(e.get("graph", ""), e["digest"], int(e.get("orbit", 0)),
                               **{given[0]: Fraction(e[given[0]])},
                               source=e.get("source", ""), note=e.get("note", "")))
        return cls(out, data.get("closed_forms"))


def bundled_sw() -> SWTable:
    return SWTable.from_json((_data() / "sw_values.json").read_text())
