"""Arithmetic in L, L' and Char for a plumbing graph.

Cycles in L are tuples of ints, elements of L' tuples of Fractions, both in the
vertex order of the graph.  A characteristic element is stored as its L'
coordinates; ``c = I k`` is then an integer vector and on L

    chi_k(l) = -(l^T I l + c.l) / 2
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from .ellipsoid import QuadraticFunction
from .graph import PlumbingGraph, check_negative_definite, intersection_matrix
from .linalg import det_bareiss, inverse, matvec, smith_normal_form, solve

Cycle = Tuple[int, ...]
DualCycle = Tuple[Fraction, ...]

SWEEP_LIMIT = 10 ** 6


class LatticeError(ValueError):
    pass


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    return Fraction(str(s).strip())


def format_dual(v: Sequence) -> List[str]:
    return [frac_str(x) for x in v]


def to_cycle(v: Sequence) -> Cycle:
    out = []
    for x in v:
        x = Fraction(x)
        if x.denominator != 1:
            raise LatticeError(f"{v} is not an integral cycle")
        out.append(int(x))
    return tuple(out)


def add(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def unit(s: int, j: int, c: int = 1) -> Cycle:
    return tuple(c if i == j else 0 for i in range(s))


@dataclass(frozen=True)
class DiscriminantGroup:
    invariants: Tuple[int, ...]       # nontrivial Smith invariants d_1 | d_2 | ...
    order: int
    reps: Tuple[DualCycle, ...]       # the set Q, zero first

    def __len__(self):
        return self.order


@dataclass(frozen=True)
class SpincOrbit:
    index: int
    l_e: DualCycle        # fractional representative of h
    l_ne_bar: DualCycle   # minimal anti-nef representative of h
    k_e: DualCycle
    k_r: DualCycle


class Lattice:
    """The lattice of a (negative definite) plumbing graph."""

    def __init__(self, g: PlumbingGraph):
        self.graph = g
        self.s = g.s
        self.I = intersection_matrix(g)
        if not check_negative_definite(self.I):
            raise LatticeError(f"{g.name or 'graph'}: intersection matrix is not negative definite")
        self.det = det_bareiss(self.I)
        self.Iinv = inverse(self.I)
        self._neg = [[-x for x in row] for row in self.I]

    # -- pairings ---------------------------------------------------------
    def pair(self, a: Sequence, b: Sequence):
        s = self.s
        I = self.I
        return sum(a[i] * I[i][j] * b[j] for i in range(s) for j in range(s) if I[i][j] and a[i])

    def pair_basis(self, a: Sequence, j: int):
        """(a, E_j)."""
        row = self.I[j]
        return sum(row[i] * a[i] for i in range(self.s) if row[i])

    def pairings(self, a: Sequence) -> list:
        return [self.pair_basis(a, j) for j in range(self.s)]

    def dual_basis(self, j: int) -> DualCycle:
        """D_j with (D_j, E_i) = delta_ij."""
        return tuple(self.Iinv[i][j] for i in range(self.s))

    def from_pairings(self, p: Sequence) -> DualCycle:
        """The element of L_Q with prescribed pairings against the basis."""
        return tuple(solve(self.I, list(p)))

    def in_dual(self, a: Sequence) -> bool:
        return all(Fraction(x).denominator == 1 for x in self.pairings(a))

    # -- canonical class and chi -------------------------------------------
    @cached_property
    def K(self) -> DualCycle:
        rhs = [-v.euler - 2 + 2 * v.genus for v in self.graph.vertices]
        return self.from_pairings(rhs)

    @cached_property
    def K_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.K)

    def is_char(self, k: Sequence) -> bool:
        p = self.pairings(k)
        return all(Fraction(p[j] + self.I[j][j]).denominator == 1 and (p[j] + self.I[j][j]) % 2 == 0
                   for j in range(self.s))

    def char_vector(self, k: Sequence) -> Tuple[int, ...]:
        """c = I k, an integer vector for k in L'."""
        return to_cycle(self.pairings(k))

    def chi(self, k: Sequence, x: Sequence):
        """chi_k(x) = -(x, x + k)/2, exact."""
        v = -Fraction(self.pair(x, add(x, k))) / 2
        return int(v) if v.denominator == 1 else v

    def chi_form(self, k: Sequence) -> QuadraticFunction:
        """chi_k as a positive definite quadratic function on L_R."""
        c = self.char_vector(k)
        return QuadraticFunction(self._neg, [Fraction(-x, 2) for x in c], 0)

    def chi_symmetry_check(self, k: Sequence, x: Sequence) -> bool:
        ok = self.chi(scale(-1, k), scale(-1, x)) == self.chi(k, x)
        if ok and tuple(k) == tuple(self.K):
            ok = self.chi(k, x) == self.chi(k, sub(scale(-1, self.K), x))
        return ok

    def square(self, k: Sequence) -> Fraction:
        return Fraction(self.pair(k, k))

    # -- discriminant group --------------------------------------------------
    @cached_property
    def discriminant(self) -> DiscriminantGroup:
        d, u, _v = smith_normal_form(self.I)
        diag = [abs(d[i][i]) for i in range(self.s)]
        uinv = [[int(x) for x in row] for row in inverse(u)]
        reps = []
        seen = set()

        def rec(i, t):
            if i == self.s:
                y = matvec(uinv, t)
                lp = self.frac_part(matvec(self.Iinv, y))
                if lp not in seen:
                    seen.add(lp)
                    reps.append(lp)
                return
            for ti in range(diag[i]):
                rec(i + 1, t + [ti])

        rec(0, [])
        order = abs(self.det)
        if len(reps) != order:
            raise LatticeError("discriminant group enumeration is inconsistent")
        zero = tuple(Fraction(0) for _ in range(self.s))
        reps.sort(key=lambda r: (r != zero, [x for x in r]))
        return DiscriminantGroup(tuple(x for x in diag if x != 1), order, tuple(reps))

    @staticmethod
    def frac_part(v: Sequence) -> DualCycle:
        return tuple(Fraction(x) - math.floor(Fraction(x)) for x in v)

    def class_index(self, lp: Sequence) -> int:
        """Index in Q of the class of lp in H = L'/L."""
        return self._class_lookup[self.frac_part(lp)]

    @cached_property
    def _class_lookup(self) -> Dict[DualCycle, int]:
        return {r: i for i, r in enumerate(self.discriminant.reps)}

    # -- liftings --------------------------------------------------------------
    def lift_effective(self, lp: Sequence) -> DualCycle:
        if not self.in_dual(lp):
            raise LatticeError("not an element of L'")
        return self.frac_part(lp)

    def lift_antinef(self, lp: Sequence) -> DualCycle:
        """Minimal element of (lp + L) with all pairings <= 0 (increasing sweep)."""
        x = list(self.lift_effective(lp))
        for _ in range(SWEEP_LIMIT):
            j = next((j for j in range(self.s) if self.pair_basis(x, j) > 0), None)
            if j is None:
                return tuple(x)
            x[j] += 1
        raise RuntimeError("anti-nef sweep did not terminate")

    def distinguished_char(self, lp: Sequence) -> DualCycle:
        return add(self.K, scale(2, self.lift_antinef(lp)))

    def is_distinguished(self, k: Sequence) -> bool:
        h = scale(Fraction(1, 2), sub(k, self.K))
        return self.in_dual(h) and tuple(self.distinguished_char(h)) == tuple(Fraction(x) for x in k)

    def class_of_char(self, k: Sequence) -> DualCycle:
        """The l' (as an element of Q) with k in K + 2(l' + L)."""
        return self.frac_part(scale(Fraction(1, 2), sub(k, self.K)))

    @cached_property
    def orbits(self) -> Tuple[SpincOrbit, ...]:
        out = []
        for i, le in enumerate(self.discriminant.reps):
            lne = self.lift_antinef(le)
            out.append(SpincOrbit(i, le, lne, add(self.K, scale(2, le)), add(self.K, scale(2, lne))))
        return tuple(out)

    def conjugate_index(self, index: int) -> int:
        """Orbit of -k when k lies in orbit ``index``."""
        le = self.discriminant.reps[index]
        return self.class_index(sub(scale(-1, self.K), le))

    # -- minimisation -------------------------------------------------------------
    def min_chi(self, k: Sequence, scope: str = "full", exclude_zero: bool = False):
        """Exact minimum of chi_k over L (scope 'full') or over L_e ('effective').

        Returns ``(m, argmins)``.
        """
        q = self.chi_form(k)
        lower = [0] * self.s if scope == "effective" else None
        exclude = [tuple([0] * self.s)] if exclude_zero else ()
        m, pts = q.minimize(lower=lower, exclude=exclude)
        return int(m) if m.denominator == 1 else m, pts

    def orbit_shift(self, k: Sequence, l: Sequence) -> int:
        """Degree shift -2 chi_k(l) with H(k + 2l) = H(k)[-2 chi_k(l)]."""
        return -2 * self.chi(k, l)

    def d_invariant(self, k: Sequence, m_k) -> Fraction:
        return (self.square(k) + self.s) / 4 - 2 * Fraction(m_k)

    # -- cones ---------------------------------------------------------------------
    def is_antinef(self, x: Sequence) -> bool:
        return all(p <= 0 for p in self.pairings(x))

    def is_nef(self, x: Sequence) -> bool:
        return all(p >= 0 for p in self.pairings(x))

    @cached_property
    def negative_cycle(self) -> Cycle:
        """An integral Z with (Z, E_j) < 0 for all j: -I^{-1}(1,..,1), denominators cleared."""
        z = [-x for x in matvec(self.Iinv, [1] * self.s)]
        den = math.lcm(*[Fraction(x).denominator for x in z])
        return tuple(int(x * den) for x in z)
