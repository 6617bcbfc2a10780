"""Exact enumeration of integer points in ellipsoids.

A :class:`QuadraticFunction` is ``Q(y) = 1/2 y^T A y + b.y + c`` with ``A``
rational symmetric positive definite.  Points with ``Q(y) <= N`` are listed by
coordinate-wise bounding (Fincke-Pohst) using an exact ``U^T D U``
factorization, so no point is ever lost to rounding.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

from .linalg import ldl, solve


class EnumerationBudgetExceeded(RuntimeError):
    """Raised when an enumeration visits more points than allowed."""


def _int_range(c: Fraction, r: Fraction) -> Tuple[int, int]:
    """Integers t with (t - c)^2 <= r, as an inclusive range (empty if lo > hi)."""
    if r < 0:
        return 1, 0
    root = math.sqrt(float(r))
    hi = math.floor(float(c) + root)
    while (hi + 1 - c) ** 2 <= r:
        hi += 1
    while hi > c and (hi - c) ** 2 > r:
        hi -= 1
    lo = math.ceil(float(c) - root)
    while (lo - 1 - c) ** 2 <= r:
        lo -= 1
    while lo < c and (lo - c) ** 2 > r:
        lo += 1
    if (hi - c) ** 2 > r or (lo - c) ** 2 > r:
        return 1, 0
    return lo, hi


class QuadraticFunction:
    def __init__(self, a: Sequence[Sequence], b: Sequence, c=0):
        self.n = len(a)
        self.a = [[Fraction(x) for x in row] for row in a]
        self.b = [Fraction(x) for x in b]
        self.c = Fraction(c)
        self.d, self.mu = ldl(self.a)
        self.center = [-x for x in solve(self.a, self.b)]
        self.min_real = self(self.center)

    def __call__(self, y: Sequence) -> Fraction:
        n = self.n
        quad = sum(self.a[i][j] * y[i] * y[j] for i in range(n) for j in range(n))
        return quad / 2 + sum(bi * yi for bi, yi in zip(self.b, y)) + self.c

    def restricted(self, free: Sequence[int], fixed_values: dict) -> "QuadraticFunction":
        """Q with the coordinates not in ``free`` set to ``fixed_values``."""
        a = [[self.a[i][j] for j in free] for i in free]
        b = [self.b[i] + sum(self.a[i][j] * v for j, v in fixed_values.items()) for i in free]
        c = self.c + sum(self.b[j] * v for j, v in fixed_values.items()) + sum(
            self.a[i][j] * fixed_values[i] * fixed_values[j] for i in fixed_values for j in fixed_values) / 2
        return QuadraticFunction(a, b, c)

    def schur(self, keep: Sequence[int]) -> "QuadraticFunction":
        """min over the other (real) coordinates, as a function of ``keep``."""
        drop = [i for i in range(self.n) if i not in keep]
        if not drop:
            return QuadraticFunction([[self.a[i][j] for j in keep] for i in keep],
                                     [self.b[i] for i in keep], self.c)
        # minimiser in the dropped block: A_dd y_d = -(b_d + A_dk y_k)
        add = [[self.a[i][j] for j in drop] for i in drop]
        cols = []
        for j in keep:
            cols.append(solve(add, [self.a[i][j] for i in drop]))
        bsol = solve(add, [self.b[i] for i in drop])
        # Schur complement and reduced linear term
        a = [[self.a[i][j] - sum(self.a[i][d] * cols[kj][t] for t, d in enumerate(drop))
              for kj, j in enumerate(keep)] for i in keep]
        b = [self.b[i] - sum(self.a[i][d] * bsol[t] for t, d in enumerate(drop)) for i in keep]
        c = self.c - sum(self.b[d] * bsol[t] for t, d in enumerate(drop)) / 2
        return QuadraticFunction(a, b, c)

    # ------------------------------------------------------------------
    def points(self, bound, lower=None, upper=None, budget: Optional[int] = None) -> List[tuple]:
        """All integer y with Q(y) <= bound and lower <= y <= upper (coordinatewise)."""
        out = []
        for y, _ in self._walk(Fraction(bound), lower, upper, budget):
            out.append(y)
        return out

    def points_with_values(self, bound, lower=None, upper=None, budget=None):
        return list(self._walk(Fraction(bound), lower, upper, budget))

    def _walk(self, bound: Fraction, lower, upper, budget) -> Iterator[Tuple[tuple, Fraction]]:
        n = self.n
        radius = 2 * (bound - self.min_real)
        if radius < 0:
            return
        y = [0] * n
        z = [Fraction(0)] * n   # y - center
        count = 0

        def rec(i: int, rem: Fraction):
            nonlocal count
            ci = self.center[i] - sum(self.mu[i][j] * z[j] for j in range(i + 1, n))
            lo, hi = _int_range(ci, rem / self.d[i])
            if lower is not None and lower[i] is not None:
                lo = max(lo, lower[i])
            if upper is not None and upper[i] is not None:
                hi = min(hi, upper[i])
            for t in range(lo, hi + 1):
                part = self.d[i] * (t - ci) ** 2
                if part > rem:
                    continue
                y[i] = t
                z[i] = t - self.center[i]
                if i == 0:
                    count += 1
                    if budget is not None and count > budget:
                        raise EnumerationBudgetExceeded(f"more than {budget} lattice points")
                    yield tuple(y), self.min_real + (radius - (rem - part)) / 2
                else:
                    yield from rec(i - 1, rem - part)

        yield from rec(n - 1, radius)

    def minimize(self, lower=None, upper=None, exclude=()) -> Tuple[Fraction, List[tuple]]:
        """Exact minimum over the (bounded-below/above) integer points, with all minimisers."""
        n = self.n
        excl = set(map(tuple, exclude))
        start = self._feasible_start(lower, upper, excl)
        best = self(start)
        mins: List[tuple] = []
        y = [0] * n
        z = [Fraction(0)] * n

        def rec(i: int, acc: Fraction):
            nonlocal best, mins
            ci = self.center[i] - sum(self.mu[i][j] * z[j] for j in range(i + 1, n))
            rem = 2 * (best - self.min_real) - acc
            lo, hi = _int_range(ci, rem / self.d[i])
            if lower is not None and lower[i] is not None:
                lo = max(lo, lower[i])
            if upper is not None and upper[i] is not None:
                hi = min(hi, upper[i])
            if lo > hi:
                return
            # zig-zag order from the centre, so good points come early
            t0 = min(max(round(ci), lo), hi)
            order = [t0]
            for step in range(1, hi - lo + 1):
                for t in (t0 + step, t0 - step):
                    if lo <= t <= hi:
                        order.append(t)
            for t in order:
                part = acc + self.d[i] * (t - ci) ** 2
                if part > 2 * (best - self.min_real):
                    continue
                y[i] = t
                z[i] = t - self.center[i]
                if i == 0:
                    yt = tuple(y)
                    if yt in excl:
                        continue
                    val = self.min_real + part / 2
                    if val < best:
                        best, mins = val, [yt]
                    elif val == best:
                        mins.append(yt)
                else:
                    rec(i - 1, part)

        rec(n - 1, Fraction(0))
        return best, sorted(set(mins))

    def _feasible_start(self, lower, upper, excl) -> tuple:
        y = []
        for i in range(self.n):
            t = round(self.center[i])
            if lower is not None and lower[i] is not None:
                t = max(t, lower[i])
            if upper is not None and upper[i] is not None:
                t = min(t, upper[i])
            y.append(t)
        y = tuple(y)
        if y not in excl:
            return y
        # walk outwards along coordinate directions until admissible
        for step in range(1, 1000):
            for i in range(self.n):
                for sgn in (1, -1):
                    cand = list(y)
                    cand[i] += sgn * step
                    ok = (lower is None or lower[i] is None or cand[i] >= lower[i]) and \
                         (upper is None or upper[i] is None or cand[i] <= upper[i])
                    if ok and tuple(cand) not in excl:
                        return tuple(cand)
        raise ValueError("no admissible starting point")

    def bounding_box(self, bound) -> List[Tuple[int, int]]:
        """Per-coordinate integer bounds of the real ellipsoid Q <= bound."""
        from .linalg import inverse
        radius = 2 * (Fraction(bound) - self.min_real)
        inv = inverse(self.a)
        return [_int_range(self.center[i], radius * inv[i][i]) for i in range(self.n)]
