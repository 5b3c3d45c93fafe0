"""Interval-union supports and their endpoint polynomial H.

A support is a finite union of closed intervals

    Sigma = [a_0, a_1] u [a_2, a_3] u ... u [a_2l, a_2l+1]

with 0 <= a_0 < a_1 < ... < a_2l+1 <= 18.  The upper cap of 18 comes from
the far-field comparison used by the certification step (log capacity of
[0, 18]); nothing interesting ever lives beyond it.

H(x) = prod (x - a_i) is the endpoint polynomial.  With an even number
of roots H is positive outside the convex hull, positive in the gaps,
and negative in the open intervals of Sigma, so all the density
formulas downstream carry |H| under the square root.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .polyarith import PolySet


class SupportError(ValueError):
    pass


class OverlappingIntervals(SupportError):
    """Endpoints out of order, or intervals/gaps below the width floor."""


class EmptyGap(SupportError):
    """A bounded gap contains no root of the polynomial set."""


class MultiRootGapWithoutP(SupportError):
    """A gap holds more than one root; that regime needs a nontrivial
    gap polynomial, which this implementation does not construct."""


def _fmt(x: float) -> str:
    return f"{x:.16g}"


@dataclass(frozen=True)
class Support:
    endpoints: Tuple[float, ...]

    def __init__(self, endpoints: Sequence[float]):
        object.__setattr__(self, "endpoints", tuple(float(a) for a in endpoints))

    @property
    def n_intervals(self) -> int:
        return len(self.endpoints) // 2

    @property
    def n_gaps(self) -> int:
        return self.n_intervals - 1

    @property
    def intervals(self) -> List[Tuple[float, float]]:
        e = self.endpoints
        return [(e[2 * k], e[2 * k + 1]) for k in range(self.n_intervals)]

    @property
    def gaps(self) -> List[Tuple[float, float]]:
        e = self.endpoints
        return [(e[2 * k + 1], e[2 * k + 2]) for k in range(self.n_gaps)]

    def pattern(self, k: int) -> int:
        """Sign of the numerator polynomials on interval k.

        Density numerators alternate sign across components; the
        convention here makes them positive on the rightmost interval.
        """
        return -1 if (self.n_gaps - k) % 2 else 1

    def contains(self, x: float) -> bool:
        return any(a <= x <= b for a, b in self.intervals)

    def interval_of(self, x: float) -> int:
        for k, (a, b) in enumerate(self.intervals):
            if a <= x <= b:
                return k
        raise SupportError(f"{x} not in support")

    def to_json(self) -> dict:
        return {"endpoints": [_fmt(a) for a in self.endpoints]}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data) -> "Support":
        if isinstance(data, str):
            data = json.loads(data)
        return cls([float(s) for s in data["endpoints"]])

    def as_array(self) -> np.ndarray:
        return np.asarray(self.endpoints, dtype=float)


def validate(support: Support, min_width: float = 1e-6) -> None:
    """Structural checks; raises on anything the solvers cannot handle."""
    e = support.endpoints
    if len(e) < 2 or len(e) % 2:
        raise SupportError(f"need an even number >= 2 of endpoints, got {len(e)}")
    if e[0] < 0.0:
        raise SupportError(f"support must start at or above 0, got a_0 = {e[0]}")
    if e[-1] > 18.0:
        raise SupportError(f"support must end at or below 18, got {e[-1]}")
    for i in range(len(e) - 1):
        if e[i + 1] - e[i] < min_width:
            raise OverlappingIntervals(
                f"endpoints {i} and {i+1} ({e[i]}, {e[i+1]}) closer than {min_width}"
            )


def H_eval(support: Support, x):
    """Evaluate H(x) = prod (x - a_i).

    Returns (value, sign) where sign is -1 strictly inside Sigma, +1 in
    the gaps and outside, and +1 at the endpoints themselves (the value
    is 0 there; the sign is a tie-break convention).
    """
    xa = np.asarray(x, dtype=float)
    val = np.ones_like(xa)
    for a in support.endpoints:
        val = val * (xa - a)
    sign = np.where(val < 0, -1, 1)
    if np.ndim(x) == 0:
        return float(val), int(sign)
    return val, sign


def rest_abs(support: Support, k: int, x):
    """|H(x)| / |(x - a_2k)(x - a_2k+1)|, i.e. the endpoint product with
    interval k's own factors removed.  Smooth and positive on that
    closed interval."""
    xa = np.asarray(x, dtype=float)
    val = np.ones_like(xa)
    for i, a in enumerate(support.endpoints):
        if i in (2 * k, 2 * k + 1):
            continue
        val = val * (xa - a)
    out = np.abs(val)
    if np.ndim(x) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class GapRootMap:
    """Where the roots of the polynomial set sit relative to the support.

    gap_roots[j] lists roots inside the bounded gap j, below/above hold
    roots outside the convex hull of the support.  one_root_per_gap is
    the regime every solver in this package assumes: each bounded gap
    holds exactly one root and no root falls inside Sigma.
    """

    gap_roots: Tuple[Tuple[float, ...], ...]
    below: Tuple[float, ...]
    above: Tuple[float, ...]
    one_root_per_gap: bool


def map_gap_roots(support: Support, polys: PolySet) -> GapRootMap:
    roots = polys.all_roots()
    e = support.endpoints
    for r in roots:
        if support.contains(r) and not any(abs(r - a) < 1e-12 for a in e):
            raise SupportError(f"root {r} lies inside the support")
    below = tuple(r for r in roots if r < e[0])
    above = tuple(r for r in roots if r > e[-1])
    gap_roots = tuple(
        tuple(r for r in roots if lo < r < hi) for lo, hi in support.gaps
    )
    one = all(len(g) == 1 for g in gap_roots)
    return GapRootMap(gap_roots, below, above, one)


def require_one_root_per_gap(support: Support, polys: PolySet) -> GapRootMap:
    m = map_gap_roots(support, polys)
    for j, g in enumerate(m.gap_roots):
        if len(g) == 0:
            raise EmptyGap(f"gap {j} {support.gaps[j]} contains no root")
        if len(g) > 1:
            raise MultiRootGapWithoutP(
                f"gap {j} {support.gaps[j]} contains {len(g)} roots {g}"
            )
    return m
