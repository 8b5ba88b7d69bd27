"""Exact 2D convex hulls of rational point sets.

Monotone-chain construction with exact cross products.  Hulls are kept
in a canonical form -- counterclockwise, starting at the lexicographically
smallest vertex, collinear points dropped -- so two hulls are equal iff
their vertex tuples are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = ["HullPolygon", "convex_hull_2d", "hull_sum", "hull_contains"]

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class HullPolygon:
    """Canonical convex polygon; may degenerate to a segment or point."""

    vertices: tuple[Point, ...]

    @property
    def x_span(self) -> tuple[Fraction, Fraction]:
        xs = [p[0] for p in self.vertices]
        return min(xs), max(xs)

    @property
    def y_span(self) -> tuple[Fraction, Fraction]:
        ys = [p[1] for p in self.vertices]
        return min(ys), max(ys)


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points: Iterable[Sequence]) -> HullPolygon:
    """Exact convex hull; collinear inputs collapse to the extreme segment."""
    pts = sorted({(Fraction(p[0]), Fraction(p[1])) for p in points})
    if not pts:
        raise ValueError("convex hull of an empty point set")
    if len(pts) == 1:
        return HullPolygon(vertices=(pts[0],))
    lower: list[Point] = []
    for p in pts:
        while len(lower) > 1 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) > 1 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    verts = lower[:-1] + upper[:-1]
    return HullPolygon(vertices=tuple(verts))


def hull_contains(hull: HullPolygon, point: Sequence) -> bool:
    """True iff the point lies inside or on the boundary."""
    p = (Fraction(point[0]), Fraction(point[1]))
    v = hull.vertices
    if len(v) == 1:
        return p == v[0]
    if len(v) == 2:
        if _cross(v[0], v[1], p) != 0:
            return False
        lo, hi = min(v), max(v)
        return lo <= p <= hi
    return all(
        _cross(v[i], v[(i + 1) % len(v)], p) >= 0 for i in range(len(v))
    )


def _envelopes(hull: HullPolygon) -> tuple[list[Point], list[Point]]:
    """Split a hull into its lower and upper envelope vertex chains.

    Both chains run left to right; vertical edges are rejected since the
    hulls handled here come from function graphs.
    """
    v = list(hull.vertices)
    if len(v) == 1:
        return v, v
    if len(v) == 2:
        lo, hi = sorted(v)
        if lo[0] == hi[0]:
            raise ValueError("vertical degenerate hull has no envelopes")
        return [lo, hi], [lo, hi]
    xmax = max(p[0] for p in v)
    # Canonical order starts at the leftmost-lowest vertex and walks the
    # lower envelope first (counterclockwise).
    k = next(i for i, p in enumerate(v) if p[0] == xmax)
    lower = v[: k + 1]
    upper = [v[0]] + v[: k - 1 : -1]
    for chain in (lower, upper):
        for a, b in zip(chain, chain[1:]):
            if a[0] == b[0]:
                raise ValueError("hull has a vertical edge; not a function-graph hull")
    return lower, upper


def _env_eval(chain: list[Point], x: Fraction) -> Fraction:
    for (x0, y0), (x1, y1) in zip(chain, chain[1:]):
        if x0 <= x <= x1:
            if x0 == x1:
                return y0
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    if x == chain[0][0]:
        return chain[0][1]
    raise ValueError("x outside envelope span")


def hull_sum(a: HullPolygon, b: HullPolygon) -> HullPolygon:
    """Pointwise (x-wise) sum of two hulls spanning the same x-interval."""
    if a.x_span != b.x_span:
        raise ValueError(
            f"hulls span different x-intervals: {a.x_span} vs {b.x_span}"
        )
    lo, hi = a.x_span
    if lo == hi:
        ya = a.y_span
        yb = b.y_span
        pts = [(lo, ya[0] + yb[0]), (lo, ya[1] + yb[1])]
        return convex_hull_2d(pts)
    la, ua = _envelopes(a)
    lb, ub = _envelopes(b)
    xs = sorted({p[0] for p in la + ua + lb + ub})
    pts = []
    for x in xs:
        pts.append((x, _env_eval(la, x) + _env_eval(lb, x)))
        pts.append((x, _env_eval(ua, x) + _env_eval(ub, x)))
    return convex_hull_2d(pts)
