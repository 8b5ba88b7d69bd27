"""Univariate continuous piecewise-linear functions over exact rationals.

A function is stored as its breakpoint graph (x_i, y_i) with strictly
increasing x_i.  The canonical form keeps interior breakpoints only where
the slope actually changes, so equality of canonical functions is
equality of their point tuples.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .rational import format_rational, parse_rational

__all__ = [
    "Cpwl1D",
    "FunctionClass",
    "classify",
    "exact_range",
    "random_cpwl",
    "affine_combination",
    "cpwl_relu",
    "SHAPES",
]

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Cpwl1D:
    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise ValueError("a CPWL function needs at least two points")
        for (x0, _), (x1, _) in zip(self.points, self.points[1:]):
            if x0 >= x1:
                raise ValueError("breakpoints must be strictly increasing")

    @staticmethod
    def from_points(points: Iterable[Sequence]) -> "Cpwl1D":
        """Build the canonical function through the given graph points."""
        pts = [(Fraction(p[0]), Fraction(p[1])) for p in points]
        pts.sort()
        if len(pts) < 2:
            raise ValueError("a CPWL function needs at least two points")
        out: list[Point] = [pts[0]]
        for p in pts[1:]:
            if p[0] == out[-1][0]:
                if p[1] != out[-1][1]:
                    raise ValueError(f"two values given at x = {p[0]}")
                continue
            out.append(p)
        return Cpwl1D(points=tuple(_canonicalize(out)))

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.points[0][0], self.points[-1][0]

    def slopes(self) -> list[Fraction]:
        return [
            (y1 - y0) / (x1 - x0)
            for (x0, y0), (x1, y1) in zip(self.points, self.points[1:])
        ]

    def eval(self, x) -> Fraction:
        x = Fraction(x)
        lo, hi = self.domain
        if not lo <= x <= hi:
            raise ValueError(f"{x} outside domain [{lo}, {hi}]")
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            if x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        raise AssertionError("unreachable")

    def restrict(self, lo, hi) -> "Cpwl1D":
        lo, hi = Fraction(lo), Fraction(hi)
        if lo >= hi:
            raise ValueError("restriction needs lo < hi")
        pts = [(lo, self.eval(lo))]
        pts += [p for p in self.points if lo < p[0] < hi]
        pts.append((hi, self.eval(hi)))
        return Cpwl1D.from_points(pts)

    def negate(self) -> "Cpwl1D":
        return Cpwl1D(points=tuple((x, -y) for x, y in self.points))

    def to_json(self) -> dict:
        return {
            "points": [[format_rational(x), format_rational(y)] for x, y in self.points]
        }

    @staticmethod
    def from_json(obj: dict) -> "Cpwl1D":
        pts = [(parse_rational(x), parse_rational(y)) for x, y in obj["points"]]
        return Cpwl1D.from_points(pts)


def _canonicalize(pts: list[Point]) -> list[Point]:
    """Drop interior points that do not change the slope."""
    if len(pts) <= 2:
        return pts
    out = [pts[0], pts[1]]
    for p in pts[2:]:
        (x0, y0), (x1, y1) = out[-2], out[-1]
        if (y1 - y0) * (p[0] - x1) == (p[1] - y1) * (x1 - x0):
            out[-1] = p
        else:
            out.append(p)
    return out


@dataclass(frozen=True)
class FunctionClass:
    """Slope-sequence classification into the monotone/convex classes."""

    monotone_increasing: bool
    monotone_decreasing: bool
    convex: bool
    concave: bool
    has_zero_slope_segment: bool
    unique_interior_minimum_at: Fraction | None

    @property
    def monotone(self) -> bool:
        return self.monotone_increasing or self.monotone_decreasing


def classify(f: Cpwl1D) -> FunctionClass:
    slopes = f.slopes()
    inc = all(s >= 0 for s in slopes)
    dec = all(s <= 0 for s in slopes)
    convex = all(a < b for a, b in zip(slopes, slopes[1:]))
    concave = all(a > b for a, b in zip(slopes, slopes[1:]))
    zero = any(s == 0 for s in slopes)
    minimum = None
    if convex and not inc and not dec and not zero:
        # Exactly one sign change in a strictly increasing slope sequence.
        j = next(i for i, s in enumerate(slopes) if s > 0)
        minimum = f.points[j][0]
    return FunctionClass(
        monotone_increasing=inc,
        monotone_decreasing=dec,
        convex=convex,
        concave=concave,
        has_zero_slope_segment=zero,
        unique_interior_minimum_at=minimum,
    )


def exact_range(f: Cpwl1D, lo, hi) -> tuple[Fraction, Fraction]:
    """Exact (min, max) of f over [lo, hi] inside its domain."""
    lo, hi = Fraction(lo), Fraction(hi)
    dlo, dhi = f.domain
    if not (dlo <= lo <= hi <= dhi):
        raise ValueError(f"[{lo}, {hi}] outside domain [{dlo}, {dhi}]")
    vals = [f.eval(lo), f.eval(hi)]
    vals += [y for x, y in f.points if lo < x < hi]
    return min(vals), max(vals)


def affine_combination(terms: Sequence[tuple[Fraction, Cpwl1D]], bias=0) -> Cpwl1D:
    """Exact c_1*f_1 + ... + c_k*f_k + bias over the shared domain."""
    if not terms:
        raise ValueError("affine combination of no functions")
    dom = terms[0][1].domain
    for _, f in terms:
        if f.domain != dom:
            raise ValueError("all terms must share one domain")
    xs = sorted({x for _, f in terms for x, _ in f.points})
    bias = Fraction(bias)
    pts = [
        (x, bias + sum(Fraction(c) * f.eval(x) for c, f in terms)) for x in xs
    ]
    return Cpwl1D.from_points(pts)


def cpwl_relu(f: Cpwl1D) -> Cpwl1D:
    """Exact pointwise relu, with zero-crossing breakpoints inserted."""
    xs = [x for x, _ in f.points]
    for (x0, y0), (x1, y1) in zip(f.points, f.points[1:]):
        if (y0 < 0 < y1) or (y1 < 0 < y0):
            xs.append(x0 + (x1 - x0) * (0 - y0) / (y1 - y0))
    xs = sorted(set(xs))
    return Cpwl1D.from_points([(x, max(Fraction(0), f.eval(x))) for x in xs])


SHAPES = (
    "cpwl",
    "monotone",
    "monotone-increasing",
    "monotone-decreasing",
    "convex",
    "monotone-convex",
    "convex-min",
)

_MAX_DEN = 64


def _shape_ok(shape: str, f: Cpwl1D) -> bool:
    c = classify(f)
    if shape == "cpwl":
        return True
    if shape == "monotone":
        return c.monotone
    if shape == "monotone-increasing":
        return c.monotone_increasing
    if shape == "monotone-decreasing":
        return c.monotone_decreasing
    if shape == "convex":
        return c.convex
    if shape == "monotone-convex":
        return c.monotone and c.convex
    if shape == "convex-min":
        return c.convex and c.unique_interior_minimum_at is not None
    raise ValueError(f"unknown shape {shape!r}")


def random_cpwl(n: int, shape: str, seed) -> Cpwl1D:
    """Deterministic random function with n segments in the given class.

    Coordinates use denominators <= 64 to keep downstream solver sizes
    small; the classifier is the oracle that the request was met.
    """
    if n < 1:
        raise ValueError("need at least one segment")
    if shape not in SHAPES:
        raise ValueError(f"unknown shape {shape!r}; one of {SHAPES}")
    if n == 1 and shape == "convex-min":
        raise ValueError("an interior minimum needs at least two segments")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)

    den = rng.randint(1, _MAX_DEN)
    start = rng.randint(-4 * den, 4 * den)
    nums = [start]
    for _ in range(n):
        nums.append(nums[-1] + rng.randint(1, 3 * den))
    xs = [Fraction(v, den) for v in nums]

    sden = rng.randint(1, 8)
    slopes = _random_slopes(n, shape, sden, rng)

    y = Fraction(rng.randint(-8, 8), rng.randint(1, 8))
    pts = [(xs[0], y)]
    for i in range(n):
        y = y + slopes[i] * (xs[i + 1] - xs[i])
        pts.append((xs[i + 1], y))
    f = Cpwl1D(points=tuple(pts))
    assert _shape_ok(shape, f), f"generator produced wrong class for {shape}"
    return f


def _random_slopes(n: int, shape: str, den: int, rng: random.Random) -> list[Fraction]:
    def distinct(count, lo, hi, forbid_zero=False):
        pool = [v for v in range(lo, hi + 1) if not (forbid_zero and v == 0)]
        return rng.sample(pool, count)

    if shape == "convex":
        vals = sorted(distinct(n, -3 * n, 3 * n))
    elif shape == "monotone-convex":
        vals = sorted(distinct(n, 0, 4 * n))
    elif shape == "convex-min":
        neg = sorted(distinct(1 + rng.randint(0, n - 2), -3 * n, -1))
        pos = sorted(distinct(n - len(neg), 1, 3 * n))
        vals = neg + pos
    elif shape in ("monotone", "monotone-increasing", "monotone-decreasing"):
        vals = [rng.randint(0, 3 * n)]
        for _ in range(n - 1):
            nxt = rng.randint(0, 3 * n)
            while nxt == vals[-1]:
                nxt = rng.randint(0, 3 * n)
            vals.append(nxt)
        if shape == "monotone-decreasing" or (
            shape == "monotone" and rng.random() < 0.5
        ):
            vals = [-v for v in vals]
    else:  # cpwl
        vals = [rng.randint(-3 * n, 3 * n)]
        for _ in range(n - 1):
            nxt = rng.randint(-3 * n, 3 * n)
            while nxt == vals[-1]:
                nxt = rng.randint(-3 * n, 3 * n)
            vals.append(nxt)
    return [Fraction(v, den) for v in vals]
