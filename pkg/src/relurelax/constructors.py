"""Constructive network encodings of univariate CPWL functions.

Each constructor returns a network that computes the given function
exactly on its domain and, under the analyzer named in its docstring,
yields precise output bounds on every box inside the domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cpwl import Cpwl1D, classify
from .network import ID, RELU, NetworkBuilder, ReluNetwork

__all__ = [
    "EncodingSpec",
    "parse_signs",
    "step_network",
    "ibp_monotone",
    "convex_encoding",
    "dp0_precise_convex",
    "dp1_substitute",
    "mn_single_layer",
]


def parse_signs(text) -> tuple[int, ...]:
    """Accept '+-+' style strings or sequences of +1/-1."""
    if isinstance(text, str):
        out = []
        for ch in text:
            if ch == "+":
                out.append(1)
            elif ch == "-":
                out.append(-1)
            else:
                raise ValueError(f"bad sign character {ch!r}")
        return tuple(out)
    out = tuple(int(s) for s in text)
    if any(s not in (1, -1) for s in out):
        raise ValueError("signs must be +1 or -1")
    return out


@dataclass(frozen=True)
class EncodingSpec:
    """Parameters of the single-layer form b + c x + sum g_i relu(s_i (x - a_i))."""

    b: Fraction
    c: Fraction
    signs: tuple[int, ...]
    gammas: tuple[Fraction, ...]
    anchors: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not len(self.signs) == len(self.gammas) == len(self.anchors):
            raise ValueError("signs, gammas and anchors must align")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    def to_network(self) -> ReluNetwork:
        nb = NetworkBuilder(1)
        refs = {}
        for s, g, a in zip(self.signs, self.gammas, self.anchors):
            j = nb.add(bias=-s * a, inputs={0: s}, act=RELU)
            refs[j] = g
        out = nb.add(bias=self.b, inputs={0: self.c}, refs=refs)
        return nb.build(out)


def step_network(x0, x1, beta) -> ReluNetwork:
    """Two-ReLU ramp step: 0 left of x0, beta right of x1, linear between.

    The nesting beta - relu(beta - slope * relu(x - x0)) clamps the output
    to [0, beta] with one ReLU per side, which is what makes its interval
    analysis exact.
    """
    x0, x1, beta = Fraction(x0), Fraction(x1), Fraction(beta)
    if x0 >= x1:
        raise ValueError("step needs x0 < x1")
    if beta < 0:
        raise ValueError("step height must be nonnegative")
    slope = beta / (x1 - x0)
    nb = NetworkBuilder(1)
    inner = nb.add(bias=-x0, inputs={0: 1}, act=RELU)
    outer = nb.add(bias=beta, refs={inner: -slope}, act=RELU)
    out = nb.add(bias=beta, refs={outer: -1})
    return nb.build(out)


def ibp_monotone(f: Cpwl1D) -> ReluNetwork:
    """Sum-of-steps encoding of a monotone function; IBP-precise.

    A decreasing function is encoded by negating the output of the
    increasing construction for -f; the negation happens after the last
    step block, so each block's interval stays exact.
    """
    cls = classify(f)
    if not cls.monotone:
        raise ValueError("ibp_monotone needs a monotone function")
    flip = False
    if not cls.monotone_increasing:
        f = f.negate()
        flip = True
    nb = NetworkBuilder(1)
    # Each step block contributes beta_i - (outer relu); collect the
    # outer relus and fold the constants into the output bias.
    total = f.points[0][1]
    outer_refs = {}
    for (x0, y0), (x1, y1) in zip(f.points, f.points[1:]):
        beta = y1 - y0
        slope = beta / (x1 - x0)
        inner = nb.add(bias=-x0, inputs={0: 1}, act=RELU)
        outer = nb.add(bias=beta, refs={inner: -slope}, act=RELU)
        total += beta
        outer_refs[outer] = -1
    if flip:
        total = -total
        outer_refs = {k: 1 for k in outer_refs}
    out = nb.add(bias=total, refs=outer_refs)
    return nb.build(out)


def _convex_spec(f: Cpwl1D, signs: tuple[int, ...]) -> EncodingSpec:
    slopes = f.slopes()
    n = len(slopes)
    if len(signs) != n - 1:
        raise ValueError(f"need {n - 1} signs for {n} segments, got {len(signs)}")
    anchors = tuple(p[0] for p in f.points[1:-1])
    gammas = tuple(b - a for a, b in zip(slopes, slopes[1:]))
    x0, y0 = f.points[0]
    b = y0 - x0 * slopes[0]
    c = slopes[0]
    for s, g, a in zip(signs, gammas, anchors):
        if s < 0:
            b -= g * a
            c += g
    return EncodingSpec(b=b, c=c, signs=signs, gammas=gammas, anchors=anchors)


def convex_encoding(f: Cpwl1D, signs) -> ReluNetwork:
    """Single-layer encoding of a convex function; triangle-precise for
    every choice of ReLU orientations.

    A concave function is handled by encoding its negation and negating
    the output weights.
    """
    signs = parse_signs(signs)
    cls = classify(f)
    if cls.convex:
        return _convex_spec(f, signs).to_network()
    if cls.concave:
        spec = _convex_spec(f.negate(), signs)
        nb = NetworkBuilder(1)
        refs = {}
        for s, g, a in zip(spec.signs, spec.gammas, spec.anchors):
            j = nb.add(bias=-s * a, inputs={0: s}, act=RELU)
            refs[j] = -g
        out = nb.add(bias=-spec.b, inputs={0: -spec.c}, refs=refs)
        return nb.build(out)
    raise ValueError("convex_encoding needs a convex (or concave) function")


def dp0_precise_convex(f: Cpwl1D) -> ReluNetwork:
    """The unique network of the form b + sum g_i relu(s_i (x - a_i))
    whose zero-lower-slope linear-bound analysis is precise for convex f.

    ReLUs open away from the minimum; with a strict interior minimum two
    ReLUs share that anchor, absorbing both one-sided slopes, and there
    is no free linear term.
    """
    cls = classify(f)
    if not cls.convex:
        raise ValueError("dp0_precise_convex needs a convex function")
    slopes = f.slopes()
    n = len(slopes)
    pts = f.points
    terms: list[tuple[int, Fraction, Fraction]] = []  # (sign, gamma, anchor)
    gammas = [b - a for a, b in zip(slopes, slopes[1:])]

    if cls.monotone_increasing:
        b = pts[0][1]
        if slopes[0]:
            terms.append((1, slopes[0], pts[0][0]))
        terms += [(1, g, pts[i + 1][0]) for i, g in enumerate(gammas)]
    elif cls.monotone_decreasing:
        b = pts[-1][1]
        if slopes[-1]:
            terms.append((-1, -slopes[-1], pts[-1][0]))
        terms += [(-1, g, pts[i + 1][0]) for i, g in enumerate(gammas)]
    elif cls.has_zero_slope_segment:
        j = slopes.index(0)
        b = pts[j][1]
        terms += [(-1, gammas[i - 1], pts[i][0]) for i in range(1, j + 1)]
        terms += [(1, gammas[i - 1], pts[i][0]) for i in range(j + 1, n)]
    else:
        xstar = cls.unique_interior_minimum_at
        j = next(i for i, p in enumerate(pts) if p[0] == xstar)
        b = pts[j][1]
        terms += [(-1, gammas[i - 1], pts[i][0]) for i in range(1, j)]
        terms.append((-1, -slopes[j - 1], xstar))
        terms.append((1, slopes[j], xstar))
        terms += [(1, gammas[i - 1], pts[i][0]) for i in range(j + 1, n)]

    nb = NetworkBuilder(1)
    refs = {}
    for s, g, a in terms:
        k = nb.add(bias=-s * a, inputs={0: s}, act=RELU)
        refs[k] = g
    out = nb.add(bias=b, refs=refs)
    return nb.build(out)


def dp1_substitute(net: ReluNetwork) -> ReluNetwork:
    """Replace every relu(v) by v + relu(-v); the function is unchanged
    and the slope-one analysis of the result matches the slope-zero
    analysis of the original."""
    nb = NetworkBuilder(net.input_dim)
    remap: dict[int, int] = {}
    for j, nr in enumerate(net.neurons):
        inputs = {i: c for i, c in nr.input_coeffs}
        refs = {remap[k]: c for k, c in nr.neuron_coeffs}
        if nr.act == ID:
            remap[j] = nb.add(bias=nr.bias, inputs=inputs, refs=refs)
        else:
            neg = nb.add(
                bias=-nr.bias,
                inputs={i: -c for i, c in inputs.items()},
                refs={k: -c for k, c in refs.items()},
                act=RELU,
            )
            refs = dict(refs)
            refs[neg] = Fraction(1)
            remap[j] = nb.add(bias=nr.bias, inputs=inputs, refs=refs)
    return nb.build(remap[net.output])


def mn_single_layer(f: Cpwl1D) -> ReluNetwork:
    """Single-layer encoding of an arbitrary CPWL function: the first
    segment extended, plus one slope-difference ReLU per interior
    breakpoint.  Precise under the joint-hull analysis."""
    slopes = f.slopes()
    x0, y0 = f.points[0]
    nb = NetworkBuilder(1)
    refs = {}
    for i, (a, b) in enumerate(zip(slopes, slopes[1:])):
        anchor = f.points[i + 1][0]
        j = nb.add(bias=-anchor, inputs={0: 1}, act=RELU)
        refs[j] = b - a
    out = nb.add(bias=y0 - x0 * slopes[0], inputs={0: slopes[0]}, refs=refs)
    return nb.build(out)
