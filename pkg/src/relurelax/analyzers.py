"""The five convex relaxation analyses over box inputs.

Interval propagation (ibp), linear bounding with backsubstitution at a
fixed lower slope (dp0, dp1), the per-neuron convex hull solved as one
exact linear program (tri), and the joint hull of a univariate
single-layer network (mn).  Everything is exact rational arithmetic, so
each analysis returns the mathematically defined interval of its
relaxation, not a numerical approximation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cpwl import Cpwl1D, affine_combination, cpwl_relu, exact_range
from .hull import HullPolygon, convex_hull_2d
from .lp import LinProgram, LpOptimal, lp_solve
from .network import ID, RELU, ReluNetwork, evaluate
from .rational import format_rational, parse_rational

__all__ = [
    "Box",
    "LinearBoundPair",
    "AnalysisResult",
    "RELAXATIONS",
    "analyze",
    "ibp",
    "deeppoly",
    "triangle",
    "multineuron_single_layer",
    "preactivation_bounds",
]

RELAXATIONS = ("ibp", "dp0", "dp1", "tri", "mn")


@dataclass(frozen=True)
class Box:
    """Axis-aligned hyperrectangle, one (l, u) pair per dimension."""

    bounds: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        if not self.bounds:
            raise ValueError("a box needs at least one dimension")
        for l, u in self.bounds:
            if l > u:
                raise ValueError(f"box has l > u: [{l}, {u}]")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def is_point(self) -> bool:
        return all(l == u for l, u in self.bounds)

    def contains(self, point: Sequence) -> bool:
        if len(point) != self.dim:
            return False
        return all(l <= Fraction(p) <= u for (l, u), p in zip(self.bounds, point))

    @staticmethod
    def make(*pairs) -> "Box":
        return Box(bounds=tuple((Fraction(l), Fraction(u)) for l, u in pairs))

    @staticmethod
    def parse(text: str) -> "Box":
        """Parse the CLI grammar: ``l,u`` per dimension, joined by ``x``."""
        dims = []
        for part in text.split("x"):
            pieces = part.split(",")
            if len(pieces) != 2:
                raise ValueError(f"bad box dimension {part!r}; expected l,u")
            dims.append((parse_rational(pieces[0]), parse_rational(pieces[1])))
        return Box(bounds=tuple(dims))

    def format(self) -> str:
        return "x".join(
            f"{format_rational(l)},{format_rational(u)}" for l, u in self.bounds
        )

    def to_json(self) -> list:
        return [[format_rational(l), format_rational(u)] for l, u in self.bounds]

    @staticmethod
    def from_json(obj) -> "Box":
        return Box.make(*[(parse_rational(l), parse_rational(u)) for l, u in obj])


@dataclass(frozen=True)
class LinearBoundPair:
    """Affine lower and upper bounds over the inputs, valid on the box."""

    lower_coeffs: tuple[Fraction, ...]
    lower_const: Fraction
    upper_coeffs: tuple[Fraction, ...]
    upper_const: Fraction

    def to_json(self) -> dict:
        return {
            "lower": {
                "coeffs": [format_rational(c) for c in self.lower_coeffs],
                "const": format_rational(self.lower_const),
            },
            "upper": {
                "coeffs": [format_rational(c) for c in self.upper_coeffs],
                "const": format_rational(self.upper_const),
            },
        }


@dataclass(frozen=True)
class AnalysisResult:
    relaxation: str
    out_lower: Fraction
    out_upper: Fraction
    detail: dict

    def __post_init__(self) -> None:
        if self.out_lower > self.out_upper:
            raise AssertionError("analysis produced an empty interval")

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return self.out_lower, self.out_upper

    def to_json(self) -> dict:
        return {
            "relax": self.relaxation,
            "lower": format_rational(self.out_lower),
            "upper": format_rational(self.out_upper),
            "detail": self.detail,
        }


def analyze(net: ReluNetwork, box: Box, relax: str) -> AnalysisResult:
    """Run the named relaxation; one of ibp, dp0, dp1, tri, mn."""
    if relax == "ibp":
        return ibp(net, box)
    if relax == "dp0":
        return deeppoly(net, box, 0)
    if relax == "dp1":
        return deeppoly(net, box, 1)
    if relax == "tri":
        return triangle(net, box)
    if relax == "mn":
        return multineuron_single_layer(net, box)
    raise ValueError(f"unknown relaxation {relax!r}; one of {RELAXATIONS}")


def _check_box(net: ReluNetwork, box: Box) -> None:
    if box.dim != net.input_dim:
        raise ValueError(
            f"box has {box.dim} dimensions, network expects {net.input_dim}"
        )


# ---------------------------------------------------------------------------
# Interval propagation


def _ibp_core(net: ReluNetwork, box: Box):
    """Per-neuron (pre, post) intervals."""
    pre: list[tuple[Fraction, Fraction]] = []
    post: list[tuple[Fraction, Fraction]] = []
    zero = Fraction(0)
    for nr in net.neurons:
        lo = hi = nr.bias
        for i, c in nr.input_coeffs:
            a, b = box.bounds[i]
            lo += c * (a if c > 0 else b)
            hi += c * (b if c > 0 else a)
        for k, c in nr.neuron_coeffs:
            a, b = post[k]
            lo += c * (a if c > 0 else b)
            hi += c * (b if c > 0 else a)
        pre.append((lo, hi))
        if nr.act == RELU:
            post.append((max(zero, lo), max(zero, hi)))
        else:
            post.append((lo, hi))
    return pre, post


def ibp(net: ReluNetwork, box: Box) -> AnalysisResult:
    _check_box(net, box)
    pre, post = _ibp_core(net, box)
    lo, hi = post[net.output]
    detail = {
        "neuron_intervals": [
            [format_rational(a), format_rational(b)] for a, b in post
        ]
    }
    return AnalysisResult(relaxation="ibp", out_lower=lo, out_upper=hi, detail=detail)


# ---------------------------------------------------------------------------
# DeepPoly with a fixed lower slope

# Affine expressions over inputs and neuron post-activations are kept as
# (const, {input: coeff}, {neuron: coeff}) with zero coefficients absent.


def _aff_const(c: Fraction):
    return [c, {}, {}]


def _aff_of_neuron(nr) -> list:
    return [nr.bias, {i: c for i, c in nr.input_coeffs},
            {k: c for k, c in nr.neuron_coeffs}]


def _aff_add_scaled(dst: list, src: list, f: Fraction) -> None:
    dst[0] += f * src[0]
    for part in (1, 2):
        d = dst[part]
        for k, c in src[part].items():
            v = d.get(k, Fraction(0)) + f * c
            if v:
                d[k] = v
            else:
                d.pop(k, None)


def _backsub(expr: list, rels: list, want_lower: bool) -> list:
    """Substitute neuron symbols down to the inputs, tightest side first.

    ``rels[k]`` holds the relational (lower, upper) bounds of neuron k's
    post-activation over its predecessors.  Symbols are eliminated from
    the highest index down, picking the side that preserves the bound's
    direction given the accumulated coefficient's sign.
    """
    out = [expr[0], dict(expr[1]), dict(expr[2])]
    while out[2]:
        k = max(out[2])
        c = out[2].pop(k)
        lo, hi = rels[k]
        side = lo if ((c > 0) == want_lower) else hi
        _aff_add_scaled(out, side, c)
    return out


def _concretize(aff: list, box: Box, want_lower: bool) -> Fraction:
    v = aff[0]
    for i, c in aff[1].items():
        l, u = box.bounds[i]
        if (c > 0) == want_lower:
            v += c * l
        else:
            v += c * u
    return v


def _dp_core(net: ReluNetwork, box: Box, lam: int):
    """Relational bounds, concrete pre-activation bounds, per neuron."""
    rels: list[tuple[list, list]] = []
    pre_bounds: list[tuple[Fraction, Fraction]] = []
    lam = Fraction(lam)
    for nr in net.neurons:
        e = _aff_of_neuron(nr)
        lo = _concretize(_backsub(e, rels, True), box, True)
        hi = _concretize(_backsub(e, rels, False), box, False)
        pre_bounds.append((lo, hi))
        if nr.act == ID or lo >= 0:
            rels.append((e, e))
        elif hi <= 0:
            z = _aff_const(Fraction(0))
            rels.append((z, z))
        else:
            lower = _aff_const(Fraction(0))
            _aff_add_scaled(lower, e, lam)
            slope = hi / (hi - lo)
            upper = _aff_const(-slope * lo)
            _aff_add_scaled(upper, e, slope)
            rels.append((lower, upper))
    return rels, pre_bounds


def _aff_to_dense(aff: list, dim: int) -> tuple[tuple[Fraction, ...], Fraction]:
    return tuple(aff[1].get(i, Fraction(0)) for i in range(dim)), aff[0]


def deeppoly(net: ReluNetwork, box: Box, lam: int) -> AnalysisResult:
    _check_box(net, box)
    if lam not in (0, 1):
        raise ValueError("lower-bound slope must be 0 or 1")
    rels, pre_bounds = _dp_core(net, box, lam)
    pairs = []
    for j in range(len(net.neurons)):
        lo_aff = _backsub(rels[j][0], rels, True)
        hi_aff = _backsub(rels[j][1], rels, False)
        lc, lb = _aff_to_dense(lo_aff, box.dim)
        uc, ub = _aff_to_dense(hi_aff, box.dim)
        pairs.append(
            LinearBoundPair(
                lower_coeffs=lc, lower_const=lb, upper_coeffs=uc, upper_const=ub
            )
        )
    out = pairs[net.output]
    lo = _concretize(
        [out.lower_const, dict(enumerate(out.lower_coeffs)), {}], box, True
    )
    hi = _concretize(
        [out.upper_const, dict(enumerate(out.upper_coeffs)), {}], box, False
    )
    detail = {
        "lambda": lam,
        "neuron_bounds": [p.to_json() for p in pairs],
        "pre_bounds": [
            [format_rational(a), format_rational(b)] for a, b in pre_bounds
        ],
    }
    return AnalysisResult(
        relaxation=f"dp{lam}", out_lower=lo, out_upper=hi, detail=detail
    )


# ---------------------------------------------------------------------------
# Triangle: the per-neuron hull as one exact LP

# Expressions here run over LP variables: indices < dim are the inputs,
# higher indices are post-activations of unstable ReLUs.  Stable ReLUs
# and identity neurons are eliminated by substitution, so the LP stays
# as small as the instance allows.


class _TriState:
    def __init__(self, net: ReluNetwork, box: Box) -> None:
        self.net = net
        self.box = box
        self.dim = box.dim
        self.nvars = box.dim
        # rows: ({var: coeff}, rhs) meaning sum <= rhs
        self.rows: list[tuple[dict[int, Fraction], Fraction]] = []
        self.relu_vars: dict[int, tuple[dict, Fraction, Fraction, Fraction]] = {}
        # relu_vars: var -> (pre coeffs, pre const, l, u)
        self.separable = box.dim == 1

    def expr_bounds(self, coeffs: dict, const: Fraction):
        if all(v < self.dim for v in coeffs):
            lo = hi = const
            for i, c in coeffs.items():
                l, u = self.box.bounds[i]
                lo += c * (l if c > 0 else u)
                hi += c * (u if c > 0 else l)
            return lo, hi
        if self.separable:
            f_lo, f_hi = self._separable_envelopes(coeffs, const)
            (l, u) = self.box.bounds[0]
            return exact_range(f_lo, l, u)[0], exact_range(f_hi, l, u)[1]
        lo, _ = self._lp_bound(coeffs, const, True)
        hi, _ = self._lp_bound(coeffs, const, False)
        return lo, hi

    def _separable_envelopes(self, coeffs: dict, const: Fraction):
        """Lower and upper envelopes in x of an expression over the
        input and independently constrained ReLU variables.

        Given x, each unstable ReLU's variable y ranges over the triangle
        above v(x): from relu(v(x)) up to the chord.  The expression is
        linear in each y, so its extremes pick per-variable envelopes by
        coefficient sign; the result is a piecewise-linear function of x
        whose extremes equal the LP optima.
        """
        l, u = self.box.bounds[0]
        base = const + Fraction(0)
        cx = coeffs.get(0, Fraction(0))
        lo_terms = []
        hi_terms = []
        for v, c in coeffs.items():
            if v < self.dim:
                continue
            pc, pb, pl, pu = self.relu_vars[v]
            a = pc.get(0, Fraction(0))
            vfun = Cpwl1D(points=((l, a * l + pb), (u, a * u + pb)))
            slope = pu / (pu - pl)
            chord = Cpwl1D(
                points=(
                    (l, slope * (a * l + pb - pl)),
                    (u, slope * (a * u + pb - pl)),
                )
            )
            lower_env = cpwl_relu(vfun)
            if c > 0:
                lo_terms.append((c, lower_env))
                hi_terms.append((c, chord))
            else:
                lo_terms.append((c, chord))
                hi_terms.append((c, lower_env))
        ident = Cpwl1D(points=((l, l), (u, u)))
        lo_terms.append((cx, ident))
        hi_terms.append((cx, ident))
        f_lo = affine_combination(lo_terms, bias=base)
        f_hi = affine_combination(hi_terms, bias=base)
        return f_lo, f_hi

    def materialize(self) -> list[tuple[dict[int, Fraction], Fraction]]:
        rows = list(self.rows)
        for i in range(self.dim):
            l, u = self.box.bounds[i]
            rows.append(({i: Fraction(1)}, u))
            rows.append(({i: Fraction(-1)}, -l))
        return rows

    def _lp_bound(self, coeffs: dict, const: Fraction, want_lower: bool):
        prog = LinProgram(num_vars=self.nvars, maximize=not want_lower)
        for rc, rhs in self.materialize():
            dense = [Fraction(0)] * self.nvars
            for v, c in rc.items():
                dense[v] = c
            prog.add_constraint(dense, "<=", rhs)
        obj = [Fraction(0)] * self.nvars
        for v, c in coeffs.items():
            obj[v] = c
        prog.objective = obj
        res = lp_solve(prog)
        assert isinstance(res, LpOptimal), "triangle LP must be feasible and bounded"
        return const + res.value, res.point

    def add_unstable(self, coeffs: dict, const: Fraction, lo, hi) -> int:
        y = self.nvars
        self.nvars += 1
        if any(v >= self.dim for v in coeffs):
            self.separable = False
        # y >= 0
        self.rows.append(({y: Fraction(-1)}, Fraction(0)))
        # y >= v  =>  v - y <= 0
        row = dict(coeffs)
        row[y] = row.get(y, Fraction(0)) - 1
        self.rows.append((row, -const))
        # (u - l) y <= u (v - l)  =>  (u-l) y - u v <= u (const' ... )
        row2 = {v: -hi * c for v, c in coeffs.items()}
        row2[y] = row2.get(y, Fraction(0)) + (hi - lo)
        self.rows.append((row2, hi * (const - lo)))
        self.relu_vars[y] = (dict(coeffs), const, lo, hi)
        return y


def _tri_core(net: ReluNetwork, box: Box):
    st = _TriState(net, box)
    exprs: list[tuple[dict, Fraction]] = []
    pre_bounds: dict[int, tuple[Fraction, Fraction]] = {}
    for j, nr in enumerate(net.neurons):
        coeffs: dict[int, Fraction] = {}
        const = nr.bias
        work = [(const, {i: c for i, c in nr.input_coeffs})]
        for i, c in nr.input_coeffs:
            coeffs[i] = coeffs.get(i, Fraction(0)) + c
        for k, c in nr.neuron_coeffs:
            kc, kb = exprs[k]
            const += c * kb
            for v, cv in kc.items():
                nv = coeffs.get(v, Fraction(0)) + c * cv
                if nv:
                    coeffs[v] = nv
                else:
                    coeffs.pop(v, None)
        coeffs = {v: c for v, c in coeffs.items() if c}
        if nr.act == ID:
            exprs.append((coeffs, const))
            continue
        lo, hi = st.expr_bounds(coeffs, const)
        pre_bounds[j] = (lo, hi)
        if lo >= 0:
            exprs.append((coeffs, const))
        elif hi <= 0:
            exprs.append(({}, Fraction(0)))
        else:
            y = st.add_unstable(coeffs, const, lo, hi)
            exprs.append(({y: Fraction(1)}, Fraction(0)))
    return st, exprs, pre_bounds


def triangle(net: ReluNetwork, box: Box) -> AnalysisResult:
    _check_box(net, box)
    st, exprs, pre_bounds = _tri_core(net, box)
    coeffs, const = exprs[net.output]
    lo_point = hi_point = None
    if all(v < st.dim for v in coeffs) or st.separable:
        lo, hi = st.expr_bounds(coeffs, const)
    else:
        lo, lo_pt = st._lp_bound(coeffs, const, True)
        hi, hi_pt = st._lp_bound(coeffs, const, False)
        lo_point = [format_rational(v) for v in lo_pt[: st.dim]]
        hi_point = [format_rational(v) for v in hi_pt[: st.dim]]
    detail = {
        "lp_variables": st.nvars,
        "lp_rows": len(st.rows) + 2 * st.dim,
        "relu_pre_bounds": {
            str(j): [format_rational(a), format_rational(b)]
            for j, (a, b) in sorted(pre_bounds.items())
        },
    }
    if lo_point is not None:
        detail["argmin"] = lo_point
        detail["argmax"] = hi_point
    return AnalysisResult(relaxation="tri", out_lower=lo, out_upper=hi, detail=detail)


# ---------------------------------------------------------------------------
# Joint multi-neuron hull for univariate single-layer networks


def _check_single_layer(net: ReluNetwork) -> None:
    """A ReLU may not depend, directly or through identity neurons, on
    another ReLU; that is the single-hidden-layer shape."""
    touches_relu = []
    for j, nr in enumerate(net.neurons):
        dep = any(touches_relu[k] for k, _ in nr.neuron_coeffs)
        if nr.act == RELU and dep:
            raise ValueError(
                f"neuron {j}: ReLU depends on another ReLU; not a single-layer network"
            )
        touches_relu.append(dep or nr.act == RELU)


def multineuron_single_layer(net: ReluNetwork, box: Box) -> AnalysisResult:
    _check_box(net, box)
    if net.input_dim != 1:
        raise ValueError("the joint-hull analysis needs a univariate network")
    _check_single_layer(net)
    l, u = box.bounds[0]
    if l == u:
        y = evaluate(net, [l])
        hull = HullPolygon(vertices=((l, y),))
        lo = hi = y
    else:
        from .network import to_cpwl

        f = to_cpwl(net, l, u)
        hull = convex_hull_2d(f.points)
        lo, hi = hull.y_span
    detail = {
        "hull": [[format_rational(x), format_rational(y)] for x, y in hull.vertices]
    }
    return AnalysisResult(relaxation="mn", out_lower=lo, out_upper=hi, detail=detail)


# ---------------------------------------------------------------------------


def preactivation_bounds(net: ReluNetwork, box: Box, analyzer: str):
    """Pre-activation (l, u) per neuron index under the given analyzer.

    The triangle analyzer reports bounds for ReLU neurons only (identity
    neurons are eliminated before its LP sees them).
    """
    _check_box(net, box)
    if analyzer == "ibp":
        pre, _ = _ibp_core(net, box)
        return dict(enumerate(pre))
    if analyzer in ("dp0", "dp1"):
        _, pre = _dp_core(net, box, 0 if analyzer == "dp0" else 1)
        return dict(enumerate(pre))
    if analyzer == "tri":
        _, _, pre_bounds = _tri_core(net, box)
        return pre_bounds
    raise ValueError(f"no pre-activation bounds for analyzer {analyzer!r}")
