"""Rewrite calculus for networks whose ReLUs all switch on one hyperplane.

A FormedNetwork is the recursive shape h = h_left + W * relu(h_right)
over a base b + W0 x, together with the kink hyperplane {x : w.x = 0}
on which every unstable ReLU switches.  Such networks collapse to a
single-layer form b + Wx + alpha * relu(w.x) that computes the same
function while its triangle analysis is never looser on any box.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .analyzers import Box, triangle
from .lp import LinProgram, LpInfeasible, LpOptimal, lp_solve
from .network import (
    ID,
    RELU,
    KinkHyperplane,
    NetworkBuilder,
    ReluNetwork,
    classify_relu_stability,
    evaluate,
)
from .rational import format_rational

__all__ = [
    "FormedBase",
    "FormedLayer",
    "FormedNetwork",
    "MisalignedReluError",
    "simplify_relu_sum",
    "simplify_composed",
    "to_network_form",
    "to_relu_network",
    "collapse_to_single_layer",
    "verify_replacement",
    "ReplacementReport",
    "random_formed",
]


class MisalignedReluError(ValueError):
    """A ReLU is neither stable on the box nor switching on the kink."""

    def __init__(self, neuron, message: str) -> None:
        super().__init__(message)
        self.neuron = neuron


@dataclass(frozen=True)
class FormedBase:
    """Affine vector b + W0 x, one (bias, row) per output component."""

    bias: tuple[Fraction, ...]
    weights: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if len(self.bias) != len(self.weights):
            raise ValueError("bias and weight rows must align")
        widths = {len(r) for r in self.weights}
        if len(widths) > 1:
            raise ValueError("ragged weight rows")

    @property
    def out_dim(self) -> int:
        return len(self.bias)


@dataclass(frozen=True)
class FormedLayer:
    """h_left + weights * relu(h_right)."""

    left: "FormedPart"
    weights: tuple[tuple[Fraction, ...], ...]
    right: "FormedPart"

    def __post_init__(self) -> None:
        if len(self.weights) != self.left.out_dim:
            raise ValueError("weights must have one row per left component")
        for row in self.weights:
            if len(row) != self.right.out_dim:
                raise ValueError("weight row width must match right components")

    @property
    def out_dim(self) -> int:
        return self.left.out_dim


FormedPart = Union[FormedBase, FormedLayer]


def part_depth(part: FormedPart) -> int:
    if isinstance(part, FormedBase):
        return 0
    return 1 + max(part_depth(part.left), part_depth(part.right))


@dataclass(frozen=True)
class FormedNetwork:
    part: FormedPart
    kink: KinkHyperplane
    box: Box

    def __post_init__(self) -> None:
        if self.part.out_dim != 1:
            raise ValueError("the top-level form must be scalar")
        if len(self.kink.w) != self.box.dim:
            raise ValueError("kink normal and box dimension must agree")

    @property
    def input_dim(self) -> int:
        return self.box.dim

    @property
    def depth(self) -> int:
        return part_depth(self.part)


# ---------------------------------------------------------------------------
# The two pointwise simplification identities


def simplify_relu_sum(A: Sequence, w: Sequence):
    """Merge sum_i A_i relu(w_i z) into gamma * z + alpha * relu(z)."""
    A = [Fraction(a) for a in A]
    w = [Fraction(v) for v in w]
    if len(A) != len(w):
        raise ValueError("A and w must have the same length")
    gamma = sum((a * v for a, v in zip(A, w) if v < 0), Fraction(0))
    alpha = sum((a * v for a, v in zip(A, w) if v > 0), Fraction(0)) - gamma
    return gamma, alpha


def simplify_composed(gamma, alpha):
    """Rewrite relu(gamma * z + alpha * relu(z)) as gamma' z + alpha' relu(z)."""
    gamma = Fraction(gamma)
    alpha = Fraction(alpha)
    g2 = -max(Fraction(0), -gamma)
    a2 = max(Fraction(0), alpha + gamma) - g2
    return g2, a2


# ---------------------------------------------------------------------------
# Structural helpers


def _pad(part: FormedPart, extra: int) -> FormedPart:
    if extra == 0:
        return part
    if isinstance(part, FormedBase):
        width = len(part.weights[0]) if part.weights else 0
        zrow = (Fraction(0),) * width
        return FormedBase(
            bias=part.bias + (Fraction(0),) * extra,
            weights=part.weights + (zrow,) * extra,
        )
    zrow = (Fraction(0),) * part.right.out_dim
    return FormedLayer(
        left=_pad(part.left, extra),
        weights=part.weights + (zrow,) * extra,
        right=part.right,
    )


def _affmap(E: Sequence[Sequence[Fraction]], consts: Sequence[Fraction],
            part: FormedPart) -> FormedPart:
    """The part computing E * part + consts, reshaped into the grammar."""
    if isinstance(part, FormedBase):
        bias = tuple(
            c + sum(e * b for e, b in zip(row, part.bias))
            for row, c in zip(E, consts)
        )
        width = len(part.weights[0]) if part.weights else 0
        weights = tuple(
            tuple(
                sum(e * part.weights[k][i] for k, e in enumerate(row))
                for i in range(width)
            )
            for row in E
        )
        return FormedBase(bias=bias, weights=weights)
    weights = tuple(
        tuple(
            sum(e * part.weights[k][m] for k, e in enumerate(row))
            for m in range(part.right.out_dim)
        )
        for row in E
    )
    return FormedLayer(
        left=_affmap(E, consts, part.left), weights=weights, right=part.right
    )


def to_relu_network(fn: FormedNetwork) -> ReluNetwork:
    """Translate the recursive structure into the flat network format."""
    nb = NetworkBuilder(fn.input_dim)

    def emit(part: FormedPart) -> list[int]:
        if isinstance(part, FormedBase):
            return [
                nb.add(bias=b, inputs={i: c for i, c in enumerate(row) if c})
                for b, row in zip(part.bias, part.weights)
            ]
        lids = emit(part.left)
        rids = emit(part.right)
        relus = [nb.add(refs={r: 1}, act=RELU) for r in rids]
        out = []
        for lid, row in zip(lids, part.weights):
            refs = {lid: Fraction(1)}
            for rj, c in zip(relus, row):
                if c:
                    refs[rj] = refs.get(rj, Fraction(0)) + c
            out.append(nb.add(refs=refs))
        return out

    return nb.build(emit(fn.part)[0])


# ---------------------------------------------------------------------------
# Collapse


def _split_range(beta, a, alpha, w, box: Box):
    """Exact range of beta + a.x + alpha*relu(w.x) over the box, by
    solving the two sign patterns of w.x as LPs."""
    d = box.dim
    lo = hi = None
    for on in (True, False):
        coeffs = list(a)
        if on:
            for i in range(d):
                coeffs[i] += alpha * w[i]
        prog = LinProgram(num_vars=d, objective=coeffs)
        sign = Fraction(-1) if on else Fraction(1)
        prog.add_constraint([sign * v for v in w], "<=", 0)
        for i in range(d):
            l, u = box.bounds[i]
            unit = [Fraction(0)] * d
            unit[i] = Fraction(1)
            prog.add_constraint(unit, "<=", u)
            prog.add_constraint([Fraction(-1) * c for c in unit], "<=", -l)
        rmin = lp_solve(prog)
        if isinstance(rmin, LpInfeasible):
            continue
        prog.maximize = True
        rmax = lp_solve(prog)
        assert isinstance(rmin, LpOptimal) and isinstance(rmax, LpOptimal)
        if lo is None or beta + rmin.value < lo:
            lo = beta + rmin.value
        if hi is None or beta + rmax.value > hi:
            hi = beta + rmax.value
    assert lo is not None
    return lo, hi


def _align_factor(a: Sequence[Fraction], w: Sequence[Fraction]):
    """gamma with a = gamma * w, or None if a is not parallel to w."""
    i = next(k for k, v in enumerate(w) if v)
    gamma = a[i] / w[i]
    if all(av == gamma * wv for av, wv in zip(a, w)):
        return gamma
    return None


def _collapse_part(part: FormedPart, w, box: Box):
    """Per component: (beta, a, alpha) with value beta + a.x + alpha relu(w.x)."""
    if isinstance(part, FormedBase):
        return [(b, list(row), Fraction(0)) for b, row in zip(part.bias, part.weights)]
    left = _collapse_part(part.left, w, box)
    right = _collapse_part(part.right, w, box)
    rel = []
    for k, (beta, a, alpha) in enumerate(right):
        gamma = _align_factor(a, w) if beta == 0 else None
        if gamma is not None:
            g2, a2 = simplify_composed(gamma, alpha)
            rel.append((Fraction(0), [g2 * v for v in w], a2))
            continue
        lo, hi = _split_range(beta, a, alpha, w, box)
        if lo >= 0:
            rel.append((beta, a, alpha))
        elif hi <= 0:
            rel.append((Fraction(0), [Fraction(0)] * box.dim, Fraction(0)))
        else:
            raise MisalignedReluError(
                k, f"ReLU component {k} is unstable off the kink hyperplane"
            )
    out = []
    for (beta, a, alpha), wrow in zip(left, part.weights):
        b2 = beta
        a2 = list(a)
        al2 = alpha
        for c, (rb, ra, ralpha) in zip(wrow, rel):
            if not c:
                continue
            b2 += c * rb
            for i in range(box.dim):
                a2[i] += c * ra[i]
            al2 += c * ralpha
        out.append((b2, a2, al2))
    return out


def collapse_to_single_layer(fn: FormedNetwork) -> ReluNetwork:
    """The single-layer form b + Wx + alpha relu(w.x): same function on
    the box, triangle bounds contained in the original's."""
    (beta, a, alpha) = _collapse_part(fn.part, fn.kink.w, fn.box)[0]
    nb = NetworkBuilder(fn.input_dim)
    refs = {}
    if alpha:
        z = nb.add(inputs={i: c for i, c in enumerate(fn.kink.w) if c}, act=RELU)
        refs[z] = alpha
    out = nb.add(bias=beta, inputs={i: c for i, c in enumerate(a) if c}, refs=refs)
    return nb.build(out)


# ---------------------------------------------------------------------------
# From flat networks into the form


def to_network_form(net: ReluNetwork, box: Box, kink: KinkHyperplane) -> FormedNetwork:
    """Absorb stable ReLUs and organize the kink-aligned ones by depth.

    Raises MisalignedReluError if some ReLU is unstable on the box but
    its pre-activation does not switch on the kink hyperplane.
    """
    if box.dim != net.input_dim or len(kink.w) != net.input_dim:
        raise ValueError("box, kink and network dimensions must agree")
    d = net.input_dim
    w = kink.w
    stab = {s.neuron: s.kind for s in classify_relu_stability(net, box, "tri")}

    # Expression per neuron: (const, x-coefficients, {kept relu: coeff}).
    exprs: list[tuple[Fraction, list[Fraction], dict[int, Fraction]]] = []
    kept: list[int] = []
    level: dict[int, int] = {}
    pre_of: dict[int, tuple[Fraction, list[Fraction], dict[int, Fraction]]] = {}
    for j, nr in enumerate(net.neurons):
        const = nr.bias
        xc = [Fraction(0)] * d
        rc: dict[int, Fraction] = {}
        for i, c in nr.input_coeffs:
            xc[i] += c
        for k, c in nr.neuron_coeffs:
            kconst, kxc, krc = exprs[k]
            const += c * kconst
            for i in range(d):
                xc[i] += c * kxc[i]
            for r, cv in krc.items():
                nv = rc.get(r, Fraction(0)) + c * cv
                if nv:
                    rc[r] = nv
                else:
                    rc.pop(r, None)
        if nr.act == ID:
            exprs.append((const, xc, rc))
            continue
        kind = stab[j]
        if kind == "stably_active":
            exprs.append((const, xc, rc))
        elif kind == "stably_inactive":
            exprs.append((Fraction(0), [Fraction(0)] * d, {}))
        else:
            if const != 0 or (_align_factor(xc, w) is None and any(xc)):
                raise MisalignedReluError(
                    j, f"neuron {j} is unstable but does not switch on the kink"
                )
            if not any(xc) and not rc:
                raise MisalignedReluError(
                    j, f"neuron {j} is unstable yet constant; inconsistent bounds"
                )
            kept.append(j)
            level[j] = 1 + max((level[r] for r in rc), default=0)
            pre_of[j] = (const, xc, rc)
            exprs.append((Fraction(0), [Fraction(0)] * d, {j: Fraction(1)}))

    # Build the recursive structure level by level.  The running part V
    # computes [x, posts of kept ReLUs up to the current level].
    order = sorted(kept, key=lambda j: (level[j], j))
    comp_index = {("x", i): i for i in range(d)}
    V: FormedPart = FormedBase(
        bias=(Fraction(0),) * d,
        weights=tuple(
            tuple(Fraction(1 if i == k else 0) for k in range(d)) for i in range(d)
        ),
    )
    max_level = max((level[j] for j in kept), default=0)
    for lev in range(1, max_level + 1):
        batch = [j for j in order if level[j] == lev]
        width = V.out_dim

        def as_row(e):
            const, xc, rc = e
            row = [Fraction(0)] * width
            for i in range(d):
                row[i] = xc[i]
            for r, c in rc.items():
                row[comp_index[("r", r)]] = c
            return row, const

        rows, consts = zip(*(as_row(pre_of[j]) for j in batch))
        right = _affmap(rows, consts, V)
        m = len(batch)
        wmat = tuple(
            (Fraction(0),) * m for _ in range(width)
        ) + tuple(
            tuple(Fraction(1 if k == t else 0) for t in range(m)) for k in range(m)
        )
        V = FormedLayer(left=_pad(V, m), weights=wmat, right=right)
        for k, j in enumerate(batch):
            comp_index[("r", j)] = width + k

    const, xc, rc = exprs[net.output]
    row = [Fraction(0)] * V.out_dim
    for i in range(d):
        row[i] = xc[i]
    for r, c in rc.items():
        row[comp_index[("r", r)]] = c
    root = _affmap((row,), (const,), V)
    return FormedNetwork(part=root, kink=kink, box=box)


# ---------------------------------------------------------------------------
# Replacement verification


@dataclass(frozen=True)
class ReplacementReport:
    ok: bool
    violations: tuple[dict, ...]
    boxes_checked: int
    points_per_box: int

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "boxes_checked": self.boxes_checked,
            "points_per_box": self.points_per_box,
            "violations": list(self.violations),
        }


def _sample_point(box: Box, rng: random.Random):
    pt = []
    for l, u in box.bounds:
        den = rng.randint(1, 16)
        num = rng.randint(0, den)
        pt.append(l + (u - l) * Fraction(num, den))
    return pt


def verify_replacement(h: ReluNetwork, h2: ReluNetwork, boxes: Sequence[Box],
                       samples: int = 100, seed: int = 0) -> ReplacementReport:
    """Check that h2 computes the same function as h and that its
    triangle interval is contained in h's on every given box."""
    if h.input_dim != h2.input_dim:
        raise ValueError("networks must share an input dimension")
    rng = random.Random(seed)
    violations: list[dict] = []
    for bi, box in enumerate(boxes):
        for _ in range(samples):
            x = _sample_point(box, rng)
            va, vb = evaluate(h, x), evaluate(h2, x)
            if va != vb:
                violations.append(
                    {
                        "box": box.format(),
                        "kind": "pointwise",
                        "point": [format_rational(v) for v in x],
                        "left": format_rational(va),
                        "right": format_rational(vb),
                    }
                )
                break
        ra = triangle(h, box)
        rb = triangle(h2, box)
        if not (ra.out_lower <= rb.out_lower and rb.out_upper <= ra.out_upper):
            violations.append(
                {
                    "box": box.format(),
                    "kind": "containment",
                    "left": [format_rational(ra.out_lower), format_rational(ra.out_upper)],
                    "right": [format_rational(rb.out_lower), format_rational(rb.out_upper)],
                }
            )
    return ReplacementReport(
        ok=not violations,
        violations=tuple(violations),
        boxes_checked=len(boxes),
        points_per_box=samples,
    )


# ---------------------------------------------------------------------------
# Random generation for property tests


def _rand_coeff(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-3, 3), rng.choice([1, 1, 2]))


def _rand_nonzero(rng: random.Random) -> Fraction:
    while True:
        c = _rand_coeff(rng)
        if c:
            return c


def _gen_aligned(depth: int, width: int, w, rng: random.Random) -> FormedPart:
    if depth == 0:
        rows = []
        for _ in range(width):
            g = _rand_nonzero(rng)
            rows.append(tuple(g * v for v in w))
        return FormedBase(bias=(Fraction(0),) * width, weights=tuple(rows))
    rw = rng.randint(1, 2)
    left = _gen_aligned(depth - 1, width, w, rng)
    right = _gen_aligned(depth - 1, rw, w, rng)
    weights = tuple(tuple(_rand_coeff(rng) for _ in range(rw)) for _ in range(width))
    return FormedLayer(left=left, weights=weights, right=right)


def _gen_part(depth: int, width: int, w, rng: random.Random) -> FormedPart:
    d = len(w)
    if depth == 0:
        return FormedBase(
            bias=tuple(_rand_coeff(rng) for _ in range(width)),
            weights=tuple(
                tuple(_rand_coeff(rng) for _ in range(d)) for _ in range(width)
            ),
        )
    rw = rng.randint(1, 2)
    left = _gen_part(depth - 1, width, w, rng)
    right = _gen_aligned(depth - 1, rw, w, rng)
    weights = tuple(tuple(_rand_coeff(rng) for _ in range(rw)) for _ in range(width))
    return FormedLayer(left=left, weights=weights, right=right)


def random_formed(depth: int, seed, kink: KinkHyperplane | None = None,
                  box: Box | None = None) -> FormedNetwork:
    """Deterministic random FormedNetwork on [-1,1]^2 with kink x = y."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    if kink is None:
        kink = KinkHyperplane(w=(Fraction(1), Fraction(-1)))
    if box is None:
        box = Box.make(*[(-1, 1)] * len(kink.w))
    part = _gen_part(depth, 1, kink.w, rng)
    return FormedNetwork(part=part, kink=kink, box=box)
