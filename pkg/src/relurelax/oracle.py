"""Brute-force ground truth, independent of the analyzers.

The univariate oracle compiles the network to its piecewise-linear form
and reads ranges off the breakpoints.  The multivariate oracle
enumerates ReLU activation patterns and solves one exact LP per pattern,
which is total (and honest about scale) for the small witness networks
this package studies.
"""

from __future__ import annotations

from fractions import Fraction

from .analyzers import Box
from .cpwl import exact_range
from .hull import HullPolygon, convex_hull_2d
from .lp import LinProgram, LpInfeasible, LpOptimal, lp_solve
from .network import RELU, ReluNetwork, evaluate, forward_values, to_cpwl

__all__ = [
    "OracleBudgetError",
    "exact_range_univariate",
    "exact_range_multivariate",
    "exact_hull_univariate",
]

PATTERN_CAP = 1 << 20


class OracleBudgetError(Exception):
    """The instance exceeds the brute-force enumeration budget."""


def exact_range_univariate(net: ReluNetwork, box: Box):
    """Exact (min, max) of a univariate network over the box."""
    if net.input_dim != 1:
        raise ValueError("univariate oracle needs input_dim 1")
    l, u = box.bounds[0]
    if l == u:
        y = evaluate(net, [l])
        return y, y
    f = to_cpwl(net, l, u)
    return exact_range(f, l, u)


def exact_hull_univariate(net: ReluNetwork, box: Box) -> HullPolygon:
    """Exact convex hull of the graph {(x, h(x))} over the box."""
    if net.input_dim != 1:
        raise ValueError("univariate oracle needs input_dim 1")
    l, u = box.bounds[0]
    if l == u:
        return HullPolygon(vertices=((l, evaluate(net, [l])),))
    f = to_cpwl(net, l, u)
    return convex_hull_2d(f.points)


def _ibp_prebounds(net: ReluNetwork, box: Box):
    from .analyzers import _ibp_core

    pre, _ = _ibp_core(net, box)
    return pre


def exact_range_multivariate(net: ReluNetwork, box: Box):
    """Exact (min, max) by activation-pattern enumeration.

    ReLUs that interval propagation already proves one-sided are fixed;
    the rest are enumerated.  Each pattern induces an affine network and
    a polytope (box rows plus the pattern's sign constraints); min and
    max over it come from exact LPs.
    """
    if box.dim != net.input_dim:
        raise ValueError("box dimension mismatch")
    if net.input_dim > 3:
        raise ValueError("multivariate oracle supports at most 3 inputs")
    relus = net.relu_indices()
    if len(relus) > 20:
        raise OracleBudgetError(f"too many ReLUs for enumeration: {len(relus)}")
    pre = _ibp_prebounds(net, box)
    free = [j for j in relus if pre[j][0] < 0 < pre[j][1]]
    if 1 << len(free) > PATTERN_CAP:
        raise OracleBudgetError(f"2^{len(free)} activation patterns exceed the cap")

    d = net.input_dim
    best_lo = best_hi = None
    for mask in range(1 << len(free)):
        active = {j: bool(mask >> i & 1) for i, j in enumerate(free)}
        # Symbolic affine forward pass under this pattern.
        exprs: list[tuple[list[Fraction], Fraction]] = []
        rows: list[tuple[list[Fraction], Fraction]] = []  # coeffs . x <= rhs
        for j, nr in enumerate(net.neurons):
            coeffs = [Fraction(0)] * d
            const = nr.bias
            for i, c in nr.input_coeffs:
                coeffs[i] += c
            for k, c in nr.neuron_coeffs:
                kc, kb = exprs[k]
                const += c * kb
                for i in range(d):
                    coeffs[i] += c * kc[i]
            if nr.act == RELU:
                if j in active:
                    on = active[j]
                elif pre[j][0] >= 0:
                    on = True
                else:
                    on = False
                if j in active:
                    if on:
                        rows.append(([-c for c in coeffs], const))
                    else:
                        rows.append((list(coeffs), -const))
                if not on:
                    coeffs = [Fraction(0)] * d
                    const = Fraction(0)
            exprs.append((coeffs, const))

        out_coeffs, out_const = exprs[net.output]
        prog = LinProgram(num_vars=d, objective=list(out_coeffs))
        for coeffs, rhs in rows:
            prog.add_constraint(coeffs, "<=", rhs)
        for i in range(d):
            l, u = box.bounds[i]
            unit = [Fraction(0)] * d
            unit[i] = Fraction(1)
            prog.add_constraint(unit, "<=", u)
            prog.add_constraint([-c for c in unit], "<=", -l)
        res_min = lp_solve(prog)
        if isinstance(res_min, LpInfeasible):
            continue
        prog.maximize = True
        res_max = lp_solve(prog)
        assert isinstance(res_min, LpOptimal) and isinstance(res_max, LpOptimal)
        lo = out_const + res_min.value
        hi = out_const + res_max.value
        if best_lo is None or lo < best_lo:
            best_lo = lo
        if best_hi is None or hi > best_hi:
            best_hi = hi
    assert best_lo is not None, "no feasible activation pattern; box cannot be valid"
    return best_lo, best_hi


def pattern_of(net: ReluNetwork, x) -> dict[int, bool]:
    """Which ReLUs are active (pre-activation >= 0) at the point x."""
    vals = forward_values(net, x)
    return {j: vals[j][0] >= 0 for j in net.relu_indices()}
