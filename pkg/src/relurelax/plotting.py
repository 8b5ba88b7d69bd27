"""Pointwise bound curves for univariate analyses, as data and figures.

For a fixed input x in the box, each relaxation admits a lowest and a
highest output value; sweeping x gives the shaded band around the
function graph.  The data path emits exact rationals in CSV; the figure
path renders the same rows with matplotlib.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable

from .analyzers import Box, _tri_core, deeppoly, ibp, multineuron_single_layer
from .hull import _env_eval, _envelopes
from .network import ReluNetwork, evaluate
from .rational import format_rational

__all__ = ["bound_functions", "plot_rows", "write_csv", "render_figure"]


def _tri_pointwise(net: ReluNetwork, box: Box):
    st, exprs, _ = _tri_core(net, box)
    coeffs, const = exprs[net.output]
    if st.separable or all(v < st.dim for v in coeffs):
        if all(v < st.dim for v in coeffs):
            cx = coeffs.get(0, Fraction(0))

            def lower(x):
                return const + cx * x

            return lower, lower
        f_lo, f_hi = st._separable_envelopes(coeffs, const)
        return f_lo.eval, f_hi.eval

    def bound(x, want_lower):
        rows_backup = list(st.rows)
        st.rows.append(({0: Fraction(1)}, Fraction(x)))
        st.rows.append(({0: Fraction(-1)}, -Fraction(x)))
        try:
            val, _ = st._lp_bound(coeffs, const, want_lower)
        finally:
            st.rows[:] = rows_backup
        return val

    return (lambda x: bound(x, True)), (lambda x: bound(x, False))


def bound_functions(net: ReluNetwork, box: Box, relax: str):
    """(lower, upper) callables over x for a univariate network."""
    if net.input_dim != 1:
        raise ValueError("bound curves are defined for univariate networks")
    if relax == "ibp":
        res = ibp(net, box)
        return (lambda x: res.out_lower), (lambda x: res.out_upper)
    if relax in ("dp0", "dp1"):
        res = deeppoly(net, box, 0 if relax == "dp0" else 1)
        pair = res.detail["neuron_bounds"][net.output]

        def make(side):
            c = Fraction(side["coeffs"][0]) if side["coeffs"] else Fraction(0)
            b = Fraction(side["const"])
            return lambda x: b + c * x

        return make(pair["lower"]), make(pair["upper"])
    if relax == "tri":
        return _tri_pointwise(net, box)
    if relax == "mn":
        res = multineuron_single_layer(net, box)
        hull = [
            (Fraction(x), Fraction(y)) for x, y in res.detail["hull"]
        ]
        from .hull import HullPolygon

        poly = HullPolygon(vertices=tuple(hull))
        if len(hull) == 1:
            y = hull[0][1]
            return (lambda x: y), (lambda x: y)
        lo_env, hi_env = _envelopes(poly)
        return (
            lambda x: _env_eval(lo_env, Fraction(x)),
            lambda x: _env_eval(hi_env, Fraction(x)),
        )
    raise ValueError(f"unknown relaxation {relax!r}")


def plot_rows(net: ReluNetwork, box: Box, relax: str, samples: int = 64):
    """Rows (x, h(x), lower(x), upper(x)) on a uniform rational grid."""
    if samples < 1:
        raise ValueError("need at least one sample")
    l, u = box.bounds[0]
    lower, upper = bound_functions(net, box, relax)
    xs = [l + (u - l) * Fraction(k, samples) for k in range(samples + 1)]
    if l == u:
        xs = [l]
    return [(x, evaluate(net, [x]), lower(x), upper(x)) for x in xs]


def write_csv(rows: Iterable, stream) -> None:
    stream.write("x,value,lower,upper\n")
    for x, v, lo, hi in rows:
        stream.write(
            ",".join(format_rational(q) for q in (x, v, lo, hi)) + "\n"
        )


def render_figure(rows, path: str, title: str = "") -> None:
    """Draw the bound band and the function graph into an image file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [float(r[0]) for r in rows]
    vals = [float(r[1]) for r in rows]
    los = [float(r[2]) for r in rows]
    his = [float(r[3]) for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.fill_between(xs, los, his, alpha=0.25, label="relaxation")
    ax.plot(xs, vals, lw=1.6, label="network")
    ax.set_xlabel("x")
    ax.set_ylabel("h(x)")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
