import io
from fractions import Fraction as Q

import pytest

from relurelax.analyzers import Box, analyze
from relurelax.network import NetworkBuilder, evaluate
from relurelax.plotting import (
    bound_functions,
    plot_rows,
    render_figure,
    write_csv,
)


def abs_net():
    nb = NetworkBuilder(1)
    p = nb.add(inputs={0: 1}, act="relu")
    n = nb.add(inputs={0: -1}, act="relu")
    return nb.build(nb.add(refs={p: 1, n: 1}))


BOX = Box.make((-1, 1))


@pytest.mark.parametrize("relax", ["ibp", "dp0", "dp1", "tri", "mn"])
def test_bound_functions_bracket_the_graph(relax):
    net = abs_net()
    lower, upper = bound_functions(net, BOX, relax)
    for k in range(-4, 5):
        x = Q(k, 4)
        v = evaluate(net, [x])
        assert lower(x) <= v <= upper(x)


@pytest.mark.parametrize("relax", ["dp0", "dp1", "tri", "mn"])
def test_bound_curves_attain_interval_endpoints(relax):
    # The pointwise band over the whole box must reach at least as far as
    # the concretized interval claims at its extreme points.
    net = abs_net()
    res = analyze(net, BOX, relax)
    lower, upper = bound_functions(net, BOX, relax)
    xs = [Q(k, 8) for k in range(-8, 9)]
    assert min(lower(x) for x in xs) == res.out_lower
    assert max(upper(x) for x in xs) == res.out_upper


def test_bound_functions_require_univariate():
    nb = NetworkBuilder(2)
    net = nb.build(nb.add(inputs={0: 1, 1: 1}))
    with pytest.raises(ValueError):
        bound_functions(net, Box.make((0, 1), (0, 1)), "ibp")


def test_plot_rows_and_csv():
    rows = plot_rows(abs_net(), BOX, "tri", samples=8)
    assert len(rows) == 9
    assert rows[0][0] == Q(-1)
    assert rows[-1][0] == Q(1)
    buf = io.StringIO()
    write_csv(rows, buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "x,value,lower,upper"
    assert lines[1] == "-1,1,1,1"


def test_render_figure(tmp_path):
    rows = plot_rows(abs_net(), BOX, "tri", samples=16)
    out = tmp_path / "band.png"
    render_figure(rows, str(out), title="tri")
    data = out.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
