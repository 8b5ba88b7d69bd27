from fractions import Fraction as Q

import pytest

from relurelax.analyzers import Box
from relurelax.checker import (
    BoxFamily,
    EncodingMismatchError,
    abs_function,
    breakpoint_spans,
    check_precise,
    grid_boxes_2d,
    max_witness_network,
    random_intervals,
    standard_family,
    table1_matrix,
)
from relurelax.constructors import dp0_precise_convex, ibp_monotone
from relurelax.cpwl import Cpwl1D


def test_breakpoint_spans():
    fam = breakpoint_spans([0, 1, 2])
    boxes = set(fam.boxes)
    assert Box.make((0, 2)) in boxes
    assert Box.make((0, 1)) in boxes
    assert Box.make((Q(1, 2), Q(3, 2))) in boxes
    assert len(fam.boxes) == 4


def test_random_intervals_deterministic():
    a = random_intervals(0, 1, 10, 3)
    b = random_intervals(0, 1, 10, 3)
    assert a.boxes == b.boxes
    for box in a.boxes:
        l, u = box.bounds[0]
        assert 0 <= l < u <= 1


def test_family_merge_dedupes():
    fam = breakpoint_spans([0, 1]) + breakpoint_spans([0, 1])
    assert len(fam.boxes) == 1


def test_grid_boxes_2d():
    fam = grid_boxes_2d(Box.make((0, 1), (0, 1)), 2)
    assert len(fam.boxes) == 9
    assert Box.make((0, Q(1, 2)), (Q(1, 2), 1)) in set(fam.boxes)


def test_check_precise_on_precise_encoding():
    f = Cpwl1D.from_points([(0, 0), (1, 2), (2, 3)])
    net = ibp_monotone(f)
    rep = check_precise(net, f, "ibp", standard_family(f, random_count=20))
    assert rep.all_precise
    assert rep.witness is None


def test_check_precise_finds_witness():
    f = abs_function()
    net = dp0_precise_convex(f)
    rep = check_precise(net, f, "ibp", standard_family(f, random_count=0))
    assert not rep.all_precise
    assert rep.witness is not None
    wbox = Box.parse(rep.witness["box"])
    l, u = wbox.bounds[0]
    assert l < 0 < u


def test_check_precise_rejects_wrong_encoding():
    f = abs_function()
    g = Cpwl1D.from_points([(-1, 1), (0, 0), (1, 2)])
    net = dp0_precise_convex(f)
    with pytest.raises(EncodingMismatchError):
        check_precise(net, g, "ibp", standard_family(g, random_count=0))


def test_check_precise_oracle_mode():
    net = max_witness_network()
    fam = BoxFamily(strategy="unit", boxes=(Box.make((0, 1), (0, 1)),))
    rep = check_precise(net, None, "tri", fam, minimize=False)
    assert not rep.all_precise
    assert rep.witness["analyzer"] == ["0", "3/2"]
    assert rep.witness["oracle"] == ["0", "1"]
    assert rep.witness["argmax"] == ["1", "1"]


def test_report_serialization():
    f = abs_function()
    net = dp0_precise_convex(f)
    rep = check_precise(net, f, "dp0", standard_family(f, random_count=5))
    obj = rep.to_json()
    assert obj["surrogate"] is True
    assert obj["all_precise"] is True
    rows = list(rep.csv_rows())
    assert rows[0].startswith("box,")
    assert len(rows) == len(rep.entries) + 1


def test_table1_small_matrix_layout():
    rep = table1_matrix(count=3, max_segments=5, seed=1, random_boxes=3)
    assert rep.symbol("R", "ibp", "cpwl") == "✗"
    assert rep.symbol("R", "ibp", "monotone") == "✓"
    assert rep.symbol("R", "ibp", "convex") == "✗"
    assert rep.symbol("R", "ibp", "monotone-convex") == "✓"
    for relax in ("dp0", "dp1", "tri"):
        assert rep.symbol("R", relax, "cpwl") == "?"
        for klass in ("monotone", "convex", "monotone-convex"):
            assert rep.symbol("R", relax, klass) == "✓"
    for klass in ("cpwl", "monotone", "convex", "monotone-convex"):
        assert rep.symbol("R", "mn", klass) == "✓"
        assert rep.symbol("R2", "tri", klass) == "✗"
    text = rep.render()
    assert "Multi-Neuron" in text and "R^2" in text
    json_obj = rep.to_json()
    assert len(json_obj["cells"]) == 24
