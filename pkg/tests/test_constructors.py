import itertools
import random
from fractions import Fraction as Q

import pytest

from relurelax.analyzers import Box, analyze
from relurelax.checker import standard_family
from relurelax.constructors import (
    convex_encoding,
    dp0_precise_convex,
    dp1_substitute,
    ibp_monotone,
    mn_single_layer,
    parse_signs,
    step_network,
)
from relurelax.cpwl import Cpwl1D, exact_range, random_cpwl
from relurelax.network import evaluate, to_cpwl


def encodes(net, f):
    lo, hi = f.domain
    return to_cpwl(net, lo, hi) == f


def test_parse_signs():
    assert parse_signs("+-+") == (1, -1, 1)
    assert parse_signs([1, -1]) == (1, -1)
    with pytest.raises(ValueError):
        parse_signs("+0-")


def test_step_network_values():
    net = step_network(Q(0), Q(2), Q(3))
    assert evaluate(net, [Q(-1)]) == 0
    assert evaluate(net, [Q(1)]) == Q(3, 2)
    assert evaluate(net, [Q(5)]) == 3


def test_step_network_validation():
    with pytest.raises(ValueError):
        step_network(Q(1), Q(0), Q(1))
    with pytest.raises(ValueError):
        step_network(Q(0), Q(1), Q(-1))


def test_step_network_ibp_precise_on_spans():
    net = step_network(Q(0), Q(2), Q(3))
    f = to_cpwl(net, -1, 5)
    for l, u in ((-1, 5), (0, 2), (1, 3), (-1, 1)):
        res = analyze(net, Box.make((l, u)), "ibp")
        assert res.interval == exact_range(f, l, u)


@pytest.mark.parametrize("shape", ["monotone-increasing", "monotone-decreasing"])
def test_ibp_monotone_encodes(shape):
    rng = random.Random(17)
    for _ in range(10):
        f = random_cpwl(rng.randint(1, 7), shape, rng)
        assert encodes(ibp_monotone(f), f)


def test_ibp_monotone_precise():
    rng = random.Random(18)
    for _ in range(5):
        f = random_cpwl(rng.randint(2, 6), "monotone", rng)
        net = ibp_monotone(f)
        for box in standard_family(f, random_count=10, seed=rng).boxes:
            l, u = box.bounds[0]
            assert analyze(net, box, "ibp").interval == exact_range(f, l, u)


def test_convex_encoding_all_signs_encode():
    f = Cpwl1D.from_points([(0, 2), (1, 0), (2, 1), (3, 4)])
    for signs in itertools.product((1, -1), repeat=2):
        assert encodes(convex_encoding(f, signs), f)


def test_convex_encoding_concave():
    g = Cpwl1D.from_points([(0, 0), (1, 2), (2, 3), (3, 3)])
    assert encodes(convex_encoding(g, (1, 1)), g)


def test_convex_encoding_rejects_wrong_class():
    zig = Cpwl1D.from_points([(0, 0), (1, 1), (2, 0), (3, 1)])
    with pytest.raises(ValueError):
        convex_encoding(zig, (1, 1))


def test_convex_encoding_triangle_precise():
    rng = random.Random(19)
    for _ in range(5):
        f = random_cpwl(rng.randint(2, 5), "convex", rng)
        signs = tuple(rng.choice((1, -1)) for _ in range(len(f.points) - 2))
        net = convex_encoding(f, signs)
        for box in standard_family(f, random_count=5, seed=rng).boxes:
            l, u = box.bounds[0]
            assert analyze(net, box, "tri").interval == exact_range(f, l, u)


def test_dp0_precise_convex_cases():
    cases = [
        Cpwl1D.from_points([(0, 0), (1, 1), (2, 3)]),     # increasing
        Cpwl1D.from_points([(0, 3), (1, 1), (2, 0)]),     # decreasing
        Cpwl1D.from_points([(0, 1), (1, 0), (2, 0), (3, 2)]),  # flat bottom
        Cpwl1D.from_points([(-1, 1), (0, 0), (1, 1)]),    # interior minimum
    ]
    for f in cases:
        net = dp0_precise_convex(f)
        assert encodes(net, f)
        for box in standard_family(f, random_count=10, seed=0).boxes:
            l, u = box.bounds[0]
            assert analyze(net, box, "dp0").interval == exact_range(f, l, u)


def test_dp1_substitute_preserves_function():
    rng = random.Random(20)
    for _ in range(10):
        f = random_cpwl(rng.randint(2, 6), "convex", rng)
        net = dp0_precise_convex(f)
        net1 = dp1_substitute(net)
        assert encodes(net1, f)


def test_mn_single_layer_encodes_and_exact():
    rng = random.Random(21)
    for _ in range(10):
        f = random_cpwl(rng.randint(1, 7), "cpwl", rng)
        net = mn_single_layer(f)
        assert encodes(net, f)
        for box in standard_family(f, random_count=5, seed=rng).boxes:
            l, u = box.bounds[0]
            assert analyze(net, box, "mn").interval == exact_range(f, l, u)
