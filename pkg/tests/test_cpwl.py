import random
from fractions import Fraction as Q

import pytest

from relurelax.cpwl import (
    Cpwl1D,
    SHAPES,
    affine_combination,
    classify,
    cpwl_relu,
    exact_range,
    random_cpwl,
)


def vee():
    return Cpwl1D.from_points([(-1, 1), (0, 0), (2, 2)])


def test_from_points_sorts_and_canonicalizes():
    f = Cpwl1D.from_points([(2, 2), (0, 0), (1, 1), (-1, 1)])
    assert f.points == ((Q(-1), Q(1)), (Q(0), Q(0)), (Q(2), Q(2)))


def test_from_points_rejects_conflicting_values():
    with pytest.raises(ValueError):
        Cpwl1D.from_points([(0, 0), (0, 1), (1, 2)])


def test_eval_and_domain():
    f = vee()
    assert f.domain == (Q(-1), Q(2))
    assert f.eval(Q(-1, 2)) == Q(1, 2)
    assert f.eval(1) == 1
    with pytest.raises(ValueError):
        f.eval(3)


def test_slopes():
    assert vee().slopes() == [Q(-1), Q(1)]


def test_restrict():
    f = vee().restrict(Q(-1, 2), Q(3, 2))
    assert f.points == ((Q(-1, 2), Q(1, 2)), (Q(0), Q(0)), (Q(3, 2), Q(3, 2)))


def test_exact_range():
    f = vee()
    assert exact_range(f, -1, 2) == (Q(0), Q(2))
    assert exact_range(f, Q(1, 2), 2) == (Q(1, 2), Q(2))
    with pytest.raises(ValueError):
        exact_range(f, -2, 0)


def test_affine_combination():
    f = Cpwl1D.from_points([(0, 0), (1, 1)])
    g = Cpwl1D.from_points([(0, 1), (Q(1, 2), 0), (1, 1)])
    h = affine_combination([(Q(2), f), (Q(-1), g)], bias=3)
    for x in (Q(0), Q(1, 4), Q(1, 2), Q(1)):
        assert h.eval(x) == 2 * f.eval(x) - g.eval(x) + 3


def test_cpwl_relu_inserts_crossings():
    f = Cpwl1D.from_points([(0, -1), (1, 1)])
    r = cpwl_relu(f)
    assert r.points == ((Q(0), Q(0)), (Q(1, 2), Q(0)), (Q(1), Q(1)))


def test_classify_monotone_convex():
    c = classify(Cpwl1D.from_points([(0, 0), (1, 1), (2, 3)]))
    assert c.monotone_increasing and c.convex and not c.concave


def test_classify_interior_minimum():
    c = classify(vee())
    assert c.convex and not c.monotone
    assert c.unique_interior_minimum_at == 0


def test_json_roundtrip():
    f = vee()
    assert Cpwl1D.from_json(f.to_json()) == f


def test_random_cpwl_classes():
    rng = random.Random(3)
    for shape in SHAPES:
        for _ in range(10):
            n = rng.randint(2, 7)
            f = random_cpwl(n, shape, rng)
            c = classify(f)
            assert len(f.points) == n + 1
            if shape == "monotone":
                assert c.monotone
            elif shape == "convex":
                assert c.convex
            elif shape == "monotone-convex":
                assert c.monotone and c.convex
            elif shape == "convex-min":
                assert c.convex and c.unique_interior_minimum_at is not None


def test_random_cpwl_deterministic():
    assert random_cpwl(4, "cpwl", 9) == random_cpwl(4, "cpwl", 9)
