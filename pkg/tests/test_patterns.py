import math
from fractions import Fraction

import numpy as np
import pytest

from hipar import (
    TOP,
    DataError,
    Equals,
    Interval,
    Pattern,
    closure,
    condition_tids,
    interclass_variance,
    jaccard,
    matches,
    region,
    support,
)

COTTAGE = Equals("property-type", "cottage")
APARTMENT = Equals("property-type", "apartment")
GOOD = Equals("state", "good")
VGOOD = Equals("state", "very good")
EXCELLENT = Equals("state", "excellent")
CATS = [COTTAGE, APARTMENT, GOOD, VGOOD, EXCELLENT]


def test_matches_equality(toy):
    assert matches(COTTAGE, toy.row(0), toy)
    assert not matches(COTTAGE, toy.row(3), toy)


def test_matches_interval_bounds(toy):
    small = Interval("surface", -math.inf, 60.0)
    assert not matches(small, toy.row(0), toy)  # surface 120
    assert matches(small, toy.row(1), toy)  # surface 55
    half = Interval("surface", 50.0, 60.0)
    assert matches(half, {"surface": 50.0})  # closed low end
    assert not matches(half, {"surface": 60.0})  # open high end


def test_matches_kind_mismatch(toy):
    with pytest.raises(DataError):
        matches(Equals("surface", "50"), toy.row(0), toy)
    with pytest.raises(DataError):
        matches(Interval("state", 0.0, 1.0), toy.row(0), toy)


def test_empty_pattern_matches_everything(toy):
    for i in range(toy.n):
        assert TOP.matches(toy.row(i))


def test_pattern_rejects_two_conditions_on_one_attribute():
    with pytest.raises(DataError):
        Pattern([GOOD, VGOOD])


def test_canonical_key_order_independent():
    a = Pattern([COTTAGE, Interval("surface", -math.inf, 60.0)])
    b = Pattern([Interval("surface", -math.inf, 60.0), COTTAGE])
    assert a.key == b.key == 'property-type="cottage" & surface in (-inf,60)'


def test_support_small_cottage_example(toy):
    p = Pattern([COTTAGE, Interval("surface", -math.inf, 60.0)])
    assert support(p, toy) == (2, 2 / 6)


def test_support_top_and_apartment(toy):
    assert support(TOP, toy) == (6, 1.0)
    assert support(Pattern([APARTMENT]), toy) == (3, 0.5)


def test_support_anti_monotone(toy):
    base = Pattern([COTTAGE])
    s_base, _ = support(base, toy)
    for c in [GOOD, VGOOD, EXCELLENT, Interval("rooms", 3.0, 4.0)]:
        s_ext, _ = support(base.extend(c), toy)
        assert s_ext <= s_base


def test_closure_adds_implied_condition(toy):
    got = closure(Pattern([GOOD]), toy, CATS)
    assert got == Pattern([GOOD, APARTMENT])


def test_closure_idempotent_and_region_preserving(toy):
    p = Pattern([GOOD])
    cl1 = closure(p, toy, CATS)
    cl2 = closure(cl1, toy, CATS)
    assert cl1 == cl2
    assert np.array_equal(region(p, toy), region(cl1, toy))
    assert set(p.conditions) <= set(cl1.conditions)  # extensive


def test_closure_empty_region_rejected(toy):
    with pytest.raises(DataError):
        closure(Pattern([COTTAGE, GOOD]), toy, CATS)


def test_interclass_variance_toy_value(toy):
    # bignum oracle: exact rational evaluation of the defining formula
    prices = [Fraction(v) for v in (510, 410, 350, 320, 140, 125)]
    mu = sum(prices) / 6
    inside = [prices[4], prices[5]]
    outside = [p for p in prices if p not in inside]
    mu_in = sum(inside) / 2
    mu_out = sum(outside) / 4
    exact = 2 * (mu - mu_in) ** 2 + 4 * (mu - mu_out) ** 2
    got = interclass_variance(Pattern([GOOD]), toy, "price")
    assert abs(got - float(exact)) < 1e-9
    assert abs(got - 93633.33) < 0.01


def test_interclass_variance_boundaries(toy):
    assert interclass_variance(TOP, toy, "price") == 0.0
    assert interclass_variance(Pattern([Equals("state", "unseen")]), toy, "price") == 0.0


def test_interclass_variance_balanced_means_zero():
    from hipar import AttributeSchema, Dataset

    d = Dataset(
        [AttributeSchema("g", "categorical"), AttributeSchema("y", "numerical", role="target")],
        {"g": np.array(["a", "b", "a", "b"], dtype=object), "y": np.array([1.0, 1.0, 3.0, 3.0])},
    )
    assert interclass_variance(Pattern([Equals("g", "a")]), d, "y") == pytest.approx(0.0)


def test_interclass_variance_nonnegative_random(toy):
    rng = np.random.default_rng(3)
    for _ in range(50):
        value = rng.choice(["cottage", "apartment"])
        p = Pattern([Equals("property-type", str(value))])
        assert interclass_variance(p, toy, "price") >= 0.0


def test_jaccard_identity_disjoint_and_example(toy):
    c = Pattern([COTTAGE])
    v = Pattern([VGOOD])
    assert jaccard(c, c, toy) == 1.0
    assert jaccard(c, Pattern([GOOD]), toy) == 0.0  # disjoint regions
    assert jaccard(c, v, toy) == pytest.approx(2 / 3)
    assert jaccard(c, v, toy) == jaccard(v, c, toy)  # symmetric


def test_jaccard_both_empty(toy):
    p = Pattern([Equals("state", "zzz")])
    assert jaccard(p, p, toy) == 0.0


def test_condition_tids_sorted(toy):
    t = condition_tids(COTTAGE, toy)
    assert list(t) == [0, 1, 2]
