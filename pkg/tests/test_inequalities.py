import math

import numpy as np
import pytest

from thickness_lab.errors import InputError
from thickness_lab.inequalities import (
    IneqCheck,
    clarkson_check,
    clarkson_net_bound,
    hanner_check,
    random_pair,
    verify,
)
from thickness_lab.spaces import INF, LpSeq, LpStep, PolyK, norm


def test_ineq_check_fields():
    c = IneqCheck(1.0, 2.0)
    assert c.slack == 1.0 and c.holds
    assert not IneqCheck(2.0, 1.0).holds
    assert IneqCheck(1.0 + 1e-13, 1.0).holds
    assert set(c.to_dict()) == {"lhs", "rhs", "slack", "holds"}


def test_parallelogram_equality():
    rng = np.random.default_rng(0)
    for space in (LpSeq(2, 5), LpStep(2, 5)):
        for _ in range(100):
            f, g = rng.standard_normal(5), rng.standard_normal(5)
            for c in (clarkson_check(space, f, g), hanner_check(space, f, g)):
                assert abs(c.slack) <= 1e-12 * max(1, c.rhs)


def test_zero_partner_equality():
    f = np.array([1.0, -2.0, 0.5])
    c = clarkson_check(LpSeq(1.5, 3), f, np.zeros(3))
    assert c.lhs == pytest.approx(2 * norm(LpSeq(1.5, 3), f) ** 3, rel=1e-12)
    assert c.slack == pytest.approx(0, abs=1e-12 * c.rhs)
    c = hanner_check(LpSeq(4, 3), f, np.zeros(3))
    assert c.lhs == pytest.approx(c.rhs, rel=1e-12)


def test_clarkson_random_pairs():
    space = LpSeq(1.5, 8)
    rng = np.random.default_rng(1)
    assert all(clarkson_check(space, *random_pair(space, rng)).holds for _ in range(1000))


def test_hanner_random_pairs():
    space = LpStep(4, 16)
    rng = np.random.default_rng(2)
    assert all(hanner_check(space, *random_pair(space, rng)).holds for _ in range(1000))


def test_range_errors():
    with pytest.raises(InputError):
        clarkson_check(LpSeq(1, 2), [1, 0], [0, 1])
    with pytest.raises(InputError):
        clarkson_check(LpSeq(3, 2), [1, 0], [0, 1])
    with pytest.raises(InputError):
        hanner_check(LpSeq(1.5, 2), [1, 0], [0, 1])
    with pytest.raises(InputError):
        hanner_check(LpSeq(INF, 2), [1, 0], [0, 1])
    with pytest.raises(InputError):
        hanner_check(PolyK(2, 3), [1, 0, 0], [0, 1, 0])


def test_clarkson_net_bound():
    assert clarkson_net_bound(2) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert clarkson_net_bound(1) == 2
    assert clarkson_net_bound(1.5) == pytest.approx(2 ** (2 / 3), rel=1e-15)
    assert 2 ** (2 / 3) == pytest.approx(1.5874, abs=1e-4)
    with pytest.raises(InputError):
        clarkson_net_bound(2.5)


def test_hanner_can_fail_below_two():
    # Hanner's direction reverses for p < 2, so a violation must be findable there
    space = LpSeq(1.5, 2)
    f, g = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    lhs = norm(space, f + g) ** 1.5 + norm(space, f - g) ** 1.5
    rhs = 2 ** 1.5
    assert lhs > rhs


@pytest.mark.parametrize("p", [1.25, 1.5, 2, 3])
def test_verify_no_violations(p):
    out = verify(p, 500, seed=3)
    for key in ("clarkson", "hanner", "two_point"):
        if key in out:
            assert out[key]["violations"] == 0
    assert ("clarkson" in out) == (p <= 2)
    assert ("hanner" in out) == (p >= 2)
