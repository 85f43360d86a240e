import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from thickness_lab.errors import DomainError, InputError
from thickness_lab.spaces import (
    INF,
    LpSeq,
    LpStep,
    PolyK,
    PSum,
    norm,
    normalize,
    psum_split,
    sample_ball,
    space_from_dict,
    space_to_dict,
)

from conftest import polyk_by_subsets


def test_norm_examples():
    assert norm(LpSeq(2, 2), [3, 4]) == 5.0
    assert norm(LpStep(1, 2), [1, 3]) == 2.0
    assert norm(PolyK(2, 4), [3, 1, 0, -2]) == pytest.approx(polyk_by_subsets(2, [3, 1, 0, -2]))
    assert norm(PolyK(2, 4), [3, 1, 0, -2]) == 2.5
    assert norm(PSum(2, (LpSeq(1, 2), LpSeq(1, 2))), [1, 0, 1, 0]) == pytest.approx(math.sqrt(2), rel=1e-15)


def test_dimension_mismatch():
    with pytest.raises(InputError):
        norm(LpSeq(2, 3), [1, 2])


@pytest.mark.parametrize("bad", [
    lambda: LpSeq(0.5, 2), lambda: LpSeq(2, 0), lambda: LpStep(INF, 3),
    lambda: PolyK(4, 3), lambda: PSum(2, ()),
])
def test_invalid_spaces(bad):
    with pytest.raises(InputError):
        bad()


def test_normalize_examples():
    np.testing.assert_allclose(normalize(LpSeq(2, 2), [3, 4]), [0.6, 0.8], rtol=1e-15)
    # |(2,2,0)|_k = (2+2)/2 = 2 for k=2
    np.testing.assert_allclose(normalize(PolyK(2, 3), [2, 2, 0]), [1, 1, 0])
    np.testing.assert_array_equal(normalize(LpSeq(3, 3), [0, 1, 0]), [0, 1, 0])
    with pytest.raises(DomainError):
        normalize(LpSeq(2, 2), [0, 0])


def test_normalize_unit(space):
    rng = np.random.default_rng(0)
    for _ in range(50):
        y = normalize(space, rng.standard_normal(space.dim) * 10 ** rng.uniform(-3, 3))
        assert abs(norm(space, y) - 1) <= 1e-12


def test_sample_ball_deterministic_and_inside(space):
    a, b = sample_ball(space, 11), sample_ball(space, 11)
    np.testing.assert_array_equal(a, b)
    for s in range(200):
        assert norm(space, sample_ball(space, s)) <= 1.0


def test_sample_ball_radius_law():
    space = LpSeq(2, 2)
    r = np.array([norm(space, sample_ball(space, s)) for s in range(10_000)])
    assert r.max() <= 1.0
    assert r.max() >= 0.99
    # radius u^(1/2) gives P(r <= 1/2) = 1/4
    assert abs(np.mean(r <= 0.5) - 0.25) < 0.02
    assert norm(LpSeq(1, 3), sample_ball(LpSeq(1, 3), 5)) <= 1.0


def test_psum_split():
    space = PSum(2, (LpSeq(1, 2), LpSeq(1, 2)))
    parts = psum_split(space, [1, 0, 0, 1])
    assert [f for f, _ in parts] == [LpSeq(1, 2), LpSeq(1, 2)]
    np.testing.assert_array_equal(parts[0][1], [1, 0])
    np.testing.assert_array_equal(parts[1][1], [0, 1])
    single = PSum(3, (LpSeq(3, 4),))
    np.testing.assert_array_equal(psum_split(single, [1, 2, 3, 4])[0][1], [1, 2, 3, 4])
    with pytest.raises(InputError):
        psum_split(LpSeq(2, 4), [1, 2, 3, 4])


def test_psum_split_round_trip():
    space = PSum(3, (LpSeq(1, 2), PolyK(2, 3), LpStep(2, 2)))
    rng = np.random.default_rng(3)
    for _ in range(100):
        x = rng.standard_normal(space.dim)
        parts = psum_split(space, x)
        np.testing.assert_array_equal(np.concatenate([p for _, p in parts]), x)
        combined = sum(norm(f, p) ** 3 for f, p in parts) ** (1 / 3)
        assert combined == pytest.approx(norm(space, x), rel=1e-12)


def _random_triples(space, count, seed):
    rng = np.random.default_rng(seed)
    scale = 10 ** rng.uniform(-3, 3, size=(count, 2, 1))
    xy = rng.standard_normal((count, 2, space.dim)) * scale
    lam = rng.standard_normal(count) * 10 ** rng.uniform(-2, 2, size=count)
    return xy[:, 0], xy[:, 1], lam


def test_norm_axioms(space):
    x, y, lam = _random_triples(space, 10_000, 1)
    nx, ny = space._norms(x), space._norms(y)
    assert np.all(np.abs(space._norms(lam[:, None] * x) - np.abs(lam) * nx) <= 1e-12 * np.abs(lam) * nx)
    nxy = space._norms(x + y)
    assert np.all(nxy <= (nx + ny) * (1 + 1e-12) + 1e-12)
    assert norm(space, np.zeros(space.dim)) == 0
    assert np.all(nx > 0)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, 6, elements=st.floats(-1e3, 1e3)), st.integers(1, 6))
def test_polyk_matches_subset_enumeration(x, k):
    assert norm(PolyK(k, 6), x) == pytest.approx(polyk_by_subsets(k, x), rel=1e-12, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, 5, elements=st.floats(-1e3, 1e3)))
def test_coinciding_norms(x):
    assert norm(PolyK(1, 5), x) == norm(LpSeq(INF, 5), x)
    assert norm(PolyK(5, 5), x) == pytest.approx(norm(LpSeq(1, 5), x) / 5, rel=1e-12, abs=1e-300)
    for p in (1, 2, 3.5):
        assert norm(LpStep(p, 5), x) == pytest.approx(norm(LpSeq(p, 5), x) * 5 ** (-1 / p),
                                                      rel=1e-12, abs=1e-300)
        assert norm(PSum(p, (LpSeq(p, 5),)), x) == pytest.approx(norm(LpSeq(p, 5), x), rel=1e-12,
                                                                 abs=1e-300)


def test_permutation_and_sign_invariance(space):
    rng = np.random.default_rng(5)
    for _ in range(100):
        x = rng.standard_normal(space.dim)
        signs = rng.choice([-1.0, 1.0], size=space.dim)
        assert norm(space, signs * x) == pytest.approx(norm(space, x), rel=1e-12)
        if not isinstance(space, PSum):
            assert norm(space, rng.permutation(x)) == pytest.approx(norm(space, x), rel=1e-12)


def test_large_p_no_overflow():
    assert norm(LpSeq(500, 3), [1e3, 1e3, 0]) == pytest.approx(1e3 * 2 ** (1 / 500))


def test_serialization_round_trip(space):
    data = json.loads(json.dumps(space_to_dict(space)))
    assert space_from_dict(data) == space


def test_serialization_fields():
    assert space_to_dict(LpSeq(INF, 3)) == {"kind": "lp_seq", "p": "inf", "dim": 3}
    assert space_from_dict({"kind": "poly_k", "k": 2, "dim": 4}) == PolyK(2, 4)
    with pytest.raises(InputError):
        space_from_dict({"kind": "orlicz"})
    with pytest.raises(InputError):
        space_from_dict({"kind": "lp_seq", "p": 2})
