import json
import math

import numpy as np
import pytest

from thickness_lab.errors import InputError, ResourceError
from thickness_lab.nets import (
    Net,
    antipodal_net,
    embed_net,
    four_point_net,
    hyperplane_net,
    lp_func_net,
    prop1_net,
    product_net,
    sphere_eps_net,
)
from thickness_lab.spaces import INF, LpSeq, LpStep, PSum, norm, norms


def _unit(space, pts):
    assert np.all(np.abs(norms(space, np.asarray(pts)) - 1) <= 1e-12)


def test_net_rejects_non_unit_points():
    with pytest.raises(InputError):
        Net(LpSeq(2, 2), [[1.0, 1.0]], "x")
    with pytest.raises(InputError):
        Net(LpSeq(2, 2), np.zeros((0, 2)), "x")
    with pytest.raises(InputError):
        Net(LpSeq(2, 3), [[1.0, 0.0]], "x")


def test_net_points_read_only():
    net = lp_func_net(2, 2)
    with pytest.raises(ValueError):
        net.points[0, 0] = 5.0


def test_lp_func_net():
    net = lp_func_net(1, 1)
    np.testing.assert_array_equal(net.points, [[1.0], [-1.0]])
    net = lp_func_net(2, 4)
    assert len(net) == 8
    np.testing.assert_array_equal(net.points[0], [2, 0, 0, 0])
    assert norm(net.space, net.points[0]) == 1.0
    net = lp_func_net(3, 8)
    assert net.points[2, 2] == pytest.approx(2.0, rel=1e-15)
    assert net.points[8 + 2, 2] == pytest.approx(-2.0, rel=1e-15)
    _unit(net.space, net.points)


def test_antipodal_net():
    net = antipodal_net(LpSeq(2, 2), [1, 0])
    np.testing.assert_array_equal(net.points, [[1, 0], [-1, 0]])
    net = antipodal_net(LpStep(2, 4), np.ones(4))
    np.testing.assert_array_equal(net.points, [np.ones(4), -np.ones(4)])
    with pytest.raises(InputError):
        antipodal_net(LpSeq(2, 2), [1, 1])


def test_sphere_eps_net_one_dimensional():
    for eps in (0.1, 1.0, 3.0):
        np.testing.assert_array_equal(np.sort(sphere_eps_net(1, 2, eps), axis=0), [[-1.0], [1.0]])


@pytest.mark.parametrize("N,p,eps", [(2, 1, 1.0), (2, 2, 0.3), (3, 1.5, 0.5), (2, INF, 0.2), (3, 4, 0.6)])
def test_sphere_eps_net_covers_sphere(N, p, eps):
    space = LpSeq(p, N)
    pts = sphere_eps_net(N, p, eps)
    _unit(space, pts)
    rng = np.random.default_rng(0)
    g = rng.standard_normal((10_000, N))
    if N == 2 and p == 1:
        # include the vertices and edge midpoints explicitly
        g = np.vstack([g, np.eye(2), -np.eye(2), [[1, 1], [1, -1]]])
    S = g / norms(space, g)[:, None]
    dist = np.min(np.stack([norms(space, S - x) for x in pts], axis=1), axis=1)
    assert dist.max() <= eps


def test_sphere_eps_net_contains_basis():
    pts = sphere_eps_net(2, 1, 1.0)
    for v in ([1, 0], [-1, 0], [0, 1], [0, -1]):
        assert np.any(np.all(np.isclose(pts, v), axis=1))


def test_sphere_eps_net_cap():
    with pytest.raises(ResourceError) as exc:
        sphere_eps_net(6, 2, 0.01, cap=1000)
    assert exc.value.cap == 1000 and exc.value.required > 1000


def test_sphere_eps_net_deterministic():
    np.testing.assert_array_equal(sphere_eps_net(3, 2, 0.5), sphere_eps_net(3, 2, 0.5))


def test_product_net_single_factor_closes_under_sign():
    f = Net(LpSeq(2, 2), [[1.0, 0.0], [0.0, 1.0]], "x")
    net = product_net([f], 2, 0.5)
    got = {tuple(r) for r in np.round(net.points, 12) + 0.0}
    assert got == {(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)}


def test_product_net_two_scalars():
    s = LpSeq(2, 1)
    f = antipodal_net(s, [1.0])
    net = product_net([f, f], 2, 0.5)
    h = 1 / math.sqrt(2)
    assert np.any(np.all(np.isclose(net.points, [h, h], atol=1e-12), axis=1))
    _unit(net.space, net.points)
    lam = sphere_eps_net(2, 2, 0.5)
    assert len(net) <= len(lam) * 4


def test_product_net_counting():
    # eps=2 gives the 8 normalized nonzero nodes of {-1,0,1}^2
    lam = sphere_eps_net(2, INF, 2.0)
    assert len(lam) == 8
    f = antipodal_net(LpSeq(2, 2), [1, 0])
    net = product_net([f, f], INF, 2.0)
    assert len(net) <= 32
    assert net.space == PSum(INF, (LpSeq(2, 2), LpSeq(2, 2)))
    _unit(net.space, net.points)


def test_product_net_cap():
    f = antipodal_net(LpSeq(2, 2), [1, 0])
    with pytest.raises(ResourceError):
        product_net([f, f, f], 2, 0.05, cap=5000)


def test_embed_net():
    host = PSum(2, (LpSeq(2, 1), LpSeq(2, 1), LpSeq(2, 1)))
    net = embed_net(antipodal_net(LpSeq(2, 1), [1.0]), 1, host)
    np.testing.assert_array_equal(net.points, [[0, 1, 0], [0, -1, 0]])
    with pytest.raises(InputError):
        embed_net(antipodal_net(LpSeq(2, 1), [1.0]), 3, host)
    with pytest.raises(InputError):
        embed_net(antipodal_net(LpSeq(1, 2), [1.0, 0]), 0, host)


def test_hyperplane_net():
    host = PSum(INF, (LpSeq(1, 3), LpSeq(1, 1)))
    net = hyperplane_net(host)
    np.testing.assert_array_equal(net.points, [[0, 0, 0, 1], [0, 0, 0, -1]])
    with pytest.raises(InputError):
        hyperplane_net(PSum(2, (LpSeq(1, 3), LpSeq(1, 1))))


def test_four_point_net():
    host = PSum(2, (LpSeq(1, 2), LpSeq(1, 2)))
    net = four_point_net(host)
    np.testing.assert_array_equal(net.points, [[1, 0, 0, 0], [-1, 0, 0, 0], [0, 0, 1, 0], [0, 0, -1, 0]])
    np.testing.assert_array_equal(net.points[0], -net.points[1])
    np.testing.assert_array_equal(net.points[2], -net.points[3])
    with pytest.raises(InputError):
        four_point_net(PSum(2, (LpSeq(2, 2), LpSeq(1, 2))))


def test_prop1_net():
    host = PSum(2, (LpSeq(2, 2), LpSeq(1, 2)))
    net = prop1_net(host)
    np.testing.assert_array_equal(net.points, [[1, 0, 0, 0], [-1, 0, 0, 0]])
    assert net.provenance == "prop1_antipodal_interpretation"
    with pytest.raises(InputError):
        prop1_net(PSum(2, (LpSeq(3, 2), LpSeq(1, 2))))


def test_net_json_round_trip():
    f = antipodal_net(LpSeq(2, 2), [1, 0])
    net = product_net([f, lp_func_net(3, 2)], 2, 0.5)
    data = json.loads(json.dumps(net.to_dict()))
    back = Net.from_dict(data)
    assert back.space == net.space and back.provenance == net.provenance
    np.testing.assert_array_equal(back.points, net.points)
    assert set(data) == {"space", "provenance", "params", "points"}
