import itertools

import numpy as np
import pytest

from thickness_lab.spaces import INF, LpSeq, LpStep, PolyK, PSum

FAMILIES = {
    "lp_seq_1": LpSeq(1, 5),
    "lp_seq_1.5": LpSeq(1.5, 5),
    "lp_seq_3": LpSeq(3, 5),
    "lp_seq_inf": LpSeq(INF, 5),
    "lp_step_2": LpStep(2, 6),
    "lp_step_4": LpStep(4, 6),
    "p_sum_2": PSum(2, (LpSeq(1, 2), LpSeq(1, 3))),
    "p_sum_inf": PSum(INF, (LpSeq(3, 2), PolyK(2, 3))),
    "p_sum_nested": PSum(1, (PSum(2, (LpSeq(1, 2), LpSeq(INF, 2))), LpStep(3, 2))),
    "poly_k": PolyK(3, 6),
}


@pytest.fixture(params=sorted(FAMILIES), ids=sorted(FAMILIES))
def space(request):
    return FAMILIES[request.param]


def polyk_by_subsets(k, x):
    """Max over all k-element index subsets of the average absolute value."""
    return max(sum(abs(x[i]) for i in idx) / k for idx in itertools.combinations(range(len(x)), k))


def brute_covering_radius(space, net_points, resolution=200):
    """Max over a grid of the ball's bounding box [-R, R]^dim (spacing R/resolution)
    of the distance to the nearest net point.

    R = max_j 1/|e_j| bounds every coordinate on the ball for the sign- and
    permutation-symmetric norms used here.
    """
    R = max(1.0 / space._norms(e) for e in np.eye(space.dim))
    axis = np.linspace(-R, R, 2 * resolution + 1)
    grids = np.meshgrid(*([axis] * space.dim), indexing="ij")
    Z = np.stack([g.ravel() for g in grids], axis=1)
    best = -np.inf
    for s in range(0, len(Z), 200_000):
        chunk = Z[s:s + 200_000]
        chunk = chunk[space._norms(chunk) <= 1.0]
        if len(chunk) == 0:
            continue
        d = np.min(np.stack([space._norms(chunk - x) for x in net_points], axis=1), axis=1)
        best = max(best, float(d.max()))
    return best


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
