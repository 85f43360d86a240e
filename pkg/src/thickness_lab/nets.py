"""Finite nets of unit vectors and the explicit constructions that produce them."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import InputError, ResourceError
from .spaces import (
    INF,
    NET_UNIT_TOL,
    LpSeq,
    LpStep,
    PSum,
    SpaceSpec,
    as_point,
    is_scalar,
    norm,
    norms,
    space_from_dict,
    space_to_dict,
    _p_to_json,
)

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class Net:
    """A finite set of unit vectors of ``space``.

    ``provenance`` names the construction and ``params`` its parameters; both
    are used by :func:`thickness_lab.covering.analytic_upper` to look up the
    closed-form covering bound.
    """

    space: SpaceSpec
    points: np.ndarray
    provenance: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InputError("a net needs a nonempty list of points")
        if pts.shape[1] != self.space.dim:
            raise InputError(f"net points have dim {pts.shape[1]}, space has {self.space.dim}")
        if not np.all(np.isfinite(pts)):
            raise InputError("net points must be finite")
        r = norms(self.space, pts)
        bad = np.flatnonzero(np.abs(r - 1.0) > NET_UNIT_TOL)
        if bad.size:
            raise InputError(f"net point {bad[0]} has norm {r[bad[0]]!r}, expected 1")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def to_dict(self) -> dict:
        return {
            "space": space_to_dict(self.space),
            "provenance": self.provenance,
            "params": self.params,
            "points": self.points.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Net":
        try:
            return cls(space_from_dict(data["space"]), np.asarray(data["points"], dtype=float),
                       data["provenance"], dict(data.get("params", {})))
        except KeyError as exc:
            raise InputError(f"net description is missing field {exc}") from None


def _dedup(points: np.ndarray) -> np.ndarray:
    """Drop repeated rows (compared after rounding to 1e-12), keeping first occurrences."""
    if len(points) <= 1:
        return points
    key = np.round(points, 12) + 0.0  # + 0.0 folds -0.0 into 0.0
    _, first = np.unique(key, axis=0, return_index=True)
    return points[np.sort(first)]


def lp_func_net(p: float, n: int) -> Net:
    """The 2n signed, scaled indicators ``+-n^(1/p) chi_[(i-1)/n, i/n]`` in LpStep(p, n)."""
    space = LpStep(p, n)
    height = n ** (1.0 / space.p)
    eye = np.eye(n) * height
    return Net(space, np.vstack([eye, -eye]), "lp_func_net", {"p": _p_to_json(space.p), "n": n})


def antipodal_net(space: SpaceSpec, x0: Any) -> Net:
    x0 = as_point(space, x0)
    if abs(norm(space, x0) - 1.0) > NET_UNIT_TOL:
        raise InputError("antipodal_net needs a unit vector")
    return Net(space, np.vstack([x0, -x0]), "antipodal", {"x0": x0.tolist()})


def _grid_size(N: int, p: float, eps: float) -> tuple[float, int, int]:
    # spacing above 1 would leave no nonzero node in the cube
    delta = min(eps / (2.0 * (1.0 if p == INF else N ** (1.0 / p))), 1.0)
    half = int(math.floor(1.0 / delta + 1e-12))
    return delta, half, (2 * half + 1) ** N - 1


def sphere_eps_net(N: int, p: float, eps: float, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Unit vectors of l_p^N that form an ``eps``-net of its unit sphere.

    The nonzero nodes of the grid ``delta * Z^N`` inside the cube ``[-1, 1]^N``
    are normalized, with ``delta = eps / (2 N^(1/p))``.  A sphere point is within
    ``eps / 2`` of some grid node and normalizing at most doubles that.
    """
    space = LpSeq(p, N)
    if not eps > 0:
        raise InputError("eps must be positive")
    delta, half, count = _grid_size(N, space.p, eps)
    if count > cap:
        raise ResourceError(f"sphere net for N={N}, p={p}, eps={eps}", count, cap)
    axis = np.arange(-half, half + 1) * delta
    grid = np.stack(np.meshgrid(*([axis] * N), indexing="ij"), axis=-1).reshape(-1, N)
    grid = grid[np.any(grid != 0, axis=1)]
    pts = grid / norms(space, grid)[:, None]
    return _dedup(pts)


def product_net(factor_nets: Sequence[Net], p: float, eps: float, cap: int = DEFAULT_CAP) -> Net:
    """All points ``(lam_1 x_1, ..., lam_N x_N)`` over a sphere eps-net of the weights
    ``lam`` and one point ``x_n`` from each factor net."""
    factor_nets = list(factor_nets)
    if not factor_nets:
        raise InputError("product_net needs at least one factor net")
    space = PSum(p, tuple(f.space for f in factor_nets))
    lam = sphere_eps_net(len(factor_nets), space.p, eps, cap=cap)
    sizes = [len(f) for f in factor_nets]
    total = len(lam) * math.prod(sizes)
    if total > cap:
        raise ResourceError("product net", total, cap)

    # every combination of one point per factor, concatenated
    choice = np.array(list(itertools.product(*[range(s) for s in sizes])), dtype=int)
    blocks = [f.points[choice[:, i]] for i, f in enumerate(factor_nets)]
    # shape (lambda node, combination, coordinate)
    pts = np.concatenate([lam[:, i, None, None] * b[None] for i, b in enumerate(blocks)], axis=-1)
    pts = pts.reshape(-1, space.dim)
    params = {
        "p": _p_to_json(space.p),
        "eps": eps,
        "lambda_nodes": len(lam),
        "factors": [{"space": space_to_dict(f.space), "provenance": f.provenance, "params": f.params}
                    for f in factor_nets],
    }
    return Net(space, _dedup(pts), "product", params)


def embed_net(factor_net: Net, position: int, host: PSum) -> Net:
    """Place each point of ``factor_net`` in block ``position`` of ``host``, zeros elsewhere."""
    if not isinstance(host, PSum):
        raise InputError("embed_net needs a PSum host")
    if not 0 <= position < len(host.factors):
        raise InputError(f"position {position} out of range for {len(host.factors)} factors")
    if host.factors[position] != factor_net.space:
        raise InputError("factor net space does not match the host block")
    pts = np.zeros((len(factor_net), host.dim))
    pts[:, host.block(position)] = factor_net.points
    params = {"position": position,
              "factor": {"space": space_to_dict(factor_net.space),
                         "provenance": factor_net.provenance, "params": factor_net.params}}
    return Net(host, pts, "embed", params)


def hyperplane_net(host: PSum) -> Net:
    """The two points ``(0, +1)`` and ``(0, -1)`` of ``X (+)_inf R``."""
    if not (isinstance(host, PSum) and host.p == INF and len(host.factors) == 2
            and is_scalar(host.factors[1])):
        raise InputError("hyperplane_net needs a host of the form PSum(inf, [X, R])")
    pts = np.zeros((2, host.dim))
    pts[0, -1], pts[1, -1] = 1.0, -1.0
    return Net(host, pts, "hyperplane", {})


def _is_l1_sum_l1(host: SpaceSpec) -> bool:
    return (isinstance(host, PSum) and host.p == 2 and len(host.factors) == 2
            and all(isinstance(f, LpSeq) and f.p == 1 for f in host.factors)
            and host.factors[0].dim == host.factors[1].dim)


def four_point_net(host: PSum) -> Net:
    """``(+-e_1, 0)`` and ``(0, +-e_1)`` in ``l_1^d (+)_2 l_1^d``."""
    if not _is_l1_sum_l1(host):
        raise InputError("four_point_net needs PSum(2, [LpSeq(1, d), LpSeq(1, d)])")
    d = host.factors[0].dim
    pts = np.zeros((4, 2 * d))
    pts[0, 0], pts[1, 0], pts[2, d], pts[3, d] = 1.0, -1.0, 1.0, -1.0
    return Net(host, pts, "four_point", {"d": d})


def prop1_net(host: PSum) -> Net:
    """``(+-e_1, 0_Y)`` in ``l_p (+)_p Y``.

    The closed-form bound only needs the sign choice between ``e_1`` and
    ``-e_1``, so the antipodal pair is used as the fixed two-point net.
    """
    if not (isinstance(host, PSum) and host.p != INF and len(host.factors) == 2
            and isinstance(host.factors[0], LpSeq) and host.factors[0].p == host.p):
        raise InputError("prop1_net needs PSum(p, [LpSeq(p, d), Y]) with p finite")
    pts = np.zeros((2, host.dim))
    pts[0, 0], pts[1, 0] = 1.0, -1.0
    return Net(host, pts, "prop1_antipodal_interpretation", {"p": host.p})
