"""Far points for a given net.

Each construction takes an arbitrary finite net, picks a coordinate, block or
subinterval where the net carries little mass, and returns a ball point
supported there together with a distance it is guaranteed to keep from every
net point.  The guarantee is a closed-form expression in the selected mass
``eps``; ``measured`` is the actual minimum distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InputError
from .nets import Net, _is_l1_sum_l1
from .spaces import INF, LpSeq, LpStep, PolyK, PSum, SpaceSpec, is_scalar, norms, space_to_dict

# slack absorbing double-precision rounding in the bound formulas
GUARANTEE_SLACK = 1e-9


@dataclass(frozen=True)
class WitnessReport:
    witness: np.ndarray
    guaranteed_distance: float
    measured_distance: float
    construction: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "witness": np.asarray(self.witness).tolist(),
            "guaranteed": self.guaranteed_distance,
            "measured": self.measured_distance,
            "construction": self.construction,
            "params": self.params,
        }


def _min_dist(space: SpaceSpec, points: np.ndarray, w: np.ndarray) -> float:
    return float(norms(space, points - w).min())


def tail_bound(eps: float, p: float) -> float:
    """``(1 - eps^p + (1 - eps)^p)^(1/p)``, the distance from a unit vector that
    puts mass at most ``eps`` on a block to a unit vector living on that block."""
    eps = min(max(eps, 0.0), 1.0)
    return (1.0 - eps**p + (1.0 - eps) ** p) ** (1.0 / p)


def lp_step_witness(net: Net, refine: int) -> WitnessReport:
    """Normalized indicator of the refined subinterval where the net is lightest."""
    space = net.space
    if not isinstance(space, LpStep):
        raise InputError("lp_step_witness needs a net over LpStep")
    if refine < 1:
        raise InputError("refine must be a positive integer")
    p, n = space.p, space.n
    fine = LpStep(p, n * refine)
    pts = np.repeat(net.points, refine, axis=1)
    # integral of |f_i|^p over each fine subinterval
    mass = np.abs(pts) ** p / fine.n
    j = int(np.argmin(mass.sum(axis=0)))
    eps_p = float(mass[:, j].max())
    eps = eps_p ** (1.0 / p)
    w = np.zeros(fine.n)
    w[j] = fine.n ** (1.0 / p)
    return WitnessReport(
        w,
        tail_bound(eps, p),
        _min_dist(fine, pts, w),
        "lp_step_indicator",
        {"refine": refine, "subinterval": j, "eps": eps, "eps_p": eps_p,
         "pigeonhole_cap": len(net) / fine.n, "space": space_to_dict(fine)},
    )


def _tail_blocks(space: SpaceSpec) -> list[tuple[slice, Optional[SpaceSpec]]]:
    """Blocks along which a finite l_p-sum splits.

    Coordinates of an ``LpSeq`` factor with the host exponent count as separate
    blocks, since ``l_p^d (+)_p Y`` is the l_p-sum of ``d`` scalars and ``Y``.
    The second entry is the block's own space (``None`` for a single scalar).
    """
    if isinstance(space, LpSeq):
        return [(slice(i, i + 1), None) for i in range(space.dim)]
    blocks = []
    for m, f in enumerate(space.factors):
        sl = space.block(m)
        if isinstance(f, LpSeq) and (f.p == space.p or f.dim == 1):
            blocks.extend((slice(sl.start + i, sl.start + i + 1), None) for i in range(f.dim))
        else:
            blocks.append((sl, f))
    return blocks


def tail_witness(space: SpaceSpec, net: Net) -> WitnessReport:
    """Unit vector supported on the block where every net point is smallest."""
    if not (isinstance(space, (LpSeq, PSum)) and space.p != INF):
        raise InputError("tail_witness needs LpSeq or PSum with finite p")
    if net.space != space:
        raise InputError("net lives in a different space")
    blocks = _tail_blocks(space)
    if len(blocks) < 2:
        raise InputError("tail_witness needs at least two blocks")
    pts = net.points
    masses = []
    for sl, sub in blocks:
        part = pts[:, sl]
        masses.append(np.abs(part[:, 0]) if sub is None else sub._norms(part))
    masses = np.stack(masses, axis=1)
    eps_blocks = masses.max(axis=0)
    j = int(np.argmin(eps_blocks))
    eps = float(eps_blocks[j])
    sl, sub = blocks[j]

    # any unit vector of the block works; take the better of +-(first basis vector)
    best_w, best_d = None, -1.0
    for sign in (1.0, -1.0):
        w = np.zeros(space.dim)
        if sub is None:
            w[sl.start] = sign
        else:
            e = np.zeros(sub.dim)
            e[0] = 1.0
            w[sl] = sign * e / sub._norms(e)
        d = _min_dist(space, pts, w)
        if d > best_d:
            best_w, best_d = w, d
    return WitnessReport(best_w, tail_bound(eps, space.p), best_d, "tail_block",
                         {"block": j, "start": sl.start, "stop": sl.stop, "eps": eps})


FarPoint = Callable[[SpaceSpec, Net, int], "tuple[np.ndarray, float]"]


def _default_far_point(space: SpaceSpec, net: Net, seed: int) -> tuple[np.ndarray, float]:
    from .covering import covering_radius_estimate

    rep = covering_radius_estimate(space, net, budget=4000, restarts=8, seed=seed)
    return rep.best_witness, rep.empirical_estimate


def linf_adversary(space: PSum, net: Net, alpha: float, eps: float,
                   far_point: Optional[FarPoint] = None, seed: int = 0) -> WitnessReport:
    """Blockwise adversary for an l_inf-sum.

    For every block ``n`` the net points whose block-``n`` part has norm at least
    ``1 - eps`` are collected; a factor ball point ``x_n`` farther than
    ``alpha + eps`` from all their normalized parts is searched for.  The blocks
    ``x_n`` are assembled unscaled, which keeps distance ``> alpha`` from every
    collected net point.
    """
    if not (isinstance(space, PSum) and space.p == INF):
        raise InputError("linf_adversary needs PSum with p = inf")
    if net.space != space:
        raise InputError("net lives in a different space")
    if not 0 <= eps < alpha:
        raise InputError("need 0 <= eps < alpha")
    far_point = far_point or _default_far_point

    pts = net.points
    witness = np.zeros(space.dim)
    covered = np.zeros(len(net), dtype=bool)
    per_block = []
    for m, f in enumerate(space.factors):
        part = pts[:, space.block(m)]
        r = f._norms(part)
        members = np.flatnonzero(r >= 1.0 - eps)
        entry = {"block": m, "members": members.tolist(), "certified": False}
        if members.size:
            unit = part[members] / r[members, None]
            sub = Net(f, unit, "normalized_blocks", {})
            # deterministic sub-seed per block index
            sub_seed = int(np.random.SeedSequence([seed, m]).generate_state(1)[0])
            x_n, value = far_point(f, sub, sub_seed)
            x_n = np.asarray(x_n, dtype=float)
            measured = float(f._norms(unit - x_n).min())
            entry["far_distance"] = measured
            if measured > alpha + eps and f._norms(x_n) <= 1.0 + 1e-12:
                entry["certified"] = True
                witness[space.block(m)] = x_n
                covered[members] = True
        per_block.append(entry)

    uncovered = np.flatnonzero(~covered).tolist()
    status = "certified" if not uncovered else "inconclusive"
    params = {"alpha": alpha, "eps": eps, "status": status, "uncovered": uncovered,
              "blocks": per_block, "assembly": "unscaled_blocks"}
    return WitnessReport(witness, alpha if status == "certified" else 0.0,
                         _min_dist(space, pts, witness), "linf_adversary", params)


def lemma3_witness(space: PSum, net: Net) -> WitnessReport:
    """``(e_k / sqrt2, e_k / sqrt2)`` in ``l_1^d (+)_2 l_1^d`` at the lightest coordinate ``k``."""
    if not _is_l1_sum_l1(space):
        raise InputError("lemma3_witness needs PSum(2, [LpSeq(1, d), LpSeq(1, d)])")
    if net.space != space:
        raise InputError("net lives in a different space")
    d = space.factors[0].dim
    x, y = net.points[:, :d], net.points[:, d:]
    eps_k = np.maximum(np.abs(x), np.abs(y)).max(axis=0)
    k = int(np.argmin(eps_k))
    eps = float(eps_k[k])
    h = 1.0 / math.sqrt(2.0)
    w = np.zeros(2 * d)
    w[k] = w[d + k] = h
    a, b = np.abs(x).sum(axis=1), np.abs(y).sum(axis=1)
    lo_a = np.maximum(a - eps + h - eps, 0.0)
    lo_b = np.maximum(b - eps + h - eps, 0.0)
    guaranteed = float(np.sqrt(lo_a**2 + lo_b**2).min())
    return WitnessReport(w, guaranteed, _min_dist(space, net.points, w), "l1_sum_l1_diagonal",
                         {"k": k, "eps": eps, "floor": math.sqrt(2 + math.sqrt(2)) - 4 * eps})


def polyk_bound(k: int, eps: float) -> float:
    """Distance guaranteed from ``k e_j`` to a unit vector with ``|x_j| <= eps``."""
    # (2k - 1 - eps)/k needs eps <= 1; (2k - 2 eps)/k covers the rest
    return max(min(2 * k - 1 - eps, 2 * k - 2 * eps), 0.0) / k


def polyk_witness(space: PolyK, net: Net) -> WitnessReport:
    if not isinstance(space, PolyK):
        raise InputError("polyk_witness needs a PolyK space")
    if net.space != space:
        raise InputError("net lives in a different space")
    if space.dim <= space.k:
        raise InputError("polyk_witness needs dim > k")
    eps_j = np.abs(net.points).max(axis=0)
    j = int(np.argmin(eps_j))
    eps = float(eps_j[j])
    w = np.zeros(space.dim)
    w[j] = space.k
    return WitnessReport(w, polyk_bound(space.k, eps), _min_dist(space, net.points, w),
                         "polyk_scaled_basis", {"j": j, "eps": eps, "k": space.k})


def uns_bound(b: np.ndarray, eps: float, p: float) -> np.ndarray:
    """``1 - b + (b^p - eps^p + (1 - eps)^p)^(1/p)`` for net points with l_p-part norm ``b``."""
    inner = np.maximum(b**p - eps**p + max(1.0 - eps, 0.0) ** p, 0.0)
    return 1.0 - b + inner ** (1.0 / p)


def uns_example_witness(space: PSum, net: Net) -> WitnessReport:
    """``(0, e_j)`` in ``R (+)_1 l_p^d`` at the lightest coordinate ``j`` of the l_p part."""
    if not (isinstance(space, PSum) and space.p == 1 and len(space.factors) == 2
            and is_scalar(space.factors[0]) and isinstance(space.factors[1], LpSeq)
            and space.factors[1].p != INF):
        raise InputError("uns_example_witness needs PSum(1, [R, LpSeq(p, d)]) with p finite")
    if net.space != space:
        raise InputError("net lives in a different space")
    lp = space.factors[1]
    if lp.dim < 2:
        raise InputError("uns_example_witness needs d >= 2")
    tail = net.points[:, 1:]
    eps_j = np.abs(tail).max(axis=0)
    j = int(np.argmin(eps_j))
    eps = float(eps_j[j])
    b = lp._norms(tail)
    w = np.zeros(space.dim)
    w[1 + j] = 1.0
    guaranteed = float(uns_bound(b, eps, lp.p).min())
    return WitnessReport(w, guaranteed, _min_dist(space, net.points, w), "uns_basis",
                         {"j": j, "eps": eps, "p": lp.p})
