"""Covering radius of a net over the unit ball: bounds, estimates and searches.

The covering radius of a net ``{x_i}`` is ``sup_{|z| <= 1} min_i |z - x_i|``.
Every evaluated ball point gives a lower bound.  The estimate maximizes the
nonsmooth objective with a multistart derivative-free pattern search.  Each
restart runs from its own seed (derived from the master seed and the restart
index), so the result does not depend on how many threads execute the restarts.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InputError
from .nets import Net, _is_l1_sum_l1
from .spaces import (
    INF,
    LpSeq,
    LpStep,
    PolyK,
    PSum,
    SpaceSpec,
    _p_from_json,
    as_point,
    is_scalar,
    project_ball,
    random_directions,
    sample_ball,
    space_from_dict,
)
from . import witnesses as wit

DEFAULT_BUDGET = 200_000
DEFAULT_RESTARTS = 32
MIN_STEP = 1e-9
# bound on the size of one batched distance evaluation (points x net x dim)
_CHUNK = 4_000_000


@dataclass(frozen=True)
class CoveringReport:
    certified_lower: float
    empirical_estimate: float
    analytic_upper: Optional[float]
    best_witness: np.ndarray
    evaluations: int
    seed: Optional[int]

    def to_dict(self) -> dict:
        return {
            "certified_lower": self.certified_lower,
            "empirical_estimate": self.empirical_estimate,
            "analytic_upper": self.analytic_upper,
            "best_witness": np.asarray(self.best_witness).tolist(),
            "evaluations": self.evaluations,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class ThicknessSearchResult:
    m: int
    net: Net
    report: CoveringReport
    iterations: int

    def to_dict(self) -> dict:
        return {"m": self.m, "net": self.net.to_dict(), "report": self.report.to_dict(),
                "iterations": self.iterations}


@dataclass(frozen=True)
class NonsquarenessResult:
    value: float
    x: np.ndarray
    y: np.ndarray
    evaluations: int
    seed: int

    def to_dict(self) -> dict:
        return {"value": self.value, "x": self.x.tolist(), "y": self.y.tolist(),
                "evaluations": self.evaluations, "seed": self.seed}


def default_threads() -> int:
    env = os.environ.get("THICKNESS_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def sub_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, index]).generate_state(1)[0])


def _min_distances(space: SpaceSpec, net_pts: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """``min_i |z - x_i|`` for every row ``z`` of ``Z``."""
    per = max(1, _CHUNK // max(1, net_pts.size))
    out = np.empty(len(Z))
    for s in range(0, len(Z), per):
        diff = Z[s:s + per, None, :] - net_pts[None, :, :]
        out[s:s + per] = space._norms(diff).min(axis=1)
    return out


def min_distance(space: SpaceSpec, net: Net, z) -> float:
    if len(net) == 0:
        raise InputError("empty net")
    z = as_point(space, z)
    return float(_min_distances(space, net.points, z[None])[0])


def covering_radius_lower(space: SpaceSpec, net: Net, candidates: Iterable) -> CoveringReport:
    """Best lower bound certified by a fixed list of candidate points.

    Candidates outside the ball are radially projected first.
    """
    Z = np.asarray(list(candidates), dtype=float)
    if Z.size == 0:
        raise InputError("no candidates")
    if Z.ndim != 2 or Z.shape[1] != space.dim:
        raise InputError("candidates do not match the space dimension")
    Z = project_ball(space, Z)
    vals = _min_distances(space, net.points, Z)
    i = int(np.argmax(vals))
    v = float(vals[i])
    return CoveringReport(v, v, None, Z[i], len(Z), None)


# ---------------------------------------------------------------- analytic bounds

def _upper(space: SpaceSpec, provenance: str, params: dict) -> Optional[float]:
    if provenance == "lp_func_net":
        p, n = _p_from_json(params["p"]), params["n"]
        if p == 1 or p >= 2:
            a = n ** (-1.0 / p)
            return (0.5 * ((1 + a) ** p + (1 - a) ** p) + 1.0) ** (1.0 / p)
        return None
    if provenance == "antipodal":
        if not isinstance(space, (LpSeq, LpStep)):
            return None
        p = space.p
        x0 = np.asarray(params["x0"], dtype=float)
        signed_basis = isinstance(space, LpSeq) and np.count_nonzero(x0) == 1
        if signed_basis:
            return 1.0 if p == INF or space.dim == 1 else 2.0 ** (1.0 / p)
        if p <= 2:
            return 2.0 ** (1.0 / p)
        return None
    if provenance == "product":
        ups = [_upper(space_from_dict(f["space"]), f["provenance"], f["params"])
               for f in params["factors"]]
        if any(u is None for u in ups):
            return None
        return max(ups) + 2.0 * params["eps"]
    if provenance == "embed":
        f = params["factor"]
        u = _upper(space_from_dict(f["space"]), f["provenance"], f["params"])
        if u is None:
            return None
        p = space.p
        return max(u, 1.0) if p == INF else (u**p + 1.0) ** (1.0 / p)
    if provenance == "hyperplane":
        return 1.0
    if provenance == "four_point":
        return math.sqrt(2.0 + math.sqrt(2.0))
    if provenance == "prop1_antipodal_interpretation":
        return 2.0 ** (1.0 / space.p)
    return None


def analytic_upper(net: Net) -> Optional[float]:
    """Closed-form covering-radius bound of a recognized construction, else ``None``."""
    return _upper(net.space, net.provenance, net.params)


# ---------------------------------------------------------------- estimation

def construction_witnesses(space: SpaceSpec, net: Net) -> list[wit.WitnessReport]:
    """Every explicit witness construction that applies to this space shape."""
    out = []
    if isinstance(space, LpStep):
        out.append(wit.lp_step_witness(net, 1))
    if isinstance(space, (LpSeq, PSum)) and space.p != INF:
        try:
            out.append(wit.tail_witness(space, net))
        except InputError:
            pass
    if _is_l1_sum_l1(space) and space.factors[0].dim >= 2:
        out.append(wit.lemma3_witness(space, net))
    if isinstance(space, PolyK) and space.dim > space.k:
        out.append(wit.polyk_witness(space, net))
    if (isinstance(space, PSum) and space.p == 1 and len(space.factors) == 2
            and is_scalar(space.factors[0]) and isinstance(space.factors[1], LpSeq)
            and space.factors[1].p != INF and space.factors[1].dim >= 2):
        out.append(wit.uns_example_witness(space, net))
    return out


def _orthonormal(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def _pattern_search(space, net_pts, x, f, budget, rng):
    """Maximize the min-distance objective by polling a fresh random orthonormal
    frame around the incumbent, doubling the step on success, halving otherwise."""
    dim = space.dim
    step, evals = 0.25, 0
    while evals + 2 * dim <= budget and step > MIN_STEP:
        frame = _orthonormal(rng, dim) * step
        polls = project_ball(space, np.vstack([x + frame, x - frame]))
        vals = _min_distances(space, net_pts, polls)
        evals += len(polls)
        i = int(np.argmax(vals))
        if vals[i] > f:
            x, f = polls[i], float(vals[i])
            step = min(2.0 * step, 1.0)
        else:
            step *= 0.5
    return x, f, evals


def covering_radius_estimate(space: SpaceSpec, net: Net, budget: int = DEFAULT_BUDGET,
                             restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                             candidates: Sequence = (), threads: Optional[int] = None,
                             ) -> CoveringReport:
    """Multistart estimate of the covering radius of ``net`` over the unit ball.

    ``certified_lower`` is the best value over the explicit candidates: the
    origin, the applicable witness constructions, the antipodes of net points
    and any caller-supplied points.  ``empirical_estimate`` additionally includes
    every point visited by the search.
    """
    if budget < 1:
        raise InputError("budget must be at least 1")
    if net.space != space:
        raise InputError("net lives in a different space")
    restarts = max(1, int(restarts))
    pts = net.points

    cands = [np.zeros(space.dim)]
    cands += [w.witness for w in construction_witnesses(space, net)]
    cands += [np.asarray(c, dtype=float) for c in candidates]
    cands += list(-pts[:256])
    C = project_ball(space, np.vstack(cands))
    cvals = _min_distances(space, pts, C)
    used = len(C)
    ci = int(np.argmax(cvals))
    certified, cert_point = float(cvals[ci]), C[ci]

    # first half of the restarts polish the best candidates, the rest start at random
    order = np.argsort(-cvals, kind="stable")
    n_struct = min(len(order), max(1, restarts // 2))
    per = max(0, (budget - used) // restarts)

    def one(r: int):
        rng = np.random.default_rng(sub_seed(seed, r))
        if r < n_struct:
            x0 = C[order[r]]
            f0 = float(cvals[order[r]])
        else:
            x0 = sample_ball(space, sub_seed(seed, 10_000 + r))
            f0 = float(_min_distances(space, pts, x0[None])[0])
        return _pattern_search(space, pts, x0, f0, per, rng)

    workers = min(threads or default_threads(), restarts)
    if workers > 1 and per > 0:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(restarts)))
    elif per > 0:
        results = [one(r) for r in range(restarts)]
    else:
        results = []

    best_x, best_f = cert_point, certified
    for x, f, ev in results:  # merge in restart order; strict > keeps the lowest index
        used += ev
        if f > best_f:
            best_x, best_f = x, f
    return CoveringReport(certified, best_f, analytic_upper(net), best_x, used, seed)


# ---------------------------------------------------------------- searches

def _sphere_step(space: SpaceSpec, x: np.ndarray, target: np.ndarray, step: float) -> np.ndarray:
    y = x + step * (target - x)
    r = float(space._norms(y))
    return y / r if r > 1e-12 else x


def thickness_search(space: SpaceSpec, m: int, budget: int = 100_000, seed: int = 0,
                     iterations: int = 80) -> ThicknessSearchResult:
    """Heuristic minimization of the covering radius over nets of ``m`` unit points.

    Alternates between locating the worst ball point for the current net and
    moving the nearest net point toward it along the sphere, with a step that
    decays geometrically.  The best net seen is returned, so the result is never
    worse than the initial random net (as judged by the final full estimate).
    """
    if m < 1:
        raise InputError("m must be at least 1")
    rng = np.random.default_rng(seed)
    pts = random_directions(space, rng, m)
    inner = max(200, budget // (iterations + 2))

    def estimate(p: np.ndarray, s: int, b: int, restarts: int) -> CoveringReport:
        return covering_radius_estimate(space, Net(space, p, "search", {}), budget=b,
                                        restarts=restarts, seed=s, threads=1)

    initial = pts.copy()
    best_pts, best_val = pts.copy(), math.inf
    step = 0.5
    done = 0
    for t in range(iterations):
        rep = estimate(pts, sub_seed(seed, t), inner, 4)
        done = t + 1
        if rep.empirical_estimate < best_val:
            best_pts, best_val = pts.copy(), rep.empirical_estimate
        w = rep.best_witness
        rw = float(space._norms(w))
        if rw < 1e-9:
            # origin is the worst point found; re-estimate with the next seed
            continue
        i = int(np.argmin(space._norms(pts - w)))
        pts = pts.copy()
        pts[i] = _sphere_step(space, pts[i], w / rw, step)
        step *= 0.95

    final_seed = sub_seed(seed, 1_000_000)
    full = max(inner, budget // 4)
    best_rep = estimate(best_pts, final_seed, full, 8)
    init_rep = estimate(initial, final_seed, full, 8)
    if init_rep.empirical_estimate < best_rep.empirical_estimate:
        best_pts, best_rep = initial, init_rep
    net = Net(space, best_pts, "thickness_search", {"m": m, "seed": seed})
    return ThicknessSearchResult(m, net, best_rep, done)


def _pair_values(space: SpaceSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return np.minimum(space._norms(X - Y), space._norms(X + Y))


def _unit_rows(space: SpaceSpec, U: np.ndarray) -> np.ndarray:
    r = space._norms(U)
    r = np.where(r > 0, r, 1.0)
    return U / r[..., None]


def nonsquareness_estimate(space: SpaceSpec, budget: int = 40_000, restarts: int = 16,
                           seed: int = 0) -> NonsquarenessResult:
    """Lower estimate of ``sup min(|x - y|, |x + y|)`` over unit pairs ``x, y``.

    Pairs of distinct coordinate directions are tried first (in index order),
    then a pattern search runs in the product of two copies of the space.
    """
    dim = space.dim
    eye = np.eye(dim)
    pairs = [(i, j) for i in range(dim) for j in range(i + 1, dim)][:4096]
    if pairs:
        X = _unit_rows(space, eye[[i for i, _ in pairs]])
        Y = _unit_rows(space, eye[[j for _, j in pairs]])
    else:
        rng0 = np.random.default_rng(sub_seed(seed, 0))
        X = random_directions(space, rng0, 1)
        Y = random_directions(space, rng0, 1)
    vals = _pair_values(space, X, Y)
    used = len(vals)
    ci = int(np.argmax(vals))
    best_x, best_y, best_f = X[ci], Y[ci], float(vals[ci])

    per = max(0, (budget - used) // max(1, restarts))
    order = np.argsort(-vals, kind="stable")
    for r in range(restarts):
        rng = np.random.default_rng(sub_seed(seed, r + 1))
        if r < min(len(order), restarts // 2):
            u, v = X[order[r]], Y[order[r]]
        else:
            u, v = random_directions(space, rng, 2)
        f = float(_pair_values(space, u[None], v[None])[0])
        step, ev = 0.25, 0
        while ev + 4 * dim <= per and step > MIN_STEP:
            frame = _orthonormal(rng, 2 * dim) * step
            cand = np.vstack([np.concatenate([u, v]) + frame, np.concatenate([u, v]) - frame])
            cu, cv = _unit_rows(space, cand[:, :dim]), _unit_rows(space, cand[:, dim:])
            cvals = _pair_values(space, cu, cv)
            ev += len(cand)
            i = int(np.argmax(cvals))
            if cvals[i] > f:
                u, v, f = cu[i], cv[i], float(cvals[i])
                step = min(2.0 * step, 1.0)
            else:
                step *= 0.5
        used += ev
        if f > best_f + 1e-12:
            best_x, best_y, best_f = u, v, f
    best_f = float(_pair_values(space, best_x[None], best_y[None])[0])
    return NonsquarenessResult(best_f, best_x, best_y, used, seed)
