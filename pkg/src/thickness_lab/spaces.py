"""Finite-dimensional normed spaces and their norm oracles.

Four families are supported:

* ``LpSeq(p, dim)``   -- sequence space l_p^dim, ``p = inf`` gives the max norm.
* ``LpStep(p, n)``    -- step functions on ``n`` equal subintervals of [0, 1]
  with the L_p norm, i.e. ``((1/n) * sum |c_i|^p)^(1/p)``.
* ``PSum(p, factors)`` -- the l_p-sum of the factor spaces; coordinates are the
  concatenated factor coordinates.
* ``PolyK(k, dim)``   -- average of the ``k`` largest absolute coordinates.

Points are plain float64 numpy arrays.  Every norm function accepts a batch of
points stacked along the leading axes and reduces over the last one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence, Union

import numpy as np

from .errors import DomainError, InputError

INF = math.inf

# algebraic identities (homogeneity, round trips)
REL_TOL = 1e-12
# unit-norm membership of net points
NET_UNIT_TOL = 1e-9

Point = np.ndarray


def _check_p(p: float, allow_inf: bool = True) -> float:
    p = float(p)
    if math.isnan(p) or p < 1 or (p == INF and not allow_inf):
        raise InputError(f"exponent p={p} out of range")
    return p


def _lp_combine(values: np.ndarray, p: float) -> np.ndarray:
    """l_p combination of nonnegative values along the last axis."""
    if p == INF:
        return values.max(axis=-1)
    if p == 1:
        return values.sum(axis=-1)
    if p == 2:
        return np.sqrt(np.einsum("...i,...i->...", values, values))
    # scale by the max to avoid overflow for large p
    top = values.max(axis=-1, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    return top[..., 0] * ((values / safe) ** p).sum(axis=-1) ** (1.0 / p)


@dataclass(frozen=True)
class LpSeq:
    p: float
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "p", _check_p(self.p))
        if int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dim must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))

    def _norms(self, x: np.ndarray) -> np.ndarray:
        return _lp_combine(np.abs(x), self.p)


@dataclass(frozen=True)
class LpStep:
    p: float
    n: int

    def __post_init__(self):
        object.__setattr__(self, "p", _check_p(self.p, allow_inf=False))
        if int(self.n) != self.n or self.n < 1:
            raise InputError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def dim(self) -> int:
        return self.n

    def _norms(self, x: np.ndarray) -> np.ndarray:
        return _lp_combine(np.abs(x), self.p) * self.n ** (-1.0 / self.p)


@dataclass(frozen=True)
class PSum:
    p: float
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", _check_p(self.p))
        factors = tuple(self.factors)
        if not factors:
            raise InputError("PSum needs at least one factor")
        for f in factors:
            if not isinstance(f, (LpSeq, LpStep, PSum, PolyK)):
                raise InputError(f"unsupported factor {f!r}")
        object.__setattr__(self, "factors", factors)

    @property
    def dim(self) -> int:
        return sum(f.dim for f in self.factors)

    @property
    def offsets(self) -> list[int]:
        """Start index of every factor block, plus the total dimension."""
        out = [0]
        for f in self.factors:
            out.append(out[-1] + f.dim)
        return out

    def block(self, m: int) -> slice:
        off = self.offsets
        return slice(off[m], off[m + 1])

    def factor_norms(self, x: np.ndarray) -> np.ndarray:
        off = self.offsets
        cols = [f._norms(x[..., off[i]:off[i + 1]]) for i, f in enumerate(self.factors)]
        return np.stack(cols, axis=-1)

    def _norms(self, x: np.ndarray) -> np.ndarray:
        return _lp_combine(self.factor_norms(x), self.p)


@dataclass(frozen=True)
class PolyK:
    k: int
    dim: int

    def __post_init__(self):
        if int(self.k) != self.k or int(self.dim) != self.dim or not 1 <= self.k <= self.dim:
            raise InputError(f"PolyK needs 1 <= k <= dim, got k={self.k}, dim={self.dim}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "dim", int(self.dim))

    def _norms(self, x: np.ndarray) -> np.ndarray:
        a = np.abs(x)
        if self.k == self.dim:
            return a.sum(axis=-1) / self.k
        # partial selection: the k largest sit at the tail after partitioning
        top = np.partition(a, self.dim - self.k, axis=-1)[..., self.dim - self.k:]
        return top.sum(axis=-1) / self.k


SpaceSpec = Union[LpSeq, LpStep, PSum, PolyK]


def as_point(space: SpaceSpec, x: Any) -> Point:
    """Validate ``x`` as a point of ``space`` and return it as a float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != space.dim:
        raise InputError(f"point of shape {arr.shape} does not match dim {space.dim}")
    if not np.all(np.isfinite(arr)):
        raise InputError("point has non-finite coordinates")
    return arr


def norms(space: SpaceSpec, x: np.ndarray) -> np.ndarray:
    """Norms of a batch of points of shape ``(..., dim)``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != space.dim:
        raise InputError(f"last axis {x.shape[-1]} does not match dim {space.dim}")
    return space._norms(x)


def norm(space: SpaceSpec, x: Any) -> float:
    return float(space._norms(as_point(space, x)))


def normalize(space: SpaceSpec, x: Any) -> Point:
    x = as_point(space, x)
    r = float(space._norms(x))
    if r == 0:
        raise DomainError("cannot normalize the zero vector")
    return x / r


def project_ball(space: SpaceSpec, x: np.ndarray) -> np.ndarray:
    """Radial projection onto the closed unit ball, batched over leading axes."""
    r = np.asarray(space._norms(x))
    scale = 1.0 / np.maximum(r, 1.0)
    out = x * scale[..., None]
    # rounding can leave a rescaled point a hair outside the ball
    over = space._norms(out) > 1.0
    if np.any(over):
        out = np.where(over[..., None], out * (1.0 - 4e-16), out)
    return out


def random_directions(space: SpaceSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    g = rng.standard_normal((count, space.dim))
    r = space._norms(g)
    return g / r[:, None]


def sample_ball(space: SpaceSpec, seed: int | Sequence[int]) -> Point:
    """Deterministic random point of the unit ball.

    Direction from a normalized Gaussian draw, radius ``u**(1/dim)``; uniform
    for Euclidean balls and merely a reasonable spread for the others.
    """
    rng = np.random.default_rng(seed)
    while True:
        g = rng.standard_normal(space.dim)
        r = float(space._norms(g))
        if r > 0:
            break
    radius = rng.random() ** (1.0 / space.dim)
    return project_ball(space, g * (radius / r))


def psum_split(space: SpaceSpec, x: Any) -> list[tuple[SpaceSpec, Point]]:
    if not isinstance(space, PSum):
        raise InputError("psum_split needs a PSum space")
    x = as_point(space, x)
    return [(f, x[space.block(m)].copy()) for m, f in enumerate(space.factors)]


def is_scalar(space: SpaceSpec) -> bool:
    """True for one-dimensional spaces whose norm is |x| (a copy of the reals)."""
    return isinstance(space, LpSeq) and space.dim == 1


# ---------------------------------------------------------------- serialization

def _p_to_json(p: float) -> float | str:
    return "inf" if p == INF else p


def _p_from_json(value: Any) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return INF
        raise InputError(f"bad exponent {value!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"bad exponent {value!r}")
    return float(value)


def space_to_dict(space: SpaceSpec) -> dict:
    if isinstance(space, LpSeq):
        return {"kind": "lp_seq", "p": _p_to_json(space.p), "dim": space.dim}
    if isinstance(space, LpStep):
        return {"kind": "lp_step", "p": _p_to_json(space.p), "n": space.n}
    if isinstance(space, PSum):
        return {"kind": "p_sum", "p": _p_to_json(space.p),
                "factors": [space_to_dict(f) for f in space.factors]}
    if isinstance(space, PolyK):
        return {"kind": "poly_k", "k": space.k, "dim": space.dim}
    raise InputError(f"unknown space {space!r}")


def space_from_dict(data: dict) -> SpaceSpec:
    if not isinstance(data, dict) or "kind" not in data:
        raise InputError(f"space description must be an object with 'kind': {data!r}")
    kind = data["kind"]
    try:
        if kind == "lp_seq":
            return LpSeq(_p_from_json(data["p"]), data["dim"])
        if kind == "lp_step":
            return LpStep(_p_from_json(data["p"]), data["n"])
        if kind == "p_sum":
            return PSum(_p_from_json(data["p"]), tuple(space_from_dict(f) for f in data["factors"]))
        if kind == "poly_k":
            return PolyK(data["k"], data["dim"])
    except KeyError as exc:
        raise InputError(f"space of kind {kind!r} is missing field {exc}") from None
    raise InputError(f"unknown space kind {kind!r}")
