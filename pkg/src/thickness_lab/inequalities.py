"""Clarkson's and Hanner's inequalities for l_p / step-function L_p, with slack."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .spaces import INF, LpSeq, LpStep, SpaceSpec, as_point, norm


@dataclass(frozen=True)
class IneqCheck:
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.slack >= -1e-12 * max(1.0, abs(self.rhs))

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "slack": self.slack, "holds": self.holds}


def conjugate(p: float) -> float:
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def _lp_space(space: SpaceSpec) -> float:
    if not isinstance(space, (LpSeq, LpStep)):
        raise InputError("inequality checks need an LpSeq or LpStep space")
    return space.p


def clarkson_check(space: SpaceSpec, f, g) -> IneqCheck:
    """``|f+g|^q + |f-g|^q <= 2 (|f|^p + |g|^p)^(q/p)`` for ``1 < p <= 2``."""
    p = _lp_space(space)
    if not 1 < p <= 2:
        raise InputError(f"Clarkson's inequality in this form needs 1 < p <= 2, got p={p}")
    f, g = as_point(space, f), as_point(space, g)
    q = conjugate(p)
    lhs = norm(space, f + g) ** q + norm(space, f - g) ** q
    rhs = 2.0 * (norm(space, f) ** p + norm(space, g) ** p) ** (q / p)
    return IneqCheck(lhs, rhs)


def hanner_check(space: SpaceSpec, f, g) -> IneqCheck:
    """``|f+g|^p + |f-g|^p <= (|f|+|g|)^p + ||f|-|g||^p`` for ``2 <= p < inf``."""
    p = _lp_space(space)
    if not 2 <= p < INF:
        raise InputError(f"Hanner's inequality in this direction needs 2 <= p < inf, got p={p}")
    f, g = as_point(space, f), as_point(space, g)
    nf, ng = norm(space, f), norm(space, g)
    lhs = norm(space, f + g) ** p + norm(space, f - g) ** p
    rhs = (nf + ng) ** p + abs(nf - ng) ** p
    return IneqCheck(lhs, rhs)


def clarkson_net_bound(p: float) -> float:
    """Bound on ``min(|f + f0|, |f - f0|)`` for unit ``f0`` and ``|f| <= 1``, ``1 <= p <= 2``."""
    if not 1 <= p <= 2:
        raise InputError(f"need 1 <= p <= 2, got p={p}")
    if p == 1:
        return 2.0
    q = conjugate(p)
    return (2.0**q / 2.0) ** (1.0 / q)


def random_pair(space: SpaceSpec, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    # heavy-tailed scales so both tiny and dominant partners show up
    f = rng.standard_normal(space.dim) * np.exp(rng.normal())
    g = rng.standard_normal(space.dim) * np.exp(rng.normal())
    if rng.random() < 0.1:
        g = rng.normal() * f + 1e-3 * g
    return f, g


def verify(p: float, trials: int, seed: int, dim: int = 8) -> dict:
    """Random trials of whichever inequality applies at ``p`` in ``LpSeq(p, dim)``
    and ``LpStep(p, 2*dim)``, plus the two-point corollary for ``p <= 2``."""
    rng = np.random.default_rng(seed)
    out: dict = {"p": p, "trials": trials}
    spaces = [LpSeq(p, dim), LpStep(p, 2 * dim)]
    checks = []
    if 1 < p <= 2:
        checks.append(("clarkson", clarkson_check))
    if 2 <= p < INF:
        checks.append(("hanner", hanner_check))
    if not checks:
        raise InputError(f"no inequality applies at p={p}")
    for name, fn in checks:
        violations, worst = 0, np.inf
        for t in range(trials):
            space = spaces[t % 2]
            c = fn(space, *random_pair(space, rng))
            rel = c.slack / max(1.0, abs(c.rhs))
            worst = min(worst, rel)
            violations += not c.holds
        out[name] = {"violations": violations, "min_relative_slack": float(worst)}
    if p <= 2:
        bound = clarkson_net_bound(p)
        violations, worst = 0, -np.inf
        for t in range(trials):
            space = spaces[t % 2]
            f, f0 = random_pair(space, rng)
            f = f / norm(space, f) * rng.random() ** 0.25
            f0 = f0 / norm(space, f0)
            v = min(norm(space, f + f0), norm(space, f - f0))
            worst = max(worst, v)
            violations += v > bound + 1e-12
        out["two_point"] = {"bound": bound, "violations": violations, "max_value": float(worst)}
    return out
