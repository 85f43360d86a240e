"""Named experiments with their acceptance thresholds.

Each scenario builds a net, runs the witness constructions and the covering
engine on it, and records comparisons against closed-form values.  A config
``tol`` replaces the scenario's main tolerance.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from . import inequalities
from .covering import (
    covering_radius_estimate,
    nonsquareness_estimate,
    thickness_search,
)
from .errors import InputError
from .nets import (
    Net,
    antipodal_net,
    four_point_net,
    hyperplane_net,
    lp_func_net,
    prop1_net,
    product_net,
)
from .spaces import (
    INF,
    LpSeq,
    LpStep,
    PolyK,
    PSum,
    _p_from_json,
    _p_to_json,
    space_from_dict,
)
from .witnesses import (
    lemma3_witness,
    lp_step_witness,
    polyk_witness,
    tail_witness,
    uns_bound,
    uns_example_witness,
)


class ConfigError(ValueError):
    pass


SCENARIOS = (
    "lp-thickness", "lp-step", "product", "l1-sum-l1", "prop1", "hyperplane",
    "polyhedral", "uns-example", "thickness-search", "verify-inequalities",
)

REQUIRED = {
    "lp-thickness": ("p", "dim"),
    "lp-step": ("p", "n"),
    "product": ("p", "eps", "factors"),
    "l1-sum-l1": ("d",),
    "prop1": ("p", "d"),
    "hyperplane": ("d",),
    "polyhedral": ("k", "dim"),
    "uns-example": ("p", "d"),
    "thickness-search": ("p", "dim", "m"),
    "verify-inequalities": ("p", "trials"),
}


@dataclass
class ExperimentConfig:
    scenario: str
    seed: int
    p: Any = None
    dim: Optional[int] = None
    n: Optional[int] = None
    k: Optional[int] = None
    d: Optional[int] = None
    factors: Optional[list] = None
    eps: Optional[float] = None
    m: Optional[int] = None
    budget: Optional[int] = None
    restarts: Optional[int] = None
    refine: Optional[int] = None
    trials: Optional[int] = None
    support: Optional[int] = None
    tol: Optional[float] = None
    out_path: Optional[str] = None

    @classmethod
    def from_dict(cls, data: Any) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if data.get("scenario") not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {data.get('scenario')!r}")
        if not isinstance(data.get("seed"), int) or isinstance(data.get("seed"), bool):
            raise ConfigError("an integer seed is required")
        missing = [f for f in REQUIRED[data["scenario"]] if data.get(f) is None]
        if missing:
            raise ConfigError(f"scenario {data['scenario']!r} needs fields {missing}")
        cfg = cls(**data)
        try:
            if cfg.p is not None:
                cfg.p = _p_to_json(_p_from_json(cfg.p))
            for name in ("dim", "n", "k", "d", "m", "budget", "restarts", "refine", "trials", "support"):
                v = getattr(cfg, name)
                if v is not None and (not isinstance(v, int) or isinstance(v, bool) or v < 1):
                    raise ConfigError(f"{name} must be a positive integer")
            for name in ("eps", "tol"):
                v = getattr(cfg, name)
                if v is not None and (not isinstance(v, (int, float)) or v < 0):
                    raise ConfigError(f"{name} must be a nonnegative number")
            if cfg.factors is not None:
                if not isinstance(cfg.factors, list) or not cfg.factors:
                    raise ConfigError("factors must be a nonempty list of space objects")
                [space_from_dict(f) for f in cfg.factors]
        except InputError as exc:
            raise ConfigError(str(exc)) from None
        return cfg

    @property
    def p_value(self) -> float:
        return _p_from_json(self.p)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass
class Outcome:
    runs: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def check(self, name: str, value: float, op: str, bound: float) -> None:
        ok = {"<=": value <= bound, ">=": value >= bound}[op]
        self.assertions.append({"name": name, "value": value, "op": op, "bound": bound,
                                "pass": bool(ok)})

    def near(self, name: str, value: float, target: float, tol: float) -> None:
        self.assertions.append({"name": name, "value": value, "op": "~", "bound": target,
                                "tol": tol, "pass": bool(abs(value - target) <= tol)})

    def bracket(self, report) -> None:
        """Soundness of a covering report: lower <= estimate and lower <= upper."""
        self.check("certified_lower<=estimate", report.certified_lower, "<=",
                   report.empirical_estimate + 1e-9)
        if report.analytic_upper is not None:
            self.check("certified_lower<=analytic_upper", report.certified_lower, "<=",
                       report.analytic_upper + 1e-9)


def _estimate(cfg: ExperimentConfig, net: Net, candidates=(), budget: int = 200_000):
    return covering_radius_estimate(net.space, net, budget=cfg.budget or budget,
                                    restarts=cfg.restarts or 32, seed=cfg.seed,
                                    candidates=candidates)


def _tol(cfg: ExperimentConfig, default: float) -> float:
    return default if cfg.tol is None else float(cfg.tol)


def _summary(out: Outcome, report, dim: int, m: Optional[int] = None) -> None:
    out.summary = {"dim": dim, "m": m, "lower": report.certified_lower,
                   "estimate": report.empirical_estimate, "upper": report.analytic_upper}


def lp_thickness(cfg: ExperimentConfig) -> Outcome:
    p, tol = cfg.p_value, _tol(cfg, 1e-2)
    space = LpSeq(p, cfg.dim)
    net = antipodal_net(space, np.eye(cfg.dim)[0])
    out = Outcome()
    target = 1.0 if p == INF else 2.0 ** (1.0 / p)
    cands = []
    if p != INF and cfg.dim >= 2:
        w = tail_witness(space, net)
        out.runs["tail_witness"] = w.to_dict()
        cands.append(w.witness)
    rep = _estimate(cfg, net, cands)
    out.runs["covering"] = rep.to_dict()
    out.near("certified_lower~2^(1/p)", rep.certified_lower, target, tol)
    out.near("estimate~2^(1/p)", rep.empirical_estimate, target, tol)
    out.bracket(rep)
    _summary(out, rep, cfg.dim, len(net))
    return out


def lp_step(cfg: ExperimentConfig) -> Outcome:
    p, tol = cfg.p_value, _tol(cfg, 1e-2)
    out = Outcome()
    if p >= 2:
        net = lp_func_net(p, cfg.n)
        refine = cfg.refine or 8
        w = lp_step_witness(net, refine)
        out.runs["lp_step_witness"] = w.to_dict()
        rep = _estimate(cfg, net)
        out.check("eps^p<=|net|/(n*refine)", w.params["eps_p"], "<=", len(net) / (cfg.n * refine))
        out.check("witness_measured>=guaranteed", w.measured_distance, ">=",
                  w.guaranteed_distance - 1e-9)
        out.check("estimate<=analytic_upper", rep.empirical_estimate, "<=", rep.analytic_upper + tol)
    else:
        space = LpStep(p, cfg.n)
        net = antipodal_net(space, np.ones(cfg.n))
        rep = _estimate(cfg, net)
        out.check("estimate<=2^(1/p)", rep.empirical_estimate, "<=", 2.0 ** (1.0 / p) + tol)
    out.runs["covering"] = rep.to_dict()
    out.bracket(rep)
    _summary(out, rep, cfg.n, len(net))
    return out


def product(cfg: ExperimentConfig) -> Outcome:
    tol = _tol(cfg, 1e-2)
    out = Outcome()
    factor_nets, radii = [], []
    for i, fd in enumerate(cfg.factors):
        f = space_from_dict(fd)
        fnet = antipodal_net(f, _first_unit(f))
        r = covering_radius_estimate(f, fnet, budget=cfg.budget or 50_000,
                                     restarts=cfg.restarts or 32, seed=cfg.seed)
        out.runs[f"factor_{i}"] = r.to_dict()
        factor_nets.append(fnet)
        radii.append(r.empirical_estimate)
    net = product_net(factor_nets, cfg.p_value, cfg.eps)
    rep = _estimate(cfg, net, budget=50_000)
    out.runs["covering"] = rep.to_dict()
    out.runs["net_size"] = len(net)
    out.check("estimate<=max(r_n)+2eps", rep.empirical_estimate, "<=",
              max(radii) + 2 * cfg.eps + tol)
    out.bracket(rep)
    _summary(out, rep, net.space.dim, len(net))
    return out


def _first_unit(space) -> np.ndarray:
    e = np.zeros(space.dim)
    e[0] = 1.0
    return e / space._norms(e)


def l1_sum_l1(cfg: ExperimentConfig) -> Outcome:
    tol = _tol(cfg, 1e-2)
    space = PSum(2, (LpSeq(1, cfg.d), LpSeq(1, cfg.d)))
    net = four_point_net(space)
    w = lemma3_witness(space, net)
    rep = _estimate(cfg, net, [w.witness])
    target = math.sqrt(2 + math.sqrt(2))
    out = Outcome(runs={"lemma3_witness": w.to_dict(), "covering": rep.to_dict()})
    out.near("certified_lower~sqrt(2+sqrt2)", rep.certified_lower, target, tol)
    out.near("estimate~sqrt(2+sqrt2)", rep.empirical_estimate, target, tol)
    out.near("analytic_upper=sqrt(2+sqrt2)", rep.analytic_upper, target, 0.0)
    out.bracket(rep)
    _summary(out, rep, space.dim, len(net))
    return out


def prop1(cfg: ExperimentConfig) -> Outcome:
    p, tol = cfg.p_value, _tol(cfg, 1e-2)
    y = space_from_dict(cfg.factors[0]) if cfg.factors else LpSeq(1, 4)
    space = PSum(p, (LpSeq(p, cfg.d), y))
    net = prop1_net(space)
    w = tail_witness(space, net)
    rep = _estimate(cfg, net, [w.witness])
    target = 2.0 ** (1.0 / p)
    out = Outcome(runs={"tail_witness": w.to_dict(), "covering": rep.to_dict()})
    out.check("tail_guaranteed>=2^(1/p)", w.guaranteed_distance, ">=", target - 1e-9)
    out.check("tail_measured>=guaranteed", w.measured_distance, ">=", w.guaranteed_distance - 1e-9)
    out.check("estimate<=2^(1/p)", rep.empirical_estimate, "<=", target + tol)
    out.bracket(rep)
    _summary(out, rep, space.dim, len(net))
    return out


def hyperplane(cfg: ExperimentConfig) -> Outcome:
    tol = _tol(cfg, 1e-3)
    x = space_from_dict(cfg.factors[0]) if cfg.factors else LpSeq(1, cfg.d)
    space = PSum(INF, (x, LpSeq(1, 1)))
    net = hyperplane_net(space)
    rep = _estimate(cfg, net)
    out = Outcome(runs={"covering": rep.to_dict()})
    out.near("estimate~1", rep.empirical_estimate, 1.0, tol)
    out.check("certified_lower>=1", rep.certified_lower, ">=", 1.0 - 1e-12)
    out.bracket(rep)
    _summary(out, rep, space.dim, len(net))
    return out


def random_supported_net(space, count: int, support: int, rng: np.random.Generator) -> Net:
    g = np.zeros((count, space.dim))
    g[:, :support] = rng.standard_normal((count, support))
    return Net(space, g / space._norms(g)[:, None], "random_supported", {"support": support})


def polyhedral(cfg: ExperimentConfig) -> Outcome:
    k = cfg.k
    space = PolyK(k, cfg.dim)
    support = cfg.support or min(15, cfg.dim - 1)
    rng = np.random.default_rng(cfg.seed)
    net = random_supported_net(space, cfg.m or 10, support, rng)
    w = polyk_witness(space, net)
    rep = _estimate(cfg, net, [w.witness], budget=20_000)
    target = (2 * k - 1) / k
    out = Outcome(runs={"polyk_witness": w.to_dict(), "covering": rep.to_dict()})
    out.check("guaranteed>=(2k-1)/k", w.guaranteed_distance, ">=", target - 1e-9)
    out.check("measured>=guaranteed", w.measured_distance, ">=", w.guaranteed_distance - 1e-9)
    out.bracket(rep)
    _summary(out, rep, cfg.dim, len(net))
    return out


def uns_example(cfg: ExperimentConfig) -> Outcome:
    p, tol = cfg.p_value, _tol(cfg, 1e-2)
    lp = LpSeq(p, cfg.d)
    space = PSum(1, (LpSeq(1, 1), lp))
    out = Outcome()
    ns = nonsquareness_estimate(space, budget=cfg.budget or 40_000, seed=cfg.seed)
    out.runs["nonsquareness"] = ns.to_dict()
    out.check("nonsquareness>=2", ns.value, ">=", 2.0 - 1e-9)

    # covering net of the finite sum: weights on the l_1 circle times +-1 and +-e_1
    fnets = [antipodal_net(LpSeq(1, 1), [1.0]), antipodal_net(lp, np.eye(cfg.d)[0])]
    net = product_net(fnets, 1, cfg.eps or 0.25)
    w = uns_example_witness(space, net)
    rep = _estimate(cfg, net, [w.witness], budget=50_000)
    out.runs["uns_witness"] = w.to_dict()
    out.runs["covering"] = rep.to_dict()
    target = 2.0 ** (1.0 / p)
    out.check("uns_guaranteed>=2^(1/p)", w.guaranteed_distance, ">=", target - tol)
    out.check("uns_measured>=guaranteed", w.measured_distance, ">=", w.guaranteed_distance - 1e-9)
    bs = np.linspace(0.0, 1.0, 1001)
    out.check("min_b 1-b+(b^p+1)^(1/p)>=2^(1/p)", float(uns_bound(bs, 0.0, p).min()), ">=",
              target - 1e-12)
    out.bracket(rep)
    _summary(out, rep, space.dim, len(net))
    return out


def thickness_search_scenario(cfg: ExperimentConfig) -> Outcome:
    p = cfg.p_value
    space = LpSeq(p, cfg.dim)
    res = thickness_search(space, cfg.m, budget=cfg.budget or 100_000, seed=cfg.seed)
    rep = res.report
    out = Outcome(runs={"search": res.to_dict()})
    out.check("estimate>=1", rep.empirical_estimate, ">=", 1.0 - 1e-9)
    if p == 2 and cfg.dim == 2:
        if cfg.m == 1:
            out.near("m=1:estimate~2", rep.empirical_estimate, 2.0, _tol(cfg, 1e-3))
        elif cfg.m == 2:
            out.near("m=2:estimate~sqrt2", rep.empirical_estimate, math.sqrt(2), _tol(cfg, 2e-2))
        elif cfg.m >= 16:
            out.check("m>=16:estimate<=1.05", rep.empirical_estimate, "<=", 1.0 + _tol(cfg, 5e-2))
    out.bracket(rep)
    _summary(out, rep, cfg.dim, cfg.m)
    return out


def verify_inequalities(cfg: ExperimentConfig) -> Outcome:
    try:
        res = inequalities.verify(cfg.p_value, cfg.trials, cfg.seed, dim=cfg.dim or 8)
    except InputError as exc:
        raise ConfigError(str(exc)) from None
    out = Outcome(runs={"inequalities": res})
    for name in ("clarkson", "hanner", "two_point"):
        if name in res:
            out.check(f"{name}_violations", res[name]["violations"], "<=", 0)
    out.summary = {"dim": cfg.dim or 8, "m": None, "lower": None, "estimate": None, "upper": None}
    return out


RUNNERS: dict[str, Callable[[ExperimentConfig], Outcome]] = {
    "lp-thickness": lp_thickness,
    "lp-step": lp_step,
    "product": product,
    "l1-sum-l1": l1_sum_l1,
    "prop1": prop1,
    "hyperplane": hyperplane,
    "polyhedral": polyhedral,
    "uns-example": uns_example,
    "thickness-search": thickness_search_scenario,
    "verify-inequalities": verify_inequalities,
}


def run(cfg: ExperimentConfig) -> dict:
    """Execute a scenario and return the full report as a JSON-ready dict."""
    t0 = time.perf_counter()
    out = RUNNERS[cfg.scenario](cfg)
    return {
        "config": cfg.to_dict(),
        "runs": out.runs,
        "assertions": out.assertions,
        "summary": out.summary,
        "pass": all(a["pass"] for a in out.assertions),
        "wall_time": time.perf_counter() - t0,
    }
