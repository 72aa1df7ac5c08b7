"""Batch verification runner, counterexample search, and diagnostics.

The runner draws per-trial seeds from a master seed, materializes one
instance per trial, evaluates it at every requested grid point, and
streams one JSON object per report line.  Instances that violate a
check's hypotheses surface as ``error`` lines (null margins), not as
failures; a run fails only when a hypothesis-satisfying instance yields
a negative margin beyond tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .checks import InequalityReport
from .core import DEFAULT_TOL, ToleranceConfig
from .errors import IOFailure, OpineqError, UnknownCheck
from .generators import (
    CheckInstance, assert_hypotheses, build_instance, evaluate_instance,
    trial_seed, CHECK_NAMES, _SEED_MASK,
)
from .hmodule import ModuleContext, ModuleElement, module_norm, right_mul
from .errors import InvalidSpec

DEFAULT_EXPONENT_GRID = ((2.0, 2.0, 2.0), (3.0, 2.0, 6.0), (4.0, 4.0, 4.0),
                         (4 / 3, 4 / 3, 4 / 3))
DEFAULT_ALPHA_GRID = (0.5, 1.0, 2.0)

_GRID_CHECKS = ("check_interp", "check_defect")


@dataclass(frozen=True)
class RunConfig:
    """Everything a verification run depends on, explicitly."""

    trials: int
    checks: tuple[str, ...]
    tolerances: ToleranceConfig = DEFAULT_TOL
    exponent_grid: tuple[tuple[float, float, float], ...] = DEFAULT_EXPONENT_GRID
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHA_GRID
    output_path: str | None = None
    seed: int = 0
    dim: int | None = None
    length: int | None = None
    weights_mode: str = "random"
    scale: float = 1.0
    contraction: float = 0.999
    kind_override: str | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise InvalidSpec("trials must be >= 1")
        if not self.checks:
            raise InvalidSpec("at least one check is required")
        for name in self.checks:
            if name not in CHECK_NAMES:
                raise UnknownCheck(f"no check named {name!r}")
        for p, q, r in self.exponent_grid:
            if min(p, q, r) <= 1 or abs(1 / q + 1 / r - 2 / p) > 1e-12:
                raise InvalidSpec(f"bad exponent triple ({p}, {q}, {r})")
        for a in self.alpha_grid:
            if a <= 0:
                raise InvalidSpec("alpha grid entries must be positive")


@dataclass
class SuiteSummary:
    """Counts and extremes per check; ``failed`` drives the exit status."""

    counts: dict = field(default_factory=dict)
    worst_margin: dict = field(default_factory=dict)
    lines: int = 0

    def record(self, name: str, outcome: str, normalized_margin: float | None) -> None:
        slot = self.counts.setdefault(name, {"pass": 0, "fail": 0, "error": 0})
        slot[outcome] += 1
        self.lines += 1
        if normalized_margin is not None:
            prev = self.worst_margin.get(name)
            if prev is None or normalized_margin < prev:
                self.worst_margin[name] = normalized_margin

    @property
    def failed(self) -> bool:
        return any(slot["fail"] for slot in self.counts.values())


def _error_line(check: str, inst: CheckInstance | None, seed: int,
                exc: OpineqError, extra: dict | None = None) -> dict:
    digest = inst.digest() if inst is not None else {
        "seed": seed, "dim": None, "len": None, "params": {}}
    params = dict(digest.get("params", {}))
    if extra:
        params.update(extra)
    params["error"] = f"{type(exc).__name__}: {exc}"
    return {"name": check, "seed": digest.get("seed"), "dim": digest.get("dim"),
            "len": digest.get("len"), "params": params, "lhs": None, "rhs": None,
            "margin": None, "holds": None, "norm_detail": {}}


def _grid_points(check: str, cfg: RunConfig) -> list[dict]:
    if check == "check_interp" or check == "check_defect":
        return [{"pqr": pqr} for pqr in cfg.exponent_grid]
    if check == "check_alpha":
        return [{"alpha": a} for a in cfg.alpha_grid]
    return [{}]


def run_suite(cfg: RunConfig, writer=None) -> SuiteSummary:
    """Run every configured check over ``cfg.trials`` derived-seed instances.

    ``writer`` may be any object with a ``write`` method; when omitted and
    ``cfg.output_path`` is set, the file is created (overwritten) and each
    report is emitted as one sorted-key JSON line.
    """
    summary = SuiteSummary()
    close_me = None
    if writer is None and cfg.output_path:
        try:
            close_me = writer = open(cfg.output_path, "w", encoding="utf-8")
        except OSError as exc:
            raise IOFailure(f"cannot open {cfg.output_path!r}: {exc}") from exc
    try:
        for check in cfg.checks:
            for index in range(cfg.trials):
                seed = trial_seed(cfg.seed, check, index)
                try:
                    inst = build_instance(
                        check, seed, dim=cfg.dim, length=cfg.length,
                        weights_mode=cfg.weights_mode, scale=cfg.scale,
                        contraction=cfg.contraction, force_kind=cfg.kind_override)
                    if cfg.kind_override is None:
                        assert_hypotheses(inst, cfg.tolerances)
                except OpineqError as exc:
                    summary.record(check, "error", None)
                    _emit(writer, _error_line(check, None, seed, exc))
                    continue
                for point in _grid_points(check, cfg):
                    try:
                        rep = evaluate_instance(inst, cfg.tolerances, **point)
                    except OpineqError as exc:
                        summary.record(check, "error", None)
                        extra = {}
                        if "pqr" in point:
                            extra = dict(zip(("p", "q", "r"), point["pqr"]))
                        elif "alpha" in point:
                            extra = {"alpha": point["alpha"]}
                        _emit(writer, _error_line(check, inst, seed, exc, extra))
                        continue
                    summary.record(check, "pass" if rep.holds else "fail",
                                   rep.margin / rep.scale)
                    _emit(writer, rep.to_json_dict())
    finally:
        if close_me is not None:
            close_me.close()
    return summary


def _emit(writer, obj: dict) -> None:
    if writer is None:
        return
    try:
        writer.write(json.dumps(obj, sort_keys=True) + "\n")
    except OSError as exc:  # pragma: no cover - exercised via bad paths only
        raise IOFailure(f"cannot write report line: {exc}") from exc


# ---------------------------------------------------------------------------
# counterexample search

SEARCHABLE = ("check_cs", "check_basic", "check_hs", "check_refinement",
              "check_uin", "check_naopaka")

_SIGMAS = (0.5, 0.1, 0.02)


@dataclass(frozen=True)
class SearchResult:
    report: InequalityReport
    instance: CheckInstance
    evaluations: int


class _SearchState:
    """Mutable parameterization of one instance family.

    For constrained families the free parameters are the diagonal vectors
    of a fixed shared-unitary frame, so every perturbation stays inside
    the hypothesis set; generic families perturb raw part entries.
    """

    def __init__(self, check: str, rng: np.random.Generator, dim: int,
                 length: int, drop: tuple[str, ...]):
        self.check = check
        self.drop = drop
        self.d, self.n = dim, length
        self.normal = check in ("check_uin", "check_naopaka") and "normality" not in drop
        self.target = None
        if check == "check_naopaka":
            self.target = 1.0 if "contraction" in drop else 0.999
        self.weights = tuple(rng.uniform(0.1, 2.0, length))
        if self.normal:
            from .generators import _haar  # local: generator internals
            self.ux, self.uy = _haar(rng, dim), _haar(rng, dim)
            self.px = _gauss(rng, (length, dim))
            self.py = _gauss(rng, (length, dim))
        else:
            self.px = _gauss(rng, (length, dim, dim))
            self.py = _gauss(rng, (length, dim, dim))
        self.a = None
        if check != "check_cs":
            self.a = _gauss(rng, (dim, dim))

    def perturb(self, rng: np.random.Generator, sigma: float) -> "_SearchState":
        out = self.__class__.__new__(self.__class__)
        out.__dict__.update(self.__dict__)
        which = rng.integers(0, 3 if self.a is not None else 2)
        if which == 0:
            out.px = self.px + sigma * _gauss(rng, self.px.shape)
        elif which == 1:
            out.py = self.py + sigma * _gauss(rng, self.py.shape)
        else:
            out.a = self.a + sigma * _gauss(rng, self.a.shape)
        return out

    def materialize(self) -> CheckInstance:
        ctx = ModuleContext(self.d, self.weights)
        if self.normal:
            xs = tuple(self.ux @ np.diag(v) @ self.ux.conj().T for v in self.px)
            ys = tuple(self.uy @ np.diag(v) @ self.uy.conj().T for v in self.py)
        else:
            xs, ys = tuple(self.px), tuple(self.py)
        x, y = ModuleElement(ctx, xs), ModuleElement(ctx, ys)
        if self.target is not None:
            nx, ny = module_norm(x), module_norm(y)
            if nx > 0:
                x = (self.target / nx) * x
            if ny > 0:
                y = (self.target / ny) * y
        return CheckInstance(check=self.check, seed=None, kind="search", x=x,
                             y=y, a=self.a, drop=self.drop)


def _gauss(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def search_counterexample(check: str, drop: tuple[str, ...] = (),
                          budget: int = 1000, seed: int = 0,
                          dim: int | None = None, length: int | None = None,
                          tol: ToleranceConfig = DEFAULT_TOL) -> SearchResult:
    """Random-restart hill climbing on the normalized margin.

    Perturbations that raise an :class:`OpineqError` (for example a
    contraction pushed past the series boundary) count against the budget
    and are rejected.  The result records the smallest margin seen; it
    never claims that no counterexample exists.
    """
    if check not in SEARCHABLE:
        raise UnknownCheck(f"search does not support {check!r}")
    rng = np.random.default_rng(int(seed) & _SEED_MASK)
    best: tuple[float, InequalityReport, CheckInstance] | None = None
    evals = 0
    block = max(40, budget // 8)

    def try_eval(state: _SearchState):
        nonlocal evals, best
        evals += 1
        inst = state.materialize()
        try:
            rep = evaluate_instance(inst, tol)
        except OpineqError:
            return None
        value = rep.margin / rep.scale
        if best is None or value < best[0]:
            best = (value, rep, inst)
        return value

    while evals < budget:
        d = int(dim) if dim is not None else int(rng.integers(2, 6))
        n = int(length) if length is not None else int(rng.integers(1, 4))
        state = _SearchState(check, rng, d, n, tuple(drop))
        current = try_eval(state)
        spent = 1
        stale = 0
        while current is None and evals < budget and spent < 5:
            state = _SearchState(check, rng, d, n, tuple(drop))
            current = try_eval(state)
            spent += 1
        if current is None:
            continue
        while evals < budget and spent < block and stale < 60:
            sigma = _SIGMAS[min(2, stale // 20)]
            cand = state.perturb(rng, sigma)
            value = try_eval(cand)
            spent += 1
            if value is not None and value < current:
                state, current = cand, value
                stale = 0
            else:
                stale += 1
    if best is None:  # every evaluation errored; report the fact loudly
        raise OpineqError(f"search on {check} produced no evaluable instance")
    return SearchResult(report=best[1], instance=best[2], evaluations=evals)


def naopaka_delta_sweep(seed: int = 0, deltas: tuple[float, ...] = (0.9, 0.99, 0.999),
                        trials: int = 20, dim: int | None = None,
                        length: int | None = None,
                        tol: ToleranceConfig = DEFAULT_TOL) -> list[dict]:
    """Diagnostic margin profile as the contraction approaches the boundary.

    Reports the worst normalized margin per contraction level; nothing is
    asserted about the limit, the table is for inspection only.
    """
    out = []
    for delta in deltas:
        worst = math.inf
        for index in range(trials):
            s = trial_seed(seed, f"delta_{delta}", index)
            inst = build_instance("check_naopaka", s, dim=dim, length=length,
                                  contraction=delta)
            rep = evaluate_instance(inst, tol)
            worst = min(worst, rep.margin / rep.scale)
        out.append({"delta": delta, "worst_margin": worst, "trials": trials})
    return out
