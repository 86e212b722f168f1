"""Optimization on top of feasibility: restarts, bound sweep, incumbents.

Feasibility launches up to ``restarts`` trajectories per pass (seeds base,
base+1, ...); the winner is the lowest-seeded solved trajectory, which makes
the result independent of how many worker threads ran them.  Optimization
repeats feasibility under a descending objective bound: each incumbent z
tightens the bound to z - g until the bound drops below the trivial floor or
the budget runs out.  Verdicts never claim proven optimality.

Step accounting is deterministic: a pass charges the full per-run budget of
every seed below the winner plus the winner's own steps, regardless of what
opportunistic parallel work was cancelled.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import model
from .circuit import Soac, build_circuit
from .dynamics import (
    SOLVED,
    Budget,
    DynParams,
    TrajectoryOutcome,
    integrate,
)

OPTIMUM_NOT_PROVEN = "optimum-not-proven"
INFEASIBLE_NOT_PROVEN = "infeasible-not-proven"
TRIVIALLY_INFEASIBLE = "trivially-infeasible"

_SWEEP_ESTIMATE_CAP = 64


@dataclass(frozen=True)
class SolverConfig:
    params: DynParams = DynParams()
    restarts: int = 4
    seed: int = 0
    max_steps_per_run: int = 100_000
    total_max_steps: Optional[int] = None  # whole-solve step budget
    wall_time_total: Optional[float] = None  # seconds
    granularity: Optional[float] = None  # None: 1 if integral objective, else 1e-6 * range
    warm_start: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("need restarts >= 1")
        if self.max_steps_per_run < 1:
            raise ValueError("need max_steps_per_run >= 1")
        if self.granularity is not None and self.granularity <= 0:
            raise ValueError("need granularity > 0")
        if self.threads < 1:
            raise ValueError("need threads >= 1")


@dataclass(frozen=True)
class Incumbent:
    assignment: dict[str, int]  # original variables
    objective: float  # in the problem's stated sense
    canonical_objective: float  # minimization value driving the sweep
    bound: float  # bound active when found (inf on the first pass)
    seed: int
    steps: int
    found_at: float  # wall seconds since solve start


@dataclass(frozen=True)
class PassStats:
    bound: float
    seed_base: int
    seeds_run: int
    solved_seed: Optional[int]
    steps: int


@dataclass(frozen=True)
class BudgetUsed:
    steps: int
    wall_s: float


@dataclass(frozen=True)
class SolveReport:
    best: Optional[Incumbent]
    history: tuple[Incumbent, ...]
    verdict: str
    budget: BudgetUsed
    passes: tuple[PassStats, ...] = ()

    def to_dict(self, timing: bool = True) -> dict:
        def enc_bound(b: float):
            return None if math.isinf(b) else b

        def enc_inc(inc: Incumbent) -> dict:
            d = {
                "assignment": inc.assignment,
                "objective": inc.objective,
                "canonical_objective": inc.canonical_objective,
                "bound": enc_bound(inc.bound),
                "seed": inc.seed,
                "steps": inc.steps,
            }
            if timing:
                d["found_at"] = inc.found_at
            return d

        doc = {
            "best": enc_inc(self.best) if self.best else None,
            "history": [enc_inc(i) for i in self.history],
            "verdict": self.verdict,
            "budget": {"steps": self.budget.steps},
            "passes": [
                {
                    "bound": enc_bound(p.bound),
                    "seed_base": p.seed_base,
                    "seeds_run": p.seeds_run,
                    "solved_seed": p.solved_seed,
                    "steps": p.steps,
                }
                for p in self.passes
            ],
        }
        if timing:
            doc["budget"]["wall_s"] = self.budget.wall_s
        return doc

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing=timing), indent=2) + "\n"


def trivial_bounds(cp: model.CanonicalProblem) -> tuple[float, float]:
    """(sum of negative c + offset, sum of positive c + offset)."""
    lower = sum(c for _, c in cp.objective if c < 0) + cp.offset
    upper = sum(c for _, c in cp.objective if c > 0) + cp.offset
    return lower, upper


def default_granularity(cp: model.CanonicalProblem) -> float:
    obj_integral = all(
        isinstance(c, int) or float(c).is_integer() for _, c in cp.objective
    ) and float(cp.offset).is_integer()
    if obj_integral:
        return 1.0
    lower, upper = trivial_bounds(cp)
    return max(1e-6 * (upper - lower), 1e-12)


@dataclass(frozen=True)
class _PassResult:
    solved_seed: Optional[int]
    outcome: Optional[TrajectoryOutcome]
    seeds_run: int
    steps: int  # deterministic accounting


def _run_pass(
    circuit: Soac,
    cp: model.CanonicalProblem,
    config: SolverConfig,
    seed_base: int,
    budgets: list[int],
    deadline: Optional[float],
    v_warm: Optional[np.ndarray],
) -> _PassResult:
    def run_one(k: int) -> TrajectoryOutcome:
        wall = None if deadline is None else max(0.0, deadline - time.monotonic())
        return integrate(
            circuit,
            cp,
            config.params,
            seed_base + k,
            Budget(budgets[k], wall),
            v0=v_warm if k == 0 else None,
        )

    outcomes: dict[int, TrajectoryOutcome] = {}
    if config.threads == 1 or len(budgets) == 1:
        for k in range(len(budgets)):
            outcomes[k] = run_one(k)
            if outcomes[k].status == SOLVED:
                break
            if deadline is not None and time.monotonic() >= deadline:
                break
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            futures = {pool.submit(run_one, k): k for k in range(len(budgets))}
            pending = set(futures)
            min_solved: Optional[int] = None
            while pending:
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    k = futures[fut]
                    if not fut.cancelled():
                        outcomes[k] = fut.result()
                        if outcomes[k].status == SOLVED and (min_solved is None or k < min_solved):
                            min_solved = k
                if min_solved is not None:
                    # The winner is decided once every lower seed has finished.
                    if all(k in outcomes for k in range(min_solved)):
                        for fut in pending:
                            fut.cancel()
                        pending = set()

    solved = sorted(k for k, o in outcomes.items() if o.status == SOLVED)
    if solved:
        w = solved[0]
        steps = sum(budgets[k] for k in range(w)) + outcomes[w].steps
        return _PassResult(w, outcomes[w], w + 1, steps)
    seeds_run = len(outcomes)
    steps = sum(outcomes[k].steps for k in outcomes)
    return _PassResult(None, None, seeds_run, steps)


def _pass_budgets(config: SolverConfig, steps_remaining: Optional[int]) -> list[int]:
    budgets: list[int] = []
    rem = steps_remaining
    for _ in range(config.restarts):
        b = config.max_steps_per_run if rem is None else min(config.max_steps_per_run, rem)
        if b <= 0:
            break
        budgets.append(b)
        if rem is not None:
            rem -= b
    return budgets


def _make_incumbent(
    cp: model.CanonicalProblem,
    x: np.ndarray,
    bound: float,
    seed: int,
    steps: int,
    t0: float,
) -> Incumbent:
    z = model.objective_value(cp, x)
    return Incumbent(
        assignment=model.decode(cp.var_map, x),
        objective=model.original_objective_value(cp, z),
        canonical_objective=z,
        bound=bound,
        seed=seed,
        steps=steps,
        found_at=time.monotonic() - t0,
    )


def solve_feasibility(cp: model.CanonicalProblem, config: SolverConfig) -> Optional[Incumbent]:
    """First feasible assignment by seed order, or None."""
    circuit = build_circuit(cp)
    if circuit.trivially_infeasible is not None:
        return None
    t0 = time.monotonic()
    deadline = None if config.wall_time_total is None else t0 + config.wall_time_total
    budgets = _pass_budgets(config, config.total_max_steps)
    if not budgets:
        return None
    result = _run_pass(circuit, cp, config, config.seed, budgets, deadline, None)
    if result.solved_seed is None:
        return None
    x = result.outcome.assignment
    return _make_incumbent(cp, x, model.NO_BOUND, config.seed + result.solved_seed, result.outcome.steps, t0)


def solve_optimize(cp: model.CanonicalProblem, config: SolverConfig) -> SolveReport:
    """Feasibility sweep with a descending objective bound."""
    t0 = time.monotonic()
    deadline = None if config.wall_time_total is None else t0 + config.wall_time_total

    base_circuit = build_circuit(cp)
    if base_circuit.trivially_infeasible is not None:
        return SolveReport(None, (), TRIVIALLY_INFEASIBLE, BudgetUsed(0, time.monotonic() - t0))

    g = config.granularity if config.granularity is not None else default_granularity(cp)
    floor, _ = trivial_bounds(cp)
    has_objective = bool(cp.objective)

    history: list[Incumbent] = []
    passes: list[PassStats] = []
    total_steps = 0
    pass_index = 0
    bound = model.NO_BOUND
    v_warm: Optional[np.ndarray] = None
    circuit = base_circuit
    bounded_cp = cp  # the exact check must include the active bound row

    while True:
        if deadline is not None and time.monotonic() >= deadline:
            break
        steps_remaining = None if config.total_max_steps is None else config.total_max_steps - total_steps
        budgets = _pass_budgets(config, steps_remaining)
        if not budgets:
            break

        pass_deadline = deadline
        if deadline is not None and history:
            est = max(1, min(_SWEEP_ESTIMATE_CAP, math.ceil((history[-1].canonical_objective - floor) / g)))
            share = (deadline - time.monotonic()) / est
            pass_deadline = min(deadline, time.monotonic() + share)

        seed_base = config.seed + pass_index * config.restarts
        result = _run_pass(circuit, bounded_cp, config, seed_base, budgets, pass_deadline, v_warm)
        total_steps += result.steps
        passes.append(PassStats(bound, seed_base, result.seeds_run, result.solved_seed, result.steps))
        pass_index += 1

        if result.solved_seed is not None:
            x = result.outcome.assignment
            inc = _make_incumbent(
                cp, x, bound, seed_base + result.solved_seed, result.outcome.steps, t0
            )
            history.append(inc)
            if not has_objective:
                break
            bound = inc.canonical_objective - g
            if bound < floor:
                break
            bounded_cp = model.add_objective_bound(cp, bound)
            circuit = build_circuit(bounded_cp)
            if circuit.trivially_infeasible is not None:
                break
            v_warm = result.outcome.v_final if config.warm_start else None
        elif config.total_max_steps is None and config.wall_time_total is None:
            # No explicit budget to burn down: a fully failed pass is as
            # exhausted as this sweep can get.
            break

    verdict = OPTIMUM_NOT_PROVEN if history else INFEASIBLE_NOT_PROVEN
    best = history[-1] if history else None
    return SolveReport(
        best,
        tuple(history),
        verdict,
        BudgetUsed(total_steps, time.monotonic() - t0),
        tuple(passes),
    )
