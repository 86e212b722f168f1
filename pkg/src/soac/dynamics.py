"""Equations of motion and integrator for the algebraic circuit.

State per trajectory: terminal voltages v in [-1, 1]^n plus two memories per
gate, a short-term xs in [0, 1] gating gradient-like correction against rail
attraction, and a long-term xl in [1, xl_max] accumulating constraint stress.

    dv_j  = sum over gates i containing j of
              xl_i * xs_i * I_ij  +  (1 + zeta * xl_i) * (1 - xs_i) * R_ij
    I_ij  = -(a_ij / L_i) * C_i(v)                (correction current)
    R_ij  = (|a_ij| / L_i) * (sigma_j - v_j) / 2  (attraction to the nearer rail)
    dxs_i = beta * (xs_i + epsilon) * (C_i - gamma)
    dxl_i = alpha * (C_i - delta)

Integration is clamped forward Euler: per-step voltage change is limited to
dv_max and all state is clipped back into bounds, so digital states with all
gates satisfied are exact fixed points.  Solution detection rounds voltages
and checks feasibility exactly, independent of integration error.

rhs() and step() here are the plain-numpy reference; integrate() drives the
compiled stepper in _kernel (bit-compatible by construction).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import model
from ._kernel import STATUS_SOLVED, run_steps
from .circuit import Soac

SOLVED = "solved"
BUDGET_EXHAUSTED = "budget-exhausted"
TRIVIALLY_INFEASIBLE = "trivially-infeasible"


@dataclass(frozen=True)
class DynParams:
    alpha: float = 5.0  # long-term memory rate
    beta: float = 20.0  # short-term memory rate
    gamma: float = 0.25  # short-term violation threshold
    delta: float = 0.05  # long-term violation threshold
    epsilon: float = 1e-3  # short-term floor
    zeta: float = 0.1  # rigidity boost from long-term memory
    xl_max: float = 1e4
    dt: float = 0.1
    dv_max: float = 0.5  # per-step voltage change clamp
    check_every: int = 1  # steps between digital checks

    def __post_init__(self):
        if min(self.alpha, self.beta) <= 0 or self.epsilon <= 0 or self.zeta <= 0:
            raise ValueError("rates must be positive")
        if not (0 <= self.delta < self.gamma < 1):
            raise ValueError("need 0 <= delta < gamma < 1")
        if self.dt <= 0 or not (0 < self.dv_max <= 2):
            raise ValueError("need dt > 0 and 0 < dv_max <= 2")
        if self.xl_max < 1:
            raise ValueError("need xl_max >= 1")
        if self.check_every < 1:
            raise ValueError("need check_every >= 1")

    def replace(self, **kw) -> "DynParams":
        d = self.__dict__ | kw
        return DynParams(**d)


PARAM_NAMES = tuple(DynParams.__dataclass_fields__)


@dataclass
class DynState:
    t: float
    v: np.ndarray  # voltages, length n
    xs: np.ndarray  # short-term memory, one per gate
    xl: np.ndarray  # long-term memory, one per gate
    rng: np.random.Generator
    seed: int


@dataclass(frozen=True)
class TraceStats:
    samples: int = 0
    peak_max_violation: float = 0.0
    final_max_violation: float = 0.0
    final_violated: int = 0


@dataclass(frozen=True)
class TrajectoryOutcome:
    status: str
    assignment: Optional[np.ndarray]
    steps: int
    t_final: float
    stats: TraceStats
    v_final: Optional[np.ndarray] = None


@dataclass(frozen=True)
class Budget:
    max_steps: int
    wall_time: Optional[float] = None  # seconds


def init_state(circuit: Soac, seed: int, params: DynParams) -> DynState:
    """Fresh state: v ~ U[-1,1]^n, xs = 0.5 (undecided), xl = 1 (no stress)."""
    rng = np.random.default_rng(seed)
    v = rng.uniform(-1.0, 1.0, circuit.n)
    m = len(circuit.gates)
    return DynState(0.0, v, np.full(m, 0.5), np.ones(m), rng, seed)


def _gate_of_term(circuit: Soac) -> np.ndarray:
    return np.repeat(np.arange(len(circuit.gates)), np.diff(circuit.gate_indptr))


def rhs(circuit: Soac, state: DynState, params: DynParams):
    """Reference derivatives (dv, dxs, dxl); mirrors the compiled stepper."""
    v, xs, xl = state.v, state.xs, state.xl
    m = len(circuit.gates)
    if m == 0:
        return np.zeros(circuit.n), np.zeros(0), np.zeros(0)
    xt = 0.5 * (v + 1.0)
    prod = circuit.term_coef * xt[circuit.term_var]
    # strictly sequential per-gate accumulation, bit-compatible with the
    # compiled stepper (reduceat would sum in SIMD blocks)
    indptr = circuit.gate_indptr
    sums = np.empty(m)
    for g in range(m):
        acc = 0.0
        for k in range(indptr[g], indptr[g + 1]):
            acc += prod[k]
        sums[g] = acc
    c_arr = np.clip((sums - circuit.gate_b) / circuit.gate_m, 0.0, 1.0)

    gm = xl * xs * c_arr
    rm = (1.0 + params.zeta * xl) * (1.0 - xs)
    sigma = np.where(v >= 0.0, 1.0, -1.0)
    rail = 0.5 * (sigma - v)
    tg = _gate_of_term(circuit)
    contrib = (-circuit.term_coef_over_l) * gm[tg] + circuit.term_abs_over_l * rm[tg] * rail[circuit.term_var]
    dv = np.bincount(circuit.term_var, weights=contrib, minlength=circuit.n)

    dxs = params.beta * (xs + params.epsilon) * (c_arr - params.gamma)
    dxl = params.alpha * (c_arr - params.delta)
    return dv, dxs, dxl


def step(circuit: Soac, state: DynState, params: DynParams) -> DynState:
    """One clamped forward-Euler step; returns a new state."""
    dv, dxs, dxl = rhs(circuit, state, params)
    dv_step = np.clip(params.dt * dv, -params.dv_max, params.dv_max)
    v = np.clip(state.v + dv_step, -1.0, 1.0)
    xs = np.clip(state.xs + params.dt * dxs, 0.0, 1.0)
    xl = np.clip(state.xl + params.dt * dxl, 1.0, params.xl_max)
    return DynState(state.t + params.dt, v, xs, xl, state.rng, state.seed)


def round_voltages(v: np.ndarray) -> np.ndarray:
    """Digital readout: x_j = 1 iff v_j >= 0 (ties round up)."""
    return (np.asarray(v) >= 0.0).astype(np.int64)


def detect_solution(circuit: Soac, cp: model.CanonicalProblem, state: DynState) -> Optional[np.ndarray]:
    """Round and check exactly against every canonical row."""
    x = round_voltages(state.v)
    report = model.check_feasible(cp, x)
    return x if report.feasible else None


def violation_stats(circuit: Soac, v: np.ndarray) -> tuple[float, int]:
    """(max C over gates, count of gates with C > 0) at voltages v."""
    from .circuit import all_violations

    c_arr = all_violations(circuit, v)
    if c_arr.size == 0:
        return 0.0, 0
    return float(c_arr.max()), int((c_arr > 0).sum())


class TraceWriter:
    """CSV sink: step,t,max_violation,violated_rows[,v0..vN-1]."""

    def __init__(self, fh, n: int, full: bool = False):
        self.fh = fh
        self.full = full
        header = "step,t,max_violation,violated_rows"
        if full:
            header += "," + ",".join(f"v{j}" for j in range(n))
        fh.write(header + "\n")

    def write(self, step_no: int, t: float, maxc: float, violated: int, v: Optional[np.ndarray]):
        row = f"{step_no},{t:.6g},{maxc:.6g},{violated}"
        if self.full and v is not None:
            row += "," + ",".join(f"{x:.6g}" for x in v)
        self.fh.write(row + "\n")


def integrate(
    circuit: Soac,
    cp: model.CanonicalProblem,
    params: DynParams,
    seed: int,
    budget: Budget,
    trace: Optional[TraceWriter] = None,
    v0: Optional[np.ndarray] = None,
) -> TrajectoryOutcome:
    """Run one trajectory until a rounded assignment checks feasible or the
    budget runs out.  Deterministic in (circuit, params, seed, max_steps)."""
    if circuit.trivially_infeasible is not None:
        return TrajectoryOutcome(TRIVIALLY_INFEASIBLE, None, 0, 0.0, TraceStats())

    state = init_state(circuit, seed, params)
    if v0 is not None:
        state.v[:] = v0
    prev_bits = np.full(circuit.n, -1, dtype=np.int64)

    deadline = None if budget.wall_time is None else time.monotonic() + budget.wall_time
    if trace is not None and trace.full:
        chunk = params.check_every
    elif trace is not None:
        chunk = max(params.check_every, 65536)  # keeps the sample buffer bounded
    elif deadline is not None:
        chunk = max(params.check_every, 8192)
    else:
        chunk = budget.max_steps

    max_trace_rows = 0
    if trace is not None:
        max_trace_rows = min(chunk, budget.max_steps) // params.check_every + 2
    trace_step = np.zeros(max_trace_rows, dtype=np.int64)
    trace_t = np.zeros(max_trace_rows)
    trace_maxc = np.zeros(max_trace_rows)
    trace_violated = np.zeros(max_trace_rows, dtype=np.int64)

    step_now = 0
    first_call = True
    stats = TraceStats()
    while True:
        step_end = min(step_now + chunk, budget.max_steps)
        status, step_now, t_now, peak, maxc, violated, n_samples = run_steps(
            circuit.gate_indptr,
            circuit.term_var,
            circuit.term_coef,
            circuit.term_coef_over_l,
            circuit.term_abs_over_l,
            circuit.gate_b,
            circuit.gate_m,
            circuit.check_indptr,
            circuit.check_var,
            circuit.check_coef,
            circuit.check_rhs,
            state.v,
            state.xs,
            state.xl,
            prev_bits,
            state.t,
            step_now,
            step_end,
            params.check_every,
            params.alpha,
            params.beta,
            params.gamma,
            params.delta,
            params.epsilon,
            params.zeta,
            params.xl_max,
            params.dt,
            params.dv_max,
            first_call,
            trace is not None,
            trace_step,
            trace_t,
            trace_maxc,
            trace_violated,
        )
        first_call = False
        state.t = t_now
        stats = TraceStats(
            samples=stats.samples + int(n_samples),
            peak_max_violation=max(stats.peak_max_violation, float(peak)),
            final_max_violation=float(maxc),
            final_violated=int(violated),
        )
        if trace is not None:
            for i in range(int(n_samples)):
                trace.write(
                    int(trace_step[i]),
                    float(trace_t[i]),
                    float(trace_maxc[i]),
                    int(trace_violated[i]),
                    state.v if trace.full else None,
                )

        if status == STATUS_SOLVED:
            assignment = detect_solution(circuit, cp, state)
            if assignment is not None:
                return TrajectoryOutcome(SOLVED, assignment, int(step_now), state.t, stats, state.v.copy())
            # Float screen passed but the exact check did not; keep stepping.
        if step_now >= budget.max_steps:
            return TrajectoryOutcome(BUDGET_EXHAUSTED, None, int(step_now), state.t, stats, state.v.copy())
        if deadline is not None and time.monotonic() >= deadline:
            return TrajectoryOutcome(BUDGET_EXHAUSTED, None, int(step_now), state.t, stats, state.v.copy())
