"""0-1 integer linear programming via emulated self-organizing algebraic circuits.

Pipeline: parse or generate an IlpProblem (ingest), canonicalize to binary
<=-form (model), compile one gate per row (circuit), integrate the coupled
voltage/memory dynamics until a rounded assignment checks exactly feasible
(dynamics), and sweep a descending objective bound to optimize (solver).
Exact reference solvers for desk-scale verification live in oracle.
"""

from .circuit import Soac, Soag, build_circuit, correction_currents, violation
from .dynamics import (
    Budget,
    DynParams,
    DynState,
    TrajectoryOutcome,
    detect_solution,
    init_state,
    integrate,
    rhs,
    round_voltages,
    step,
)
from .ingest import GenSpec, generate, parse_json, parse_mps, write_json
from .model import (
    CanonicalProblem,
    IlpProblem,
    Row,
    Variable,
    add_objective_bound,
    canonicalize,
    check_feasible,
    decode,
    evaluate_row,
    objective_value,
    validate,
)
from .oracle import OracleResult, branch_and_bound, enumerate_optimum
from .solver import Incumbent, SolveReport, SolverConfig, solve_feasibility, solve_optimize, trivial_bounds

__version__ = "0.1.0"
