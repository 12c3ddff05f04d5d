"""badapprox: generalized Cantor constructions of badly approximable points
on planar curves, with exhaustive Diophantine certification oracles."""

from .cantor import (
    CantorRecipe,
    ConstructionTrace,
    RemovalSchedule,
    build,
    check_condition,
    constant_schedule,
    dimension_lower_bound,
    intersect_schedules,
    standard_schedule,
    zero_schedule,
)
from .errors import (
    BadApproxError,
    BudgetExceeded,
    ClassificationFailure,
    ConditionViolated,
    ConstraintViolation,
    Degenerate,
    DiophantineConditionSuspect,
    DomainError,
    EmptyLevel,
    InvariantViolation,
)
from .lines import (
    Arc,
    ClassLabel,
    CoefficientBox,
    Line,
    StarInterval,
    arcs,
    classify,
    coefficient_box,
    enumerate_class,
    eval_F,
    is_exceptional,
    label_consistent,
    star_interval,
)
from .params import (
    ConstructionParams,
    CurveSpec,
    ExponentPair,
    LineModeParams,
    RationalCaseParams,
    c_upper_bound,
    compute_n0,
    derive_line_params,
    derive_params,
    derive_rational_params,
    line_construction_params,
)
from .survivors import (
    RemovalLedgerEntry,
    SurvivorTree,
    VerifyResult,
    build_rational_case,
    build_survivors,
    ledger_report,
    verify_no_low_height,
)
from .verify import (
    BadnessReport,
    ConvergentList,
    convergents,
    dual_badness,
    exponent_check,
    quadratic_badness,
    sim_badness,
)

__version__ = "0.1.0"
