"""Near-MSR Reed-Solomon repair laboratory.

Construction of RS codes over prime-degree extension towers, trace-based
single-node repair with exact sub-symbol metering against the cut-set
bound, an independent dual-family verifier, and a deterministic cluster
simulator with CSV/JSON/figure reports.
"""

from .construction import (
    DEFAULT_BUILD_CAP,
    ConstructionPlan,
    FeasibilityEntry,
    build_code,
    plan_constant_overhead,
    plan_epsilon_msr,
    plan_manual,
    primes_in_range,
)
from .errors import (
    AlreadyFailed,
    ArityError,
    BuildCapExceeded,
    DuplicatePrimes,
    InconsistentSymbols,
    InfeasibilityError,
    InfeasiblePlan,
    InsufficientData,
    InsufficientPrimes,
    InvalidSubset,
    NotDualCodeword,
    NotRepairable,
    RepairSimError,
    SingularBasis,
    SingularEvaluationSet,
    TooManyFailures,
)
from .field_tower import (
    FieldElement,
    FrobeniusPowerMap,
    SubfieldBasis,
    TowerField,
    find_irreducible,
    tower_new,
    trace_dual_basis,
)
from .grs import GrsCode, lagrange_interpolate, poly_eval, poly_from_roots
from .repair import (
    DualFamily,
    HelperResponse,
    RepairScheme,
    RepairSet,
    RepairTranscript,
    build_dual_family,
    cutset_bound,
    gw_verify,
    helper_respond,
    measure,
    reconstruct,
    repair_polynomial,
    run_trace_repair,
    select_repair_set,
)
from .simharness import (
    Cluster,
    RepairReport,
    ReportRow,
    Scenario,
    extract,
    ingest,
    run_scenario,
)

__version__ = "0.1.0"
