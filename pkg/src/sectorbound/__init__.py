"""Certified l2-gain analysis for discrete-time Lur'e systems.

Computes solver-verified upper bounds on the induced l2 gain (and sector
stability margins) of a discrete-time LTI system in feedback with
non-repeated sector-bounded nonlinearities, using three quadratic-constraint
multiplier classes of increasing tightness: diagonal weights, the vertex
convex relaxation, and the complete class characterized by finitely many
matrix copositivity conditions.
"""

from . import lmi, multipliers, oracle, sdp, system, verification
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    FixedPointDivergence,
    InfeasibleProblem,
    NegativeLambda,
    NonFiniteEntry,
    OutOfSector,
    ParseError,
    SectorViolation,
    SectorboundError,
    SolverFailure,
    UnstableNominal,
    WitnessNotStrict,
)
from .lmi import (
    AnalysisProblem,
    AnalysisResult,
    AnalysisStatus,
    analyze,
    analyze_class,
    assemble_L,
    build_program,
    margin_search,
)
from .multipliers import (
    MincMode,
    MultiplierClass,
    MultiplierKind,
    SignPattern,
    g_m,
    gm_transform,
    h_m,
    md_matrix,
    membership_mc,
    membership_md,
    membership_mfb_sampled,
    membership_minc,
    sign_pairs,
    vertex_gammas,
)
from .symmetric import SymMatrix, smat, svec
from .system import (
    Sector,
    StateSpace,
    Trajectory,
    empirical_gain_lb,
    new_statespace,
    nominal_hinf_norm,
    simulate,
)

__version__ = "0.1.0"
