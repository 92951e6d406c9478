"""Exact three-gap structure and quasi-uniformity metrics for 1-D
low-discrepancy sequences (Kronecker, van der Corput, greedy packing).

All arithmetic is exact or certified-interval; no floats enter any
computation that feeds a verdict.
"""
from .contfrac import (
    CFExpansion,
    Classification,
    DEFAULT_CONTEXT,
    ExplicitCF,
    PrecisionContext,
    QuadraticSurd,
    Rational,
    alpha_tail,
    alpha_tail_best,
    alpha_to_string,
    digit_supremum,
    expand,
    is_badly_approximable,
    parse_alpha,
    s_and_n,
)
from .errors import (
    AlphaSpecError,
    KronmeshError,
    OutOfRangeError,
    PrecisionUnresolvedError,
    UnsupportedAlphaError,
)
from .intervals import Interval, fraction_to_decimal, interval_to_decimal
from .metrics import (
    BoundReport,
    QUMetrics,
    SweepRow,
    bound_report_to_json,
    fill_distance,
    kronecker_bounds,
    mesh_ratio,
    mesh_ratio_structural,
    metrics_to_json,
    separation_radius,
    sorted_gaps,
    sweep,
    sweep_to_csv,
)
from .sequences import (
    GreedyGen,
    KroneckerGen,
    PointSet,
    VdcGen,
    generate,
    greedy_packing,
    kronecker,
    points_to_csv,
    points_to_json,
    van_der_corput,
)
from .threegap import (
    Decomposition,
    GapStructure,
    LinearForm,
    decompose,
    eta,
    eta_interval,
    gap_structure,
    gap_structure_json,
    lengths_check,
)

__version__ = "0.1.0"
