"""Vitali-Hardy-Krause total variation of metric-semigroup-valued grid
functions, with Helly-type selection extraction."""

__version__ = "0.1.0"

from .errors import (
    BoundednessError,
    CertificationError,
    CompactnessError,
    ConvergenceError,
    DegenerateDualsError,
    DegenerateRectangleError,
    DimensionCapError,
    DocumentError,
    EmptySumError,
    EnumerationCapError,
    ExpressionError,
    GridMismatchError,
    SpaceMismatchError,
    VhkError,
)
from .grid import (
    Grid,
    GridFunction,
    NetPartition,
    SubRectangle,
    TruncatedMap,
    cells,
    finest_partition,
    full_rectangle,
    grid_function_document,
    load_grid_function,
    refine,
    save_grid_function,
)
from .semigroup import (
    BoxSpace,
    MultisetSpace,
    RealSpace,
    ValueSpace,
    VectorSpace,
    bw_extract,
    parse_space,
)
from .selection import (
    FunctionSequence,
    LowerSemicontinuityReport,
    SelectionResult,
    compile_expression,
    helly_select,
    lower_semicontinuity_check,
    sequence_from_document,
    weak_helly_select,
)
from .variation import (
    DEFAULT_TOLERANCE,
    MonotonicityVerdict,
    VariationReport,
    is_totally_monotone,
    jordan_decomposition,
    mixed_difference,
    nonzero_alphas,
    pointwise_bound,
    prevariation,
    signed_mixed_increment,
    total_variation,
    total_variation_function,
    tv_subrectangle,
    vitali_variation,
)
