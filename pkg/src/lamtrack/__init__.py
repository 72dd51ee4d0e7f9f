"""Exact train-track laboratory for a family of curves on the
five-punctured sphere: intersection numbers, limit measures, a modeled
geodesic timeline, and boundary limit-set probes."""

from .curves import (
    CurveIndex,
    GrowthVerdict,
    RSequence,
    SequenceValidationError,
    comparability_report,
    curve_weights,
    geometric_sequence,
    growth_check,
    intersection,
    marking_intersection,
    validate_sequence,
)
from .lengthmodel import (
    LengthReport,
    ProbeTrace,
    ShortCurveState,
    contribution,
    handoff_time,
    length_report,
    limit_set_probe,
    short_curve_state,
)
from .measures import (
    MeasureVector,
    NormalizedProduct,
    blend,
    check_envelope_bounds,
    envelope_start,
    limit_measure,
    measure_intersection,
    normalized_product,
)
from .numerics import BigInt, BigRational, LogReal, big_rational_cmp, log_sum
from .timeline import (
    FlatLengthModel,
    OrderingVerdict,
    TimelineLayout,
    balance_time,
    layout,
    little_o_diagnostics,
    ordering_verdict,
)
from .traintrack import (
    EfficientCurve,
    NormalizedMatrix,
    TwistMatrix,
    WeightVector,
    apply,
    normalized_matrix,
    pair,
    twist_matrix,
)

__version__ = "0.1.0"
