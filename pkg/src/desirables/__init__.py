"""Exact-arithmetic models of uncertainty on finite possibility spaces:
coherent cones of desirable gambles, Williams-coherent conditional lower
previsions, and the independent natural extension of two marginal models,
all decided by rational linear programming."""

from .cones import DesirableCone, PmfWitness
from .independence import (
    EventFamily,
    IncoherentMarginalError,
    IndependentNaturalExtension,
    IndependentProductCone,
    JointModel,
    MarginalConeView,
    check_epistemic_independence,
    conditional_view,
    factorisation_closed_form,
    factored_sum,
    independent_lower_prevision,
    independent_product_cone,
    marginal_view,
    nested_evaluation,
    nested_sandwich,
)
from .measurability import (
    LevelApproximation,
    MeasurabilityError,
    SimpleGambleCone,
    is_measurable,
    level_set_approximation,
    non_measurability_witness,
)
from .prevision import (
    Assessment,
    AssessmentEntry,
    BeyondSupportError,
    CoherenceVerdict,
    CoherenceViolation,
    ConditionalLowerPrevision,
    LinearPrevision,
    SureLossError,
    check_axioms,
    envelope_assessment,
    lower_prevision,
    upper_prevision,
)
from .simplex import LinearProgram, LPResult, LPStatus, solve_lp
from .spaces import (
    EmptyEventError,
    Event,
    Gamble,
    ProductSpace,
    Space,
    SpaceMismatchError,
    cylinder_event,
    cylindrical_extension,
    indicator,
    product_space,
    rectangle_event,
)

__all__ = [
    "Assessment",
    "AssessmentEntry",
    "BeyondSupportError",
    "CoherenceVerdict",
    "CoherenceViolation",
    "ConditionalLowerPrevision",
    "DesirableCone",
    "EmptyEventError",
    "Event",
    "EventFamily",
    "Gamble",
    "IncoherentMarginalError",
    "IndependentNaturalExtension",
    "IndependentProductCone",
    "JointModel",
    "LevelApproximation",
    "LinearPrevision",
    "LinearProgram",
    "LPResult",
    "LPStatus",
    "MarginalConeView",
    "MeasurabilityError",
    "PmfWitness",
    "ProductSpace",
    "SimpleGambleCone",
    "Space",
    "SpaceMismatchError",
    "SureLossError",
    "check_axioms",
    "check_epistemic_independence",
    "conditional_view",
    "cylinder_event",
    "cylindrical_extension",
    "envelope_assessment",
    "factorisation_closed_form",
    "factored_sum",
    "independent_lower_prevision",
    "independent_product_cone",
    "indicator",
    "is_measurable",
    "level_set_approximation",
    "lower_prevision",
    "marginal_view",
    "nested_evaluation",
    "nested_sandwich",
    "non_measurability_witness",
    "product_space",
    "rectangle_event",
    "solve_lp",
    "upper_prevision",
]
