"""heartcast: forecast the odds of meeting a match and value your romantic options."""

from .errors import HeartcastError, IngestionError, InsufficientDataError, ValidationError
from .forecast import (
    OptionForecast,
    Recommendation,
    Report,
    Scenario,
    recommend,
    run_forecast,
)
from .matching import (
    CompatibilityWindow,
    EncounterProbabilityCurve,
    QualityBand,
    derive_windows,
    encounter_probabilities,
    quality_score,
)
from .population import (
    GroupModel,
    Person,
    SampleSet,
    SubgroupSelection,
    ensure_significance,
    intersect_subgroups,
    load_population,
)
from .scenario import parse_scenario
from .sociology import (
    CumulativeForecast,
    EncounterSchedule,
    cumulative_forecast,
    encounter_schedule,
)
from .utility import (
    RelationshipParams,
    SingleLifeParams,
    SuitorSample,
    UtilityCurve,
    open_option_utility,
    penalty_profile,
    relationship_utility,
    sample_suitors,
    single_utility,
)

__version__ = "0.1.0"

__all__ = [
    "CompatibilityWindow",
    "CumulativeForecast",
    "EncounterProbabilityCurve",
    "EncounterSchedule",
    "GroupModel",
    "HeartcastError",
    "IngestionError",
    "InsufficientDataError",
    "OptionForecast",
    "Person",
    "QualityBand",
    "Recommendation",
    "RelationshipParams",
    "Report",
    "SampleSet",
    "Scenario",
    "SingleLifeParams",
    "SubgroupSelection",
    "SuitorSample",
    "UtilityCurve",
    "ValidationError",
    "cumulative_forecast",
    "derive_windows",
    "encounter_probabilities",
    "encounter_schedule",
    "ensure_significance",
    "intersect_subgroups",
    "load_population",
    "open_option_utility",
    "parse_scenario",
    "penalty_profile",
    "quality_score",
    "recommend",
    "relationship_utility",
    "run_forecast",
    "sample_suitors",
    "single_utility",
]
