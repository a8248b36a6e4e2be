"""Real-time driver situation-awareness engine.

Tracks what a driver of a conditionally automated vehicle plausibly knows:
a fixation-gated belief state over the surrounding traffic, an event-based
interpretation of the situation, a projection of possible next maneuvers,
and the divergences between belief and actual scene, ranked by what to cue
first. Runs scripted scenarios deterministically at 30 Hz and serves live
sessions over a websocket.
"""

__version__ = "0.1.0"

from .belief import (
    BeliefObject,
    MentalBeliefState,
    TrackerParams,
    belief_tick,
    kalman_predict,
    kalman_update,
)
from .divergence import (
    ComparisonParams,
    Divergence,
    DivergenceReport,
    build_divergence_report,
    compute_divergences,
    prioritize,
)
from .domain import (
    DomainDefinition,
    EventOccurrence,
    FluentStore,
    SensedState,
    Term,
    builtin_domain,
    describe_domain,
    term,
)
from .errors import (
    DomainConflictError,
    EngineError,
    InvalidGazeError,
    InvalidLaneError,
    NumericError,
    ScenarioError,
    TraceError,
    UnknownTaskError,
    UnsupportedSideError,
)
from .interpretation import (
    InterpretationModel,
    ProjectionModel,
    ReasoningParams,
    build_interpretation_model,
    ec_step,
    project,
)
from .relations import (
    FreeLocation,
    GapArtifact,
    detect_gaps,
    free_locations,
    rel_lane,
    rel_long,
    rel_order,
)
from .scene import (
    AutomationState,
    EgoVehicle,
    RoadFrame,
    SceneFrame,
    Timepoint,
    TrafficVehicle,
    lane_adjacent,
)
from .session import SessionConfig, SessionEngine, TickRecord, run_session
from .simulator import (
    GazeFixationModel,
    GazeModelParams,
    Scenario,
    bundled_scenario_path,
    fixation_probability,
    load_scenario,
    make_benchmark_scenario,
    step_scenario,
)

__all__ = [
    "__version__",
    "AutomationState",
    "BeliefObject",
    "ComparisonParams",
    "Divergence",
    "DivergenceReport",
    "DomainConflictError",
    "DomainDefinition",
    "EgoVehicle",
    "EngineError",
    "EventOccurrence",
    "FluentStore",
    "FreeLocation",
    "GapArtifact",
    "GazeFixationModel",
    "GazeModelParams",
    "InterpretationModel",
    "InvalidGazeError",
    "InvalidLaneError",
    "MentalBeliefState",
    "NumericError",
    "ProjectionModel",
    "ReasoningParams",
    "RoadFrame",
    "Scenario",
    "ScenarioError",
    "SceneFrame",
    "SensedState",
    "SessionConfig",
    "SessionEngine",
    "Term",
    "TickRecord",
    "Timepoint",
    "TraceError",
    "TrackerParams",
    "TrafficVehicle",
    "UnknownTaskError",
    "UnsupportedSideError",
    "belief_tick",
    "build_divergence_report",
    "build_interpretation_model",
    "builtin_domain",
    "bundled_scenario_path",
    "compute_divergences",
    "describe_domain",
    "detect_gaps",
    "ec_step",
    "fixation_probability",
    "free_locations",
    "kalman_predict",
    "kalman_update",
    "lane_adjacent",
    "load_scenario",
    "make_benchmark_scenario",
    "prioritize",
    "project",
    "rel_lane",
    "rel_long",
    "rel_order",
    "run_session",
    "step_scenario",
    "term",
]
