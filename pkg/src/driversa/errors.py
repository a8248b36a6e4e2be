"""Exception types raised by the engine and its loaders."""


class EngineError(Exception):
    """Base class for all engine-specific errors."""


class InvalidLaneError(EngineError):
    """Lane id 0 (the road middle) or an otherwise unusable lane id."""


class UnsupportedSideError(EngineError):
    """Relative-lane query across the road middle (opposite driving sides)."""


class NumericError(EngineError):
    """Non-finite state or a singular matrix where one cannot occur."""


class DomainConflictError(EngineError):
    """Two simultaneous events assign contradictory values to one fluent."""

    def __init__(self, fluent, events):
        self.fluent = fluent
        self.events = tuple(events)
        names = ", ".join(str(e) for e in self.events)
        super().__init__(f"conflicting effects on fluent {fluent} from events: {names}")


class UnknownTaskError(EngineError):
    """curr_task holds a value the projection step does not know."""


class InvalidGazeError(EngineError):
    """Gaze direction is the zero vector."""


class ScenarioError(EngineError):
    """Scenario document violates the schema; message is path-qualified."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class TraceError(EngineError):
    """Trace file is unreadable or a record is corrupt."""
