"""Exception hierarchy shared across the package.

Two families matter to callers: InputError (bad files, bad configuration,
bad calibration data) and the runtime errors raised while a simulation is
running (WorkloadError for trace violations, SimulationError for model or
engine bugs).  The CLI maps InputError to exit code 2 and the runtime
family to exit code 1.
"""


class StoresimError(Exception):
    """Base class for all package errors."""


class InputError(StoresimError):
    """Malformed or inconsistent input: files, specs, flag values."""


class ConfigError(InputError):
    """Storage configuration violates an invariant (stripe width, hosts, ...)."""


class CalibrationError(InputError):
    """Measurement set cannot produce a physically meaningful profile."""


class WorkloadError(StoresimError):
    """Trace replay hit an invalid operation (unknown file, bad range, ...)."""


class SimulationError(StoresimError):
    """Fatal model or engine bug; the run is aborted."""


class ScheduleInPastError(SimulationError):
    """An event was scheduled before the current virtual time."""


class EventBudgetExceeded(SimulationError):
    """The run consumed more events than its configured budget."""


class ConservationError(SimulationError):
    """A request or frame was lost or double-processed (drain-time check)."""
