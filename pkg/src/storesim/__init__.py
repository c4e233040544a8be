"""storesim: discrete-event prediction of workflow I/O turnaround on
configurable object-based storage (chunking, striping, replication,
placement), plus config-sweep ranking for autotuning."""

from .calibrate import (
    CiResult,
    MeasurementSet,
    ci_check,
    derive_profile,
    format_measurements,
    net_mu_from_throughput,
    parse_measurements,
    t_cdf,
    t_quantile,
)
from .cluster import Cluster, FileMeta, ManagerState, OpCtx, Policy, RunStats
from .engine import DEFAULT_EVENT_BUDGET, Service, SimEvent, Simulator
from .errors import (
    CalibrationError,
    ConfigError,
    ConservationError,
    EventBudgetExceeded,
    InputError,
    ScheduleInPastError,
    SimulationError,
    StoresimError,
    WorkloadError,
)
from .network import CHUNK_DATA, CONTROL, Frame, HostNet, NetRequest, NetStats, decompose
from .profiles import (
    PlatformProfile,
    StorageConfig,
    format_config,
    format_profile,
    parse_config,
    parse_profile,
)
from .report import (
    OpRecord,
    RankRow,
    RunReport,
    StageAgg,
    aggregate,
    compare,
    format_ops_csv,
    format_ranking,
    format_report,
    parse_report,
)
from .run import simulate, sweep
from .synth import (
    PatternSpec,
    blast_op_count,
    gen_blast,
    gen_broadcast,
    gen_micro,
    gen_pipeline,
    gen_reduce,
    generate,
    sweep_configs,
)
from .workload import Driver, Task, TraceOp, Workload, assign_task_node, parse_workload, serialize_workload

__version__ = "0.1.0"

__all__ = [
    "CHUNK_DATA",
    "CONTROL",
    "CalibrationError",
    "CiResult",
    "Cluster",
    "ConfigError",
    "ConservationError",
    "DEFAULT_EVENT_BUDGET",
    "Driver",
    "EventBudgetExceeded",
    "FileMeta",
    "Frame",
    "HostNet",
    "InputError",
    "ManagerState",
    "MeasurementSet",
    "NetRequest",
    "NetStats",
    "OpCtx",
    "OpRecord",
    "PatternSpec",
    "PlatformProfile",
    "Policy",
    "RankRow",
    "RunReport",
    "RunStats",
    "ScheduleInPastError",
    "Service",
    "SimEvent",
    "SimulationError",
    "Simulator",
    "StageAgg",
    "StorageConfig",
    "StoresimError",
    "Task",
    "TraceOp",
    "Workload",
    "WorkloadError",
    "aggregate",
    "assign_task_node",
    "blast_op_count",
    "ci_check",
    "compare",
    "decompose",
    "derive_profile",
    "format_config",
    "format_measurements",
    "format_ops_csv",
    "format_profile",
    "format_ranking",
    "format_report",
    "gen_blast",
    "gen_broadcast",
    "gen_micro",
    "gen_pipeline",
    "gen_reduce",
    "generate",
    "net_mu_from_throughput",
    "parse_config",
    "parse_measurements",
    "parse_profile",
    "parse_report",
    "parse_workload",
    "serialize_workload",
    "simulate",
    "sweep",
    "sweep_configs",
    "t_cdf",
    "t_quantile",
]
