"""Constants for cosmoent."""

from enum import Enum, IntEnum

__version__ = "0.1.0"

# Asymptotic flatness: tanh(20) differs from 1 by ~4e-18, so plane waves are exact at the
# ends of a window of half-width 20/sigma.
DEFAULT_TAU_SPAN_FACTOR = 20.0
DEFAULT_REL_TOL = 1e-10
DEFAULT_MAX_STEPS = 5_000_000
DEFAULT_MAX_REL_ERR = 1e-6
DEFAULT_TAIL_TOL = 1e-12
TAIL_TOL_MIN = 1e-14
TAIL_TOL_MAX = 1e-6

# The oracle integrates plain oscillations; below this rapidity the window holds too many.
ORACLE_MIN_SIGMA = 0.05
ORACLE_MAX_OSCILLATION_SCALE = 1e6
MATCHING_MAX_CONDITION = 1e8
# Wronskian drift and |alpha|^2 - |beta|^2 - 1 budget at the default tolerance.
NORMALIZATION_TOLERANCE = 1e-8
# Below this absolute gamma error the oracle is at its double-precision resolution: a mode
# with gamma ~ 1e-20 is carried by an O(1) amplitude whose rounding alone exceeds it.
GAMMA_ABS_FLOOR = 1e-14
GAMMA_REL_FLOOR = 1e-30

# Above this, sinh(x) is replaced by its logarithm; below the small bound, by its Taylor series.
LOGSINH_THRESHOLD = 20.0
SINH_TAYLOR_THRESHOLD = 1e-4

# The entropy at gamma = 1 - 1e-12 is ~41.3 bits; beyond it precision is gone.
GAMMA_MAX = 1.0 - 1e-12
ENTROPY_MAX_BITS = 41.0
MAX_SERIES_TERMS = 10_000_000

BISECT_MAX_ITER = 200
BISECT_XTOL = 1e-300

DEFAULT_SIGMA_STEP = 1e-3
SIGMA_STEP_MIN = 1e-4
SIGMA_STEP_MAX = 1e-2
REGIME_RATIO_MAX = 0.5
REGIME_RATIO_WARN = 0.1

FIT_MAX_ITER = 200
FIT_GRADIENT_TOL = 1e-12
FIT_STEP_TOL = 1e-14
FIT_INITIAL_DAMPING = 1e-3
FIT_MAX_DAMPING = 1e16
# Largest change of a log-parameter per iteration (a factor e^2 in the parameter).
FIT_MAX_LOG_STEP = 2.0
FIT_MIN_SAMPLES = 3
# Multi-start lattice: epsilon in decades, sigma in decades of sigma / m.
FIT_LATTICE_EPSILON_DECADES = (-3, 3)
FIT_LATTICE_SIGMA_DECADES = (-2, 2)
FIT_LATTICE_PER_DECADE = 8
FIT_LATTICE_STARTS = 4
# exp() of a larger log-parameter overflows
FIT_MAX_ABS_LOG = 600.0

# repr-exact for IEEE doubles
NUMBER_FORMAT = ".16e"
CSV_COMMENT_PREFIX = "#"


class CLILogLevel(Enum):
    """Define verbosity levels for cli output.

    Use these levels to control the amount of information displayed to users. Higher levels include all information from lower levels plus additional details.
    """

    INFO = 0
    DEBUG = 1
    TRACE = 2


class LogLevel(Enum):
    """Log level."""

    TRACE = "TRACE"
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class OutputFormat(Enum):
    """Table output format."""

    CSV = "csv"
    JSON = "json"
    TABLE = "table"


class KScale(Enum):
    """Spacing of a momentum grid."""

    LINEAR = "linear"
    LOG = "log"


class ModeStatus(Enum):
    """Per-row status of a spectrum or oracle table."""

    OK = "ok"
    DEGENERATE = "degenerate"
    SATURATED = "saturated"
    FAILED = "failed"


class ExitCode(IntEnum):
    """Process exit codes shared by every command."""

    OK = 0
    USAGE = 2
    ORACLE_THRESHOLD = 3
    REGIME_VIOLATION = 4
    UNIDENTIFIABLE = 5
    NOT_CONVERGED = 6
