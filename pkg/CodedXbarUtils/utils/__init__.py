import logging

_log = logging.getLogger(__name__)

# Define constants
RUNHISTORY_FILENAME = 'codedxbar_runhistory.txt'
SWEEP_FILENAME = 'codedxbar_sweep.csv'
METRICS_FILENAME = 'codedxbar_metrics.json'

SEED_ENV_VARIABLE = 'CODEDXBAR_SEED'

CSV_HEADER = ['alpha', 'policy', 'seed', 'slots', 'mean_delay', 'p95_delay', 'mean_backlog', 'backlog_slope',
              'stable', 'decode_failures', 'throughput_per_flow']

# Size caps for the exponential parts.
MAX_ENUMERATION_VERTICES = 40
MAX_PERFECTION_VERTICES = 30
MAX_MWSS_VERTICES = 40
# Up to this size MWSS scans the cached maximal stable sets instead of searching.
MAX_MWSS_TABLE_VERTICES = 20
MAX_POLYTOPE_DIMENSION = 20
MAX_POLYTOPE_VERTICES = 200000
EXHAUSTIVE_SEARCH_LIMIT = 2 ** 16

DEFAULT_SLOPE_THRESHOLD = 1e-3
DEFAULT_PAYLOAD_LENGTH = 64
DEFAULT_FIELD_ORDER = 256
DEFAULT_CANDIDATES = 10
DEFAULT_INNOVATION_ATTEMPTS = 64

# Exit codes of the command line interface
EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SIZE_CAP = 3
EXIT_OUT_OF_REGION = 4
EXIT_DECODE_FAILURE = 5
