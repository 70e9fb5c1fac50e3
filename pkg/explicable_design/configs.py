"""
Configuration variables
"""

from fractions import Fraction

# Objective defaults (weights, discount and horizon)
DEFAULT_ALPHA = Fraction(1)
DEFAULT_BETA = Fraction(1, 4)
DEFAULT_KAPPA = Fraction(1, 4)
DEFAULT_GAMMA = Fraction(9, 10)
DEFAULT_HORIZON = 1

# Time limits, design level and planner level
DEFAULT_TIME_LIMIT_SECS = 1800.0
DEFAULT_PLANNER_TIME_LIMIT_SECS = None

# Exhaustive plan enumeration stops with an error past this many nodes
ENUMERATION_NODE_CAP = 200000

# Scores with a larger exponent are compared on their logarithm only
SCORE_LOG_OVERFLOW = 700

# Suffixes of the two fluent copies in the compiled problem
ROBOT_TAG = '@r'
HUMAN_TAG = '@h'

PROBABILITY_TOLERANCE = 1e-9

modification_kinds = [
    'prune-human-action',
    'prune-both-action',
    'add-precondition-human',
    'add-precondition-both',
    'block-transition',
]

report_formats = ['csv', 'markdown']

report_columns = [
    'config',
    'design_size',
    'inexplicability',
    'plan_cost',
    'total_cost',
    'pct_diff_inexp',
    'pct_diff_cost',
    'pct_diff_total',
    'time_secs',
]

sweep_columns = ['fixture', 'alpha', 'beta', 'kappa', 'gamma', 'horizon', 'design_size', 'total_cost', 'status']

# Exit codes of the command line interface
EXIT_SUCCESS = 0
EXIT_INPUT_ERROR = 2
EXIT_TIMEOUT_WITH_INCUMBENT = 3
