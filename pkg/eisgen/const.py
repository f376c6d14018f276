"""Constants for eisgen."""

from fractions import Fraction

DOMAIN = "eisgen"

ENV_BUDGET = "EISGEN_BUDGET"
DEFAULT_BUDGET = 10**8

MAX_FIELD_SIZE = 2**16
FERMAT_CHECK_LIMIT = 256

# Radius exponents for contours just outside / inside |a| = 1.
EPSILON_OUTER = Fraction(1, 4)
EPSILON_INNER = Fraction(-1, 4)
UNIT_CIRCLE = Fraction(0)

WEIL_TOLERANCE = 1e-6
NUMERIC_TOLERANCE = 1e-9

TREE_PRECISION_SLACK = 2
TREE_PRECISION_CAP = 64

VARIABLES = ("a", "t", "z")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2

CONF_BUDGET = "budget"
CONF_JOBS = "jobs"
CONF_Q = "q"
CONF_K = "k"
CONF_GENUS = "genus"
CONF_M = "m"
CONF_DEPTH = "depth"
CONF_EXPAND = "expand"
CONF_FORMAT = "format"
CONF_CURVE = "curve"
CONF_REP = "rep"
CONF_EXPR = "expr"
CONF_EXPR2 = "expr2"
CONF_DEGREE = "degree"
CONF_N = "n"
CONF_CHI = "chi"
CONF_D_MAX = "d_max"
CONF_PROFILE = "profile"

FORMAT_JSON = "json"
FORMAT_CSV = "csv"
