"""
Library defaults and environment overrides.
"""
import os
from pathlib import Path

DEFAULT_ALPHA = 0.05
DEFAULT_METHOD = "ell"
DEFAULT_SIDE = "two-sided"
DEFAULT_FAMILY = "normal"
DEFAULT_ESTIMATION = "median-sn"

EXACT_N_CAP = 20_000
SOLVER_TOL = 1e-4
TABLE_TOL = 1e-6
MAX_BISECTIONS = 64

FIRST_CHECK = 50
CHECK_INTERVAL = 50
MAX_REL_ERR = 1e-4

# one-sided solves above this n use the drop-term recursion under policy auto
ONE_SIDED_APPROX_FROM = 1000

BUNDLED_TABLE_DIR = Path(__file__).resolve().parent.parent / "data" / "tables"


def table_dir() -> Path:
    """Directory holding eta tables; ELLBAND_TABLE_DIR wins over the bundled one."""
    override = os.environ.get("ELLBAND_TABLE_DIR")
    return Path(override) if override else BUNDLED_TABLE_DIR


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ELLBAND_WORKERS", "4")))
    except ValueError:
        return 4
