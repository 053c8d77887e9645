"""
Logging configuration utilities.
"""
import logging
from rich.console import Console
from rich.logging import RichHandler


def setup_logging(level: str = "INFO"):
    """Setup rich logging configuration on standard error."""
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True)],
        force=True,
    )
    # numba's compiler chatter drowns out DEBUG output otherwise
    logging.getLogger("numba").setLevel(logging.WARNING)
