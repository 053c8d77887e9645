"""
Choosing how a local level is obtained for a (n, alpha, side) query.

Under the auto policy a covering table wins, then an exact solve while n is
small enough, then the two-sided asymptotic formula for calibrated alphas.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional

from ell.solver import (
    ASYMPTOTIC_MIN_N,
    LocalLevelQuery,
    Policy,
    Side,
    asymptotic_constant,
    eta_asymptotic,
    solve_local_level,
)
from ell.tables import TableStore
from utils.config import EXACT_N_CAP, SOLVER_TOL, table_dir
from utils.errors import TableError, UnsupportedCombinationError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=8)
def _store_for(directory: Path) -> TableStore:
    return TableStore(directory)


def default_store() -> TableStore:
    """Store for the current table directory (ELLBAND_TABLE_DIR or the bundled one)."""
    return _store_for(table_dir())


@dataclass(frozen=True)
class ResolvedEta:
    eta: float
    path: str
    n: int
    alpha: float
    side: Side


def _asymptotic(query: LocalLevelQuery, c_alpha: Optional[float]) -> ResolvedEta:
    if query.side is not Side.TWO:
        raise UnsupportedCombinationError("the asymptotic approximation exists for two-sided bands only")
    eta = eta_asymptotic(query.n, query.alpha, c_alpha=c_alpha)
    return ResolvedEta(eta=eta, path="asymptotic", n=query.n, alpha=query.alpha, side=query.side)


def _asymptotic_available(query: LocalLevelQuery, c_alpha: Optional[float]) -> bool:
    if query.side is not Side.TWO or query.n < ASYMPTOTIC_MIN_N:
        return False
    if c_alpha is not None:
        return True
    try:
        asymptotic_constant(query.alpha)
    except UnsupportedCombinationError:
        return False
    return True


def resolve_eta(
    query: LocalLevelQuery,
    store: Optional[TableStore] = None,
    exact_n_cap: int = EXACT_N_CAP,
    tol: float = SOLVER_TOL,
    c_alpha: Optional[float] = None,
) -> ResolvedEta:
    """Local level for the query, with the path that produced it."""
    store = store if store is not None else default_store()

    def exact() -> ResolvedEta:
        eta = solve_local_level(query, tol=tol)
        return ResolvedEta(eta=eta, path="exact", n=query.n, alpha=query.alpha, side=query.side)

    if query.policy is Policy.EXACT:
        resolved = exact()
    elif query.policy is Policy.ASYMPTOTIC:
        resolved = _asymptotic(query, c_alpha)
    elif query.policy is Policy.TABLE:
        eta = store.lookup(query.side, query.alpha, query.n)
        if eta is None:
            raise TableError(
                f"no {query.side.value} table for alpha={query.alpha:g} covers n={query.n} in {store.directory}"
            )
        resolved = ResolvedEta(eta=eta, path="table", n=query.n, alpha=query.alpha, side=query.side)
    else:
        eta = store.lookup(query.side, query.alpha, query.n)
        if eta is not None:
            resolved = ResolvedEta(eta=eta, path="table", n=query.n, alpha=query.alpha, side=query.side)
        elif query.n <= exact_n_cap:
            resolved = exact()
        elif _asymptotic_available(query, c_alpha):
            resolved = _asymptotic(query, c_alpha)
        else:
            raise UnsupportedCombinationError(
                f"cannot obtain a {query.side.value} local level for alpha={query.alpha:g}, n={query.n}: "
                f"no table covers it, n exceeds the exact-solve cap of {exact_n_cap}, and no calibrated "
                f"asymptotic constant exists. Lower n, or build a table with the 'table' command."
            )

    logger.info(f"Resolved eta={resolved.eta:.6g} for n={query.n}, alpha={query.alpha:g} via {resolved.path}")
    return resolved
