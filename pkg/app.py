# app.py  (FastAPI entrypoint)
from datetime import datetime
from typing import Dict, List, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from bands.builder import band_check, get_qq_band
from distributions.reference import Estimation, EstimationMethod, ReferenceDistribution
from ell.dispatch import resolve_eta
from ell.solver import LocalLevelQuery
from plotting.tables import band_document
from utils.config import DEFAULT_ALPHA, DEFAULT_ESTIMATION, DEFAULT_FAMILY, DEFAULT_METHOD, SOLVER_TOL
from utils.errors import EllbandError, UnsupportedCombinationError

app = FastAPI(title="ELL Testing Band API")


class BandRequest(BaseModel):
    n: Optional[int] = Field(None, ge=1, description="Number of points when no observations are sent")
    observations: Optional[List[float]] = None
    alpha: float = Field(DEFAULT_ALPHA, gt=0.0, lt=1.0)
    method: str = DEFAULT_METHOD
    side: str = "two"
    family: str = DEFAULT_FAMILY
    params: Optional[Dict[str, float]] = Field(None, description="Known parameters; skips estimation")
    estimation: str = DEFAULT_ESTIMATION
    expected: str = "median"
    policy: str = "auto"


class LocalLevelRequest(BaseModel):
    n: int = Field(..., ge=1)
    alpha: float = Field(DEFAULT_ALPHA, gt=0.0, lt=1.0)
    side: str = "two"
    policy: str = "auto"
    tol: float = Field(SOLVER_TOL, gt=0.0)
    c_alpha: Optional[float] = None


class CheckRequest(BandRequest):
    observations: List[float]


def _band(req: BandRequest):
    if req.params is not None:
        distribution = ReferenceDistribution(req.family, req.params)
        estimation = None
    else:
        distribution = req.family
        estimation = EstimationMethod(Estimation(req.estimation))
    return get_qq_band(
        n=None if req.observations is not None else req.n,
        observations=req.observations,
        distribution=distribution,
        alpha=req.alpha,
        method=req.method,
        side=req.side,
        estimation=estimation,
        expected_mode=req.expected,
        policy=req.policy,
    )


def _http_error(e: Exception) -> HTTPException:
    if isinstance(e, UnsupportedCombinationError):
        return HTTPException(status_code=409, detail=str(e))
    return HTTPException(status_code=422, detail=str(e))


@app.get("/api/health")
def health():
    return {"ok": True, "time": datetime.utcnow().isoformat()}


@app.post("/api/band")
def band(req: BandRequest):
    try:
        return band_document(_band(req), req.observations)
    except (EllbandError, ValueError) as e:
        raise _http_error(e)


@app.post("/api/local-level")
def local_level(req: LocalLevelRequest):
    try:
        query = LocalLevelQuery(n=req.n, alpha=req.alpha, side=req.side, policy=req.policy)
        resolved = resolve_eta(query, tol=req.tol, c_alpha=req.c_alpha)
    except (EllbandError, ValueError) as e:
        raise _http_error(e)
    return {"n": req.n, "alpha": req.alpha, "side": resolved.side.value, "eta": resolved.eta, "path": resolved.path}


@app.post("/api/check")
def check(req: CheckRequest):
    try:
        verdict = band_check(req.observations, _band(req))
    except (EllbandError, ValueError) as e:
        raise _http_error(e)
    return {
        "inside": verdict.inside,
        "index": verdict.index,
        "direction": verdict.direction,
        "value": verdict.value,
    }


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("app:app", host="0.0.0.0", port=8000, log_level="info")
