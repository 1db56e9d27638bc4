"""FastAPI application exposing masks, regularity bounds and ψ statistics."""
from __future__ import annotations

import logging

from fastapi import FastAPI, HTTPException

from app import __version__
from app.schemas import (
    MaskRequest,
    MaskResponse,
    PsiStats,
    PsiStatsRequest,
    RegularityReport,
    RegularityRequest,
    SchemeSpec,
)
from app.settings import configure_logging
from core.analysis import holder_lower_bound
from core.errors import NumericalError
from core.noise import psi_stats
from core.schemes import mask

logger = logging.getLogger(__name__)
configure_logging()

app = FastAPI(title="Least Squares Subdivision Toolkit", version=__version__)


def _spec(request: MaskRequest) -> SchemeSpec:
    try:
        return SchemeSpec(family=request.family, n=request.n, degree=request.degree)
    except ValueError as exc:
        logger.warning("Bad scheme parameters: %s", exc)
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _numerical_failure(exc: NumericalError) -> HTTPException:
    logger.error("Numerical failure: %s", exc)
    return HTTPException(status_code=422, detail=str(exc))


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/api/v1/mask", response_model=MaskResponse)
def create_mask(request: MaskRequest) -> MaskResponse:
    m = mask(_spec(request))
    return MaskResponse(record=m.to_record(), fraction=m.to_fraction_string())


@app.post("/api/v1/regularity", response_model=RegularityReport)
def create_regularity(request: RegularityRequest) -> RegularityReport:
    spec = _spec(request)
    try:
        return holder_lower_bound(mask(spec), request.L)
    except ValueError as exc:
        logger.warning("Bad request: %s", exc)
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except NumericalError as exc:
        raise _numerical_failure(exc) from exc


@app.post("/api/v1/psi-stats", response_model=PsiStats)
def create_psi_stats(request: PsiStatsRequest) -> PsiStats:
    spec = _spec(request)
    try:
        return psi_stats(spec, request.K)
    except ValueError as exc:
        logger.warning("Bad request: %s", exc)
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except NumericalError as exc:
        raise _numerical_failure(exc) from exc
