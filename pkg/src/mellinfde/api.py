"""HTTP front end exposing the solver as a small JSON service."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import __version__
from .errors import ConfigError, MellinFdeError, ValidationError
from .service import RunConfig, solve_tables

app = FastAPI(
    title="mellinfde",
    version=__version__,
    description=(
        "Solves multi-order linear fractional differential equations with "
        "quiescent initial conditions by a Mellin-transform method, with "
        "built-in reference oracles."
    ),
)


class SolveResponse(BaseModel):
    columns: list[str]
    rows: list[list[float | bool]]
    metadata: dict


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/solve", response_model=SolveResponse)
def solve(config: RunConfig) -> SolveResponse:
    try:
        result = solve_tables(config)
    except (ConfigError, ValidationError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except MellinFdeError as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc
    return SolveResponse(
        columns=result.columns,
        rows=result.rows,
        metadata=result.metadata,
    )
