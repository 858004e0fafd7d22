"""HTTP face of the verification workbench.

A small FastAPI app wrapping :mod:`qtriag.commands`: one POST endpoint runs
a verification command and returns the report JSON, plus discovery and
health endpoints.  The CLI is a thin client of the same registry, so the
wire schema here is identical to the CLI's emitted reports.
"""

from __future__ import annotations

from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .commands import COMMANDS, PARAM_SCHEMAS, CommandError, run_command

app = FastAPI(
    title="qtriag verification service",
    version=__version__,
    description="Exact and numeric checks for a 2-cocycle twisted quantum "
                "group of 2x2 upper-triangular matrices.",
)


class RunRequest(BaseModel):
    command: str
    params: dict[str, Any] = Field(default_factory=dict)
    seed: int = 42


class ReportModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(alias="schema")
    command: str
    params: dict[str, Any]
    seed: int
    passed: bool = Field(alias="pass")
    residuals: dict[str, float]
    tolerances: dict[str, float]
    values: dict[str, Any]
    timing_ms: float
    tool_version: str
    error: Optional[str] = None


class HealthResponse(BaseModel):
    status: str
    version: str


class CommandInfo(BaseModel):
    name: str
    params: dict[str, str]


@app.get("/v1/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.get("/v1/commands", response_model=list[CommandInfo])
def list_commands() -> list[CommandInfo]:
    out = []
    for name in COMMANDS:
        params = {
            key: ("json" if typ is object else typ.__name__)
            for key, (typ, _default) in PARAM_SCHEMAS[name].items()
        }
        out.append(CommandInfo(name=name, params=params))
    return out


@app.post("/v1/run", response_model=ReportModel, response_model_by_alias=True)
def run(request: RunRequest) -> ReportModel:
    try:
        report = run_command(request.command, request.params, seed=request.seed)
    except CommandError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return ReportModel.model_validate(report.to_dict())
