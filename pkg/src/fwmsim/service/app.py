"""FastAPI service wrapping the scenario runners.

The service is stateless: every POST /run carries a full scenario config and
returns the result table. File output is the client's business.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..config import SCENARIOS, ConfigError, ScenarioConfig
from ..fock import TruncationError
from ..scenarios import run_scenario
from .schemas import HealthResponse, ScenarioList, TableResponse


def create_app() -> FastAPI:
    app = FastAPI(title="fwmsim", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/scenarios", response_model=ScenarioList)
    def scenarios() -> ScenarioList:
        return ScenarioList(scenarios=list(SCENARIOS))

    @app.post("/run", response_model=TableResponse)
    def run(cfg: ScenarioConfig) -> TableResponse:
        try:
            table = run_scenario(cfg)
        except ConfigError as e:
            raise HTTPException(status_code=422, detail=str(e))
        except TruncationError as e:
            # an undersized cutoff is a config problem, not a server fault
            raise HTTPException(status_code=422, detail=str(e))
        return TableResponse(
            columns=table.columns, rows=table.rows, metadata=table.metadata
        )

    return app


app = create_app()
