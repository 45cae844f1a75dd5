from fastapi import FastAPI, Request, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel
from typing import Optional, List, Dict, Any, Tuple
import logging
import os
from dotenv import load_dotenv

# Carregar variáveis de ambiente do arquivo .env
load_dotenv()

from core.config import get_settings

settings = get_settings()

logging.basicConfig(
    level=settings.level_for(),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)

from core.afm import AFMSolver
from core.critical import BodyType, critical_table
from core.errors import AFMError, SpecValidationError, error_payload
from core.model import AuxiliaryForm
from core.perturb import compare_with_mean_value, first_order
from core.potentials import Potential
from core.problem import ProblemSpec


# Modelos de entrada
class SpectrumIn(BaseModel):
    problem: ProblemSpec
    n: List[int] = [0]
    l: List[int] = [0]
    sizes: Optional[List[int]] = None
    aux: AuxiliaryForm = AuxiliaryForm.QUADRATIC
    modifier: Optional[Tuple[float, float, float]] = None
    skip_failures: bool = False


class CriticalIn(BaseModel):
    shape: Potential
    sizes: List[int] = [2, 3, 4, 5, 6]
    m: float = 1.0
    body: BodyType = BodyType.TWO_BODY
    aux: AuxiliaryForm = AuxiliaryForm.QUADRATIC


class PerturbIn(BaseModel):
    problem: ProblemSpec
    mean_value: bool = False


solver = AFMSolver(settings)

app = FastAPI(
    title="AFM - Solver de campos auxiliares",
    description="API para massas aproximadas de hamiltonianos de N corpos pelo método dos campos auxiliares.",
    version="1.0.0",
)

origins = [o.strip() for o in os.getenv("AFM_CORS_ORIGINS", "http://localhost:5173,http://127.0.0.1:5173").split(",") if o.strip()]

app.add_middleware(
    CORSMiddleware,
    allow_origins=origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.state.solver = solver
app.state.settings = settings

logger.info("Solver AFM inicializado.")


def _raise_http(error: AFMError) -> None:
    status = 400 if isinstance(error, SpecValidationError) else 422
    logger.warning(f"Requisição rejeitada ({status}): {error}")
    raise HTTPException(status_code=status, detail=error_payload(error))


@app.get("/")
async def root():
    return {"message": "AFM API está online!"}


@app.post("/solve", response_model=Dict[str, Any])
def solve_endpoint(payload: ProblemSpec, request: Request):
    """Resolve um estado e devolve M0, r0, p0, Q e o caráter do limite."""
    solver = request.app.state.solver
    try:
        sol = solver.solve(payload.system(), payload.quantum)
    except AFMError as e:
        _raise_http(e)
    return {"success": True, "solution": sol.model_dump(mode="json")}


@app.post("/spectrum", response_model=Dict[str, Any])
def spectrum_endpoint(payload: SpectrumIn, request: Request):
    """Varre (N, n, l) e devolve as linhas do espectro."""
    solver = request.app.state.solver
    try:
        rows = solver.spectrum(
            payload.problem.system(), payload.n, payload.l,
            n_particles=payload.sizes, aux=payload.aux,
            modifier=payload.modifier, skip_failures=payload.skip_failures,
        )
    except AFMError as e:
        _raise_http(e)
    return {"success": True, "rows": [row.model_dump(mode="json") for row in rows]}


@app.post("/critical", response_model=Dict[str, Any])
def critical_endpoint(payload: CriticalIn):
    """Tabela de constantes críticas do estado fundamental em N."""
    try:
        rows = critical_table(payload.shape, payload.sizes, payload.m, payload.body, payload.aux)
    except AFMError as e:
        _raise_http(e)
    return {"success": True, "rows": [row.model_dump(mode="json") for row in rows]}


@app.post("/perturb", response_model=Dict[str, Any])
def perturb_endpoint(payload: PerturbIn, request: Request):
    """Correção de primeira ordem; opcionalmente comparada com o valor médio exato."""
    solver = request.app.state.solver
    problem = payload.problem
    if problem.perturbation is None:
        raise HTTPException(status_code=400, detail={"success": False, "error": "campo 'perturbation' ausente", "kind": "SpecValidationError"})
    try:
        system = problem.system()
        base = solver.solve(system, problem.quantum)
        result = first_order(base, system, problem.perturbation)
        resposta = {"success": True, "base": base.model_dump(mode="json"), "first_order": result.model_dump(mode="json")}
        if payload.mean_value:
            report = compare_with_mean_value(base, system, problem.perturbation, problem.quantum)
            resposta["mean_value"] = report.model_dump(mode="json")
    except AFMError as e:
        _raise_http(e)
    return resposta
