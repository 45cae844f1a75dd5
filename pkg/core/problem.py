"""
Arquivo de problema - Documento JSON aceito pela CLI e pela API

Um SystemSpec com os campos opcionais "quantum" e "perturbation":

    {"N": 2, "kinematics": {"type": "NR", "m": 1.0},
     "two_body": {"form": "coulomb", "g": 1.0},
     "quantum": {"mode": "explicit", "states": [[0, 0]], "aux": "coulomb"}}
"""

import json
import logging
from pathlib import Path
from typing import Optional, Union

from pydantic import ConfigDict

from core.model import SystemSpec
from core.perturb import PerturbationSpec
from core.qnum import QuantumSpec

logger = logging.getLogger(__name__)


class ProblemSpec(SystemSpec):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    quantum: QuantumSpec = QuantumSpec()
    perturbation: Optional[PerturbationSpec] = None

    def system(self) -> SystemSpec:
        """Apenas a parte física (sem quantum/perturbation)."""
        data = self.model_dump(by_alias=True, exclude={"quantum", "perturbation"})
        return SystemSpec.model_validate(data)


def load_problem(source: Union[str, Path, dict]) -> ProblemSpec:
    """
    Carrega um problema de um caminho, de uma string JSON ou de um dict.

    Raises:
        pydantic.ValidationError: documento inválido
    """
    if isinstance(source, dict):
        return ProblemSpec.model_validate(source)
    if isinstance(source, str) and source.lstrip().startswith("{"):
        return ProblemSpec.model_validate(json.loads(source))
    path = Path(source)
    if path.exists():
        logger.info(f"Carregando problema de {path}")
        return ProblemSpec.model_validate_json(path.read_text(encoding="utf-8"))
    raise FileNotFoundError(f"arquivo de problema não encontrado: {path}")
