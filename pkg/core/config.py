"""
Configurações do AFM

Todos os parâmetros numéricos ficam aqui. Os valores padrão podem ser
substituídos por variáveis de ambiente com prefixo AFM_ (ou por um arquivo .env,
carregado com python-dotenv).
"""

import os
import logging
from functools import lru_cache
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

logger = logging.getLogger(__name__)


class Settings(BaseModel):
    """Parâmetros numéricos do solver e dos oráculos."""

    model_config = ConfigDict(frozen=True)

    # Varredura da raiz de r0
    scan_points: int = Field(512, ge=16)
    scan_decades: float = Field(4.0, gt=0)
    root_xtol: float = Field(1e-14, gt=0)
    root_rtol: float = Field(1e-14, gt=0)

    # Classificação por tangente
    tangent_points: int = Field(400, ge=16)
    tangent_span: float = Field(50.0, gt=1)
    envelope_tol: float = Field(1e-9, gt=0)

    # Oráculo Numerov
    oracle_tol: float = Field(1e-8, gt=0)
    numerov_points_per_efold: int = Field(800, ge=32)
    numerov_rmin_factor: float = Field(1e-5, gt=0)
    numerov_max_doublings: int = Field(3, ge=1)

    # Oráculo semirrelativístico (DVR de senos)
    sr_tol: float = Field(1e-6, gt=0)
    sr_points_per_length: int = Field(12, ge=4)
    sr_max_basis: int = Field(2048, ge=64)

    # Bisseção da constante crítica
    critical_tol: float = Field(1e-6, gt=0)

    # log_level vale para a API, cli_log_level para a CLI
    log_level: str = "INFO"
    cli_log_level: str = "WARNING"

    @field_validator("log_level", "cli_log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        name = value.upper()
        if not isinstance(logging.getLevelName(name), int):
            raise ValueError(f"nível de log desconhecido: {value}")
        return name

    def level_for(self, override: Optional[str] = None, cli: bool = False) -> int:
        """Nível numérico para logging.basicConfig; override (ex.: --log-level) tem prioridade."""
        name = (override or (self.cli_log_level if cli else self.log_level)).upper()
        level = logging.getLevelName(name)
        if not isinstance(level, int):
            raise ValueError(f"nível de log desconhecido: {override}")
        return level

    def with_overrides(self, **changes: Any) -> "Settings":
        """Retorna uma cópia com os campos indicados alterados."""
        data = self.model_dump()
        data.update({k: v for k, v in changes.items() if v is not None})
        return Settings(**data)


_ENV_PREFIX = "AFM_"


def _read_environment() -> Dict[str, str]:
    values = {}
    for name in Settings.model_fields:
        raw = os.getenv(_ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = raw
    return values


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Carrega (uma única vez) as configurações a partir do ambiente."""
    load_dotenv()
    overrides = _read_environment()
    if overrides:
        logger.info(f"Configurações sobrescritas pelo ambiente: {sorted(overrides)}")
    return Settings(**overrides)
