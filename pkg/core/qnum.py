"""
Número quântico global Q

Regras por forma auxiliar:
    quadratic  Q = soma(2 n_i + l_i) + 3/2 * (N - 1)     (N = 1 usa a regra de N = 2)
    coulomb    Q = n + l + 1                              (N <= 2)
    linear     Q = 2 * (-alpha_n / 3) ** 1.5              (N <= 2, l = 0)

Com o modificador (alpha, beta, gamma): Q = soma(alpha n_i + beta l_i) + gamma * (N - 1),
permitido apenas com a forma quadrática.
"""

import logging
import math
from functools import lru_cache
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.optimize import brentq
from scipy.special import airy

from core.errors import (
    CoulombAuxManyBodyError,
    NonSWaveError,
    OutOfTableRangeError,
    SpecValidationError,
    UnsupportedAuxiliaryError,
)
from core.model import AuxiliaryForm
from core.roots import BRENTQ_RTOL

logger = logging.getLogger(__name__)

AIRY_TABLE_SIZE = 51


class QuantumSpec(BaseModel):
    """Números quânticos de um estado, ou Q direto."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: Literal["explicit", "ground_state_boson", "direct"] = "ground_state_boson"
    states: Optional[List[Tuple[int, int]]] = None
    q: Optional[float] = None
    aux: AuxiliaryForm = AuxiliaryForm.QUADRATIC
    modifier: Optional[Tuple[float, float, float]] = None

    @field_validator("states")
    @classmethod
    def _non_negative(cls, states):
        if states is not None:
            for n, l in states:
                if n < 0 or l < 0:
                    raise ValueError(f"números quânticos devem ser >= 0, recebido ({n}, {l})")
        return states

    @model_validator(mode="after")
    def _check_mode(self) -> "QuantumSpec":
        if self.mode == "explicit" and not self.states:
            raise ValueError("modo explicit exige a lista states")
        if self.mode == "direct" and (self.q is None or self.q <= 0):
            raise ValueError("modo direct exige q > 0")
        return self

    @classmethod
    def ground_state(cls, aux: AuxiliaryForm = AuxiliaryForm.QUADRATIC, **kwargs) -> "QuantumSpec":
        return cls(mode="ground_state_boson", aux=aux, **kwargs)

    @classmethod
    def explicit(cls, states: List[Tuple[int, int]], aux: AuxiliaryForm = AuxiliaryForm.QUADRATIC, **kwargs) -> "QuantumSpec":
        return cls(mode="explicit", states=list(states), aux=aux, **kwargs)

    @classmethod
    def direct(cls, q: float, aux: AuxiliaryForm = AuxiliaryForm.QUADRATIC) -> "QuantumSpec":
        return cls(mode="direct", q=q, aux=aux)

    def resolved_states(self, n_particles: int) -> List[Tuple[int, int]]:
        """Lista (n_i, l_i) efetiva; o estado fundamental tem todos os números nulos."""
        coordinates = max(n_particles - 1, 1)
        if self.mode == "ground_state_boson":
            return [(0, 0)] * coordinates
        if self.mode == "direct":
            return []
        if len(self.states) != coordinates:
            raise SpecValidationError(
                f"modo explicit exige {coordinates} pares (n, l) para N={n_particles}, recebido {len(self.states)}"
            )
        return list(self.states)


class AiryZeroTable(BaseModel):
    """Zeros negativos de Ai em ordem decrescente."""

    model_config = ConfigDict(frozen=True)

    zeros: List[float] = Field(min_length=1)

    @classmethod
    def build(cls, count: int = AIRY_TABLE_SIZE) -> "AiryZeroTable":
        return cls(zeros=[airy_zero(k) for k in range(count)])

    def __getitem__(self, n: int) -> float:
        return self.zeros[n]

    def __len__(self) -> int:
        return len(self.zeros)


def _airy_ai(x: float) -> float:
    return float(airy(x)[0])


@lru_cache(maxsize=AIRY_TABLE_SIZE)
def _airy_zero_cached(n: int) -> float:
    # Estimativa assintótica do (n+1)-ésimo zero, refinada por brentq num intervalo de +-0.2
    t = 3.0 * math.pi * (4 * n + 3) / 8.0
    guess = -(t ** (2.0 / 3.0)) * (1.0 + 5.0 / (48.0 * t * t))
    lo, hi = guess - 0.2, guess + 0.2
    if _airy_ai(lo) * _airy_ai(hi) > 0:
        raise OutOfTableRangeError(f"não foi possível isolar o zero de Airy n={n}")
    root = brentq(_airy_ai, lo, hi, xtol=1e-15, rtol=BRENTQ_RTOL, maxiter=200)
    logger.debug(f"Zero de Airy n={n}: {root:.12f}")
    return root


def airy_zero(n: int) -> float:
    """
    (n+1)-ésimo zero de Ai, calculado e mantido em cache.

    Args:
        n: índice, 0 <= n <= 50

    Returns:
        float: alpha_n < 0
    """
    if n < 0 or n >= AIRY_TABLE_SIZE:
        raise OutOfTableRangeError(f"índice de zero de Airy fora da tabela: {n} (0..{AIRY_TABLE_SIZE - 1})")
    return _airy_zero_cached(int(n))


def global_q(spec: QuantumSpec, n_particles: int) -> float:
    """
    Calcula o número quântico global Q.

    Args:
        spec: especificação quântica
        n_particles: número de partículas N >= 1

    Returns:
        float: Q > 0
    """
    if n_particles < 1:
        raise SpecValidationError(f"N deve ser >= 1, recebido {n_particles}")
    aux = spec.aux

    if aux is not AuxiliaryForm.QUADRATIC and n_particles >= 3:
        if aux is AuxiliaryForm.COULOMB:
            raise CoulombAuxManyBodyError(f"forma auxiliar -1/x não é permitida para N={n_particles}")
        raise UnsupportedAuxiliaryError(f"forma auxiliar {aux.value} não é permitida para N={n_particles}")
    if spec.modifier is not None and aux is not AuxiliaryForm.QUADRATIC:
        raise UnsupportedAuxiliaryError("o modificador (alpha, beta, gamma) só vale com a forma quadrática")

    if spec.mode == "direct":
        return float(spec.q)

    states = spec.resolved_states(n_particles)
    coordinates = max(n_particles - 1, 1)

    if spec.modifier is not None:
        alpha, beta, gamma = spec.modifier
        q = sum(alpha * n + beta * l for n, l in states) + gamma * coordinates
    elif aux is AuxiliaryForm.QUADRATIC:
        q = sum(2 * n + l for n, l in states) + 1.5 * coordinates
    elif aux is AuxiliaryForm.COULOMB:
        n, l = states[0]
        q = n + l + 1.0
    else:
        n, l = states[0]
        if l != 0:
            raise NonSWaveError(f"forma auxiliar linear exige l = 0, recebido l={l}")
        q = 2.0 * (-airy_zero(n) / 3.0) ** 1.5

    if q <= 0:
        raise SpecValidationError(f"Q calculado não é positivo: {q}")
    return float(q)
