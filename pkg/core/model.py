"""
Modelo físico - Cinemática, sistema de N corpos e classificação por tangente

Unidades naturais (hbar = c = 1) em todo o pacote. Este módulo descreve o
problema (cinemática, potenciais de um e de dois corpos, número de partículas)
e decide se um resultado AFM é limite superior, inferior ou exato comparando o
potencial com o potencial auxiliar tangente.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.config import get_settings
from core.errors import DegenerateTangentError, NonrelZeroMassError, SpecValidationError
from core.potentials import BasePotential, Potential, combine, scaled

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Cinemática
# ---------------------------------------------------------------------------

class _KinematicsBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def is_nonrelativistic(self) -> bool:
        return False

    @property
    def kinetic_mass(self) -> Optional[float]:
        """Massa usada nas estimativas de escala (None quando não há massa)."""
        return None

    @property
    def rest_energy(self) -> float:
        """Energia de repouso por partícula."""
        return 0.0

    def evaluate(self, p: float) -> Tuple[float, float, float]:
        raise NotImplementedError


class NonRelativistic(_KinematicsBase):
    """T(p) = m + p²/(2m). Com m2, um par N=2 de massas diferentes via massa reduzida."""

    type: Literal["NR"] = "NR"
    m: float = Field(ge=0)
    m2: Optional[float] = Field(None, gt=0)

    @property
    def is_nonrelativistic(self) -> bool:
        return True

    @property
    def kinetic_mass(self) -> float:
        # Para o par, 2 T(p) = m + m2 + p²/(2 mu) com mu = m m2 / (m + m2)
        if self.m2 is None:
            return self.m
        return 2.0 * self.m * self.m2 / (self.m + self.m2)

    @property
    def rest_energy(self) -> float:
        if self.m2 is None:
            return self.m
        return 0.5 * (self.m + self.m2)

    @property
    def reduced_mass(self) -> float:
        """Massa reduzida do par (m/2 para massas iguais)."""
        return 0.5 * self.kinetic_mass

    def check(self) -> None:
        if self.m <= 0.0:
            raise NonrelZeroMassError("cinemática não relativística exige m > 0")

    def evaluate(self, p):
        self.check()
        mass = self.kinetic_mass
        return self.rest_energy + p * p / (2.0 * mass), p / mass, 1.0 / mass


class SemiRelativistic(_KinematicsBase):
    """T(p) = sqrt(p² + m²)."""

    type: Literal["SR"] = "SR"
    m: float = Field(ge=0)

    @property
    def kinetic_mass(self) -> Optional[float]:
        return self.m or None

    @property
    def rest_energy(self) -> float:
        return self.m

    def check(self) -> None:
        return None

    def evaluate(self, p):
        m = self.m
        # m + p²/(sqrt(p²+m²)+m) evita cancelamento quando p << m
        t = m + p * p / (math.hypot(p, m) + m)
        return t, p / t, m * m / t ** 3


class UltraRelativistic(_KinematicsBase):
    """T(p) = p, equivalente a SR com m = 0."""

    type: Literal["UR"] = "UR"

    def check(self) -> None:
        return None

    def evaluate(self, p):
        return p, 1.0, 0.0


Kinematics = Annotated[
    Union[NonRelativistic, SemiRelativistic, UltraRelativistic],
    Field(discriminator="type"),
]


def evaluate_kinetic(kin: _KinematicsBase, p: float) -> Tuple[float, float, float]:
    """
    Energia cinética por partícula e suas derivadas.

    Args:
        kin: cinemática (NR, SR ou UR)
        p: momento, p > 0

    Returns:
        Tuple[float, float, float]: (T, T', T'')
    """
    if p <= 0.0:
        raise SpecValidationError(f"momento deve ser positivo, recebido p={p}")
    return kin.evaluate(p)


# ---------------------------------------------------------------------------
# Formas auxiliares e caráter de limite
# ---------------------------------------------------------------------------

class AuxiliaryForm(str, Enum):
    QUADRATIC = "quadratic"
    COULOMB = "coulomb"
    LINEAR = "linear"

    def p_value(self, x):
        x = np.asarray(x, dtype=float)
        if self is AuxiliaryForm.QUADRATIC:
            return x * x
        if self is AuxiliaryForm.COULOMB:
            return -1.0 / x
        return x

    def p_deriv(self, x):
        x = np.asarray(x, dtype=float)
        if self is AuxiliaryForm.QUADRATIC:
            return 2.0 * x
        if self is AuxiliaryForm.COULOMB:
            return 1.0 / (x * x)
        return np.ones_like(x)


class BoundCharacter(str, Enum):
    UPPER = "upper"
    LOWER = "lower"
    EXACT = "exact"
    INDEFINITE = "indefinite"


def tangent_classify(
    pot: BasePotential,
    aux: AuxiliaryForm,
    x_star: float,
    grid: Optional[np.ndarray] = None,
) -> BoundCharacter:
    """
    Compara o potencial com o auxiliar tangente nu * P(x) + c em x_star.

    Potencial acima da tangente em toda a malha: LOWER (o hamiltoniano
    auxiliar fica abaixo). Abaixo: UPPER. Coincidente: EXACT.

    Args:
        pot: potencial a classificar
        aux: forma auxiliar P
        x_star: ponto de tangência, x_star > 0
        grid: malha de teste; por padrão pontos log-espaçados em
            [x_star/span, span*x_star]

    Returns:
        BoundCharacter
    """
    if not x_star > 0.0:
        raise SpecValidationError(f"ponto de tangência deve ser positivo, recebido {x_star}")
    settings = get_settings()
    p_slope = float(aux.p_deriv(x_star))
    if p_slope == 0.0 or not np.isfinite(p_slope):
        raise DegenerateTangentError(f"P'({x_star}) = 0 para a forma {aux.value}")

    if grid is None:
        span = settings.tangent_span
        grid = np.geomspace(x_star / span, x_star * span, settings.tangent_points)
    grid = np.asarray(grid, dtype=float)

    nu = float(pot.deriv(x_star)) / p_slope
    c = float(pot.value(x_star)) - nu * float(aux.p_value(x_star))
    values = np.asarray(pot.value(grid), dtype=float)
    gap = values - (nu * aux.p_value(grid) + c)
    tol = settings.envelope_tol * (1.0 + np.abs(values))

    above = bool(np.all(gap >= -tol))
    below = bool(np.all(gap <= tol))
    if above and below:
        return BoundCharacter.EXACT
    if above:
        return BoundCharacter.LOWER
    if below:
        return BoundCharacter.UPPER
    return BoundCharacter.INDEFINITE


def combine_characters(characters: List[BoundCharacter], nonrelativistic: bool) -> BoundCharacter:
    """
    Caráter global a partir das classificações de cada potencial.

    NR: exato se todos forem exatos; caso contrário todos os não exatos
    precisam concordar. SR/UR: no máximo UPPER, e só se nenhum potencial
    for LOWER ou indefinido.
    """
    if not characters:
        return BoundCharacter.INDEFINITE
    rest = {c for c in characters if c is not BoundCharacter.EXACT}
    if not nonrelativistic:
        return BoundCharacter.UPPER if rest <= {BoundCharacter.UPPER} else BoundCharacter.INDEFINITE
    if not rest:
        return BoundCharacter.EXACT
    if len(rest) == 1:
        only = rest.pop()
        if only in (BoundCharacter.UPPER, BoundCharacter.LOWER):
            return only
    return BoundCharacter.INDEFINITE


# ---------------------------------------------------------------------------
# Sistema de N corpos
# ---------------------------------------------------------------------------

def pair_count(n_particles: int) -> int:
    return n_particles * (n_particles - 1) // 2


@dataclass(frozen=True)
class ReducedSystem:
    """
    Sistema pronto para o solver: para N=2 o potencial de um corpo já foi
    dobrado no de dois corpos. Aceita potenciais compostos internos.
    """

    n_particles: int
    kinematics: _KinematicsBase
    one_body: Optional[BasePotential] = None
    two_body: Optional[BasePotential] = None

    @property
    def pairs(self) -> int:
        return pair_count(self.n_particles)

    def potentials(self) -> List[Tuple[BasePotential, float, float]]:
        """
        Termos (potencial, fator, peso) da energia: peso * V(r * fator).
        U entra com (1/N, N) e V com (1/sqrt(C_N), C_N).
        """
        items = []
        if self.one_body is not None:
            items.append((self.one_body, 1.0 / self.n_particles, float(self.n_particles)))
        if self.two_body is not None and self.pairs > 0:
            items.append((self.two_body, 1.0 / math.sqrt(self.pairs), float(self.pairs)))
        return items


class SystemSpec(BaseModel):
    """Descrição de um sistema de N partículas idênticas."""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    n_particles: int = Field(alias="N", ge=1)
    kinematics: Kinematics
    one_body: Optional[Potential] = None
    two_body: Optional[Potential] = None
    fold_one_body: bool = True

    @model_validator(mode="after")
    def _check_system(self) -> "SystemSpec":
        if self.one_body is None and self.two_body is None:
            raise ValueError("é preciso ao menos um potencial (one_body ou two_body)")
        if self.n_particles == 1 and self.two_body is not None:
            raise ValueError("N=1 não admite potencial de dois corpos")
        if isinstance(self.kinematics, NonRelativistic) and self.kinematics.m2 is not None:
            if self.n_particles != 2:
                raise ValueError("massas diferentes (m2) só são suportadas para N=2")
            if self.one_body is not None:
                raise ValueError("massas diferentes não admitem potencial de um corpo")
        if self.n_particles == 2 and self.one_body is not None and not self.fold_one_body:
            raise ValueError("N=2 com potencial de um corpo exige fold_one_body=true")
        return self

    @property
    def pairs(self) -> int:
        return pair_count(self.n_particles)

    def reduced(self) -> ReducedSystem:
        """Para N=2, V_ef(x) = V(x) + 2 U(x/2) (|s_1| = |s_2| = r/2)."""
        if self.n_particles == 2 and self.one_body is not None:
            folded = combine(self.two_body, scaled(self.one_body, 2.0, 0.5))
            logger.debug("Potencial de um corpo dobrado no de dois corpos (N=2)")
            return ReducedSystem(2, self.kinematics, None, folded)
        return ReducedSystem(self.n_particles, self.kinematics, self.one_body, self.two_body)


def as_reduced(system: Union[SystemSpec, ReducedSystem]) -> ReducedSystem:
    if isinstance(system, ReducedSystem):
        return system
    return system.reduced()
