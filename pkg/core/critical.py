"""
Constantes de acoplamento críticas - Potenciais NR de curto alcance

O potencial é dado pela forma w(x) = -V(x) com acoplamento unitário; a
constante crítica multiplica essa forma. O ponto de tangência y0 maximiza
x² w(x), ou seja, resolve 2 w(y0) + y0 w'(y0) = 0, e não depende de N, Q ou m:

    dois corpos:  g_N = 2 Q² / (y0² w(y0) N (N-1)² m)
    um corpo:     k_N = Q² / (2 N² m y0² u(y0))
"""

import logging
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict

from core.config import Settings, get_settings
from core.errors import NonrelZeroMassError, NoTangencyError, NotShortRangeError, SpecValidationError
from core.model import AuxiliaryForm, BoundCharacter, NonRelativistic, SystemSpec, tangent_classify
from core.potentials import BasePotential, natural_length
from core.qnum import QuantumSpec, global_q
from core.roots import log_grid, refine_root, scan_sign_changes

logger = logging.getLogger(__name__)


class BodyType(str, Enum):
    TWO_BODY = "two_body"
    ONE_BODY = "one_body"


class CriticalResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int
    Q: float
    y0: float
    coupling: float
    body_type: BodyType
    bound_character: BoundCharacter


class ScalingLaws(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int
    ratio_two_body: float
    gn_vs_g2: float
    ratio_one_body: float
    kn_vs_k2: float


class CriticalRow(BaseModel):
    """Linha da tabela em N: valores calculados e as leis de escala correspondentes."""

    model_config = ConfigDict(frozen=True)

    N: int
    Q: float
    y0: float
    coupling: float
    bound_character: BoundCharacter
    ratio_next: Optional[float] = None
    law_ratio_next: float
    vs_two: Optional[float] = None
    law_vs_two: float


def tangency_point(shape: BasePotential, settings: Optional[Settings] = None) -> float:
    """
    Raiz de 2 w + x w' = 0 com w = -V, no máximo global de x² w(x).

    Args:
        shape: potencial de curto alcance com acoplamento unitário

    Returns:
        float: y0 > 0
    """
    settings = settings or get_settings()
    if not shape.short_range:
        raise NotShortRangeError(f"o potencial '{shape.form}' não se anula no infinito")

    def tangency(x: float) -> float:
        return -(2.0 * float(shape.value(x)) + x * float(shape.deriv(x)))

    lo, hi = natural_length(shape, None)
    grid = log_grid(1e-3 * lo, 1e3 * hi, 64, settings.scan_points)
    scan = scan_sign_changes(tangency, grid)
    if not scan.down:
        raise NoTangencyError(f"2w + x w' não tem raiz positiva para '{shape.form}'")

    candidates = [refine_root(tangency, bracket, settings.root_xtol, settings.root_rtol) for bracket in scan.down]
    y0 = max(candidates, key=lambda y: -y * y * float(shape.value(y)))
    if -float(shape.value(y0)) <= 0.0:
        raise NoTangencyError(f"w(y0) <= 0 no ponto de tangência y0={y0:.6g}")
    logger.debug(f"Ponto de tangência y0={y0:.12g} ({len(candidates)} candidato(s))")
    return y0


def _ground_state_q(n_particles: int, aux: AuxiliaryForm) -> float:
    return global_q(QuantumSpec.ground_state(aux), n_particles)


def _check_mass(m: float) -> None:
    if m <= 0:
        raise NonrelZeroMassError("constantes críticas exigem cinemática NR com m > 0")


def critical_two_body(
    shape: BasePotential,
    n_particles: int,
    m: float = 1.0,
    q: Optional[float] = None,
    aux: AuxiliaryForm = AuxiliaryForm.QUADRATIC,
    y0: Optional[float] = None,
) -> CriticalResult:
    """
    Constante crítica g_N para forças de dois corpos.

    Args:
        shape: potencial com acoplamento unitário (curto alcance)
        n_particles: N >= 2
        m: massa de cada partícula
        q: número quântico global (padrão: estado fundamental da forma aux)
        aux: forma auxiliar que define Q e o caráter do limite
        y0: ponto de tangência já calculado (opcional)

    Returns:
        CriticalResult
    """
    if n_particles < 2:
        raise SpecValidationError("forças de dois corpos exigem N >= 2")
    _check_mass(m)
    q = q if q is not None else _ground_state_q(n_particles, aux)
    y0 = y0 if y0 is not None else tangency_point(shape)
    w0 = -float(shape.value(y0))
    coupling = 2.0 * q * q / (y0 * y0 * w0 * n_particles * (n_particles - 1) ** 2 * m)
    return CriticalResult(
        N=n_particles, Q=q, y0=y0, coupling=coupling, body_type=BodyType.TWO_BODY,
        bound_character=tangent_classify(shape, aux, y0),
    )


def critical_one_body(
    shape: BasePotential,
    n_particles: int,
    m: float = 1.0,
    q: Optional[float] = None,
    aux: AuxiliaryForm = AuxiliaryForm.QUADRATIC,
    y0: Optional[float] = None,
) -> CriticalResult:
    """Constante crítica k_N para forças de um corpo (y0 = r0/N)."""
    if n_particles < 1:
        raise SpecValidationError("N deve ser >= 1")
    _check_mass(m)
    q = q if q is not None else _ground_state_q(n_particles, aux)
    y0 = y0 if y0 is not None else tangency_point(shape)
    u0 = -float(shape.value(y0))
    coupling = q * q / (2.0 * n_particles ** 2 * m * y0 * y0 * u0)
    return CriticalResult(
        N=n_particles, Q=q, y0=y0, coupling=coupling, body_type=BodyType.ONE_BODY,
        bound_character=tangent_classify(shape, aux, y0),
    )


def critical_for_system(system: SystemSpec, q: Optional[float] = None, aux: AuxiliaryForm = AuxiliaryForm.QUADRATIC) -> CriticalResult:
    """Constante crítica (multiplicador do potencial dado) para um sistema com um único tipo de força."""
    kin = system.kinematics
    if not isinstance(kin, NonRelativistic) or kin.m2 is not None:
        raise SpecValidationError("constantes críticas só para cinemática NR com massas iguais")
    if system.one_body is not None and system.two_body is not None:
        raise SpecValidationError("problemas críticos com forças de um e dois corpos juntas não são tratados")
    if system.two_body is not None:
        return critical_two_body(system.two_body, system.n_particles, kin.m, q, aux)
    return critical_one_body(system.one_body, system.n_particles, kin.m, q, aux)


def gs_scaling_laws(n_particles: int) -> ScalingLaws:
    """Razões em forma fechada para o estado fundamental (Q = 3(N-1)/2)."""
    if n_particles < 2:
        raise SpecValidationError("as leis de escala exigem N >= 2")
    n = float(n_particles)
    return ScalingLaws(
        N=n_particles,
        ratio_two_body=n / (n + 1.0),
        gn_vs_g2=2.0 / n,
        ratio_one_body=(n * n / (n * n - 1.0)) ** 2,
        kn_vs_k2=4.0 * ((n - 1.0) / n) ** 2,
    )


def critical_table(
    shape: BasePotential,
    sizes: List[int],
    m: float = 1.0,
    body: BodyType = BodyType.TWO_BODY,
    aux: AuxiliaryForm = AuxiliaryForm.QUADRATIC,
) -> List[CriticalRow]:
    """Tabela do estado fundamental em N com as colunas das leis de escala."""
    sizes = sorted(set(sizes))
    if not sizes or sizes[0] < 2:
        raise SpecValidationError("a tabela crítica exige N >= 2")
    y0 = tangency_point(shape)
    compute = critical_two_body if body is BodyType.TWO_BODY else critical_one_body
    results = {n: compute(shape, n, m, aux=aux, y0=y0) for n in sizes}
    reference = compute(shape, 2, m, aux=aux, y0=y0).coupling

    rows = []
    for n in sizes:
        laws = gs_scaling_laws(n)
        following = compute(shape, n + 1, m, aux=aux, y0=y0).coupling
        result = results[n]
        if body is BodyType.TWO_BODY:
            law_next, law_two = laws.ratio_two_body, laws.gn_vs_g2
        else:
            law_next, law_two = laws.ratio_one_body, laws.kn_vs_k2
        rows.append(CriticalRow(
            N=n, Q=result.Q, y0=y0, coupling=result.coupling,
            bound_character=result.bound_character,
            ratio_next=following / result.coupling, law_ratio_next=law_next,
            vs_two=result.coupling / reference, law_vs_two=law_two,
        ))
    logger.info(f"Tabela crítica ({body.value}) para N={sizes[0]}..{sizes[-1]}")
    return rows
