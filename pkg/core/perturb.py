"""
Perturbação de primeira ordem - Correções AFM para termos pequenos

Termos suportados: tau * t(p) na cinemática, eta * u(x) no potencial de um
corpo e eps * v(x) no de dois corpos. O tamanho dos acoplamentos é
responsabilidade de quem chama.
"""

import logging
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.integrate import quad

from core import oracle
from core.afm import AfmSolution, SystemLike
from core.errors import OracleUnavailableError, SpecValidationError, ZeroDenominatorError
from core.model import BoundCharacter, NonRelativistic, SystemSpec, as_reduced
from core.potentials import Potential
from core.qnum import QuantumSpec

logger = logging.getLogger(__name__)


class PerturbationTerm(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    coupling: float
    function: Potential


class PerturbationSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    tau_term: Optional[PerturbationTerm] = None
    eta_term: Optional[PerturbationTerm] = None
    eps_term: Optional[PerturbationTerm] = None

    @model_validator(mode="after")
    def _at_least_one(self) -> "PerturbationSpec":
        if self.tau_term is None and self.eta_term is None and self.eps_term is None:
            raise ValueError("é preciso ao menos um termo de perturbação")
        return self


class PerturbedSolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    M1: float
    delta: float
    r1: float
    p1: float


class MeanValueReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    afm_shift: float
    mean_value_shift: float
    relative_difference: float


def first_order(base: AfmSolution, system: SystemLike, pert: PerturbationSpec) -> PerturbedSolution:
    """
    Massa corrigida M1 e deslocamento delta de r0.

    Args:
        base: solução AFM convergida do sistema sem perturbação
        system: o mesmo sistema usado para obter base
        pert: termos de perturbação

    Returns:
        PerturbedSolution com r1 = (1 + delta) r0 e p1 = (1 - delta) p0
    """
    reduced = as_reduced(system)
    n = reduced.n_particles
    pairs = reduced.pairs
    if pert.eps_term is not None and pairs == 0:
        raise SpecValidationError("termo de dois corpos exige N >= 2")

    r0, p0 = base.r0, base.p0
    s_one = r0 / n
    s_two = r0 / math.sqrt(pairs) if pairs else None

    m1 = base.M0
    numerator = 0.0
    if pert.tau_term is not None:
        tau, t = pert.tau_term.coupling, pert.tau_term.function
        m1 += n * tau * float(t.value(p0))
        numerator += n * p0 * tau * float(t.deriv(p0))
    if pert.eta_term is not None:
        eta, u = pert.eta_term.coupling, pert.eta_term.function
        m1 += n * eta * float(u.value(s_one))
        numerator -= r0 * eta * float(u.deriv(s_one))
    if pert.eps_term is not None:
        eps, v = pert.eps_term.coupling, pert.eps_term.function
        m1 += pairs * eps * float(v.value(s_two))
        numerator -= math.sqrt(pairs) * r0 * eps * float(v.deriv(s_two))

    _, t1, t2 = reduced.kinematics.evaluate(p0)
    curvature = [2.0 * n * p0 * t1, n * p0 * p0 * t2]
    # Com N=2 o termo de um corpo já está dobrado em two_body
    for pot, factor, weight in reduced.potentials():
        curvature.append(weight * factor ** 2 * r0 ** 2 * float(pot.deriv2(r0 * factor)))
    denominator = sum(curvature)
    if not np.isfinite(denominator) or abs(denominator) <= 1e-12 * sum(abs(c) for c in curvature):
        raise ZeroDenominatorError(f"curvatura degenerada no cálculo de delta (denominador={denominator:.3g})")

    delta = numerator / denominator
    logger.debug(f"Perturbação: M1={m1:.12g} delta={delta:.6g}")
    return PerturbedSolution(M1=m1, delta=delta, r1=(1.0 + delta) * r0, p1=(1.0 - delta) * p0)


def compare_with_mean_value(
    base: AfmSolution,
    system: SystemSpec,
    pert: PerturbationSpec,
    quantum: Optional[QuantumSpec] = None,
) -> MeanValueReport:
    """
    Compara o deslocamento AFM C_N eps v(r0/sqrt(C_N)) com C_N eps <v> sobre o
    estado exato sem perturbação.

    N = 2 usa o oráculo Numerov. N >= 3 só para o estado fundamental harmônico,
    onde a distância de um par tem distribuição gaussiana com <r_ij²> = r0²/C_N.
    """
    if pert.eps_term is None:
        raise SpecValidationError("a comparação com o valor médio exige eps_term")
    if not isinstance(system.kinematics, NonRelativistic):
        raise OracleUnavailableError("valor médio exato disponível apenas para cinemática NR")
    if base.bound is not BoundCharacter.EXACT:
        raise OracleUnavailableError(f"a base precisa ser exata para o AFM (classificada {base.bound.value})")

    quantum = quantum or QuantumSpec()
    n = system.n_particles
    pairs = system.pairs
    eps, v = pert.eps_term.coupling, pert.eps_term.function
    afm_shift = pairs * eps * float(v.value(base.r0 / math.sqrt(pairs)))

    if n == 2:
        state_n, state_l = quantum.resolved_states(n)[0] if quantum.mode != "direct" else (0, 0)
        reduced = system.reduced()
        problem = oracle.RadialProblem(
            mass=system.kinematics.reduced_mass,
            potential=reduced.two_body,
            l=state_l,
            n=state_n,
            rest_energy=2.0 * system.kinematics.rest_energy,
        )
        mean = oracle.expectation(problem, v.value)
    elif n >= 3:
        if quantum.mode != "ground_state_boson" and any(s != (0, 0) for s in quantum.resolved_states(n)):
            raise OracleUnavailableError("para N >= 3 só o estado fundamental harmônico tem valor médio exato")
        sigma_sq = base.r0 ** 2 / pairs / 3.0
        mean = gaussian_pair_mean(v.value, sigma_sq)
    else:
        raise OracleUnavailableError("N = 1 não tem termo de dois corpos")

    mean_shift = pairs * eps * mean
    scale = max(abs(afm_shift), abs(mean_shift))
    relative = abs(afm_shift - mean_shift) / scale if scale > 0 else 0.0
    logger.info(f"Valor médio: AFM={afm_shift:.10g} exato={mean_shift:.10g} (dif. relativa {relative:.3g})")
    return MeanValueReport(afm_shift=afm_shift, mean_value_shift=mean_shift, relative_difference=relative)


def gaussian_pair_mean(func, sigma_sq: float) -> float:
    """<f(|r|)> para r gaussiano isotrópico em 3D com variância sigma_sq por componente."""
    sigma = math.sqrt(sigma_sq)
    norm = 4.0 * math.pi / (2.0 * math.pi * sigma_sq) ** 1.5

    def density(r):
        return norm * r * r * math.exp(-0.5 * r * r / sigma_sq) * float(func(r))

    upper = 12.0 * sigma
    value, _ = quad(density, 0.0, upper, limit=200, epsabs=0.0, epsrel=1e-12)
    return value
