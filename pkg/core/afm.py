"""
Solver AFM - Sistema raio médio / momento médio

Para um Q dado, r0 é a raiz de

    F(r) = N (Q/r) T'(Q/r) - r U'(r/N) - sqrt(C_N) r V'(r/sqrt(C_N))

e a massa aproximada é

    M0 = N T(p0) + N U(r0/N) + C_N V(r0/sqrt(C_N)),   p0 = Q / r0.

Como dM/dr = -F/r, a solução física é uma descida de F (de + para -), que
corresponde a um mínimo de M. Subidas de F são máximos locais de M (aparecem
aos pares com potenciais de curto alcance) e não contam como solução.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict
from scipy.optimize import brentq

from core.config import Settings, get_settings
from core.errors import (
    MultipleRootsError,
    NoRootError,
    NotLowerBoundableError,
    SolverError,
    SpecValidationError,
    UnsupportedAuxiliaryError,
)
from core.model import (
    AuxiliaryForm,
    BoundCharacter,
    NonRelativistic,
    ReducedSystem,
    SystemSpec,
    as_reduced,
    combine_characters,
    tangent_classify,
)
from core.potentials import combine, natural_length, scaled
from core.qnum import QuantumSpec, global_q
from core.roots import BRENTQ_RTOL, log_grid, refine_root, scan_sign_changes

logger = logging.getLogger(__name__)

SystemLike = Union[SystemSpec, ReducedSystem]


class AfmSolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    M0: float
    r0: float
    p0: float
    X0: float
    Q: float
    bound: BoundCharacter
    virial_residual: float


class Observables(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean_p_sq: float
    mean_s_sq: float
    mean_rij_sq: Optional[float] = None


class SpectrumRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int
    Q: float
    n: int
    l: int
    M0: float
    r0: float
    p0: float
    bound: BoundCharacter
    virial_residual: float


class BoundPair(BaseModel):
    """Par de soluções que cerca um nível: -1/x (em geral inferior) e x² (em geral superior)."""

    model_config = ConfigDict(frozen=True)

    coulomb: AfmSolution
    quadratic: AfmSolution


def afm_energy(system: SystemLike, r: float, q: float) -> float:
    """M(r) = N T(Q/r) + soma dos termos de potencial."""
    reduced = as_reduced(system)
    t, _, _ = reduced.kinematics.evaluate(q / r)
    energy = reduced.n_particles * t
    for pot, factor, weight in reduced.potentials():
        energy += weight * float(pot.value(r * factor))
    return energy


def virial_residual(system: SystemLike, r: float, q: float) -> float:
    """
    Desequilíbrio F(r) da equação do virial.

    Args:
        system: sistema (SystemSpec ou já reduzido)
        r: raio médio, r > 0
        q: número quântico global

    Returns:
        float: F(r), nulo na solução AFM
    """
    reduced = as_reduced(system)
    p = q / r
    _, t1, _ = reduced.kinematics.evaluate(p)
    residual = reduced.n_particles * p * t1
    for pot, factor, weight in reduced.potentials():
        residual -= weight * factor * r * float(pot.deriv(r * factor))
    return residual


def observables(sol: AfmSolution, n_particles: int) -> Observables:
    """<p_i²> = p0², <s_i²> = (r0/N)², <r_ij²> = r0²/C_N (None para N = 1)."""
    pairs = n_particles * (n_particles - 1) // 2
    return Observables(
        mean_p_sq=sol.p0 ** 2,
        mean_s_sq=(sol.r0 / n_particles) ** 2,
        mean_rij_sq=sol.r0 ** 2 / pairs if pairs else None,
    )


def solve_sqrt_closed_form(mu: float, a: float, b: float, q: float) -> float:
    """
    Energia AFM de p²/(2 mu) + sqrt(a² r² + b²) em forma fechada.

    Args:
        mu: massa, mu > 0
        a: inclinação, a > 0
        b: deslocamento, b > 0
        q: número quântico global

    Returns:
        float: energia sem a massa de repouso
    """
    if min(mu, a, b, q) <= 0:
        raise SpecValidationError("solve_sqrt_closed_form exige mu, a, b, Q > 0")
    y = (b * b / 3.0) * (32.0 * mu / (a * a * q * q)) ** (2.0 / 3.0)
    g = sqrt_quartic_root(y)
    return (2.0 * b / math.sqrt(3.0 * y)) * (g * g + 1.0 / g)


def sqrt_quartic_root(y: float) -> float:
    """Raiz real G >= 2**(1/3) de 4 G⁴ - 8 G - 3 Y = 0 (Y >= 0)."""
    g_min = 2.0 ** (1.0 / 3.0)
    if y == 0.0:
        return g_min
    if y < 0.0:
        raise SpecValidationError(f"Y deve ser >= 0, recebido {y}")
    g_max = g_min + 1.0 + y ** 0.25
    return brentq(lambda g: 4.0 * g ** 4 - 8.0 * g - 3.0 * y, g_min, g_max, xtol=1e-15, rtol=BRENTQ_RTOL)


class AFMSolver:
    """
    Solver AFM com configurações próprias.

    Todas as operações são puras; uma instância pode ser compartilhada entre threads.
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        logger.debug(f"AFMSolver inicializado (scan_points={self.settings.scan_points})")

    # -- núcleo -----------------------------------------------------------

    def scan_interval(self, system: ReducedSystem, q: float) -> Tuple[float, float]:
        """Intervalo de busca de r0 a partir dos comprimentos naturais dos potenciais."""
        kin = system.kinematics
        masses = [kin.kinetic_mass]
        if kin.kinetic_mass is not None and not kin.is_nonrelativistic:
            masses.append(None)
        lows, highs = [], []
        for pot, factor, _ in system.potentials():
            for mass in masses:
                lo, hi = natural_length(pot, mass)
                lows.append(lo / factor)
                highs.append(hi / factor)
        span = 10.0 ** self.settings.scan_decades
        lo = min(lows) / span
        hi = max(highs) * span * max(1.0, q) ** 2
        return lo, hi

    def find_r0(self, system: ReducedSystem, q: float) -> float:
        lo, hi = self.scan_interval(system, q)
        grid = log_grid(lo, hi, 64, self.settings.scan_points)
        residual = lambda r: virial_residual(system, r, q)  # noqa: E731
        scan = scan_sign_changes(residual, grid)
        if scan.up:
            logger.debug(f"{len(scan.up)} máximo(s) local(is) de M(r) ignorado(s)")
        if not scan.down:
            raise NoRootError(
                f"F(r) não muda de + para - em [{lo:.3g}, {hi:.3g}] (Q={q:.6g}); sem solução AFM"
            )
        if len(scan.down) > 1:
            raise MultipleRootsError(
                f"{len(scan.down)} soluções AFM em [{lo:.3g}, {hi:.3g}] (Q={q:.6g})",
                scan.down,
            )
        return refine_root(residual, scan.down[0], self.settings.root_xtol, self.settings.root_rtol)

    def classify(self, system: ReducedSystem, r0: float, aux: AuxiliaryForm, modified: bool) -> BoundCharacter:
        if modified:
            return BoundCharacter.INDEFINITE
        characters = [tangent_classify(pot, aux, r0 * factor) for pot, factor, _ in system.potentials()]
        return combine_characters(characters, system.kinematics.is_nonrelativistic)

    def solve_with_q(self, system: SystemLike, q: float, aux: AuxiliaryForm, modified: bool = False) -> AfmSolution:
        """Resolve para um Q já calculado."""
        reduced = as_reduced(system)
        reduced.kinematics.check()
        if q <= 0:
            raise SpecValidationError(f"Q deve ser positivo, recebido {q}")

        r0 = self.find_r0(reduced, q)
        p0 = q / r0
        solution = AfmSolution(
            M0=afm_energy(reduced, r0, q),
            r0=r0,
            p0=p0,
            X0=reduced.n_particles * q / r0 ** 2,
            Q=q,
            bound=self.classify(reduced, r0, aux, modified),
            virial_residual=virial_residual(reduced, r0, q),
        )
        logger.debug(f"AFM N={reduced.n_particles} Q={q:.6g}: M0={solution.M0:.12g} r0={r0:.12g} ({solution.bound.value})")
        return solution

    def solve(self, system: SystemLike, quantum: Optional[QuantumSpec] = None) -> AfmSolution:
        """
        Resolve o sistema AFM para um estado.

        Args:
            system: sistema de N partículas
            quantum: números quânticos (padrão: estado fundamental, forma quadrática)

        Returns:
            AfmSolution
        """
        quantum = quantum or QuantumSpec()
        reduced = as_reduced(system)
        q = global_q(quantum, reduced.n_particles)
        return self.solve_with_q(reduced, q, quantum.aux, modified=quantum.modifier is not None)

    # -- extensões ----------------------------------------------------------

    def ground_state_lower_bound(self, system: SystemSpec) -> float:
        """
        Limite inferior do estado fundamental: N vezes o estado fundamental de
        h = m + p²/(2m) + U(r/2) + (N-1)/2 V(r).

        Usa a forma quadrática quando o potencial efetivo é exatamente
        quadrático, senão a forma -1/x com Q = 1, que precisa classificar
        como limite inferior.
        """
        kin = system.kinematics
        if not isinstance(kin, NonRelativistic):
            raise SpecValidationError("o limite inferior do estado fundamental exige cinemática NR")
        if kin.m2 is not None:
            raise SpecValidationError("o limite inferior do estado fundamental exige partículas idênticas")
        kin.check()
        n = system.n_particles
        if n < 2:
            raise SpecValidationError("o limite inferior do estado fundamental exige N >= 2")

        effective = combine(scaled(system.one_body, 1.0, 0.5), scaled(system.two_body, 0.5 * (n - 1), 1.0))
        one_body = ReducedSystem(1, NonRelativistic(m=kin.m), effective, None)

        x_ref, _ = natural_length(effective, kin.m)
        if tangent_classify(effective, AuxiliaryForm.QUADRATIC, x_ref) is BoundCharacter.EXACT:
            sol = self.solve_with_q(one_body, 1.5, AuxiliaryForm.QUADRATIC)
            accepted = {BoundCharacter.EXACT}
        else:
            sol = self.solve_with_q(one_body, 1.0, AuxiliaryForm.COULOMB)
            accepted = {BoundCharacter.EXACT, BoundCharacter.LOWER}
        if sol.bound not in accepted:
            raise NotLowerBoundableError(
                f"potencial efetivo classificado como {sol.bound.value}; não há limite inferior garantido"
            )
        bound = n * sol.M0
        logger.info(f"Limite inferior do estado fundamental (N={n}): {bound:.10g}")
        return bound

    def bound_pair(self, system: SystemSpec, n: int = 0, l: int = 0) -> BoundPair:
        """Soluções com -1/x (Q = n+l+1) e com x² (Q = 2n+l+3/2) para N em {1, 2}."""
        if system.n_particles > 2:
            raise UnsupportedAuxiliaryError("bound_pair só está definido para N <= 2")
        return BoundPair(
            coulomb=self.solve(system, QuantumSpec.explicit([(n, l)], AuxiliaryForm.COULOMB)),
            quadratic=self.solve(system, QuantumSpec.explicit([(n, l)], AuxiliaryForm.QUADRATIC)),
        )

    def spectrum(
        self,
        system: SystemSpec,
        n_values: Iterable[int],
        l_values: Iterable[int],
        n_particles: Optional[Iterable[int]] = None,
        aux: AuxiliaryForm = AuxiliaryForm.QUADRATIC,
        modifier: Optional[Tuple[float, float, float]] = None,
        workers: int = 1,
        skip_failures: bool = False,
    ) -> List[SpectrumRow]:
        """
        Varre (N, n, l). O par (n, l) vai na primeira coordenada de Jacobi e as
        demais ficam no estado fundamental. Linhas em ordem lexicográfica.
        """
        sizes = sorted(set(n_particles)) if n_particles is not None else [system.n_particles]
        jobs = [(size, n, l) for size in sizes for n in sorted(set(n_values)) for l in sorted(set(l_values))]
        if not jobs:
            raise SpecValidationError("varredura vazia")
        systems = {size: _with_particles(system, size) for size in sizes}

        def run(job):
            size, n, l = job
            states = [(n, l)] + [(0, 0)] * (max(size - 1, 1) - 1)
            quantum = QuantumSpec.explicit(states, aux, modifier=modifier)
            try:
                sol = self.solve(systems[size], quantum)
            except SolverError as e:
                if not skip_failures:
                    raise
                logger.warning(f"Estado N={size} n={n} l={l} ignorado: {e}")
                return None
            return SpectrumRow(
                N=size, Q=sol.Q, n=n, l=l, M0=sol.M0, r0=sol.r0, p0=sol.p0,
                bound=sol.bound, virial_residual=sol.virial_residual,
            )

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(run, jobs))
        else:
            rows = [run(job) for job in jobs]
        logger.info(f"Espectro calculado: {len(jobs)} estados, aux={aux.value}")
        return [row for row in rows if row is not None]


def _with_particles(system: SystemSpec, size: int) -> SystemSpec:
    if size == system.n_particles:
        return system
    data = system.model_dump(by_alias=True)
    data["N"] = size
    return SystemSpec.model_validate(data)


_default_solver: Optional[AFMSolver] = None


def get_solver() -> AFMSolver:
    global _default_solver
    if _default_solver is None:
        _default_solver = AFMSolver()
    return _default_solver


def solve(system: SystemLike, quantum: Optional[QuantumSpec] = None) -> AfmSolution:
    return get_solver().solve(system, quantum)


def ground_state_lower_bound(system: SystemSpec) -> float:
    return get_solver().ground_state_lower_bound(system)
