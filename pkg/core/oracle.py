"""
Oráculos numéricos exatos

Usados para conferir os resultados AFM:
    - Numerov com contagem de nós para a equação radial de Schrödinger (N = 1, 2)
    - DVR de senos para a equação de Salpeter sem spin em onda S (N = 2)
    - valores esperados sobre a função de onda de Numerov
    - bisseção da constante crítica pela contagem de estados ligados em E = 0

A equação radial é integrada na malha logarítmica r = r_min e^x com
u(r) = sqrt(r) phi(x), onde

    phi'' = [(l + 1/2)² + 2 mu r² (V(r) - E)] phi.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import cumulative_trapezoid, simpson
from scipy.linalg import eigh
from scipy.optimize import brentq

from core.config import Settings, get_settings
from core.errors import NoBoundStateError, NotConvergedError, SpecValidationError
from core.model import NonRelativistic, SemiRelativistic, SystemSpec
from core.potentials import BasePotential, natural_length
from core.roots import BRENTQ_RTOL

logger = logging.getLogger(__name__)

# Decaimento WKB mínimo (em e-folds) entre o ponto de retorno e r_max
WKB_DECAY = 40.0
_RESCALE = 1e150


class RadialProblem(BaseModel):
    """
    Problema radial de um corpo.

    mass é a massa reduzida (NR) ou a massa de cada partícula (SR).
    rest_energy é somada ao autovalor para seguir a convenção do AFM.
    """

    model_config = ConfigDict(frozen=True)

    mass: float = Field(gt=0)
    potential: BasePotential
    l: int = Field(0, ge=0)
    n: int = Field(0, ge=0)
    rest_energy: float = 0.0
    r_max: Optional[float] = Field(None, gt=0)
    points_per_efold: Optional[int] = Field(None, ge=32)

    @classmethod
    def two_body(cls, potential: BasePotential, m: float, n: int = 0, l: int = 0) -> "RadialProblem":
        """Par de massas iguais m: massa reduzida m/2 e energia de repouso 2m."""
        return cls(mass=0.5 * m, potential=potential, l=l, n=n, rest_energy=2.0 * m)

    @classmethod
    def from_system(cls, system: SystemSpec, n: int = 0, l: int = 0) -> "RadialProblem":
        kin = system.kinematics
        if not isinstance(kin, NonRelativistic):
            raise SpecValidationError("o oráculo radial exige cinemática NR")
        kin.check()
        reduced = system.reduced()
        if reduced.n_particles == 1:
            return cls(mass=kin.m, potential=reduced.one_body, l=l, n=n, rest_energy=kin.m)
        if reduced.n_particles == 2:
            return cls(mass=kin.reduced_mass, potential=reduced.two_body, l=l, n=n, rest_energy=2.0 * kin.rest_energy)
        raise SpecValidationError("o oráculo radial só trata N = 1 e N = 2")


@dataclass
class _Grid:
    r: np.ndarray
    dx: float
    potential: np.ndarray
    r_max: float
    density: int


@dataclass
class NumerovResult:
    energy: float  # sem a energia de repouso
    grid: _Grid


class NumerovSolver:
    """Autovalores e funções de onda radiais por Numerov com contagem de nós."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    # -- malha e integração -------------------------------------------------

    def _build_grid(self, prob: RadialProblem, r_min: float, r_max: float, density: int) -> _Grid:
        efolds = math.log(r_max / r_min)
        count = int(math.ceil(efolds * density)) + 1
        x = np.linspace(0.0, efolds, count)
        r = r_min * np.exp(x)
        return _Grid(r=r, dx=x[1] - x[0], potential=np.asarray(prob.potential.value(r), dtype=float), r_max=r_max, density=density)

    def _coefficients(self, grid: _Grid, prob: RadialProblem, energy: float, potential: Optional[np.ndarray] = None):
        pot = grid.potential if potential is None else potential
        f = (prob.l + 0.5) ** 2 + 2.0 * prob.mass * grid.r ** 2 * (pot - energy)
        c = 1.0 - grid.dx ** 2 * f / 12.0
        up = (12.0 - 10.0 * c[1:-1]) / c[2:]
        down = c[:-2] / c[2:]
        return up.tolist(), down.tolist()

    def _start(self, grid: _Grid, prob: RadialProblem) -> Tuple[float, float]:
        return math.exp(-(prob.l + 0.5) * grid.dx), 1.0

    def _shoot(self, grid: _Grid, prob: RadialProblem, energy: float, potential: Optional[np.ndarray] = None):
        """Integra de r_min a r_max; devolve (nós, três últimos valores de phi)."""
        up, down = self._coefficients(grid, prob, energy, potential)
        y_prev, y = self._start(grid, prob)
        y_old = y_prev
        nodes = 0
        for a, b in zip(up, down):
            y_next = a * y - b * y_prev
            if (y_next < 0.0) != (y < 0.0):
                nodes += 1
            if y_next > _RESCALE or y_next < -_RESCALE:
                y_next /= _RESCALE
                y /= _RESCALE
            y_old, y_prev, y = y_prev, y, y_next
        return nodes, y_old, y_prev, y

    def _wavefunction(self, grid: _Grid, prob: RadialProblem, energy: float) -> np.ndarray:
        up, down = self._coefficients(grid, prob, energy)
        values = list(self._start(grid, prob))
        for a, b in zip(up, down):
            y_next = a * values[-1] - b * values[-2]
            if abs(y_next) > _RESCALE:
                values = [v / _RESCALE for v in values]
                y_next /= _RESCALE
            values.append(y_next)
        return np.asarray(values)

    # -- autovalor ----------------------------------------------------------

    def _centrifugal(self, prob: RadialProblem, r: np.ndarray) -> np.ndarray:
        return prob.l * (prob.l + 1) / (2.0 * prob.mass * r ** 2)

    def _level(self, grid: _Grid, prob: RadialProblem) -> Optional[float]:
        """Autovalor n na caixa [r_min, r_max]; None se a caixa é pequena demais."""
        n = prob.n
        effective = grid.potential + self._centrifugal(prob, grid.r)
        lo, hi = float(np.min(effective)), float(effective[-1])
        if prob.potential.short_range:
            hi = min(hi, 0.0)
        # Abaixo deste piso algum c_i < 1/2 e a recorrência passa a oscilar (nós espúrios)
        reach = (6.0 / grid.dx ** 2 - (prob.l + 0.5) ** 2) / (2.0 * prob.mass * grid.r ** 2)
        floor = float(np.max(grid.potential - reach))
        if floor < hi:
            lo = max(lo, floor)
        count = lambda e: self._shoot(grid, prob, e)[0]  # noqa: E731
        n_hi = count(hi)
        if n_hi < n + 1:
            return None
        n_lo = count(lo)
        for _ in range(300):
            if n_lo == n and n_hi == n + 1:
                break
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            c = count(mid)
            if c <= n:
                lo, n_lo = mid, c
            else:
                hi, n_hi = mid, c
        if n_lo > n:
            raise NotConvergedError(f"contagem de nós inconsistente para n={n}")
        end = lambda e: self._shoot(grid, prob, e)[3]  # noqa: E731
        try:
            return brentq(end, lo, hi, xtol=1e-14 * (1.0 + abs(hi)), rtol=BRENTQ_RTOL, maxiter=300)
        except ValueError as e:
            raise NotConvergedError(f"não foi possível isolar o autovalor n={n}: {e}") from e

    def _required_r_max(self, prob: RadialProblem, energy: float, r_min: float, length: float) -> float:
        """Menor r com decaimento WKB >= WKB_DECAY além do ponto de retorno externo."""
        r = np.geomspace(r_min, 1e6 * length, 20000)
        kappa_sq = 2.0 * prob.mass * (np.asarray(prob.potential.value(r)) + self._centrifugal(prob, r) - energy)
        allowed = np.nonzero(kappa_sq < 0.0)[0]
        start = allowed[-1] if allowed.size else 0
        tail_r = r[start:]
        decay = cumulative_trapezoid(np.sqrt(np.clip(kappa_sq[start:], 0.0, None)), tail_r, initial=0.0)
        reached = np.nonzero(decay >= WKB_DECAY)[0]
        return float(tail_r[reached[0]]) if reached.size else float(r[-1])

    def _lengths(self, prob: RadialProblem) -> Tuple[float, float]:
        return natural_length(prob.potential, prob.mass)

    def solve(self, prob: RadialProblem) -> NumerovResult:
        """
        Autovalor do estado (n, l) com verificação por duplicação da malha.

        Returns:
            NumerovResult: energia sem repouso e a malha mais fina usada
        """
        settings = self.settings
        lo_len, hi_len = self._lengths(prob)
        r_min = settings.numerov_rmin_factor * lo_len
        density = prob.points_per_efold or settings.numerov_points_per_efold

        if prob.potential.short_range:
            available = self.bound_state_count(prob.potential, prob.mass, prob.l, hi_len)
            if available <= prob.n:
                raise NoBoundStateError(f"o potencial tem {available} estado(s) ligado(s) com l={prob.l}; pedido n={prob.n}")

        r_max = prob.r_max or 8.0 * hi_len
        energy = None
        for _ in range(40):
            grid = self._build_grid(prob, r_min, r_max, density)
            energy = self._level(grid, prob)
            if energy is not None:
                break
            r_max *= 2.0
        if energy is None:
            raise NotConvergedError(f"nenhuma caixa comporta o estado n={prob.n}, l={prob.l}")

        if prob.r_max is None:
            needed = self._required_r_max(prob, energy, r_min, hi_len)
            if needed > r_max:
                r_max = needed
                grid = self._build_grid(prob, r_min, r_max, density)
                energy = self._level(grid, prob)
                if energy is None:
                    raise NotConvergedError("o estado saiu da caixa após a extensão WKB")

        for _ in range(settings.numerov_max_doublings):
            finer = self._build_grid(prob, r_min, 2.0 * r_max, 2 * density)
            refined = self._level(finer, prob)
            if refined is None:
                raise NotConvergedError("o estado saiu da caixa na duplicação da malha")
            change = abs(refined - energy)
            logger.debug(f"Numerov n={prob.n} l={prob.l}: E={refined:.14g} (variação {change:.2e})")
            if change <= settings.oracle_tol * (1.0 + abs(refined)):
                return NumerovResult(energy=refined, grid=finer)
            r_max, density, energy, grid = 2.0 * r_max, 2 * density, refined, finer
        raise NotConvergedError(
            f"Numerov não convergiu para n={prob.n}, l={prob.l} (última variação {change:.3g})"
        )

    # -- contagem de estados ligados em E = 0 ----------------------------------

    def bound_state_count(self, potential: BasePotential, mass: float, l: int, length: Optional[float] = None) -> int:
        """
        Número de estados ligados com E < 0: nós da solução de energia zero,
        mais um se a solução assintótica A r^(l+1) + B r^(-l) ainda cruza zero
        além de r_max.
        """
        lo_len, hi_len = natural_length(potential, mass)
        length = length or hi_len
        prob = RadialProblem(mass=mass, potential=potential, l=l)
        grid = self._build_grid(prob, self.settings.numerov_rmin_factor * lo_len, 60.0 * length, self.settings.numerov_points_per_efold)
        return self._zero_energy_count(grid, prob)

    def _zero_energy_count(self, grid: _Grid, prob: RadialProblem, potential: Optional[np.ndarray] = None) -> int:
        nodes, y_old, y_mid, y_end = self._shoot(grid, prob, 0.0, potential)
        slope = (y_end - y_old) / (2.0 * grid.dx)
        growing = (prob.l + 0.5) * y_mid + slope
        if growing != 0.0 and (growing < 0.0) != (y_mid < 0.0):
            nodes += 1
        return nodes

    def critical_coupling(self, shape: BasePotential, m: float, l: int = 0, n: int = 0) -> float:
        """
        Menor g tal que g * shape liga o estado (n, l) de dois corpos de massa m.

        Args:
            shape: potencial de curto alcance com acoplamento unitário
            m: massa de cada partícula (massa reduzida m/2)

        Returns:
            float: constante crítica
        """
        if not shape.short_range:
            raise SpecValidationError("a bisseção crítica exige potencial de curto alcance")
        mu = 0.5 * m
        lo_len, hi_len = natural_length(shape, None)
        tol = self.settings.critical_tol
        previous = None
        length = hi_len
        for _ in range(4):
            prob = RadialProblem(mass=mu, potential=shape, l=l, n=n)
            grid = self._build_grid(prob, self.settings.numerov_rmin_factor * lo_len, 60.0 * length, self.settings.numerov_points_per_efold)
            base = grid.potential
            binds = lambda g: self._zero_energy_count(grid, prob, g * base) >= n + 1  # noqa: E731

            g_lo, g_hi = 1.0, 1.0
            for _ in range(200):
                if binds(g_hi):
                    break
                g_lo, g_hi = g_hi, 2.0 * g_hi
            else:
                raise NotConvergedError("nenhum acoplamento testado liga o estado")
            for _ in range(200):
                if not binds(g_lo):
                    break
                g_hi, g_lo = g_lo, 0.5 * g_lo
            else:
                raise NotConvergedError("o estado permanece ligado para acoplamentos arbitrariamente pequenos")
            while g_hi - g_lo > 0.25 * tol * g_hi:
                mid = 0.5 * (g_lo + g_hi)
                if binds(mid):
                    g_hi = mid
                else:
                    g_lo = mid
            critical = 0.5 * (g_lo + g_hi)
            logger.debug(f"Acoplamento crítico n={n} l={l}: {critical:.10g} (r_max={60.0 * length:.4g})")
            if previous is not None and abs(critical - previous) <= tol * critical:
                return critical
            previous = critical
            length *= 2.0
        raise NotConvergedError("o acoplamento crítico não convergiu com a extensão de r_max")


# ---------------------------------------------------------------------------
# Salpeter sem spin: DVR de senos em onda S
# ---------------------------------------------------------------------------

def _dvr_level(m: float, potential: BasePotential, radius: float, size: int, n: int) -> Tuple[float, np.ndarray]:
    index = np.arange(1, size + 1)
    points = index * radius / (size + 1)
    k = index * math.pi / radius
    transform = math.sqrt(2.0 / (size + 1)) * np.sin(math.pi * np.outer(index, index) / (size + 1))
    # 2 sqrt(k² + m²) - 2m
    kinetic = 2.0 * k * k / (np.sqrt(k * k + m * m) + m)
    hamiltonian = (transform * kinetic) @ transform
    hamiltonian[np.diag_indices(size)] += np.asarray(potential.value(points), dtype=float)
    energy = eigh(hamiltonian, eigvals_only=True, subset_by_index=[n, n])[0]
    return float(energy), points


class SalpeterSolver:
    """Estados S de dois corpos com energia cinética 2 sqrt(p² + m²)."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def _lengths(self, m: float, potential: BasePotential) -> Tuple[float, float]:
        lo_ur, hi_ur = natural_length(potential, None)
        if m <= 0:
            return lo_ur, hi_ur
        lo_nr, hi_nr = natural_length(potential, 0.5 * m)
        return min(lo_ur, lo_nr), min(hi_ur, hi_nr)

    def _converge(self, m: float, potential: BasePotential, radius: float, spacing: float, n: int, tol: float) -> Tuple[float, np.ndarray]:
        max_basis = self.settings.sr_max_basis
        size = max(n + 8, min(int(math.ceil(radius / spacing)), max_basis // 8))
        energies: List[float] = []
        accelerated: List[float] = []
        while size <= max_basis:
            energy, points = _dvr_level(m, potential, radius, size, n)
            energies.append(energy)
            if len(energies) >= 2 and abs(energies[-1] - energies[-2]) <= tol * (1.0 + abs(energy)):
                return energy, points
            if len(energies) >= 3:
                d1, d2 = energies[-2] - energies[-3], energies[-1] - energies[-2]
                if d1 != d2:
                    accelerated.append(energies[-1] - d2 * d2 / (d2 - d1))
                if len(accelerated) >= 2 and abs(accelerated[-1] - accelerated[-2]) <= tol * (1.0 + abs(accelerated[-1])):
                    return accelerated[-1], points
            logger.debug(f"DVR tamanho {size}: E={energy:.12g}")
            size *= 2
        raise NotConvergedError(f"DVR não convergiu até {max_basis} pontos (últimos: {energies[-2:]})")

    def solve(self, m: float, potential: BasePotential, n: int = 0, tol: Optional[float] = None) -> float:
        """Autovalor total (inclui 2m) do estado S de índice n."""
        if m < 0:
            raise SpecValidationError("massa deve ser >= 0")
        tol = tol or self.settings.sr_tol
        lo_len, hi_len = self._lengths(m, potential)
        spacing = lo_len / self.settings.sr_points_per_length
        radius = 20.0 * hi_len
        for _ in range(6):
            energy, points = self._converge(m, potential, radius, spacing, n, tol)
            allowed = np.nonzero(np.asarray(potential.value(points)) <= energy)[0]
            turning = float(points[allowed[-1]]) if allowed.size else 0.0
            if radius >= 3.0 * turning:
                return 2.0 * m + energy
            radius = 4.0 * turning
        raise NotConvergedError("o raio da DVR não cobre o ponto de retorno")


# ---------------------------------------------------------------------------
# Funções de módulo
# ---------------------------------------------------------------------------

def nr_eigenvalue(prob: RadialProblem, settings: Optional[Settings] = None) -> float:
    """Energia total (com repouso) do estado (n, l) pelo método de Numerov."""
    result = NumerovSolver(settings).solve(prob)
    return prob.rest_energy + result.energy


def expectation(prob: RadialProblem, observable: Callable, settings: Optional[Settings] = None) -> float:
    """
    <f(r)> normalizado sobre a função de onda de Numerov.

    A cauda além do ponto de retorno é cortada no mínimo de |u|, onde começa a
    solução divergente residual.
    """
    solver = NumerovSolver(settings)
    result = solver.solve(prob)
    grid = result.grid
    phi = solver._wavefunction(grid, prob, result.energy)
    u = np.sqrt(grid.r) * phi
    effective = grid.potential + solver._centrifugal(prob, grid.r)
    allowed = np.nonzero(effective < result.energy)[0]
    turning = allowed[-1] if allowed.size else 0
    cut = turning + int(np.argmin(np.abs(u[turning:])))
    density = grid.r ** 2 * phi ** 2
    density[cut + 1:] = 0.0
    x = np.log(grid.r / grid.r[0])
    values = np.asarray(observable(grid.r), dtype=float) * np.ones_like(grid.r)
    norm = simpson(density, x=x)
    return float(simpson(values * density, x=x) / norm)


def sr_eigenvalue_swave(m: float, potential: BasePotential, n: int = 0, settings: Optional[Settings] = None, tol: Optional[float] = None) -> float:
    """Massa do estado S n de dois corpos com cinemática SR (inclui 2m)."""
    return SalpeterSolver(settings).solve(m, potential, n, tol)


def critical_bisection(shape: BasePotential, m: float = 1.0, l: int = 0, n: int = 0, settings: Optional[Settings] = None) -> float:
    """Acoplamento crítico exato de dois corpos NR para a forma dada."""
    return NumerovSolver(settings).critical_coupling(shape, m, l, n)


def system_oracle(system: SystemSpec, n: int = 0, l: int = 0, settings: Optional[Settings] = None) -> float:
    """Oráculo adequado à cinemática do sistema (NR: Numerov; SR/UR: DVR, só l = 0)."""
    kin = system.kinematics
    if isinstance(kin, NonRelativistic):
        return nr_eigenvalue(RadialProblem.from_system(system, n, l), settings)
    if system.n_particles != 2 or l != 0:
        raise SpecValidationError("o oráculo SR só trata N = 2 em onda S")
    mass = kin.m if isinstance(kin, SemiRelativistic) else 0.0
    return sr_eigenvalue_swave(mass, system.reduced().two_body, n, settings)
