"""
Verificação - Suítes que comparam o AFM com formas fechadas e oráculos

Cada suíte devolve um SuiteReport com uma linha por verificação. Uma
verificação com ok=False conta como violação; a CLI sai com código 3 se
houver alguma.

Suítes:
    exactness  Coulomb N=2 e oscilador harmônico de N corpos em forma fechada
    bounds     AFM(-1/x) <= Numerov <= AFM(x²) para cinco potenciais NR
    sr         limite superior SR (m = 0, potencial linear) contra a DVR
    critical   constantes críticas de Yukawa e exponencial e leis de escala
    perturb    ordem da correção de primeira ordem (razão de Richardson) e valores médios
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field
from scipy.special import jn_zeros

from core.afm import AFMSolver
from core.config import Settings, get_settings
from core.critical import critical_one_body, critical_two_body, gs_scaling_laws
from core.model import AuxiliaryForm, NonRelativistic, ReducedSystem, SemiRelativistic, SystemSpec
from core.oracle import RadialProblem, critical_bisection, nr_eigenvalue, sr_eigenvalue_swave
from core.perturb import PerturbationSpec, PerturbationTerm, compare_with_mean_value, first_order
from core.potentials import (
    BasePotential,
    Coulomb,
    Exponential,
    Funnel,
    Harmonic,
    Linear,
    Logarithmic,
    PowerLaw,
    SquareRoot,
    Yukawa,
    combine,
    scaled,
)
from core.qnum import QuantumSpec

logger = logging.getLogger(__name__)


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    suite: str
    label: str
    value: float
    reference: float
    margin: float
    ok: bool


class SuiteReport(BaseModel):
    suite: str
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(1 for c in self.checks if not c.ok)

    def add(self, label: str, value: float, reference: float, margin: float, ok: bool) -> None:
        self.checks.append(CheckResult(suite=self.suite, label=label, value=value, reference=reference, margin=margin, ok=ok))
        if not ok:
            logger.warning(f"[{self.suite}] violação em {label}: valor={value:.12g} referência={reference:.12g}")


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _nr_pair(potential: BasePotential, m: float = 1.0) -> SystemSpec:
    return SystemSpec(N=2, kinematics=NonRelativistic(m=m), two_body=potential)


BOUND_STATES = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)]


def bound_potentials() -> Dict[str, BasePotential]:
    return {
        "x^0.5": PowerLaw(a=1.0, lam=0.5),
        "linear": Linear(a=1.0),
        "sqrt": SquareRoot(a=1.0, b=1.0),
        "log": Logarithmic(a=1.0, b=1.0),
        "funnel": Funnel(a=1.0, b=0.5),
    }


def perturbation_bases() -> Dict[str, Tuple[BasePotential, QuantumSpec]]:
    # g = 4 deixa r0 = 0.5 e a energia de ligação em 4, longe dos eps usados
    return {
        "coulomb": (Coulomb(g=4.0), QuantumSpec.explicit([(0, 0)], AuxiliaryForm.COULOMB)),
        "harmonic": (Harmonic(a=0.5), QuantumSpec.explicit([(0, 0)])),
    }


class VerificationRunner:
    """Executa as suítes com um solver AFM e configurações compartilhados."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.solver = AFMSolver(self.settings)
        self._suites: Dict[str, Callable[[], SuiteReport]] = {
            "exactness": self.exactness,
            "bounds": self.bounds,
            "sr": self.semirelativistic,
            "critical": self.critical,
            "perturb": self.perturbation,
        }

    @property
    def suite_names(self) -> List[str]:
        return list(self._suites)

    def run(self, name: str) -> List[SuiteReport]:
        if name == "all":
            return [suite() for suite in self._suites.values()]
        if name not in self._suites:
            raise ValueError(f"suíte desconhecida: {name}")
        return [self._suites[name]()]

    # -- suítes ---------------------------------------------------------------

    def exactness(self) -> SuiteReport:
        report = SuiteReport(suite="exactness")
        m, g = 1.0, 1.0
        coulomb = _nr_pair(Coulomb(g=g), m)
        for n in range(4):
            for l in range(4):
                sol = self.solver.solve(coulomb, QuantumSpec.explicit([(n, l)], AuxiliaryForm.COULOMB))
                exact = 2.0 * m - m * g * g / (4.0 * sol.Q ** 2)
                err = _relative(sol.M0, exact)
                report.add(f"coulomb n={n} l={l}", sol.M0, exact, err, err <= 1e-12)

        a = 0.5
        for size in (2, 3, 5):
            system = SystemSpec(N=size, kinematics=NonRelativistic(m=m), two_body=Harmonic(a=a))
            for n in range(4):
                for l in range(4):
                    states = [(n, l)] + [(0, 0)] * (size - 2)
                    sol = self.solver.solve(system, QuantumSpec.explicit(states))
                    exact = size * m + sol.Q * math.sqrt(2.0 * a * size / m)
                    err = _relative(sol.M0, exact)
                    report.add(f"harmonic N={size} n={n} l={l}", sol.M0, exact, err, err <= 1e-12)
        return report

    def bounds(self) -> SuiteReport:
        report = SuiteReport(suite="bounds")
        for name, potential in bound_potentials().items():
            system = _nr_pair(potential)
            for n, l in BOUND_STATES:
                pair = self.solver.bound_pair(system, n, l)
                exact = nr_eigenvalue(RadialProblem.two_body(potential, 1.0, n, l), self.settings)
                slack = self.settings.oracle_tol * (1.0 + abs(exact))
                margin = min(exact - pair.coulomb.M0, pair.quadratic.M0 - exact)
                report.add(f"{name} n={n} l={l}", exact, pair.quadratic.M0, margin, margin >= -slack)
        return report

    def semirelativistic(self) -> SuiteReport:
        report = SuiteReport(suite="sr")
        a = 1.0
        potential = Linear(a=a)
        system = SystemSpec(N=2, kinematics=SemiRelativistic(m=0.0), two_body=potential)
        for n in range(3):
            sol = self.solver.solve(system, QuantumSpec.explicit([(n, 0)]))
            exact = sr_eigenvalue_swave(0.0, potential, n, self.settings)
            report.add(f"linear m=0 n={n}", exact, sol.M0, sol.M0 - exact, sol.M0 >= exact)
        return report

    def critical(self) -> SuiteReport:
        report = SuiteReport(suite="critical")
        beta, m = 1.0, 1.0
        yukawa = Yukawa(g=1.0, beta=beta)

        afm = critical_two_body(yukawa, 2, m, q=1.0, aux=AuxiliaryForm.COULOMB)
        report.add("yukawa g2 = e", afm.coupling, math.e * beta / m, _relative(afm.coupling, math.e), _relative(afm.coupling, math.e) <= 1e-10)
        exact = critical_bisection(yukawa, m, settings=self.settings)
        report.add("yukawa g2 AFM >= exato", afm.coupling, exact, afm.coupling - exact, afm.coupling >= exact)

        exponential = Exponential(g=1.0, beta=beta)
        closed = beta ** 2 * float(jn_zeros(0, 1)[0]) ** 2 / (4.0 * m)
        numeric = critical_bisection(exponential, m, settings=self.settings)
        report.add("exponencial g* = beta² j01²/(4m)", numeric, closed, _relative(numeric, closed), _relative(numeric, closed) <= 1e-4)

        for size in range(2, 11):
            q = 1.5 * (size - 1)
            current = critical_two_body(yukawa, size, m)
            following = critical_two_body(yukawa, size + 1, m)
            formula = 2.0 * math.e * beta * q * q / (size * (size - 1) ** 2 * m)
            report.add(f"yukawa g_{size} fórmula", current.coupling, formula, _relative(current.coupling, formula), _relative(current.coupling, formula) <= 1e-10)
            laws = gs_scaling_laws(size)
            ratio = following.coupling / current.coupling
            report.add(f"g_{size + 1}/g_{size}", ratio, laws.ratio_two_body, abs(ratio - laws.ratio_two_body), abs(ratio - laws.ratio_two_body) <= 1e-12)
            k_ratio = _one_body_ratio(yukawa, size, m)
            report.add(f"k_{size + 1}/k_{size}", k_ratio, laws.ratio_one_body, abs(k_ratio - laws.ratio_one_body), abs(k_ratio - laws.ratio_one_body) <= 1e-12)
        return report

    def perturbation(self) -> SuiteReport:
        report = SuiteReport(suite="perturb")
        additions = {"r": Linear(a=1.0), "r^2": Harmonic(a=1.0), "exp(-r)": Exponential(g=-1.0, beta=1.0)}
        for base_name, (potential, quantum) in perturbation_bases().items():
            system = _nr_pair(potential)
            base = self.solver.solve(system, quantum)
            for add_name, addition in additions.items():
                for eps in (1e-2, 1e-3):
                    ratio = self.richardson_ratio(system, base, quantum, addition, eps)
                    report.add(f"{base_name} + eps {add_name} eps={eps:g}", ratio, 4.0, abs(ratio - 4.0), 3.5 <= ratio <= 4.5)
                term = PerturbationSpec(eps_term=PerturbationTerm(coupling=1e-2, function=addition))
                mean = compare_with_mean_value(base, system, term, quantum)
                # Só o oscilador com r² é exato; os demais pares são informativos
                exact = base_name == "harmonic" and add_name == "r^2"
                ok = mean.relative_difference <= 1e-6 if exact else True
                report.add(f"valor médio {base_name} + eps {add_name}", mean.afm_shift, mean.mean_value_shift, mean.relative_difference, ok)
        return report

    def richardson_ratio(self, system: SystemSpec, base, quantum: QuantumSpec, addition: BasePotential, eps: float) -> float:
        """d(eps)/d(eps/2) com d = |M1 direto - M1 de primeira ordem|."""
        defects = []
        for coupling in (eps, 0.5 * eps):
            pert = PerturbationSpec(eps_term=PerturbationTerm(coupling=coupling, function=addition))
            first = first_order(base, system, pert).M1
            reduced = system.reduced()
            perturbed = ReducedSystem(2, reduced.kinematics, None, combine(reduced.two_body, scaled(addition, coupling)))
            direct = self.solver.solve(perturbed, quantum).M0
            defects.append(abs(direct - first))
        return defects[0] / defects[1]


def _one_body_ratio(shape: BasePotential, size: int, m: float) -> float:
    return critical_one_body(shape, size + 1, m).coupling / critical_one_body(shape, size, m).coupling


def format_reports(reports: List[SuiteReport]) -> str:
    """Texto para o terminal: uma linha por verificação e o total de violações."""
    lines = []
    for report in reports:
        lines.append(f"== {report.suite} ({len(report.checks)} verificações)")
        for check in report.checks:
            flag = "ok " if check.ok else "FAIL"
            lines.append(f"  [{flag}] {check.label}: {check.value:.12g} | ref {check.reference:.12g} | margem {check.margin:.3g}")
    total = sum(r.violations for r in reports)
    lines.append(f"violations: {total}")
    return "\n".join(lines)
