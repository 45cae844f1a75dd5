"""
CLI do solver AFM

Uso:
    python cli.py solve --input data/exemplos/coulomb.json --format json
    python cli.py spectrum --input data/exemplos/harmonic_n3.json --sweep n=0..3,l=0..3 --format csv
    python cli.py critical --shape yukawa --beta 1 --m 1 --N 2..6 --gs
    python cli.py perturb --input data/exemplos/coulomb.json
    python cli.py verify --suite bounds
    python cli.py observables --input data/exemplos/harmonic_n3.json

Códigos de saída: 0 sucesso, 1 entrada inválida, 2 falha do solver,
3 violações encontradas por verify.
"""

import argparse
import json
import logging
import re
import sys
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, ValidationError

from core.afm import AFMSolver, observables
from core.config import get_settings
from core.critical import BodyType, critical_one_body, critical_table, critical_two_body, tangency_point
from core.errors import AFMError, SolverError, SpecValidationError, error_payload
from core.model import AuxiliaryForm
from core.perturb import compare_with_mean_value, first_order
from core.potentials import BasePotential, Coulomb, Exponential, Yukawa
from core.problem import ProblemSpec, load_problem
from core.qnum import QuantumSpec
from funcoes.relatorio import CRITICAL_COLUMNS, SPECTRUM_COLUMNS, render, write_gnuplot
from funcoes.verificacao import VerificationRunner, format_reports

logger = logging.getLogger("cli")

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_VIOLATIONS = 0, 1, 2, 3


class RunConfig(BaseModel):
    """Argumentos da linha de comando já validados."""

    model_config = ConfigDict(frozen=True)

    command: str
    input: Optional[str] = None
    format: str = "table"
    tol: Optional[float] = None
    sweep: Dict[str, List[int]] = {}
    sizes: Optional[List[int]] = None
    aux: Optional[AuxiliaryForm] = None
    modifier: Optional[Tuple[float, float, float]] = None
    shape: str = "yukawa"
    beta: float = 1.0
    m: float = 1.0
    q: Optional[float] = None
    body: BodyType = BodyType.TWO_BODY
    suite: str = "all"
    workers: int = 1
    gnuplot: Optional[str] = None
    error_json: bool = False
    lower_bound: bool = False
    mean_value: bool = False


def parse_range(text: str) -> List[int]:
    """'0..3' -> [0, 1, 2, 3]; '1,4' -> [1, 4]; '2' -> [2]."""
    values: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            start, stop = part.split("..", 1)
            values.extend(range(int(start), int(stop) + 1))
        elif part:
            values.append(int(part))
    if not values:
        raise ValueError(f"intervalo vazio: '{text}'")
    return values


def parse_sweep(text: str) -> Dict[str, List[int]]:
    """'n=0..3,l=0..2' -> {'n': [0..3], 'l': [0..2]}."""
    sweep = {}
    for item in re.split(r",(?=\s*[A-Za-z]+\s*=)", text):
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in ("n", "l"):
            raise ValueError(f"variável de varredura desconhecida: '{key}'")
        sweep[key] = parse_range(value)
    return sweep


def parse_modifier(text: str) -> Tuple[float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError("--modifier exige três valores: alpha,beta,gamma")
    return parts[0], parts[1], parts[2]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Solver AFM para hamiltonianos de N corpos")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=None, help="Nível de log (DEBUG, INFO, WARNING, ...); padrão AFM_CLI_LOG_LEVEL")
    common.add_argument("--error-json", action="store_true", help="Emite erros como JSON em stdout")
    common.add_argument("--input", type=str, help="Arquivo JSON do problema")
    common.add_argument("--format", choices=["table", "csv", "json"], default="table", help="Formato de saída")
    common.add_argument("--tol", type=float, help="Tolerância dos oráculos")
    common.add_argument("--aux", choices=[a.value for a in AuxiliaryForm], help="Forma auxiliar")
    common.add_argument("--modifier", type=str, help="Modificador alpha,beta,gamma de Q")
    common.add_argument("--workers", type=int, default=1, help="Threads para varreduras")
    common.add_argument("--gnuplot", type=str, help="Grava arquivo de duas colunas para gnuplot")

    solve = sub.add_parser("solve", parents=[common], help="Resolve um estado")
    solve.add_argument("--lower-bound", action="store_true", help="Também calcula o limite inferior do estado fundamental")

    spectrum = sub.add_parser("spectrum", parents=[common], help="Varre números quânticos")
    spectrum.add_argument("--sweep", type=str, default="n=0..3,l=0..3", help="Ex.: n=0..3,l=0..3")
    spectrum.add_argument("--N", dest="sizes", type=str, help="Intervalo de N, ex.: 2..6")

    critical = sub.add_parser("critical", parents=[common], help="Constantes críticas")
    critical.add_argument("--shape", choices=["yukawa", "exponential", "coulomb"], default="yukawa")
    critical.add_argument("--beta", type=float, default=1.0)
    critical.add_argument("--m", type=float, default=1.0)
    critical.add_argument("--N", dest="sizes", type=str, default="2..6")
    critical.add_argument("--gs", action="store_true", help="Estado fundamental, Q = 3(N-1)/2 (padrão)")
    critical.add_argument("--q", type=float, help="Q fixo para estados excitados")
    critical.add_argument("--body", choices=["two", "one"], default="two")

    perturb = sub.add_parser("perturb", parents=[common], help="Correção de primeira ordem")
    perturb.add_argument("--mean-value", action="store_true", help="Compara com o valor médio exato")

    verify = sub.add_parser("verify", parents=[common], help="Suítes de verificação")
    verify.add_argument("--suite", choices=["exactness", "bounds", "sr", "critical", "perturb", "all"], default="all")

    sub.add_parser("observables", parents=[common], help="Valores médios <p²>, <s²>, <r_ij²>")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data = {
        "command": args.command,
        "input": args.input,
        "format": args.format,
        "tol": args.tol,
        "aux": args.aux,
        "workers": args.workers,
        "gnuplot": args.gnuplot,
        "error_json": args.error_json,
    }
    if args.modifier:
        data["modifier"] = parse_modifier(args.modifier)
    if args.command == "spectrum":
        data["sweep"] = parse_sweep(args.sweep)
        if args.sizes:
            data["sizes"] = parse_range(args.sizes)
    if args.command == "critical":
        data.update(shape=args.shape, beta=args.beta, m=args.m, q=args.q, sizes=parse_range(args.sizes))
        data["body"] = BodyType.TWO_BODY if args.body == "two" else BodyType.ONE_BODY
    if args.command == "verify":
        data["suite"] = args.suite
    if args.command == "solve":
        data["lower_bound"] = args.lower_bound
    if args.command == "perturb":
        data["mean_value"] = args.mean_value
    return RunConfig(**data)


class Runner:
    """Executa um comando e imprime o relatório."""

    def __init__(self, config: RunConfig):
        self.config = config
        settings = get_settings()
        if config.tol is not None:
            settings = settings.with_overrides(oracle_tol=config.tol, sr_tol=config.tol, critical_tol=config.tol)
        self.settings = settings
        self.solver = AFMSolver(settings)

    def _problem(self) -> ProblemSpec:
        if not self.config.input:
            raise SpecValidationError(f"o comando {self.config.command} exige --input")
        return load_problem(self.config.input)

    def _quantum(self, problem: ProblemSpec) -> QuantumSpec:
        quantum = problem.quantum
        updates = {}
        if self.config.aux is not None:
            updates["aux"] = self.config.aux
        if self.config.modifier is not None:
            updates["modifier"] = self.config.modifier
        if updates:
            quantum = QuantumSpec.model_validate({**quantum.model_dump(), **updates})
        return quantum

    def _emit(self, data, columns=None) -> None:
        print(render(data, self.config.format, columns))

    def solve(self) -> int:
        problem = self._problem()
        sol = self.solver.solve(problem.system(), self._quantum(problem))
        if self.config.lower_bound:
            bound = self.solver.ground_state_lower_bound(problem.system())
            self._emit({**sol.model_dump(mode="json"), "lower_bound": bound})
        else:
            self._emit(sol)
        return EXIT_OK

    def spectrum(self) -> int:
        problem = self._problem()
        quantum = self._quantum(problem)
        sweep = self.config.sweep or {}
        rows = self.solver.spectrum(
            problem.system(),
            sweep.get("n", [0]),
            sweep.get("l", [0]),
            n_particles=self.config.sizes,
            aux=quantum.aux,
            modifier=quantum.modifier,
            workers=self.config.workers,
        )
        self._emit(rows, SPECTRUM_COLUMNS)
        if self.config.gnuplot:
            write_gnuplot(self.config.gnuplot, [r.Q for r in rows], [r.M0 for r in rows], "Q M0")
        return EXIT_OK

    def _shape(self) -> BasePotential:
        if self.config.input:
            system = self._problem().system()
            shape = system.two_body if self.config.body is BodyType.TWO_BODY else system.one_body
            if shape is None:
                raise SpecValidationError(f"o arquivo não tem potencial de {self.config.body.value}")
            return shape
        beta = self.config.beta
        return {
            "yukawa": lambda: Yukawa(g=1.0, beta=beta),
            "exponential": lambda: Exponential(g=1.0, beta=beta),
            "coulomb": lambda: Coulomb(g=1.0),
        }[self.config.shape]()

    def critical(self) -> int:
        shape = self._shape()
        aux = self.config.aux or AuxiliaryForm.QUADRATIC
        sizes = self.config.sizes or [2]
        if self.config.q is not None:
            compute = critical_two_body if self.config.body is BodyType.TWO_BODY else critical_one_body
            y0 = tangency_point(shape, self.settings)
            rows = [compute(shape, n, self.config.m, q=self.config.q, aux=aux, y0=y0) for n in sizes]
            self._emit(rows, ["N", "Q", "y0", "coupling", "bound_character"])
        else:
            rows = critical_table(shape, sizes, self.config.m, self.config.body, aux)
            self._emit(rows, CRITICAL_COLUMNS)
        if self.config.gnuplot:
            write_gnuplot(self.config.gnuplot, [r.N for r in rows], [r.coupling for r in rows], "N coupling")
        return EXIT_OK

    def perturb(self) -> int:
        problem = self._problem()
        if problem.perturbation is None:
            raise SpecValidationError("o arquivo não tem o campo 'perturbation'")
        system, quantum = problem.system(), self._quantum(problem)
        base = self.solver.solve(system, quantum)
        result = first_order(base, system, problem.perturbation)
        payload = {"M0": base.M0, **result.model_dump(mode="json")}
        if self.config.mean_value:
            payload.update(compare_with_mean_value(base, system, problem.perturbation, quantum).model_dump(mode="json"))
        self._emit(payload)
        return EXIT_OK

    def observables(self) -> int:
        problem = self._problem()
        sol = self.solver.solve(problem.system(), self._quantum(problem))
        self._emit(observables(sol, problem.n_particles))
        return EXIT_OK

    def verify(self) -> int:
        reports = VerificationRunner(self.settings).run(self.config.suite)
        if self.config.format == "table":
            print(format_reports(reports))
        else:
            checks = [c for r in reports for c in r.checks]
            self._emit(checks)
            print(f"violations: {sum(r.violations for r in reports)}", file=sys.stderr)
        return EXIT_VIOLATIONS if any(r.violations for r in reports) else EXIT_OK


def run(config: RunConfig) -> int:
    """
    Executa o comando e devolve o código de saída.

    Args:
        config: configuração da execução

    Returns:
        int: 0, 1, 2 ou 3
    """
    runner = Runner(config)
    try:
        return getattr(runner, config.command)()
    except (SpecValidationError, ValidationError, FileNotFoundError, ValueError) as e:
        return _fail(config, e, EXIT_INVALID)
    except SolverError as e:
        return _fail(config, e, EXIT_SOLVER)
    except AFMError as e:
        return _fail(config, e, EXIT_SOLVER)


def _fail(config: RunConfig, error: Exception, code: int) -> int:
    logger.error(f"Falha em '{config.command}': {error}")
    if config.error_json:
        print(json.dumps(error_payload(error, {"exit_code": code})))
    else:
        print(f"Erro: {error}", file=sys.stderr)
    return code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        level = get_settings().level_for(args.log_level, cli=True)
    except ValueError as e:
        print(f"Erro nos argumentos: {e}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    try:
        config = config_from_args(args)
    except (ValueError, ValidationError) as e:
        print(f"Erro nos argumentos: {e}", file=sys.stderr)
        return EXIT_INVALID
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
