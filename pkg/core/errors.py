"""
Erros do AFM - Hierarquia de exceções do solver

Dois ramos: erros de validação (a entrada não descreve um problema válido,
código de saída 1 na CLI) e erros do solver (o problema é válido mas o método
numérico não chegou a uma resposta, código de saída 2).
"""

from typing import List, Optional, Tuple


class AFMError(Exception):
    """Raiz de todos os erros do pacote."""


class SpecValidationError(AFMError, ValueError):
    """Especificação inválida ou fora do domínio do método."""


class NonrelZeroMassError(SpecValidationError):
    """Cinemática não relativística com massa nula."""


class UnsupportedAuxiliaryError(SpecValidationError):
    """Forma auxiliar não permitida para este sistema."""


class CoulombAuxManyBodyError(UnsupportedAuxiliaryError):
    """Potencial auxiliar -1/x pedido para N >= 3."""


class NonSWaveError(SpecValidationError):
    """Forma auxiliar linear só vale para ondas S (l = 0)."""


class OutOfTableRangeError(SpecValidationError):
    """Índice fora da tabela de zeros de Airy."""


class DegenerateTangentError(SpecValidationError):
    """P'(x*) = 0: não existe potencial auxiliar tangente."""


class NotShortRangeError(SpecValidationError):
    """O potencial não se anula no infinito."""


class NotLowerBoundableError(SpecValidationError):
    """Os potenciais não admitem envelope inferior para o limite do estado fundamental."""


class OracleUnavailableError(SpecValidationError):
    """Não existe oráculo exato para o sistema pedido."""


class SolverError(AFMError, RuntimeError):
    """O problema é válido mas o solver não produziu uma resposta."""


class NoRootError(SolverError):
    """A equação do virial não muda de sinal no intervalo varrido."""


class MultipleRootsError(SolverError):
    """Mais de uma solução AFM; nenhuma é escolhida."""

    def __init__(self, message: str, brackets: List[Tuple[float, float]]):
        super().__init__(message)
        self.brackets = list(brackets)


class NonConvergenceError(SolverError):
    """O refinamento da raiz não convergiu."""


class ZeroDenominatorError(SolverError):
    """Curvatura degenerada no cálculo de delta."""


class NoTangencyError(SolverError):
    """2w + x w' não tem raiz positiva."""


class NotConvergedError(SolverError):
    """O oráculo não convergiu dentro da tolerância."""


class NoBoundStateError(SolverError):
    """O potencial não tem o estado ligado pedido."""


def error_payload(error: Exception, extra: Optional[dict] = None) -> dict:
    """Converte uma exceção no dicionário de resposta usado pela CLI e pela API."""
    payload = {
        "success": False,
        "error": str(error),
        "kind": type(error).__name__,
    }
    if isinstance(error, MultipleRootsError):
        payload["brackets"] = [list(b) for b in error.brackets]
    if extra:
        payload.update(extra)
    return payload
