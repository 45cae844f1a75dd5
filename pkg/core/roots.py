"""
Busca de raízes por varredura log-espaçada seguida de refinamento com brentq.

Usado pelo solver AFM (r0) e pelas constantes críticas (y0).
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np
from scipy.optimize import brentq

from core.errors import NonConvergenceError

# menor rtol aceito por scipy.optimize.brentq
BRENTQ_RTOL = 4.0 * np.finfo(float).eps

logger = logging.getLogger(__name__)

Bracket = Tuple[float, float]


@dataclass
class ScanResult:
    """Intervalos onde a função troca de sinal, separados por direção."""

    down: List[Bracket] = field(default_factory=list)  # + para -
    up: List[Bracket] = field(default_factory=list)  # - para +


def log_grid(lo: float, hi: float, points_per_decade: int, minimum: int) -> np.ndarray:
    decades = np.log10(hi / lo)
    count = max(minimum, int(np.ceil(points_per_decade * decades)) + 1)
    return np.geomspace(lo, hi, count)


def scan_sign_changes(func: Callable[[float], float], grid: np.ndarray) -> ScanResult:
    """
    Avalia func na malha e devolve os intervalos com troca de sinal.
    Pontos com valor não finito são descartados.
    """
    values = np.array([func(float(x)) for x in grid], dtype=float)
    finite = np.isfinite(values)
    xs, ys = grid[finite], values[finite]
    if not finite.all():
        logger.debug(f"{int((~finite).sum())} pontos não finitos descartados na varredura")

    result = ScanResult()
    for i in range(len(xs) - 1):
        a, b = ys[i], ys[i + 1]
        if a > 0.0 and b <= 0.0:
            result.down.append((float(xs[i]), float(xs[i + 1])))
        elif a < 0.0 and b >= 0.0:
            result.up.append((float(xs[i]), float(xs[i + 1])))
    return result


def refine_root(func: Callable[[float], float], bracket: Bracket, xtol: float, rtol: float) -> float:
    """Refina a raiz dentro do intervalo com brentq."""
    a, b = bracket
    try:
        root, info = brentq(func, a, b, xtol=xtol * a, rtol=max(rtol, BRENTQ_RTOL), maxiter=200, full_output=True)
    except (ValueError, RuntimeError) as e:
        raise NonConvergenceError(f"refinamento da raiz falhou em [{a:.6g}, {b:.6g}]: {e}") from e
    if not info.converged:
        raise NonConvergenceError(f"brentq não convergiu em [{a:.6g}, {b:.6g}] ({info.flag})")
    return float(root)
