"""
Potenciais - Catálogo de interações com derivadas analíticas

Cada forma é um modelo pydantic imutável, discriminado pelo campo "form" no
JSON. Todas as avaliações são vetorizadas com numpy e aceitam escalares ou
arrays de distâncias x > 0.

Formas do catálogo (o sinal de cada uma segue a convenção física usual):
    powerlaw       sgn(lam) * a * x**lam
    sum_powerlaws  soma de c_i * x**lam_i
    coulomb        -g / x
    linear         a * x
    harmonic       a * x**2
    yukawa         -g * exp(-beta x) / x
    exponential    -g * exp(-beta x)
    logarithmic    a * ln(b x)
    sqrt           a * sqrt(x**2 + b**2)
    funnel         a * x - b / x
    tabulated      spline cúbico sobre pontos (x, y)
    custom         função registrada com register_potential
"""

import logging
import threading
from dataclasses import dataclass
from typing import Annotated, Callable, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, TypeAdapter, field_validator, model_validator
from scipy.interpolate import CubicSpline

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def _as_array(x: ArrayLike) -> np.ndarray:
    return np.asarray(x, dtype=float)


class BasePotential(BaseModel):
    """
    Interface comum dos potenciais.

    Subclasses implementam value, deriv e deriv2, informam se o potencial
    se anula no infinito (short_range) e sugerem comprimentos naturais.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    def value(self, x: ArrayLike) -> ArrayLike:
        raise NotImplementedError

    def deriv(self, x: ArrayLike) -> ArrayLike:
        raise NotImplementedError

    def deriv2(self, x: ArrayLike) -> ArrayLike:
        raise NotImplementedError

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return self.value(x)

    @property
    def short_range(self) -> bool:
        return False

    @property
    def reduced_precision(self) -> bool:
        return False

    def length_scales(self, mass: Optional[float] = None) -> List[float]:
        """
        Comprimentos característicos do potencial.

        Args:
            mass: massa cinética (termo p²/2m). None ou 0 para cinemática
                ultrarrelativística, onde só os parâmetros do potencial contam.

        Returns:
            List[float]: comprimentos positivos (pode ser vazia).
        """
        return []


def _power_scale(strength: float, lam: float, mass: Optional[float]) -> List[float]:
    # Equilíbrio entre energia cinética e strength * x**lam
    strength = abs(strength)
    if strength == 0.0:
        return []
    if mass:
        if lam + 2.0 <= 0.0:
            return []
        return [(1.0 / (mass * strength)) ** (1.0 / (lam + 2.0))]
    if lam + 1.0 <= 0.0:
        return []
    return [strength ** (-1.0 / (lam + 1.0))]


class PowerLaw(BasePotential):
    form: Literal["powerlaw"] = "powerlaw"
    a: float
    lam: float

    @field_validator("lam")
    @classmethod
    def _nonzero_exponent(cls, lam: float) -> float:
        if lam == 0.0:
            raise ValueError("lam = 0 não define uma lei de potência; use logarithmic")
        return lam

    @property
    def _sign(self) -> float:
        return 1.0 if self.lam > 0 else -1.0

    def value(self, x):
        return self._sign * self.a * _as_array(x) ** self.lam

    def deriv(self, x):
        return self._sign * self.a * self.lam * _as_array(x) ** (self.lam - 1.0)

    def deriv2(self, x):
        return self._sign * self.a * self.lam * (self.lam - 1.0) * _as_array(x) ** (self.lam - 2.0)

    @property
    def short_range(self) -> bool:
        return self.lam < 0

    def length_scales(self, mass=None):
        return _power_scale(self.a, self.lam, mass)


class PowerTerm(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    coefficient: float
    lam: float


class SumOfPowerLaws(BasePotential):
    """Soma de termos c * x**lam, com os sinais dados pelos próprios coeficientes."""

    form: Literal["sum_powerlaws"] = "sum_powerlaws"
    terms: List[PowerTerm] = Field(min_length=1)

    def value(self, x):
        x = _as_array(x)
        return sum(t.coefficient * x ** t.lam for t in self.terms)

    def deriv(self, x):
        x = _as_array(x)
        return sum(t.coefficient * t.lam * x ** (t.lam - 1.0) for t in self.terms)

    def deriv2(self, x):
        x = _as_array(x)
        return sum(t.coefficient * t.lam * (t.lam - 1.0) * x ** (t.lam - 2.0) for t in self.terms)

    @property
    def short_range(self) -> bool:
        return all(t.lam < 0 for t in self.terms if t.coefficient != 0.0)

    def length_scales(self, mass=None):
        scales = []
        for t in self.terms:
            if t.lam != 0.0:
                scales.extend(_power_scale(t.coefficient, t.lam, mass))
        return scales


class Coulomb(BasePotential):
    form: Literal["coulomb"] = "coulomb"
    g: float

    def value(self, x):
        return -self.g / _as_array(x)

    def deriv(self, x):
        return self.g / _as_array(x) ** 2

    def deriv2(self, x):
        return -2.0 * self.g / _as_array(x) ** 3

    @property
    def short_range(self) -> bool:
        return True

    def length_scales(self, mass=None):
        return _power_scale(self.g, -1.0, mass)


class Linear(BasePotential):
    form: Literal["linear"] = "linear"
    a: float

    def value(self, x):
        return self.a * _as_array(x)

    def deriv(self, x):
        return self.a * np.ones_like(_as_array(x))

    def deriv2(self, x):
        return np.zeros_like(_as_array(x))

    def length_scales(self, mass=None):
        return _power_scale(self.a, 1.0, mass)


class Harmonic(BasePotential):
    form: Literal["harmonic"] = "harmonic"
    a: float

    def value(self, x):
        return self.a * _as_array(x) ** 2

    def deriv(self, x):
        return 2.0 * self.a * _as_array(x)

    def deriv2(self, x):
        return 2.0 * self.a * np.ones_like(_as_array(x))

    def length_scales(self, mass=None):
        return _power_scale(self.a, 2.0, mass)


class Yukawa(BasePotential):
    form: Literal["yukawa"] = "yukawa"
    g: float
    beta: float = Field(gt=0)

    def value(self, x):
        x = _as_array(x)
        return -self.g * np.exp(-self.beta * x) / x

    def deriv(self, x):
        x = _as_array(x)
        return self.g * np.exp(-self.beta * x) * (self.beta * x + 1.0) / x ** 2

    def deriv2(self, x):
        x = _as_array(x)
        bx = self.beta * x
        return -self.g * np.exp(-bx) * (bx * bx + 2.0 * bx + 2.0) / x ** 3

    @property
    def short_range(self) -> bool:
        return True

    def length_scales(self, mass=None):
        return [1.0 / self.beta] + _power_scale(self.g, -1.0, mass)


class Exponential(BasePotential):
    form: Literal["exponential"] = "exponential"
    g: float
    beta: float = Field(gt=0)

    def value(self, x):
        return -self.g * np.exp(-self.beta * _as_array(x))

    def deriv(self, x):
        return self.g * self.beta * np.exp(-self.beta * _as_array(x))

    def deriv2(self, x):
        return -self.g * self.beta ** 2 * np.exp(-self.beta * _as_array(x))

    @property
    def short_range(self) -> bool:
        return True

    def length_scales(self, mass=None):
        return [1.0 / self.beta]


class Logarithmic(BasePotential):
    form: Literal["logarithmic"] = "logarithmic"
    a: float
    b: float = Field(gt=0)

    def value(self, x):
        return self.a * np.log(self.b * _as_array(x))

    def deriv(self, x):
        return self.a / _as_array(x)

    def deriv2(self, x):
        return -self.a / _as_array(x) ** 2

    def length_scales(self, mass=None):
        scales = [1.0 / self.b]
        if self.a != 0.0:
            scales.append((1.0 / (mass * abs(self.a))) ** 0.5 if mass else 1.0 / abs(self.a))
        return scales


class SquareRoot(BasePotential):
    form: Literal["sqrt"] = "sqrt"
    a: float
    b: float = Field(ge=0)

    def value(self, x):
        x = _as_array(x)
        return self.a * np.sqrt(x * x + self.b ** 2)

    def deriv(self, x):
        x = _as_array(x)
        return self.a * x / np.sqrt(x * x + self.b ** 2)

    def deriv2(self, x):
        x = _as_array(x)
        return self.a * self.b ** 2 / (x * x + self.b ** 2) ** 1.5

    def length_scales(self, mass=None):
        scales = [self.b] if self.b > 0 else []
        return scales + _power_scale(self.a, 1.0, mass)


class Funnel(BasePotential):
    form: Literal["funnel"] = "funnel"
    a: float
    b: float

    def value(self, x):
        x = _as_array(x)
        return self.a * x - self.b / x

    def deriv(self, x):
        x = _as_array(x)
        return self.a + self.b / x ** 2

    def deriv2(self, x):
        return -2.0 * self.b / _as_array(x) ** 3

    def length_scales(self, mass=None):
        return _power_scale(self.a, 1.0, mass) + _power_scale(self.b, -1.0, mass)


class Tabulated(BasePotential):
    """Potencial tabelado, interpolado por spline cúbico (extrapolado fora da tabela)."""

    form: Literal["tabulated"] = "tabulated"
    x: List[float] = Field(min_length=4)
    y: List[float] = Field(min_length=4)
    vanishes_at_infinity: bool = False

    _spline: CubicSpline = PrivateAttr()

    @model_validator(mode="after")
    def _check_table(self) -> "Tabulated":
        if len(self.x) != len(self.y):
            raise ValueError("x e y devem ter o mesmo tamanho")
        grid = np.asarray(self.x)
        if grid[0] <= 0 or np.any(np.diff(grid) <= 0):
            raise ValueError("x deve ser positivo e estritamente crescente")
        return self

    def model_post_init(self, __context) -> None:
        self._spline = CubicSpline(np.asarray(self.x), np.asarray(self.y))

    def value(self, x):
        return self._spline(_as_array(x))

    def deriv(self, x):
        return self._spline(_as_array(x), 1)

    def deriv2(self, x):
        return self._spline(_as_array(x), 2)

    @property
    def short_range(self) -> bool:
        return self.vanishes_at_infinity

    def length_scales(self, mass=None):
        return [float(np.sqrt(self.x[0] * self.x[-1]))]


# ---------------------------------------------------------------------------
# Registro de potenciais definidos pelo usuário
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegisteredPotential:
    value: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    deriv2: Callable[[np.ndarray], np.ndarray]
    short_range: bool = False
    length: Optional[float] = None
    reduced_precision: bool = False


_REGISTRY: Dict[str, RegisteredPotential] = {}
_REGISTRY_LOCK = threading.Lock()


def register_potential(
    name: str,
    value: Callable,
    deriv: Callable,
    deriv2: Callable,
    short_range: bool = False,
    length: Optional[float] = None,
    reduced_precision: bool = False,
) -> "Custom":
    """
    Registra um potencial do usuário com derivadas explícitas.

    Args:
        name: nome usado no JSON ({"form": "custom", "name": ...})
        value, deriv, deriv2: funções vetorizadas de x
        short_range: True se o potencial se anula no infinito
        length: comprimento característico (opcional)

    Returns:
        Custom: potencial pronto para uso.
    """
    entry = RegisteredPotential(value, deriv, deriv2, short_range, length, reduced_precision)
    with _REGISTRY_LOCK:
        if name in _REGISTRY:
            logger.warning(f"Potencial '{name}' já registrado; substituindo")
        _REGISTRY[name] = entry
    logger.debug(f"Potencial customizado registrado: {name}")
    return Custom(name=name)


def finite_difference_potential(
    name: str,
    value: Callable,
    short_range: bool = False,
    length: Optional[float] = None,
    step: float = 1e-4,
) -> "Custom":
    """
    Registra um potencial que só fornece o valor; as derivadas saem de
    diferenças centrais com passo relativo `step`. O resultado é marcado
    com reduced_precision=True.
    """

    def _h(x):
        return step * np.maximum(np.abs(x), 1e-12)

    def deriv(x):
        x = _as_array(x)
        h = _h(x)
        return (value(x + h) - value(x - h)) / (2.0 * h)

    def deriv2(x):
        x = _as_array(x)
        h = _h(x)
        return (value(x + h) - 2.0 * value(x) + value(x - h)) / (h * h)

    return register_potential(name, value, deriv, deriv2, short_range, length, reduced_precision=True)


def registered_names() -> List[str]:
    return sorted(_REGISTRY)


class Custom(BasePotential):
    form: Literal["custom"] = "custom"
    name: str
    length: Optional[float] = Field(None, gt=0)

    @field_validator("name")
    @classmethod
    def _must_be_registered(cls, name: str) -> str:
        if name not in _REGISTRY:
            raise ValueError(f"potencial customizado não registrado: {name}")
        return name

    @property
    def _entry(self) -> RegisteredPotential:
        return _REGISTRY[self.name]

    def value(self, x):
        return self._entry.value(_as_array(x))

    def deriv(self, x):
        return self._entry.deriv(_as_array(x))

    def deriv2(self, x):
        return self._entry.deriv2(_as_array(x))

    @property
    def short_range(self) -> bool:
        return self._entry.short_range

    @property
    def reduced_precision(self) -> bool:
        return self._entry.reduced_precision

    def length_scales(self, mass=None):
        length = self.length or self._entry.length
        return [length] if length else []


# ---------------------------------------------------------------------------
# Composições internas (não fazem parte do contrato JSON)
# ---------------------------------------------------------------------------

class ScaledPotential(BasePotential):
    """s * V(c * x)."""

    form: Literal["scaled"] = "scaled"
    base: BasePotential
    scale: float = 1.0
    stretch: float = Field(1.0, gt=0)

    def value(self, x):
        return self.scale * self.base.value(self.stretch * _as_array(x))

    def deriv(self, x):
        return self.scale * self.stretch * self.base.deriv(self.stretch * _as_array(x))

    def deriv2(self, x):
        return self.scale * self.stretch ** 2 * self.base.deriv2(self.stretch * _as_array(x))

    @property
    def short_range(self) -> bool:
        return self.base.short_range

    @property
    def reduced_precision(self) -> bool:
        return self.base.reduced_precision

    def length_scales(self, mass=None):
        # Massa efetiva vista pelo potencial base após a mudança x -> c x
        inner_mass = mass / self.stretch ** 2 if mass else mass
        return [length / self.stretch for length in self.base.length_scales(inner_mass)]


class PotentialSum(BasePotential):
    form: Literal["sum"] = "sum"
    terms: Tuple[BasePotential, ...] = Field(min_length=1)

    def value(self, x):
        return sum(t.value(x) for t in self.terms)

    def deriv(self, x):
        return sum(t.deriv(x) for t in self.terms)

    def deriv2(self, x):
        return sum(t.deriv2(x) for t in self.terms)

    @property
    def short_range(self) -> bool:
        return all(t.short_range for t in self.terms)

    @property
    def reduced_precision(self) -> bool:
        return any(t.reduced_precision for t in self.terms)

    def length_scales(self, mass=None):
        scales = []
        for t in self.terms:
            scales.extend(t.length_scales(mass))
        return scales


def scaled(pot: Optional[BasePotential], scale: float = 1.0, stretch: float = 1.0) -> Optional[BasePotential]:
    """Atalho para s * V(c x); devolve None se pot for None ou s = 0."""
    if pot is None or scale == 0.0:
        return None
    if scale == 1.0 and stretch == 1.0:
        return pot
    return ScaledPotential(base=pot, scale=scale, stretch=stretch)


def combine(*pots: Optional[BasePotential]) -> Optional[BasePotential]:
    """Soma dos potenciais presentes (ignora None)."""
    present = tuple(p for p in pots if p is not None)
    if not present:
        return None
    if len(present) == 1:
        return present[0]
    return PotentialSum(terms=present)


Potential = Annotated[
    Union[
        PowerLaw,
        SumOfPowerLaws,
        Coulomb,
        Linear,
        Harmonic,
        Yukawa,
        Exponential,
        Logarithmic,
        SquareRoot,
        Funnel,
        Tabulated,
        Custom,
    ],
    Field(discriminator="form"),
]

_potential_adapter = TypeAdapter(Potential)


def parse_potential(data: Union[dict, str]) -> BasePotential:
    """Valida um potencial a partir de um dict ou de uma string JSON."""
    if isinstance(data, str):
        return _potential_adapter.validate_json(data)
    return _potential_adapter.validate_python(data)


def natural_length(pot: BasePotential, mass: Optional[float] = None) -> Tuple[float, float]:
    """Menor e maior comprimento característico; (1, 1) quando o potencial não tem escala."""
    scales = [s for s in pot.length_scales(mass) if np.isfinite(s) and s > 0]
    if not scales:
        return 1.0, 1.0
    return min(scales), max(scales)
