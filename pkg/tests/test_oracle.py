import itertools
import math

import pytest

from core.errors import NoBoundStateError, SpecValidationError
from core.model import NonRelativistic, SemiRelativistic, SystemSpec
from core.oracle import NumerovSolver, RadialProblem, expectation, nr_eigenvalue, sr_eigenvalue_swave, system_oracle
from core.potentials import Coulomb, Harmonic, Linear, Yukawa
from core.qnum import airy_zero

pytestmark = pytest.mark.slow


@pytest.mark.parametrize("n, l", list(itertools.product(range(4), range(4))))
def test_coulomb_levels(settings, n, l):
    value = nr_eigenvalue(RadialProblem.two_body(Coulomb(g=1.0), 1.0, n, l), settings)
    assert value == pytest.approx(2.0 - 0.25 / (n + l + 1) ** 2, abs=1e-7)


@pytest.mark.parametrize("n, l", list(itertools.product(range(4), range(4))))
def test_harmonic_levels(settings, n, l):
    value = nr_eigenvalue(RadialProblem.two_body(Harmonic(a=0.5), 1.0, n, l), settings)
    assert value == pytest.approx(2.0 + math.sqrt(2.0) * (2 * n + l + 1.5), rel=1e-7)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_linear_s_wave_levels(settings, n):
    value = nr_eigenvalue(RadialProblem.two_body(Linear(a=1.0), 1.0, n, 0), settings)
    assert value == pytest.approx(2.0 - airy_zero(n), abs=1e-7)


def test_expectation_of_r_squared_in_oscillator(settings):
    # <r²> = 3 / (2 mu omega) com mu = 1/2 e omega = sqrt(2)
    prob = RadialProblem.two_body(Harmonic(a=0.5), 1.0)
    assert expectation(prob, lambda r: r * r, settings) == pytest.approx(3.0 / math.sqrt(2.0), rel=1e-6)


@pytest.mark.parametrize("g", [1.0, 2.5])
def test_hydrogenic_mean_distance(settings, g):
    # <r> = 3 / (2 mu g) no estado fundamental, mu = 1/2
    prob = RadialProblem.two_body(Coulomb(g=g), 1.0)
    assert expectation(prob, lambda r: r, settings) == pytest.approx(3.0 / g, rel=1e-6)


def test_bound_state_count_for_yukawa(settings):
    solver = NumerovSolver(settings)
    assert solver.bound_state_count(Yukawa(g=1.0, beta=1.0), 0.5, 0) == 0
    assert solver.bound_state_count(Yukawa(g=2.0, beta=1.0), 0.5, 0) == 1


def test_missing_bound_state(settings):
    with pytest.raises(NoBoundStateError):
        nr_eigenvalue(RadialProblem.two_body(Yukawa(g=1.0, beta=1.0), 1.0), settings)


def test_afm_brackets_exact_levels(settings, solver):
    system = SystemSpec(N=2, kinematics=NonRelativistic(m=1.0), two_body=Linear(a=1.0))
    exact = system_oracle(system, 1, 1, settings)
    pair = solver.bound_pair(system, 1, 1)
    assert pair.coulomb.M0 <= exact <= pair.quadratic.M0


def test_salpeter_massless_linear_below_afm(settings, solver):
    system = SystemSpec(N=2, kinematics=SemiRelativistic(m=0.0), two_body=Linear(a=1.0))
    afm = solver.solve(system).M0
    exact = sr_eigenvalue_swave(0.0, Linear(a=1.0), 0, settings)
    assert exact <= afm
    assert exact == pytest.approx(afm, rel=0.1)


def test_salpeter_approaches_nonrelativistic_limit(settings):
    m = 20.0
    sr = sr_eigenvalue_swave(m, Linear(a=1.0), 0, settings) - 2 * m
    nr = (1.0 / m) ** (1.0 / 3.0) * -airy_zero(0)
    assert sr == pytest.approx(nr, rel=2e-2)
    assert sr < nr


def test_system_oracle_limits(settings):
    three = SystemSpec(N=3, kinematics=NonRelativistic(m=1.0), two_body=Linear(a=1.0))
    with pytest.raises(SpecValidationError):
        system_oracle(three)
    sr = SystemSpec(N=2, kinematics=SemiRelativistic(m=1.0), two_body=Linear(a=1.0))
    with pytest.raises(SpecValidationError):
        system_oracle(sr, 0, 1)
