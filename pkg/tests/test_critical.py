import math

import pytest
from scipy.special import jn_zeros

from core.critical import (
    BodyType,
    critical_for_system,
    critical_one_body,
    critical_table,
    critical_two_body,
    gs_scaling_laws,
    tangency_point,
)
from core.errors import NoRootError, NoTangencyError, NonrelZeroMassError, NotShortRangeError, SpecValidationError
from core.model import AuxiliaryForm, BoundCharacter, NonRelativistic, SemiRelativistic, SystemSpec
from core.oracle import critical_bisection
from core.potentials import Coulomb, Exponential, Linear, Yukawa, scaled


@pytest.mark.parametrize("beta", [0.5, 1.0, 3.0])
def test_tangency_points(beta):
    assert tangency_point(Yukawa(g=1.0, beta=beta)) == pytest.approx(1.0 / beta, rel=1e-12)
    assert tangency_point(Exponential(g=1.0, beta=beta)) == pytest.approx(2.0 / beta, rel=1e-12)


def test_tangency_needs_short_range():
    with pytest.raises(NotShortRangeError):
        tangency_point(Linear(a=1.0))


def test_coulomb_has_no_tangency():
    with pytest.raises(NoTangencyError):
        tangency_point(Coulomb(g=1.0))


def test_yukawa_pair_with_coulomb_form_gives_e():
    result = critical_two_body(Yukawa(g=1.0, beta=1.0), 2, 1.0, q=1.0, aux=AuxiliaryForm.COULOMB)
    assert result.coupling == pytest.approx(math.e, rel=1e-12)
    assert result.y0 == pytest.approx(1.0)
    assert result.bound_character is BoundCharacter.UPPER
    assert result.body_type is BodyType.TWO_BODY


@pytest.mark.parametrize("size", range(2, 11))
def test_yukawa_ground_state_formula(size):
    beta, m = 2.0, 1.5
    q = 1.5 * (size - 1)
    result = critical_two_body(Yukawa(g=1.0, beta=beta), size, m)
    assert result.Q == pytest.approx(q)
    assert result.coupling == pytest.approx(2.0 * math.e * beta * q * q / (size * (size - 1) ** 2 * m), rel=1e-12)


@pytest.mark.parametrize("size", range(2, 11))
def test_scaling_laws_hold_exactly(size):
    shape = Exponential(g=1.0, beta=1.0)
    laws = gs_scaling_laws(size)
    g = lambda n: critical_two_body(shape, n).coupling  # noqa: E731
    k = lambda n: critical_one_body(shape, n).coupling  # noqa: E731
    assert g(size + 1) / g(size) == pytest.approx(laws.ratio_two_body, rel=1e-12)
    assert g(size) / g(2) == pytest.approx(laws.gn_vs_g2, rel=1e-12)
    assert k(size + 1) / k(size) == pytest.approx(laws.ratio_one_body, rel=1e-12)
    assert k(size) / k(2) == pytest.approx(laws.kn_vs_k2, rel=1e-12)


def test_large_n_limits():
    laws = gs_scaling_laws(10_000)
    assert laws.ratio_two_body == pytest.approx(1.0, abs=2e-4)
    assert laws.kn_vs_k2 == pytest.approx(4.0, rel=1e-3)


def test_critical_table_columns():
    rows = critical_table(Yukawa(g=1.0, beta=1.0), [4, 2, 3])
    assert [r.N for r in rows] == [2, 3, 4]
    assert rows[0].vs_two == pytest.approx(1.0)
    for row in rows:
        assert row.ratio_next == pytest.approx(row.law_ratio_next, rel=1e-12)
        assert row.vs_two == pytest.approx(row.law_vs_two, rel=1e-12)


def test_critical_table_one_body():
    rows = critical_table(Yukawa(g=1.0, beta=1.0), [2, 3], body=BodyType.ONE_BODY)
    assert rows[0].ratio_next == pytest.approx((4.0 / 3.0) ** 2, rel=1e-12)


def test_critical_table_needs_pairs():
    with pytest.raises(SpecValidationError):
        critical_table(Yukawa(g=1.0, beta=1.0), [1, 2])


def test_critical_for_system():
    system = SystemSpec(N=3, kinematics=NonRelativistic(m=1.0), two_body=Yukawa(g=5.0, beta=1.0))
    result = critical_for_system(system)
    assert result.coupling == pytest.approx(critical_two_body(Yukawa(g=5.0, beta=1.0), 3).coupling)


def test_critical_for_system_rejects_relativistic_and_mixed():
    sr = SystemSpec(N=3, kinematics=SemiRelativistic(m=1.0), two_body=Yukawa(g=1.0, beta=1.0))
    with pytest.raises(SpecValidationError):
        critical_for_system(sr)
    mixed = SystemSpec(N=3, kinematics=NonRelativistic(m=1.0), one_body=Yukawa(g=1.0, beta=1.0), two_body=Yukawa(g=1.0, beta=1.0))
    with pytest.raises(SpecValidationError):
        critical_for_system(mixed)


def test_critical_needs_mass():
    with pytest.raises(NonrelZeroMassError):
        critical_two_body(Yukawa(g=1.0, beta=1.0), 2, 0.0)


SHORT_RANGE = [Yukawa(g=1.0, beta=1.0), Exponential(g=1.0, beta=0.7)]


@pytest.mark.parametrize("shape", SHORT_RANGE, ids=lambda p: p.form)
@pytest.mark.parametrize("s, c", [(0.2, 1.0), (5.0, 1.0), (1.0, 0.25), (3.0, 4.0)])
def test_tangency_point_under_rescaling(shape, s, c):
    # s w(x / c) tem o ponto de tangência em c y0
    y0 = tangency_point(shape)
    assert tangency_point(scaled(shape, s, 1.0 / c)) == pytest.approx(c * y0, rel=1e-10)


@pytest.mark.parametrize("shape", SHORT_RANGE, ids=lambda p: p.form)
@pytest.mark.parametrize("size", [2, 3, 6])
def test_reduced_coupling_depends_only_on_shape(shape, size):
    reference = critical_two_body(shape, size, 1.0, q=1.5).coupling / 1.5 ** 2
    for m in (0.3, 1.0, 4.0):
        for q in (1.0, 2.5, 7.5):
            assert critical_two_body(shape, size, m, q=q).coupling * m / q ** 2 == pytest.approx(reference, rel=1e-12)
            assert critical_one_body(shape, size, m, q=q).coupling * m / q ** 2 == pytest.approx(
                critical_one_body(shape, size, 1.0, q=1.0).coupling, rel=1e-12
            )


@pytest.mark.parametrize("shape", SHORT_RANGE, ids=lambda p: p.form)
@pytest.mark.parametrize("size", [2, 3, 5])
def test_binding_onset_brackets_critical_coupling(solver, shape, size):
    m = 1.0
    g_n = critical_two_body(shape, size, m).coupling

    def system(factor):
        return SystemSpec(N=size, kinematics=NonRelativistic(m=m), two_body=shape.model_copy(update={"g": factor * g_n}))

    above = solver.solve(system(1.0 + 1e-3))
    assert above.M0 - size * m < 0.0
    try:
        below = solver.solve(system(1.0 - 1e-3))
    except NoRootError:
        return
    assert below.M0 - size * m > 0.0


@pytest.mark.slow
def test_exponential_oracle_matches_bessel_zero(settings):
    closed = float(jn_zeros(0, 1)[0]) ** 2 / 4.0
    assert closed == pytest.approx(1.44579, rel=1e-5)
    assert critical_bisection(Exponential(g=1.0, beta=1.0), 1.0, settings=settings) == pytest.approx(closed, rel=1e-4)


@pytest.mark.slow
def test_yukawa_oracle_is_below_afm_value(settings):
    exact = critical_bisection(Yukawa(g=1.0, beta=1.0), 1.0, settings=settings)
    assert exact == pytest.approx(1.6798, rel=1e-3)
    assert exact <= critical_two_body(Yukawa(g=1.0, beta=1.0), 2, q=1.0, aux=AuxiliaryForm.COULOMB).coupling
