import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from core.afm import (
    AFMSolver,
    afm_energy,
    ground_state_lower_bound,
    observables,
    solve,
    solve_sqrt_closed_form,
    sqrt_quartic_root,
    virial_residual,
)
from core.errors import (
    MultipleRootsError,
    NoRootError,
    NonrelZeroMassError,
    NotLowerBoundableError,
    SpecValidationError,
    UnsupportedAuxiliaryError,
)
from core.model import AuxiliaryForm, BoundCharacter, NonRelativistic, SemiRelativistic, SystemSpec, UltraRelativistic
from core.potentials import Coulomb, Funnel, Harmonic, Linear, PowerLaw, SquareRoot, Yukawa, finite_difference_potential
from core.qnum import QuantumSpec


class TestClosedForms:
    def test_coulomb_pair(self, solver, nr_pair):
        sol = solver.solve(nr_pair(Coulomb(g=1.0)), QuantumSpec.explicit([(0, 0)], AuxiliaryForm.COULOMB))
        assert sol.M0 == pytest.approx(1.75, rel=1e-12)
        assert sol.r0 == pytest.approx(2.0, rel=1e-10)
        assert sol.p0 == pytest.approx(0.5, rel=1e-10)
        assert sol.Q == 1.0
        assert sol.bound is BoundCharacter.EXACT

    @pytest.mark.parametrize("n, l", [(0, 0), (1, 0), (0, 3), (2, 1)])
    def test_coulomb_excited_states(self, solver, nr_pair, n, l):
        m, g = 1.3, 0.7
        sol = solver.solve(nr_pair(Coulomb(g=g), m), QuantumSpec.explicit([(n, l)], AuxiliaryForm.COULOMB))
        assert sol.M0 == pytest.approx(2 * m - m * g * g / (4 * (n + l + 1) ** 2), rel=1e-12)

    @pytest.mark.parametrize("size", [2, 3, 5, 8])
    def test_harmonic_many_body(self, solver, size):
        a, m = 0.5, 1.0
        system = SystemSpec(N=size, kinematics=NonRelativistic(m=m), two_body=Harmonic(a=a))
        sol = solver.solve(system)
        expected = size * m + sol.Q * math.sqrt(2.0 * a * size / m)
        assert sol.Q == pytest.approx(1.5 * (size - 1))
        assert sol.M0 == pytest.approx(expected, rel=1e-12)
        assert sol.bound is BoundCharacter.EXACT

    def test_harmonic_three_bodies_unit_strength(self, solver):
        system = SystemSpec(N=3, kinematics=NonRelativistic(m=1.0), two_body=Harmonic(a=1.0))
        assert solver.solve(system).M0 == pytest.approx(3.0 + 3.0 * math.sqrt(6.0), rel=1e-12)

    def test_linear_form_reproduces_airy_levels(self, solver, nr_pair):
        sol = solver.solve(nr_pair(Linear(a=1.0)), QuantumSpec.explicit([(0, 0)], AuxiliaryForm.LINEAR))
        # E = 2m + (a²/(2 mu))^(1/3) |alpha_0| com mu = 1/2
        assert sol.M0 == pytest.approx(2.0 + 2.338107410459767, rel=1e-11)
        assert sol.bound is BoundCharacter.EXACT

    @pytest.mark.parametrize("a, q", [(1.0, 1.5), (0.2, 3.5), (2.0, 1.0)])
    def test_ultrarelativistic_linear(self, solver, a, q):
        system = SystemSpec(N=2, kinematics=SemiRelativistic(m=0.0), two_body=Linear(a=a))
        sol = solver.solve(system, QuantumSpec.direct(q))
        assert sol.M0 == pytest.approx(2.0 * math.sqrt(2.0 * a * q), rel=1e-12)
        assert sol.bound is BoundCharacter.UPPER

    def test_ur_kinematics_matches_massless_sr(self, solver):
        sr = SystemSpec(N=3, kinematics=SemiRelativistic(m=0.0), two_body=Linear(a=1.0))
        ur = SystemSpec(N=3, kinematics=UltraRelativistic(), two_body=Linear(a=1.0))
        assert solver.solve(sr).M0 == pytest.approx(solver.solve(ur).M0, rel=1e-13)

    @pytest.mark.parametrize("mu, a, b, q", list(itertools.product([0.3, 1.0, 3.0], [0.5, 1.0, 2.0], [0.5, 1.0, 4.0], [1.5, 2.5, 3.5])))
    def test_sqrt_closed_form(self, solver, mu, a, b, q):
        system = SystemSpec(N=1, kinematics=NonRelativistic(m=mu), one_body=SquareRoot(a=a, b=b / a))
        numeric = solver.solve(system, QuantumSpec.direct(q)).M0 - mu
        assert solve_sqrt_closed_form(mu, a, b, q) == pytest.approx(numeric, rel=1e-10)

    def test_sqrt_closed_form_small_offset_limit(self):
        mu, a, q = 1.0, 1.0, 1.5
        limit = 1.5 * (a * a * q * q / mu) ** (1.0 / 3.0)
        assert solve_sqrt_closed_form(mu, a, 1e-6, q) == pytest.approx(limit, rel=1e-6)

    @given(y=st.floats(min_value=0.0, max_value=1e6))
    def test_quartic_root(self, y):
        g = sqrt_quartic_root(y)
        assert g >= 2 ** (1 / 3) - 1e-15
        assert 4 * g ** 4 - 8 * g - 3 * y == pytest.approx(0.0, abs=1e-9 * (1 + y))

    def test_closed_form_rejects_non_positive_parameters(self):
        with pytest.raises(SpecValidationError):
            solve_sqrt_closed_form(1.0, 1.0, 0.0, 1.5)


class TestVirial:
    @hyp_settings(max_examples=25, deadline=None)
    @given(
        a=st.floats(min_value=0.1, max_value=5.0),
        lam=st.floats(min_value=0.2, max_value=3.0),
        m=st.floats(min_value=0.2, max_value=5.0),
    )
    def test_solution_satisfies_virial_equation(self, a, lam, m):
        system = SystemSpec(N=2, kinematics=NonRelativistic(m=m), two_body=PowerLaw(a=a, lam=lam))
        solver = AFMSolver()
        sol = solver.solve(system)
        scale = 2.0 * sol.p0 ** 2 / m
        assert abs(virial_residual(system, sol.r0, sol.Q)) <= 1e-8 * scale
        assert sol.p0 * sol.r0 == pytest.approx(sol.Q, rel=1e-14)
        assert abs(sol.virial_residual) <= 1e-10 * sol.M0

    def test_energy_is_minimal_at_r0(self, solver):
        system = SystemSpec(N=4, kinematics=NonRelativistic(m=1.0), two_body=Funnel(a=1.0, b=0.3))
        sol = solver.solve(system)
        for factor in (0.9, 0.99, 1.01, 1.1):
            assert afm_energy(system, factor * sol.r0, sol.Q) > sol.M0

    def test_x0_definition(self, solver):
        system = SystemSpec(N=3, kinematics=NonRelativistic(m=1.0), two_body=Linear(a=1.0))
        sol = solver.solve(system)
        assert sol.X0 == pytest.approx(3 * sol.Q / sol.r0 ** 2)


class TestOneAndTwoBodyForces:
    def test_pair_with_one_body_force_matches_folded_potential(self, solver):
        mixed = SystemSpec(N=2, kinematics=NonRelativistic(m=1.0), one_body=Harmonic(a=0.5), two_body=Coulomb(g=1.0))
        folded = SystemSpec(
            N=2, kinematics=NonRelativistic(m=1.0),
            two_body={"form": "sum_powerlaws", "terms": [{"coefficient": 0.25, "lam": 2.0}, {"coefficient": -1.0, "lam": -1.0}]},
        )
        # 2 U(x/2) = 2 * 0.5 * x²/4
        assert solver.solve(mixed).M0 == pytest.approx(solver.solve(folded).M0, rel=1e-12)

    def test_one_body_harmonic_many_body(self, solver):
        # N T + N k (r/N)²: H = sum p²/2m + k s_i², com sum s_i² = r²/N
        size, k = 4, 2.0
        system = SystemSpec(N=size, kinematics=NonRelativistic(m=1.0), one_body=Harmonic(a=k))
        sol = solver.solve(system)
        assert sol.M0 == pytest.approx(size + sol.Q * math.sqrt(2.0 * k), rel=1e-12)
        assert sol.bound is BoundCharacter.EXACT

    def test_single_particle(self, solver):
        system = SystemSpec(N=1, kinematics=NonRelativistic(m=1.0), one_body=Harmonic(a=0.5))
        assert solver.solve(system).M0 == pytest.approx(2.5, rel=1e-12)


class TestBounds:
    def test_coulomb_with_quadratic_form_is_upper(self, solver, nr_pair):
        sol = solver.solve(nr_pair(Coulomb(g=1.0)))
        assert sol.M0 == pytest.approx(2.0 - 1.0 / 9.0, rel=1e-12)
        assert sol.bound is BoundCharacter.UPPER
        assert sol.M0 >= 1.75

    def test_bound_pair_orders_around_exact_harmonic(self, solver, nr_pair):
        pair = solver.bound_pair(nr_pair(Harmonic(a=0.5)))
        exact = 2.0 + 1.5 * math.sqrt(2.0)
        assert pair.coulomb.bound is BoundCharacter.LOWER
        assert pair.coulomb.M0 <= exact
        assert pair.quadratic.M0 == pytest.approx(exact, rel=1e-12)

    def test_bound_pair_only_for_small_systems(self, solver):
        system = SystemSpec(N=3, kinematics=NonRelativistic(m=1.0), two_body=Linear(a=1.0))
        with pytest.raises(UnsupportedAuxiliaryError):
            solver.bound_pair(system)

    def test_modifier_makes_bound_indefinite(self, solver):
        system = SystemSpec(N=3, kinematics=NonRelativistic(m=1.0), two_body=Linear(a=1.0))
        sol = solver.solve(system, QuantumSpec.ground_state(modifier=(2.0, 1.0, 1.4)))
        assert sol.Q == pytest.approx(2.8)
        assert sol.bound is BoundCharacter.INDEFINITE

    def test_semirelativistic_with_lower_potential_is_indefinite(self, solver):
        system = SystemSpec(N=2, kinematics=SemiRelativistic(m=1.0), two_body=Linear(a=1.0))
        sol = solver.solve(system, QuantumSpec.explicit([(0, 0)], AuxiliaryForm.COULOMB))
        assert sol.bound is BoundCharacter.INDEFINITE


class TestGroundStateLowerBound:
    def test_harmonic_is_exact_path(self, solver):
        system = SystemSpec(N=3, kinematics=NonRelativistic(m=1.0), two_body=Harmonic(a=0.5))
        bound = solver.ground_state_lower_bound(system)
        assert bound == pytest.approx(7.5, rel=1e-12)
        assert bound <= solver.solve(system).M0

    @pytest.mark.parametrize("size", [2, 3, 5])
    def test_funnel_lower_bound_below_upper_bound(self, solver, size):
        system = SystemSpec(N=size, kinematics=NonRelativistic(m=1.0), two_body=Funnel(a=1.0, b=0.5))
        assert solver.ground_state_lower_bound(system) <= solver.solve(system).M0

    def test_module_level_helper(self):
        system = SystemSpec(N=3, kinematics=NonRelativistic(m=1.0), two_body=Harmonic(a=0.5))
        assert ground_state_lower_bound(system) == pytest.approx(7.5, rel=1e-12)

    def test_short_range_upper_character_is_refused(self, solver):
        system = SystemSpec(N=3, kinematics=NonRelativistic(m=1.0), two_body=Yukawa(g=10.0, beta=1.0))
        with pytest.raises(NotLowerBoundableError):
            solver.ground_state_lower_bound(system)

    def test_requires_nonrelativistic_kinematics(self, solver):
        system = SystemSpec(N=3, kinematics=SemiRelativistic(m=1.0), two_body=Linear(a=1.0))
        with pytest.raises(SpecValidationError):
            solver.ground_state_lower_bound(system)


class TestSpectrum:
    def test_rows_are_lexicographic(self, solver):
        system = SystemSpec(N=3, kinematics=NonRelativistic(m=1.0), two_body=Harmonic(a=0.5))
        rows = solver.spectrum(system, [1, 0], [0, 1])
        assert [(r.n, r.l) for r in rows] == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert [r.Q for r in rows] == pytest.approx([3.0, 4.0, 5.0, 6.0])
        for row in rows:
            assert row.M0 == pytest.approx(3.0 + row.Q * math.sqrt(3.0), rel=1e-12)

    def test_particle_sweep_in_threads(self, solver):
        system = SystemSpec(N=2, kinematics=NonRelativistic(m=1.0), two_body=Linear(a=1.0))
        serial = solver.spectrum(system, [0, 1], [0], n_particles=[2, 3, 4])
        threaded = solver.spectrum(system, [0, 1], [0], n_particles=[2, 3, 4], workers=4)
        assert [r.N for r in serial] == [2, 2, 3, 3, 4, 4]
        assert [r.M0 for r in serial] == [r.M0 for r in threaded]

    def test_skip_failures(self, solver, nr_pair):
        # Acoplamento abaixo do crítico AFM: só o estado mais ligado sobrevive
        system = nr_pair(Yukawa(g=8.0, beta=1.0))
        rows = solver.spectrum(system, [0, 1, 2], [0], skip_failures=True)
        assert [r.n for r in rows] == [0]
        with pytest.raises(NoRootError):
            solver.spectrum(system, [0, 1, 2], [0])

    def test_empty_sweep(self, solver, nr_pair):
        with pytest.raises(SpecValidationError):
            solver.spectrum(nr_pair(Linear(a=1.0)), [], [0])


class TestFailures:
    def test_zero_mass_nonrelativistic(self, solver, nr_pair):
        with pytest.raises(NonrelZeroMassError):
            solver.solve(nr_pair(Linear(a=1.0), m=0.0))

    def test_weak_yukawa_has_no_solution(self, solver, nr_pair):
        with pytest.raises(NoRootError):
            solver.solve(nr_pair(Yukawa(g=1.0, beta=1.0)))

    def test_two_wells_give_multiple_roots(self, solver, nr_pair):
        def double_well(x):
            return 3.0 * (np.tanh(np.log(x) / 0.3) + np.tanh(np.log(x / 10.0) / 0.3))

        pot = finite_difference_potential("poco_duplo_teste", double_well, length=3.0)
        with pytest.raises(MultipleRootsError) as info:
            solver.solve(nr_pair(pot))
        assert len(info.value.brackets) == 2

    def test_non_positive_q(self, solver, nr_pair):
        with pytest.raises(SpecValidationError):
            solver.solve_with_q(nr_pair(Linear(a=1.0)), 0.0, AuxiliaryForm.QUADRATIC)


def test_observables(solver):
    system = SystemSpec(N=3, kinematics=NonRelativistic(m=1.0), two_body=Harmonic(a=1.0))
    sol = solver.solve(system)
    obs = observables(sol, 3)
    assert obs.mean_p_sq == pytest.approx(sol.p0 ** 2)
    assert obs.mean_s_sq == pytest.approx((sol.r0 / 3) ** 2)
    assert obs.mean_rij_sq == pytest.approx(sol.r0 ** 2 / 3)
    assert observables(sol, 1).mean_rij_sq is None


def test_module_level_solve(nr_pair):
    assert solve(nr_pair(Coulomb(g=1.0)), QuantumSpec.explicit([(0, 0)], AuxiliaryForm.COULOMB)).M0 == pytest.approx(1.75)


@pytest.mark.parametrize("potential", [Linear(a=1.0), Harmonic(a=0.5)], ids=lambda p: p.form)
def test_semirelativistic_heavy_mass_limit(solver, potential):
    m = 1e6
    sr = solver.solve(SystemSpec(N=2, kinematics=SemiRelativistic(m=m), two_body=potential)).M0 - 2 * m
    nr = solver.solve(SystemSpec(N=2, kinematics=NonRelativistic(m=m), two_body=potential)).M0 - 2 * m
    assert sr == pytest.approx(nr, rel=1e-4)


@pytest.mark.parametrize("potential", [Linear(a=1.0), Funnel(a=1.0, b=0.3), PowerLaw(a=1.0, lam=0.5)], ids=lambda p: p.form)
@pytest.mark.parametrize("size", [2, 3, 5])
def test_semirelativistic_mass_never_below_ultrarelativistic(solver, potential, size):
    ur = solver.solve(SystemSpec(N=size, kinematics=UltraRelativistic(), two_body=potential)).M0
    masses = [solver.solve(SystemSpec(N=size, kinematics=SemiRelativistic(m=m), two_body=potential)).M0 for m in (0.1, 0.5, 2.0)]
    assert masses[0] >= ur
    assert masses == sorted(masses)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("size", [2, 4])
def test_power_law_scaling_exponents(solver, lam, size):
    # r0 ~ (m a)^(-1/(lam+2)) e M0 - N m ~ a^(2/(lam+2)) m^(-lam/(lam+2))
    def run(a, m):
        sol = solver.solve(SystemSpec(N=size, kinematics=NonRelativistic(m=m), two_body=PowerLaw(a=a, lam=lam)))
        return sol.r0, sol.M0 - size * m

    r_ref, e_ref = run(1.0, 1.0)
    for k in (0.1, 3.0, 20.0):
        r_a, e_a = run(k, 1.0)
        assert r_a == pytest.approx(r_ref * k ** (-1.0 / (lam + 2.0)), rel=1e-10)
        assert e_a == pytest.approx(e_ref * k ** (2.0 / (lam + 2.0)), rel=1e-10)
        r_m, e_m = run(1.0, k)
        assert r_m == pytest.approx(r_ref * k ** (-1.0 / (lam + 2.0)), rel=1e-10)
        assert e_m == pytest.approx(e_ref * k ** (-lam / (lam + 2.0)), rel=1e-10)
