from fractions import Fraction

import numpy as np
import pytest

from mollowcav.correlations import first_order, second_order_matrix
from mollowcav.hilbert import DensityOperator, expectation
from mollowcav.lindblad import DegenerateSteadyStateError, evolve, uniform_grid
from mollowcav.models import (ALL_MANIFOLDS, AtomicBasis, CesiumParams, TwoLevelParams,
                              build_cesium, build_dressed_secular, build_two_level,
                              clebsch_gordan, convergence_check, dressed_basis,
                              dressed_g2_auto, dressed_g2_cross, dressed_operators,
                              population_confinement)
from mollowcav.models.angular import dipole_element

# relative hyperfine transition strengths S_FF' of the D2 line (standard reference data)
D2_STRENGTHS = {
    4: {5: Fraction(11, 18), 4: Fraction(7, 24), 3: Fraction(7, 72)},
    3: {4: Fraction(15, 56), 3: Fraction(3, 8), 2: Fraction(5, 14)},
}


def line_strength(F, Fp):
    return sum(clebsch_gordan(F, Fp, m, q) ** 2
               for m in range(-F, F + 1) for q in (-1, 0, 1) if abs(m + q) <= Fp)


class TestTwoLevel:
    def test_layout_and_operators(self):
        s = build_two_level(TwoLevelParams(n_max=2))
        assert s.layout.labels == ("atom", "red", "blue")
        assert s.layout.total_dim == 18
        assert set(s.named_operators) >= {"sigma_minus", "sigma_plus", "r", "b", "E"}
        assert s.op("E").allclose(s.op("r") + s.op("b"))
        assert s.liouvillian.hamiltonian.is_hermitian()

    def test_unknown_operator(self):
        s = build_two_level(TwoLevelParams(n_max=1))
        with pytest.raises(KeyError, match="no operator"):
            s.op("c")

    def test_undriven_steady_state_is_ground(self):
        s = build_two_level(TwoLevelParams(omega_rabi=0.0, n_max=2))
        rho = s.steady_state().matrix
        assert abs(rho[0, 0] - 1.0) < 1e-12

    @pytest.mark.parametrize("field,value", [("gamma", 0.0), ("kappa", -1.0), ("g", -0.1),
                                             ("omega_rabi", -1.0), ("delta0", 0.0),
                                             ("n_max", 0), ("n_max", 2.5)])
    def test_parameter_validation(self, field, value):
        with pytest.raises(ValueError):
            TwoLevelParams(**{field: value})

    def test_resolved_mode_warning(self):
        assert TwoLevelParams().resolved_modes == "valid"
        p = TwoLevelParams(kappa=6.0)
        assert p.resolved_modes == "warning"
        assert build_two_level(TwoLevelParams(kappa=6.0, n_max=1)).warnings

    def test_convergence_check(self):
        def obs(system, rho):
            E = system.op("E")
            return {"n": expectation(rho, E.dag() @ E).real}

        rep = convergence_check(build_two_level, TwoLevelParams(n_max=2), obs)
        assert rep.n_max == 2
        assert rep.converged
        assert set(rep.values) == set(rep.values_next) == {"n"}


class TestDressed:
    def test_basis_is_orthonormal(self):
        plus, minus = dressed_basis()
        np.testing.assert_allclose(np.column_stack([plus, minus]).T @ np.column_stack([plus, minus]),
                                   np.eye(2), atol=1e-15)

    def test_bare_operators_in_dressed_form(self):
        o = dressed_operators()
        flip = o["sigma_plus_D"] - o["sigma_minus_D"]
        np.testing.assert_allclose(o["sigma_plus"], 0.5 * o["sigma_z_D"] + 0.5 * flip, atol=1e-15)
        np.testing.assert_allclose(o["sigma_minus"], 0.5 * o["sigma_z_D"] - 0.5 * flip, atol=1e-15)

    def test_dressed_spin_algebra(self):
        o = dressed_operators()
        sz, sp_, sm = o["sigma_z_D"], o["sigma_plus_D"], o["sigma_minus_D"]
        np.testing.assert_allclose(sz @ sp_ - sp_ @ sz, 2 * sp_, atol=1e-15)
        np.testing.assert_allclose(sz @ sm - sm @ sz, -2 * sm, atol=1e-15)
        np.testing.assert_allclose(sp_ @ sm - sm @ sp_, sz, atol=1e-15)

    def test_drive_is_diagonal_in_dressed_basis(self):
        o = dressed_operators()
        drive = o["sigma_plus"] + o["sigma_minus"]
        np.testing.assert_allclose(drive, o["sigma_z_D"], atol=1e-15)

    def test_requires_sideband_resonance(self):
        with pytest.raises(ValueError, match="omega_rabi == delta0"):
            build_dressed_secular(TwoLevelParams(omega_rabi=20.0, n_max=1))

    def test_unknown_dissipator(self):
        with pytest.raises(ValueError):
            build_dressed_secular(TwoLevelParams(n_max=1), atomic_dissipator="other")

    def test_uncoupled_cavity_stays_empty(self):
        for diss in ("secular", "bare"):
            s = build_dressed_secular(TwoLevelParams(g=0.0, n_max=2), atomic_dissipator=diss)
            rho = s.steady_state()
            for mode in ("r", "b"):
                a = s.op(mode)
                assert expectation(rho, a.dag() @ a).real < 1e-14

    def test_closed_forms(self):
        tau = np.array([0.0, 1.0, 50.0])
        np.testing.assert_allclose(dressed_g2_auto(tau), [0.0, 1 - np.exp(-0.5), 1.0], atol=1e-12)
        cross = dressed_g2_cross(tau, 1.0, 2.5)
        assert cross[0] == pytest.approx(1.0)
        assert cross[-1] == pytest.approx(1.0)
        ek = np.exp(-2.5)
        assert cross[1] == pytest.approx(np.exp(-0.5) - 1 + 0.5 * (2 - ek) ** 2 + 0.5 * ek ** 2)

    def test_closed_forms_reject_negative_delay(self):
        with pytest.raises(ValueError):
            dressed_g2_auto([-0.1, 0.0])
        with pytest.raises(ValueError):
            dressed_g2_cross([-0.1])

    def test_secular_model_approaches_closed_forms(self):
        # the closed forms are the strongly filtered limit kappa >> g
        tau = uniform_grid(10.0, 0.05)
        devs = []
        for kappa, g in ((2.5, 0.25), (5.0, 0.1), (10.0, 0.05)):
            s = build_dressed_secular(TwoLevelParams(kappa=kappa, g=g, n_max=2))
            g2 = second_order_matrix(s.liouvillian, s.steady_state(),
                                     {"r": s.op("r"), "b": s.op("b")}, tau)
            devs.append((np.abs(g2[("r", "r")].values - dressed_g2_auto(tau)).max(),
                         np.abs(g2[("r", "b")].values - dressed_g2_cross(tau, 1.0, kappa)).max()))
        devs = np.array(devs)
        assert np.all(np.diff(devs, axis=0) < 0)
        assert devs[-1].max() < 0.08

    @pytest.mark.xfail(strict=True, reason="full and dressed models differ by ~0.1 at "
                                           "kappa=2.5, g=0.25; see README")
    def test_full_model_within_005_of_dressed_model(self):
        tau = uniform_grid(10.0, 0.05)
        p = TwoLevelParams(kappa=2.5, g=0.25)
        ops = ("r", "b")
        out = []
        for s in (build_two_level(p), build_dressed_secular(p)):
            out.append(second_order_matrix(s.liouvillian, s.steady_state(),
                                           {k: s.op(k) for k in ops}, tau))
        for key in (("r", "r"), ("r", "b")):
            assert np.abs(out[0][key].values - out[1][key].values).max() <= 0.05


class TestClebschGordan:
    def test_stretched_transition_normalized(self):
        assert clebsch_gordan(4, 5, 4, 1) == pytest.approx(1.0)
        assert clebsch_gordan(4, 5, -4, -1) == pytest.approx(1.0)

    def test_cycling_ratios(self):
        ref = clebsch_gordan(4, 5, -4, -1)
        got = [clebsch_gordan(4, fp, -4, 1) / ref for fp in (5, 4, 3)]
        np.testing.assert_allclose(got, [0.15, 0.34, 0.44], atol=0.005)

    def test_relative_line_strengths(self):
        for F, table in D2_STRENGTHS.items():
            total = sum(line_strength(F, fp) for fp in table)
            for fp, s in table.items():
                assert line_strength(F, fp) / total == pytest.approx(float(s) / float(
                    sum(table.values())), rel=1e-12)

    def test_ground_sublevels_share_the_total_strength(self):
        for F in (3, 4):
            per_m = [sum(clebsch_gordan(F, fp, m, q) ** 2 for fp in (2, 3, 4, 5)
                         for q in (-1, 0, 1) if abs(m + q) <= fp) for m in range(-F, F + 1)]
            np.testing.assert_allclose(per_m, per_m[0], rtol=1e-10)

    def test_excited_sublevels_decay_at_the_same_rate(self):
        rates = []
        for fp in (2, 3, 4, 5):
            for mp in range(-fp, fp + 1):
                rates.append(sum(clebsch_gordan(F, fp, mp - q, q) ** 2
                                 for F in (3, 4) for q in (-1, 0, 1) if abs(mp - q) <= F))
        np.testing.assert_allclose(rates, rates[0], rtol=1e-10)

    def test_dipole_selection_rules(self):
        # |F' - F| <= 1
        assert clebsch_gordan(4, 2, 0, 0) == 0.0
        assert clebsch_gordan(3, 5, 0, 1) == 0.0
        basis = AtomicBasis(ALL_MANIFOLDS)
        for q in (-1, 0, 1):
            D = basis.dipole(q).tocoo()
            for i, j in zip(D.row, D.col):
                F, m, exc = basis.states[i]
                Fp, mp, exc_p = basis.states[j]
                assert not exc and exc_p and mp == m + q and abs(Fp - F) <= 1

    @pytest.mark.parametrize("args", [(5, 5, 0, 0), (4, 6, 0, 0), (4, 5, 0, 2),
                                      (4, 5, 5, 0), (4, 3, 3, 1), (4, 5, 0.5, 0)])
    def test_invalid_arguments(self, args):
        with pytest.raises(ValueError):
            dipole_element(*args)


class TestCesium:
    def test_horizontal_coupling(self):
        assert CesiumParams(g=1.5).g_horizontal == pytest.approx(1.5 * np.sqrt(2))

    @pytest.mark.parametrize("manifolds,dim", [(None, 36), (ALL_MANIFOLDS, 48),
                                               ({"3", "4", "3'", "4'", "5'"}, 43),
                                               ({"4", "5'"}, 20)])
    def test_basis_dimension(self, manifolds, dim):
        kw = {} if manifolds is None else {"included_manifolds": frozenset(manifolds)}
        p = CesiumParams(n_max=1, **kw)
        assert AtomicBasis(p.included_manifolds).dim == dim
        assert build_cesium(p).layout.total_dim == dim * 4

    @pytest.mark.parametrize("kw", [{"included_manifolds": frozenset({"4", "4'"})},
                                    {"included_manifolds": frozenset({"4", "5'", "6'"})},
                                    {"drive_polarization": 0},
                                    {"excited_detunings": {3: -88.0}},
                                    {"kappa": 0.0}])
    def test_parameter_validation(self, kw):
        with pytest.raises(ValueError):
            CesiumParams(**kw)

    def test_suppression_warning(self):
        p = CesiumParams(delta0=47.0)
        assert p.suppression_margins()["4'"] < 5.0
        assert any("F'=4'" in w for w in p.validity_warnings())
        assert not CesiumParams().validity_warnings()

    def test_no_drive_no_coupling_is_degenerate(self):
        s = build_cesium(CesiumParams(omega_rabi=0.0, g=0.0, n_max=1))
        with pytest.raises(DegenerateSteadyStateError):
            s.steady_state()

    def test_cycling_transition_is_closed(self):
        s = build_cesium(CesiumParams(g=0.0, n_max=1))
        basis = s.extras["basis"]
        d = s.layout.total_dim
        psi = np.zeros(d)
        # atom is the slowest-varying index; modes in vacuum
        psi[basis.index(4, -4, False) * 4] = 1.0
        rho0 = DensityOperator(s.layout, np.outer(psi, psi))
        traj = evolve(s.liouvillian, rho0, uniform_grid(2.0, 0.5))
        for rho in traj:
            assert population_confinement(rho, s) == pytest.approx(1.0, abs=1e-8)
        excited = expectation(traj[-1], s.op("P_cycle_excited")).real
        assert 0.0 < excited < 0.5

    def test_polarization_mirror_symmetry(self):
        out = []
        for q in (-1, 1):
            s = build_cesium(CesiumParams(kappa=2.5, g=1.0, n_max=1, drive_polarization=q))
            rho = s.steady_state()
            b = s.op("b")
            out.append((population_confinement(rho, s), expectation(rho, b.dag() @ b).real))
        np.testing.assert_allclose(out[0], out[1], rtol=1e-8)

    def test_confinement_decreases_with_coupling(self):
        conf = []
        for g in (0.25, 1.0, 2.5):
            s = build_cesium(CesiumParams(kappa=2.5, g=g, n_max=1))
            conf.append(population_confinement(s.steady_state(), s))
        assert np.all(np.diff(conf) <= 0)
        assert conf[0] > 0.999

    def test_confinement_needs_cesium_system(self, resonant_system):
        system, rho = resonant_system
        with pytest.raises(ValueError):
            population_confinement(rho, system)

    def test_atomic_sources(self):
        s = build_cesium(CesiumParams(n_max=1))
        assert [name for name, _ in s.extras["atomic_sources"]] == ["D-1", "D0", "D+1"]
        assert s.op("P_cycle").allclose(s.op("P_cycle_ground") + s.op("P_cycle_excited"))

    @pytest.mark.slow
    def test_default_truncation_values(self):
        s = build_cesium(CesiumParams(kappa=1.0, g=1.0))
        rho = s.steady_state()
        c = first_order(s.liouvillian, rho, s.op("b"), [0.0, 0.01])
        assert c.values[0].real > 0
        assert population_confinement(rho, s) > 0.99
