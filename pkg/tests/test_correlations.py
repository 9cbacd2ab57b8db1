import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mollowcav.correlations import (CorrelationKind, CorrelationSeries,
                                    UndefinedCorrelationError, cauchy_schwarz_report,
                                    first_order, first_order_many, g2_zero, second_order,
                                    second_order_matrix)
from mollowcav.hilbert import DensityOperator, Operator, SpaceLayout, maximally_mixed, transition
from mollowcav.lindblad import (CollapseChannel, SolverError, build_liouvillian, steady_state,
                                uniform_grid)
from mollowcav.models import TwoLevelParams, build_two_level
from mollowcav.validation import (brute_force_first_order, brute_force_second_order,
                                  dense_liouvillian, random_open_system)

ATOM = SpaceLayout.single("atom", 2)


def driven_atom(omega, gamma=1.0):
    sm = transition(ATOM, "atom", 1, 0)
    L = build_liouvillian((0.5 * omega) * (sm + sm.dag()), [CollapseChannel(sm, gamma)])
    return L, sm, steady_state(L)


def series(values, kind=CorrelationKind.SECOND_ORDER_AUTO, step=0.1, label=""):
    values = np.asarray(values, dtype=float)
    tau = np.arange(values.size) * step
    return CorrelationSeries(tau, values, kind, normalization=1.0, label=label)


class TestFirstOrder:
    def test_undriven_atom_has_no_fluctuations(self):
        L, sm, rho = driven_atom(0.0)
        c = first_order(L, rho, sm, uniform_grid(2.0, 0.5))
        np.testing.assert_allclose(c.values, 0.0, atol=1e-14)

    def test_zero_delay_is_variance(self):
        L, sm, rho = driven_atom(1.5)
        c = first_order(L, rho, sm, uniform_grid(1.0, 0.5))
        pe = rho.matrix[1, 1].real
        coh = abs(rho.matrix[1, 0])
        assert c.at_zero.real == pytest.approx(pe - coh ** 2, abs=1e-12)

    def test_matches_matrix_exponential(self, rng):
        H, channels = random_open_system(rng, dims=(2, 2))
        L = build_liouvillian(H, channels)
        rho = steady_state(L)
        op = Operator(L.layout, rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        tau = uniform_grid(3.0, 0.25)
        got = first_order(L, rho, op, tau).values
        ref = brute_force_first_order(dense_liouvillian(H, channels), rho.matrix, op.toarray(),
                                      tau)
        assert np.abs(got - ref).max() < 1e-8 * max(1.0, np.abs(ref).max())

    def test_decays_for_mixing_dynamics(self):
        L, sm, rho = driven_atom(3.0)
        c = first_order(L, rho, sm, uniform_grid(30.0, 0.1))
        assert abs(c.values[-1]) < 1e-6 * abs(c.values[0])

    def test_batched_matches_single(self, resonant_system):
        system, rho = resonant_system
        tau = uniform_grid(2.0, 0.05)
        ops = {n: system.op(n) for n in ("sigma_minus", "r", "b")}
        many = first_order_many(system.liouvillian, rho, ops, tau)
        for n, op in ops.items():
            one = first_order(system.liouvillian, rho, op, tau)
            assert np.abs(many[n].values - one.values).max() < 1e-7
            assert many[n].kind == CorrelationKind.FIRST_ORDER

    def test_rejects_non_steady_state(self):
        L, sm, _ = driven_atom(1.0)
        with pytest.raises(SolverError):
            first_order(L, maximally_mixed(ATOM), sm, [0.0, 0.1])


class TestSecondOrder:
    def test_resonance_fluorescence_antibunching(self):
        L, sm, rho = driven_atom(2.0)
        g2 = second_order(L, rho, sm, sm, uniform_grid(20.0, 0.1))
        assert g2.at_zero == pytest.approx(0.0, abs=1e-12)
        assert g2.values[-1] == pytest.approx(1.0, abs=1e-4)
        assert g2.kind == CorrelationKind.SECOND_ORDER_AUTO

    def test_matches_matrix_exponential(self, rng):
        H, channels = random_open_system(rng, dims=(3,))
        L = build_liouvillian(H, channels)
        rho = steady_state(L)
        o1 = Operator(L.layout, rng.normal(size=(3, 3)))
        o2 = Operator(L.layout, rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        tau = uniform_grid(2.0, 0.25)
        got = second_order(L, rho, o1, o2, tau)
        ref = brute_force_second_order(dense_liouvillian(H, channels), rho.matrix,
                                       o1.toarray(), o2.toarray(), tau)
        assert np.abs(got.values - ref.real).max() < 1e-8
        assert got.kind == CorrelationKind.SECOND_ORDER_CROSS

    def test_zero_flux_is_undefined(self):
        L, sm, rho = driven_atom(0.0)
        with pytest.raises(UndefinedCorrelationError):
            second_order(L, rho, sm, sm, [0.0, 0.1])
        with pytest.raises(UndefinedCorrelationError):
            g2_zero(rho, sm)

    def test_equal_time_value_matches_series(self, resonant_system):
        system, rho = resonant_system
        b = system.op("b")
        g2 = second_order(system.liouvillian, rho, b, b, [0.0, 0.1])
        assert g2.at_zero == pytest.approx(g2_zero(rho, b), abs=1e-12)

    def test_mode_symmetry_and_both_orderings(self, resonant_system):
        system, rho = resonant_system
        tau = uniform_grid(2.0, 0.1)
        g2 = second_order_matrix(system.liouvillian, rho,
                                 {"b": system.op("b"), "r": system.op("r")}, tau)
        assert set(g2) == {("b", "b"), ("b", "r"), ("r", "b"), ("r", "r")}
        assert np.abs(g2[("b", "b")].values - g2[("r", "r")].values).max() < 1e-6
        assert np.abs(g2[("b", "r")].values - g2[("r", "b")].values).max() < 1e-6
        for s in g2.values():
            assert np.isrealobj(s.values)
            assert s.values.min() >= 0.0
            assert s.imag_residual < 1e-8
        assert g2[("b", "r")].label == "br"

    def test_long_delay_uncorrelated(self):
        s = build_two_level(TwoLevelParams(kappa=2.5, g=1.0, n_max=2))
        rho = s.steady_state()
        g2 = second_order(s.liouvillian, rho, s.op("b"), s.op("r"), uniform_grid(25.0, 0.5))
        assert abs(g2.values[-1] - 1.0) < 0.01

    @settings(max_examples=8, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_oracle_equivalence_property(self, seed):
        rng = np.random.default_rng(seed)
        H, channels = random_open_system(rng)
        L = build_liouvillian(H, channels)
        rho = steady_state(L)
        d = L.dim
        op = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        op = Operator(L.layout, op / np.linalg.norm(op, 2))
        tau = uniform_grid(1.0, 0.25)
        Ld = dense_liouvillian(H, channels)
        c = first_order(L, rho, op, tau).values
        assert np.abs(c - brute_force_first_order(Ld, rho.matrix, op.toarray(), tau)).max() < 1e-8
        g2 = second_order(L, rho, op, op, tau).values
        ref = brute_force_second_order(Ld, rho.matrix, op.toarray(), op.toarray(), tau).real
        assert np.abs(g2 - ref).max() < 1e-8 * max(1.0, np.abs(ref).max())


class TestSeries:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            CorrelationSeries(np.arange(3) * 0.1, np.ones(4), CorrelationKind.FIRST_ORDER, 1.0)

    def test_grid_must_start_at_zero(self):
        with pytest.raises(ValueError):
            CorrelationSeries(np.arange(1, 4) * 0.1, np.ones(3), CorrelationKind.FIRST_ORDER, 1.0)


class TestCauchySchwarz:
    def test_coherent_light_has_no_violation(self):
        one = np.ones(20)
        rep = cauchy_schwarz_report(series(one, label="a"), series(one, label="b"),
                                    series(one, CorrelationKind.SECOND_ORDER_CROSS))
        assert rep.violations == []
        assert rep.two_mode_bound == pytest.approx(1.0)

    def test_antibunched_margin(self):
        auto = series(np.linspace(0.36, 1.0, 20), label="bb")
        coh = series(np.ones(20), label="rr")
        rep = cauchy_schwarz_report(auto, coh, series(np.ones(20),
                                                      CorrelationKind.SECOND_ORDER_CROSS))
        assert rep.single_mode["bb"] == pytest.approx(0.64)
        assert rep.single_mode_violated == {"bb": True, "rr": False}
        # g2 rises above its zero-delay value
        assert rep.temporal_violated["bb"]
        assert rep.two_mode_violated
        assert "single-mode:bb" in rep.violations

    def test_cross_bound_violation(self):
        auto = series(np.full(10, 1.2), label="x")
        cross = series(np.r_[1.5, np.ones(9)], CorrelationKind.SECOND_ORDER_CROSS)
        rep = cauchy_schwarz_report(auto, series(np.full(10, 1.2), label="y"), cross)
        assert rep.two_mode == pytest.approx(0.3)
        assert rep.violations == ["two-mode"]
        assert rep.two_mode_violation_mask.tolist() == [True] + [False] * 9
        assert rep.as_dict()["two_mode_violated"] is True

    def test_duplicate_labels_are_disambiguated(self):
        s = series(np.ones(5), label="bb")
        rep = cauchy_schwarz_report(s, s, s)
        assert set(rep.single_mode) == {"bb#1", "bb#2"}

    def test_grid_mismatch(self):
        with pytest.raises(ValueError):
            cauchy_schwarz_report(series(np.ones(5)), series(np.ones(5), step=0.2),
                                  series(np.ones(5)))

    def test_full_model_violations(self, resonant_system):
        system, rho = resonant_system
        g2 = second_order_matrix(system.liouvillian, rho,
                                 {"b": system.op("b"), "r": system.op("r")},
                                 uniform_grid(2.0, 0.1))
        rep = cauchy_schwarz_report(g2[("b", "b")], g2[("r", "r")], g2[("b", "r")])
        assert rep.single_mode_violated == {"bb": True, "rr": True}
        assert rep.two_mode_violated


def test_density_operator_state_is_used(resonant_system):
    # a different (valid, non-steady) state is rejected rather than silently used
    system, rho = resonant_system
    bad = DensityOperator(system.layout, np.eye(system.layout.total_dim) / system.layout.total_dim)
    with pytest.raises(SolverError):
        second_order(system.liouvillian, bad, system.op("b"), system.op("b"), [0.0, 0.1])
