import random

import numpy as np
import pytest

from coopsim.reciprocity import History
from coopsim.scenario import pd_scenario, reference_scenario
from coopsim.solver import (
    SolverConfig,
    argmax_on_grid,
    best_response,
    critical_rho,
    cross_partial_check,
    exhaustive_nash,
    solve_equilibrium,
)
from coopsim.utility import private_payoff


def trust_matrix(scenario, level=None):
    t = np.full((scenario.n, scenario.n), level if level is not None else scenario.trust.t0)
    np.fill_diagonal(t, 1.0)
    return t


class TestArgmax:
    def test_tie_breaks_toward_smallest(self):
        grid = np.linspace(0.0, 10.0, 21)
        assert argmax_on_grid(lambda x: 1.0, grid) == 0.0

    def test_single_peak(self):
        grid = np.arange(0.0, 10.5, 0.5)
        assert argmax_on_grid(lambda x: -((x - 7.0) ** 2), grid) == 7.0

    def test_brute_force_equivalence_random_configs(self):
        rng = random.Random(31)
        for _ in range(200):
            scen = reference_scenario(
                rho0=rng.uniform(0, 2), eta=rng.uniform(0.5, 2),
                kappa=rng.uniform(0.3, 2), t0=rng.uniform(0.1, 0.9),
                d=rng.uniform(0, 1), theta_v=rng.uniform(5, 20),
                a_max=20.0, gamma=rng.uniform(0, 2),
            )
            trust = trust_matrix(scen)
            others = np.array([rng.uniform(0, 20), rng.uniform(0, 20)])
            cfg = SolverConfig(grid_points=41)
            br = best_response(0, others, scen, trust, solver=cfg)
            from coopsim.solver import _objective

            grid = np.linspace(0, 20.0, 41)
            exhaustive = argmax_on_grid(
                lambda x: _objective(0, x, others.copy(), scen.baseline_init[0],
                                     trust[0], scen),
                grid,
            )
            assert br == pytest.approx(exhaustive, abs=1e-12)


class TestDilemma:
    def test_defection_without_reciprocity(self):
        scen = pd_scenario(rho0=0.0)
        res = solve_equilibrium(scen, None, trust_matrix(scen),
                                SolverConfig(grid_points=401), warm_start=(0.0, 0.0))
        assert res.converged
        assert res.actions == (0.0, 0.0)
        assert private_payoff(0, res.actions, scen.econ) == pytest.approx(0.0)

    def test_cooperation_with_reciprocity(self):
        scen = pd_scenario(rho0=1.0)
        res = solve_equilibrium(scen, None, trust_matrix(scen),
                                SolverConfig(grid_points=401), warm_start=(0.0, 0.0))
        assert res.converged
        assert res.actions == (10.0, 10.0)
        for i in range(2):
            assert private_payoff(i, res.actions, scen.econ) == pytest.approx(50.0)

    def test_symmetry_preserved(self):
        scen = pd_scenario(rho0=1.0)
        res = solve_equilibrium(scen, None, trust_matrix(scen),
                                SolverConfig(grid_points=301), warm_start=(2.0, 2.0))
        assert abs(res.actions[0] - res.actions[1]) < 1e-9

    def test_fixed_point_property(self):
        scen = pd_scenario(rho0=1.0)
        trust = trust_matrix(scen)
        cfg = SolverConfig(grid_points=201)
        res = solve_equilibrium(scen, None, trust, cfg, warm_start=(0.0, 0.0))
        assert res.converged
        for i in range(2):
            br = best_response(i, np.array(res.actions), scen, trust, solver=cfg)
            assert br == pytest.approx(res.actions[i], abs=1e-12)


class TestCriticalRho:
    def test_unit_normalization(self):
        assert critical_rho(1.0, 1.0, 1.0, 0.0, 0.5, 1.0) == pytest.approx(1.0)

    def test_inverse_in_kappa(self):
        base = critical_rho(1.0, 1.0, 0.7, 1.0, 0.5, 1.0)
        assert critical_rho(1.0, 1.0, 0.7, 1.0, 0.5, 2.0) == pytest.approx(base / 2)

    def test_worked_value(self):
        assert critical_rho(0.5, 1.0, 0.7, 0.6, 1.0, 1.2) == pytest.approx(
            0.37202380952380953, abs=1e-9
        )

    def test_zero_denominator(self):
        with pytest.raises(ZeroDivisionError):
            critical_rho(1.0, 0.0, 0.7, 1.0, 0.5, 1.0)


class TestOracleEquivalence:
    def test_matches_exhaustive_nash_on_random_scenarios(self):
        rng = random.Random(77)
        grid_points = 41
        checked = 0
        for _ in range(50):
            scen = reference_scenario(
                rho0=rng.uniform(0, 1.5), eta=rng.uniform(0.5, 1.5),
                kappa=rng.uniform(0.3, 1.5), t0=rng.uniform(0.2, 0.9),
                d=rng.uniform(0.0, 1.0), theta_v=rng.uniform(5, 20),
                a_max=20.0, gamma=rng.uniform(0, 1.5),
            )
            trust = trust_matrix(scen)
            cfg = SolverConfig(grid_points=grid_points, max_iters=200)
            res = solve_equilibrium(scen, None, trust, cfg, warm_start=scen.a_init)
            assert res.converged, "random scenario did not converge"
            nash = exhaustive_nash(scen, trust, grid_points)
            assert nash, "exhaustive search found no equilibrium"
            step = 20.0 / (grid_points - 1)
            dist = min(
                max(abs(res.actions[0] - p[0]), abs(res.actions[1] - p[1]))
                for p in nash
            )
            assert dist <= step + 1e-9
            checked += 1
        assert checked == 50


class TestComparativeStatics:
    def test_equilibrium_nondecreasing_in_gamma(self):
        means = []
        for gamma in (0.0, 0.25, 0.5, 0.75, 1.0):
            scen = reference_scenario(gamma=gamma, theta_v=10.0, a_max=40.0,
                                      kappa=0.5)
            res = solve_equilibrium(scen, None, trust_matrix(scen),
                                    SolverConfig(grid_points=801),
                                    warm_start=scen.a_init)
            assert res.converged
            means.append(sum(res.actions) / 2)
        for lo, hi in zip(means, means[1:]):
            assert hi >= lo - 1e-9

    def test_cross_partial_positive_at_reference(self):
        res = cross_partial_check()
        assert res.corners_converged
        assert res.estimate > 0

    def test_cross_partial_sign_stable_under_halving(self):
        full = cross_partial_check(dt=0.05, drho=0.05)
        half = cross_partial_check(dt=0.025, drho=0.025)
        assert full.estimate > 0 and half.estimate > 0

    def test_cross_partial_zero_without_reciprocity(self):
        res = cross_partial_check(lambda_r=0.0)
        assert res.corners_converged
        assert abs(res.estimate) < 1e-6


class TestHistoryAwareSolve:
    def test_unconverged_is_flagged_not_raised(self):
        scen = pd_scenario(rho0=1.0)
        res = solve_equilibrium(scen, None, trust_matrix(scen),
                                SolverConfig(grid_points=201, max_iters=1),
                                warm_start=(0.0, 0.0))
        assert not res.converged
        assert res.iterations == 1
        assert res.residual >= 0

    def test_history_moves_the_reference(self):
        scen = reference_scenario(theta_v=10.0, a_max=40.0, kappa=0.5)
        trust = trust_matrix(scen)
        hist = History(2)
        for _ in range(6):
            hist.append([20.0, 20.0])
        cfg = SolverConfig(grid_points=2001)
        anchored_low = solve_equilibrium(scen, None, trust, cfg, warm_start=scen.a_init)
        anchored_high = solve_equilibrium(scen, hist, trust, cfg,
                                          warm_start=scen.a_init, period=7)
        assert anchored_high.actions[0] != anchored_low.actions[0]
