import numpy as np
import pytest
from dataclasses import replace

from coopsim.errors import ConfigurationError
from coopsim.params import EconomyParams, ReciprocityParams, TrustParams
from coopsim.scenario import ScenarioConfig, Shock, SimConfig, pd_scenario, symmetric_matrix
from coopsim.simulation import run, step_adjustment, step_best_response


def two_actor(baseline_mode="moving_average", a_init=(0.5, 0.5),
              baseline_init=None, d=0.8, **recip_kwargs):
    recip = ReciprocityParams(**({"rho0": 1.0, "eta": 1.0, "kappa": 1.0,
                                  "memory_k": 4, "lambda_r": 1.0,
                                  "omega_amp": 1.0} | recip_kwargs))
    return ScenarioConfig(
        labels=("A", "B"),
        d=symmetric_matrix(2, d),
        recip=recip,
        trust=TrustParams(t0=0.7),
        econ=EconomyParams(endowments=(1.0, 1.0), alpha=(0.5, 0.5)),
        a_max=(1.0, 1.0),
        a_init=a_init,
        baseline_init=baseline_init or a_init,
        baseline_mode=baseline_mode,
    )


class TestAdjustmentDynamics:
    def test_flat_state_is_fixed_point(self):
        scen = two_actor()
        sim = SimConfig(horizon=20, noise_sigma=0.0, seed=1)
        traj = run(scen, sim)
        assert np.allclose(traj.actions, 0.5)
        assert np.allclose(traj.signal, 0.0)

    def test_single_step_matches_hand_evaluation(self):
        # one period, explicit state: signal +0.15 from the partner,
        # T = 0.85, D = 0.88; the action moves by exactly the update rule
        scen = two_actor(d=0.88, rho0=0.85, eta=1.3, kappa=1.2, omega_amp=0.6)
        sim = SimConfig(horizon=2, adjust_rate=0.12, decay=0.05, noise_sigma=0.0)
        actions = np.array([0.70, 0.80])
        baselines = np.array([0.70, 0.65])  # partner sits 0.15 above its baseline
        trust = np.array([[1.0, 0.85], [0.85, 1.0]])
        nxt = step_adjustment(scen, sim, actions, baselines, trust)
        rho = 0.85 * 0.88**1.3
        term = 1.0 * 0.85 * (1 + 0.6 * 0.88) * rho * np.tanh(1.2 * 0.15)
        expected = 0.70 + 0.12 * term - 0.05 * 0.0
        assert nxt[0] == pytest.approx(expected, rel=1e-12)

    def test_shock_applies_at_stated_period_pre_clip(self):
        scen = two_actor()
        sim = SimConfig(horizon=50, noise_sigma=0.0,
                        shocks=(Shock(period=48, actor=1, delta=-0.40),))
        traj = run(scen, sim)
        assert traj.actions[46, 1] == pytest.approx(0.5)
        assert traj.actions[47, 1] == pytest.approx(0.10)

    def test_shock_clips_to_bounds(self):
        scen = two_actor()
        sim = SimConfig(horizon=5, noise_sigma=0.0,
                        shocks=(Shock(period=3, actor=0, delta=-2.0),))
        traj = run(scen, sim)
        assert traj.actions[2, 0] == 0.0

    def test_geometric_decay_without_reciprocity(self):
        # reciprocity off, fixed norms: the gap to the norm decays at
        # exactly (1 - decay) per period
        scen = two_actor(baseline_mode="fixed", a_init=(0.9, 0.2),
                         baseline_init=(0.5, 0.5), lambda_r=0.0)
        sim = SimConfig(horizon=12, decay=0.05, baseline_rate=0.0, noise_sigma=0.0)
        traj = run(scen, sim)
        for t in range(1, 12):
            gap_prev = traj.actions[t - 1] - 0.5
            gap = traj.actions[t] - 0.5
            assert np.allclose(gap, 0.95 * gap_prev, rtol=1e-12)

    def test_steady_state_satisfies_update_equation(self):
        scen = two_actor()
        sim = SimConfig(horizon=40, noise_sigma=0.0)
        traj = run(scen, sim)
        final = traj.actions[-1]
        re_evaluated = step_adjustment(scen, sim, final, traj.baselines[-1],
                                       traj.trust[-1], norms=traj.norms[-1])
        assert np.allclose(re_evaluated, final, atol=1e-9)

    def test_actions_stay_in_bounds(self):
        scen = two_actor(baseline_mode="adaptive", a_init=(0.9, 0.9),
                         baseline_init=(0.1, 0.1), rho0=2.0, kappa=3.0)
        sim = SimConfig(horizon=60, noise_sigma=0.05, seed=3,
                        shocks=(Shock(period=10, actor=0, delta=0.7),
                                Shock(period=20, actor=1, delta=-0.9)))
        traj = run(scen, sim)
        assert traj.actions.min() >= 0.0
        assert traj.actions.max() <= 1.0


class TestDeterminism:
    def test_bit_identical_reruns(self):
        scen = two_actor(baseline_mode="adaptive", baseline_init=(0.3, 0.3))
        sim = SimConfig(horizon=40, noise_sigma=0.02, seed=2024)
        a = run(scen, sim)
        b = run(scen, sim)
        assert np.array_equal(a.actions, b.actions)
        assert np.array_equal(a.trust, b.trust)
        assert np.array_equal(a.signal, b.signal)

    def test_seed_changes_noise(self):
        scen = two_actor(baseline_mode="adaptive", baseline_init=(0.3, 0.3))
        a = run(scen, SimConfig(horizon=30, noise_sigma=0.02, seed=1))
        b = run(scen, SimConfig(horizon=30, noise_sigma=0.02, seed=2))
        assert not np.array_equal(a.actions, b.actions)

    def test_horizon_one_records_initial_state_only(self):
        scen = two_actor(a_init=(0.4, 0.6), baseline_init=(0.5, 0.5))
        traj = run(scen, SimConfig(horizon=1, noise_sigma=0.02, seed=9))
        assert traj.horizon == 1
        assert tuple(traj.actions[0]) == (0.4, 0.6)

    def test_symmetric_scenario_symmetric_trajectories(self):
        scen = two_actor(baseline_mode="adaptive", a_init=(0.5, 0.5),
                         baseline_init=(0.2, 0.2))
        traj = run(scen, SimConfig(horizon=40, noise_sigma=0.0))
        assert np.allclose(traj.actions[:, 0], traj.actions[:, 1])


class TestBestResponseMode:
    def test_static_game_is_stationary_without_coupling(self):
        scen = pd_scenario(rho0=0.0)
        scen = replace(scen, trust=TrustParams(t0=0.7, lambda_t=0.0))
        sim = SimConfig(horizon=6, mode="best_response", noise_sigma=0.0)
        traj = run(scen, sim)
        assert np.allclose(traj.actions, traj.actions[0])
        assert traj.converged.all()

    def test_dilemma_reaches_cooperative_steady_state(self):
        scen = pd_scenario(rho0=1.0)
        sim = SimConfig(horizon=8, mode="best_response", noise_sigma=0.0)
        traj = run(scen, sim)
        assert traj.actions[-1, 0] == pytest.approx(10.0)
        assert traj.actions[-1, 1] == pytest.approx(10.0)
        assert traj.converged.all()

    def test_deterministic_given_seed(self):
        scen = pd_scenario(rho0=1.0)
        sim = SimConfig(horizon=6, mode="best_response", noise_sigma=0.0, seed=5)
        a = run(scen, sim)
        b = run(scen, sim)
        assert np.array_equal(a.actions, b.actions)

    def test_step_best_response_wrapper(self):
        scen = pd_scenario(rho0=1.0)
        trust = np.full((2, 2), 0.7)
        np.fill_diagonal(trust, 1.0)
        res = step_best_response(scen, (0.0, 0.0), trust)
        assert res.converged


class TestValidation:
    def test_shock_beyond_horizon_rejected(self):
        scen = two_actor()
        with pytest.raises(ConfigurationError):
            run(scen, SimConfig(horizon=5, shocks=(Shock(period=9, actor=0, delta=0.1),)))

    def test_shock_unknown_actor_rejected(self):
        scen = two_actor()
        with pytest.raises(ConfigurationError):
            run(scen, SimConfig(horizon=5, shocks=(Shock(period=2, actor=7, delta=0.1),)))

    def test_script_pins_actions(self):
        scen = two_actor()
        sim = SimConfig(horizon=6, noise_sigma=0.02, seed=4)
        traj = run(scen, sim, script={1: {p: 0.25 for p in range(2, 7)}})
        assert np.allclose(traj.actions[1:, 1], 0.25)
