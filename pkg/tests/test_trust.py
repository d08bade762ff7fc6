import random

import pytest

from coopsim.params import TrustParams
from coopsim.trust import DyadState, negativity_ratio, trust_ceiling, update_trust

DEFAULTS = TrustParams()


class TestCeiling:
    def test_pristine_reputation_hits_cap(self):
        assert trust_ceiling(0.0, 0.9, 0.6) == 0.9

    def test_reputation_binds(self):
        assert trust_ceiling(0.5, 0.9, 0.6) == pytest.approx(0.7)

    def test_base_form_recovered(self):
        for r in (0.0, 0.3, 0.8, 1.0):
            assert trust_ceiling(r, 1.0, 1.0) == pytest.approx(1.0 - r)


class TestUpdate:
    def test_zero_signal(self):
        state = DyadState(trust=0.6, reputation=0.4)
        nxt = update_trust(state, 0.0, 0.5, DEFAULTS)
        assert nxt.trust == pytest.approx(0.6)
        assert nxt.reputation == pytest.approx(0.4 * (1 - DEFAULTS.delta_r))

    def test_building_formula(self):
        p = TrustParams(lambda_plus=0.1, t_max=0.9, theta_r=0.0)
        state = DyadState(trust=0.5, reputation=0.0)
        nxt = update_trust(state, 0.5, 0.0, p)
        assert nxt.trust - state.trust == pytest.approx(0.02, abs=1e-12)

    def test_erosion_formula(self):
        p = TrustParams(lambda_minus=0.3, xi=0.5)
        state = DyadState(trust=0.8, reputation=0.0)
        nxt = update_trust(state, -0.5, 0.8, p)
        assert nxt.trust - state.trust == pytest.approx(-0.168, abs=1e-9)

    def test_reputation_updates_before_ceiling_clips(self):
        # a large violation must lower the ceiling within the same period
        p = TrustParams(mu_r=0.6, theta_r=1.0, t_max=1.0, lambda_minus=0.01)
        state = DyadState(trust=0.95, reputation=0.0)
        nxt = update_trust(state, -1.0, 0.0, p)
        assert nxt.reputation == pytest.approx(0.6)
        assert nxt.trust <= 1.0 - 1.0 * 0.6 + 1e-12

    def test_saturated_reputation_cannot_grow(self):
        state = DyadState(trust=0.1, reputation=1.0)
        nxt = update_trust(state, -5.0, 1.0, DEFAULTS)
        assert nxt.reputation == pytest.approx(1.0)

    def test_deadband_neutralizes_small_signals(self):
        p = TrustParams(deadband=0.05)
        state = DyadState(trust=0.7, reputation=0.2)
        nxt = update_trust(state, -0.04, 0.9, p)
        assert nxt.trust == pytest.approx(0.7)
        assert nxt.reputation == pytest.approx(0.2 * (1 - p.delta_r))
        hit = update_trust(state, -0.06, 0.9, p)
        assert hit.trust < 0.7

    def test_erosion_monotone_in_dependency(self):
        p = DEFAULTS
        state = DyadState(trust=0.8, reputation=0.0)
        drops = [
            state.trust - update_trust(state, -0.4, d, p).trust
            for d in (0.0, 0.25, 0.5, 0.75, 1.0)
        ]
        assert drops == sorted(drops)

    def test_fuzz_invariants_10k_sequences(self):
        rng = random.Random(7)
        for _ in range(10000):
            p = TrustParams(
                t0=rng.uniform(0, 1),
                lambda_plus=rng.uniform(0.01, 0.5),
                lambda_minus=rng.uniform(0.01, 0.9),
                xi=rng.uniform(0, 2),
                mu_r=rng.uniform(0.01, 0.99),
                delta_r=rng.uniform(0.001, 0.2),
                t_max=rng.uniform(0.2, 1.0),
                theta_r=rng.uniform(0, 1),
            )
            state = DyadState(trust=min(p.t0, p.t_max), reputation=0.0)
            d = rng.uniform(0, 1)
            for _ in range(12):
                state = update_trust(state, rng.uniform(-2, 2), d, p)
                ceiling = trust_ceiling(state.reputation, p.t_max, p.theta_r)
                assert 0.0 <= state.reputation <= 1.0
                assert 0.0 <= state.trust <= ceiling + 1e-12

    def test_hysteresis(self):
        # violate-then-rebuild ends strictly below cooperate-only whenever
        # the damaged ceiling still binds at the end
        p = TrustParams(t_max=0.9, theta_r=0.6)
        clean = DyadState(trust=0.7, reputation=0.0)
        scarred = DyadState(trust=0.7, reputation=0.0)
        scarred = update_trust(scarred, -0.8, 0.5, p)
        for _ in range(20):
            clean = update_trust(clean, 0.5, 0.5, p)
            scarred = update_trust(scarred, 0.5, 0.5, p)
        assert p.theta_r * scarred.reputation > 1.0 - p.t_max  # ceiling binds
        assert scarred.trust < clean.trust


class TestNegativityRatio:
    def test_default_three_to_one(self):
        assert negativity_ratio(TrustParams(lambda_plus=0.10, lambda_minus=0.30)) == pytest.approx(3.0)

    def test_symmetric(self):
        assert negativity_ratio(TrustParams(lambda_plus=0.2, lambda_minus=0.2)) == pytest.approx(1.0)

    def test_four_to_one(self):
        assert negativity_ratio(TrustParams(lambda_plus=0.05, lambda_minus=0.20)) == pytest.approx(4.0)
