from dataclasses import replace

import pytest

from coopsim.errors import ConfigurationError
from coopsim.params import TrustParams
from coopsim.sweep import (
    FULL_GRID,
    WEIGHT_GRID,
    NO_RECOVERY,
    REFERENCE_CELL,
    SMOKE_GRID,
    ParameterGrid,
    SweepCell,
    SweepProtocol,
    differentiation_stats,
    measure_cell,
    measure_forgiveness_time,
    measure_targets,
    monte_carlo,
    run_sweep,
    signal_recovery_time,
)

PROTO = SweepProtocol()
TRUST = TrustParams()


class TestGrid:
    def test_builtin_grid_sizes(self):
        assert FULL_GRID.size == 5**6 == 15625
        assert WEIGHT_GRID.size == 15625
        assert SMOKE_GRID.size == 3**6 == 729

    def test_degenerate_grid(self):
        g = ParameterGrid({"rho0": (1.0,)})
        assert g.size == 1
        assert g.cell(0) == replace(REFERENCE_CELL, rho0=1.0)

    def test_cell_enumeration_roundtrip(self):
        g = ParameterGrid({"rho0": (0.2, 1.0), "kappa": (0.5, 2.0), "memory_k": (1, 4)})
        cells = [g.cell(i) for i in range(g.size)]
        assert len(set(cells)) == 8
        assert cells[0].memory_k == 1 and isinstance(cells[0].memory_k, int)

    def test_unknown_parameter_rejected(self):
        with pytest.raises(ConfigurationError):
            ParameterGrid({"bogus": (1.0,)})

    def test_rho0_extremes(self):
        assert FULL_GRID.rho0_extremes() == (0.2, 1.0)


class TestForgiveness:
    def test_recovery_time_k_plus_one(self):
        for k in (1, 2, 4, 8):
            cell = replace(REFERENCE_CELL, memory_k=k)
            tau = measure_forgiveness_time(cell, PROTO, TRUST)
            assert tau == k + 1
            assert k <= tau <= 2 * k

    def test_no_defection_recovers_immediately(self):
        assert measure_forgiveness_time(REFERENCE_CELL, PROTO, TRUST, defection=0.0) == 0

    def test_recovery_detector(self):
        signals = [0.0] * 9 + [-0.5, 0.1, 0.1, 0.01, 0.005, 0.001, 0.0]
        assert signal_recovery_time(signals, 10, tol=0.02, sustain=3) == 3
        assert signal_recovery_time([-1.0] * 20, 5, tol=0.02, sustain=3) == NO_RECOVERY


class TestCellMeasurement:
    def test_reference_cell_passes_everything(self):
        r = measure_cell(0, REFERENCE_CELL, PROTO, TRUST, (0.2, 1.0))
        assert r.all_targets
        assert r.t2 and r.ratio > 1.5
        assert r.tau_f == REFERENCE_CELL.memory_k + 1
        assert r.max_abs_response <= 1.0

    def test_sensitivity_ratio_identity(self):
        for eta in (0.5, 1.0, 1.5):
            r = measure_cell(0, replace(REFERENCE_CELL, eta=eta), PROTO, TRUST, (0.2, 1.0))
            assert r.rho_ratio_error < 1e-12

    def test_t4_ratio_closed_form(self):
        # flat warm-up keeps trust at its initial level, so the response
        # ratio is exactly (1 + omega*0.8)/(1 + omega*0.2) * 4**eta
        cell = replace(REFERENCE_CELL, eta=1.25)
        r = measure_cell(0, cell, PROTO, TRUST, (0.2, 1.0))
        expected = (1.8 / 1.2) * 4.0**1.25
        assert r.ratio == pytest.approx(expected, rel=1e-9)

    def test_weak_corner_fails_emergence(self):
        weak = SweepCell(rho0=0.2, eta=1.5, kappa=0.5, memory_k=1, t0=0.3, d=0.2)
        r = measure_cell(0, weak, PROTO, TRUST, (0.2, 1.0))
        assert not r.t1  # no meaningful reciprocity, no cooperation climb
        assert r.t2 and r.t6  # punishment sign and boundedness still hold

    def test_t5_strict_ordering(self):
        r = measure_cell(0, REFERENCE_CELL, PROTO, TRUST, (0.2, 1.0))
        assert r.coop_t5_high > r.coop_t5_low_trust
        assert r.coop_t5_high > r.coop_t5_low_rho


class TestSweepAggregation:
    def test_serial_parallel_identical(self):
        grid = ParameterGrid({"rho0": (0.2, 1.0), "kappa": (0.5, 3.0), "t0": (0.3, 0.95)})
        serial = run_sweep(grid, PROTO, TRUST, processes=1)
        parallel = run_sweep(grid, PROTO, TRUST, processes=2)
        assert serial == parallel

    def test_measure_targets_report(self):
        grid = ParameterGrid({"rho0": (1.0,), "kappa": (1.0,)})
        results = run_sweep(grid, PROTO, TRUST, processes=1)
        report = measure_targets(results)
        row = report.row("t6")
        assert row["rate"] == 1.0 and row["pass"]
        assert report.row("t2")["achieved"] == 1

    def test_smoke_grid_thresholds(self):
        results = run_sweep(SMOKE_GRID, PROTO, TRUST, processes=1)
        report = measure_targets(results)
        assert report.all_pass, {r["target"]: r["rate"] for r in report.rows}
        stats = differentiation_stats(results)
        assert stats.cohens_d >= 0.8
        assert stats.wilcoxon_p < 0.01
        assert stats.ci_lo <= stats.mean <= stats.ci_hi


class TestMonteCarlo:
    def test_zero_perturbation_reproduces_base(self):
        report = monte_carlo(trials=8, perturb=0.0, seed=3, processes=1)
        assert len({t.ratio for t in report.trials}) == 1
        base = measure_cell(0, REFERENCE_CELL, SweepProtocol(), TrustParams(), (0.2, 1.0))
        assert report.trials[0].ratio == pytest.approx(base.ratio)

    def test_reproducible_derived_seeds(self):
        a = monte_carlo(trials=6, perturb=0.15, seed=11, processes=1)
        b = monte_carlo(trials=6, perturb=0.15, seed=11, processes=1)
        assert a.trials == b.trials

    def test_clamping_flagged(self):
        # cranked perturbation forces range clamps (t0 and d cap at 1)
        report = monte_carlo(trials=40, perturb=0.5, seed=5, processes=1)
        assert report.clamped_trials > 0

    def test_integer_window_untouched(self):
        report = monte_carlo(trials=5, perturb=0.15, seed=2, processes=1)
        assert all("memory_k" not in t.clamped for t in report.trials)
