import numpy as np
import pytest

from coopsim import case_study as cs
from coopsim.errors import ConfigurationError
from coopsim.files import (
    parse_dependency_csv,
    read_dependency_csv,
    scenario_from_text,
    scenario_to_text,
)
from coopsim.params import DependencyEntry
from coopsim.translate import (
    ADVICE_TABLE,
    CalibrationObservation,
    Symptom,
    calibration_advice,
    translate,
)


def ios_inputs():
    return read_dependency_csv(cs.ios_dependency_csv_path())


class TestTranslate:
    def test_ios_dependency_table_reproduces_coefficients(self):
        labels, entries = ios_inputs()
        result = translate(labels, entries)
        d = result.scenario.d
        i = {lab: k for k, lab in enumerate(labels)}
        assert d[i["Major"], i["Apple"]] == pytest.approx(0.8775, abs=1e-4)
        assert d[i["Small"], i["Apple"]] == pytest.approx(0.9195, abs=1e-4)
        assert d[i["Apple"], i["Major"]] == pytest.approx(0.6575, abs=1e-4)
        assert d[i["Apple"], i["Small"]] == pytest.approx(0.7075, abs=1e-4)

    def test_documented_defaults(self):
        labels, entries = ios_inputs()
        result = translate(labels, entries, "")
        r = result.scenario.recip
        assert (r.rho0, r.eta, r.kappa) == (1.0, 1.0, 1.0)
        assert r.memory_k == 4  # quarterly granularity heuristic

    def test_granularity_heuristic(self):
        labels, entries = ios_inputs()
        assert translate(labels, entries, "granularity = monthly").scenario.recip.memory_k == 6
        assert translate(labels, entries, "granularity = weekly").scenario.recip.memory_k == 12

    def test_single_dependum(self):
        entries = [DependencyEntry(0, 1, "thing", weight=1.0, exists=True, criticality=0.5)]
        result = translate(("a", "b"), entries)
        assert result.scenario.d[0, 1] == pytest.approx(0.5)

    def test_emitted_sensitivities_follow_formula(self):
        labels, entries = ios_inputs()
        result = translate(labels, entries, "rho0 = 0.85\neta = 1.3")
        i = {lab: k for k, lab in enumerate(labels)}
        assert result.rho[i["Major"]][i["Apple"]] == pytest.approx(0.85 * 0.8775**1.3)

    def test_symmetric_formulation_flag(self):
        labels, entries = ios_inputs()
        result = translate(labels, entries, symmetric_rho=True)
        i = {lab: k for k, lab in enumerate(labels)}
        coupled = (0.8775 * 0.6575) ** 0.5
        assert result.rho[i["Major"]][i["Apple"]] == pytest.approx(coupled)
        assert result.rho[i["Major"]][i["Apple"]] == pytest.approx(
            result.rho[i["Apple"]][i["Major"]]
        )

    def test_out_of_range_names_the_step(self):
        labels, entries = ios_inputs()
        with pytest.raises(ConfigurationError, match="step 6"):
            translate(labels, entries, "kappa = -1")
        with pytest.raises(ConfigurationError, match="step 5"):
            translate(labels, entries, "rho0 = 99")
        with pytest.raises(ConfigurationError, match="step 7"):
            translate(labels, entries, "t0 = 1.5")
        with pytest.raises(ConfigurationError, match="step 4"):
            translate(labels, entries, "memory_k = 0")
        with pytest.raises(ConfigurationError, match="step 2"):
            translate(labels, entries, "granularity = hourly")

    def test_idempotent_roundtrip(self):
        labels, entries = ios_inputs()
        first = translate(labels, entries, "rho0 = 0.85\neta = 1.3")
        text = scenario_to_text(first.scenario, first.sim)
        scenario, sim = scenario_from_text(text)
        assert np.array_equal(scenario.d.values, first.scenario.d.values)
        assert scenario.recip == first.scenario.recip
        # and the re-emitted file is byte-identical
        assert scenario_to_text(scenario, sim) == text

    def test_reciprocity_gap(self):
        labels, entries = ios_inputs()
        result = translate(labels, entries, "rho0_target = 1.2\nrho0_observed = 0.5")
        assert result.reciprocity_gap == pytest.approx(0.7)
        assert len(result.gap_advice) == 4
        small = translate(labels, entries, "rho0_target = 1.0\nrho0_observed = 0.9")
        assert small.reciprocity_gap == pytest.approx(0.1)
        assert small.gap_advice == ()


class TestCalibrationAdvice:
    def test_each_symptom_maps(self):
        table = {
            Symptom.COOP_TOO_HIGH: ("rho0", "decrease"),
            Symptom.COOP_TOO_LOW: ("rho0", "increase"),
            Symptom.FORGIVE_TOO_SLOW: ("memory_k", "decrease"),
            Symptom.FORGIVE_TOO_FAST: ("memory_k", "increase"),
            Symptom.RESPONSES_TOO_SHARP: ("kappa", "decrease"),
            Symptom.RESPONSES_TOO_GRADUAL: ("kappa", "increase"),
            Symptom.DIFFERENTIATION_WEAK: ("eta", "increase"),
            Symptom.DIFFERENTIATION_EXTREME: ("eta", "decrease"),
        }
        for symptom, (param, direction) in table.items():
            advice, conflicts = calibration_advice([CalibrationObservation(symptom)])
            assert advice[0].parameter == param
            assert advice[0].direction == direction
            assert not conflicts

    def test_coop_too_high_offers_both_levers(self):
        advice, _ = calibration_advice([CalibrationObservation(Symptom.COOP_TOO_HIGH)])
        assert [(a.parameter, a.direction) for a in advice] == [
            ("rho0", "decrease"), ("lambda_r", "decrease"),
        ]

    def test_empty_observations(self):
        advice, conflicts = calibration_advice([])
        assert advice == [] and conflicts == []

    def test_conflicts_reported_not_merged(self):
        advice, conflicts = calibration_advice([
            CalibrationObservation(Symptom.FORGIVE_TOO_SLOW),
            CalibrationObservation(Symptom.FORGIVE_TOO_FAST),
        ])
        assert len(advice) == 2
        assert len(conflicts) == 1
        assert conflicts[0].parameter == "memory_k"
        assert conflicts[0].directions == ("decrease", "increase")


class TestDependencyCsv:
    def test_header_validated(self):
        with pytest.raises(ConfigurationError):
            parse_dependency_csv("a,b,c\n1,2,3\n")

    def test_actor_order_is_first_appearance(self):
        labels, entries = ios_inputs()
        assert labels == ("Apple", "Major", "Small")
        assert len(entries) == 12
