"""Every named suite runs green at reduced sizes and is bit-reproducible."""

import json

import pytest

from biascube.suites import SUITE_NAMES, run_suite

# sizes small enough for CI but large enough to exercise every code path
TINY = {
    "russo": {"trials": 20, "n_max": 6},
    "moment": {"trials": 20, "n_max": 6},
    "adjoint": {"trials": 20, "n_max": 6},
    "lsi": {"trials": 30, "n_max": 5},
    "poincare": {"trials": 30, "n_max": 5},
    "martingale": {"trials": 20, "n_max": 6},
    "thm42": {"trials": 50, "n_max": 7},
    "thm41": {"n_max": 8},
    "cor43": {"n_max": 8},
    "sn-claims": {"n_max": 2000},
    "exhaustive-n4": {"p": 0.5},
}


def run_tiny(name, seed=0):
    return run_suite(name, seed=seed, **TINY[name])


class TestAllSuites:
    @pytest.mark.parametrize("name", SUITE_NAMES)
    def test_passes_and_has_shape(self, name):
        result = run_tiny(name)
        assert result["suite"] == name
        assert result["pass"] is True
        assert result["failures"] == []
        assert result["checks"], "a suite must report at least one check"
        for check in result["checks"]:
            assert {"label", "lhs", "rhs", "pass"} <= set(check)

    @pytest.mark.parametrize("name", SUITE_NAMES)
    def test_deterministic(self, name):
        a = json.dumps(run_tiny(name), sort_keys=True)
        b = json.dumps(run_tiny(name), sort_keys=True)
        assert a == b

    def test_seed_changes_random_suites(self):
        a = run_tiny("russo", seed=0)
        b = run_tiny("russo", seed=1)
        assert json.dumps(a) != json.dumps(b)

    def test_unknown_name_raises(self):
        with pytest.raises(KeyError):
            run_suite("nope")


class TestSuiteExtras:
    def test_martingale_reports_increment_sign(self):
        result = run_tiny("martingale")
        assert result["increment_signs_seen"] == ["plus"]

    def test_lsi_literal_form_is_reported_not_asserted(self):
        result = run_tiny("lsi")
        literal = result["literal_form"]
        assert literal["asserted"] is False
        assert literal["total"] == 30 * 5
        assert 0 <= literal["holds"] <= literal["total"]

    def test_exhaustive_covers_every_table(self):
        result = run_tiny("exhaustive-n4")
        assert result["functions_checked"] == 1 << 16

    def test_sn_claims_flags_discrepancies_instead_of_failing(self):
        result = run_suite("sn-claims", n_max=2000)
        assert result["pass"] is True
        assert result["crossover_first_n"] == 883
        by_label = {c["label"]: c for c in result["checks"]}
        trend = by_label["rate_to_log_trend"]
        assert trend["context"]["full_range_monotone"] is False
        crossover = by_label["rate_crossover_scan"]
        assert crossover["context"]["matches_expected"] is False
        assert crossover["context"]["constant_free_first_n"] == 275
        assert by_label["constant_at_half_exact"]["lhs"] == 2.0
