# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

import pytest

from laguerre_calculus.suites import (
    SUITES,
    run_case,
    run_suite,
    suite_names,
)
from tests.unit.fixtures import CalculusUnitTestFixtures

RANDOMIZED_SUITES = [name for name, suite in SUITES.items() if suite.grid_size is None]
GRID_SUITES = [name for name, suite in SUITES.items() if suite.grid_size is not None]


class TestSuites(CalculusUnitTestFixtures):
    @pytest.mark.parametrize("name", RANDOMIZED_SUITES)
    def test_given_randomized_suite_when_run_briefly_then_all_cases_pass(self, name):
        result = run_suite(name, trials=10, seed=7)

        assert len(result.records) == 10
        assert result.passed, [r for r in result.records if not r.passed]

    @pytest.mark.parametrize("name", GRID_SUITES)
    def test_given_grid_suite_when_run_then_whole_grid_passes(self, name):
        result = run_suite(name, trials=3)

        assert len(result.records) == SUITES[name].grid_size
        assert result.passed, [r for r in result.records if not r.passed]

    def test_given_same_seed_when_suite_rerun_then_identical_records(self):
        first = run_suite("lemma", trials=8, seed=11)
        second = run_suite("lemma", trials=8, seed=11)

        assert first.records == second.records

    def test_given_different_seeds_when_suite_run_then_different_inputs(self):
        first = run_suite("radial", trials=4, seed=1)
        second = run_suite("radial", trials=4, seed=2)

        assert [r.inputs for r in first.records] != [r.inputs for r in second.records]

    def test_given_case_index_when_run_alone_then_same_record_as_in_suite(self):
        result = run_suite("semigroup", trials=6, seed=5)

        assert run_case("semigroup", 5, 3) == result.records[3]

    def test_given_workers_when_suite_run_then_records_match_serial_run(self):
        serial = run_suite("exp-preservation", trials=12, seed=3)
        parallel = run_suite("exp-preservation", trials=12, seed=3, workers=2)

        assert parallel.records == serial.records
        assert [r.index for r in parallel.records] == list(range(12))

    def test_given_suite_result_when_summarized_then_counts_and_worst_metrics(self):
        result = run_suite("vandermonde", trials=5, seed=0)

        summary = result.summary()

        assert summary["suite"] == "vandermonde"
        assert summary["trials"] == 5
        assert summary["failures"] == 0
        assert summary["passed"] is True
        assert summary["worst"]["residual"] <= 1e-10

    def test_given_preservation_suite_when_run_then_records_carry_roots_and_verdict(self):
        record = run_case("lemma", 0, 0)

        assert record.verdict in {"pass", "vacuous-pass"}
        assert record.passed
        assert record.roots


class TestSuiteNames(CalculusUnitTestFixtures):
    def test_given_all_when_suite_names_then_every_suite(self):
        assert suite_names("all") == list(SUITES)

    def test_given_single_name_when_suite_names_then_that_name(self):
        assert suite_names("pde") == ["pde"]

    def test_given_unknown_name_when_suite_names_then_key_error(self):
        with pytest.raises(KeyError):
            suite_names("nonexistent")

    def test_given_unknown_name_when_run_suite_then_key_error(self):
        with pytest.raises(KeyError):
            run_suite("nonexistent")
