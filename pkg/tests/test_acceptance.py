"""The acceptance gate: nine criteria, one test line each.

The suite is executed through the real console entry point, twice, in
separate processes. Criteria 1 through 8 are asserted from the first
report's entries; criterion 9 is asserted from byte-identity of the two
process outputs together with the report's own determinism entry, which
covers the in-process rerun and the five-minute budget.
"""

import json
import subprocess
import sys

import pytest

SEED = "0"


def _suite_run():
    return subprocess.run(
        [sys.executable, "-m", "ordfrag.cli", "suite", "run", "--seed", SEED],
        capture_output=True, timeout=1800)


@pytest.fixture(scope="module")
def runs():
    first = _suite_run()
    second = _suite_run()
    assert first.returncode in (0, 1), first.stderr.decode()
    assert second.returncode in (0, 1), second.stderr.decode()
    return first, second


@pytest.fixture(scope="module")
def report(runs):
    doc = json.loads(runs[0].stdout)
    assert doc["v"] == 1 and doc["kind"] == "acceptance-report"
    return {c["id"]: c for c in doc["criteria"]}


def _details(report, n):
    entry = report[n]
    assert entry["passed"], entry["details"]
    return entry["details"]


def test_criterion_1_admissibility_on_200_seeded_trees(report):
    d = _details(report, 1)
    assert d["instances"] == 200
    assert d["clean"] == 200
    assert d["runtime_ok"] is True


def test_criterion_2_matching_oracle_full_agreement(report):
    d = _details(report, 2)
    assert d["instances"] == 1000
    assert d["agree"] == 1000
    assert d["witnesses_revalidated"] == 1000


def test_criterion_3_construction_postconditions(report):
    d = _details(report, 3)
    assert d["verified"] == 500
    assert d["noroom_with_room"] == 0
    assert d["sibling_confirmed"] == d["sibling_instances"] == 40


def test_criterion_4_open_partitions_accept_and_refuse(report):
    d = _details(report, 4)
    assert d["accepted_verified"] == d["accepted"]
    assert d["refusals"] == d["counting_violators"] == 100
    assert d["depth3_candidates"] == 27
    assert d["depth3_valid"] == 0


def test_criterion_5_decomposition_pipeline(report):
    d = _details(report, 5)
    assert d["chains"] == 61
    assert d["ordinal_instances"] == 1
    assert d["degree_cross_checks"] > 0
    assert d["problems"] == []


def test_criterion_6_density_pipeline_exact_rationals(report):
    d = _details(report, 6)
    assert d["instances"] == 62
    assert d["subsets"] == 62 * 20
    assert d["guarantee_failures"] == 0


def test_criterion_7_namioka_checker_and_negative_controls(report):
    d = _details(report, 7)
    assert d["passes"] == d["instances"]
    assert d["scaled_control_caught"] == d["instances"]
    assert d["dropped_control_caught"] == d["instances"]


def test_criterion_8_weight_bound_with_exact_margins(report):
    d = _details(report, 8)
    assert d["bound_held"] == d["simple_instances"] > 0
    assert d["miniature_margins"] == {
        str(k): [2 ** k, 2 ** k - 1, -1] for k in range(2, 7)
    }


def test_criterion_9_determinism_byte_identical_reports(runs, report):
    first, second = runs
    assert first.stdout == second.stdout
    assert first.returncode == second.returncode == 0
    d = _details(report, 9)
    assert d["identical"] is True
    assert d["runtime_ok"] is True
