# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

import json
import logging
import subprocess
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

logger = logging.getLogger(__name__)

TIMEOUT = 60 * 60


def _run(*argv: str, timeout: int = 600) -> Tuple[int, Optional[Dict[str, Any]]]:
    completed = subprocess.run(
        [sys.executable, "-m", "laguerre_calculus", *argv],
        capture_output=True,
        text=True,
        timeout=timeout,
    )
    if completed.stderr:
        logger.info("stderr of %s: %s", argv[0], completed.stderr)
    document = json.loads(completed.stdout) if completed.stdout.strip() else None
    return completed.returncode, document


def test_given_all_suites_when_verified_then_every_suite_passes(
    tmp_path: Path, suite_workers: int, suite_seed: int
):
    output = tmp_path / "records.jsonl"

    code, document = _run(
        "verify",
        "--suite", "all",
        "--seed", str(suite_seed),
        "--workers", str(suite_workers),
        "--output", str(output),
        timeout=TIMEOUT,
    )

    assert document is not None
    failing = [summary for summary in document["suites"] if not summary["passed"]]
    assert code == 0, failing
    assert document["passed"] is True
    records = output.read_text().splitlines()
    assert len(records) == sum(summary["trials"] for summary in document["suites"])
    assert all(json.loads(line)["passed"] for line in records)


def test_given_same_seed_when_suite_rerun_with_workers_then_records_identical(
    tmp_path: Path, suite_workers: int
):
    serial = tmp_path / "serial.jsonl"
    parallel = tmp_path / "parallel.jsonl"

    _run("verify", "--suite", "theorem", "--trials", "200", "--seed", "3", "--output", str(serial))
    _run(
        "verify", "--suite", "theorem", "--trials", "200", "--seed", "3",
        "--workers", str(max(2, suite_workers)), "--output", str(parallel),
    )

    assert serial.read_text() == parallel.read_text()


def test_given_laguerre_command_when_run_then_exact_coefficients():
    code, document = _run("laguerre", "--n", "2", "--theta", "1")

    assert code == 0
    assert document == {"coeffs": [2, -4, 1]}


def test_given_norm_command_when_run_then_weighted_sup():
    code, document = _run("norm", "--b", "2", "--poly", '{"coeffs": [0, 1]}')

    assert code == 0
    assert document is not None
    assert document["value"] == 0.5


def test_given_stabilize_command_when_run_then_profile_written(tmp_path: Path):
    output = tmp_path / "profile.csv"

    code, document = _run(
        "stabilize", "--epsilon", "1", "--theta", "1",
        "--times", "0,1,2,5,10,100,1000", "--output", str(output),
    )

    assert code == 0
    assert document is not None
    assert document["rows"][-1][1] <= 1.1e-3
    assert output.read_text().splitlines()[0] == "t,sup_norm"


def test_given_rule_dump_command_when_run_then_rule_written(tmp_path: Path):
    output = tmp_path / "rule.csv"

    code, document = _run("rule-dump", "--theta", "1.5", "--order", "80", "--output", str(output))

    assert code == 0
    assert document is not None
    assert document["max_moment_error"] <= 1e-10
    assert len(output.read_text().splitlines()) == 81


def test_given_malformed_document_when_run_then_exit_code_two():
    code, document = _run("apply", "--phi", "{", "--poly", '{"coeffs": [1]}', "--theta", "1")

    assert code == 2
    assert document is None


def test_given_unknown_suite_when_verify_then_exit_code_two():
    code, _ = _run("verify", "--suite", "nonexistent")

    assert code == 2
