import numpy as np
import pytest

from errors import InvalidArgumentError
from syndrome_tables import build_table
from verify_suite import (CHECK_NAMES, CheckResult, VerifyReport, check_crc, check_pattern_deltas,
                          check_partial_order, check_scl_ml, ml_discrepancy, run_verify)


def test_quick_run_passes():
    report = run_verify(samples=20, ml_frames=30, seed=1)
    assert [c.name for c in report.checks] == list(CHECK_NAMES)
    assert report.passed, report.format()
    assert report.format().splitlines()[-1] == "all checks passed"


def test_selected_checks_only():
    report = run_verify(only=["crc", "syndrome-table"])
    assert [c.name for c in report.checks] == ["crc", "syndrome-table"]
    assert all(c.seconds >= 0 for c in report.checks)


def test_unknown_check_name():
    with pytest.raises(InvalidArgumentError):
        run_verify(only=["prop9"])


def test_corrupted_table_fails_the_run():
    table = build_table(8, (True, True) + (False,) * 6, 4)
    rows = list(table.rows)
    rows[0] = (0x00, 0x05, 0x11, 0x81)
    corrupted = type(table)(block_len=8, frozen_mask=table.frozen_mask, l_sd=4,
                            parity_check=table.parity_check, rows=rows)
    report = run_verify(table=corrupted, only=["syndrome-table", "crc"])
    assert not report.passed
    assert [c.name for c in report.failures] == ["syndrome-table"]
    assert "row 00" in report.failures[0].detail
    assert report.format().splitlines()[-1] == "1 check(s) failed"


def test_report_format():
    report = VerifyReport([CheckResult("crc", True, "ok", 0.5), CheckResult("syndrome-table", False, "row 01")])
    lines = report.format().splitlines()
    assert lines[0].startswith("[PASS] crc")
    assert lines[1].startswith("[FAIL] syndrome-table")


def test_crc_check_value():
    assert check_crc().passed


def test_ml_discrepancy():
    llrs = np.array([2.0, -1.0, 0.5])
    codewords = np.array([[0, 0, 0], [0, 1, 1], [1, 1, 1]], dtype=np.uint8)
    assert ml_discrepancy(llrs, codewords) == 0.5


def test_scl_matches_ml_on_tiny_codes():
    result = check_scl_ml(frames=60, seed=7)
    assert result.passed, result.detail


def test_oracle_checks():
    assert check_partial_order(samples=50).passed
    assert check_pattern_deltas(samples=20).passed
