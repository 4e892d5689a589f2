"""Desk-scale acceptance: every criterion exact, one PASS/FAIL line each."""

from __future__ import annotations

import time

import pytest

from dp2.selftest import CRITERIA, run_criterion


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"{c.number:02d}")
def test_criterion(criterion, record_property):
    t0 = time.perf_counter()
    ok, results = run_criterion(criterion)
    secs = time.perf_counter() - t0
    record_property("acceptance", f"criterion {criterion.number:2d} {'PASS' if ok else 'FAIL'}  {criterion.title}  ({secs:.1f}s)")
    failures = [r.to_json() for r in results if not r.passed]
    assert ok, failures[0]
