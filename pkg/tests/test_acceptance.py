"""Acceptance suite: every criterion at its stated tolerance, one line each.

Runs the full verification suite once at the reference 256x256 resolution and
asserts each criterion's records.  Check lines are printed so the run log
carries one pass/fail line per verified statement.
"""

import pytest

from nvortex import run_acceptance


@pytest.fixture(scope="module")
def records():
    return run_acceptance(nr=256)


def _criterion(records, k):
    recs = [r for r in records if r.criterion == k]
    assert recs, f"no records for criterion {k}"
    for rec in recs:
        print(rec.line())
    return recs


def _assert_all(recs):
    failed = [r for r in recs if not r.passed]
    assert not failed, "; ".join(f"{r.name}: {r.detail}" for r in failed)


def test_criterion_01_interior_flux_quantization(records):
    _assert_all(_criterion(records, 1))


def test_criterion_02_boundary_flux_quantization(records):
    _assert_all(_criterion(records, 2))


def test_criterion_03_energy_quantization(records):
    _assert_all(_criterion(records, 3))


def test_criterion_04_existence_gate_equivalence(records):
    _assert_all(_criterion(records, 4))


def test_criterion_05_cross_solver_agreement(records):
    _assert_all(_criterion(records, 5))


def test_criterion_06_shooting_setup(records):
    _assert_all(_criterion(records, 6))


def test_criterion_07_moduli_nonlocality(records):
    _assert_all(_criterion(records, 7))


def test_criterion_08_symmetry_suite(records):
    _assert_all(_criterion(records, 8))


def test_criterion_09_boundary_energy_peak_inside(records):
    _assert_all(_criterion(records, 9))


def test_criterion_10_green_function_suite(records):
    _assert_all(_criterion(records, 10))


def test_summary_all_criteria_pass(records):
    failed = [r for r in records if not r.passed]
    print(f"{len(records) - len(failed)}/{len(records)} acceptance checks passed")
    assert not failed
