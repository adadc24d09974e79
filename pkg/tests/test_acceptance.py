"""Acceptance criteria, one test per criterion.

Each test records its check line; the lines are printed together in the
terminal summary (see ``conftest.py``).
"""

import pytest

from afshar.checks import (
    check_diffraction_ordering,
    check_duality_bound,
    check_envelope_invariance,
    check_flux,
    check_hygiene,
    check_ideal_family,
    check_oracle,
    run_check,
)

ACCEPTANCE_LINES = []


def _run(check, config):
    result = run_check(check, config)
    ACCEPTANCE_LINES.append(result.line())
    print(result.line())
    assert result.passed, result.line()


def test_criterion_1_ideal_case_family(config):
    _run(check_ideal_family, config)


def test_criterion_2_duality_bound(config):
    _run(check_duality_bound, config)


def test_criterion_3_envelope_invariance(config):
    _run(check_envelope_invariance, config)


def test_criterion_4_diffraction_ordering(config):
    _run(check_diffraction_ordering, config)


def test_criterion_5_flux(config):
    _run(check_flux, config)


def test_criterion_6_two_source_oracle(config):
    _run(check_oracle, config)


@pytest.mark.slow
def test_criterion_7_numerical_hygiene(config):
    _run(check_hygiene, config)
