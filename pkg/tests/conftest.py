"""Shared fixtures: the desk-scale field catalogue used across the suite."""

from __future__ import annotations

import pytest

from qprog.field import get_field, prime_power

# canonical test fields: every odd prime power up to 121 that the suite scans
Q_SMALL = [3, 5, 7, 9, 11, 13]
Q_MEDIUM = Q_SMALL + [25, 27, 49]
Q_FULL = Q_MEDIUM + [81, 121]


def field_for(q: int):
    return get_field(*prime_power(q))


@pytest.fixture(params=Q_MEDIUM, ids=lambda q: f"q{q}")
def ctx_medium(request):
    return field_for(request.param)


@pytest.fixture(params=Q_SMALL, ids=lambda q: f"q{q}")
def ctx_small(request):
    return field_for(request.param)
