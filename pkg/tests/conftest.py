"""
Shared fixtures: the bean curve and its envelope are expensive, build them once.
"""

import pytest

from intermediate_lines.curves import bean
from intermediate_lines.envelope import EnvelopeOptions, build_envelope
from intermediate_lines.pair_locus import trace_locus

BEAN_GRID = 128


@pytest.fixture(scope="session")
def bean_curve():
    return bean()


@pytest.fixture(scope="session")
def bean_pairs_06(bean_curve):
    return trace_locus(bean_curve, 0.6, BEAN_GRID)


@pytest.fixture(scope="session")
def bean_pairs_05(bean_curve):
    return trace_locus(bean_curve, 0.5, BEAN_GRID)


@pytest.fixture(scope="session")
def bean_envelope_06(bean_curve):
    options = EnvelopeOptions(grid_n=BEAN_GRID, samples=128, compute_detm=False, oracle=False)
    return build_envelope(bean_curve, 0.6, options)
