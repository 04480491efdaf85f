from __future__ import annotations

import pytest
from hypothesis import settings
from mpmath import mp, mpf

from qbb import QParams

settings.register_profile("qbb", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("qbb")


def rel(a, b) -> mpf:
    """Relative difference, falling back to absolute near zero."""
    a, b = mpf(a), mpf(b)
    return abs(a - b) / max(abs(b), mpf(1) if b == 0 else abs(b))


@pytest.fixture
def p05() -> QParams:
    return QParams("0.5")


@pytest.fixture
def wp(p05):
    """Run the test body at the working precision of ``p05``."""
    with mp.workprec(p05.workprec):
        yield p05
