"""
Shared fixtures.
"""

import pytest

from src.audit.logger import get_auditor


@pytest.fixture(autouse=True)
def fresh_auditor():
    """Each test starts with an empty audit trail."""
    get_auditor().reset()
    yield get_auditor()
