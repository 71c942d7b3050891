import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def eu():
    """Shared heavy EU28 artifacts, computed once per test session."""
    from votedim.analysis import EUAnalysis
    return EUAnalysis.shared()
