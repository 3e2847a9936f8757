import os
from pathlib import Path

import pytest

SCENARIOS = Path(os.environ.get("PCN_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios"))


@pytest.fixture
def scenario():
    import pcnsim

    return lambda name: pcnsim.Scenario.load(str(SCENARIOS / name))
