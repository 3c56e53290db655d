import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def nested_trade_text() -> str:
    return (FIXTURES / "nested.csv").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def wheel5():
    return json.loads((FIXTURES / "wheel5.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def wheel7():
    return json.loads((FIXTURES / "wheel7.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def nested_m():
    """The fully nested 3x4 example matrix (not the trade-derived one)."""
    from ecp import SpecializationMatrix

    return SpecializationMatrix(
        ("c1", "c2", "c3"), ("p1", "p2", "p3", "p4"), "t0",
        np.array([[1, 1, 1, 1], [1, 1, 0, 0], [1, 0, 0, 0]], dtype=np.uint8),
    )


@pytest.fixture(scope="session")
def nested_workspace(nested_trade_text):
    from ecp import Workspace

    return Workspace.build(
        nested_trade_text,
        indicator_texts={
            "gini": (FIXTURES / "nested_gini.csv").read_text(encoding="utf-8")
        },
        adjacency_text=(FIXTURES / "nested_adjacency.csv").read_text(encoding="utf-8"),
    )
