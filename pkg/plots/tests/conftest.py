import importlib.resources
from pathlib import Path

import matplotlib.pyplot as plt
import pytest


@pytest.fixture(scope="session")
def samples() -> Path:
    return Path(str(importlib.resources.files("planplots") / "samples"))


@pytest.fixture(autouse=True)
def _close_figures():
    yield
    plt.close("all")
