import json
from pathlib import Path

import numpy as np
import pytest

from credalve import load_network

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def fig1_doc() -> dict:
    return json.loads((DATA_DIR / "fig1.json").read_text())


@pytest.fixture(scope="session")
def fig1_net(fig1_doc):
    return load_network(fig1_doc)


@pytest.fixture(scope="session")
def example1():
    """The four binary-pair functions and their 8-d concatenations used by
    the extensive-vs-separate specification fixtures."""
    f1 = np.array([0.14, 0.06, 0.56, 0.24])
    f2 = np.array([0.48, 0.32, 0.12, 0.08])
    f3 = np.array([0.32, 0.08, 0.48, 0.12])
    f4 = np.array([0.63, 0.27, 0.07, 0.03])
    mix = (4 * f1 + 9 * f3) / 13
    l1 = np.concatenate([f1, f2])
    l2 = np.concatenate([f3, f4])
    l3 = np.concatenate([mix, (f2 + f4) / 2])
    return {"f1": f1, "f2": f2, "f3": f3, "f4": f4, "mix": mix,
            "l1": l1, "l2": l2, "l3": l3}


def bounds_gap(a, b) -> float:
    return float(
        max(
            np.abs(a.lower - b.lower).max(),
            np.abs(a.upper - b.upper).max(),
        )
    )


@pytest.fixture(scope="session")
def gap():
    return bounds_gap
