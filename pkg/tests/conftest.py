"""Shared test fixtures."""

from __future__ import annotations

import numpy as np
import pytest

from oscint.curve import SupportCurve
from oscint.curves.definitions import CURVE_REGISTRY

J01 = 2.404825557695773
J02 = 5.520078110286311
J03 = 8.653727912911013
J11 = 3.831705970207512
J21 = 5.135622301840683


@pytest.fixture
def disk() -> SupportCurve:
    return CURVE_REGISTRY["disk"].curve


@pytest.fixture
def ellipse() -> SupportCurve:
    """Semi-axes 1.5 and 1."""
    return CURVE_REGISTRY["ellipse"].curve


@pytest.fixture
def ellipse21() -> SupportCurve:
    return CURVE_REGISTRY["ellipse21"].curve


@pytest.fixture
def reuleaux() -> SupportCurve:
    """h = 1 + 0.05 cos 3θ, constant width 2."""
    return CURVE_REGISTRY["reuleaux3"].curve


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


@pytest.fixture
def curve_file(tmp_path):
    """Write a curve JSON file and return its path."""

    def _write(text: str, name: str = "curve.json"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
