from __future__ import annotations

from pathlib import Path

import pytest

from costreach import rprs

SYSTEMS = Path(__file__).resolve().parent.parent / "systems"


@pytest.fixture(scope="session")
def basic():
    return rprs.example_system()


@pytest.fixture(scope="session")
def systems_dir():
    return SYSTEMS


@pytest.fixture(scope="session")
def basic_path():
    return str(SYSTEMS / "basic.rprs")
