"""Shared fixtures: fixture paths, parsed modules, and the network guard.

No test in the default suite may touch the network; the autouse guard makes
any socket connection attempt fail loudly.
"""

from __future__ import annotations

import socket
from pathlib import Path

import pytest

from typeflow.datasets import read_dataset
from typeflow.frontend import TargetKind, TargetVariable, parse_module

FIXTURES = Path(__file__).parent / "fixtures"
MINICORPUS = FIXTURES / "minicorpus"
GOLDEN = FIXTURES / "golden"
SETTINGS_FIXTURE = FIXTURES / "webapp_settings.py"


@pytest.fixture(autouse=True)
def no_network(monkeypatch):
    """Fail any attempted socket connection."""

    def guard(*args, **kwargs):
        raise RuntimeError("network access is forbidden in the test suite")

    monkeypatch.setattr(socket.socket, "connect", guard)
    monkeypatch.setattr(socket, "create_connection", guard)


@pytest.fixture(scope="session")
def settings_module():
    return parse_module(SETTINGS_FIXTURE.read_text(), str(SETTINGS_FIXTURE))


@pytest.fixture(scope="session")
def databases_target():
    return TargetVariable(
        TargetKind.GLOBAL_VARIABLE, "DATABASES", None, 71, 0,
        "dict[str, dict[str, str]]",
    )


@pytest.fixture(scope="session")
def minicorpus_dataset():
    return read_dataset(MINICORPUS / "dataset.jsonl")


def read_golden(name: str) -> str:
    return (GOLDEN / name).read_text()
