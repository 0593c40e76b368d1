from __future__ import annotations

from functools import lru_cache

import pytest

from adaptscan import load_model
from adaptscan.dynsim import sample_equilibria
from adaptscan.model import uniform

ACCEPTANCE_LINES: list[str] = []

SEEDS = (0, 1, 2, 3, 4)
N_SAMPLES = 500


@lru_cache(maxsize=None)
def model(name: str):
    return load_model(name)


@lru_cache(maxsize=None)
def table_dataset(seed: int):
    """Protein equilibria with a randomised input; the exogenous symbols
    keep their model spreads."""
    return sample_equilibria(model("protein"), N_SAMPLES, seed, overrides={"I": uniform(0.9, 1.1)})


@lru_cache(maxsize=None)
def lcd_dataset(seed: int):
    """Protein equilibria with MEK activity as the context variable."""
    overrides = {"k_me": uniform(0.98, 1.1), "k_Fee": uniform(0.7, 1.0)}
    return sample_equilibria(model("protein"), N_SAMPLES, seed, overrides=overrides)


@pytest.fixture
def corpus():
    return model


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
