"""Shared fixtures: the six-block demo grid and seeded random-grid factories."""
from __future__ import annotations

import itertools
import json
from pathlib import Path

import numpy as np
import pytest

from gridswitch import Grid, build_objective, parse_grid

DEMO_GRID_PATH = Path(__file__).resolve().parent.parent / "demos" / "grids" / "six-block.json"

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def six_block_grid() -> Grid:
    return parse_grid(DEMO_GRID_PATH.read_text())


@pytest.fixture(scope="session")
def six_block_bundle(six_block_grid):
    return build_objective(six_block_grid)


@pytest.fixture(scope="session")
def six_block_doc() -> dict:
    return json.loads(DEMO_GRID_PATH.read_text())


def all_assignments(n: int):
    """Every 0/1 tuple of length n, lexicographic (0...0 first)."""
    return itertools.product((0, 1), repeat=n)


def make_random_grid(rng: np.random.Generator, max_blocks: int = 6, max_switches: int = 8,
                     generous_limits: bool = False) -> Grid:
    """A structurally valid random grid.

    With ``generous_limits`` the current/voltage/drop ceilings are far above
    anything reachable, so only the connectivity rules decide feasibility.
    """
    n_blocks = int(rng.integers(2, max_blocks + 1))
    ids = list(range(1, n_blocks + 1))
    loads = rng.uniform(0.001, 0.005, n_blocks)
    resistances = rng.uniform(0.005, 0.02, n_blocks)
    total_load = float(loads.sum())

    pairs = [(i, j) for i in ids for j in ids if i < j]
    order = rng.permutation(len(pairs))
    n_switches = int(rng.integers(1, min(max_switches, len(pairs)) + 1))
    switches = sorted(pairs[k] for k in order[:n_switches])

    n_feeders = int(rng.integers(1, min(3, n_blocks) + 1))
    feeder_blocks = sorted(int(b) for b in rng.choice(ids, size=n_feeders, replace=False))
    feeder_voltage = 1.05

    if generous_limits:
        max_current = 4.0 * total_load
        max_voltage = 3.0 * feeder_voltage
        max_cum_drop = 0.5
    else:
        max_current = float(rng.uniform(1.5, 5.0)) * total_load
        max_voltage = float(rng.uniform(1.2, 3.0)) * feeder_voltage
        max_cum_drop = float(rng.uniform(0.1, 0.6))

    doc = {
        "blocks": [
            {
                "id": i,
                "load_current": float(loads[i - 1]),
                "resistance": float(resistances[i - 1]),
                "max_current": max_current,
                "max_voltage": max_voltage,
                "max_cum_drop": max_cum_drop,
            }
            for i in ids
        ],
        "feeders": [{"block": b, "voltage": feeder_voltage} for b in feeder_blocks],
        "switches": [list(pair) for pair in switches],
        "reference_voltage": 1.2,
    }
    return parse_grid(json.dumps(doc))


def random_grids(seed: int, count: int, **kwargs):
    """A deterministic list of random grids."""
    rng = np.random.default_rng(seed)
    return [make_random_grid(rng, **kwargs) for _ in range(count)]
