"""Graph-theoretic validator: components, flow, feasibility, enumeration."""
from __future__ import annotations

import itertools
import json
import math

import numpy as np
import pytest

from gridswitch import (
    FlowUndefinedError,
    MODE_PAPER,
    MODE_PHYSICAL,
    VariableGuardError,
    bits_from_string,
    bits_to_string,
    brute_force_min,
    build_objective,
    check_feasibility,
    energized_components,
    enumerate_feasible,
    parse_grid,
    physical_currents,
    physical_loss,
    physical_voltages,
)

from .conftest import all_assignments, random_grids

PAPER = bits_from_string("0100111")


def make_grid(blocks, switches, feeders, reference=1.1):
    doc = {
        "blocks": [
            {
                "id": i,
                "load_current": load,
                "resistance": res,
                "max_current": 0.05,
                "max_voltage": 2.0,
                "max_cum_drop": 0.5,
            }
            for i, load, res in blocks
        ],
        "switches": [list(s) for s in switches],
        "feeders": [{"block": b, "voltage": v} for b, v in feeders],
        "reference_voltage": reference,
    }
    return parse_grid(json.dumps(doc))


# -- energized components ---------------------------------------------


def test_components_all_open_are_singletons(six_block_grid):
    comps = energized_components(six_block_grid, [0] * 7)
    assert [c.blocks for c in comps] == [(i,) for i in range(1, 7)]
    assert [c.feeder_blocks for c in comps] == [(), (2,), (), (), (), (6,)]
    assert all(not c.has_cycle for c in comps)
    for c in comps:
        want = {c.blocks[0]: 0} if c.feeder_blocks else {}
        assert dict(c.depth) == want


def test_components_reference_configuration(six_block_grid):
    comps = energized_components(six_block_grid, PAPER)
    assert [c.blocks for c in comps] == [(1, 3, 4, 5, 6), (2,)]
    tree, island = comps
    assert tree.feeder_blocks == (6,)
    assert dict(tree.depth) == {6: 0, 3: 1, 4: 1, 5: 1, 1: 2}
    assert not tree.has_cycle
    assert island.feeder_blocks == (2,)
    assert dict(island.depth) == {2: 0}


def test_components_all_closed_single_cyclic(six_block_grid):
    comps = energized_components(six_block_grid, [1] * 7)
    assert len(comps) == 1
    assert comps[0].blocks == (1, 2, 3, 4, 5, 6)
    assert comps[0].feeder_blocks == (2, 6)
    assert comps[0].has_cycle


def test_components_partition_every_assignment(six_block_grid):
    for bits in all_assignments(7):
        comps = energized_components(six_block_grid, bits)
        seen = [b for c in comps for b in c.blocks]
        assert sorted(seen) == list(range(1, 7))
        assert len(seen) == len(set(seen))


# -- physical flow quantities -----------------------------------------


def test_currents_reference_configuration(six_block_grid):
    got = physical_currents(six_block_grid, PAPER)
    loads = {b: six_block_grid.block(b).load_current for b in range(1, 7)}
    want = {
        1: loads[1],
        2: loads[2],
        3: loads[3],
        4: loads[4] + loads[1],
        5: loads[5],
        6: loads[6] + loads[3] + loads[4] + loads[5] + loads[1],
    }
    assert got.keys() == want.keys()
    for b in want:
        assert math.isclose(got[b], want[b], rel_tol=1e-12)


def test_voltages_reference_configuration(six_block_grid):
    got = physical_voltages(six_block_grid, PAPER)
    res = {b: six_block_grid.block(b).resistance for b in range(1, 7)}
    cur = physical_currents(six_block_grid, PAPER)
    v6 = 1.05 - res[6] * cur[6]
    want = {
        2: 1.05,
        6: 1.05,
        3: v6,
        4: v6,
        5: v6,
        1: v6 - res[4] * cur[4],
    }
    for b, v in want.items():
        assert math.isclose(got[b], v, rel_tol=1e-12)


def test_loss_is_resistance_weighted_square_sum(six_block_grid, six_block_bundle):
    loss = physical_loss(six_block_grid, PAPER)
    cur = physical_currents(six_block_grid, PAPER)
    manual = sum(
        six_block_grid.block(b).resistance * cur[b] ** 2 for b in range(1, 7)
    )
    assert math.isclose(loss, manual, rel_tol=1e-12)
    assert math.isclose(loss, six_block_bundle.power.eval(PAPER), rel_tol=1e-9)


def test_flow_undefined_for_unfed_component(six_block_grid):
    with pytest.raises(FlowUndefinedError, match="0 feeders"):
        physical_currents(six_block_grid, bits_from_string("0010100"))


def test_flow_undefined_for_double_fed_tree(six_block_grid):
    with pytest.raises(FlowUndefinedError, match="2 feeders"):
        physical_currents(six_block_grid, bits_from_string("1010111"))


def test_single_block_grid_flow():
    g = make_grid([(1, 0.004, 0.02)], [], [(1, 1.0)])
    assert physical_currents(g, []) == {1: 0.004}
    assert physical_voltages(g, []) == {1: 1.0}
    assert math.isclose(physical_loss(g, []), 0.02 * 0.004**2, rel_tol=1e-12)


def test_two_block_chain_child_voltage():
    g = make_grid([(1, 0.004, 0.02), (2, 0.003, 0.01)], [(1, 2)], [(1, 1.0)])
    volts = physical_voltages(g, [1])
    feeder_current = 0.004 + 0.003
    assert volts[1] == 1.0
    assert math.isclose(volts[2], 1.0 - 0.02 * feeder_current, rel_tol=1e-12)


def test_current_conservation_identity(six_block_grid):
    """Summing per-block currents counts each load once per tree level."""
    loads = {b: six_block_grid.block(b).load_current for b in range(1, 7)}
    checked = 0
    for bits in all_assignments(7):
        comps = energized_components(six_block_grid, bits)
        if any(len(c.feeder_blocks) != 1 or c.has_cycle for c in comps):
            continue
        cur = physical_currents(six_block_grid, bits)
        depth = {b: d for c in comps for b, d in c.depth.items()}
        want = sum((1 + depth[b]) * loads[b] for b in range(1, 7))
        assert math.isclose(sum(cur.values()), want, rel_tol=1e-9)
        for c in comps:
            feeder = c.feeder_blocks[0]
            assert math.isclose(
                cur[feeder], sum(loads[b] for b in c.blocks), rel_tol=1e-9
            )
        checked += 1
    assert checked > 0


@pytest.mark.parametrize("seed", [121, 122])
def test_current_conservation_on_random_grids(seed):
    for grid in random_grids(seed, count=4, generous_limits=True):
        loads = {b: grid.block(b).load_current for b in grid.block_ids}
        for bits in itertools.islice(all_assignments(grid.n_vars), 64):
            comps = energized_components(grid, bits)
            if any(len(c.feeder_blocks) != 1 or c.has_cycle for c in comps):
                continue
            cur = physical_currents(grid, bits)
            for c in comps:
                feeder = c.feeder_blocks[0]
                assert math.isclose(
                    cur[feeder], sum(loads[b] for b in c.blocks), rel_tol=1e-9
                )


# -- feasibility reports ----------------------------------------------


def test_physical_report_reference_configuration(six_block_grid):
    r = check_feasibility(six_block_grid, PAPER)
    assert r.mode == MODE_PHYSICAL
    assert r.feasible
    assert r.violations == ()
    assert r.currents and r.voltages
    assert r.loss_watts is not None and r.loss_watts > 0


def test_physical_report_ring_collects_all_violations(six_block_grid):
    r = check_feasibility(six_block_grid, bits_from_string("0011101"))
    assert not (r.radial_ok or r.maxconn_ok or r.blackout_ok)
    codes = sorted(v.code for v in r.violations)
    assert codes == [
        "BLACKOUT_UNFED",
        "BLACKOUT_UNFED",
        "MAXCONN_CYCLE",
        "RADIAL_TWO_FEEDERS",
    ]
    by_code = {v.code: v for v in r.violations}
    assert by_code["RADIAL_TWO_FEEDERS"].blocks == (2, 6)
    assert by_code["MAXCONN_CYCLE"].blocks == (2, 3, 5, 6)
    assert not r.currents and r.loss_watts is None


def test_physical_report_depth_limit():
    g = make_grid(
        [(i, 0.002, 0.01) for i in (1, 2, 3, 4)],
        [(1, 2), (2, 3), (3, 4)],
        [(1, 1.05)],
    )
    r = check_feasibility(g, [1, 1, 1])
    assert not r.maxconn_ok
    deep = [v for v in r.violations if v.code == "MAXCONN_DEPTH"]
    assert len(deep) == 1
    assert deep[0].blocks == (4,)
    assert deep[0].value == 3.0


@pytest.mark.parametrize("mode", [MODE_PHYSICAL, MODE_PAPER])
def test_all_open_blackout_both_modes(six_block_grid, mode):
    r = check_feasibility(six_block_grid, [0] * 7, mode=mode)
    assert not r.blackout_ok
    assert not r.feasible
    dark = sorted(
        b for v in r.violations if v.code == "BLACKOUT_UNFED" for b in v.blocks
    )
    assert dark == [1, 3, 4, 5]


def test_paper_report_reference_configuration(six_block_grid):
    r = check_feasibility(six_block_grid, PAPER, mode=MODE_PAPER)
    assert r.mode == MODE_PAPER
    assert r.radial_ok and r.blackout_ok
    assert not r.maxconn_ok
    assert not r.feasible
    hits = [v for v in r.violations if v.code == "MAXCONN_MONOMIAL"]
    assert [v.switches for v in hits] == [
        ((1, 4), (3, 6), (4, 6)),
        ((1, 4), (4, 6), (5, 6)),
        ((3, 6), (4, 6), (5, 6)),
    ]


def test_paper_report_penalty_values(six_block_grid):
    params_c = 26.734679999999997
    r = check_feasibility(six_block_grid, PAPER, mode=MODE_PAPER)
    assert set(r.penalties) == {
        "radial",
        "maxconn",
        "blackout",
        "current",
        "max_voltage",
        "min_voltage",
    }
    assert r.penalties["radial"] == 0.0
    assert r.penalties["blackout"] == 0.0
    assert math.isclose(r.penalties["maxconn"], 3.0 * params_c, rel_tol=1e-12)


def test_paper_report_connected_feeders(six_block_grid):
    r = check_feasibility(six_block_grid, bits_from_string("0010100"), mode=MODE_PAPER)
    assert not r.radial_ok
    hits = [v for v in r.violations if v.code == "RADIAL_CONNECTED_FEEDERS"]
    assert len(hits) == 1
    assert hits[0].blocks == (2, 6)
    assert hits[0].switches == ((2, 3), (3, 6))


def test_report_round_trips_through_dict(six_block_grid):
    r = check_feasibility(six_block_grid, PAPER, mode=MODE_PAPER)
    doc = json.loads(json.dumps(r.to_dict()))
    assert doc["mode"] == "paper"
    assert doc["feasible"] is False
    assert doc["maxconn_ok"] is False
    assert len(doc["violations"]) == 3


def test_report_rejects_bad_assignment(six_block_grid):
    with pytest.raises(ValueError):
        check_feasibility(six_block_grid, [0, 1])
    with pytest.raises(ValueError):
        check_feasibility(six_block_grid, [0, 1, 2, 0, 0, 0, 0])


def test_unknown_mode_rejected(six_block_grid):
    with pytest.raises(ValueError):
        check_feasibility(six_block_grid, [0] * 7, mode="fancy")


# -- mode relation ----------------------------------------------------


def test_paper_feasible_implies_physical_connectivity(six_block_grid):
    for bits in all_assignments(7):
        paper = check_feasibility(six_block_grid, bits, mode=MODE_PAPER)
        if paper.feasible:
            phys = check_feasibility(six_block_grid, bits)
            assert phys.radial_ok and phys.blackout_ok


def test_physical_feasible_but_paper_infeasible_witness(six_block_grid):
    assert check_feasibility(six_block_grid, PAPER).feasible
    assert not check_feasibility(six_block_grid, PAPER, mode=MODE_PAPER).feasible


def test_encoded_currents_match_flow_when_connectivity_clean(six_block_grid, six_block_bundle):
    units = (
        six_block_bundle.radial_unit,
        six_block_bundle.maxconn_unit,
        six_block_bundle.blackout_unit,
    )
    checked = 0
    for bits in all_assignments(7):
        if any(u.eval(bits) != 0.0 for u in units):
            continue
        flow = physical_currents(six_block_grid, bits)
        for b in range(1, 7):
            enc = six_block_bundle.per_block_current[b].eval(bits)
            assert math.isclose(enc, flow[b], rel_tol=1e-9, abs_tol=1e-15)
        checked += 1
    assert checked >= 4


# -- enumeration ------------------------------------------------------


def test_enumerate_counts_and_order(six_block_grid):
    phys = enumerate_feasible(six_block_grid)
    paper = enumerate_feasible(six_block_grid, mode=MODE_PAPER)
    assert len(phys) == 12
    assert len(paper) == 4
    assert [bits_to_string(b) for b, _ in paper] == [
        "1010011",
        "1001110",
        "1100101",
        "0111010",
    ]
    losses = [loss for _, loss in phys]
    assert losses == sorted(losses)
    assert {b for b, _ in paper} <= {b for b, _ in phys}


def test_enumerate_head_is_loss_minimizer(six_block_grid):
    rows = enumerate_feasible(six_block_grid)
    best_bits, best_loss = rows[0]
    assert best_bits == bits_from_string("1010011")
    assert all(best_loss <= loss for _, loss in rows)


def test_enumerate_switchless_grid_has_single_empty_row():
    g = make_grid(
        [(1, 0.004, 0.02), (2, 0.003, 0.01)],
        [],
        [(1, 1.0), (2, 1.0)],
    )
    rows = enumerate_feasible(g)
    assert len(rows) == 1
    bits, loss = rows[0]
    assert bits == ()
    assert math.isclose(loss, 0.02 * 0.004**2 + 0.01 * 0.003**2, rel_tol=1e-12)


def test_enumerate_starved_grid_is_empty():
    doc = {
        "blocks": [
            {
                "id": 1,
                "load_current": 0.004,
                "resistance": 0.02,
                "max_current": 0.003,
                "max_voltage": 2.0,
                "max_cum_drop": 0.5,
            }
        ],
        "switches": [],
        "feeders": [{"block": 1, "voltage": 1.0}],
        "reference_voltage": 1.1,
    }
    assert enumerate_feasible(parse_grid(json.dumps(doc))) == []


def test_enumerate_guard():
    g = make_grid(
        [(i, 0.001, 0.01) for i in range(1, 9)],
        [(i, j) for i in range(1, 9) for j in range(i + 1, 9)],
        [(1, 1.05)],
    )
    assert g.n_vars == 28
    with pytest.raises(VariableGuardError):
        enumerate_feasible(g)


@pytest.mark.parametrize("mode", [MODE_PHYSICAL, MODE_PAPER])
def test_enumerate_worker_count_does_not_change_rows(six_block_grid, mode):
    one = enumerate_feasible(six_block_grid, mode=mode, workers=1)
    four = enumerate_feasible(six_block_grid, mode=mode, workers=4)
    assert one == four


def test_enumerate_matches_bruteforce_scan_on_random_grids():
    rng = np.random.default_rng(131)
    for grid in random_grids(132, count=3, generous_limits=True):
        rows = enumerate_feasible(grid)
        manual = sorted(
            (
                (bits, physical_loss(grid, bits))
                for bits in all_assignments(grid.n_vars)
                if check_feasibility(grid, bits).feasible
            ),
            key=lambda r: (r[1], r[0]),
        )
        assert rows == manual
