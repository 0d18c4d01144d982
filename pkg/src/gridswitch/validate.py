"""Feasibility checking: graph-theoretic oracle and penalty evaluation.

Physical mode derives everything from the closed-switch graph itself:
connected components, feeder membership, hop depths, tree flow.  It
never touches the polynomial encoding, which makes it an independent
cross-check on the objective builder.  Paper mode is the opposite: each
verdict comes from evaluating the corresponding penalty polynomial, so
it reports exactly what the optimizer penalizes.  The modes deliberately
diverge on groups whose feeder sits mid-group with branches: physical
mode accepts them (every block within two hops of its feeder), the
penalty polynomials do not.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from .errors import FlowUndefinedError, VariableGuardError
from .grid import Grid
from .objective import PenaltyParams, blackout_block_poly, build_objective, default_penalty_params, radial_pair_poly
from .poly import Poly

MODE_PHYSICAL = "physical"
MODE_PAPER = "paper"
_ENUMERATE_GUARD = 24


@dataclass(frozen=True)
class EnergizedComponent:
    """A maximal group of blocks connected by closed switches."""

    blocks: tuple[int, ...]
    feeder_blocks: tuple[int, ...]
    depth: Mapping[int, int]
    has_cycle: bool


@dataclass(frozen=True)
class Violation:
    """One structured finding; ``code`` is machine-readable."""

    code: str
    blocks: tuple[int, ...] = ()
    switches: tuple[tuple[int, int], ...] = ()
    value: float | None = None

    def to_dict(self) -> dict:
        doc: dict = {"code": self.code}
        if self.blocks:
            doc["blocks"] = list(self.blocks)
        if self.switches:
            doc["switches"] = [list(s) for s in self.switches]
        if self.value is not None:
            doc["value"] = self.value
        return doc


@dataclass(frozen=True)
class FeasibilityReport:
    """Per-constraint verdicts plus physical quantities when flow is
    well-defined (single-feeder tree components).

    In paper mode ``penalties`` carries the raw evaluated penalty values
    and the six booleans reflect exact zeros (connectivity) or strict
    ratio bounds (limits)."""

    mode: str
    radial_ok: bool
    maxconn_ok: bool
    blackout_ok: bool
    current_ok: bool
    max_v_ok: bool
    min_v_ok: bool
    violations: tuple[Violation, ...] = ()
    currents: Mapping[int, float] = field(default_factory=dict)
    voltages: Mapping[int, float] = field(default_factory=dict)
    loss_watts: float | None = None
    penalties: Mapping[str, float] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return (
            self.radial_ok
            and self.maxconn_ok
            and self.blackout_ok
            and self.current_ok
            and self.max_v_ok
            and self.min_v_ok
        )

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "feasible": self.feasible,
            "radial_ok": self.radial_ok,
            "maxconn_ok": self.maxconn_ok,
            "blackout_ok": self.blackout_ok,
            "current_ok": self.current_ok,
            "max_v_ok": self.max_v_ok,
            "min_v_ok": self.min_v_ok,
            "violations": [v.to_dict() for v in self.violations],
            "currents": {b: self.currents[b] for b in sorted(self.currents)},
            "voltages": {b: self.voltages[b] for b in sorted(self.voltages)},
            "loss_watts": self.loss_watts,
            "penalties": dict(self.penalties),
        }


def _check_assignment(grid: Grid, a: Sequence[int]) -> tuple[int, ...]:
    if len(a) != grid.n_vars:
        raise ValueError(f"assignment covers {len(a)} of {grid.n_vars} switch variables")
    bits = tuple(int(b) for b in a)
    if any(b not in (0, 1) for b in bits):
        raise ValueError("assignment entries must be 0 or 1")
    return bits


def _closed_adjacency(grid: Grid, bits: Sequence[int]) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {b: [] for b in grid.block_ids}
    for (i, j), bit in zip(grid.variable_order(), bits):
        if bit:
            adj[i].append(j)
            adj[j].append(i)
    return adj


def energized_components(grid: Grid, a: Sequence[int]) -> list[EnergizedComponent]:
    """Connected components of the closed-switch graph, with feeder
    membership, hop depth from the nearest feeder, and cycle flags."""
    bits = _check_assignment(grid, a)
    adj = _closed_adjacency(grid, bits)
    seen: set[int] = set()
    comps: list[EnergizedComponent] = []
    for start in grid.block_ids:
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            b = queue.popleft()
            comp.append(b)
            for nb in adj[b]:
                if nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
        comp.sort()
        members = set(comp)
        n_edges = sum(
            1
            for (i, j), bit in zip(grid.variable_order(), bits)
            if bit and i in members
        )
        feeders = tuple(b for b in comp if grid.has_feeder(b))
        depth: dict[int, int] = {}
        if feeders:
            queue = deque(feeders)
            for f in feeders:
                depth[f] = 0
            while queue:
                b = queue.popleft()
                for nb in adj[b]:
                    if nb not in depth:
                        depth[nb] = depth[b] + 1
                        queue.append(nb)
        comps.append(
            EnergizedComponent(
                blocks=tuple(comp),
                feeder_blocks=feeders,
                depth=depth,
                has_cycle=n_edges >= len(comp),
            )
        )
    return comps


def _flow_tree(grid: Grid, bits: tuple[int, ...], comps: list[EnergizedComponent]):
    """Parent pointers and traversal order for single-feeder tree flow."""
    for c in comps:
        if len(c.feeder_blocks) != 1 or c.has_cycle:
            raise FlowUndefinedError(
                f"component {c.blocks} has {len(c.feeder_blocks)} feeders"
                + (" and a cycle" if c.has_cycle else "")
            )
    adj = _closed_adjacency(grid, bits)
    parent: dict[int, int | None] = {}
    order: list[int] = []
    for c in comps:
        root = c.feeder_blocks[0]
        parent[root] = None
        queue = deque([root])
        while queue:
            b = queue.popleft()
            order.append(b)
            for nb in adj[b]:
                if nb not in parent:
                    parent[nb] = b
                    queue.append(nb)
    return parent, order


def physical_currents(grid: Grid, a: Sequence[int]) -> dict[int, float]:
    """Tree-flow current per block: own load plus all descendant loads."""
    bits = _check_assignment(grid, a)
    comps = energized_components(grid, bits)
    parent, order = _flow_tree(grid, bits, comps)
    current = {b: grid.block(b).load_current for b in grid.block_ids}
    for b in reversed(order):
        p = parent[b]
        if p is not None:
            current[p] += current[b]
    return current


def physical_voltages(grid: Grid, a: Sequence[int]) -> dict[int, float]:
    """Voltage per block: feeder value at the root, then each child sits
    one parent-drop below its parent."""
    bits = _check_assignment(grid, a)
    comps = energized_components(grid, bits)
    parent, order = _flow_tree(grid, bits, comps)
    current = physical_currents(grid, bits)
    voltage: dict[int, float] = {}
    for b in order:
        p = parent[b]
        if p is None:
            voltage[b] = grid.feeder_voltage(b)
        else:
            voltage[b] = voltage[p] - current[p] * grid.block(p).resistance
    return voltage


def physical_loss(grid: Grid, a: Sequence[int]) -> float:
    """Joule loss sum_b R_b * I_b^2 under tree flow."""
    current = physical_currents(grid, a)
    total = 0.0
    for b in grid.block_ids:
        total += grid.block(b).resistance * current[b] ** 2
    return total


@lru_cache(maxsize=32)
def _paper_parts(grid: Grid):
    feeders = grid.feeder_blocks
    pairs = []
    for x in range(len(feeders)):
        for y in range(x + 1, len(feeders)):
            i, j = feeders[x], feeders[y]
            pairs.append(((i, j), radial_pair_poly(grid, i, j)))
    dark = tuple((i, blackout_block_poly(grid, i)) for i in grid.block_ids)
    return tuple(pairs), dark


def _active_switch_terms(grid: Grid, p: Poly, bits: tuple[int, ...]):
    order = grid.variable_order()
    for vs, c in p.items():
        if c != 0.0 and vs and all(bits[v] for v in vs):
            yield tuple(order[v] for v in vs)


def check_feasibility(
    grid: Grid,
    a: Sequence[int],
    mode: str = MODE_PHYSICAL,
    params: PenaltyParams | None = None,
) -> FeasibilityReport:
    """Full per-constraint verdict for one assignment, in either mode."""
    bits = _check_assignment(grid, a)
    if mode == MODE_PHYSICAL:
        return _check_physical(grid, bits)
    if mode == MODE_PAPER:
        return _check_paper(grid, bits, params or default_penalty_params(grid))
    raise ValueError(f"unknown mode {mode!r}")


def _check_physical(grid: Grid, bits: tuple[int, ...]) -> FeasibilityReport:
    comps = energized_components(grid, bits)
    violations: list[Violation] = []
    radial_ok = True
    blackout_ok = True
    maxconn_ok = True
    for c in comps:
        if len(c.feeder_blocks) > 1:
            radial_ok = False
            violations.append(Violation("RADIAL_TWO_FEEDERS", blocks=c.feeder_blocks))
    for c in comps:
        if not c.feeder_blocks:
            blackout_ok = False
            violations.append(Violation("BLACKOUT_UNFED", blocks=c.blocks))
    for c in comps:
        if c.has_cycle:
            maxconn_ok = False
            violations.append(Violation("MAXCONN_CYCLE", blocks=c.blocks))
        deep = tuple(b for b in c.blocks if c.depth.get(b, 0) > 2)
        if deep:
            maxconn_ok = False
            violations.append(
                Violation(
                    "MAXCONN_DEPTH",
                    blocks=deep,
                    value=float(max(c.depth[b] for b in deep)),
                )
            )
    flow_defined = all(len(c.feeder_blocks) == 1 and not c.has_cycle for c in comps)
    currents: dict[int, float] = {}
    voltages: dict[int, float] = {}
    loss: float | None = None
    current_ok = True
    max_v_ok = True
    min_v_ok = True
    if flow_defined:
        currents = physical_currents(grid, bits)
        voltages = physical_voltages(grid, bits)
        loss = physical_loss(grid, bits)
        for b in grid.block_ids:
            blk = grid.block(b)
            if not currents[b] < blk.max_current:
                current_ok = False
                violations.append(Violation("CURRENT_LIMIT", blocks=(b,), value=currents[b]))
        for b in grid.block_ids:
            blk = grid.block(b)
            if not voltages[b] < blk.max_voltage:
                max_v_ok = False
                violations.append(Violation("VOLTAGE_LIMIT", blocks=(b,), value=voltages[b]))
        for b in grid.block_ids:
            blk = grid.block(b)
            drop = grid.reference_voltage - voltages[b]
            if not drop < blk.max_cum_drop:
                min_v_ok = False
                violations.append(Violation("CUM_DROP_LIMIT", blocks=(b,), value=drop))
    return FeasibilityReport(
        mode=MODE_PHYSICAL,
        radial_ok=radial_ok,
        maxconn_ok=maxconn_ok,
        blackout_ok=blackout_ok,
        current_ok=current_ok,
        max_v_ok=max_v_ok,
        min_v_ok=min_v_ok,
        violations=tuple(violations),
        currents=currents,
        voltages=voltages,
        loss_watts=loss,
    )


def _check_paper(grid: Grid, bits: tuple[int, ...], params: PenaltyParams) -> FeasibilityReport:
    bundle = build_objective(grid, params)
    pairs, dark = _paper_parts(grid)
    violations: list[Violation] = []

    radial_ok = bundle.radial_unit.eval(bits) == 0.0
    if not radial_ok:
        for (i, j), pair_poly in pairs:
            if pair_poly.eval(bits) != 0.0:
                for switches in _active_switch_terms(grid, pair_poly, bits):
                    violations.append(
                        Violation("RADIAL_CONNECTED_FEEDERS", blocks=(i, j), switches=switches)
                    )

    maxconn_ok = bundle.maxconn_unit.eval(bits) == 0.0
    if not maxconn_ok:
        for switches in _active_switch_terms(grid, bundle.maxconn_unit, bits):
            violations.append(Violation("MAXCONN_MONOMIAL", switches=switches))

    blackout_ok = bundle.blackout_unit.eval(bits) == 0.0
    if not blackout_ok:
        for b, dark_poly in dark:
            if dark_poly.eval(bits) != 0.0:
                violations.append(Violation("BLACKOUT_UNFED", blocks=(b,)))

    current_ok = True
    max_v_ok = True
    min_v_ok = True
    for b in grid.block_ids:
        blk = grid.block(b)
        value = bundle.per_block_current[b].eval(bits)
        if not value / blk.max_current < 1.0:
            current_ok = False
            violations.append(Violation("CURRENT_LIMIT", blocks=(b,), value=value))
    for b in grid.block_ids:
        blk = grid.block(b)
        value = bundle.per_block_voltage[b].eval(bits)
        if not value / blk.max_voltage < 1.0:
            max_v_ok = False
            violations.append(Violation("VOLTAGE_LIMIT", blocks=(b,), value=value))
    for b in grid.block_ids:
        blk = grid.block(b)
        value = bundle.per_block_cum_drop[b].eval(bits)
        if not value / blk.max_cum_drop < 1.0:
            min_v_ok = False
            violations.append(Violation("CUM_DROP_LIMIT", blocks=(b,), value=value))

    currents: dict[int, float] = {}
    voltages: dict[int, float] = {}
    loss: float | None = None
    if radial_ok and maxconn_ok and blackout_ok:
        currents = {b: bundle.per_block_current[b].eval(bits) for b in grid.block_ids}
        voltages = {b: bundle.per_block_voltage[b].eval(bits) for b in grid.block_ids}
        loss = bundle.power.eval(bits)
    penalties = {
        "radial": bundle.radial.eval(bits),
        "maxconn": bundle.maxconn.eval(bits),
        "blackout": bundle.blackout.eval(bits),
        "current": bundle.current.eval(bits),
        "max_voltage": bundle.max_v.eval(bits),
        "min_voltage": bundle.min_v.eval(bits),
    }
    return FeasibilityReport(
        mode=MODE_PAPER,
        radial_ok=radial_ok,
        maxconn_ok=maxconn_ok,
        blackout_ok=blackout_ok,
        current_ok=current_ok,
        max_v_ok=max_v_ok,
        min_v_ok=min_v_ok,
        violations=tuple(violations),
        currents=currents,
        voltages=voltages,
        loss_watts=loss,
        penalties=penalties,
    )


def _bits_of_index(idx: int, n: int) -> tuple[int, ...]:
    return tuple((idx >> (n - 1 - v)) & 1 for v in range(n))


def enumerate_feasible(
    grid: Grid,
    mode: str = MODE_PHYSICAL,
    params: PenaltyParams | None = None,
    workers: int = 1,
) -> list[tuple[tuple[int, ...], float]]:
    """Every feasible assignment with its physical loss, sorted by loss
    then lexicographic assignment."""
    n = grid.n_vars
    if n > _ENUMERATE_GUARD:
        raise VariableGuardError(
            f"refusing to enumerate 2^{n} assignments (guard 2^{_ENUMERATE_GUARD})"
        )
    if mode == MODE_PAPER and params is None:
        params = default_penalty_params(grid)

    def scan(lo: int, hi: int) -> list[tuple[tuple[int, ...], float]]:
        out = []
        for idx in range(lo, hi):
            bits = _bits_of_index(idx, n)
            if check_feasibility(grid, bits, mode, params).feasible:
                out.append((bits, physical_loss(grid, bits)))
        return out

    total = 1 << n
    if workers <= 1:
        rows = scan(0, total)
    else:
        from concurrent.futures import ThreadPoolExecutor

        chunk = max(1, (total + workers - 1) // workers)
        spans = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: scan(*s), spans))
        rows = [row for part in parts for row in part]
    rows.sort(key=lambda r: (r[1], r[0]))
    return rows
