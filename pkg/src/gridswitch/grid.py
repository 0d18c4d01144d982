"""Grid description: blocks, feeders, tie switches, and the q-matrix view.

A grid is a set of load blocks joined by remotely switchable ties.  The
symmetric matrix entry q(i, j) describes switch state: the diagonal
q(i, i) is fixed by topology (1 when block i hosts a feeder, else 0) and
an off-diagonal q(i, j) is a decision variable exactly when a physical
switch joins blocks i and j, otherwise the constant 0.

Decision variables are numbered canonically: switches sorted by
(min block id, max block id) get indices 0, 1, 2, ...; any auxiliary
variables introduced later (e.g. by quadratization) are appended after.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from numbers import Real

from .errors import GridFormatError
from .poly import Poly

_BLOCK_KEYS = {"id", "load_current", "resistance", "max_current", "max_voltage", "max_cum_drop"}
_FEEDER_KEYS = {"block", "voltage"}
_GRID_KEYS = {"blocks", "feeders", "switches", "reference_voltage"}

# Default reference voltage is this factor above the strongest feeder.
_REFERENCE_MARGIN = 1.05


@dataclass(frozen=True)
class Block:
    """One load block with its electrical data and operating limits."""

    id: int
    load_current: float
    resistance: float
    max_current: float
    max_voltage: float
    max_cum_drop: float


@dataclass(frozen=True)
class Feeder:
    """A supply point sitting on a block, held at a fixed voltage."""

    block: int
    voltage: float


@dataclass(frozen=True)
class QEntry:
    """One q-matrix entry: a fixed 0/1 value or a live switch variable."""

    value: int | None
    var: int | None = None

    @property
    def is_variable(self) -> bool:
        return self.value is None


@dataclass(frozen=True)
class Grid:
    blocks: tuple[Block, ...]
    feeders: tuple[Feeder, ...]
    switches: tuple[tuple[int, int], ...]
    reference_voltage: float | None = field(default=None)

    def __post_init__(self) -> None:
        blocks = tuple(sorted(self.blocks, key=lambda b: b.id))
        feeders = tuple(sorted(self.feeders, key=lambda f: f.block))
        switches = tuple(sorted(tuple(sorted(s)) for s in self.switches))
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "feeders", feeders)
        object.__setattr__(self, "switches", switches)
        self._validate_blocks()
        self._validate_feeders()
        self._validate_switches()
        if self.reference_voltage is None:
            top = max(f.voltage for f in self.feeders)
            object.__setattr__(self, "reference_voltage", _REFERENCE_MARGIN * top)
        self._validate_reference()

    # -- validation ---------------------------------------------------

    def _validate_blocks(self) -> None:
        if not self.blocks:
            raise GridFormatError("blocks: at least one block is required")
        seen = set()
        for b in self.blocks:
            if b.id in seen:
                raise GridFormatError(f"blocks: duplicate block id {b.id}")
            seen.add(b.id)
        expect = set(range(1, len(self.blocks) + 1))
        if seen != expect:
            raise GridFormatError(
                f"blocks: ids must be contiguous 1..{len(self.blocks)}, got {sorted(seen)}"
            )
        for b in self.blocks:
            for name, strict in (
                ("load_current", False),
                ("resistance", False),
                ("max_current", True),
                ("max_voltage", True),
                ("max_cum_drop", True),
            ):
                val = getattr(b, name)
                if not isinstance(val, Real) or isinstance(val, bool):
                    raise GridFormatError(f"block {b.id}: {name} must be a number")
                if val < 0 or (strict and val == 0):
                    bound = "> 0" if strict else ">= 0"
                    raise GridFormatError(f"block {b.id}: {name} must be {bound}, got {val}")

    def _validate_feeders(self) -> None:
        if not self.feeders:
            raise GridFormatError("feeders: at least one feeder is required")
        ids = {b.id for b in self.blocks}
        seen = set()
        for f in self.feeders:
            if f.block not in ids:
                raise GridFormatError(f"feeders: unknown block {f.block}")
            if f.block in seen:
                raise GridFormatError(f"feeders: block {f.block} has more than one feeder")
            seen.add(f.block)
            if not isinstance(f.voltage, Real) or isinstance(f.voltage, bool) or f.voltage <= 0:
                raise GridFormatError(f"feeders: block {f.block} voltage must be > 0, got {f.voltage}")

    def _validate_switches(self) -> None:
        ids = {b.id for b in self.blocks}
        seen = set()
        for pair in self.switches:
            i, j = pair
            if i == j:
                raise GridFormatError(f"switches: pair [{i}, {j}] must join two distinct blocks")
            if i not in ids or j not in ids:
                raise GridFormatError(f"switches: pair [{i}, {j}] references an unknown block")
            if pair in seen:
                raise GridFormatError(f"switches: duplicate pair [{i}, {j}]")
            seen.add(pair)

    def _validate_reference(self) -> None:
        ref = self.reference_voltage
        if not isinstance(ref, Real) or isinstance(ref, bool):
            raise GridFormatError("reference_voltage: must be a number")
        top = max(f.voltage for f in self.feeders)
        if ref <= top:
            raise GridFormatError(
                f"reference_voltage: must exceed every feeder voltage (> {top}), got {ref}"
            )

    # -- lookups ------------------------------------------------------

    @cached_property
    def _block_map(self) -> dict[int, Block]:
        return {b.id: b for b in self.blocks}

    @cached_property
    def _feeder_voltage(self) -> dict[int, float]:
        return {f.block: f.voltage for f in self.feeders}

    @cached_property
    def _switch_index(self) -> dict[tuple[int, int], int]:
        return {pair: k for k, pair in enumerate(self.switches)}

    @cached_property
    def block_ids(self) -> tuple[int, ...]:
        return tuple(b.id for b in self.blocks)

    @cached_property
    def feeder_blocks(self) -> tuple[int, ...]:
        return tuple(f.block for f in self.feeders)

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        """Blocks reachable through one physical switch, closed or not."""
        nbr: dict[int, list[int]] = {b.id: [] for b in self.blocks}
        for i, j in self.switches:
            nbr[i].append(j)
            nbr[j].append(i)
        return {b: tuple(sorted(ns)) for b, ns in nbr.items()}

    def block(self, i: int) -> Block:
        try:
            return self._block_map[i]
        except KeyError:
            raise GridFormatError(f"unknown block id {i}") from None

    def has_feeder(self, i: int) -> bool:
        self.block(i)
        return i in self._feeder_voltage

    def feeder_voltage(self, i: int) -> float:
        return self._feeder_voltage[i]

    @property
    def n_vars(self) -> int:
        return len(self.switches)

    def variable_order(self) -> tuple[tuple[int, int], ...]:
        """Switch pairs in canonical variable order; index k is variable k."""
        return self.switches

    def switch_var(self, i: int, j: int) -> int | None:
        return self._switch_index.get((min(i, j), max(i, j)))

    def q_lookup(self, i: int, j: int) -> QEntry:
        """Symmetric q-matrix entry for blocks i and j."""
        self.block(i)
        self.block(j)
        if i == j:
            return QEntry(value=1 if i in self._feeder_voltage else 0)
        var = self.switch_var(i, j)
        if var is None:
            return QEntry(value=0)
        return QEntry(value=None, var=var)

    def q_poly(self, i: int, j: int) -> Poly:
        """q_lookup as a polynomial: constant 0, constant 1, or a variable."""
        entry = self.q_lookup(i, j)
        if entry.value is not None:
            return Poly.constant(float(entry.value)) if entry.value else Poly.zero()
        return Poly.variable(entry.var)


# -- JSON round trip ---------------------------------------------------


def _require_number(obj: dict, key: str, where: str) -> float:
    if key not in obj:
        raise GridFormatError(f"{where}: missing required field '{key}'")
    val = obj[key]
    if not isinstance(val, Real) or isinstance(val, bool):
        raise GridFormatError(f"{where}: field '{key}' must be a number, got {val!r}")
    return float(val)


def _require_int(obj: dict, key: str, where: str) -> int:
    if key not in obj:
        raise GridFormatError(f"{where}: missing required field '{key}'")
    val = obj[key]
    if not isinstance(val, int) or isinstance(val, bool):
        raise GridFormatError(f"{where}: field '{key}' must be an integer, got {val!r}")
    return val


def parse_grid(text: str) -> Grid:
    """Parse a JSON grid description.  Unknown fields are rejected."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GridFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise GridFormatError("top level must be a JSON object")
    extra = set(doc) - _GRID_KEYS
    if extra:
        raise GridFormatError(f"unknown top-level field(s): {', '.join(sorted(extra))}")
    for key in ("blocks", "feeders", "switches"):
        if key not in doc:
            raise GridFormatError(f"missing required field '{key}'")
        if not isinstance(doc[key], list):
            raise GridFormatError(f"field '{key}' must be a list")

    blocks = []
    for k, raw in enumerate(doc["blocks"]):
        where = f"blocks[{k}]"
        if not isinstance(raw, dict):
            raise GridFormatError(f"{where}: must be an object")
        extra = set(raw) - _BLOCK_KEYS
        if extra:
            raise GridFormatError(f"{where}: unknown field(s): {', '.join(sorted(extra))}")
        blocks.append(
            Block(
                id=_require_int(raw, "id", where),
                load_current=_require_number(raw, "load_current", where),
                resistance=_require_number(raw, "resistance", where),
                max_current=_require_number(raw, "max_current", where),
                max_voltage=_require_number(raw, "max_voltage", where),
                max_cum_drop=_require_number(raw, "max_cum_drop", where),
            )
        )

    feeders = []
    for k, raw in enumerate(doc["feeders"]):
        where = f"feeders[{k}]"
        if not isinstance(raw, dict):
            raise GridFormatError(f"{where}: must be an object")
        extra = set(raw) - _FEEDER_KEYS
        if extra:
            raise GridFormatError(f"{where}: unknown field(s): {', '.join(sorted(extra))}")
        feeders.append(
            Feeder(block=_require_int(raw, "block", where), voltage=_require_number(raw, "voltage", where))
        )

    switches = []
    for k, raw in enumerate(doc["switches"]):
        where = f"switches[{k}]"
        if (
            not isinstance(raw, list)
            or len(raw) != 2
            or any(not isinstance(x, int) or isinstance(x, bool) for x in raw)
        ):
            raise GridFormatError(f"{where}: must be a pair of block ids")
        switches.append((raw[0], raw[1]))

    ref = None
    if "reference_voltage" in doc:
        ref = _require_number({"reference_voltage": doc["reference_voltage"]}, "reference_voltage", "grid")

    return Grid(tuple(blocks), tuple(feeders), tuple(switches), ref)


def serialize_grid(grid: Grid) -> str:
    """Canonical JSON for a grid; parse(serialize(g)) == g."""
    doc = {
        "blocks": [
            {
                "id": b.id,
                "load_current": b.load_current,
                "resistance": b.resistance,
                "max_current": b.max_current,
                "max_voltage": b.max_voltage,
                "max_cum_drop": b.max_cum_drop,
            }
            for b in grid.blocks
        ],
        "feeders": [{"block": f.block, "voltage": f.voltage} for f in grid.feeders],
        "switches": [list(pair) for pair in grid.switches],
        "reference_voltage": grid.reference_voltage,
    }
    return json.dumps(doc, indent=2) + "\n"
