"""Penalized objective construction for switch reconfiguration.

The objective is a single pseudo-Boolean polynomial over the switch
variables:

    total = power loss
          + radial penalty          (no two feeders tied together)
          + max-connection penalty  (no supply group of four blocks)
          + blackout penalty        (every block reaches a feeder)
          + current limit penalty   (per-block ampacity, smooth)
          + max-voltage penalty     (per-block ceiling, smooth)
          + min-voltage penalty     (per-block cumulative drop, smooth)

Connectivity penalties are indicator-style: each violating switch pattern
contributes the full penalty constant.  Limit penalties are smooth: block
i contributes C * (value_i / limit_i)^L, so a within-limits block still
adds a small positive bias.  The solver minimizes the biased total;
definitive feasibility verdicts come from the validator module.

Every builder accepts an optional ``q_of`` callback mapping a block pair
to the polynomial for that q-matrix entry.  The default callback fixes
diagonals and absent switches to constants per the grid topology;
supplying free variables instead and substituting constants afterwards
must produce the same polynomials, which is covered by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

from .errors import GridFormatError
from .grid import Grid
from .poly import Poly

QProvider = Callable[[int, int], Poly]


@dataclass(frozen=True)
class PenaltyParams:
    """Penalty constant and the exponent of the smooth limit terms."""

    c_penalty: float
    exponent_l: int = 4

    def __post_init__(self) -> None:
        if not self.c_penalty > 0:
            raise ValueError(f"c_penalty must be > 0, got {self.c_penalty}")
        if (
            not isinstance(self.exponent_l, int)
            or self.exponent_l < 2
            or self.exponent_l % 2
        ):
            raise ValueError(f"exponent_l must be an even integer >= 2, got {self.exponent_l}")


def default_penalty_params(grid: Grid, exponent_l: int = 4) -> PenaltyParams:
    """Penalty constant scaled far above any reachable power loss.

    The bound is the loss if every block carried the whole grid load:
    sum_i R_i * (sum_j I_j)^2, multiplied by 1e6.
    """
    total_load = 0.0
    for b in grid.blocks:
        total_load += b.load_current
    bound = 0.0
    for b in grid.blocks:
        bound += b.resistance * total_load * total_load
    return PenaltyParams(c_penalty=1e6 * bound, exponent_l=exponent_l)


def _q_default(grid: Grid) -> QProvider:
    return grid.q_poly


def _feeder_voltage_or_zero(grid: Grid, i: int) -> float:
    return grid.feeder_voltage(i) if grid.has_feeder(i) else 0.0


def _mul_factor(acc: Poly, factor: Poly) -> Poly:
    # Skip multiplications by the constant 1; they are exact no-ops.
    if factor.is_one():
        return acc
    return acc * factor


# -- current model -----------------------------------------------------


def total_current_poly(grid: Grid, i: int, q_of: QProvider | None = None) -> Poly:
    """Current carried by block i as a polynomial in the switch variables.

    Block i carries its own load, the load of each directly tied block
    that has no feeder and no further tie, and the loads of two-block
    chains hanging off it.  The model is exact for radial trees of depth
    at most two below a feeder; outside that regime it is only the
    penalty surrogate the objective optimizes.
    """
    q = q_of or _q_default(grid)
    blocks = grid.block_ids
    acc = Poly.constant(grid.block(i).load_current)
    for j in blocks:
        if j == i:
            continue
        term = q(i, j)
        if term.is_zero():
            continue
        for k in blocks:
            if k == i:
                continue
            term = _mul_factor(term, q(j, k).complement())
            if term.is_zero():
                break
        if term.is_zero():
            continue
        acc = acc + term * grid.block(j).load_current
    for l in blocks:
        if l == i:
            continue
        for m in blocks:
            if m == i or m == l:
                continue
            term = q(i, l) * q(l, m)
            if term.is_zero():
                continue
            term = _mul_factor(term, q(l, l).complement())
            if term.is_zero():
                continue
            term = _mul_factor(term, q(m, m).complement())
            if term.is_zero():
                continue
            acc = acc + term * (grid.block(l).load_current + grid.block(m).load_current)
    return acc


def _all_currents(grid: Grid, q_of: QProvider | None) -> dict[int, Poly]:
    return {i: total_current_poly(grid, i, q_of) for i in grid.block_ids}


def power_loss_poly(
    grid: Grid,
    q_of: QProvider | None = None,
    currents: Mapping[int, Poly] | None = None,
) -> Poly:
    """Joule loss sum_i R_i * (current_i)^2."""
    currents = currents or _all_currents(grid, q_of)
    acc = Poly.zero()
    for i in grid.block_ids:
        acc = acc + currents[i] ** 2 * grid.block(i).resistance
    return acc


# -- connectivity penalties --------------------------------------------


def radial_pair_poly(grid: Grid, i: int, j: int, q_of: QProvider | None = None) -> Poly:
    """Unit-coefficient indicator that blocks i and j are tied directly
    or through exactly one intermediate block."""
    q = q_of or _q_default(grid)
    bracket = q(i, j)
    for k in grid.block_ids:
        if k == i or k == j:
            continue
        bracket = bracket + q(i, k) * q(k, j)
    return q(i, i) * q(j, j) * bracket


def radial_unit_poly(grid: Grid, q_of: QProvider | None = None) -> Poly:
    """Sum of the pair indicators over all block pairs, unscaled.

    Unit coefficients stay small integers, so an exact-zero test on the
    evaluated sum is reliable; the scaled penalty is this times C."""
    blocks = grid.block_ids
    unit = Poly.zero()
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            i, j = blocks[a], blocks[b]
            pair = radial_pair_poly(grid, i, j, q_of)
            if not pair.is_zero():
                unit = unit + pair
    return unit


def radial_penalty(grid: Grid, params: PenaltyParams, q_of: QProvider | None = None) -> Poly:
    """Penalty for any two feeder blocks joined within two hops."""
    return radial_unit_poly(grid, q_of) * params.c_penalty


def maxconn_unit_poly(grid: Grid, q_of: QProvider | None = None) -> Poly:
    """Indicator sum for four blocks tied in a row or in a T, unscaled.

    Chain patterns where the outer pair (first and third, or second and
    fourth) are both feeder blocks are excluded, as are T patterns where
    two of the three branch tips are feeder blocks.  The chain sum allows
    its last index to close a triangle, so three-block cycles are caught
    here as well.  A feeder sitting in the middle of a group does not
    exempt it, even though physical flow would split there; the validator
    module documents that divergence.
    """
    q = q_of or _q_default(grid)
    blocks = grid.block_ids
    unit = Poly.zero()
    for i in blocks:
        for j in blocks:
            if j == i:
                continue
            for k in blocks:
                if k == j or k == i:
                    continue
                for l in blocks:
                    if l == j or l == k or l < i:
                        continue
                    term = q(i, j) * q(j, k) * q(k, l)
                    if term.is_zero():
                        continue
                    term = _mul_factor(term, (q(i, i) * q(k, k)).complement())
                    if term.is_zero():
                        continue
                    term = _mul_factor(term, (q(j, j) * q(l, l)).complement())
                    if term.is_zero():
                        continue
                    unit = unit + term
    for i in blocks:
        for j in blocks:
            if j == i:
                continue
            for k in blocks:
                if k == j or k <= i:
                    continue
                for l in blocks:
                    if l == j or l <= i or l <= k:
                        continue
                    term = q(i, j) * q(j, k) * q(j, l)
                    if term.is_zero():
                        continue
                    term = _mul_factor(term, (q(i, i) * q(k, k)).complement())
                    if term.is_zero():
                        continue
                    term = _mul_factor(term, (q(k, k) * q(l, l)).complement())
                    if term.is_zero():
                        continue
                    term = _mul_factor(term, (q(l, l) * q(i, i)).complement())
                    if term.is_zero():
                        continue
                    unit = unit + term
    return unit


def maxconn_penalty(grid: Grid, params: PenaltyParams, q_of: QProvider | None = None) -> Poly:
    """Penalty for four blocks tied in a row or in a T; see
    maxconn_unit_poly for the pattern inventory."""
    return maxconn_unit_poly(grid, q_of) * params.c_penalty


def blackout_block_poly(grid: Grid, i: int, q_of: QProvider | None = None) -> Poly:
    """Unit-coefficient indicator that block i reaches no feeder within
    two hops (and is not a feeder block itself)."""
    q = q_of or _q_default(grid)
    blocks = grid.block_ids
    prod = q(i, i).complement()
    if prod.is_zero():
        return Poly.zero()
    for j in blocks:
        if j == i:
            continue
        prod = _mul_factor(prod, (q(j, j) * q(i, j)).complement())
        if prod.is_zero():
            return Poly.zero()
    for k in blocks:
        if k == i:
            continue
        for l in blocks:
            if l == i or l == k:
                continue
            prod = _mul_factor(prod, (q(l, l) * q(i, k) * q(k, l)).complement())
            if prod.is_zero():
                return Poly.zero()
    return prod


def blackout_unit_poly(grid: Grid, q_of: QProvider | None = None) -> Poly:
    """Sum of the per-block dark indicators, unscaled."""
    unit = Poly.zero()
    for i in grid.block_ids:
        unit = unit + blackout_block_poly(grid, i, q_of)
    return unit


def blackout_penalty(grid: Grid, params: PenaltyParams, q_of: QProvider | None = None) -> Poly:
    """Penalty for any block left without a supply path."""
    return blackout_unit_poly(grid, q_of) * params.c_penalty


# -- smooth limit penalties --------------------------------------------


def current_penalty(
    grid: Grid,
    params: PenaltyParams,
    q_of: QProvider | None = None,
    currents: Mapping[int, Poly] | None = None,
) -> Poly:
    """C * sum_i (current_i / max_current_i)^L."""
    currents = currents or _all_currents(grid, q_of)
    unit = Poly.zero()
    for i in grid.block_ids:
        ratio = currents[i] / grid.block(i).max_current
        unit = unit + ratio ** params.exponent_l
    return unit * params.c_penalty


def voltage_poly(
    grid: Grid,
    i: int,
    q_of: QProvider | None = None,
    currents: Mapping[int, Poly] | None = None,
) -> Poly:
    """Voltage at block i: the feeder value on feeder blocks, otherwise
    the feeder voltage it is tied to minus the drops accumulated on the
    way (one or two hops).  Blocks with no supply path evaluate to 0."""
    q = q_of or _q_default(grid)
    currents = currents or _all_currents(grid, q_of)
    blocks = grid.block_ids
    drop = {
        m: currents[m] * grid.block(m).resistance
        for m in blocks
    }
    own = q(i, i) * _feeder_voltage_or_zero(grid, i)
    bracket = Poly.zero()
    for j in blocks:
        if j == i:
            continue
        head = q(i, j) * q(j, j)
        if head.is_zero():
            continue
        bracket = bracket + head * (Poly.constant(_feeder_voltage_or_zero(grid, j)) - drop[j])
    for k in blocks:
        if k == i:
            continue
        for l in blocks:
            if l == k:
                continue
            head = q(i, k) * q(k, l) * q(l, l)
            if head.is_zero():
                continue
            bracket = bracket + head * (
                Poly.constant(_feeder_voltage_or_zero(grid, l)) - drop[k] - drop[l]
            )
    return own + _mul_factor(bracket, q(i, i).complement())


def max_voltage_penalty(
    grid: Grid,
    params: PenaltyParams,
    q_of: QProvider | None = None,
    currents: Mapping[int, Poly] | None = None,
    voltages: Mapping[int, Poly] | None = None,
) -> Poly:
    """C * sum_i (voltage_i / max_voltage_i)^L."""
    if voltages is None:
        currents = currents or _all_currents(grid, q_of)
        voltages = {i: voltage_poly(grid, i, q_of, currents) for i in grid.block_ids}
    unit = Poly.zero()
    for i in grid.block_ids:
        unit = unit + (voltages[i] / grid.block(i).max_voltage) ** params.exponent_l
    return unit * params.c_penalty


def cumulative_drop_poly(
    grid: Grid,
    i: int,
    q_of: QProvider | None = None,
    currents: Mapping[int, Poly] | None = None,
) -> Poly:
    """Shortfall of block i below the grid reference voltage.

    Counted from the reference level down: a feeder block sits at
    (reference - feeder voltage); a supplied block adds the drops
    accumulated along its one- or two-hop supply path.  Keeping the
    expression as an accumulated drop avoids dividing by a polynomial
    when the minimum-voltage penalty normalizes it by the per-block
    allowance."""
    q = q_of or _q_default(grid)
    currents = currents or _all_currents(grid, q_of)
    blocks = grid.block_ids
    ref = grid.reference_voltage
    drop = {
        m: currents[m] * grid.block(m).resistance
        for m in blocks
    }
    own = q(i, i) * (ref - _feeder_voltage_or_zero(grid, i))
    bracket = Poly.zero()
    for j in blocks:
        if j == i:
            continue
        head = q(i, j) * q(j, j)
        if head.is_zero():
            continue
        bracket = bracket + head * (
            Poly.constant(ref - _feeder_voltage_or_zero(grid, j)) + drop[j]
        )
    for k in blocks:
        if k == i:
            continue
        for l in blocks:
            if l == k:
                continue
            head = q(i, k) * q(k, l) * q(l, l)
            if head.is_zero():
                continue
            bracket = bracket + head * (
                Poly.constant(ref - _feeder_voltage_or_zero(grid, l)) + drop[k] + drop[l]
            )
    return own + _mul_factor(bracket, q(i, i).complement())


def min_voltage_penalty(
    grid: Grid,
    params: PenaltyParams,
    q_of: QProvider | None = None,
    currents: Mapping[int, Poly] | None = None,
    drops: Mapping[int, Poly] | None = None,
) -> Poly:
    """C * sum_i (cumulative_drop_i / max_cum_drop_i)^L.

    An unsupplied block contributes 0 here; leaving a block dark is the
    blackout penalty's job, not this term's."""
    if drops is None:
        currents = currents or _all_currents(grid, q_of)
        drops = {i: cumulative_drop_poly(grid, i, q_of, currents) for i in grid.block_ids}
    unit = Poly.zero()
    for i in grid.block_ids:
        unit = unit + (drops[i] / grid.block(i).max_cum_drop) ** params.exponent_l
    return unit * params.c_penalty


# -- bundle ------------------------------------------------------------


@dataclass(frozen=True)
class ObjectiveBundle:
    """All objective components plus their exact sum.

    ``total`` is built by summing the seven components in the field
    order below, so it is reproducible to the bit."""

    power: Poly
    radial: Poly
    maxconn: Poly
    blackout: Poly
    current: Poly
    max_v: Poly
    min_v: Poly
    total: Poly
    radial_unit: Poly
    maxconn_unit: Poly
    blackout_unit: Poly
    per_block_current: Mapping[int, Poly]
    per_block_voltage: Mapping[int, Poly]
    per_block_cum_drop: Mapping[int, Poly]


@lru_cache(maxsize=32)
def _build_objective_cached(grid: Grid, params: PenaltyParams) -> ObjectiveBundle:
    currents = _all_currents(grid, None)
    voltages = {i: voltage_poly(grid, i, None, currents) for i in grid.block_ids}
    cum_drops = {i: cumulative_drop_poly(grid, i, None, currents) for i in grid.block_ids}
    power = power_loss_poly(grid, None, currents)
    radial_unit = radial_unit_poly(grid)
    maxconn_unit = maxconn_unit_poly(grid)
    blackout_unit = blackout_unit_poly(grid)
    radial = radial_unit * params.c_penalty
    maxconn = maxconn_unit * params.c_penalty
    blackout = blackout_unit * params.c_penalty
    current = current_penalty(grid, params, None, currents)
    max_v = max_voltage_penalty(grid, params, None, currents, voltages)
    min_v = min_voltage_penalty(grid, params, None, currents, cum_drops)
    total = power + radial + maxconn + blackout + current + max_v + min_v
    return ObjectiveBundle(
        power=power,
        radial=radial,
        maxconn=maxconn,
        blackout=blackout,
        current=current,
        max_v=max_v,
        min_v=min_v,
        total=total,
        radial_unit=radial_unit,
        maxconn_unit=maxconn_unit,
        blackout_unit=blackout_unit,
        per_block_current=currents,
        per_block_voltage=voltages,
        per_block_cum_drop=cum_drops,
    )


def build_objective(grid: Grid, params: PenaltyParams | None = None) -> ObjectiveBundle:
    """Build every component and the total for a grid.

    Building twice with equal inputs returns identical polynomials."""
    if params is None:
        params = default_penalty_params(grid)
    if not isinstance(params, PenaltyParams):
        raise GridFormatError("params must be a PenaltyParams instance")
    return _build_objective_cached(grid, params)
