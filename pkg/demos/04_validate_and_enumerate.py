"""Check switch assignments against the independent graph validator.

The validator never touches the polynomial encoding: it walks the
closed-switch graph, finds energized components, routes load currents
down each feeder tree, and checks every operating constraint directly.
It supports two rule sets:

* ``physical``  -- graph properties: one feeder per energized group,
  every block fed, tree depth at most two hops, hard operating limits.
* ``paper``     -- the polynomial encoding's own terms must vanish
  exactly and limit ratios must stay below one; slightly stricter
  because the depth-pattern terms also reject a few tree shapes.

Run:  python3 demos/04_validate_and_enumerate.py
"""
from pathlib import Path

from gridswitch import (
    MODE_PAPER,
    MODE_PHYSICAL,
    bits_from_string,
    bits_to_string,
    check_feasibility,
    energized_components,
    enumerate_feasible,
    parse_grid,
)

HERE = Path(__file__).resolve().parent
grid = parse_grid((HERE / "grids" / "six-block.json").read_text())

print("== anatomy of the reference configuration 0100111 ==")
bits = bits_from_string("0100111")
for comp in energized_components(grid, bits):
    print(
        f"component blocks {comp.blocks} feeders {comp.feeder_blocks} "
        f"depths {dict(comp.depth)}"
    )
report = check_feasibility(grid, bits)
print(f"physical verdict: feasible={report.feasible}")
print(f"per-block currents: { {b: round(v, 4) for b, v in sorted(report.currents.items())} }")
print(f"resistive loss: {report.loss_watts:.3e}")

print("\nthe encoding's rule set is stricter on this one:")
paper_report = check_feasibility(grid, bits, mode=MODE_PAPER)
print(f"encoding verdict: feasible={paper_report.feasible}")
for v in paper_report.violations:
    print(f"  {v.code}: closed chain {v.switches}")

print("\n== a clearly broken configuration: everything open ==")
report = check_feasibility(grid, [0] * grid.n_vars)
print(f"feasible={report.feasible}")
for v in report.violations:
    print(f"  {v.code}: blocks {v.blocks}")

print("\n== every feasible configuration, best loss first ==")
for mode in (MODE_PHYSICAL, MODE_PAPER):
    rows = enumerate_feasible(grid, mode=mode)
    print(f"{mode}: {len(rows)} of {1 << grid.n_vars} assignments")
    for row_bits, loss in rows[:5]:
        print(f"  {bits_to_string(row_bits)}  loss {loss:.4e}")
    if len(rows) > 5:
        print("  ...")

print("\nthe loss-optimal feasible configuration is the objective's global")
print("minimum as well -- the penalty constant is big enough that no")
print("infeasible assignment can ever undercut a feasible one.")
