"""Minimize the objective three ways and compare the results.

1. exhaustive scan over all 128 switch assignments (ground truth),
2. simulated annealing directly on the degree-7 objective,
3. simulated annealing on the quadratized model, projected back.

The direct annealer finds the optimum in nearly every restart.  The
quadratized annealer is run with the same schedule to show its known
weakness: the large product-enforcement weight freezes the auxiliary
bits early, so most restarts quench into a consistent-but-suboptimal
configuration.  Its best-found value is still reported faithfully.

Run:  python3 demos/03_solve_and_compare.py
"""
from collections import Counter
from pathlib import Path

from gridswitch import (
    AnnealSchedule,
    anneal_hubo,
    anneal_qubo,
    bits_to_string,
    brute_force_min,
    build_objective,
    parse_grid,
    quadratize,
)

HERE = Path(__file__).resolve().parent
grid = parse_grid((HERE / "grids" / "six-block.json").read_text())
bundle = build_objective(grid)
schedule = AnnealSchedule()  # 10 -> 0.01, 2000 sweeps, 100 restarts, seed 0

print("== exhaustive ground truth ==")
brute = brute_force_min(bundle.total, n_vars=grid.n_vars)
print(f"optimum {bits_to_string(brute.best_assignment)} value {brute.best_value!r}")
tol = brute.best_value * (1 + 1e-9)


def report(label, result):
    hits = sum(1 for v in result.per_restart_values if v <= tol)
    spread = Counter(round(v, 6) for v in result.per_restart_values)
    print(f"\n== {label} ==")
    print(f"best {bits_to_string(result.best_assignment)} value {result.best_value!r}")
    print(f"optimal restarts: {hits}/{len(result.per_restart_values)}")
    print(f"matches ground truth: {result.best_assignment == brute.best_assignment}")
    print("restart value histogram (rounded):")
    for value, count in sorted(spread.items())[:6]:
        print(f"  {value:12.6f}  x{count}")
    if result.aux_consistent is not None:
        print(f"auxiliary bits consistent at the winner: {result.aux_consistent}")


report("annealing the degree-7 objective", anneal_hubo(bundle.total, schedule=schedule, n_vars=grid.n_vars))

model = quadratize(bundle.total, n_vars=grid.n_vars)
report("annealing the quadratized model", anneal_qubo(model, schedule=schedule))

print(
    "\nTakeaway: with the same fixed schedule the quadratized form needs "
    "moves that\ntemporarily violate a product definition, and those cost "
    "the enforcement weight\n(~58x the initial temperature), so restarts "
    "rarely escape their first\nconsistent state.  The direct annealer has "
    "no such barrier."
)
