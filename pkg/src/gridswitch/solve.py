"""Classical minimization: exhaustive search and simulated annealing.

Annealing is restart-parallel Metropolis with single-bit flips and a
geometric temperature ramp.  Each restart draws its own generator seeded
from (seed, restart index), so results are identical for any worker
count; restarts merge in index order with strict improvement, which
keeps the winner deterministic.  Reported values are recomputed from the
polynomial at the winning assignment, not taken from the incremental
kernel energy.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import anneal_hubo_run, anneal_qubo_run, brute_gray, hubo_delta
from .errors import VariableGuardError
from .poly import Poly
from .quadratize import QuboModel, lift_assignment

_BRUTE_FORCE_GUARD = 24


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling schedule plus restart and seeding policy."""

    initial_temperature: float = 10.0
    final_temperature: float = 0.01
    sweeps: int = 2000
    restarts: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.final_temperature > 0:
            raise ValueError(f"final_temperature must be > 0, got {self.final_temperature}")
        if not self.initial_temperature >= self.final_temperature:
            raise ValueError(
                "initial_temperature must be >= final_temperature, got "
                f"{self.initial_temperature} < {self.final_temperature}"
            )
        if self.sweeps < 1:
            raise ValueError(f"sweeps must be >= 1, got {self.sweeps}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")

    def temperatures(self) -> np.ndarray:
        return np.geomspace(self.initial_temperature, self.final_temperature, self.sweeps)


@dataclass(frozen=True)
class SolveResult:
    """Best assignment found, with per-restart bests for annealing runs.

    ``evaluations`` counts objective evaluations: one per enumerated
    assignment for exhaustive search, one per Metropolis proposal for
    annealing.  For quadratic models ``best_assignment`` holds only the
    original variables and ``aux_consistent`` reports whether the raw
    winner's auxiliaries matched the products they stand for."""

    best_assignment: tuple[int, ...]
    best_value: float
    method: str
    evaluations: int
    elapsed: float
    per_restart_values: tuple[float, ...] = ()
    aux_consistent: bool | None = None


def _flatten_poly(p: Poly, n_vars: int):
    terms = [(vs, c) for vs, c in p.items() if vs]
    t_start = np.zeros(len(terms) + 1, np.int64)
    flat: list[int] = []
    coeffs = np.zeros(len(terms), np.float64)
    for t, (vs, c) in enumerate(terms):
        flat.extend(vs)
        t_start[t + 1] = len(flat)
        coeffs[t] = c
    t_vars = np.array(flat, np.int64) if flat else np.zeros(0, np.int64)
    by_var: list[list[int]] = [[] for _ in range(n_vars)]
    for t, (vs, _) in enumerate(terms):
        for v in vs:
            by_var[v].append(t)
    var_start = np.zeros(n_vars + 1, np.int64)
    vt: list[int] = []
    for v in range(n_vars):
        vt.extend(by_var[v])
        var_start[v + 1] = len(vt)
    var_terms = np.array(vt, np.int64) if vt else np.zeros(0, np.int64)
    return t_start, t_vars, coeffs, var_start, var_terms


def flip_delta(p: Poly, bits, v: int, n_vars: int | None = None) -> float:
    """Energy change from flipping bit ``v``, via the incremental kernel."""
    n = _poly_var_count(p, n_vars)
    t_start, t_vars, t_coeff, var_start, var_terms = _flatten_poly(p, n)
    arr = np.asarray(bits, np.uint8)
    return float(hubo_delta(arr, v, t_start, t_vars, t_coeff, var_start, var_terms))


def _poly_var_count(p: Poly, n_vars: int | None) -> int:
    n = (p.max_var + 1) if n_vars is None else n_vars
    if p.max_var >= n:
        raise ValueError(f"polynomial uses q{p.max_var} but n_vars is {n}")
    return n


def brute_force_min(p: Poly, n_vars: int | None = None) -> SolveResult:
    """Exact minimum by Gray-code enumeration of all assignments."""
    started = time.perf_counter()
    n = _poly_var_count(p, n_vars)
    if n > _BRUTE_FORCE_GUARD:
        raise VariableGuardError(
            f"refusing to enumerate 2^{n} assignments (guard 2^{_BRUTE_FORCE_GUARD})"
        )
    if n == 0:
        return SolveResult(
            best_assignment=(),
            best_value=p.offset,
            method="brute",
            evaluations=1,
            elapsed=time.perf_counter() - started,
        )
    t_start, t_vars, t_coeff, var_start, var_terms = _flatten_poly(p, n)
    _, best_bits = brute_gray(n, t_start, t_vars, t_coeff, p.offset, var_start, var_terms)
    bits = tuple(int(b) for b in best_bits)
    return SolveResult(
        best_assignment=bits,
        best_value=p.eval(bits),
        method="brute",
        evaluations=1 << n,
        elapsed=time.perf_counter() - started,
    )


def _restart_arrays(seed: int, restart: int, n: int, schedule: AnnealSchedule):
    rng = np.random.Generator(np.random.PCG64(seed ^ restart))
    bits = rng.integers(0, 2, n).astype(np.uint8)
    perms = rng.permuted(
        np.tile(np.arange(n, dtype=np.int64), (schedule.sweeps, 1)), axis=1
    )
    unifs = rng.random((schedule.sweeps, n))
    return bits, perms, unifs


def anneal_hubo(
    p: Poly,
    schedule: AnnealSchedule | None = None,
    n_vars: int | None = None,
    workers: int = 1,
) -> SolveResult:
    """Simulated annealing on a pseudo-Boolean polynomial of any degree."""
    started = time.perf_counter()
    sched = schedule or AnnealSchedule()
    n = _poly_var_count(p, n_vars)
    if n == 0:
        return SolveResult(
            best_assignment=(),
            best_value=p.offset,
            method="sa_hubo",
            evaluations=0,
            elapsed=time.perf_counter() - started,
        )
    t_start, t_vars, t_coeff, var_start, var_terms = _flatten_poly(p, n)
    temps = sched.temperatures()

    def run(restart: int) -> np.ndarray:
        bits, perms, unifs = _restart_arrays(sched.seed, restart, n, sched)
        _, best = anneal_hubo_run(
            bits, temps, perms, unifs, t_start, t_vars, t_coeff, p.offset, var_start, var_terms
        )
        return best

    if workers <= 1:
        raw = [run(r) for r in range(sched.restarts)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(run, range(sched.restarts)))

    per_restart: list[float] = []
    best_bits: tuple[int, ...] | None = None
    best_value = float("inf")
    for arr in raw:
        bits = tuple(int(b) for b in arr)
        value = p.eval(bits)
        per_restart.append(value)
        if value < best_value:
            best_value = value
            best_bits = bits
    assert best_bits is not None
    return SolveResult(
        best_assignment=best_bits,
        best_value=best_value,
        method="sa_hubo",
        evaluations=sched.restarts * sched.sweeps * n,
        elapsed=time.perf_counter() - started,
        per_restart_values=tuple(per_restart),
    )


def _flatten_qubo(model: QuboModel):
    n = model.n_vars
    lin = np.zeros(n, np.float64)
    for v, c in model.linear.items():
        lin[v] = c
    pairs = sorted(model.quadratic)
    e_a = np.array([a for a, _ in pairs], np.int64) if pairs else np.zeros(0, np.int64)
    e_b = np.array([b for _, b in pairs], np.int64) if pairs else np.zeros(0, np.int64)
    e_w = np.array([model.quadratic[p] for p in pairs], np.float64) if pairs else np.zeros(0)
    by_var: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for (a, b), w in model.quadratic.items():
        by_var[a].append((b, w))
        by_var[b].append((a, w))
    adj_start = np.zeros(n + 1, np.int64)
    idx: list[int] = []
    wts: list[float] = []
    for v in range(n):
        for u, w in sorted(by_var[v]):
            idx.append(u)
            wts.append(w)
        adj_start[v + 1] = len(idx)
    adj_idx = np.array(idx, np.int64) if idx else np.zeros(0, np.int64)
    adj_w = np.array(wts, np.float64) if wts else np.zeros(0)
    return lin, adj_start, adj_idx, adj_w, e_a, e_b, e_w


def anneal_qubo(
    model: QuboModel,
    schedule: AnnealSchedule | None = None,
    workers: int = 1,
) -> SolveResult:
    """Simulated annealing on a quadratic model, auxiliaries included.

    Each restart's winner is projected to the original variables and
    scored at the consistent lift, so the reported value is the one the
    source objective assigns to that switch assignment."""
    started = time.perf_counter()
    sched = schedule or AnnealSchedule()
    n = model.n_vars
    if n == 0:
        return SolveResult(
            best_assignment=(),
            best_value=model.offset,
            method="sa_qubo",
            evaluations=0,
            elapsed=time.perf_counter() - started,
            aux_consistent=True,
        )
    lin, adj_start, adj_idx, adj_w, e_a, e_b, e_w = _flatten_qubo(model)
    temps = sched.temperatures()

    def run(restart: int) -> np.ndarray:
        bits, perms, unifs = _restart_arrays(sched.seed, restart, n, sched)
        _, best = anneal_qubo_run(
            bits, temps, perms, unifs, lin, adj_start, adj_idx, adj_w, e_a, e_b, e_w, model.offset
        )
        return best

    if workers <= 1:
        raw = [run(r) for r in range(sched.restarts)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(run, range(sched.restarts)))

    per_restart: list[float] = []
    best_orig: tuple[int, ...] | None = None
    best_value = float("inf")
    best_consistent = True
    for arr in raw:
        full = tuple(int(b) for b in arr)
        orig = full[: model.n_original]
        lifted = lift_assignment(model, orig)
        value = model.value(lifted)
        per_restart.append(value)
        if value < best_value:
            best_value = value
            best_orig = orig
            best_consistent = full == lifted
    assert best_orig is not None
    return SolveResult(
        best_assignment=best_orig,
        best_value=best_value,
        method="sa_qubo",
        evaluations=sched.restarts * sched.sweeps * n,
        elapsed=time.perf_counter() - started,
        per_restart_values=tuple(per_restart),
        aux_consistent=best_consistent,
    )
