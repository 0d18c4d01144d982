"""Compiled inner loops for annealing and exhaustive search.

Polynomials arrive flattened: term t owns the variable ids
``t_vars[t_start[t]:t_start[t + 1]]`` and coefficient ``t_coeff[t]``
(constant term excluded, carried as ``offset``).  ``var_terms`` with
``var_start`` is the reverse index mapping each variable to the terms
containing it, which makes a single-flip energy delta a scan of only the
affected terms.  Quadratic models use a symmetric adjacency
(``adj_start``/``adj_idx``/``adj_w``) plus a linear array.
"""

from __future__ import annotations

import numba as nb
import numpy as np


@nb.njit(cache=True, nogil=True)
def hubo_energy(bits, t_start, t_vars, t_coeff, offset):
    total = offset
    for t in range(t_coeff.shape[0]):
        prod = True
        for k in range(t_start[t], t_start[t + 1]):
            if bits[t_vars[k]] == 0:
                prod = False
                break
        if prod:
            total += t_coeff[t]
    return total


@nb.njit(cache=True, nogil=True)
def hubo_delta(bits, v, t_start, t_vars, t_coeff, var_start, var_terms):
    acc = 0.0
    for k in range(var_start[v], var_start[v + 1]):
        t = var_terms[k]
        others = True
        for j in range(t_start[t], t_start[t + 1]):
            u = t_vars[j]
            if u != v and bits[u] == 0:
                others = False
                break
        if others:
            acc += t_coeff[t]
    if bits[v] == 1:
        return -acc
    return acc


@nb.njit(cache=True, nogil=True)
def anneal_hubo_run(bits, temps, perms, unifs, t_start, t_vars, t_coeff, offset, var_start, var_terms):
    n = bits.shape[0]
    energy = hubo_energy(bits, t_start, t_vars, t_coeff, offset)
    best_energy = energy
    best_bits = bits.copy()
    for s in range(temps.shape[0]):
        temp = temps[s]
        for k in range(n):
            v = perms[s, k]
            delta = hubo_delta(bits, v, t_start, t_vars, t_coeff, var_start, var_terms)
            if delta <= 0.0 or unifs[s, k] < np.exp(-delta / temp):
                bits[v] = 1 - bits[v]
                energy += delta
                if energy < best_energy:
                    best_energy = energy
                    best_bits[:] = bits
    return best_energy, best_bits


@nb.njit(cache=True, nogil=True)
def brute_gray(n, t_start, t_vars, t_coeff, offset, var_start, var_terms):
    """Gray-code walk over all 2**n assignments; exactly one bit flips
    per step so each energy update is a single delta.  Ties keep the
    lexicographically smallest assignment."""
    bits = np.zeros(n, np.uint8)
    best_bits = bits.copy()
    energy = offset
    best_energy = energy
    comp = 0.0
    total = np.int64(1) << np.int64(n)
    for i in range(1, total):
        v = 0
        x = i
        while x & 1 == 0:
            x >>= 1
            v += 1
        delta = hubo_delta(bits, v, t_start, t_vars, t_coeff, var_start, var_terms)
        bits[v] = 1 - bits[v]
        y = delta - comp
        t = energy + y
        comp = (t - energy) - y
        energy = t
        if energy < best_energy:
            best_energy = energy
            best_bits[:] = bits
        elif energy == best_energy:
            for j in range(n):
                if bits[j] != best_bits[j]:
                    if bits[j] < best_bits[j]:
                        best_bits[:] = bits
                    break
    return best_energy, best_bits


@nb.njit(cache=True, nogil=True)
def qubo_energy(bits, lin, e_a, e_b, e_w, offset):
    total = offset
    for v in range(lin.shape[0]):
        if bits[v]:
            total += lin[v]
    for k in range(e_w.shape[0]):
        if bits[e_a[k]] and bits[e_b[k]]:
            total += e_w[k]
    return total


@nb.njit(cache=True, nogil=True)
def qubo_delta(bits, v, lin, adj_start, adj_idx, adj_w):
    acc = lin[v]
    for k in range(adj_start[v], adj_start[v + 1]):
        if bits[adj_idx[k]]:
            acc += adj_w[k]
    if bits[v] == 1:
        return -acc
    return acc


@nb.njit(cache=True, nogil=True)
def anneal_qubo_run(bits, temps, perms, unifs, lin, adj_start, adj_idx, adj_w, e_a, e_b, e_w, offset):
    n = bits.shape[0]
    energy = qubo_energy(bits, lin, e_a, e_b, e_w, offset)
    best_energy = energy
    best_bits = bits.copy()
    for s in range(temps.shape[0]):
        temp = temps[s]
        for k in range(n):
            v = perms[s, k]
            delta = qubo_delta(bits, v, lin, adj_start, adj_idx, adj_w)
            if delta <= 0.0 or unifs[s, k] < np.exp(-delta / temp):
                bits[v] = 1 - bits[v]
                energy += delta
                if energy < best_energy:
                    best_energy = energy
                    best_bits[:] = bits
    return best_energy, best_bits
