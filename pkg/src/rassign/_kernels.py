"""Integer hot loops behind the exact solvers.

Every kernel works on integer data (rationals brought to a common
denominator), so both backends are exact. The numba path is used unless
``RASSIGN_NO_NUMBA=1`` is set or numba is unavailable; inputs whose
magnitudes could overflow int64 always take the Python path, which runs on
arbitrary-precision ints.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("RASSIGN_NO_NUMBA", "") not in ("1", "true", "yes")
BACKEND = "numba" if USE_NUMBA else "numpy"

_INT64_SAFE = 2**62


def to_units(values):
    """Return ``(ints, denom)`` with ``values[k] == Fraction(ints[k], denom)``."""
    denom = 1
    for q in values:
        denom = math.lcm(denom, Fraction(q).denominator)
    return [int(Fraction(q) * denom) for q in values], denom


def _fits(*magnitudes) -> bool:
    return all(abs(int(x)) < _INT64_SAFE for x in magnitudes)


# ---------------------------------------------------------------------------
# subset sums: sums[mask] = sum of weights[k] for bits k set in mask


def _subset_sums_py(weights):
    sums = np.zeros(1, dtype=np.int64 if _fits(sum(abs(w) for w in weights)) else object)
    for w in weights:
        sums = np.concatenate([sums, sums + w])
    return sums


def _subset_sums_nb(weights):
    n = weights.shape[0]
    sums = np.zeros(1 << n, dtype=np.int64)
    for mask in range(1, 1 << n):
        low = mask & (-mask)
        k = 0
        while (1 << k) != low:
            k += 1
        sums[mask] = sums[mask ^ low] + weights[k]
    return sums


# ---------------------------------------------------------------------------
# exact makespan minimisation by depth-first branch and bound
#
# Jobs are taken in the given order (callers pass descending size); at each
# depth machines are tried by ascending current load, then index. A child is
# pruned when its partial makespan is >= the incumbent.


def _bnb_makespan_py(sizes, allowed):
    n = len(sizes)
    m = len(allowed[0]) if n else 0
    load = [0] * m
    assign = [0] * n
    best = sum(sizes) + 1
    best_assign = [0] * n
    explored = 0
    cand = [[0] * m for _ in range(n)]
    ncand = [0] * (n + 1)
    pos = [0] * (n + 1)
    curms = [0] * (n + 1)

    def prepare(d):
        order = sorted((load[i], i) for i in range(m) if allowed[d][i])
        for r, (_, i) in enumerate(order):
            cand[d][r] = i
        ncand[d] = len(order)
        pos[d] = 0

    if n == 0:
        return 0, [], 0
    d = 0
    prepare(0)
    while d >= 0:
        if pos[d] < ncand[d]:
            i = cand[d][pos[d]]
            pos[d] += 1
            newload = load[i] + sizes[d]
            ms = curms[d] if curms[d] > newload else newload
            if ms >= best:
                continue
            explored += 1
            assign[d] = i
            if d == n - 1:
                best = ms
                best_assign = list(assign)
                continue
            load[i] = newload
            curms[d + 1] = ms
            d += 1
            prepare(d)
        else:
            d -= 1
            if d >= 0:
                load[assign[d]] -= sizes[d]
    return best, best_assign, explored


def _bnb_makespan_nb(sizes, allowed):
    n = sizes.shape[0]
    m = allowed.shape[1]
    load = np.zeros(m, dtype=np.int64)
    assign = np.zeros(n, dtype=np.int64)
    best = sizes.sum() + 1
    best_assign = np.zeros(n, dtype=np.int64)
    explored = 0
    cand = np.zeros((n, m), dtype=np.int64)
    ncand = np.zeros(n + 1, dtype=np.int64)
    pos = np.zeros(n + 1, dtype=np.int64)
    curms = np.zeros(n + 1, dtype=np.int64)
    if n == 0:
        return 0, best_assign, 0
    d = 0
    # insertion sort of allowed machines by (load, index)
    c = 0
    for i in range(m):
        if allowed[0, i]:
            r = c
            while r > 0 and load[cand[0, r - 1]] > load[i]:
                cand[0, r] = cand[0, r - 1]
                r -= 1
            cand[0, r] = i
            c += 1
    ncand[0] = c
    pos[0] = 0
    while d >= 0:
        if pos[d] < ncand[d]:
            i = cand[d, pos[d]]
            pos[d] += 1
            newload = load[i] + sizes[d]
            ms = curms[d] if curms[d] > newload else newload
            if ms >= best:
                continue
            explored += 1
            assign[d] = i
            if d == n - 1:
                best = ms
                best_assign[:] = assign
                continue
            load[i] = newload
            curms[d + 1] = ms
            d += 1
            c = 0
            for i2 in range(m):
                if allowed[d, i2]:
                    r = c
                    while r > 0 and load[cand[d, r - 1]] > load[i2]:
                        cand[d, r] = cand[d, r - 1]
                        r -= 1
                    cand[d, r] = i2
                    c += 1
            ncand[d] = c
            pos[d] = 0
        else:
            d -= 1
            if d >= 0:
                load[assign[d]] -= sizes[d]
    return best, best_assign, explored


# ---------------------------------------------------------------------------
# 0/1 knapsack maximum by depth-first branch and bound.
#
# Items must be pre-sorted by value/weight descending. The bound is the
# greedy fractional fill, compared by cross-multiplication so it stays exact.


def _knapsack_py(values, weights, cap):
    n = len(values)
    best = 0
    stage = [0] * (n + 1)
    took = [False] * (n + 1)
    cur_v = 0
    cur_w = 0
    d = 0
    while d >= 0:
        if stage[d] == 0:
            prune = False
            if d == n:
                if cur_v > best:
                    best = cur_v
                prune = True
            else:
                rem = cap - cur_w
                acc = cur_v
                k = d
                while k < n and weights[k] <= rem:
                    rem -= weights[k]
                    acc += values[k]
                    k += 1
                if k == n:
                    prune = acc <= best
                else:
                    prune = acc * weights[k] + rem * values[k] <= best * weights[k]
            if prune:
                d -= 1
                continue
            stage[d] = 1
            if weights[d] <= cap - cur_w:
                took[d] = True
                cur_v += values[d]
                cur_w += weights[d]
                d += 1
                stage[d] = 0
                continue
            took[d] = False
        if stage[d] == 1:
            if took[d]:
                cur_v -= values[d]
                cur_w -= weights[d]
                took[d] = False
            stage[d] = 2
            d += 1
            stage[d] = 0
            continue
        d -= 1
    return best


def _knapsack_nb(values, weights, cap):
    n = values.shape[0]
    best = 0
    stage = np.zeros(n + 1, dtype=np.int64)
    took = np.zeros(n + 1, dtype=np.bool_)
    cur_v = 0
    cur_w = 0
    d = 0
    while d >= 0:
        if stage[d] == 0:
            prune = False
            if d == n:
                if cur_v > best:
                    best = cur_v
                prune = True
            else:
                rem = cap - cur_w
                acc = cur_v
                k = d
                while k < n and weights[k] <= rem:
                    rem -= weights[k]
                    acc += values[k]
                    k += 1
                if k == n:
                    prune = acc <= best
                else:
                    prune = acc * weights[k] + rem * values[k] <= best * weights[k]
            if prune:
                d -= 1
                continue
            stage[d] = 1
            if weights[d] <= cap - cur_w:
                took[d] = True
                cur_v += values[d]
                cur_w += weights[d]
                d += 1
                stage[d] = 0
                continue
            took[d] = False
        if stage[d] == 1:
            if took[d]:
                cur_v -= values[d]
                cur_w -= weights[d]
                took[d] = False
            stage[d] = 2
            d += 1
            stage[d] = 0
            continue
        d -= 1
    return best


if HAVE_NUMBA:
    _subset_sums_jit = njit(cache=True)(_subset_sums_nb)
    _bnb_makespan_jit = njit(cache=True)(_bnb_makespan_nb)
    _knapsack_jit = njit(cache=True)(_knapsack_nb)


# ---------------------------------------------------------------------------
# dispatching wrappers


def subset_sums(weights, backend=None):
    """All ``2**n`` subset sums of integer ``weights``, indexed by bitmask."""
    backend = backend or BACKEND
    weights = [int(w) for w in weights]
    if backend == "numba" and HAVE_NUMBA and _fits(sum(abs(w) for w in weights)):
        return _subset_sums_jit(np.asarray(weights, dtype=np.int64))
    return _subset_sums_py(weights)


def bnb_makespan(sizes, allowed, backend=None):
    """Minimum makespan over assignments respecting ``allowed`` (n x m booleans).

    Returns ``(best, assignment, explored)`` with jobs in the order given.
    """
    backend = backend or BACKEND
    sizes = [int(s) for s in sizes]
    allowed = np.asarray(allowed, dtype=np.bool_).reshape(len(sizes), -1)
    if backend == "numba" and HAVE_NUMBA and _fits(sum(sizes) + 1):
        best, assign, explored = _bnb_makespan_jit(np.asarray(sizes, dtype=np.int64), allowed)
        return int(best), [int(a) for a in assign], int(explored)
    best, assign, explored = _bnb_makespan_py(sizes, allowed.tolist())
    return best, assign, explored


def knapsack_max(values, weights, cap, backend=None):
    """Maximum total value of a subset with total weight <= cap (non-negative ints)."""
    backend = backend or BACKEND
    items = [(int(v), int(w)) for v, w in zip(values, weights) if v > 0 and w <= cap]
    free = sum(v for v, w in items if w == 0)
    items = [(v, w) for v, w in items if w > 0]
    items.sort(key=lambda vw: Fraction(vw[0], vw[1]), reverse=True)
    vals = [v for v, _ in items]
    wts = [w for _, w in items]
    bound = (sum(vals) + 1) * (max(wts, default=0) + 1) + cap * (max(vals, default=0) + 1)
    if backend == "numba" and HAVE_NUMBA and _fits(bound, cap):
        best = _knapsack_jit(
            np.asarray(vals, dtype=np.int64), np.asarray(wts, dtype=np.int64), np.int64(cap)
        )
        return int(best) + free
    return _knapsack_py(vals, wts, int(cap)) + free
