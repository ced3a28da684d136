"""Configuration-LP at desk scale: explicit enumeration plus an exact phase-1 simplex.

The primal for target ``T`` picks, per machine, a convex-ish mixture of
configurations (job sets fitting within ``T``) so that every job is covered
at least once. Feasibility is decided exactly over all enumerated
configurations; infeasibility can be certified independently with a dual
point checked by :func:`verify_dual`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _kernels
from .errors import GuardExceeded
from .instance import Instance, format_rational

DEFAULT_LIMIT = 20


@dataclass(frozen=True)
class Configuration:
    machine: int
    jobs: frozenset


@dataclass(frozen=True)
class DualSolution:
    """``y`` indexed by machine, ``z`` by canonical job index."""

    y: tuple
    z: tuple

    def objective(self) -> Fraction:
        return sum(self.y, Fraction(0)) - sum(self.z, Fraction(0))

    def to_dict(self, inst: Instance) -> dict:
        z_orig = [None] * inst.n
        for k, orig in enumerate(inst.original):
            z_orig[orig] = format_rational(self.z[k])
        return {"y": [format_rational(v) for v in self.y], "z": z_orig}

    @classmethod
    def from_dict(cls, inst: Instance, data: dict) -> "DualSolution":
        from .instance import parse_rational

        z_orig = [parse_rational(v) for v in data["z"]]
        if len(z_orig) != inst.n:
            raise ValueError("dual z has wrong length")
        return cls(
            y=tuple(parse_rational(v) for v in data["y"]),
            z=tuple(z_orig[orig] for orig in inst.original),
        )


@dataclass
class LPResult:
    T: Fraction
    feasible: bool
    primal: Optional[dict] = None  # (machine, frozenset of jobs) -> weight
    pivots: int = 0

    def to_dict(self, inst: Instance) -> dict:
        rows = []
        for (i, jobs), x in sorted(
            (self.primal or {}).items(), key=lambda kv: (kv[0][0], sorted(kv[0][1]))
        ):
            if x != 0:
                rows.append(
                    {
                        "machine": i,
                        "config": sorted(inst.original[j] for j in jobs),
                        "x": format_rational(x),
                    }
                )
        return {"T": format_rational(self.T), "feasible": self.feasible, "primal": rows}


@dataclass
class DualCheck:
    feasible: bool
    objective: Fraction
    violations: list = field(default_factory=list)  # (machine, best z(C), y_i)


def _config_masks(inst: Instance, i: int, T: Fraction, limit: int):
    jobs = inst.allowed_jobs(i)
    if len(jobs) > limit:
        raise GuardExceeded(
            f"machine {i} admits {len(jobs)} jobs, above the enumeration limit {limit}"
        )
    units, denom = _kernels.to_units([inst.jobs[j].p for j in jobs] + [T])
    cap = units.pop()
    sums = _kernels.subset_sums(units)
    masks = np.flatnonzero(sums <= cap)
    return jobs, masks


def enumerate_configs(inst: Instance, i: int, T, limit: int = DEFAULT_LIMIT) -> list:
    """All job sets fitting on machine ``i`` within ``T``, empty set first, in bitmask order."""
    T = Fraction(T)
    if T < 0:
        raise ValueError("T must be non-negative")
    jobs, masks = _config_masks(inst, i, T, limit)
    out = []
    for mask in masks.tolist():
        out.append(
            Configuration(i, frozenset(jobs[k] for k in range(len(jobs)) if mask >> k & 1))
        )
    return out


def _phase1(m: int, n: int, columns: tuple) -> tuple:
    """Exact revised phase-1 simplex with Bland's rule, fraction free.

    Keeps ``adj = det * B^-1`` and ``xb = det * x_B`` as integer arrays and
    updates them with Bareiss' exact-division rule, so no rational ever has
    to be normalised inside the loop. Returns (feasible, {variable: value},
    pivots).
    """
    col_machine, col_jobs = columns
    nx = len(col_machine)
    r = m + n
    # variable ids: [0, nx) configs, then surplus t_j, slack s_i, artificial a_j
    t0 = nx
    s0 = t0 + n
    a0 = s0 + m
    basis = [s0 + i for i in range(m)] + [a0 + j for j in range(n)]
    dtype = np.int64
    adj = np.eye(r, dtype=dtype)
    xb = np.ones(r, dtype=dtype)
    det = 1

    inc = np.zeros((nx, r), dtype=np.int64)
    for c in range(nx):
        inc[c, col_machine[c]] = 1
        for j in col_jobs[c]:
            inc[c, m + j] = 1
    inc_obj = None

    def column(var):
        v = np.zeros(r, dtype=np.int64)
        if var < t0:
            v[col_machine[var]] = 1
            for j in col_jobs[var]:
                v[m + j] = 1
        elif var < s0:
            v[m + var - t0] = -1
        elif var < a0:
            v[var - s0] = 1
        else:
            v[m + var - a0] = 1
        return v

    pivots = 0
    while True:
        art = np.array([b >= a0 for b in basis])
        if not xb[art].any():
            return True, {b: Fraction(int(x), det) for b, x in zip(basis, xb)}, pivots
        pi = adj[art].sum(axis=0)  # det * duals
        entering = None
        if nx:
            if dtype is not object and int(np.abs(pi).max()) * r >= 2**62:
                dtype = object
                adj, xb, pi = adj.astype(object), xb.astype(object), pi.astype(object)
            if dtype is object:
                if inc_obj is None:
                    inc_obj = inc.astype(object)
                red = -(inc_obj @ pi)
            else:
                red = -(inc @ pi)
            neg = np.flatnonzero(red < 0)
            if neg.size:
                entering = int(neg[0])
        if entering is None:
            for var in range(t0, a0 + n):
                if var < s0:
                    d = pi[m + var - t0]
                elif var < a0:
                    d = -pi[var - s0]
                else:
                    d = det - pi[m + var - a0]
                if d < 0:
                    entering = var
                    break
        if entering is None:
            return False, {b: Fraction(int(x), det) for b, x in zip(basis, xb)}, pivots
        u = adj @ column(entering).astype(dtype)
        leave = None
        for q in range(r):
            if u[q] > 0:
                if leave is None:
                    leave = q
                    continue
                lhs = int(xb[q]) * int(u[leave])
                rhs = int(xb[leave]) * int(u[q])
                if lhs < rhs or (lhs == rhs and basis[q] < basis[leave]):
                    leave = q
        if leave is None:  # pragma: no cover - phase 1 is bounded below by 0
            raise RuntimeError("phase-1 simplex reported unbounded")
        piv = int(u[leave])
        bound = max(int(np.abs(adj).max()), int(np.abs(xb).max())) * max(
            piv, int(np.abs(u).max())
        )
        if dtype is not object and bound >= 2**62:
            dtype = object
            adj, xb, u = adj.astype(object), xb.astype(object), u.astype(object)
        row_l, x_l = adj[leave].copy(), xb[leave]
        adj = (adj * piv - np.outer(u, row_l)) // det
        xb = (xb * piv - u * x_l) // det
        adj[leave] = row_l
        xb[leave] = x_l
        det = piv
        basis[leave] = entering
        pivots += 1


def lp_feasible(inst: Instance, T, limit: int = DEFAULT_LIMIT) -> LPResult:
    """Decide the configuration-LP at target ``T``; return an exact primal point if feasible."""
    T = Fraction(T)
    if T < 0:
        raise ValueError("T must be non-negative")
    col_machine, col_jobs = [], []
    for i in inst.machines:
        jobs, masks = _config_masks(inst, i, T, limit)
        for mask in masks.tolist():
            if mask == 0:
                continue  # the empty configuration duplicates the machine slack
            col_machine.append(i)
            col_jobs.append(tuple(jobs[k] for k in range(len(jobs)) if mask >> k & 1))
    covered = set(j for js in col_jobs for j in js)
    if len(covered) < inst.n:
        return LPResult(T, False)
    ok, values, pivots = _phase1(inst.machine_count, inst.n, (col_machine, col_jobs))
    if not ok:
        return LPResult(T, False, pivots=pivots)
    primal = {}
    for var, x in values.items():
        if var < len(col_machine) and x != 0:
            primal[(col_machine[var], frozenset(col_jobs[var]))] = x
    result = LPResult(T, True, primal, pivots)
    if not verify_primal(inst, T, primal):  # pragma: no cover - simplex bug
        raise AssertionError("simplex returned a primal point that fails verification")
    return result


def verify_primal(inst: Instance, T, primal: dict) -> bool:
    """Check the primal constraints directly: fit, allowedness, machine budget, coverage."""
    T = Fraction(T)
    budget = [Fraction(0)] * inst.machine_count
    cover = [Fraction(0)] * inst.n
    for (i, jobs), x in primal.items():
        if x < 0 or not 0 <= i < inst.machine_count:
            return False
        if any(i not in inst.jobs[j].allowed for j in jobs):
            return False
        if sum((inst.jobs[j].p for j in jobs), Fraction(0)) > T:
            return False
        budget[i] += x
        for j in jobs:
            cover[j] += x
    return all(b <= 1 for b in budget) and all(c >= 1 for c in cover)


def subset_sum_grid(inst: Instance) -> list:
    """Sorted distinct subset sums of all processing times, 0 included."""
    units, denom = _kernels.to_units(inst.sizes)
    sums = {0}
    for w in units:
        sums |= {s + w for s in sums}
    return [Fraction(s, denom) for s in sorted(sums)]


def opt_star_result(inst: Instance, limit: int = DEFAULT_LIMIT) -> LPResult:
    """Smallest grid value at which the LP is feasible, with its primal point."""
    grid = subset_sum_grid(inst)
    total = grid[-1]
    lower = max(max(inst.sizes), total / inst.machine_count)
    cands = [g for g in grid if g >= lower]
    # LP feasibility only changes where some configuration set changes, i.e. on the grid
    lo, hi = -1, len(cands) - 1
    best = lp_feasible(inst, cands[hi], limit)
    if not best.feasible:  # pragma: no cover - every job alone on one machine fits
        raise AssertionError("configuration-LP infeasible at the total processing time")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        res = lp_feasible(inst, cands[mid], limit)
        if res.feasible:
            hi, best = mid, res
        else:
            lo = mid
    return best


def opt_star(inst: Instance, limit: int = DEFAULT_LIMIT) -> Fraction:
    return opt_star_result(inst, limit).T


def verify_dual(inst: Instance, T, d: DualSolution) -> DualCheck:
    """Check dual feasibility at ``T`` by exact per-machine knapsack maximisation of ``z``.

    A feasible point with negative objective certifies that the primal is infeasible.
    """
    T = Fraction(T)
    if len(d.y) != inst.machine_count or len(d.z) != inst.n:
        raise ValueError("dual solution must have one y per machine and one z per job")
    if any(v < 0 for v in d.y) or any(v < 0 for v in d.z):
        raise ValueError("dual values must be non-negative")
    violations = []
    for i in inst.machines:
        jobs = [j for j in inst.allowed_jobs(i) if d.z[j] > 0]
        best = Fraction(0)
        if jobs:
            vals, vden = _kernels.to_units([d.z[j] for j in jobs])
            wts, wden = _kernels.to_units([inst.jobs[j].p for j in jobs] + [T])
            cap = wts.pop()
            if cap >= 0:
                best = Fraction(_kernels.knapsack_max(vals, wts, cap), vden)
        if best > d.y[i]:
            violations.append((i, best, d.y[i]))
    return DualCheck(not violations, d.objective(), violations)
