"""Brute-force ground truth for small instances.

Nothing here reuses the condition logic of the local search; the
potential-move evaluator below re-derives every set from the raw state so
that disagreements expose bugs on either side.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _kernels
from .errors import GuardExceeded
from .instance import Instance

DEFAULT_GUARD = 10**8
LIMIT = Fraction(11, 6)


@dataclass(frozen=True)
class OracleResult:
    opt: Fraction
    witness_schedule: tuple  # machine per canonical job
    explored: int


def brute_force_opt(inst: Instance, guard: int = DEFAULT_GUARD, backend=None) -> OracleResult:
    """Exact integral optimum by branch and bound over all allowed assignments."""
    if inst.machine_count**inst.n > guard:
        raise GuardExceeded(f"{inst.machine_count}^{inst.n} assignments exceed the guard {guard}")
    order = sorted(range(inst.n), key=lambda j: (-inst.jobs[j].p, j))
    units, denom = _kernels.to_units([inst.jobs[j].p for j in order])
    allowed = [[i in inst.jobs[j].allowed for i in inst.machines] for j in order]
    best, assign, explored = _kernels.bnb_makespan(units, allowed, backend=backend)
    witness = [None] * inst.n
    for d, j in enumerate(order):
        witness[j] = assign[d]
    opt = Fraction(best, denom)
    loads = [Fraction(0)] * inst.machine_count
    for j, i in enumerate(witness):
        loads[i] += inst.jobs[j].p
    assert max(loads) == opt
    return OracleResult(opt, tuple(witness), explored)


_ANY = {"SmallToAny", "BigToAny"}


def brute_force_potential_moves(state) -> list:
    """Potential moves as ``(job, machine, type_rank, (rank, tiebreak))`` tuples, sorted.

    Reads only the instance, the assignment, the tree's (job, machine, type)
    triples and the new job from ``state``.
    """
    inst = state.inst
    sigma = list(state.schedule.assignment)
    tree = [(b.job, b.machine, b.type.label) for b in state.tree]
    j_new = state.j_new
    n, machines = inst.n, list(inst.machines)

    def p(j):
        return inst.jobs[j].p

    def is_big(j):
        return p(j) > Fraction(1, 2)

    def on(i):
        return [j for j in range(n) if sigma[j] == i]

    def big_on(i):
        return [j for j in on(i) if is_big(j)]

    def total(js):
        return sum((p(j) for j in js), Fraction(0))

    M_any = {i for (_, i, t) in tree if t in _ANY}
    M_bb = {i for (_, i, t) in tree if t == "BigToBig"}
    M_bl = {i for (_, i, t) in tree if t == "BigToLeast"}

    def undesirable_on(j, i):
        kinds = {t for (_, h, t) in tree if h == i}
        if kinds & _ANY:
            return True
        if is_big(j) and "BigToBig" in kinds:
            return True
        if is_big(j) and "BigToLeast" in kinds:
            b = big_on(i)
            return not b or j <= min(b)
        return False

    S = set()
    for j in range(n):
        if sigma[j] is None or is_big(j):
            continue
        others = set(inst.jobs[j].allowed) - {sigma[j]}
        if others <= M_any:
            S.add(j)
    A = {j_new} | S | {j for j in range(n) if sigma[j] is not None and undesirable_on(j, sigma[j])}

    out = []
    for j in sorted(A):
        for i in machines:
            if i not in inst.jobs[j].allowed or i == sigma[j]:
                continue
            # requirement 1
            if any(bj == j and bi == i for (bj, bi, _) in tree):
                continue
            # requirement 3
            if i in M_any:
                continue
            if is_big(j):
                if i in M_bb:
                    continue
                if i in M_bl:
                    b = big_on(i)
                    if not (b and min(b) < j):
                        continue
            S_i = [k for k in S if sigma[k] == i]
            B_i = big_on(i)
            B_min = [min(B_i)] if B_i else []
            count = len(on(i))
            if not is_big(j):
                out.append((j, i, 1, (1, count)))
                continue
            rows = []
            if total(S_i) + total(B_i) + p(j) <= LIMIT:
                rows.append((2, (2, count)))
            if total(S_i) + total(B_min) + p(j) > LIMIT and total(S_i) + p(j) <= LIMIT:
                rows.append((3, (3, -min(B_i))))
            if total(S_i) + total(B_i) + p(j) > LIMIT and total(S_i) + total(B_min) + p(j) <= LIMIT:
                rows.append((4, (4, len(B_i))))
            assert len(rows) <= 1, "load conditions overlap"
            if total(S_i) + p(j) <= LIMIT:
                assert len(rows) == 1, "no load condition applies to a big move that fits"
            for rank, value in rows:
                out.append((j, i, rank, value))
    out.sort(key=lambda t: (t[3], t[0], t[1]))
    return out
