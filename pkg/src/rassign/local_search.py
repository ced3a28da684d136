"""Blocker-tree local search for Restricted Assignment.

Works on an instance scaled so that the LP target is 1 and keeps every
machine load at most ``1 + R`` with ``R = 5/6``. A single call to
:func:`extend` places one new job, possibly after a cascade of moves
recorded as blockers; when neither a blocker move is valid nor a new
blocker can be added, the search is stuck and the state is frozen into a
:class:`StuckState` (which the dual witness turns into an infeasibility
certificate).
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Optional

from .errors import InvariantViolation, IterationCapExceeded
from .instance import HALF, Instance, InstanceError, format_rational, scale

R = Fraction(5, 6)
CAPACITY = 1 + R
ROOT = -1
DEFAULT_ITERATION_CAP = 10**6


class BlockerType(enum.IntEnum):
    SMALL_TO_ANY = 1
    BIG_TO_ANY = 2
    BIG_TO_LEAST = 3
    BIG_TO_BIG = 4

    @property
    def label(self) -> str:
        return {1: "SmallToAny", 2: "BigToAny", 3: "BigToLeast", 4: "BigToBig"}[self.value]


class MoveValue(NamedTuple):
    rank: int
    tiebreak: int


# larger than every move value; closes the signature vector
SENTINEL = MoveValue(5, 0)


class PotentialMove(NamedTuple):
    job: int
    machine: int
    type: BlockerType
    value: MoveValue

    def key(self):
        return (self.value.rank, self.value.tiebreak, self.job, self.machine)


@dataclass(frozen=True)
class Blocker:
    job: int
    machine: int
    type: BlockerType
    inserted_value: MoveValue
    activator: int  # tree position, or ROOT for the new job


class PartialSchedule:
    """Assignment job -> machine or None, with cached per-machine loads."""

    def __init__(self, inst: Instance, assignment=None):
        self.inst = inst
        self.assignment = [None] * inst.n
        self.loads = [Fraction(0)] * inst.machine_count
        self.on = [set() for _ in inst.machines]
        if assignment is not None:
            if len(assignment) != inst.n:
                raise InstanceError("assignment length does not match the instance")
            for j, i in enumerate(assignment):
                if i is not None:
                    self.assign(j, i)

    def assign(self, j: int, i: int) -> None:
        if i not in self.inst.jobs[j].allowed:
            raise InstanceError(f"job {j} is not allowed on machine {i}")
        old = self.assignment[j]
        p = self.inst.jobs[j].p
        if old is not None:
            self.on[old].discard(j)
            self.loads[old] -= p
        self.assignment[j] = i
        self.on[i].add(j)
        self.loads[i] += p

    def copy(self) -> "PartialSchedule":
        new = PartialSchedule.__new__(PartialSchedule)
        new.inst = self.inst
        new.assignment = list(self.assignment)
        new.loads = list(self.loads)
        new.on = [set(s) for s in self.on]
        return new

    def assigned(self) -> set:
        return {j for j, i in enumerate(self.assignment) if i is not None}

    def is_complete(self) -> bool:
        return all(i is not None for i in self.assignment)

    def makespan(self) -> Fraction:
        return max(self.loads, default=Fraction(0))

    def is_valid(self) -> bool:
        return all(load <= CAPACITY for load in self.loads)

    def cache_consistent(self) -> bool:
        loads = [Fraction(0)] * self.inst.machine_count
        for j, i in enumerate(self.assignment):
            if i is not None:
                loads[i] += self.inst.jobs[j].p
        return loads == self.loads


class SearchState:
    """Schedule, blocker tree and the job being placed, with derived views."""

    def __init__(self, inst: Instance, schedule: PartialSchedule, j_new: int, tree=None):
        self.inst = inst
        self.schedule = schedule
        self.j_new = j_new
        self.tree: list = list(tree or [])
        self.p = inst.sizes
        self.big = [p > HALF for p in self.p]
        self.last_signature = signature(self.tree)

    # -- views -------------------------------------------------------------

    def sigma(self, j: int):
        return self.schedule.assignment[j]

    def blocker_machines(self, prefix: Optional[int] = None):
        """Machines hosting (any-type, big-to-least, big-to-big) blockers in ``tree[:prefix]``."""
        m_any, m_least, m_big = set(), set(), set()
        for b in self.tree[:prefix]:
            if b.type in (BlockerType.SMALL_TO_ANY, BlockerType.BIG_TO_ANY):
                m_any.add(b.machine)
            elif b.type is BlockerType.BIG_TO_LEAST:
                m_least.add(b.machine)
            else:
                m_big.add(b.machine)
        return m_any, m_least, m_big

    def bigs_on(self, i: int) -> list:
        return sorted(j for j in self.schedule.on[i] if self.big[j])

    def min_big(self, i: int):
        bigs = [j for j in self.schedule.on[i] if self.big[j]]
        return min(bigs) if bigs else None

    def marks(self, b: Blocker, j: int) -> bool:
        """Whether blocker ``b`` alone makes job ``j`` undesirable on its machine."""
        if b.type in (BlockerType.SMALL_TO_ANY, BlockerType.BIG_TO_ANY):
            return True
        if not self.big[j]:
            return False
        if b.type is BlockerType.BIG_TO_BIG:
            return True
        least = self.min_big(b.machine)
        return least is None or j <= least

    def undesirable(self, j: int, i: int, machines=None) -> bool:
        m_any, m_least, m_big = machines or self.blocker_machines()
        if i in m_any:
            return True
        if not self.big[j]:
            return False
        if i in m_big:
            return True
        if i in m_least:
            least = self.min_big(i)
            return least is None or j <= least
        return False

    def stuck_small(self, prefix: Optional[int] = None) -> set:
        """Assigned small jobs whose every other allowed machine hosts an any-type blocker."""
        m_any = self.blocker_machines(prefix)[0]
        out = set()
        for j, i in enumerate(self.schedule.assignment):
            if i is None or self.big[j]:
                continue
            if all(h == i or h in m_any for h in self.inst.jobs[j].allowed):
                out.add(j)
        return out

    def active(self, machines=None, stuck=None) -> set:
        machines = machines or self.blocker_machines()
        stuck = self.stuck_small() if stuck is None else stuck
        act = {self.j_new} | stuck
        for j, i in enumerate(self.schedule.assignment):
            if i is not None and self.undesirable(j, i, machines):
                act.add(j)
        return act

    def activator(self, j: int) -> int:
        """Earliest blocker on ``j``'s machine that marks ``j`` undesirable (ROOT for the new job)."""
        if j == self.j_new:
            return ROOT
        i = self.sigma(j)
        for q, b in enumerate(self.tree):
            if b.machine == i and self.marks(b, j):
                return q
        raise InvariantViolation(f"job {j} has a blocker but no activator", self.dump())

    def valid_tree_moves(self) -> list:
        """Tree positions whose move currently fits."""
        loads = self.schedule.loads
        return [
            q for q, b in enumerate(self.tree) if loads[b.machine] + self.p[b.job] <= CAPACITY
        ]

    def dump(self) -> dict:
        return {
            "j_new": self.j_new,
            "assignment": list(self.schedule.assignment),
            "loads": [format_rational(x) for x in self.schedule.loads],
            "tree": [
                {
                    "job": b.job,
                    "machine": b.machine,
                    "type": b.type.label,
                    "value": list(b.inserted_value),
                    "activator": b.activator,
                }
                for b in self.tree
            ],
        }


def signature(tree) -> tuple:
    return tuple(b.inserted_value for b in tree) + (SENTINEL,)


def is_valid_move(state: SearchState, j: int, i: int) -> bool:
    if i not in state.inst.jobs[j].allowed or state.sigma(j) == i:
        raise ValueError(f"({j}, {i}) is not a move")
    return state.schedule.loads[i] + state.p[j] <= CAPACITY


def classify_big_move(stuck_load, bigs_load, least_load, p_j):
    """Table of load conditions for a big job; returns the blocker type or None."""
    s = stuck_load + p_j
    if s + bigs_load <= CAPACITY:
        return BlockerType.BIG_TO_ANY
    if s + least_load > CAPACITY and s <= CAPACITY:
        return BlockerType.BIG_TO_LEAST
    if s + bigs_load > CAPACITY and s + least_load <= CAPACITY:
        return BlockerType.BIG_TO_BIG
    return None


def potential_moves(state: SearchState) -> list:
    """All potential moves of active jobs, sorted by (value, job, machine)."""
    machines = state.blocker_machines()
    m_any = machines[0]
    stuck = state.stuck_small()
    act = state.active(machines, stuck)
    in_tree = {(b.job, b.machine) for b in state.tree}
    p = state.p
    sched = state.schedule
    stuck_load = [Fraction(0)] * state.inst.machine_count
    for j in stuck:
        stuck_load[sched.assignment[j]] += p[j]
    bigs = [state.bigs_on(i) for i in state.inst.machines]

    moves = []
    for j in act:
        src = sched.assignment[j]
        for i in state.inst.jobs[j].allowed:
            if i == src or (j, i) in in_tree or i in m_any:
                continue
            if not state.big[j]:
                moves.append(
                    PotentialMove(j, i, BlockerType.SMALL_TO_ANY, MoveValue(1, len(sched.on[i])))
                )
                continue
            if state.undesirable(j, i, machines):
                continue
            b = bigs[i]
            kind = classify_big_move(
                stuck_load[i], sum((p[k] for k in b), Fraction(0)), p[b[0]] if b else 0, p[j]
            )
            if kind is BlockerType.BIG_TO_ANY:
                value = MoveValue(2, len(sched.on[i]))
            elif kind is BlockerType.BIG_TO_LEAST:
                value = MoveValue(3, -b[0])
            elif kind is BlockerType.BIG_TO_BIG:
                value = MoveValue(4, len(b))
            else:
                continue
            moves.append(PotentialMove(j, i, kind, value))
    moves.sort(key=PotentialMove.key)
    return moves


def add_blocker(state: SearchState, move: PotentialMove, candidates=None) -> Blocker:
    """Append ``move`` as the next blocker; it must be the minimum potential move."""
    if candidates is None:
        candidates = potential_moves(state)
    if not candidates or candidates[0] != move:
        raise InvariantViolation(f"{move} is not the minimum potential move", state.dump())
    blocker = Blocker(move.job, move.machine, move.type, move.value, state.activator(move.job))
    state.tree.append(blocker)
    sig = signature(state.tree)
    if not sig < state.last_signature:
        raise InvariantViolation("signature vector did not decrease", state.dump())
    state.last_signature = sig
    return blocker


def select_valid_move(state: SearchState):
    """Among valid tree moves, the one with the earliest recorded activator, then by position."""
    valid = state.valid_tree_moves()
    if not valid:
        return None
    return min(valid, key=lambda q: (state.tree[q].activator, q))


def perform_move(state: SearchState, q: int) -> bool:
    """Carry out the move of blocker ``tree[q]``; True when the new job got placed."""
    if not 0 <= q < len(state.tree):
        raise IndexError(q)
    b = state.tree[q]
    if state.sigma(b.job) == b.machine or not is_valid_move(state, b.job, b.machine):
        raise InvariantViolation(f"blocker {q} does not hold a valid move", state.dump())
    k = b.activator  # fixed at insertion, never re-resolved
    state.schedule.assign(b.job, b.machine)
    if state.schedule.loads[b.machine] > CAPACITY:
        raise InvariantViolation("move broke schedule validity", state.dump())
    if b.job == state.j_new:
        return True
    del state.tree[k:]
    return False


def check_invariants(state: SearchState) -> list:
    """Re-derive the loop-top invariants; returns a list of violation messages."""
    problems = []
    sched = state.schedule
    if not sched.cache_consistent():
        problems.append("load cache differs from recomputed loads")
    for i, load in enumerate(sched.loads):
        if load > CAPACITY:
            problems.append(f"machine {i} load {load} exceeds 1+R")
    seen = set()
    any_machines = []
    p = state.p
    for q, b in enumerate(state.tree):
        if (b.job, b.machine) in seen:
            problems.append(f"blocker {q}: move ({b.job}, {b.machine}) appears twice")
        seen.add((b.job, b.machine))
        if b.machine not in state.inst.jobs[b.job].allowed or state.sigma(b.job) == b.machine:
            problems.append(f"blocker {q}: not a move")
        if b.type in (BlockerType.SMALL_TO_ANY, BlockerType.BIG_TO_ANY):
            any_machines.append(b.machine)
        if b.type is BlockerType.SMALL_TO_ANY:
            if state.big[b.job]:
                problems.append(f"blocker {q}: small-to-any blocker for a big job")
        elif not state.big[b.job]:
            problems.append(f"blocker {q}: big-job blocker for a small job")
        if b.activator >= q or (b.activator == ROOT) != (b.job == state.j_new):
            problems.append(f"blocker {q}: bad activator {b.activator}")
        else:
            try:
                now = state.activator(b.job)
            except InvariantViolation:
                now = None
            if now != b.activator:
                problems.append(f"blocker {q}: activator moved from {b.activator} to {now}")

        if b.type is BlockerType.SMALL_TO_ANY:
            continue
        i = b.machine
        s_load = sum((p[j] for j in state.stuck_small(q) if sched.assignment[j] == i), Fraction(0))
        bigs = state.bigs_on(i)
        b_load = sum((p[j] for j in bigs), Fraction(0))
        least = p[bigs[0]] if bigs else Fraction(0)
        pj = p[b.job]
        if b.type is BlockerType.BIG_TO_ANY:
            ok = s_load + b_load + pj <= CAPACITY
        elif b.type is BlockerType.BIG_TO_LEAST:
            ok = s_load + least + pj > CAPACITY and s_load + pj <= CAPACITY
        else:
            ok = s_load + b_load + pj > CAPACITY and s_load + least + pj <= CAPACITY
        if not ok:
            problems.append(f"blocker {q}: {b.type.label} load invariant violated on machine {i}")
    if len(set(any_machines)) != len(any_machines):
        problems.append("small-to-any / big-to-any blockers share a machine")
    # between additions the tree only loses suffixes
    values = tuple(b.inserted_value for b in state.tree)
    if state.last_signature[: len(values)] != values:
        problems.append("tree is not a prefix of the last recorded signature")
    return problems


@dataclass
class SearchStats:
    iterations: int = 0
    blockers_added: int = 0
    moves_performed: int = 0
    stuck_events: int = 0


@dataclass
class StuckState:
    """Frozen search state with no valid tree move and no potential move."""

    inst: Instance
    assignment: tuple
    tree: tuple
    j_new: int

    def thaw(self) -> SearchState:
        return SearchState(self.inst, PartialSchedule(self.inst, self.assignment), self.j_new, self.tree)

    @classmethod
    def freeze(cls, state: SearchState) -> "StuckState":
        return cls(state.inst, tuple(state.schedule.assignment), tuple(state.tree), state.j_new)

    def is_stuck(self) -> bool:
        state = self.thaw()
        return not state.valid_tree_moves() and not potential_moves(state)


def _trace_blocker(inst, state, q):
    b = state.tree[q]
    return {
        "event": "add_blocker",
        "position": q,
        "job": inst.original[b.job],
        "machine": b.machine,
        "type": b.type.label,
        "value": list(b.inserted_value),
        "activator": None if b.activator == ROOT else b.activator,
    }


def step(state: SearchState, stats: Optional[SearchStats] = None, trace: Optional[Callable] = None):
    """One loop iteration: perform a valid tree move, or add the minimum potential move.

    Returns ``"done"`` once ``j_new`` is placed, ``"moved"``, ``"added"`` or
    ``"stuck"``; on ``"stuck"`` the state is left untouched.
    """
    stats = stats if stats is not None else SearchStats()
    inst = state.inst
    q = select_valid_move(state)
    if q is not None:
        b = state.tree[q]
        src = state.sigma(b.job)
        k = b.activator
        ended = len(state.tree)
        done = perform_move(state, q)
        stats.moves_performed += 1
        if trace is not None:
            trace(
                {
                    "event": "perform_move",
                    "position": q,
                    "job": inst.original[b.job],
                    "from": src,
                    "to": b.machine,
                    "activator": None if k == ROOT else k,
                    "deleted": [] if done else list(range(k, ended)),
                }
            )
        return "done" if done else "moved"
    moves = potential_moves(state)
    if not moves:
        stats.stuck_events += 1
        if trace is not None:
            trace({"event": "stuck", "j_new": inst.original[state.j_new], "tree_size": len(state.tree)})
        return "stuck"
    add_blocker(state, moves[0], moves)
    stats.blockers_added += 1
    if trace is not None:
        trace(_trace_blocker(inst, state, len(state.tree) - 1))
    return "added"


def extend(
    inst: Instance,
    schedule: PartialSchedule,
    j_new: int,
    *,
    debug: bool = False,
    iteration_cap: int = DEFAULT_ITERATION_CAP,
    trace: Optional[Callable] = None,
    observer: Optional[Callable] = None,
    stats: Optional[SearchStats] = None,
):
    """Place ``j_new`` into a copy of the valid ``schedule`` (instance scaled to target 1).

    Returns the extended :class:`PartialSchedule`, or a :class:`StuckState`.
    ``observer(state)`` is called at the top of every loop iteration.
    """
    if schedule.assignment[j_new] is not None:
        raise ValueError(f"job {j_new} is already assigned")
    if not schedule.is_valid():
        raise ValueError("input schedule is not valid")
    stats = stats if stats is not None else SearchStats()
    state = SearchState(inst, schedule.copy(), j_new)
    for _ in range(iteration_cap):
        stats.iterations += 1
        if observer is not None:
            observer(state)
        if debug:
            problems = check_invariants(state)
            if problems:
                raise InvariantViolation("; ".join(problems), state.dump())
        outcome = step(state, stats, trace)
        if outcome == "done":
            return state.schedule
        if outcome == "stuck":
            return StuckState.freeze(state)
    raise IterationCapExceeded(f"no result after {iteration_cap} iterations placing job {j_new}")


def insertion_order(inst: Instance, policy="desc") -> list:
    """Order in which jobs are placed: ``desc`` (largest first), ``input``, or ``shuffle:SEED``."""
    if policy == "desc":
        return list(range(inst.n - 1, -1, -1))
    if policy == "input":
        return sorted(range(inst.n), key=lambda j: inst.original[j])
    if isinstance(policy, str) and policy.startswith("shuffle:"):
        order = list(range(inst.n))
        random.Random(int(policy.split(":", 1)[1])).shuffle(order)
        return order
    raise ValueError(f"unknown insertion order {policy!r}")


@dataclass
class RunResult:
    T: Fraction
    scaled: Instance
    schedule: PartialSchedule
    stuck: Optional[StuckState] = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def completed(self) -> bool:
        return self.stuck is None

    @property
    def makespan(self) -> Fraction:
        """Makespan in the original (unscaled) units."""
        return self.schedule.makespan() * self.T

    def to_dict(self) -> dict:
        inst = self.scaled
        assignment = [None] * inst.n
        for j, i in enumerate(self.schedule.assignment):
            assignment[inst.original[j]] = i
        return {
            "assignment": assignment,
            "makespan": format_rational(self.makespan),
            "T": format_rational(self.T),
            "ratio_bound": format_rational(CAPACITY),
        }


def run(
    inst: Instance,
    T,
    order="desc",
    *,
    debug: bool = False,
    iteration_cap: int = DEFAULT_ITERATION_CAP,
    trace: Optional[Callable] = None,
    observer: Optional[Callable] = None,
) -> RunResult:
    """Schedule every job against target ``T`` starting from the empty schedule."""
    T = Fraction(T)
    if T <= 0:
        raise ValueError("T must be positive")
    scaled = scale(inst, T)
    schedule = PartialSchedule(scaled)
    stats = SearchStats()
    for j in insertion_order(scaled, order):
        before = schedule.assigned()
        out = extend(
            scaled,
            schedule,
            j,
            debug=debug,
            iteration_cap=iteration_cap,
            trace=trace,
            observer=observer,
            stats=stats,
        )
        if isinstance(out, StuckState):
            return RunResult(T, scaled, schedule, out, stats)
        if not before <= out.assigned() or out.assignment[j] is None:
            raise InvariantViolation("extend dropped an assigned job")
        schedule = out
    return RunResult(T, scaled, schedule, None, stats)
