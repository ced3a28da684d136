import itertools
import math
from fractions import Fraction as F

import pytest

from conftest import corpus_instance, single
from rassign import _kernels
from rassign.errors import GuardExceeded
from rassign.instance import make_instance, scale
from rassign.local_search import PartialSchedule, SearchState, extend, insertion_order, potential_moves
from rassign.oracle import brute_force_opt, brute_force_potential_moves


def enumerate_opt(inst):
    best = None
    for assign in itertools.product(*[sorted(job.allowed) for job in inst.jobs]):
        loads = [F(0)] * inst.machine_count
        for job, i in zip(inst.jobs, assign):
            loads[i] += job.p
        best = max(loads) if best is None else min(best, max(loads))
    return best


def test_trivial_optima():
    assert brute_force_opt(single(1)).opt == 1
    assert brute_force_opt(single(F(3, 4), machines=2, allowed=(0, 1))).opt == F(3, 4)


def test_i2(I2):
    res = brute_force_opt(I2)
    assert res.opt == F(3, 2) == enumerate_opt(I2)
    assert res.witness_schedule[2] in (0, 1)


# corpus members small enough for plain enumeration
ENUMERABLE = [
    k for k in range(60) if math.prod(len(job.allowed) for job in corpus_instance(k).jobs) <= 20000
]


@pytest.mark.parametrize("k", ENUMERABLE)
def test_matches_enumeration(k):
    inst = corpus_instance(k)
    assert brute_force_opt(inst).opt == enumerate_opt(inst)


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_backends_agree(backend):
    if backend == "numba" and not _kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    inst = corpus_instance(3)
    assert brute_force_opt(inst, backend=backend) == brute_force_opt(inst, backend="numpy")


def test_guard():
    inst = make_instance(5, [(F(1), set(range(5)))] * 12)
    with pytest.raises(GuardExceeded):
        brute_force_opt(inst, guard=10**6)


def test_minimal_active_set_moves():
    # no blockers and everything assigned: only S members (sole-machine small jobs) are active
    inst = make_instance(2, [(F(1, 3), {0}), (F(1, 3), {0, 1}), (F(1), {1})])
    state = SearchState(inst, PartialSchedule(inst, [0, 0, 1]), 2)
    state.schedule.assignment[2] = None
    state.schedule.on[1].discard(2)
    state.schedule.loads[1] = F(0)
    got = potential_moves(state)
    want = brute_force_potential_moves(state)
    assert [(m.job, m.machine, int(m.type), tuple(m.value)) for m in got] == want
    assert {m.job for m in got} <= {0, 2}


@pytest.mark.parametrize("k", range(30))
def test_stuck_states_both_empty(k):
    inst = corpus_instance(k)
    scaled = scale(inst, max(job.p for job in inst.jobs))
    sched = PartialSchedule(scaled)
    for j in insertion_order(scaled):
        out = extend(scaled, sched, j)
        if not isinstance(out, PartialSchedule):
            state = out.thaw()
            assert potential_moves(state) == []
            assert brute_force_potential_moves(state) == []
            return
        sched = out
