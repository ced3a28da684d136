import random
from fractions import Fraction

import pytest

from rassign.instance import generate_random, make_instance
from rassign.local_search import PartialSchedule, SearchState

F = Fraction

CORPUS_SIZE = 200
DENSITIES = (F(1, 3), F(2, 3), F(1))


def corpus_instance(k):
    """Instance number ``k`` of the seeded evaluation corpus."""
    rng = random.Random(k)
    machines = rng.randint(2, 5)
    jobs = rng.randint(4, 10)
    return generate_random(machines, jobs, None, DENSITIES[k % 3], seed=k)


def corpus(size=CORPUS_SIZE):
    return [corpus_instance(k) for k in range(size)]


def i2():
    # canonical order: small on m0, small on m1, big on both
    return make_instance(2, [(F(1), {0, 1}), (F(1, 2), {0}), (F(1, 2), {1})])


def single(p, machines=1, allowed=(0,)):
    return make_instance(machines, [(F(p), set(allowed))])


@pytest.fixture
def I2():
    return i2()


# Worked example: three machines, the new job needs M1 where the big job jB sits.
# Positions below are input positions; the helper maps them to canonical indices.
WORKED_JOBS = [
    (F(1, 6), {0}), (F(1, 6), {0}), (F(1, 6), {0}),
    (F(1), {0, 1}),  # jB
    (F(1), {0}),  # new job
    (F(1, 2), {1}), (F(1, 6), {1}), (F(1, 3), {1, 2}), (F(1, 3), {1, 0}),  # x1, x2, x3, g
    (F(1), {2}), (F(1, 2), {2}), (F(1, 3), {2}),
]
WORKED_SIGMA = [0, 0, 0, 0, None, 1, 1, 1, 1, 2, 2, 2]


def worked_state():
    inst = make_instance(3, WORKED_JOBS)
    c = inst.canonical_index()
    sigma = [None] * inst.n
    for pos, i in enumerate(WORKED_SIGMA):
        sigma[c[pos]] = i
    return inst, c, SearchState(inst, PartialSchedule(inst, sigma), c[4])


def as_rows(state):
    orig = state.inst.original
    return [(orig[b.job], b.machine, b.type, tuple(b.inserted_value), b.activator) for b in state.tree]
