"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N [PASS|FAIL] ...`` line (visible in
``pytest -v`` output) before asserting. Corpus-wide results are computed
once per module.
"""

import time
from fractions import Fraction as F

import pytest

from conftest import CORPUS_SIZE, as_rows, corpus, i2, worked_state
from rassign.config_lp import lp_feasible, opt_star, subset_sum_grid
from rassign.dual_witness import certify
from rassign.estimate import estimate
from rassign.instance import format_rational
from rassign.local_search import CAPACITY, potential_moves, run, signature, step
from rassign.oracle import brute_force_opt, brute_force_potential_moves

pytestmark = pytest.mark.slow

SWEEP_ORDERS = ["desc", "input"] + [f"shuffle:{s}" for s in range(1, 9)]
MIN_DIFF_STATES = 10**5


def report(capsys, n, ok, text):
    with capsys.disabled():
        print(f"\ncriterion {n} [{'PASS' if ok else 'FAIL'}] {text}")


@pytest.fixture(scope="module")
def bound_runs():
    """Per corpus instance: (inst, OPT*, run at OPT*), plus the elapsed time."""
    start = time.perf_counter()
    rows = []
    for inst in corpus():
        o = opt_star(inst)
        rows.append((inst, o, run(inst, o)))
    return rows, time.perf_counter() - start


def test_criterion_1_bound_suite(bound_runs, capsys):
    rows, elapsed = bound_runs
    failures = [
        k for k, (_, o, res) in enumerate(rows) if not res.completed or res.makespan > CAPACITY * o
    ]
    worst = max(res.makespan / o for _, o, res in rows if res.completed)
    ok = len(rows) >= 200 and not failures and elapsed < 120
    report(
        capsys,
        1,
        ok,
        f"{len(rows)} instances, {len(failures)} over 11/6*OPT*, "
        f"max makespan/OPT*={format_rational(worst)}, {elapsed:.1f}s",
    )
    assert ok, failures


def test_criterion_2_oracle_ordering(bound_runs, capsys):
    rows, _ = bound_runs
    bad = []
    gaps = []
    for k, (inst, o, res) in enumerate(rows):
        opt = brute_force_opt(inst).opt
        gaps.append(opt / o)
        if not (o <= opt <= res.makespan):
            bad.append(k)
    worst = max(gaps)
    ok = not bad and worst <= CAPACITY
    report(capsys, 2, ok, f"OPT* <= OPT <= makespan on all but {len(bad)}; max OPT/OPT*={format_rational(worst)}")
    assert ok, bad


def test_criterion_3_witness_soundness(bound_runs, capsys):
    rows, _ = bound_runs
    stuck = certified = confirmed = 0
    for inst, o, _ in rows:
        below = [g for g in subset_sum_grid(inst) if 0 < g < o]
        if not below:
            continue
        T = below[-1]
        res = run(inst, T)
        if res.completed:
            continue
        stuck += 1
        if certify(res.stuck, T).ok:
            certified += 1
        if not lp_feasible(inst, T).feasible:
            confirmed += 1
    ok = stuck > 0 and certified == stuck and confirmed == stuck
    report(capsys, 3, ok, f"{stuck} stuck states, {certified} certified, {confirmed} LP-infeasible")
    assert ok


def replay_signatures(events, problems):
    """Rebuild the tree from trace events and check each addition lowers the signature."""
    tree, last = [], None
    for ev in events:
        if ev["event"] == "add_blocker":
            tree.append(tuple(ev["value"]))
            sig = tuple(tree) + ((5, 0),)
            if last is not None and not sig < last:
                problems.append("signature did not decrease")
            last = sig
        elif ev["event"] == "perform_move":
            if ev["deleted"]:
                del tree[ev["deleted"][0]:]
            else:
                tree, last = [], None  # new job placed; next extend starts afresh


def test_criterion_4_invariant_suite(bound_runs, capsys):
    rows, _ = bound_runs
    problems = []
    runs = additions = 0
    for inst, o, _ in rows:
        for T in {o, *[g for g in subset_sum_grid(inst) if 0 < g < o][-1:]}:
            events = []
            try:
                run(inst, T, debug=True, trace=events.append)
            except AssertionError as exc:
                problems.append(str(exc))
            runs += 1
            additions += sum(ev["event"] == "add_blocker" for ev in events)
            # stuck ends an extend call too
            split, chunk = [], []
            for ev in events:
                chunk.append(ev)
                if ev["event"] == "stuck":
                    split.append(chunk)
                    chunk = []
            for part in split + [chunk]:
                replay_signatures(part, problems)
    ok = not problems
    report(capsys, 4, ok, f"{runs} debug runs, {additions} blocker additions, {len(problems)} violations")
    assert ok, problems[:5]


def test_criterion_5_differential_evaluator(bound_runs, capsys):
    rows, _ = bound_runs
    states = mismatches = 0

    def observe(state):
        nonlocal states, mismatches
        fast = [(m.job, m.machine, int(m.type), tuple(m.value)) for m in potential_moves(state)]
        states += 1
        if fast != brute_force_potential_moves(state):
            mismatches += 1

    for inst, o, _ in rows:
        grid = [g for g in subset_sum_grid(inst) if max(inst.sizes) <= g <= o]
        for T in grid:
            for order in SWEEP_ORDERS:
                run(inst, T, order, observer=observe)
    ok = states >= MIN_DIFF_STATES and mismatches == 0
    report(capsys, 5, ok, f"{states} states compared, {mismatches} mismatches")
    assert ok


def test_criterion_6_worked_example(capsys):
    inst, c, state = worked_state()
    for _ in range(4):
        step(state)
    before = as_rows(state)
    sig_before = signature(state.tree)
    moved = step(state)
    mid = as_rows(state)
    added = step(state)
    after = as_rows(state)
    deleted_suffix = moved == "moved" and mid == before[:1]
    smaller = added == "added" and after[1][:3] == before[1][:3] and after[1][3] < before[1][3]
    ok = (
        deleted_suffix
        and smaller
        and [r[2].label for r in before] == ["BigToLeast", "BigToAny", "SmallToAny", "SmallToAny"]
        and before[1][3] == (2, 4)
        and after[1][3] == (2, 3)
        and signature(state.tree) < sig_before
    )
    report(capsys, 6, ok, f"before {[r[3] for r in before]}, after {[r[3] for r in after]}")
    assert ok


def test_criterion_7_pinned_regressions(capsys):
    I2 = i2()
    got = {
        "opt_star": opt_star(I2),
        "brute_force_opt": brute_force_opt(I2).opt,
        "lp_feasible(1)": lp_feasible(I2, 1).feasible,
        "estimate": estimate(I2).estimate,
    }
    want = {"opt_star": F(3, 2), "brute_force_opt": F(3, 2), "lp_feasible(1)": False, "estimate": F(11, 4)}
    wrong = {k: (str(got[k]), str(want[k])) for k in want if got[k] != want[k]}
    report(capsys, 7, not wrong, f"mismatches (got, expected): {wrong}" if wrong else "all four values match")
    assert not wrong


def test_corpus_size():
    assert CORPUS_SIZE >= 200
