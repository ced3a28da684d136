"""Dual certificates from stuck local-search states.

From a stuck state the active jobs get ``z_j = min(p_j, 5/6)`` and each
machine gets ``y_i = z(A_i)``, shifted by ``+1/6`` on big-to-any machines
and ``-1/6`` on small-to-any machines. The point is feasible for the dual
of the configuration-LP at target 1 and has negative objective, so the
attempted target is below the LP optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .config_lp import DualSolution, verify_dual
from .errors import InvariantViolation, NotStuckError
from .instance import format_rational
from .local_search import BlockerType, StuckState, potential_moves

Z_CAP = Fraction(5, 6)
SHIFT = Fraction(1, 6)


@dataclass(frozen=True)
class Witness:
    dual: DualSolution
    stuck: StuckState
    scale_T: Fraction


@dataclass(frozen=True)
class Certificate:
    witness: Witness
    objective: Fraction
    claim1: bool
    claim2: bool

    @property
    def ok(self) -> bool:
        return self.claim1 and self.claim2

    def to_dict(self) -> dict:
        inst = self.witness.stuck.inst
        d = self.witness.dual.to_dict(inst)
        return {
            "T": format_rational(self.witness.scale_T),
            "z": d["z"],
            "y": d["y"],
            "objective": format_rational(self.objective),
            "claim1": self.claim1,
            "claim2": self.claim2,
        }


def _require_stuck(stuck: StuckState):
    state = stuck.thaw()
    if state.valid_tree_moves():
        raise NotStuckError("a move in the blocker tree is valid")
    if potential_moves(state):
        raise NotStuckError("a potential move exists")
    return state


def build_witness(stuck: StuckState, scale_T=Fraction(1)) -> Witness:
    state = _require_stuck(stuck)
    inst = stuck.inst
    m_bs = {b.machine for b in state.tree if b.type is BlockerType.BIG_TO_ANY}
    m_s = {b.machine for b in state.tree if b.type is BlockerType.SMALL_TO_ANY}
    if m_bs & m_s:
        raise InvariantViolation("big-to-any and small-to-any blockers share a machine", state.dump())
    if len(m_bs) > len(m_s):
        raise InvariantViolation("more big-to-any machines than small-to-any machines", state.dump())

    act = state.active()
    z = [min(job.p, Z_CAP) if j in act else Fraction(0) for j, job in enumerate(inst.jobs)]
    y = []
    for i in inst.machines:
        base = sum((z[j] for j in state.schedule.on[i] if j in act), Fraction(0))
        if i in m_bs:
            base += SHIFT
        elif i in m_s:
            base -= SHIFT
        if base < 0:
            raise InvariantViolation(f"negative y on machine {i}", state.dump())
        y.append(base)
    return Witness(DualSolution(tuple(y), tuple(z)), stuck, Fraction(scale_T))


def certify(stuck: StuckState, scale_T=Fraction(1)) -> Certificate:
    """Build the witness and check both claims; claim 2 via exact knapsack maximisation."""
    w = build_witness(stuck, scale_T)
    total_z = sum(w.dual.z, Fraction(0))
    total_y = sum(w.dual.y, Fraction(0))
    check = verify_dual(stuck.inst, Fraction(1), w.dual)
    return Certificate(w, total_y - total_z, total_z > total_y, check.feasible)
