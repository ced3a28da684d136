"""Makespan estimation by binary search over the subset-sum grid."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .config_lp import subset_sum_grid
from .dual_witness import Certificate, certify
from .errors import InvariantViolation
from .instance import Instance, format_rational
from .local_search import CAPACITY, RunResult, run


@dataclass
class EstimateResult:
    T_lo: Fraction
    T_hi: Fraction
    estimate: Fraction
    schedule: RunResult
    certificate: Optional[Certificate]
    probes: list = field(default_factory=list)  # (T, completed)

    def to_dict(self) -> dict:
        return {
            "T_lo": format_rational(self.T_lo),
            "T_hi": format_rational(self.T_hi),
            "estimate": format_rational(self.estimate),
            "schedule": self.schedule.to_dict(),
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "probes": [
                {"T": format_rational(t), "outcome": "completed" if ok else "stuck"}
                for t, ok in self.probes
            ],
        }


def estimate(inst: Instance, order="desc", *, debug: bool = False) -> EstimateResult:
    """Find adjacent grid values ``T_lo < T_hi``: stuck-and-certified below, completed above.

    The search keeps the invariant that the lower end is certified infeasible
    (0 trivially) and the upper end has a complete schedule; the estimate is
    ``(1 + R) * T_hi``. Every stuck probe must pass both certificate claims.
    """
    grid = [g for g in subset_sum_grid(inst) if g > 0]
    probes = []

    def probe(T):
        result = run(inst, T, order, debug=debug)
        probes.append((T, result.completed))
        return result

    lo, hi = -1, len(grid) - 1
    best = probe(grid[hi])
    if not best.completed:
        raise InvariantViolation("local search got stuck at the total processing time")
    cert = None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        result = probe(grid[mid])
        if result.completed:
            hi, best = mid, result
        else:
            c = certify(result.stuck, grid[mid])
            if not c.ok:
                raise InvariantViolation(
                    f"stuck state at T={grid[mid]} failed certification "
                    f"(claim1={c.claim1}, claim2={c.claim2})"
                )
            lo, cert = mid, c
    T_lo = grid[lo] if lo >= 0 else Fraction(0)
    return EstimateResult(T_lo, grid[hi], CAPACITY * grid[hi], best, cert, probes)
