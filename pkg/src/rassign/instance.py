"""Restricted Assignment instances: exact sizes, canonical job order, JSON I/O."""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

HALF = Fraction(1, 2)


class InstanceError(ValueError):
    """Raised for malformed or invalid instance data."""


class SizeClass(enum.Enum):
    SMALL = "small"
    BIG = "big"


def classify(p: Fraction) -> SizeClass:
    """Small iff ``p <= 1/2`` (meaningful on an instance scaled to target 1)."""
    return SizeClass.SMALL if p <= HALF else SizeClass.BIG


def parse_rational(text) -> Fraction:
    """Parse ``"a"`` or ``"a/b"``; plain ints are accepted too."""
    if isinstance(text, bool):
        raise InstanceError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise InstanceError(f"not a rational: {text!r}")
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise InstanceError(f"not a rational: {text!r}") from None
    if d <= 0:
        raise InstanceError(f"denominator must be positive: {text!r}")
    return Fraction(n, d)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Job:
    p: Fraction
    allowed: frozenset


@dataclass(frozen=True)
class Instance:
    """Jobs sorted by (p, input position); ``original[k]`` is the input position of job k."""

    machine_count: int
    jobs: tuple
    original: tuple

    def __post_init__(self):
        if self.machine_count < 1:
            raise InstanceError("machine_count must be positive")
        if len(self.original) != len(self.jobs):
            raise InstanceError("original index map has wrong length")
        for k, job in enumerate(self.jobs):
            if job.p <= 0:
                raise InstanceError(f"job {self.original[k]}: non-positive processing time")
            if not job.allowed:
                raise InstanceError(f"job {self.original[k]}: empty allowed set")
            bad = [i for i in job.allowed if not 0 <= i < self.machine_count]
            if bad:
                raise InstanceError(f"job {self.original[k]}: machine index out of range {bad}")
        for k in range(1, len(self.jobs)):
            if self.jobs[k - 1].p > self.jobs[k].p:
                raise InstanceError("jobs are not in canonical size order")

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def machines(self) -> range:
        return range(self.machine_count)

    @property
    def sizes(self) -> list:
        return [job.p for job in self.jobs]

    def allowed_jobs(self, i: int) -> list:
        """Canonical indices of the jobs that may run on machine ``i``."""
        return [k for k, job in enumerate(self.jobs) if i in job.allowed]

    def is_big(self, j: int) -> bool:
        return classify(self.jobs[j].p) is SizeClass.BIG

    def canonical_index(self) -> dict:
        """Map input position -> canonical index."""
        return {orig: k for k, orig in enumerate(self.original)}


def make_instance(machine_count: int, jobs: Iterable[tuple]) -> Instance:
    """Build a canonical instance from ``(p, allowed)`` pairs given in input order."""
    raw = []
    for pos, (p, allowed) in enumerate(jobs):
        try:
            p = Fraction(p) if not isinstance(p, str) else parse_rational(p)
        except (TypeError, ValueError) as exc:
            raise InstanceError(f"job {pos}: bad processing time {p!r}") from exc
        allowed = frozenset(int(i) for i in allowed)
        if p <= 0:
            raise InstanceError(f"job {pos}: non-positive processing time")
        if not allowed:
            raise InstanceError(f"job {pos}: empty allowed set")
        bad = sorted(i for i in allowed if not 0 <= i < machine_count)
        if bad:
            raise InstanceError(f"job {pos}: machine index out of range {bad}")
        raw.append((p, pos, allowed))
    # stable: ties broken by input position
    raw.sort(key=lambda t: (t[0], t[1]))
    return Instance(
        machine_count=machine_count,
        jobs=tuple(Job(p, allowed) for p, _, allowed in raw),
        original=tuple(pos for _, pos, _ in raw),
    )


def parse_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict) or "machines" not in data or "jobs" not in data:
        raise InstanceError('instance must be an object with "machines" and "jobs"')
    m = data["machines"]
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise InstanceError(f"machines must be a positive integer, got {m!r}")
    if not isinstance(data["jobs"], list):
        raise InstanceError('"jobs" must be a list')
    pairs = []
    for pos, entry in enumerate(data["jobs"]):
        if not isinstance(entry, dict) or "p" not in entry or "allowed" not in entry:
            raise InstanceError(f'job {pos}: expected {{"p": ..., "allowed": [...]}}')
        try:
            p = parse_rational(entry["p"])
        except InstanceError as exc:
            raise InstanceError(f"job {pos}: {exc}") from None
        allowed = entry["allowed"]
        if not isinstance(allowed, list) or not all(
            isinstance(i, int) and not isinstance(i, bool) for i in allowed
        ):
            raise InstanceError(f"job {pos}: allowed must be a list of integers")
        pairs.append((p, allowed))
    return make_instance(m, pairs)


def instance_to_dict(inst: Instance) -> dict:
    """Serialize in original input order."""
    by_orig = sorted(zip(inst.original, inst.jobs), key=lambda t: t[0])
    return {
        "machines": inst.machine_count,
        "jobs": [
            {"p": format_rational(job.p), "allowed": sorted(job.allowed)} for _, job in by_orig
        ],
    }


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst))


def scale(inst: Instance, T: Fraction) -> Instance:
    """Divide every processing time by ``T``; order and allowed sets are unchanged."""
    T = Fraction(T)
    if T <= 0:
        raise InstanceError("scale factor must be positive")
    return Instance(
        machine_count=inst.machine_count,
        jobs=tuple(Job(job.p / T, job.allowed) for job in inst.jobs),
        original=inst.original,
    )


def size_grid(steps: int) -> list:
    """The grid ``{1/steps, 2/steps, ..., 1}``."""
    return [Fraction(k, steps) for k in range(1, steps + 1)]


def generate_random(
    machines: int,
    jobs: int,
    sizes: Sequence[Fraction] = None,
    gamma_density: Fraction = Fraction(1),
    seed: int = 0,
) -> Instance:
    """Seeded random instance.

    Each allowed set contains one uniformly chosen machine and every other
    machine independently with probability ``gamma_density``.
    """
    if machines < 1 or jobs < 1:
        raise InstanceError("machines and jobs must be at least 1")
    gamma_density = Fraction(gamma_density)
    if not 0 < gamma_density <= 1:
        raise InstanceError("gamma_density must lie in (0, 1]")
    sizes = [Fraction(s) for s in (sizes if sizes is not None else size_grid(6))]
    if not sizes or any(s <= 0 for s in sizes):
        raise InstanceError("size profile must be non-empty and positive")
    rng = random.Random(seed)
    pairs = []
    for _ in range(jobs):
        p = rng.choice(sizes)
        anchor = rng.randrange(machines)
        allowed = {anchor}
        for i in range(machines):
            # exact Bernoulli(gamma_density) via an integer draw
            if i != anchor and rng.randrange(gamma_density.denominator) < gamma_density.numerator:
                allowed.add(i)
        pairs.append((p, allowed))
    return make_instance(machines, pairs)
