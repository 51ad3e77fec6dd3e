"""Brute-force oracles used by the test suite.

These re-derive means and schedules by literal enumeration, independently of
the formulas and dynamic programs in strategies/distributions, so agreement
between the two routes is meaningful. They are intentionally slow and are
not part of the CLI surface.
"""

from __future__ import annotations

import math
from itertools import permutations, product

from .population import InspectionWeights, Population
from .strategies import Schedule, ScheduleStep


def ikl_mean_bruteforce(pop: Population, q: InspectionWeights) -> float:
    """Mean of the without-replacement democratic model by summing all N! orders."""
    n = pop.n
    if n > 8:
        raise ValueError(f"brute force limited to 8 items, got {n}")
    if q.n != n:
        raise ValueError("weights size mismatch")
    p = pop.p
    qv = q.q
    terms = []
    for perm in permutations(range(n)):
        prob = 1.0
        remaining = 1.0
        for idx in perm:
            prob *= qv[idx] / remaining
            remaining -= qv[idx]
        conditional = math.fsum((k + 1) * p[idx] for k, idx in enumerate(perm))
        terms.append(prob * conditional)
    return math.fsum(terms)


def _sequence_score_and_masses(
    pop: Population, seq: tuple[int, ...]
) -> tuple[float, list[float]]:
    """Truncated mean of an explicit inspection sequence (0-based items).

    Undetected mass after the last step is charged pessimistically at
    horizon + 1, a uniform over-approximation that makes sequences of equal
    length comparable.
    """
    attempts = [0] * pop.n
    masses = []
    for i in seq:
        mass = pop.p[i] * (1.0 - pop.s[i]) ** attempts[i] * pop.s[i]
        attempts[i] += 1
        masses.append(mass)
    covered = math.fsum(masses)
    score = math.fsum(t * mass for t, mass in enumerate(masses, start=1))
    score += (len(seq) + 1) * (1.0 - covered)
    return score, masses


def ef_best_schedule_bruteforce(pop: Population, horizon: int) -> tuple[float, Schedule]:
    """Exhaustively best inspection sequence of the given length.

    Scores every one of the N^horizon sequences and returns the minimal
    truncated mean with the first sequence attaining it, packaged as a
    Schedule.
    """
    if pop.n > 3:
        raise ValueError(f"exhaustive search limited to 3 items, got {pop.n}")
    if not (1 <= horizon <= 8):
        raise ValueError(f"horizon must be in 1..8, got {horizon}")
    best_score = math.inf
    best_seq: tuple[int, ...] | None = None
    for seq in product(range(pop.n), repeat=horizon):
        score, _ = _sequence_score_and_masses(pop, seq)
        if score < best_score - 1e-15:
            best_score = score
            best_seq = seq
    assert best_seq is not None
    _, masses = _sequence_score_and_masses(pop, best_seq)
    attempts = [0] * pop.n
    steps = []
    for t, (i, mass) in enumerate(zip(best_seq, masses), start=1):
        attempts[i] += 1
        steps.append(ScheduleStep(t=t, item=i + 1, attempt=attempts[i], detect_prob=mass))
    residual = 1.0 - math.fsum(masses)
    return best_score, Schedule(steps=tuple(steps), residual_mass=residual, attempts=tuple(attempts))


def truncated_schedule_score(pop: Population, sched: Schedule, horizon: int) -> float:
    """Score a schedule's first ``horizon`` steps on the brute-force scale."""
    seq = tuple(st.item - 1 for st in sched.steps[:horizon])
    if len(seq) < horizon:
        raise ValueError(f"schedule has only {len(seq)} steps, need {horizon}")
    score, _ = _sequence_score_and_masses(pop, seq)
    return score


def geometric_mean_bruteforce(q_success: float, horizon: int) -> float:
    """Mean of a geometric law by partial summation plus the analytic tail."""
    if not (0.0 < q_success <= 1.0):
        raise ValueError(f"success probability {q_success!r} outside (0, 1]")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    fail = 1.0 - q_success
    partial = math.fsum(j * fail ** (j - 1) * q_success for j in range(1, horizon + 1))
    tail = fail**horizon * (horizon * q_success + 1.0) / q_success
    return partial + tail
