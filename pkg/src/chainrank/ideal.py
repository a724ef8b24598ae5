"""Polynomial procedures for the ideal case: recognizing instances whose
neighborhoods already nest, deriving the question order from a nested student
order, and the optimal solver when one side's ordering is fixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core_model import (
    ChainRankError,
    EditSet,
    Instance,
    Mode,
    Side,
    Solution,
    inverse_positions,
)


class NotNestedError(ChainRankError):
    code = "NOT_NESTED"


@dataclass(frozen=True)
class NestingCertificate:
    """Witness that an instance is ideal: orders under which the nested and
    interval properties hold with no edits."""

    student_order: tuple[int, ...]
    question_order: tuple[int, ...]


@dataclass(frozen=True)
class NotIdeal:
    """Witness that an instance is not ideal: a student pair whose
    neighborhoods are incomparable under containment."""

    witness: tuple[int, int]


def recognize_ideal(inst: Instance) -> NestingCertificate | NotIdeal:
    """Decide whether the instance admits edit-free mutual orderings.

    Students are sorted by degree (ties by id). Because a lower-degree
    neighborhood can never strictly contain a higher-degree one, containment
    holds for all pairs iff it holds for every consecutive pair in degree
    order, which also makes any failing consecutive pair a genuine
    incomparability witness.
    """
    n = inst.num_students
    order = sorted(range(1, n + 1), key=lambda s: (len(inst.neighbors(s)), s))
    for weak, strong in zip(order, order[1:]):
        if not inst.neighbors(weak) <= inst.neighbors(strong):
            return NotIdeal((weak, strong))
    return NestingCertificate(
        student_order=tuple(order),
        question_order=derive_question_order(inst, order),
    )


def derive_question_order(inst: Instance, student_order: Sequence[int]) -> tuple[int, ...]:
    """Question order making every neighborhood a prefix, given a student
    order along which neighborhoods nest.

    Questions are layered by the first (weakest) neighborhood containing
    them; ties inside a layer and the unanswered tail are sorted ascending by
    id. Raises NotNestedError if neighborhoods do not nest along the order.
    """
    seen: set[int] = set()
    layers: list[int] = []
    prev: frozenset[int] = frozenset()
    for s in student_order:
        nbh = inst.neighbors(s)
        if not prev <= nbh:
            raise NotNestedError(
                f"neighborhood of student {s} does not contain its weaker predecessor's"
            )
        layers.extend(sorted(nbh - seen))
        seen |= nbh
        prev = nbh
    layers.extend(q for q in range(1, inst.num_questions + 1) if q not in seen)
    return tuple(layers)


def _best_threshold(costs: list[int], lo: int = 0) -> tuple[int, int]:
    """(threshold, cost) minimizing costs[t] for t >= lo, smallest t on ties."""
    best_t = lo
    for t in range(lo, len(costs)):
        if costs[t] < costs[best_t]:
            best_t = t
    return best_t, costs[best_t]


def solve_fixed_side(
    inst: Instance,
    side: Side,
    fixed_order: Sequence[int],
    mode: Mode = Mode.EDITING,
) -> Solution:
    """Optimal edits when one side's ordering is fixed.

    With questions fixed, each student independently takes the cheapest
    prefix of the question order as its corrected neighborhood (in ADDITION
    mode the prefix must cover the hardest existing neighbor, so only
    additions occur); students are then ordered by threshold. With students
    fixed the mirror argument runs on suffixes per question.
    """
    fixed_order = tuple(fixed_order)
    n, m = inst.num_students, inst.num_questions
    additions: list[tuple[int, int]] = []
    deletions: list[tuple[int, int]] = []
    total = 0

    if side == Side.QUESTIONS_FIXED:
        qpos = inverse_positions(fixed_order)
        thresholds: dict[int, int] = {}
        for s in range(1, n + 1):
            nbh = inst.neighbors(s)
            positions = {qpos[q] for q in nbh}
            costs = [len(nbh)]
            for t in range(1, m + 1):
                costs.append(costs[-1] + (-1 if t in positions else 1))
            lo = max(positions) if (mode == Mode.ADDITION and positions) else 0
            t, cost = _best_threshold(costs, lo)
            thresholds[s] = t
            total += cost
            target = set(fixed_order[:t])
            additions.extend((s, q) for q in sorted(target - nbh))
            deletions.extend((s, q) for q in sorted(nbh - target))
        student_order = tuple(sorted(range(1, n + 1), key=lambda s: (thresholds[s], s)))
        question_order = fixed_order
    elif side == Side.STUDENTS_FIXED:
        spos = inverse_positions(fixed_order)
        suffix_sizes: dict[int, int] = {}
        q_neighbors = [set() for _ in range(m + 1)]
        for s, q in inst.edges():
            q_neighbors[q].add(s)
        for q in range(1, m + 1):
            nbh = q_neighbors[q]
            positions = {spos[s] for s in nbh}
            costs = [len(nbh)]
            for size in range(1, n + 1):
                costs.append(costs[-1] + (-1 if (n - size + 1) in positions else 1))
            lo = (n - min(positions) + 1) if (mode == Mode.ADDITION and positions) else 0
            size, cost = _best_threshold(costs, lo)
            suffix_sizes[q] = size
            total += cost
            target = {fixed_order[p - 1] for p in range(n - size + 1, n + 1)}
            additions.extend((s, q) for s in sorted(target - nbh))
            deletions.extend((s, q) for s in sorted(nbh - target))
        # Larger suffix = answered by more students = easier, so easiest first.
        question_order = tuple(sorted(range(1, m + 1), key=lambda q: (-suffix_sizes[q], q)))
        student_order = fixed_order
    else:
        raise ValueError(f"unknown side {side!r}")

    return Solution(
        cost=total,
        student_order=student_order,
        question_order=question_order,
        edits=EditSet.of(additions, deletions),
        solver_tag=f"ideal.fixed_side.{mode.value}",
    )
