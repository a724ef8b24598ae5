"""Brute-force exact solvers used to certify the optimized ones.

The oracle enumerates bounded-displacement orderings of one or both sides and
solves the remaining fixed-order problem optimally. Its value is obvious
correctness on desk-scale instances, including the NP-hard unconstrained
k-near editing variant, which is only available here.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import factorial
from typing import Iterator, Sequence

from .core_model import (
    ChainRankError,
    EditSet,
    Instance,
    Mode,
    ProblemSpec,
    Side,
    Solution,
    Variant,
    inverse_positions,
)

DEFAULT_CAP = 10_000_000
_INF = float("inf")


class InstanceTooLargeError(ChainRankError):
    code = "INSTANCE_TOO_LARGE"


# ---------------------------------------------------------------------------
# Bounded-displacement permutation enumeration


def enumerate_knear_permutations(base: Sequence[int], k: int) -> Iterator[tuple[int, ...]]:
    """Yield every permutation moving each entity at most k positions from
    its position in ``base``, each exactly once, in lexicographic order of
    the emitted position -> entity tuples.

    Backtracking with displacement pruning: an entity whose deadline
    (base position + k) has arrived must be placed immediately.
    """
    base = tuple(base)
    n = len(base)
    bpos = {e: p for p, e in enumerate(base, start=1)}
    entities = sorted(base)
    used: set[int] = set()
    out: list[int] = []

    def rec(p: int) -> Iterator[tuple[int, ...]]:
        if p > n:
            yield tuple(out)
            return
        pending = [e for e in entities if e not in used and bpos[e] + k <= p]
        if pending:
            if len(pending) > 1 or bpos[pending[0]] + k < p:
                return
            cands = pending
        else:
            cands = [e for e in entities if e not in used and abs(bpos[e] - p) <= k]
        for e in cands:
            used.add(e)
            out.append(e)
            yield from rec(p + 1)
            out.pop()
            used.remove(e)

    yield from rec(1)


def count_knear_permutations(n: int, k: int) -> int:
    """Number of permutations of n elements with displacement at most k,
    without enumerating them."""
    if n <= 0:
        return 1
    if k <= 0:
        return 1
    if k >= n - 1:
        return factorial(n)
    # Sweep positions; mask bit j marks entity (window_low + j) as used.
    states = {0: 1}
    for p in range(1, n + 1):
        wlo = max(1, p - k)
        shift = max(1, p + 1 - k) - wlo
        new: dict[int, int] = {}
        for mask, cnt in states.items():
            for e in range(wlo, min(n, p + k) + 1):
                bit = 1 << (e - wlo)
                if mask & bit:
                    continue
                nm = mask | bit
                if shift:
                    if not nm & 1:
                        continue  # entity p-k missed its last slot
                    nm >>= shift
                new[nm] = new.get(nm, 0) + cnt
        states = new
    return sum(states.values())


# ---------------------------------------------------------------------------
# Inner solvers for a fixed student order


@dataclass(frozen=True)
class QFree:
    """Question side may be ordered arbitrarily."""


@dataclass(frozen=True)
class QExact:
    """Question order is exactly the one given."""

    order: tuple[int, ...]


@dataclass(frozen=True)
class QKNear:
    """Question order must stay within k of the one given."""

    order: tuple[int, ...]
    k: int


def _question_groups(inst: Instance) -> tuple[list[tuple[int, ...]], list[list[int]]]:
    """Group questions sharing a neighborhood; returns (neighbor tuples, ids)."""
    groups: dict[tuple[int, ...], list[int]] = {}
    members: list[list[int]] = [[] for _ in range(inst.num_questions + 1)]
    for s, q in inst.edges():
        members[q].append(s)
    for q in range(1, inst.num_questions + 1):
        groups.setdefault(tuple(members[q]), []).append(q)
    keys = list(groups)
    return keys, [groups[key] for key in keys]


def _free_cost(
    group_keys: list[tuple[int, ...]],
    group_sizes: list[int],
    student_order: Sequence[int],
    n: int,
    mode: Mode,
) -> int:
    """Total cost of the best per-question suffix under this student order."""
    spos = inverse_positions(student_order)
    total = 0
    for key, weight in zip(group_keys, group_sizes):
        deg = len(key)
        positions = {spos[s] for s in key}
        if mode == Mode.ADDITION:
            best = (n - min(positions) + 1) - deg if deg else 0
        else:
            c = deg
            best = c
            for size in range(1, n + 1):
                c += -1 if (n - size + 1) in positions else 1
                if c < best:
                    best = c
        total += best * weight
    return total


def _free_full(
    inst: Instance, student_order: Sequence[int], mode: Mode
) -> tuple[int, tuple[int, ...], EditSet]:
    """Best per-question suffixes with witnesses: (cost, question order, edits)."""
    n = inst.num_students
    spos = inverse_positions(student_order)
    members: list[list[int]] = [[] for _ in range(inst.num_questions + 1)]
    for s, q in inst.edges():
        members[q].append(s)
    total = 0
    sizes: dict[int, int] = {}
    additions: list[tuple[int, int]] = []
    deletions: list[tuple[int, int]] = []
    for q in range(1, inst.num_questions + 1):
        nbh = members[q]
        deg = len(nbh)
        positions = {spos[s] for s in nbh}
        if mode == Mode.ADDITION:
            best_size = (n - min(positions) + 1) if deg else 0
            best = best_size - deg
        else:
            c = deg
            best, best_size = c, 0
            for size in range(1, n + 1):
                c += -1 if (n - size + 1) in positions else 1
                if c < best:
                    best, best_size = c, size
        sizes[q] = best_size
        total += best
        target = {student_order[p - 1] for p in range(n - best_size + 1, n + 1)}
        additions.extend((s, q) for s in sorted(target - set(nbh)))
        deletions.extend((s, q) for s in sorted(set(nbh) - target))
    question_order = tuple(sorted(range(1, inst.num_questions + 1), key=lambda q: (-sizes[q], q)))
    return total, question_order, EditSet.of(additions, deletions)


def _exact_cost(
    nbh_bits: Sequence[int],
    degs: Sequence[int],
    question_order: Sequence[int],
    mode: Mode,
) -> int | float:
    """Minimum edits with both orders fixed: non-decreasing prefix thresholds
    along the student order, one pass of rolling prefix minima."""
    m = len(question_order)
    add = mode == Mode.ADDITION
    pm: list[int | float] = [0] * (m + 1)
    for nb, deg in zip(nbh_bits, degs):
        c = deg
        covered = 0
        v = _INF if (add and deg) else c + pm[0]
        run = v
        new = [run]
        for t in range(1, m + 1):
            if nb >> (question_order[t - 1] - 1) & 1:
                c -= 1
                covered += 1
            else:
                c += 1
            v = _INF if (add and covered < deg) else c + pm[t]
            if v < run:
                run = v
            new.append(run)
        pm = new
    return pm[m]


def _exact_full(
    inst: Instance,
    student_order: Sequence[int],
    question_order: Sequence[int],
    mode: Mode,
) -> tuple[int, EditSet]:
    """As _exact_cost but reconstructing thresholds (smallest on ties) and
    the resulting edit set."""
    m = len(question_order)
    add = mode == Mode.ADDITION
    rows = []
    for s in student_order:
        nb = inst.adj_bits[s - 1]
        deg = len(inst.adjacency[s - 1])
        c = deg
        covered = 0
        arr: list[int | float] = [_INF if (add and deg) else c]
        for t in range(1, m + 1):
            if nb >> (question_order[t - 1] - 1) & 1:
                c -= 1
                covered += 1
            else:
                c += 1
            arr.append(_INF if (add and covered < deg) else c)
        rows.append(arr)

    best: list[list[int | float]] = []
    pm = [0] * (m + 1)
    for arr in rows:
        cur = [arr[t] + pm[t] for t in range(m + 1)]
        best.append(cur)
        run: int | float = _INF
        pm = []
        for v in cur:
            if v < run:
                run = v
            pm.append(run)

    total = min(best[-1])
    thresholds = [0] * len(rows)
    t = min(range(m + 1), key=lambda x: (best[-1][x], x))
    thresholds[-1] = t
    for i in range(len(rows) - 2, -1, -1):
        need = best[i + 1][thresholds[i + 1]] - rows[i + 1][thresholds[i + 1]]
        t = next(x for x in range(thresholds[i + 1] + 1) if best[i][x] == need)
        thresholds[i] = t

    additions: list[tuple[int, int]] = []
    deletions: list[tuple[int, int]] = []
    for s, t in zip(student_order, thresholds):
        target = set(question_order[:t])
        nbh = inst.neighbors(s)
        additions.extend((s, q) for q in sorted(target - nbh))
        deletions.extend((s, q) for q in sorted(nbh - target))
    assert total == len(additions) + len(deletions)
    return int(total), EditSet.of(additions, deletions)


def inner_fixed_orders_cost(
    inst: Instance,
    student_order: Sequence[int],
    question_constraint: QFree | QExact | QKNear,
    mode: Mode = Mode.EDITING,
) -> tuple[int, tuple[int, ...], EditSet]:
    """Optimal edits for a fixed student order under the given question-side
    constraint. Returns (cost, question_order, edits)."""
    student_order = tuple(student_order)
    if isinstance(question_constraint, QFree):
        return _free_full(inst, student_order, mode)
    if isinstance(question_constraint, QExact):
        order = tuple(question_constraint.order)
        cost, edits = _exact_full(inst, student_order, order, mode)
        return cost, order, edits
    if isinstance(question_constraint, QKNear):
        nbh_bits = [inst.adj_bits[s - 1] for s in student_order]
        degs = [len(inst.adjacency[s - 1]) for s in student_order]
        best_cost: int | float = _INF
        best_order: tuple[int, ...] | None = None
        for beta in enumerate_knear_permutations(question_constraint.order, question_constraint.k):
            c = _exact_cost(nbh_bits, degs, beta, mode)
            if c < best_cost:
                best_cost, best_order = c, beta
        assert best_order is not None
        cost, edits = _exact_full(inst, student_order, best_order, mode)
        return cost, best_order, edits
    raise TypeError(f"unknown question constraint {question_constraint!r}")


# ---------------------------------------------------------------------------
# Full oracle


def _guard(count: int, cap: int) -> None:
    if count > cap:
        raise InstanceTooLargeError(
            f"{count} orderings to enumerate exceeds the cap of {cap}"
        )


def oracle_solve(inst: Instance, spec: ProblemSpec, cap: int = DEFAULT_CAP) -> Solution:
    """Exact optimum for any variant by exhaustive enumeration.

    Enumerates the admissible orderings of the non-fixed side(s) and solves
    the inner fixed-order problem for each; refuses with
    InstanceTooLargeError when the enumeration would exceed ``cap``.
    """
    spec.validate_for(inst)
    n, m = inst.num_students, inst.num_questions
    mode = spec.mode
    v = spec.variant
    identity_s = tuple(range(1, n + 1))
    identity_q = tuple(range(1, m + 1))

    if v == Variant.CONSTRAINED_KNEAR:
        sbase, sk = inst.base_student_order, min(spec.k, n)
        constraint: QFree | QExact | QKNear = QExact(inst.base_question_order)
        qcount = 1
    elif v == Variant.UNCONSTRAINED_KNEAR:
        sbase, sk = inst.base_student_order, min(spec.k, n)
        constraint = QFree()
        qcount = 1
    elif v == Variant.BOTH_KNEAR:
        sbase, sk = inst.base_student_order, min(spec.k, n)
        constraint = QKNear(inst.base_question_order, min(spec.k, m))
        qcount = count_knear_permutations(m, min(spec.k, m))
    elif v == Variant.FIXED_BOTH_CHECK:
        sbase, sk = inst.base_student_order, 0
        constraint = QExact(inst.base_question_order)
        qcount = 1
    elif v == Variant.FIXED_ONE_SIDE and spec.fixed_side == Side.QUESTIONS_FIXED:
        sbase, sk = identity_s, n
        constraint = QExact(inst.base_question_order)
        qcount = 1
    elif v == Variant.FIXED_ONE_SIDE and spec.fixed_side == Side.STUDENTS_FIXED:
        sbase, sk = inst.base_student_order, 0
        constraint = QKNear(identity_q, m)
        qcount = factorial(m)
    elif v == Variant.IMO_RECOGNIZE:
        sbase = inst.base_student_order or identity_s
        sk = n
        constraint = QFree()
        qcount = 1
    else:
        raise ValueError(f"oracle cannot dispatch {spec!r}")

    _guard(count_knear_permutations(n, sk) * qcount, cap)

    group_keys, group_members = _question_groups(inst)
    group_sizes = [len(ms) for ms in group_members]
    nbh_bits_by_id = inst.adj_bits
    degs_by_id = [len(row) for row in inst.adjacency]

    best_cost: int | float = _INF
    best_pi: tuple[int, ...] | None = None
    best_beta: tuple[int, ...] | None = None

    for pi in enumerate_knear_permutations(sbase, sk):
        if isinstance(constraint, QFree):
            c = _free_cost(group_keys, group_sizes, pi, n, mode)
            if c < best_cost:
                best_cost, best_pi = c, pi
        elif isinstance(constraint, QExact):
            nbh_bits = [nbh_bits_by_id[s - 1] for s in pi]
            degs = [degs_by_id[s - 1] for s in pi]
            c = _exact_cost(nbh_bits, degs, constraint.order, mode)
            if c < best_cost:
                best_cost, best_pi = c, pi
        else:
            nbh_bits = [nbh_bits_by_id[s - 1] for s in pi]
            degs = [degs_by_id[s - 1] for s in pi]
            for beta in enumerate_knear_permutations(constraint.order, constraint.k):
                c = _exact_cost(nbh_bits, degs, beta, mode)
                if c < best_cost:
                    best_cost, best_pi, best_beta = c, pi, beta

    assert best_pi is not None, "feasible ordering always exists"
    if isinstance(constraint, QFree):
        cost, qorder, edits = _free_full(inst, best_pi, mode)
    elif isinstance(constraint, QExact):
        qorder = constraint.order
        cost, edits = _exact_full(inst, best_pi, qorder, mode)
    else:
        assert best_beta is not None
        qorder = best_beta
        cost, edits = _exact_full(inst, best_pi, qorder, mode)
    assert cost == best_cost
    return Solution(
        cost=cost,
        student_order=best_pi,
        question_order=qorder,
        edits=edits,
        solver_tag=f"oracle.{v.value}.{mode.value}",
    )


def solve_unconstrained_knear_editing_exact(
    inst: Instance, k: int, cap: int = DEFAULT_CAP
) -> Solution:
    """Exact optimum for the NP-hard unconstrained k-near editing variant.

    Exhaustive over the k-near student orderings (exponential in k in the
    worst case); the free question side is solved per ordering in polynomial
    time.
    """
    sol = oracle_solve(
        inst, ProblemSpec(Variant.UNCONSTRAINED_KNEAR, Mode.EDITING, k), cap
    )
    return replace(sol, solver_tag="exact.unconstrained_knear_editing")
