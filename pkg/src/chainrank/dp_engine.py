"""Dynamic programs for the polynomial k-near variants.

All solvers relabel entities by their base-order positions, so internally a
student (or question) label equals its base position and the k-near
constraint reads |output position - label| <= k. States track the occupant of
the current position, the undetermined part of the prefix set inside the
displacement window, and the frontier: the hardest question answered so far
(0 = none). Tables store costs only; reconstruction re-derives parents, which
keeps the hot loops small.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Sequence

from . import ideal
from .core_model import (
    ChainRankError,
    EditSet,
    Instance,
    InvalidInstanceError,
    MissingBaseOrderError,
    Mode,
    Solution,
    inverse_positions,
)

_INF = float("inf")


class CorruptTableError(ChainRankError):
    code = "CORRUPT_TABLE"


# ---------------------------------------------------------------------------
# Window-set machinery


def _prefix_realizable(prefix_sorted: Sequence[int], occupant: int, i: int, k: int, n: int) -> bool:
    """Can some permutation with displacement <= k put exactly
    ``prefix_sorted`` before position i and ``occupant`` at i?

    Sorted assignment is optimal for interval constraints, so it suffices to
    check the sorted prefix against positions 1..i-1 and the sorted
    complement against positions i+1..n.
    """
    if abs(occupant - i) > k:
        return False
    for pos, e in enumerate(prefix_sorted, start=1):
        if abs(e - pos) > k:
            return False
    taken = set(prefix_sorted)
    taken.add(occupant)
    pos = i + 1
    for e in range(1, n + 1):
        if e in taken:
            continue
        if abs(e - pos) > k:
            return False
        pos += 1
    return True


def enumerate_window_sets(i: int, occupant: int, k: int, n_side: int) -> list[tuple[int, ...]]:
    """All candidate window subsets that can precede position i.

    Entities labelled at most i-k-1 are forced into the prefix and omitted;
    each returned tuple lists the chosen entities from the window
    [max(1, i-k), min(n, i+k-1)] minus the occupant, sorted ascending.
    Realizability is decided by the sorted-assignment check rather than by
    enumerating window permutations.
    """
    n = n_side
    if not max(1, i - k) <= occupant <= min(n, i + k):
        return []
    forced = list(range(1, max(0, i - k - 1) + 1))
    need = (i - 1) - len(forced)
    pool = [x for x in range(max(1, i - k), min(n, i + k - 1) + 1) if x != occupant]
    if need < 0 or need > len(pool):
        return []
    out = []
    for combo in itertools.combinations(pool, need):
        if _prefix_realizable(forced + list(combo), occupant, i, k, n):
            out.append(combo)
    return out


def _window_sets_bruteforce(i: int, occupant: int, k: int, n_side: int) -> set[tuple[int, ...]]:
    """Reference implementation by filtering all k-near permutations.

    Exponential; kept for cross-checking enumerate_window_sets in tests.
    """
    from .exact_oracle import enumerate_knear_permutations

    forced_end = max(0, i - k - 1)
    found: set[tuple[int, ...]] = set()
    for pi in enumerate_knear_permutations(tuple(range(1, n_side + 1)), k):
        if pi[i - 1] != occupant:
            continue
        found.add(tuple(sorted(e for e in pi[: i - 1] if e > forced_end)))
    return found


def _window_families(k: int, n: int) -> dict[tuple[int, int], list[tuple[int, ...]]]:
    fams: dict[tuple[int, int], list[tuple[int, ...]]] = {}
    for i in range(1, n + 1):
        for u in range(max(1, i - k), min(n, i + k) + 1):
            fam = enumerate_window_sets(i, u, k, n)
            if fam:
                fams[(i, u)] = fam
    return fams


def _parent_candidates(i: int, window: tuple[int, ...], k: int) -> list[tuple[int, tuple[int, ...]]]:
    """(occupant, window) pairs at position i-1 compatible with a position-i
    state whose undetermined prefix part is ``window``.

    The previous occupant u' is drawn from the position-i prefix; removing it
    and re-exposing label i-k-1 (which leaves the forced region when the
    window slides left) yields the parent's window set.
    """
    boundary = i - k - 1
    members = list(window) + ([boundary] if boundary >= 1 else [])
    out = []
    for u_prev in members:
        if abs(u_prev - (i - 1)) > k:
            continue
        w_prev = tuple(sorted(x for x in members if x != u_prev))
        out.append((u_prev, w_prev))
    return sorted(out)


# ---------------------------------------------------------------------------
# DP table plumbing


@dataclass
class DPTable:
    """Cost tables for one solve, enough to reconstruct the optimum.

    ``layers[i-1]`` maps a position-i state to its cost: for the constrained
    DP states are (occupant, window) with a cost list indexed by frontier;
    for unconstrained addition the cost is a scalar; for the both-near DP the
    cost list is indexed by question-state.
    """

    kind: str
    mode: Mode
    k: int
    layers: list[dict]
    ctx: dict = field(repr=False, default_factory=dict)


def _prefix_min(arr: list) -> list:
    out = []
    run = _INF
    for v in arr:
        if v < run:
            run = v
        out.append(run)
    return out


def _bits_to_labels(bits: int) -> list[int]:
    labels = []
    while bits:
        low = bits & -bits
        labels.append(low.bit_length())
        bits ^= low
    return labels


# ---------------------------------------------------------------------------
# Constrained k-near (editing and addition)


def solve_constrained_knear(inst: Instance, k: int, mode: Mode = Mode.EDITING) -> Solution:
    """Minimum edits (or additions) with the question order fixed and the
    student order within k of its base order.

    States (i, occupant, window, frontier) with frontier the hardest question
    position answered by the weakest i students; compatible predecessors must
    not exceed the frontier, so thresholds are non-decreasing along the
    output order.
    """
    table, terminal = _constrained_table(inst, k, mode)
    return reconstruct(table, terminal, inst)


def _constrained_table(inst: Instance, k: int, mode: Mode):
    if inst.base_student_order is None or inst.base_question_order is None:
        raise MissingBaseOrderError("constrained k-near needs both base orders")
    if k < 0:
        raise InvalidInstanceError("k must be non-negative")
    n, m = inst.num_students, inst.num_questions
    k = min(k, n)
    alpha = inst.base_student_order
    qpos = inverse_positions(inst.base_question_order)

    nb = [0] * (n + 1)
    for lab in range(1, n + 1):
        for q in inst.adjacency[alpha[lab - 1] - 1]:
            nb[lab] |= 1 << (qpos[q] - 1)
    deg = [b.bit_count() for b in nb]
    maxnb = [b.bit_length() for b in nb]
    prefmax = [0] * (n + 1)
    for lab in range(1, n + 1):
        prefmax[lab] = max(prefmax[lab - 1], maxnb[lab])

    local = []
    for lab in range(n + 1):
        row = [0] * (m + 1)
        c = deg[lab] if mode == Mode.EDITING else 0
        row[0] = c
        for v in range(1, m + 1):
            hit = nb[lab] >> (v - 1) & 1
            c += (-1 if hit else 1) if mode == Mode.EDITING else (0 if hit else 1)
            row[v] = c
        local.append(row)

    fams = _window_families(k, n)

    def addition_bound(i: int, u: int, window: tuple[int, ...]) -> int:
        b = max(prefmax[max(0, i - k - 1)], maxnb[u])
        for w in window:
            if maxnb[w] > b:
                b = maxnb[w]
        return b

    layers: list[dict] = []
    first: dict = {}
    for u in range(1, min(n, 1 + k) + 1):
        for window in fams.get((1, u), []):
            if mode == Mode.ADDITION:
                lo = addition_bound(1, u, window)
                arr = [_INF] * lo + local[u][lo:]
            else:
                arr = list(local[u])
            first[(u, window)] = arr
    layers.append(first)

    for i in range(2, n + 1):
        prev = layers[-1]
        prev_pm = {key: _prefix_min(arr) for key, arr in prev.items()}
        cur: dict = {}
        for u in range(max(1, i - k), min(n, i + k) + 1):
            for window in fams.get((i, u), []):
                merged: list | None = None
                for parent in _parent_candidates(i, window, k):
                    pm = prev_pm.get(parent)
                    if pm is None:
                        continue
                    if merged is None:
                        merged = list(pm)
                    else:
                        merged = [a if a < b else b for a, b in zip(merged, pm)]
                if merged is None:
                    continue
                loc = local[u]
                lo = addition_bound(i, u, window) if mode == Mode.ADDITION else 0
                arr = [
                    (_INF if v < lo else merged[v] + loc[v]) for v in range(m + 1)
                ]
                cur[(u, window)] = arr
        layers.append(cur)

    best = _INF
    terminal = None
    for key in sorted(layers[-1]):
        arr = layers[-1][key]
        for v, val in enumerate(arr):
            if val < best:
                best = val
                terminal = (n, key[0], key[1], v)
    if terminal is None:
        raise CorruptTableError("no feasible terminal state")

    table = DPTable(
        kind="constrained",
        mode=mode,
        k=k,
        layers=layers,
        ctx={
            "inst": inst,
            "n": n,
            "m": m,
            "nb": nb,
            "local": local,
            "addition_bound": addition_bound,
            "alpha": alpha,
            "beta0": inst.base_question_order,
        },
    )
    return table, terminal


def _reconstruct_constrained(table: DPTable, terminal, inst: Instance) -> Solution:
    ctx = table.ctx
    n, m, k, mode = ctx["n"], ctx["m"], table.k, table.mode
    nb, local = ctx["nb"], ctx["local"]
    alpha, beta0 = ctx["alpha"], ctx["beta0"]

    _, u, window, v = terminal
    value = table.layers[n - 1][(u, window)][v]
    chain = [(u, window, v)]
    for i in range(n, 1, -1):
        lo = ctx["addition_bound"](i, u, window) if mode == Mode.ADDITION else 0
        if v < lo:
            raise CorruptTableError(f"infeasible frontier {v} at position {i}")
        target = value - local[u][v]
        found = None
        for u_prev, w_prev in _parent_candidates(i, window, k):
            arr = table.layers[i - 2].get((u_prev, w_prev))
            if arr is None:
                continue
            for v_prev in range(v + 1):
                if arr[v_prev] == target:
                    found = (u_prev, w_prev, v_prev)
                    break
            if found:
                break
        if found is None:
            raise CorruptTableError(f"broken parent chain at position {i}")
        u, window, v = found
        value = target
        chain.append(found)
    chain.reverse()

    additions: list[tuple[int, int]] = []
    deletions: list[tuple[int, int]] = []
    student_order = []
    total = 0
    for (u_i, _w, v_i) in chain:
        s = alpha[u_i - 1]
        student_order.append(s)
        target_bits = (1 << v_i) - 1
        add_bits = target_bits & ~nb[u_i]
        del_bits = nb[u_i] & ~target_bits
        additions.extend((s, beta0[lab - 1]) for lab in _bits_to_labels(add_bits))
        deletions.extend((s, beta0[lab - 1]) for lab in _bits_to_labels(del_bits))
        total += add_bits.bit_count() + del_bits.bit_count()
    if mode == Mode.ADDITION and deletions:
        raise CorruptTableError("addition solve produced deletions")
    terminal_cost = table.layers[n - 1][(terminal[1], terminal[2])][terminal[3]]
    if total != terminal_cost:
        raise CorruptTableError(f"reconstructed cost {total} != table cost {terminal_cost}")

    return Solution(
        cost=total,
        student_order=tuple(student_order),
        question_order=beta0,
        edits=EditSet.of(additions, deletions),
        solver_tag=f"dp.constrained_knear.{mode.value}",
    )


# ---------------------------------------------------------------------------
# Unconstrained k-near addition


def solve_unconstrained_knear_addition(inst: Instance, k: int) -> Solution:
    """Minimum additions making some k-near student order nested, the
    question side free.

    No frontier is tracked: in addition mode the corrected neighborhood of
    the student at position i is forced to the union of the original
    neighborhoods of the weakest i students, so the state is just (position,
    occupant, window).
    """
    table, terminal = _unconstrained_addition_table(inst, k)
    return reconstruct(table, terminal, inst)


def _unconstrained_addition_table(inst: Instance, k: int):
    if inst.base_student_order is None:
        raise MissingBaseOrderError("unconstrained k-near needs a base student order")
    if k < 0:
        raise InvalidInstanceError("k must be non-negative")
    n = inst.num_students
    k = min(k, n)
    alpha = inst.base_student_order

    nb = [0] * (n + 1)
    for lab in range(1, n + 1):
        nb[lab] = inst.adj_bits[alpha[lab - 1] - 1]
    pref_union = [0] * (n + 1)
    for lab in range(1, n + 1):
        pref_union[lab] = pref_union[lab - 1] | nb[lab]

    fams = _window_families(k, n)

    def union_before(i: int, window: tuple[int, ...]) -> int:
        bits = pref_union[max(0, i - k - 1)]
        for w in window:
            bits |= nb[w]
        return bits

    layers: list[dict] = [
        {
            (u, window): 0
            for u in range(1, min(n, 1 + k) + 1)
            for window in fams.get((1, u), [])
        }
    ]
    for i in range(2, n + 1):
        prev = layers[-1]
        cur: dict = {}
        for u in range(max(1, i - k), min(n, i + k) + 1):
            for window in fams.get((i, u), []):
                best = _INF
                for parent in _parent_candidates(i, window, k):
                    val = prev.get(parent, _INF)
                    if val < best:
                        best = val
                if best == _INF:
                    continue
                cost = (union_before(i, window) & ~nb[u]).bit_count()
                cur[(u, window)] = best + cost
        layers.append(cur)

    best = _INF
    terminal = None
    for key in sorted(layers[-1]):
        val = layers[-1][key]
        if val < best:
            best = val
            terminal = (n, key[0], key[1])
    if terminal is None:
        raise CorruptTableError("no feasible terminal state")

    table = DPTable(
        kind="unconstrained_addition",
        mode=Mode.ADDITION,
        k=k,
        layers=layers,
        ctx={"inst": inst, "n": n, "nb": nb, "union_before": union_before, "alpha": alpha},
    )
    return table, terminal


def _reconstruct_unconstrained_addition(table: DPTable, terminal, inst: Instance) -> Solution:
    ctx = table.ctx
    n, k = ctx["n"], table.k
    nb, alpha = ctx["nb"], ctx["alpha"]
    union_before = ctx["union_before"]

    _, u, window = terminal
    value = table.layers[n - 1][(u, window)]
    chain = [(u, window)]
    for i in range(n, 1, -1):
        cost = (union_before(i, window) & ~nb[u]).bit_count()
        target = value - cost
        found = None
        for parent in _parent_candidates(i, window, k):
            if table.layers[i - 2].get(parent) == target:
                found = parent
                break
        if found is None:
            raise CorruptTableError(f"broken parent chain at position {i}")
        u, window = found
        value = target
        chain.append(found)
    chain.reverse()

    additions: list[tuple[int, int]] = []
    student_order = []
    rows = []
    acc = 0
    total = 0
    for (u_i, _w) in chain:
        s = alpha[u_i - 1]
        student_order.append(s)
        acc |= nb[u_i]
        add_bits = acc & ~nb[u_i]
        additions.extend((s, q) for q in _bits_to_labels(add_bits))
        total += add_bits.bit_count()
        rows.append((s, acc))
    terminal_cost = table.layers[n - 1][(terminal[1], terminal[2])]
    if total != terminal_cost:
        raise CorruptTableError(f"reconstructed cost {total} != table cost {terminal_cost}")

    edited_rows = list(inst.adjacency)
    for s, bits in rows:
        edited_rows[s - 1] = tuple(_bits_to_labels(bits))
    edited = replace(inst, adjacency=tuple(edited_rows))
    question_order = ideal.derive_question_order(edited, student_order)

    return Solution(
        cost=total,
        student_order=tuple(student_order),
        question_order=question_order,
        edits=EditSet.of(additions, ()),
        solver_tag="dp.unconstrained_knear.addition",
    )


# ---------------------------------------------------------------------------
# Both k-near (editing and addition)


def _question_states(m: int, k: int, fams_q) -> list[tuple[int, int, tuple[int, ...], int, int]]:
    """(j, v, window, prefix_bits, target_bits) tuples, j=0 sentinel first,
    then sorted by (j, v, window)."""
    states = [(0, 0, (), 0, 0)]
    for j in range(1, m + 1):
        forced_bits = (1 << max(0, j - k - 1)) - 1
        for v in range(max(1, j - k), min(m, j + k) + 1):
            for window in fams_q.get((j, v), []):
                prefix_bits = forced_bits
                for w in window:
                    prefix_bits |= 1 << (w - 1)
                states.append((j, v, window, prefix_bits, prefix_bits | 1 << (v - 1)))
    return states


def _gap_fits(d_bits: int, first_pos: int, k: int) -> bool:
    """Can the labels in d_bits fill consecutive positions starting at
    first_pos with displacement <= k (sorted assignment)?"""
    pos = first_pos
    while d_bits:
        low = d_bits & -d_bits
        if abs(low.bit_length() - pos) > k:
            return False
        pos += 1
        d_bits ^= low
    return True


def _question_predecessors(qstates, k: int) -> list[list[int]]:
    """For each question state, the strictly-earlier states it may follow.

    A jump from (j', v', V') to (j, v, V) needs V to contain V' + v' and the
    newly revealed questions to fit the open positions j'+1..j-1 within
    displacement k. Equal frontier positions must share the whole state, so
    they are not listed here; the self-transition is always allowed.
    """
    preds: list[list[int]] = [[] for _ in qstates]
    for qi, (j, _v, _w, prefix_bits, _t) in enumerate(qstates):
        if j == 0:
            continue
        lst = preds[qi]
        for qp, (jp, _vp, _wp, _pp, target_p) in enumerate(qstates):
            if jp >= j:
                break  # qstates are sorted by frontier position
            if target_p & ~prefix_bits:
                continue
            if _gap_fits(prefix_bits & ~target_p, jp + 1, k):
                lst.append(qp)
    return preds


def solve_both_knear(inst: Instance, k: int, mode: Mode = Mode.EDITING) -> Solution:
    """Minimum edits (or additions) with both output orders within k of
    their base orders.

    The state extends the constrained DP with the frontier question's
    position, identity and easier-question set; compatibility lets the
    frontier stand still (identical question state) or advance with nested
    prefixes.
    """
    table, terminal = _both_table(inst, k, mode)
    return reconstruct(table, terminal, inst)


def _both_table(inst: Instance, k: int, mode: Mode):
    if inst.base_student_order is None or inst.base_question_order is None:
        raise MissingBaseOrderError("both k-near needs both base orders")
    if k < 0:
        raise InvalidInstanceError("k must be non-negative")
    n, m = inst.num_students, inst.num_questions
    ks = min(k, n)
    kq = min(k, m)
    alpha = inst.base_student_order
    beta0 = inst.base_question_order
    qpos = inverse_positions(beta0)

    nb = [0] * (n + 1)
    for lab in range(1, n + 1):
        for q in inst.adjacency[alpha[lab - 1] - 1]:
            nb[lab] |= 1 << (qpos[q] - 1)
    pref_union = [0] * (n + 1)
    for lab in range(1, n + 1):
        pref_union[lab] = pref_union[lab - 1] | nb[lab]

    fams_s = _window_families(ks, n)
    fams_q = _window_families(kq, m)
    qstates = _question_states(m, kq, fams_q)
    preds = _question_predecessors(qstates, kq)
    nq = len(qstates)
    targets = [st[4] for st in qstates]

    editing = mode == Mode.EDITING
    cost_table = []
    for lab in range(n + 1):
        b = nb[lab]
        if editing:
            cost_table.append([(b ^ t).bit_count() for t in targets])
        else:
            cost_table.append([(t & ~b).bit_count() for t in targets])

    def union_with(i: int, u: int, window: tuple[int, ...]) -> int:
        bits = pref_union[max(0, i - ks - 1)] | nb[u]
        for w in window:
            bits |= nb[w]
        return bits

    def state_costs(i: int, u: int, window: tuple[int, ...]) -> list:
        row = cost_table[u]
        if editing:
            return row
        un = union_with(i, u, window)
        return [row[qi] if not (un & ~targets[qi]) else _INF for qi in range(nq)]

    layers: list[dict] = []
    first: dict = {}
    for u in range(1, min(n, 1 + ks) + 1):
        for window in fams_s.get((1, u), []):
            first[(u, window)] = list(state_costs(1, u, window))
    layers.append(first)

    for i in range(2, n + 1):
        prev = layers[-1]
        cur: dict = {}
        for u in range(max(1, i - ks), min(n, i + ks) + 1):
            for window in fams_s.get((i, u), []):
                merged: list | None = None
                for parent in _parent_candidates(i, window, ks):
                    arr = prev.get(parent)
                    if arr is None:
                        continue
                    if merged is None:
                        merged = list(arr)
                    else:
                        merged = [a if a < b else b for a, b in zip(merged, arr)]
                if merged is None:
                    continue
                costs = state_costs(i, u, window)
                out = [_INF] * nq
                for qi in range(nq):
                    best = merged[qi]
                    for qp in preds[qi]:
                        val = merged[qp]
                        if val < best:
                            best = val
                    out[qi] = best + costs[qi]
                cur[(u, window)] = out
        layers.append(cur)

    best = _INF
    terminal = None
    for key in sorted(layers[-1]):
        arr = layers[-1][key]
        for qi, val in enumerate(arr):
            if val < best:
                best = val
                terminal = (n, key[0], key[1], qi)
    if terminal is None:
        raise CorruptTableError("no feasible terminal state")

    table = DPTable(
        kind="both",
        mode=mode,
        k=k,
        layers=layers,
        ctx={
            "inst": inst,
            "n": n,
            "m": m,
            "ks": ks,
            "kq": kq,
            "nb": nb,
            "qstates": qstates,
            "preds": preds,
            "state_costs": state_costs,
            "alpha": alpha,
            "beta0": beta0,
        },
    )
    return table, terminal


def _reconstruct_both(table: DPTable, terminal, inst: Instance) -> Solution:
    ctx = table.ctx
    n, m = ctx["n"], ctx["m"]
    ks, kq = ctx["ks"], ctx["kq"]
    nb, alpha, beta0 = ctx["nb"], ctx["alpha"], ctx["beta0"]
    qstates, preds = ctx["qstates"], ctx["preds"]
    state_costs = ctx["state_costs"]
    mode = table.mode

    _, u, window, qi = terminal
    value = table.layers[n - 1][(u, window)][qi]
    chain = [(u, window, qi)]
    for i in range(n, 1, -1):
        cost = state_costs(i, u, window)[qi]
        target = value - cost
        found = None
        for u_prev, w_prev in _parent_candidates(i, window, ks):
            arr = table.layers[i - 2].get((u_prev, w_prev))
            if arr is None:
                continue
            for qp in sorted(preds[qi] + [qi]):
                if arr[qp] == target:
                    found = (u_prev, w_prev, qp)
                    break
            if found:
                break
        if found is None:
            raise CorruptTableError(f"broken parent chain at position {i}")
        u, window, qi = found
        value = target
        chain.append(found)
    chain.reverse()

    # Build the question order from the distinct question states in order.
    beta_labels = [0] * (m + 1)
    prev_j, prev_target = 0, 0
    seen_qis = []
    for (_u, _w, q_idx) in chain:
        if seen_qis and seen_qis[-1] == q_idx:
            continue
        seen_qis.append(q_idx)
    for q_idx in seen_qis:
        j, v, _wv, prefix_bits, target_bits = qstates[q_idx]
        if j == 0:
            continue
        gap = _bits_to_labels(prefix_bits & ~prev_target)
        for offset, lab in enumerate(gap):
            beta_labels[prev_j + 1 + offset] = lab
        beta_labels[j] = v
        prev_j, prev_target = j, target_bits
    tail = _bits_to_labels(((1 << m) - 1) & ~prev_target)
    for offset, lab in enumerate(tail):
        beta_labels[prev_j + 1 + offset] = lab
    beta_label_order = beta_labels[1:]
    if sorted(beta_label_order) != list(range(1, m + 1)):
        raise CorruptTableError("reconstructed question order is not a permutation")
    if any(abs(lab - pos) > kq for pos, lab in enumerate(beta_label_order, start=1)):
        raise CorruptTableError("reconstructed question order exceeds displacement bound")

    additions: list[tuple[int, int]] = []
    deletions: list[tuple[int, int]] = []
    student_order = []
    total = 0
    for (u_i, _w, q_idx) in chain:
        s = alpha[u_i - 1]
        student_order.append(s)
        target_bits = qstates[q_idx][4]
        add_bits = target_bits & ~nb[u_i]
        del_bits = nb[u_i] & ~target_bits
        additions.extend((s, beta0[lab - 1]) for lab in _bits_to_labels(add_bits))
        deletions.extend((s, beta0[lab - 1]) for lab in _bits_to_labels(del_bits))
        total += add_bits.bit_count() + del_bits.bit_count()
    if mode == Mode.ADDITION and deletions:
        raise CorruptTableError("addition solve produced deletions")
    terminal_cost = table.layers[n - 1][(terminal[1], terminal[2])][terminal[3]]
    if total != terminal_cost:
        raise CorruptTableError(f"reconstructed cost {total} != table cost {terminal_cost}")

    question_order = tuple(beta0[lab - 1] for lab in beta_label_order)
    return Solution(
        cost=total,
        student_order=tuple(student_order),
        question_order=question_order,
        edits=EditSet.of(additions, deletions),
        solver_tag=f"dp.both_knear.{mode.value}",
    )


# ---------------------------------------------------------------------------
# Shared reconstruction entry point


def reconstruct(table: DPTable, terminal, inst: Instance) -> Solution:
    """Walk parent pointers from a terminal state back to position 1 and
    assemble the Solution; raises CorruptTableError if the chain breaks or
    the recomputed cost disagrees with the table."""
    if table.kind == "constrained":
        return _reconstruct_constrained(table, terminal, inst)
    if table.kind == "unconstrained_addition":
        return _reconstruct_unconstrained_addition(table, terminal, inst)
    if table.kind == "both":
        return _reconstruct_both(table, terminal, inst)
    raise ValueError(f"unknown table kind {table.kind!r}")
