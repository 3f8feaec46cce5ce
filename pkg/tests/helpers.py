"""Shared test utilities: compact builders and independent oracles.

The oracles here deliberately reimplement checks through a different route
than the library (prefix intervals instead of the triple condition, A* over
raw swap sequences instead of lift vectors) so that tests cross-validate.
"""

from __future__ import annotations

import heapq
import string
from itertools import combinations_with_replacement, permutations

from peakflow.core import Axis, Profile, Ranking, enumerate_sp_rankings


def R(compact: str) -> Ranking:
    """Ranking from a compact string of single-letter candidates, e.g. 'bac'."""
    return Ranking(tuple(compact))


def A(compact: str) -> Axis:
    """Axis from single-letter candidates, e.g. 'abc'."""
    return Axis(tuple(compact))


def canonical_axis(m: int) -> Axis:
    return Axis(tuple(string.ascii_lowercase[:m]))


def P(*specs: str) -> Profile:
    """Profile from specs like '2*abc', 'bca' (count defaults to 1)."""
    rankings: list[Ranking] = []
    for spec in specs:
        if "*" in spec:
            count_str, compact = spec.split("*")
            count = int(count_str)
        else:
            count, compact = 1, spec
        rankings.extend([R(compact)] * count)
    cands = tuple(sorted(rankings[0].order))
    return Profile(cands, tuple(rankings))


def sp_by_triple_condition(ranking: Ranking, axis: Axis) -> bool:
    """Independent single-peakedness oracle: the definitional triple condition.

    For every axis-ordered triple (in either direction), preferring the outer
    candidate to the middle one forces preferring the middle to the far one.
    """
    cands = axis.candidates
    m = len(cands)
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                ci, cj, ck = cands[i], cands[j], cands[k]
                if ranking.prefers(ci, cj) and not ranking.prefers(cj, ck):
                    return False
                if ranking.prefers(ck, cj) and not ranking.prefers(cj, ci):
                    return False
    return True


def iter_sp_profiles(m: int, n: int):
    """All single-peaked profiles with exactly n voters on the canonical axis."""
    axis = canonical_axis(m)
    seq = enumerate_sp_rankings(axis).rankings
    for combo in combinations_with_replacement(range(len(seq)), n):
        yield axis, Profile(axis.candidates, tuple(seq[i] for i in combo))


def iter_sp_profiles_grid(max_m: int, max_n: int, min_m: int = 1):
    for m in range(min_m, max_m + 1):
        for n in range(1, max_n + 1):
            yield from iter_sp_profiles(m, n)


def swap_distance_oracle(profile: Profile, candidate: str, *, weak: bool) -> int:
    """Minimum adjacent swaps (anywhere in any ranking) until `candidate` is a
    strict (weak) Condorcet winner, by A* over whole-profile states.

    The heuristic counts the pairwise flips still needed at one swap each,
    which is admissible and consistent because a single adjacent swap changes
    exactly one pair's relative order in one ranking.
    """
    cands = profile.candidates
    m = len(cands)
    target = 0 if weak else 1
    perms = list(permutations(range(m)))
    perm_index = {p: i for i, p in enumerate(perms)}
    cand_index = {c: i for i, c in enumerate(cands)}
    c0 = cand_index[candidate]

    # neighbors[p] = list of (next_perm_id, other_candidate_or_None, delta)
    # delta applies to margin(candidate, other) when the swap involves candidate.
    neighbors: list[list[tuple[int, int | None, int]]] = []
    for p in perms:
        row = []
        for i in range(m - 1):
            q = list(p)
            q[i], q[i + 1] = q[i + 1], q[i]
            qid = perm_index[tuple(q)]
            hi, lo = p[i], p[i + 1]  # hi was preferred, lo becomes preferred
            if hi == c0:
                row.append((qid, lo, -2))
            elif lo == c0:
                row.append((qid, hi, +2))
            else:
                row.append((qid, None, 0))
        neighbors.append(row)

    def margins_of(state: tuple[int, ...]) -> tuple[int, ...]:
        margins = [0] * m
        for pid in state:
            p = perms[pid]
            pos = {x: k for k, x in enumerate(p)}
            for x in range(m):
                if x != c0:
                    margins[x] += 1 if pos[c0] < pos[x] else -1
        return tuple(margins)

    def heuristic(margins: tuple[int, ...]) -> int:
        total = 0
        for x in range(m):
            if x != c0:
                deficit = target - margins[x]
                if deficit > 0:
                    total += (deficit + 1) // 2
        return total

    start = tuple(perm_index[tuple(cand_index[c] for c in r.order)] for r in profile.rankings)
    start_margins = margins_of(start)
    h0 = heuristic(start_margins)
    if h0 == 0:
        return 0
    best: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {(start, start_margins): 0}
    heap = [(h0, 0, start, start_margins)]
    while heap:
        f, g, state, margins = heapq.heappop(heap)
        if best.get((state, margins), -1) != g:
            continue
        if heuristic(margins) == 0:
            return g
        for v in range(len(state)):
            for qid, other, delta in neighbors[state[v]]:
                new_state = state[:v] + (qid,) + state[v + 1 :]
                if other is None:
                    new_margins = margins
                else:
                    lst = list(margins)
                    lst[other] += delta
                    new_margins = tuple(lst)
                key = (new_state, new_margins)
                ng = g + 1
                if key not in best or ng < best[key]:
                    best[key] = ng
                    heapq.heappush(heap, (ng + heuristic(new_margins), ng, new_state, new_margins))
    raise AssertionError("swap search exhausted without reaching the target")
