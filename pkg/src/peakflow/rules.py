"""Set-valued ranking rules and the tie-breaking resolver.

Score-ordered rules (minimax, Borda, Copeland, both Dodgson variants) return
every total order refining the weak order their scores induce; the refinement
set is kept symbolic as score groups and only materialized on demand, capped
at REFINEMENT_CAP rankings. Kemeny and STV return explicit winner sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Mapping

from .core import (
    Axis,
    CapacityError,
    DomainError,
    Profile,
    Ranking,
    enumerate_sp_rankings,
    is_sp_profile,
    kendall_tau,
    majority_table,
)

REFINEMENT_CAP = 10_000
KEMENY_BRUTE_MAX_M = 8
DODGSON_MAX_M = 6
DODGSON_MAX_N = 10

RULE_NAMES = (
    "kemeny",
    "kemeny-sp",
    "mmc",
    "borda",
    "copeland",
    "dodgson",
    "weak-dodgson",
    "stv",
)

#: rules proven extremist majority consistent on the single-peaked domain
EMC_RULES = frozenset({"kemeny", "kemeny-sp", "mmc", "weak-dodgson"})


@dataclass(frozen=True)
class RuleOutcome:
    """Winning rankings of a rule plus the scores that produced them.

    Exactly one of `explicit` (a concrete winner set) and `groups` (score-tied
    candidate groups, best group first, refinements implied) is set.
    """

    explicit: frozenset[Ranking] | None
    groups: tuple[tuple[str, ...], ...] | None
    score_trace: Mapping[str, object] = field(default_factory=dict)

    @classmethod
    def from_rankings(
        cls, rankings: Iterable[Ranking], trace: Mapping[str, object] | None = None
    ) -> "RuleOutcome":
        winners = frozenset(rankings)
        if not winners:
            raise DomainError("a rule outcome must contain at least one ranking")
        return cls(explicit=winners, groups=None, score_trace=dict(trace or {}))

    @classmethod
    def from_scores(
        cls,
        scores: Mapping[str, float],
        better: str,
        trace: Mapping[str, object] | None = None,
    ) -> "RuleOutcome":
        if better not in ("low", "high"):
            raise ValueError("better must be 'low' or 'high'")
        reverse = better == "high"
        ordered = sorted(scores, key=lambda c: (scores[c], c) if not reverse else (-scores[c], c))
        groups: list[tuple[str, ...]] = []
        for c in ordered:
            if groups and scores[groups[-1][0]] == scores[c]:
                groups[-1] = groups[-1] + (c,)
            else:
                groups.append((c,))
        trace_dict = dict(trace or {})
        trace_dict.setdefault("scores", dict(scores))
        trace_dict.setdefault("better", better)
        return cls(explicit=None, groups=tuple(groups), score_trace=trace_dict)

    def winner_count(self) -> int:
        if self.explicit is not None:
            return len(self.explicit)
        assert self.groups is not None
        count = 1
        for g in self.groups:
            count *= math.factorial(len(g))
        return count

    @property
    def winners(self) -> frozenset[Ranking]:
        """Materialized winner set; CapacityError above REFINEMENT_CAP rankings."""
        if self.explicit is not None:
            return self.explicit
        assert self.groups is not None
        if self.winner_count() > REFINEMENT_CAP:
            raise CapacityError(
                f"refinement set has {self.winner_count()} rankings "
                f"(cap {REFINEMENT_CAP}); use the symbolic accessors"
            )
        pools = [tuple(permutations(g)) for g in self.groups]
        winners = set()
        for combo in product(*pools):
            order: tuple[str, ...] = ()
            for part in combo:
                order += part
            winners.add(Ranking(order))
        return frozenset(winners)

    def contains(self, ranking: Ranking) -> bool:
        if self.explicit is not None:
            return ranking in self.explicit
        assert self.groups is not None
        group_of = {c: i for i, g in enumerate(self.groups) for c in g}
        if set(group_of) != set(ranking.order):
            return False
        indices = [group_of[c] for c in ranking.order]
        return all(a <= b for a, b in zip(indices, indices[1:]))

    def top_candidates(self) -> frozenset[str]:
        """Candidates some winning ranking puts first."""
        if self.explicit is not None:
            return frozenset(r.peak for r in self.explicit)
        assert self.groups is not None
        return frozenset(self.groups[0])

    def bottom_candidates(self) -> frozenset[str]:
        """Candidates some winning ranking puts last."""
        if self.explicit is not None:
            return frozenset(r.order[-1] for r in self.explicit)
        assert self.groups is not None
        return frozenset(self.groups[-1])

    def sp_winners(self, axis: Axis) -> tuple[Ranking, ...]:
        """Winning rankings that are single-peaked w.r.t. axis, in canonical order."""
        return tuple(r for r in enumerate_sp_rankings(axis) if self.contains(r))


@dataclass(frozen=True)
class TieBreakContext:
    """What an active voter brings to tie-breaking: the axis and its own opinion.

    In single-peaked mode the current opinion is itself single-peaked; free
    mode admits arbitrary opinions, so this is not enforced here.
    """

    axis: Axis
    current_opinion: Ranking


def tie_break(outcome: RuleOutcome, ctx: TieBreakContext) -> Ranking:
    """Resolve a rule outcome to the single ranking the active voter adopts.

    Three stages: (1) keep only single-peaked winners if any exist, (2) keep
    those closest to the current opinion in Kendall tau distance, (3) break
    what is left lexicographically by axis positions.
    """
    sp = outcome.sp_winners(ctx.axis)
    if sp:
        pool: Iterable[Ranking] = sp
    elif outcome.explicit is not None:
        pool = outcome.explicit
    else:
        # No single-peaked refinement exists. Keeping the current relative
        # order inside every score group is the unique Kendall-tau minimizer
        # over all refinements, so stages (2)-(3) collapse to it.
        assert outcome.groups is not None
        order: list[str] = []
        for group in outcome.groups:
            order.extend(sorted(group, key=ctx.current_opinion.rank))
        return Ranking(tuple(order))
    return min(
        pool,
        key=lambda r: (kendall_tau(r, ctx.current_opinion), ctx.axis.lex_key(r)),
    )


def _require_voters(profile: Profile, rule: str) -> None:
    if profile.n == 0:
        raise DomainError(f"{rule}: the profile has no voters")


def kemeny(profile: Profile) -> RuleOutcome:
    """All rankings minimizing total Kendall tau distance to the voters.

    Brute force over every permutation; capped at 8 candidates. Single-peaked
    profiles have the equivalent fast path kemeny_sp.
    """
    _require_voters(profile, "kemeny")
    m = profile.m
    if m > KEMENY_BRUTE_MAX_M:
        raise CapacityError(
            f"kemeny brute force is capped at m = {KEMENY_BRUTE_MAX_M}; "
            "use kemeny_sp for single-peaked profiles"
        )
    cands = profile.candidates
    prefer = [[0] * m for _ in range(m)]
    for r in profile.rankings:
        rank = r._rank_of
        for i in range(m):
            ri = rank[cands[i]]
            for j in range(i + 1, m):
                if ri < rank[cands[j]]:
                    prefer[i][j] += 1
                else:
                    prefer[j][i] += 1
    best: int | None = None
    best_perms: list[tuple[int, ...]] = []
    for perm in permutations(range(m)):
        score = 0
        for a in range(m):
            pa = perm[a]
            for b in range(a + 1, m):
                score += prefer[perm[b]][pa]
        if best is None or score < best:
            best = score
            best_perms = [perm]
        elif score == best:
            best_perms.append(perm)
    winners = (Ranking(tuple(cands[i] for i in perm)) for perm in best_perms)
    return RuleOutcome.from_rankings(winners, trace={"optimal_score": best})


def kemeny_sp(profile: Profile, axis: Axis) -> RuleOutcome:
    """The single-peaked Kemeny winners, without touching all m! rankings.

    Recursively appends a weak Condorcet loser found at an end of the current
    axis interval and solves the reduced profile, branching when both ends
    qualify. The returned set equals kemeny(profile) intersected with the
    single-peaked rankings. Runs in O(n * m^2) plus output size.
    """
    _require_voters(profile, "kemeny_sp")
    if not is_sp_profile(profile, axis):
        raise DomainError("kemeny_sp: profile is not single-peaked w.r.t. axis")
    table = majority_table(profile)
    cands = axis.candidates
    m = len(cands)
    margin = [[table.margin(a, b) for b in cands] for a in cands]

    memo: dict[tuple[int, int], tuple[tuple[str, ...], ...]] = {}

    def solve(lo: int, hi: int) -> tuple[tuple[str, ...], ...]:
        if lo == hi:
            return ((cands[lo],),)
        key = (lo, hi)
        if key in memo:
            return memo[key]
        results: list[tuple[str, ...]] = []
        for end in (lo, hi):
            row = margin[end]
            if all(row[x] <= 0 for x in range(lo, hi + 1) if x != end):
                sub = solve(lo + 1, hi) if end == lo else solve(lo, hi - 1)
                results.extend(s + (cands[end],) for s in sub)
        if not results:
            raise AssertionError(
                "single-peaked profile without a weak Condorcet loser at an axis end"
            )
        memo[key] = tuple(results)
        return memo[key]

    orders = solve(0, m - 1)
    winners = frozenset(Ranking(o) for o in orders)
    some = next(iter(winners))
    score = sum(kendall_tau(some, r) for r in profile.rankings)
    return RuleOutcome.from_rankings(winners, trace={"optimal_score": score})


def mmc(profile: Profile) -> RuleOutcome:
    """Minimax Condorcet: candidates ordered by their worst pairwise defeat."""
    _require_voters(profile, "mmc")
    table = majority_table(profile)
    scores = {c: table.worst_defeat(c) for c in profile.candidates}
    return RuleOutcome.from_scores(scores, better="low")


def borda(profile: Profile) -> RuleOutcome:
    """Positional scoring: one point per lower-ranked opponent per voter."""
    _require_voters(profile, "borda")
    m = profile.m
    scores = {c: 0 for c in profile.candidates}
    for r in profile.rankings:
        for pos, c in enumerate(r.order):
            scores[c] += m - 1 - pos
    return RuleOutcome.from_scores(scores, better="high")


def copeland(profile: Profile) -> RuleOutcome:
    """Pairwise wins plus half a point per tie.

    Scores are kept as doubled integers internally; the trace reports the
    conventional half-point values (exact, since halves are exact in binary).
    """
    _require_voters(profile, "copeland")
    table = majority_table(profile)
    cands = profile.candidates
    doubled = {}
    for c in cands:
        s = 0
        for x in cands:
            if x == c:
                continue
            mg = table.margin(c, x)
            s += 2 if mg > 0 else (1 if mg == 0 else 0)
        doubled[c] = s
    return RuleOutcome.from_scores(
        {c: s / 2 for c, s in doubled.items()},
        better="high",
        trace={"doubled_scores": doubled},
    )


def _lift_score(profile: Profile, candidate: str, *, weak: bool) -> int:
    """Minimum adjacent swaps making `candidate` a strict (weak) Condorcet winner.

    Only swaps that raise the candidate can help it, so the optimum decomposes
    into per-voter lift amounts; a DP over voters with the vector of still
    uncovered pairwise deficits finds the cheapest combination.
    """
    table = majority_table(profile)
    target = 0 if weak else 1
    need: dict[str, int] = {}
    for x in profile.candidates:
        if x == candidate:
            continue
        deficit = target - table.margin(candidate, x)
        if deficit > 0:
            need[x] = (deficit + 1) // 2
    if not need:
        return 0
    tracked = sorted(need)
    index = {x: i for i, x in enumerate(tracked)}
    start = tuple(need[x] for x in tracked)
    states: dict[tuple[int, ...], int] = {start: 0}
    for r in profile.rankings:
        above = r.order[: r.rank(candidate)]
        options: list[tuple[int, tuple[int, ...]]] = []
        for k in range(len(above) + 1):
            passed = tuple(index[x] for x in above[len(above) - k :] if x in index)
            options.append((k, passed))
        nxt: dict[tuple[int, ...], int] = {}
        for state, cost in states.items():
            for k, passed in options:
                s = list(state)
                for i in passed:
                    if s[i]:
                        s[i] -= 1
                key = tuple(s)
                total = cost + k
                if key not in nxt or total < nxt[key]:
                    nxt[key] = total
        states = nxt
    return states[tuple(0 for _ in tracked)]


def _dodgson_scores(profile: Profile, *, weak: bool) -> dict[str, int]:
    rule = "weak-dodgson" if weak else "dodgson"
    _require_voters(profile, rule)
    if profile.m > DODGSON_MAX_M or profile.n > DODGSON_MAX_N:
        raise CapacityError(
            f"{rule} is capped at m <= {DODGSON_MAX_M}, n <= {DODGSON_MAX_N}"
        )
    return {c: _lift_score(profile, c, weak=weak) for c in profile.candidates}


def dodgson(profile: Profile) -> RuleOutcome:
    """Candidates ordered by swaps needed to become the strict Condorcet winner."""
    return RuleOutcome.from_scores(_dodgson_scores(profile, weak=False), better="low")


def weak_dodgson(profile: Profile) -> RuleOutcome:
    """Candidates ordered by swaps needed to become a weak Condorcet winner."""
    return RuleOutcome.from_scores(_dodgson_scores(profile, weak=True), better="low")


def stv_ranking(profile: Profile) -> RuleOutcome:
    """Reverse elimination orders of iterated plurality-loser elimination.

    Every tie among plurality losers branches, so the winner set is
    independent of any loser tie-breaking convention.
    """
    _require_voters(profile, "stv")
    first_round = {c: 0 for c in profile.candidates}
    for r in profile.rankings:
        first_round[r.peak] += 1

    memo: dict[frozenset[str], frozenset[tuple[str, ...]]] = {}

    def solve(remaining: frozenset[str]) -> frozenset[tuple[str, ...]]:
        if remaining in memo:
            return memo[remaining]
        if len(remaining) == 1:
            result = frozenset({(next(iter(remaining)),)})
        else:
            counts = {c: 0 for c in remaining}
            for r in profile.rankings:
                for c in r.order:
                    if c in remaining:
                        counts[c] += 1
                        break
            low = min(counts.values())
            acc: set[tuple[str, ...]] = set()
            for loser in sorted(c for c, k in counts.items() if k == low):
                for sub in solve(remaining - {loser}):
                    acc.add(sub + (loser,))
            result = frozenset(acc)
        memo[remaining] = result
        return result

    orders = solve(frozenset(profile.candidates))
    return RuleOutcome.from_rankings(
        (Ranking(o) for o in orders), trace={"first_round_plurality": first_round}
    )


def apply_rule(name: str, profile: Profile, axis: Axis | None = None) -> RuleOutcome:
    """Dispatch a rule by its CLI selector string.

    `kemeny` takes the single-peaked fast path whenever the profile is
    single-peaked w.r.t. the given axis (the winner sets agree after the
    single-peaked restriction of tie-breaking, so updates are unchanged).
    """
    if name == "kemeny":
        if (
            axis is not None
            and profile.n > 0
            and frozenset(axis.candidates) == frozenset(profile.candidates)
            and is_sp_profile(profile, axis)
        ):
            return kemeny_sp(profile, axis)
        return kemeny(profile)
    if name == "kemeny-sp":
        if axis is None:
            raise DomainError("kemeny-sp requires an axis")
        return kemeny_sp(profile, axis)
    simple = {
        "mmc": mmc,
        "borda": borda,
        "copeland": copeland,
        "dodgson": dodgson,
        "weak-dodgson": weak_dodgson,
        "stv": stv_ranking,
    }
    if name not in simple:
        raise DomainError(f"unknown rule {name!r}; choose from {', '.join(RULE_NAMES)}")
    return simple[name](profile)
