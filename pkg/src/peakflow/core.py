"""Core value types for preference profiles on a single-peaked axis.

Candidates are symbolic names; an axis fixes their left-to-right order and
thereby the single-peaked domain. Everything here is an immutable value and
every operation is a pure function.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

MAX_AXIS_SIZE = 20  # enumerate_sp_rankings materializes 2^(m-1) rankings


class DomainError(ValueError):
    """Input violates a precondition (mismatched candidates, non-SP profile, ...)."""


class CapacityError(RuntimeError):
    """Instance exceeds the size the implementation is willing to handle exactly."""


def _check_distinct(names: Sequence[str], what: str) -> None:
    if len(names) == 0:
        raise DomainError(f"{what} must contain at least one candidate")
    if len(set(names)) != len(names):
        raise DomainError(f"duplicate candidate in {what}: {names!r}")
    for name in names:
        if not name or any(ch.isspace() for ch in name) or ">" in name:
            raise DomainError(f"bad candidate name {name!r} in {what}")


@dataclass(frozen=True)
class Ranking:
    """A strict total order over candidates, most preferred first."""

    order: tuple[str, ...]

    def __post_init__(self) -> None:
        _check_distinct(self.order, "ranking")

    @classmethod
    def from_string(cls, text: str) -> "Ranking":
        return cls(tuple(part.strip() for part in text.split(">")))

    @property
    def peak(self) -> str:
        """Top-ranked candidate."""
        return self.order[0]

    @cached_property
    def _rank_of(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.order)}

    def rank(self, candidate: str) -> int:
        """0-based position, 0 = most preferred."""
        try:
            return self._rank_of[candidate]
        except KeyError:
            raise DomainError(f"candidate {candidate!r} not in ranking") from None

    def prefers(self, a: str, b: str) -> bool:
        return self.rank(a) < self.rank(b)

    def restrict(self, keep: Iterable[str]) -> "Ranking":
        """Drop every candidate outside `keep`, preserving relative order."""
        keep_set = set(keep)
        return Ranking(tuple(c for c in self.order if c in keep_set))

    def reversed(self) -> "Ranking":
        return Ranking(self.order[::-1])

    def __str__(self) -> str:
        return " > ".join(self.order)


@dataclass(frozen=True)
class Axis:
    """The single-peaked axis: candidates in their left-to-right order."""

    candidates: tuple[str, ...]

    def __post_init__(self) -> None:
        _check_distinct(self.candidates, "axis")

    @classmethod
    def from_string(cls, text: str) -> "Axis":
        return cls(tuple(part.strip() for part in text.split(">")))

    @property
    def m(self) -> int:
        return len(self.candidates)

    @cached_property
    def _pos(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.candidates)}

    def position(self, candidate: str) -> int:
        """0-based axis position."""
        try:
            return self._pos[candidate]
        except KeyError:
            raise DomainError(f"candidate {candidate!r} not on axis") from None

    def distance(self, a: str, b: str) -> int:
        """Axis distance |i - j| between two candidates."""
        return abs(self.position(a) - self.position(b))

    def reversed(self) -> "Axis":
        return Axis(self.candidates[::-1])

    @property
    def extreme_up(self) -> Ranking:
        """The extreme opinion that follows the axis order itself."""
        return Ranking(self.candidates)

    @property
    def extreme_down(self) -> Ranking:
        """The extreme opinion that reverses the axis order."""
        return Ranking(self.candidates[::-1])

    def lex_key(self, ranking: Ranking) -> tuple[int, ...]:
        """Key for lexicographic ranking comparison by axis positions."""
        return tuple(self.position(c) for c in ranking.order)

    def __str__(self) -> str:
        return " > ".join(self.candidates)


@dataclass(frozen=True)
class Profile:
    """A multiset of voter rankings over a shared candidate set.

    Multiplicity is represented by repetition; the voter at index i is the
    i-th ranking.
    """

    candidates: tuple[str, ...]
    rankings: tuple[Ranking, ...]

    def __post_init__(self) -> None:
        _check_distinct(self.candidates, "profile")
        cand_set = frozenset(self.candidates)
        for r in self.rankings:
            if frozenset(r.order) != cand_set:
                raise DomainError(
                    f"ranking {r} is not over the profile's candidate set {sorted(cand_set)}"
                )

    @classmethod
    def from_rankings(
        cls, rankings: Iterable[Ranking], candidates: Sequence[str] | None = None
    ) -> "Profile":
        rankings = tuple(rankings)
        if candidates is None:
            if not rankings:
                raise DomainError("cannot infer candidates from an empty profile")
            candidates = rankings[0].order
        return cls(tuple(candidates), rankings)

    @property
    def n(self) -> int:
        return len(self.rankings)

    @property
    def m(self) -> int:
        return len(self.candidates)

    def counts(self) -> Counter[Ranking]:
        return Counter(self.rankings)

    def count_of(self, ranking: Ranking) -> int:
        return sum(1 for r in self.rankings if r == ranking)


@dataclass(frozen=True)
class MajorityTable:
    """Pairwise popularity margins in voter-count units.

    margin(a, b) = #{voters preferring a to b} - #{voters preferring b to a}.
    The table is antisymmetric with zero diagonal.
    """

    candidates: tuple[str, ...]
    margins: tuple[tuple[int, ...], ...]

    @cached_property
    def _pos(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.candidates)}

    def margin(self, a: str, b: str) -> int:
        return self.margins[self._pos[a]][self._pos[b]]

    def worst_defeat(self, c: str) -> int:
        """Largest margin any opponent scores against c (0 if there is none)."""
        i = self._pos[c]
        others = [row[i] for j, row in enumerate(self.margins) if j != i]
        return max(others, default=0)


@dataclass(frozen=True)
class CondorcetSet:
    """Weak Condorcet winners (or losers) plus the strict one when it exists."""

    weak: frozenset[str]
    strict: str | None


@dataclass(frozen=True)
class SPRankingSequence:
    """Lemma-3 style ordering of all single-peaked rankings for an axis.

    For every adjacent axis pair (c_i, c_{i+1}) there is a threshold h such
    that exactly the first h rankings prefer c_i to c_{i+1}, and those h
    rankings are exactly the ones whose peak lies in {c_1, ..., c_i}.
    """

    axis: Axis
    rankings: tuple[Ranking, ...]
    thresholds: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.rankings)

    def __iter__(self) -> Iterator[Ranking]:
        return iter(self.rankings)


def kendall_tau(a: Ranking, b: Ranking) -> int:
    """Number of candidate pairs the two rankings order oppositely."""
    if frozenset(a.order) != frozenset(b.order):
        raise DomainError("kendall_tau: rankings are over different candidate sets")
    pos_b = b._rank_of
    seq = [pos_b[c] for c in a.order]
    inversions = 0
    for i in range(len(seq)):
        si = seq[i]
        for j in range(i + 1, len(seq)):
            if seq[j] < si:
                inversions += 1
    return inversions


def is_single_peaked(ranking: Ranking, axis: Axis) -> bool:
    """True iff the ranking is single-peaked with respect to the axis.

    Equivalent to the triple condition (for axis-ordered c_i > c_j > c_k,
    preferring c_i to c_j forces preferring c_j to c_k): every top-k set of
    the ranking must form a contiguous axis interval around the peak, so each
    successive candidate has to extend that interval by one position.
    """
    if frozenset(ranking.order) != frozenset(axis.candidates):
        raise DomainError("is_single_peaked: ranking and axis are over different candidate sets")
    lo = hi = axis.position(ranking.order[0])
    for c in ranking.order[1:]:
        p = axis.position(c)
        if p == lo - 1:
            lo = p
        elif p == hi + 1:
            hi = p
        else:
            return False
    return True


def is_sp_profile(profile: Profile, axis: Axis) -> bool:
    if frozenset(profile.candidates) != frozenset(axis.candidates):
        raise DomainError("profile and axis are over different candidate sets")
    return all(is_single_peaked(r, axis) for r in profile.rankings)


@lru_cache(maxsize=128)
def enumerate_sp_rankings(axis: Axis) -> SPRankingSequence:
    """All 2^(m-1) single-peaked rankings for the axis, in canonical order.

    Built iteratively: starting from the one-candidate axis, each new
    rightmost axis candidate is inserted into every legal slot strictly below
    the previous rightmost candidate (bottom-most slot first), and the full
    axis reversal is appended last. The resulting order carries the adjacent
    pair thresholds described on SPRankingSequence.
    """
    m = axis.m
    if m > MAX_AXIS_SIZE:
        raise CapacityError(f"axis size {m} exceeds the cap of {MAX_AXIS_SIZE}")
    cands = axis.candidates
    orders: list[tuple[str, ...]] = [(cands[0],)]
    for k in range(1, m):
        new_cand = cands[k]
        prev_cand = cands[k - 1]
        extended: list[tuple[str, ...]] = []
        for order in orders:
            anchor = order.index(prev_cand)
            # insertion slots strictly below the previous axis end, bottom first
            for slot in range(len(order), anchor, -1):
                extended.append(order[:slot] + (new_cand,) + order[slot:])
        extended.append(tuple(cands[: k + 1][::-1]))
        orders = extended
    rankings = tuple(Ranking(order) for order in orders)
    thresholds = []
    for i in range(m - 1):
        left, right = cands[i], cands[i + 1]
        h = sum(1 for r in rankings if r.prefers(left, right))
        thresholds.append(h)
    return SPRankingSequence(axis=axis, rankings=rankings, thresholds=tuple(thresholds))


def majority_table(profile: Profile) -> MajorityTable:
    """Pairwise popularity margins of the profile."""
    cands = profile.candidates
    m = len(cands)
    grid = [[0] * m for _ in range(m)]
    for r in profile.rankings:
        rank = r._rank_of
        for i in range(m):
            ri = rank[cands[i]]
            for j in range(i + 1, m):
                if ri < rank[cands[j]]:
                    grid[i][j] += 1
                    grid[j][i] -= 1
                else:
                    grid[i][j] -= 1
                    grid[j][i] += 1
    return MajorityTable(cands, tuple(tuple(row) for row in grid))


def condorcet_winners(profile: Profile) -> CondorcetSet:
    """Candidates never defeated in pairwise majority comparison.

    The strict field holds the candidate defeating everyone else, if any.
    """
    table = majority_table(profile)
    cands = profile.candidates
    weak = frozenset(c for c in cands if table.worst_defeat(c) <= 0)
    strict = None
    for c in cands:
        if all(table.margin(c, x) > 0 for x in cands if x != c):
            strict = c
            break
    return CondorcetSet(weak=weak, strict=strict)


def condorcet_losers(profile: Profile) -> CondorcetSet:
    """Candidates never defeating anyone; dual of condorcet_winners."""
    table = majority_table(profile)
    cands = profile.candidates
    weak = frozenset(
        c for c in cands if all(table.margin(c, x) <= 0 for x in cands if x != c)
    )
    strict = None
    for c in cands:
        if all(table.margin(x, c) > 0 for x in cands if x != c):
            strict = c
            break
    return CondorcetSet(weak=weak, strict=strict)


def median_peak_winners(profile: Profile, axis: Axis) -> frozenset[str]:
    """Weak Condorcet winners of a single-peaked profile via the median peaks.

    Returns every candidate lying (inclusively) between the lower and upper
    median of the voters' peaks in axis order. Must coincide with
    condorcet_winners(profile).weak; for an empty profile every candidate
    qualifies.
    """
    if not is_sp_profile(profile, axis):
        raise DomainError("median_peak_winners: profile is not single-peaked w.r.t. axis")
    if profile.n == 0:
        return frozenset(axis.candidates)
    peaks = sorted(axis.position(r.peak) for r in profile.rankings)
    lower = peaks[(profile.n - 1) // 2]
    upper = peaks[profile.n // 2]
    return frozenset(axis.candidates[lower : upper + 1])
