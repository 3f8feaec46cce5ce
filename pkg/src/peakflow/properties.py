"""Certifiers for the four rule properties: CWC, CLC, SPP, and EMC.

Each check enumerates every single-peaked profile of a given size as a
multiset over the canonical axis (anonymity makes ordered enumeration
redundant, neutrality makes other axes redundant) and re-runs the actual
rule implementations. A "holds" verdict is always holds-on-searched-space;
only the refutations are certificates, and every stored witness re-verifies
by re-running the rule on it.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb
from typing import Iterator, Mapping

from .core import (
    Axis,
    DomainError,
    Profile,
    Ranking,
    condorcet_losers,
    condorcet_winners,
    enumerate_sp_rankings,
)
from .rules import RuleOutcome, apply_rule, kemeny

TABLE1_RULES = ("kemeny", "mmc", "weak-dodgson", "dodgson", "copeland", "stv", "borda")
PROPERTIES = ("CWC", "CLC", "SPP", "EMC")

HOLDS = "holds-on-searched-space"
REFUTED = "refuted"

#: expected verdict per rule and property (True = holds)
EXPECTED_TABLE1: Mapping[str, Mapping[str, bool]] = {
    "kemeny": {"CWC": True, "CLC": True, "SPP": True, "EMC": True},
    "mmc": {"CWC": True, "CLC": False, "SPP": True, "EMC": True},
    "weak-dodgson": {"CWC": True, "CLC": False, "SPP": True, "EMC": True},
    "dodgson": {"CWC": True, "CLC": False, "SPP": False, "EMC": False},
    "copeland": {"CWC": True, "CLC": True, "SPP": False, "EMC": False},
    "stv": {"CWC": False, "CLC": False, "SPP": False, "EMC": False},
    "borda": {"CWC": False, "CLC": False, "SPP": False, "EMC": False},
}

#: cells whose "holds" side has no in-text argument; reported, never asserted
UNPROVEN_HOLDS_CELLS = (("dodgson", "CWC"),)


def canonical_axis(m: int) -> Axis:
    if m > len(string.ascii_lowercase):
        raise DomainError("canonical axis supports at most 26 candidates")
    return Axis(tuple(string.ascii_lowercase[:m]))


def _profile(axis: Axis, spec: list[tuple[int, str]]) -> Profile:
    rankings: list[Ranking] = []
    for count, compact in spec:
        rankings.extend([Ranking(tuple(compact))] * count)
    return Profile(axis.candidates, tuple(rankings))


def _fixture(axis_str: str, spec: list[tuple[int, str]]) -> tuple[Axis, Profile]:
    axis = Axis(tuple(axis_str))
    return axis, _profile(axis, spec)


#: fixed counterexample profiles, keyed by (rule, property)
PAPER_WITNESSES: Mapping[tuple[str, str], tuple[tuple[Axis, Profile], ...]] = {
    ("mmc", "CLC"): (_fixture("abcd", [(1, "abcd"), (2, "bcda")]),),
    ("dodgson", "CLC"): (_fixture("abcd", [(1, "abcd"), (2, "bcda")]),),
    ("weak-dodgson", "CLC"): (_fixture("abcd", [(1, "abcd"), (2, "bcda")]),),
    ("dodgson", "SPP"): (
        _fixture("abcde", [(1, "abcde"), (2, "bacde"), (2, "decba"), (1, "edcba")]),
    ),
    ("copeland", "SPP"): (
        _fixture("abcde", [(1, "abcde"), (2, "bacde"), (2, "decba"), (1, "edcba")]),
    ),
    ("borda", "SPP"): (_fixture("abcd", [(3, "abcd"), (2, "cdba")]),),
    ("stv", "SPP"): (_fixture("abc", [(1, "abc"), (2, "cba")]),),
    ("borda", "EMC"): (_fixture("abc", [(4, "abc"), (1, "bac"), (2, "bca")]),),
}

#: a Kemeny winner supported by no voter: the majority-consistency converse fails
KEMENY_MAJORITY_CONVERSE_EXAMPLE = (
    *_fixture("abc", [(2, "abc"), (1, "bca"), (1, "cba")]),
    Ranking(("b", "a", "c")),
)


@dataclass(frozen=True)
class Witness:
    axis: Axis
    profile: Profile
    detail: Mapping[str, object]


@dataclass(frozen=True)
class PropertyVerdict:
    rule: str
    prop: str
    status: str
    witness: Witness | None
    source: str | None  # "search" or "paper-witness" when refuted
    searched: tuple[tuple[int, int, int], ...]  # (m, n, profile count) cells

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED


def iter_sp_profiles(m: int, n: int) -> Iterator[tuple[Axis, Profile]]:
    """Every single-peaked profile with exactly n voters on the canonical axis,
    enumerated as multisets in the canonical ranking order."""
    axis = canonical_axis(m)
    seq = enumerate_sp_rankings(axis).rankings
    for combo in combinations_with_replacement(range(len(seq)), n):
        yield axis, Profile(axis.candidates, tuple(seq[i] for i in combo))


def sp_profile_count(m: int, n: int) -> int:
    return comb(2 ** (m - 1) + n - 1, n)


def violation_given(
    outcome: RuleOutcome, prop: str, profile: Profile, axis: Axis
) -> dict[str, object] | None:
    """The offending detail if the outcome violates the property, else None."""
    if prop == "SPP":
        if not outcome.sp_winners(axis):
            return {
                "reason": "no winning ranking is single-peaked",
                "scores": dict(outcome.score_trace.get("scores", {})),
            }
        return None
    if prop == "CWC":
        weak = condorcet_winners(profile).weak
        if weak:
            bad = outcome.top_candidates() - weak
            if bad:
                return {
                    "reason": "a winning ranking tops a non-Condorcet-winner",
                    "offending_top": tuple(sorted(bad)),
                    "weak_condorcet_winners": tuple(sorted(weak)),
                }
        return None
    if prop == "CLC":
        weak = condorcet_losers(profile).weak
        if weak:
            bad = outcome.bottom_candidates() - weak
            if bad:
                return {
                    "reason": "a winning ranking bottoms a non-Condorcet-loser",
                    "offending_bottom": tuple(sorted(bad)),
                    "weak_condorcet_losers": tuple(sorted(weak)),
                }
        return None
    if prop == "EMC":
        for side, extreme in (("up", axis.extreme_up), ("down", axis.extreme_down)):
            member = outcome.contains(extreme)
            majority = 2 * profile.count_of(extreme) >= profile.n
            if member != majority:
                return {
                    "reason": "extreme membership and weak majority disagree",
                    "extreme": side,
                    "in_winners": member,
                    "weak_majority": majority,
                }
        return None
    raise DomainError(f"unknown property {prop!r}; choose from {PROPERTIES}")


def find_violation(
    rule: str, prop: str, profile: Profile, axis: Axis
) -> dict[str, object] | None:
    return violation_given(apply_rule(rule, profile), prop, profile, axis)


def verify_witness(rule: str, prop: str, witness: Witness) -> bool:
    """Re-run the rule on the stored profile and confirm the violation."""
    return find_violation(rule, prop, witness.profile, witness.axis) is not None


def check_property(rule: str, prop: str, m: int, n: int) -> PropertyVerdict:
    """Exhaustive check over all SP profiles with exactly n voters, m candidates."""
    if rule not in TABLE1_RULES:
        raise DomainError(f"unknown rule {rule!r}; choose from {TABLE1_RULES}")
    cell = (m, n, sp_profile_count(m, n))
    for axis, profile in iter_sp_profiles(m, n):
        detail = find_violation(rule, prop, profile, axis)
        if detail is not None:
            return PropertyVerdict(
                rule, prop, REFUTED, Witness(axis, profile, detail), "search", (cell,)
            )
    return PropertyVerdict(rule, prop, HOLDS, None, None, (cell,))


def check_spp(rule: str, m: int, n: int) -> PropertyVerdict:
    return check_property(rule, "SPP", m, n)


def check_cwc(rule: str, m: int, n: int) -> PropertyVerdict:
    return check_property(rule, "CWC", m, n)


def check_clc(rule: str, m: int, n: int) -> PropertyVerdict:
    return check_property(rule, "CLC", m, n)


def check_emc(rule: str, m: int, n: int) -> PropertyVerdict:
    return check_property(rule, "EMC", m, n)


def paper_witness_verdict(rule: str, prop: str) -> PropertyVerdict | None:
    """Verdict from the fixed counterexample profiles, if any are registered."""
    fixtures = PAPER_WITNESSES.get((rule, prop))
    if not fixtures:
        return None
    for axis, profile in fixtures:
        detail = find_violation(rule, prop, profile, axis)
        if detail is not None:
            return PropertyVerdict(
                rule,
                prop,
                REFUTED,
                Witness(axis, profile, detail),
                "paper-witness",
                (),
            )
    return None


def search_property(
    rule: str,
    prop: str,
    max_m: int,
    max_n: int,
    *,
    include_witnesses: bool = False,
) -> PropertyVerdict:
    """Sweep the whole (m <= max_m, n <= max_n) grid, smallest profiles first.

    The first violation in this deterministic order becomes the witness; if
    the search finds none and include_witnesses is set, the registered fixed
    profiles are consulted before concluding holds-on-searched-space.
    """
    cells = []
    for m in range(1, max_m + 1):
        for n in range(1, max_n + 1):
            verdict = check_property(rule, prop, m, n)
            cells.append(verdict.searched[0])
            if verdict.refuted:
                return PropertyVerdict(
                    rule, prop, REFUTED, verdict.witness, "search", tuple(cells)
                )
    if include_witnesses:
        from_witness = paper_witness_verdict(rule, prop)
        if from_witness is not None:
            return PropertyVerdict(
                rule, prop, REFUTED, from_witness.witness, "paper-witness", tuple(cells)
            )
    return PropertyVerdict(rule, prop, HOLDS, None, None, tuple(cells))


def check_kemeny_majority(m: int, n: int) -> PropertyVerdict:
    """Any opinion held by a weak majority must be a Kemeny winner.

    Exhaustive over the exact (m, n) cell. The converse direction fails; the
    module-level KEMENY_MAJORITY_CONVERSE_EXAMPLE exhibits a Kemeny winner no
    voter supports.
    """
    cell = (m, n, sp_profile_count(m, n))
    for axis, profile in iter_sp_profiles(m, n):
        outcome = kemeny(profile)
        for ranking, count in profile.counts().items():
            if 2 * count >= profile.n and not outcome.contains(ranking):
                detail = {
                    "reason": "a weak-majority opinion is not a Kemeny winner",
                    "opinion": ranking,
                    "count": count,
                }
                return PropertyVerdict(
                    "kemeny",
                    "majority",
                    REFUTED,
                    Witness(axis, profile, detail),
                    "search",
                    (cell,),
                )
    return PropertyVerdict("kemeny", "majority", HOLDS, None, None, (cell,))


@dataclass(frozen=True)
class Table1Report:
    max_m: int
    max_n: int
    include_witnesses: bool
    verdicts: tuple[PropertyVerdict, ...]

    def verdict(self, rule: str, prop: str) -> PropertyVerdict:
        for v in self.verdicts:
            if v.rule == rule and v.prop == prop:
                return v
        raise KeyError((rule, prop))

    def mismatches(self) -> tuple[tuple[str, str, bool, bool], ...]:
        """Cells disagreeing with the expected table: (rule, prop, expected_holds, got_holds)."""
        out = []
        for v in self.verdicts:
            expected = EXPECTED_TABLE1[v.rule][v.prop]
            got = not v.refuted
            if expected != got:
                out.append((v.rule, v.prop, expected, got))
        return tuple(out)

    @property
    def matches_expected(self) -> bool:
        return not self.mismatches()


def table1_report(max_m: int, max_n: int, *, paper_witnesses: bool = True) -> Table1Report:
    """Certify every rule-property cell over the (m, n) grid plus fixtures.

    Shares one rule evaluation per profile across the four properties, so the
    whole table costs one sweep per rule.
    """
    verdicts: list[PropertyVerdict] = []
    for rule in TABLE1_RULES:
        pending = {p: True for p in PROPERTIES}
        found: dict[str, PropertyVerdict] = {}
        cells = []
        for m in range(1, max_m + 1):
            for n in range(1, max_n + 1):
                cells.append((m, n, sp_profile_count(m, n)))
                if not any(pending.values()):
                    continue
                for axis, profile in iter_sp_profiles(m, n):
                    outcome = apply_rule(rule, profile)
                    for prop in PROPERTIES:
                        if not pending[prop]:
                            continue
                        detail = violation_given(outcome, prop, profile, axis)
                        if detail is not None:
                            pending[prop] = False
                            found[prop] = PropertyVerdict(
                                rule,
                                prop,
                                REFUTED,
                                Witness(axis, profile, detail),
                                "search",
                                ((m, n, sp_profile_count(m, n)),),
                            )
                    if not any(pending.values()):
                        break
        for prop in PROPERTIES:
            if prop in found:
                verdicts.append(found[prop])
                continue
            if paper_witnesses:
                from_witness = paper_witness_verdict(rule, prop)
                if from_witness is not None:
                    verdicts.append(from_witness)
                    continue
            verdicts.append(
                PropertyVerdict(rule, prop, HOLDS, None, None, tuple(cells))
            )
    return Table1Report(max_m, max_n, paper_witnesses, tuple(verdicts))
