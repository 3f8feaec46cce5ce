"""Ranking rules: fixed examples, refinement semantics, oracles, tie-breaking."""

from __future__ import annotations

import random
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peakflow.core import (
    CapacityError,
    DomainError,
    Profile,
    Ranking,
    condorcet_winners,
    enumerate_sp_rankings,
    is_single_peaked,
    kendall_tau,
)
from peakflow.rules import (
    RuleOutcome,
    TieBreakContext,
    apply_rule,
    borda,
    copeland,
    dodgson,
    kemeny,
    kemeny_sp,
    mmc,
    stv_ranking,
    tie_break,
    weak_dodgson,
)

from helpers import A, P, R, canonical_axis, iter_sp_profiles_grid, swap_distance_oracle

ALL_RULES = ("kemeny", "mmc", "borda", "copeland", "dodgson", "weak-dodgson", "stv")


def scores_of(outcome: RuleOutcome) -> dict[str, float]:
    return dict(outcome.score_trace["scores"])


# --- fixed score examples


def test_mmc_scores_on_loser_inconsistency_profile():
    out = mmc(P("abcd", "2*bcda"))
    assert scores_of(out) == {"a": 1, "b": -1, "c": 3, "d": 3}
    assert out.winners == {R("bacd"), R("badc")}


def test_borda_scores_fixed_examples():
    out = borda(P("3*abcd", "2*cdba"))
    assert scores_of(out) == {"a": 9, "b": 8, "c": 9, "d": 4}
    assert out.winners == {R("cabd"), R("acbd")}
    out2 = borda(P("4*abc", "bac", "2*bca"))
    assert scores_of(out2) == {"a": 9, "b": 10, "c": 2}
    assert out2.winners == {R("bac")}


def test_copeland_scores_fixed_example():
    out = copeland(P("abcde", "2*bacde", "2*decba", "edcba"))
    assert scores_of(out) == {"a": 1.5, "b": 2.5, "c": 2.0, "d": 2.5, "e": 1.5}


def test_dodgson_scores_fixed_examples():
    out = dodgson(P("abcde", "2*bacde", "2*decba", "edcba"))
    assert scores_of(out) == {"a": 6, "b": 3, "c": 4, "d": 3, "e": 6}
    profile = P("abcd", "2*bcda")
    assert scores_of(dodgson(profile)) == {"a": 3, "b": 0, "c": 2, "d": 4}
    assert scores_of(weak_dodgson(profile)) == {"a": 3, "b": 0, "c": 2, "d": 4}


def test_dodgson_zero_for_strict_condorcet_winner():
    profile = P("2*abc", "bac")
    assert condorcet_winners(profile).strict == "a"
    assert scores_of(dodgson(profile))["a"] == 0
    assert scores_of(weak_dodgson(profile))["a"] == 0


def test_stv_fixed_example_and_branching():
    out = stv_ranking(P("abc", "2*cba"))
    assert out.winners == {R("cab")}
    # distinct plurality scores at every round leave no branching anywhere
    out2 = stv_ranking(P("4*abc", "2*bca", "cba"))
    assert out2.winners == {R("abc")}
    # an all-way first-round tie branches
    out3 = stv_ranking(P("abc", "bca", "cba"))
    assert len(out3.winners) > 1


def test_kemeny_fixed_example():
    out = kemeny(P("2*abc", "bca", "cba"))
    assert R("bac") in out.winners
    assert out.winners == {R("abc"), R("bac"), R("bca")}


def test_kemeny_symmetric_profile_brute_force():
    out = kemeny(P("abc", "cba"))
    assert out.winners == frozenset(Ranking(p) for p in permutations("abc"))
    rev = kemeny(P("cba", "abc"))
    assert rev.winners == out.winners


def test_unanimity_across_rules():
    """A unanimous profile makes the shared opinion win.

    Kemeny, Borda, Copeland and both Dodgson variants single it out. MMC's
    worst-defeat scores tie the two least preferred candidates and STV
    branches on the zero-vote plurality tie, so for those the shared opinion
    is among the winners and tie-breaking against it returns it unchanged.
    """
    profile = P("3*bac")
    axis = canonical_axis(3)
    ctx = TieBreakContext(axis, R("bac"))
    for rule in ("kemeny", "borda", "copeland", "dodgson", "weak-dodgson"):
        out = apply_rule(rule, profile, axis)
        assert out.winners == {R("bac")}, rule
    for rule in ("mmc", "stv"):
        out = apply_rule(rule, profile, axis)
        assert R("bac") in out.winners
        assert tie_break(out, ctx) == R("bac")
    assert scores_of(mmc(profile)) == {"b": -3, "a": 3, "c": 3}
    assert stv_ranking(profile).winners == {R("bac"), R("bca")}


def test_empty_profile_rejected():
    empty = Profile(("a", "b"), ())
    for rule in ALL_RULES:
        with pytest.raises(DomainError):
            apply_rule(rule, empty)


def test_capacity_errors():
    big = Profile(tuple("abcdefghi"), (Ranking(tuple("abcdefghi")),))
    with pytest.raises(CapacityError):
        kemeny(big)
    seven = Profile(tuple("abcdefg"), (Ranking(tuple("abcdefg")),))
    with pytest.raises(CapacityError):
        dodgson(seven)


# --- refinement semantics of score rules


def test_refinement_winner_sets_and_contains():
    out = mmc(P("abcd", "2*bcda"))  # groups: b | a | c,d
    assert out.winner_count() == 2
    assert out.contains(R("bacd")) and out.contains(R("badc"))
    assert not out.contains(R("abcd"))
    assert out.top_candidates() == {"b"}
    assert out.bottom_candidates() == {"c", "d"}


def test_refinement_cap():
    # all candidates tied -> 8! refinements exceeds the cap
    profile = Profile(tuple("abcdefgh"), (Ranking(tuple("abcdefgh")), Ranking(tuple("hgfedcba"))))
    out = borda(profile)
    assert out.winner_count() == 40320
    with pytest.raises(CapacityError):
        out.winners
    # symbolic accessors still work
    assert out.contains(Ranking(tuple("abcdefgh")))
    assert len(out.sp_winners(canonical_axis(8))) == 2 ** 7


# --- kemeny_sp versus the brute-force oracle


def test_kemeny_sp_equals_brute_force_intersection_small():
    for axis, profile in iter_sp_profiles_grid(4, 3):
        brute = kemeny(profile).winners
        fast = kemeny_sp(profile, axis).winners
        expected = frozenset(r for r in brute if is_single_peaked(r, axis))
        assert fast == expected, f"mismatch on {[str(r) for r in profile.rankings]}"
        assert fast <= brute


def test_kemeny_sp_rejects_non_sp_profile():
    with pytest.raises(DomainError):
        kemeny_sp(P("acb"), A("abc"))


def test_kemeny_sp_fixed_example():
    out = kemeny_sp(P("2*abc", "bca", "cba"), A("abc"))
    assert R("bac") in out.winners


def test_kemeny_selector_uses_sp_fast_path_beyond_brute_cap():
    m = 9
    axis = canonical_axis(m)
    up = Ranking(axis.candidates)
    profile = Profile(axis.candidates, (up, up, up.reversed()))
    with pytest.raises(CapacityError):
        kemeny(profile)
    out = apply_rule("kemeny", profile, axis)
    assert up in out.winners


# --- anonymity and neutrality


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_score_rules_anonymous_and_neutral(data):
    m = data.draw(st.integers(2, 4))
    letters = "abcd"[:m]
    n = data.draw(st.integers(1, 5))
    rankings = [
        Ranking(tuple(data.draw(st.permutations(list(letters))))) for _ in range(n)
    ]
    profile = Profile(tuple(letters), tuple(rankings))
    rule = data.draw(st.sampled_from(["mmc", "borda", "copeland", "dodgson", "weak-dodgson"]))
    out = apply_rule(rule, profile)

    shuffled = list(rankings)
    random.Random(data.draw(st.integers(0, 10))).shuffle(shuffled)
    assert scores_of(apply_rule(rule, Profile(tuple(letters), tuple(shuffled)))) == scores_of(out)

    relabel = dict(zip(letters, data.draw(st.permutations(list(letters)))))
    relabeled = Profile(
        tuple(letters),
        tuple(Ranking(tuple(relabel[c] for c in r.order)) for r in rankings),
    )
    relabeled_scores = scores_of(apply_rule(rule, relabeled))
    assert relabeled_scores == {relabel[c]: s for c, s in scores_of(out).items()}


# --- Condorcet winner consistency on profiles with a strict winner


def test_rules_top_strict_condorcet_winner_exhaustive():
    """Kemeny, MMC, Copeland and both Dodgson variants put a strict Condorcet
    winner first in every winning ranking (SP profiles, m <= 4, n <= 4)."""
    for axis, profile in iter_sp_profiles_grid(4, 4):
        strict = condorcet_winners(profile).strict
        if strict is None:
            continue
        for rule in ("kemeny", "mmc", "copeland", "dodgson", "weak-dodgson"):
            tops = apply_rule(rule, profile).top_candidates()
            assert tops == {strict}, (rule, [str(r) for r in profile.rankings])


# --- Dodgson lift scores versus the raw swap-sequence oracle


def test_dodgson_scores_match_swap_oracle_small():
    for axis, profile in iter_sp_profiles_grid(3, 3):
        ds = scores_of(dodgson(profile))
        mds = scores_of(weak_dodgson(profile))
        for c in profile.candidates:
            assert ds[c] == swap_distance_oracle(profile, c, weak=False)
            assert mds[c] == swap_distance_oracle(profile, c, weak=True)


def test_dodgson_oracle_on_paper_profile():
    profile = P("abcd", "2*bcda")
    for c, expected in {"a": 3, "b": 0, "c": 2, "d": 4}.items():
        assert swap_distance_oracle(profile, c, weak=False) == expected


# --- tie-breaking


def test_tie_break_keeps_current_opinion_when_winning():
    ctx = TieBreakContext(A("abc"), R("bac"))
    out = RuleOutcome.from_rankings([R("bac"), R("abc"), R("cba")])
    assert tie_break(out, ctx) == R("bac")


def test_tie_break_minimizes_distance_to_current():
    ctx = TieBreakContext(A("abc"), R("bac"))
    out = RuleOutcome.from_rankings([R("abc"), R("cba")])
    assert tie_break(out, ctx) == R("abc")


def test_tie_break_skips_sp_stage_when_no_winner_is_sp():
    axis = A("abcd")
    ctx = TieBreakContext(axis, R("abcd"))
    out = RuleOutcome.from_rankings([R("acbd"), R("adbc")])
    assert not out.sp_winners(axis)
    assert tie_break(out, ctx) == R("acbd")  # kt 1 beats kt 2


def test_tie_break_lexicographic_last_resort():
    axis = A("abc")
    # both winners at kt distance 1 from the current opinion
    ctx = TieBreakContext(axis, R("bac"))
    out = RuleOutcome.from_rankings([R("abc"), R("bca")])
    assert kendall_tau(R("abc"), R("bac")) == kendall_tau(R("bca"), R("bac"))
    assert tie_break(out, ctx) == R("abc")


def test_tie_break_symbolic_matches_materialized():
    axis = canonical_axis(4)
    rng = random.Random(7)
    seq = enumerate_sp_rankings(axis).rankings
    for _ in range(50):
        rankings = [seq[rng.randrange(len(seq))] for _ in range(rng.randint(1, 5))]
        profile = Profile(axis.candidates, tuple(rankings))
        current = seq[rng.randrange(len(seq))]
        ctx = TieBreakContext(axis, current)
        out = mmc(profile)
        materialized = RuleOutcome.from_rankings(out.winners, trace=out.score_trace)
        assert tie_break(out, ctx) == tie_break(materialized, ctx)


def test_tie_break_deterministic():
    ctx = TieBreakContext(A("abc"), R("cba"))
    out = mmc(P("abc", "cba"))
    assert tie_break(out, ctx) == tie_break(out, ctx)
