"""Property certifiers: fixed witnesses, exhaustive verdicts, determinism."""

from __future__ import annotations

import pytest

from peakflow.properties import (
    EXPECTED_TABLE1,
    KEMENY_MAJORITY_CONVERSE_EXAMPLE,
    PAPER_WITNESSES,
    PROPERTIES,
    TABLE1_RULES,
    check_clc,
    check_cwc,
    check_emc,
    check_kemeny_majority,
    check_property,
    check_spp,
    find_violation,
    iter_sp_profiles,
    paper_witness_verdict,
    sp_profile_count,
    search_property,
    table1_report,
    verify_witness,
)
from peakflow.rules import kemeny

from helpers import R


def test_every_registered_paper_witness_violates_its_cell():
    for (rule, prop), fixtures in PAPER_WITNESSES.items():
        for axis, profile in fixtures:
            assert find_violation(rule, prop, profile, axis) is not None, (rule, prop)
        verdict = paper_witness_verdict(rule, prop)
        assert verdict is not None and verdict.refuted
        assert verify_witness(rule, prop, verdict.witness)


def test_mmc_clc_refuted_with_the_fixed_profile_in_reach_of_search():
    verdict = search_property("mmc", "CLC", 4, 3)
    assert verdict.refuted and verdict.source == "search"
    assert verify_witness("mmc", "CLC", verdict.witness)


def test_weak_dodgson_clc_fixture_detail():
    verdict = paper_witness_verdict("weak-dodgson", "CLC")
    assert verdict.witness.profile.count_of(R("bcda")) == 2
    assert verdict.witness.detail["weak_condorcet_losers"] == ("a",)
    assert "d" in verdict.witness.detail["offending_bottom"]


def test_spp_holds_for_mmc_at_search_scale():
    assert not check_spp("mmc", 4, 4).refuted


def test_borda_spp_holds_for_three_candidates():
    for n in range(1, 7):
        assert not check_spp("borda", 3, n).refuted


def test_borda_spp_refuted_only_by_witness_at_small_n():
    assert not check_spp("borda", 4, 4).refuted
    verdict = search_property("borda", "SPP", 4, 4, include_witnesses=True)
    assert verdict.refuted and verdict.source == "paper-witness"


def test_weak_dodgson_spp_and_emc_hold_at_search_scale():
    for prop in ("SPP", "EMC"):
        assert not search_property("weak-dodgson", prop, 4, 4).refuted


def test_kemeny_clc_holds():
    assert not check_clc("kemeny", 4, 3).refuted


def test_emc_holds_and_fails_matching_expected_column():
    for rule in TABLE1_RULES:
        verdict = search_property(rule, "EMC", 3, 4)
        assert verdict.refuted == (not EXPECTED_TABLE1[rule]["EMC"]), rule


def test_check_property_determinism():
    a = search_property("stv", "CWC", 3, 4)
    b = search_property("stv", "CWC", 3, 4)
    assert a == b
    assert a.refuted
    assert a.witness.profile == b.witness.profile


def test_searched_cell_counts():
    assert sp_profile_count(3, 2) == 10
    assert sum(1 for _ in iter_sp_profiles(3, 2)) == 10
    verdict = check_cwc("kemeny", 3, 2)
    assert verdict.searched == ((3, 2, 10),)


def test_check_emc_exact_cell():
    assert check_emc("borda", 3, 2).refuted
    assert not check_emc("kemeny", 3, 2).refuted


def test_kemeny_majority_check_and_converse_example():
    assert not check_kemeny_majority(3, 4).refuted
    axis, profile, winner = KEMENY_MAJORITY_CONVERSE_EXAMPLE
    outcome = kemeny(profile)
    assert outcome.contains(winner)
    assert profile.count_of(winner) == 0


def test_unknown_property_rejected():
    with pytest.raises(Exception):
        check_property("kemeny", "XYZ", 3, 2)


def test_table1_small_grid_structure():
    rep = table1_report(3, 3, paper_witnesses=True)
    assert len(rep.verdicts) == len(TABLE1_RULES) * len(PROPERTIES)
    # Borda SPP holds for m = 3 search but the m = 4 witness still refutes it
    assert rep.verdict("borda", "SPP").refuted
    assert rep.verdict("borda", "SPP").source == "paper-witness"
    # STV already refutable inside the tiny grid
    assert rep.verdict("stv", "SPP").refuted
    assert rep.verdict("stv", "SPP").source == "search"
    assert rep.matches_expected
    # the STV and Borda Condorcet-winner refutations need three voters
    small = table1_report(3, 2, paper_witnesses=True)
    assert not small.matches_expected
    assert ("stv", "CWC", False, True) in small.mismatches()


def test_table1_full_grid_matches_expected():
    rep = table1_report(4, 4, paper_witnesses=True)
    assert rep.matches_expected, rep.mismatches()
    for verdict in rep.verdicts:
        if verdict.refuted:
            assert verify_witness(verdict.rule, verdict.prop, verdict.witness)
