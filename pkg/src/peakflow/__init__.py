"""Opinion diffusion for single-peaked preference rankings on undirected networks."""

from .core import (
    Axis,
    CapacityError,
    CondorcetSet,
    DomainError,
    MajorityTable,
    Profile,
    Ranking,
    SPRankingSequence,
    condorcet_losers,
    condorcet_winners,
    enumerate_sp_rankings,
    is_single_peaked,
    is_sp_profile,
    kendall_tau,
    majority_table,
    median_peak_winners,
)
from .rules import (
    EMC_RULES,
    RULE_NAMES,
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
from .diffusion import (
    PotentialTracker,
    PreferenceNetwork,
    RunResult,
    UpdateEvent,
    detect_update_cycle,
    edge_kt_potential,
    is_stable,
    kemeny_step_bound,
    peak_distance_potential,
    pending_update,
    run,
    stable_state,
    swap_update_closure,
    update_step,
)
from .spread import (
    SPREAD_RULES,
    SpreadResult,
    brute_force_spread,
    emc_witness,
    greedy_spread,
)
from .properties import (
    EXPECTED_TABLE1,
    PROPERTIES,
    TABLE1_RULES,
    PropertyVerdict,
    check_clc,
    check_cwc,
    check_emc,
    check_kemeny_majority,
    check_spp,
    search_property,
    table1_report,
)
from .generate import generate_network, generate_sp_profile
from .formats import parse_network, parse_profile, serialize_network, serialize_profile

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "CapacityError",
    "CondorcetSet",
    "DomainError",
    "EMC_RULES",
    "EXPECTED_TABLE1",
    "MajorityTable",
    "PROPERTIES",
    "PotentialTracker",
    "PreferenceNetwork",
    "Profile",
    "PropertyVerdict",
    "RULE_NAMES",
    "Ranking",
    "RuleOutcome",
    "RunResult",
    "SPRankingSequence",
    "SPREAD_RULES",
    "SpreadResult",
    "TABLE1_RULES",
    "TieBreakContext",
    "UpdateEvent",
    "apply_rule",
    "borda",
    "brute_force_spread",
    "check_clc",
    "check_cwc",
    "check_emc",
    "check_kemeny_majority",
    "check_spp",
    "condorcet_losers",
    "condorcet_winners",
    "copeland",
    "detect_update_cycle",
    "dodgson",
    "edge_kt_potential",
    "emc_witness",
    "enumerate_sp_rankings",
    "generate_network",
    "generate_sp_profile",
    "greedy_spread",
    "is_single_peaked",
    "is_sp_profile",
    "is_stable",
    "kemeny",
    "kemeny_sp",
    "kemeny_step_bound",
    "kendall_tau",
    "majority_table",
    "median_peak_winners",
    "mmc",
    "parse_network",
    "parse_profile",
    "peak_distance_potential",
    "pending_update",
    "run",
    "search_property",
    "serialize_network",
    "serialize_profile",
    "stable_state",
    "stv_ranking",
    "swap_update_closure",
    "table1_report",
    "tie_break",
    "update_step",
    "weak_dodgson",
]
