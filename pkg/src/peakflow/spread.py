"""Maximally spreading an extreme opinion through a preference network.

The greedy sequence runs three phases: (1) update every voter whose
tie-broken update already is the target extreme opinion, to fixpoint;
(2) update every non-stable voter currently holding the target, to fixpoint;
(3) stabilize the rest. For extremist-majority-consistent converging rules
the target-holder set after phase 2 is optimal and phase 3 never touches it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .core import Axis, CapacityError, DomainError, Profile, Ranking, is_sp_profile
from .diffusion import (
    DEFAULT_STEP_CAP,
    PotentialTracker,
    PreferenceNetwork,
    default_potential_kind,
    pending_update,
)
from .rules import EMC_RULES, TieBreakContext, apply_rule, tie_break

SPREAD_RULES = ("kemeny", "mmc", "weak-dodgson")
ORACLE_MAX_VOTERS = 6
ORACLE_MAX_M = 4


@dataclass(frozen=True)
class SpreadEvent:
    phase: int
    step: int
    voter: str
    before: Ranking
    after: Ranking
    potential_before: int
    potential_after: int


@dataclass(frozen=True)
class SpreadResult:
    target: Ranking
    events: tuple[SpreadEvent, ...]
    v_star: frozenset[str]
    final: PreferenceNetwork
    converged: bool
    rule_evaluations: int = 0

    @property
    def sequence(self) -> tuple[tuple[int, str], ...]:
        return tuple((e.phase, e.voter) for e in self.events)

    @property
    def phase12_changes(self) -> int:
        return sum(1 for e in self.events if e.phase in (1, 2))

    @property
    def final_target_holders(self) -> frozenset[str]:
        return frozenset(
            v for v in self.final.voters if self.final.opinion(v) == self.target
        )


def emc_witness(rule: str, profile: Profile, target: Ranking) -> bool:
    """Whether the target extreme opinion is among the rule's winners.

    Cross-checks the membership against the weak-majority count; for rules
    that are extremist majority consistent on single-peaked profiles the two
    must agree, and a disagreement raises immediately.
    """
    axis = Axis(target.order)
    outcome = apply_rule(rule, profile, axis)
    member = outcome.contains(target)
    weak_majority = 2 * profile.count_of(target) >= profile.n
    if rule in EMC_RULES and is_sp_profile(profile, axis) and member != weak_majority:
        raise RuntimeError(
            f"{rule} broke extremist majority consistency on {[str(r) for r in profile.rankings]}"
        )
    return member


def _resolve_target(net: PreferenceNetwork, target: Ranking | str) -> Ranking:
    if isinstance(target, str):
        if target == "up":
            return net.axis.extreme_up
        if target == "down":
            return net.axis.extreme_down
        raise DomainError("target must be 'up', 'down', or an extreme Ranking")
    if target not in (net.axis.extreme_up, net.axis.extreme_down):
        raise DomainError("only the two extreme opinions can be spread")
    return target


class _SpreadEngine:
    def __init__(self, net: PreferenceNetwork, rule: str, tracker: PotentialTracker):
        self.net = net
        self.rule = rule
        self.tracker = tracker
        self.events: list[SpreadEvent] = []
        self.rule_evaluations = 0
        self._pending: dict[str, Ranking] = {}

    def pending(self, voter: str) -> Ranking:
        if voter not in self._pending:
            self.rule_evaluations += 1
            self._pending[voter] = pending_update(self.net, voter, self.rule)
        return self._pending[voter]

    def apply(self, voter: str, phase: int) -> None:
        before = self.net.opinion(voter)
        after = self.pending(voter)
        pot_before = self.tracker.value(self.net)
        local_before = self.tracker.local(self.net, voter)
        self.net = self.net.with_opinion(voter, after)
        pot_after = pot_before - local_before + self.tracker.local(self.net, voter)
        for u in (voter, *self.net.neighbors(voter)):
            self._pending.pop(u, None)
        self.events.append(
            SpreadEvent(phase, len(self.events), voter, before, after, pot_before, pot_after)
        )


def greedy_spread(
    net: PreferenceNetwork,
    rule: str,
    target: Ranking | str,
    *,
    voter_order: tuple[str, ...] | None = None,
    phase3_max_steps: int = DEFAULT_STEP_CAP,
) -> SpreadResult:
    """Run the three-phase greedy sequence for one extreme opinion.

    Activation order within a phase is ascending voter id unless an explicit
    order is given; the resulting target-holder set does not depend on it.
    Phase 3 only ever activates voters holding a non-target opinion, and for
    weak-dodgson (no convergence theorem) it stops at the step cap, flagging
    the result as non-converged.
    """
    if not net.sp_mode:
        raise DomainError("greedy_spread requires a single-peaked network")
    if rule not in SPREAD_RULES:
        raise DomainError(f"greedy_spread supports {SPREAD_RULES}, not {rule!r}")
    goal = _resolve_target(net, target)
    if voter_order is None:
        order = tuple(sorted(net.voters))
    else:
        if sorted(voter_order) != sorted(net.voters):
            raise DomainError("voter_order must be a permutation of the voters")
        order = tuple(voter_order)
    tracker = PotentialTracker(default_potential_kind(rule))
    engine = _SpreadEngine(net, rule, tracker)

    # phase 1: pull everyone whose tie-broken update is already the target
    changed = True
    while changed:
        changed = False
        for v in order:
            if engine.net.opinion(v) != goal and engine.pending(v) == goal:
                emc_witness(rule, engine.net.neighborhood_profile(v), goal)
                engine.apply(v, 1)
                changed = True

    # phase 2: let every non-stable target holder fall away
    changed = True
    while changed:
        changed = False
        for v in order:
            if engine.net.opinion(v) == goal and engine.pending(v) != goal:
                engine.apply(v, 2)
                changed = True

    v_star = frozenset(v for v in order if engine.net.opinion(v) == goal)

    # phase 3: stabilize the remaining voters (never the target holders)
    phase3_steps = 0
    converged = True
    while True:
        active = [
            v
            for v in order
            if engine.net.opinion(v) != goal and engine.pending(v) != engine.net.opinion(v)
        ]
        if not active:
            break
        if phase3_steps >= phase3_max_steps:
            converged = False
            break
        engine.apply(active[0], 3)
        phase3_steps += 1

    if converged:
        # a stable network also needs every target holder stable
        converged = all(engine.pending(v) == engine.net.opinion(v) for v in order)

    return SpreadResult(
        target=goal,
        events=tuple(engine.events),
        v_star=v_star,
        final=engine.net,
        converged=converged,
        rule_evaluations=engine.rule_evaluations,
    )


def brute_force_spread(
    net: PreferenceNetwork,
    rule: str,
    target: Ranking | str,
    *,
    max_states: int = 500_000,
) -> int:
    """Exhaustive reachability oracle for the spread optimum.

    Breadth-first search over full opinion assignments under tie-broken
    updates of non-stable voters. Returns the largest number of target
    holders over all reachable states in which every target holder is stable.
    """
    if not net.sp_mode:
        raise DomainError("brute_force_spread requires a single-peaked network")
    if rule not in SPREAD_RULES:
        raise DomainError(f"brute_force_spread supports {SPREAD_RULES}, not {rule!r}")
    if len(net.voters) > ORACLE_MAX_VOTERS or net.axis.m > ORACLE_MAX_M:
        raise CapacityError(
            f"oracle capped at {ORACLE_MAX_VOTERS} voters and {ORACLE_MAX_M} candidates"
        )
    goal = _resolve_target(net, target)
    voters = net.voters
    neighbor_idx = {v: tuple(net._index[u] for u in net.neighbors(v)) for v in voters}

    update_memo: dict[tuple[Ranking, tuple[Ranking, ...]], Ranking] = {}

    def pending_of(state: tuple[Ranking, ...], i: int) -> Ranking:
        idxs = neighbor_idx[voters[i]]
        if not idxs:
            return state[i]
        key = (state[i], tuple(sorted((state[j] for j in idxs), key=lambda r: r.order)))
        if key not in update_memo:
            profile = Profile(net.axis.candidates, tuple(state[j] for j in idxs))
            outcome = apply_rule(rule, profile, net.axis)
            update_memo[key] = tie_break(outcome, TieBreakContext(net.axis, state[i]))
        return update_memo[key]

    start = net.assignment()
    best = -1
    seen = {start}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        pendings = [pending_of(state, i) for i in range(len(voters))]
        nonstable = [i for i in range(len(voters)) if pendings[i] != state[i]]
        holders = [i for i in range(len(voters)) if state[i] == goal]
        if all(i not in nonstable for i in holders):
            best = max(best, len(holders))
        for i in nonstable:
            nxt = state[:i] + (pendings[i],) + state[i + 1 :]
            if nxt not in seen:
                if len(seen) >= max_states:
                    raise CapacityError("oracle state space exceeded max_states")
                seen.add(nxt)
                queue.append(nxt)
    return best
