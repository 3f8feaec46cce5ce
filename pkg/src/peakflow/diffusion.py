"""Sequential opinion diffusion on undirected preference networks.

An active voter aggregates its open neighbourhood (never itself) with a
ranking rule and adopts the tie-broken result. Voters with no neighbours are
stable by definition. In single-peaked mode every opinion stays single-peaked
under kemeny and mmc updates; free mode admits arbitrary opinions and makes
no convergence promises.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .core import (
    Axis,
    DomainError,
    Profile,
    Ranking,
    is_single_peaked,
    kendall_tau,
    majority_table,
)
from .rules import TieBreakContext, apply_rule, tie_break

DEFAULT_STEP_CAP = 100_000

SCHEDULERS = ("round-robin", "random", "sequence")


@dataclass(frozen=True)
class PreferenceNetwork:
    """An undirected simple graph whose vertices carry rankings.

    Voters and opinions are aligned tuples; edges are canonicalized to sorted
    unordered pairs. The network is a value: updates build new networks.
    """

    axis: Axis
    voters: tuple[str, ...]
    opinions: tuple[Ranking, ...]
    edges: tuple[tuple[str, str], ...]
    sp_mode: bool = True

    def __post_init__(self) -> None:
        if len(set(self.voters)) != len(self.voters):
            raise DomainError("duplicate voter ids")
        if len(self.opinions) != len(self.voters):
            raise DomainError("need exactly one opinion per voter")
        known = set(self.voters)
        canonical = []
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise DomainError(f"self-loop at voter {a!r}")
            if a not in known or b not in known:
                raise DomainError(f"edge ({a!r}, {b!r}) references unknown voters")
            pair = (a, b) if a < b else (b, a)
            if pair not in seen:
                seen.add(pair)
                canonical.append(pair)
        object.__setattr__(self, "edges", tuple(sorted(canonical)))
        cand_set = frozenset(self.axis.candidates)
        for v, r in zip(self.voters, self.opinions):
            if frozenset(r.order) != cand_set:
                raise DomainError(f"opinion of voter {v!r} is not over the axis candidates")
            if self.sp_mode and not is_single_peaked(r, self.axis):
                raise DomainError(
                    f"voter {v!r} holds a non-single-peaked opinion in single-peaked mode"
                )

    @classmethod
    def build(
        cls,
        axis: Axis,
        opinions: Mapping[str, Ranking],
        edges: Iterable[tuple[str, str]],
        sp_mode: bool = True,
    ) -> "PreferenceNetwork":
        voters = tuple(opinions)
        return cls(axis, voters, tuple(opinions[v] for v in voters), tuple(edges), sp_mode)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.voters)}

    @cached_property
    def _adjacency(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, list[str]] = {v: [] for v in self.voters}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return {v: tuple(sorted(nb)) for v, nb in adj.items()}

    def opinion(self, voter: str) -> Ranking:
        try:
            return self.opinions[self._index[voter]]
        except KeyError:
            raise DomainError(f"unknown voter {voter!r}") from None

    def neighbors(self, voter: str) -> tuple[str, ...]:
        if voter not in self._index:
            raise DomainError(f"unknown voter {voter!r}")
        return self._adjacency[voter]

    def neighborhood_profile(self, voter: str) -> Profile:
        """Profile induced by the open neighbourhood of the voter."""
        return Profile(
            self.axis.candidates,
            tuple(self.opinion(u) for u in self.neighbors(voter)),
        )

    def with_opinion(self, voter: str, ranking: Ranking) -> "PreferenceNetwork":
        i = self._index[voter]
        if self.opinions[i] == ranking:
            return self
        new_opinions = self.opinions[:i] + (ranking,) + self.opinions[i + 1 :]
        return replace(self, opinions=new_opinions)

    def assignment(self) -> tuple[Ranking, ...]:
        """Snapshot of all opinions, usable as a state key."""
        return self.opinions

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class UpdateEvent:
    step: int
    voter: str
    before: Ranking
    after: Ranking
    changed: bool
    potential_before: int | None = None
    potential_after: int | None = None


@dataclass(frozen=True)
class PotentialTracker:
    """Edge-sum potential: Kendall tau distances or axis peak distances."""

    kind: str  # "edge-kt" | "peak-distance"

    def __post_init__(self) -> None:
        if self.kind not in ("edge-kt", "peak-distance"):
            raise DomainError(f"unknown potential kind {self.kind!r}")

    def _edge_value(self, net: PreferenceNetwork, a: str, b: str) -> int:
        ra, rb = net.opinion(a), net.opinion(b)
        if self.kind == "edge-kt":
            return kendall_tau(ra, rb)
        return net.axis.distance(ra.peak, rb.peak)

    def value(self, net: PreferenceNetwork) -> int:
        return sum(self._edge_value(net, a, b) for a, b in net.edges)

    def local(self, net: PreferenceNetwork, voter: str) -> int:
        return sum(self._edge_value(net, voter, u) for u in net.neighbors(voter))


def edge_kt_potential(net: PreferenceNetwork) -> int:
    return PotentialTracker("edge-kt").value(net)


def peak_distance_potential(net: PreferenceNetwork) -> int:
    return PotentialTracker("peak-distance").value(net)


def default_potential_kind(rule: str) -> str:
    return "peak-distance" if rule == "mmc" else "edge-kt"


def _resolve_update(net: PreferenceNetwork, voter: str) -> tuple[Profile, TieBreakContext]:
    profile = net.neighborhood_profile(voter)
    return profile, TieBreakContext(net.axis, net.opinion(voter))


def pending_update(net: PreferenceNetwork, voter: str, rule: str) -> Ranking:
    """The opinion the voter would adopt if activated now."""
    if not net.neighbors(voter):
        return net.opinion(voter)
    profile, ctx = _resolve_update(net, voter)
    outcome = apply_rule(rule, profile, net.axis)
    return tie_break(outcome, ctx)


def update_step(
    net: PreferenceNetwork,
    voter: str,
    rule: str,
    *,
    step: int = 0,
    tracker: PotentialTracker | None = None,
) -> tuple[PreferenceNetwork, UpdateEvent]:
    """Activate one voter; returns the new network and the event record.

    Isolated voters are no-ops and the event of a stable voter carries
    changed=False with the network returned unchanged.
    """
    before = net.opinion(voter)
    after = pending_update(net, voter, rule)
    if after == before:
        value = tracker.value(net) if tracker else None
        return net, UpdateEvent(step, voter, before, before, False, value, value)
    if tracker is None:
        new_net = net.with_opinion(voter, after)
        return new_net, UpdateEvent(step, voter, before, after, True)
    pot_before = tracker.value(net)
    local_before = tracker.local(net, voter)
    new_net = net.with_opinion(voter, after)
    pot_after = pot_before - local_before + tracker.local(new_net, voter)
    return new_net, UpdateEvent(step, voter, before, after, True, pot_before, pot_after)


def is_stable(net: PreferenceNetwork, voter: str, rule: str) -> bool:
    """True iff activating the voter would leave its opinion unchanged."""
    return pending_update(net, voter, rule) == net.opinion(voter)


def stable_state(net: PreferenceNetwork, rule: str) -> bool:
    return all(is_stable(net, v, rule) for v in net.voters)


@dataclass(frozen=True)
class RunResult:
    initial: PreferenceNetwork
    final: PreferenceNetwork
    events: tuple[UpdateEvent, ...]
    converged: bool
    rule: str
    scheduler: str
    seed: int | None
    potential_kind: str
    max_steps: int

    @property
    def changes(self) -> int:
        return sum(1 for e in self.events if e.changed)


def kemeny_step_bound(net: PreferenceNetwork) -> int:
    """Upper bound on opinion-changing kemeny updates: |E| * C(m, 2)."""
    m = net.axis.m
    return net.edge_count * (m * (m - 1) // 2)


class _Engine:
    """Shared bookkeeping for run loops: cached pending updates per voter."""

    def __init__(self, net: PreferenceNetwork, rule: str):
        self.net = net
        self.rule = rule
        self._pending: dict[str, Ranking] = {}

    def pending(self, voter: str) -> Ranking:
        if voter not in self._pending:
            self._pending[voter] = pending_update(self.net, voter, self.rule)
        return self._pending[voter]

    def nonstable(self) -> list[str]:
        return [v for v in self.net.voters if self.pending(v) != self.net.opinion(v)]

    def apply(self, voter: str, step: int, tracker: PotentialTracker) -> UpdateEvent:
        before = self.net.opinion(voter)
        after = self.pending(voter)
        pot_before = tracker.value(self.net)
        local_before = tracker.local(self.net, voter)
        self.net = self.net.with_opinion(voter, after)
        pot_after = pot_before - local_before + tracker.local(self.net, voter)
        for u in (voter, *self.net.neighbors(voter)):
            self._pending.pop(u, None)
        return UpdateEvent(step, voter, before, after, True, pot_before, pot_after)


def run(
    net: PreferenceNetwork,
    rule: str,
    scheduler: str = "round-robin",
    *,
    seed: int | None = None,
    sequence: Sequence[str] | None = None,
    max_steps: int | None = None,
    potential: str | None = None,
) -> RunResult:
    """Drive updates until the network is stable or the step cap is hit.

    The scheduler activates only non-stable voters, so every recorded event
    changes an opinion. `random` draws uniformly among the currently
    non-stable voters from the given seed; `sequence` follows an explicit
    voter list, silently skipping voters that are already stable.
    """
    if scheduler not in SCHEDULERS:
        raise DomainError(f"unknown scheduler {scheduler!r}; choose from {SCHEDULERS}")
    if scheduler == "sequence" and sequence is None:
        raise DomainError("the sequence scheduler needs an explicit voter sequence")
    if max_steps is None:
        if rule in ("kemeny", "kemeny-sp") and net.sp_mode:
            max_steps = max(1, kemeny_step_bound(net))
        else:
            max_steps = DEFAULT_STEP_CAP
    kind = potential or default_potential_kind(rule)
    tracker = PotentialTracker(kind)
    engine = _Engine(net, rule)
    events: list[UpdateEvent] = []
    rng = random.Random(seed)

    if scheduler == "sequence":
        assert sequence is not None
        for v in sequence:
            if len(events) >= max_steps:
                break
            if engine.pending(v) != engine.net.opinion(v):
                events.append(engine.apply(v, len(events), tracker))
        converged = not engine.nonstable()
    else:
        pointer = 0
        order = list(net.voters)
        while len(events) < max_steps:
            candidates = engine.nonstable()
            if not candidates:
                break
            if scheduler == "random":
                v = rng.choice(sorted(candidates))
            else:  # round-robin: next non-stable voter at or after the pointer
                candidate_set = set(candidates)
                rotated = order[pointer:] + order[:pointer]
                v = next(u for u in rotated if u in candidate_set)
                pointer = (order.index(v) + 1) % len(order)
            events.append(engine.apply(v, len(events), tracker))
        converged = not engine.nonstable()

    return RunResult(
        initial=net,
        final=engine.net,
        events=tuple(events),
        converged=converged,
        rule=rule,
        scheduler=scheduler,
        seed=seed,
        potential_kind=kind,
        max_steps=max_steps,
    )


def replay(result: RunResult) -> PreferenceNetwork:
    """Re-apply the recorded events to the initial network."""
    net = result.initial
    for e in result.events:
        if e.changed:
            net = net.with_opinion(e.voter, e.after)
    return net


def detect_update_cycle(result: RunResult) -> dict[str, int] | None:
    """Scan a trace for a return to an earlier full opinion assignment.

    Every recorded event changes an opinion, so any revisit qualifies as an
    update cycle. Returns the step indices bracketing the first one found.
    """
    net = result.initial
    seen: dict[tuple[Ranking, ...], int] = {net.assignment(): 0}
    for k, e in enumerate(result.events, start=1):
        if not e.changed:
            continue
        net = net.with_opinion(e.voter, e.after)
        state = net.assignment()
        if state in seen:
            return {
                "first_seen_after_step": seen[state],
                "repeated_after_step": k,
                "length": k - seen[state],
            }
        seen[state] = k
    return None


def swap_update_closure(net: PreferenceNetwork, voter: str) -> Ranking:
    """Fixed point of local adjacent swaps following strict neighbourhood majorities.

    Repeatedly swaps the topmost adjacent candidate pair that a strict
    majority of the voter's neighbours orders the other way, until no swap
    applies. Each swap settles one majority-inverted pair for good, so at most
    C(m, 2) swaps happen.
    """
    if not net.neighbors(voter):
        return net.opinion(voter)
    table = majority_table(net.neighborhood_profile(voter))
    order = list(net.opinion(voter).order)
    while True:
        for i in range(len(order) - 1):
            x, y = order[i], order[i + 1]
            if table.margin(y, x) > 0:
                order[i], order[i + 1] = y, x
                break
        else:
            return Ranking(tuple(order))
