"""Seeded generators for experiment inputs.

Every generator is a pure function of its arguments: the same seed always
produces the same profile or network, which keeps experiment runs replayable.
"""

from __future__ import annotations

import random

from .core import Axis, DomainError, Profile, enumerate_sp_rankings
from .diffusion import PreferenceNetwork
from .properties import canonical_axis

GRAPH_FAMILIES = ("path", "cycle", "star", "complete", "gnp")


def generate_sp_profile(m: int, n: int, seed: int, axis: Axis | None = None) -> Profile:
    """n rankings drawn uniformly (seeded) from the single-peaked domain."""
    if axis is None:
        axis = canonical_axis(m)
    seq = enumerate_sp_rankings(axis).rankings
    rng = random.Random(seed)
    rankings = tuple(seq[rng.randrange(len(seq))] for _ in range(n))
    return Profile(axis.candidates, rankings)


def voter_ids(n: int) -> tuple[str, ...]:
    return tuple(f"v{i}" for i in range(n))


def generate_edges(
    family: str, n: int, *, p: float = 0.5, rng: random.Random | None = None
) -> tuple[tuple[str, str], ...]:
    """Edge list of a named graph family over voters v0..v{n-1}."""
    ids = voter_ids(n)
    if family == "path":
        return tuple((ids[i], ids[i + 1]) for i in range(n - 1))
    if family == "cycle":
        if n < 3:
            return tuple((ids[i], ids[i + 1]) for i in range(n - 1))
        return tuple((ids[i], ids[(i + 1) % n]) for i in range(n))
    if family == "star":
        return tuple((ids[0], ids[i]) for i in range(1, n))
    if family == "complete":
        return tuple((ids[i], ids[j]) for i in range(n) for j in range(i + 1, n))
    if family == "gnp":
        if rng is None:
            raise DomainError("gnp needs a seeded random source")
        return tuple(
            (ids[i], ids[j])
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < p
        )
    raise DomainError(f"unknown graph family {family!r}; choose from {GRAPH_FAMILIES}")


def generate_network(
    m: int,
    n: int,
    family: str,
    *,
    p: float = 0.5,
    seed: int = 0,
    axis: Axis | None = None,
) -> PreferenceNetwork:
    """Random single-peaked network: seeded opinions first, then seeded edges."""
    if axis is None:
        axis = canonical_axis(m)
    seq = enumerate_sp_rankings(axis).rankings
    rng = random.Random(seed)
    ids = voter_ids(n)
    opinions = tuple(seq[rng.randrange(len(seq))] for _ in ids)
    edges = generate_edges(family, n, p=p, rng=rng)
    return PreferenceNetwork(axis, ids, opinions, edges, sp_mode=True)
