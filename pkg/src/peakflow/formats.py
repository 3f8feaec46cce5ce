"""Plain-text formats for profiles, networks, and run traces.

Profile files start with an `axis:` line followed by one ranking per line,
optionally prefixed with a repetition count (`3 x a > b > c`). Network files
use the same axis line, voter lines `id: a > b > c`, and edge lines
`id -- id`. Blank lines and `#` comments are ignored. Serialization is
canonical, so parse(serialize(x)) == x bit-exactly.
"""

from __future__ import annotations

import json
import re
from typing import Iterable

from .core import Axis, DomainError, Profile, Ranking
from .diffusion import PreferenceNetwork, RunResult, UpdateEvent

_COUNT_LINE = re.compile(r"^(\d+)\s*[x*]\s+(.+)$")


def _content_lines(text: str) -> list[str]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def _parse_axis_line(line: str) -> Axis:
    if not line.lower().startswith("axis:"):
        raise DomainError("expected an 'axis:' line at the head of the file")
    return Axis.from_string(line.split(":", 1)[1].strip())


def serialize_profile(axis: Axis, profile: Profile) -> str:
    """Canonical text form; consecutive identical rankings collapse to a count."""
    lines = [f"axis: {axis}"]
    i = 0
    rankings = profile.rankings
    while i < len(rankings):
        j = i
        while j < len(rankings) and rankings[j] == rankings[i]:
            j += 1
        count = j - i
        lines.append(f"{count} x {rankings[i]}" if count > 1 else str(rankings[i]))
        i = j
    return "\n".join(lines) + "\n"


def parse_profile(text: str) -> tuple[Axis, Profile]:
    lines = _content_lines(text)
    if not lines:
        raise DomainError("empty profile file")
    axis = _parse_axis_line(lines[0])
    rankings: list[Ranking] = []
    for line in lines[1:]:
        match = _COUNT_LINE.match(line)
        if match:
            count, body = int(match.group(1)), match.group(2)
        else:
            count, body = 1, line
        rankings.extend([Ranking.from_string(body)] * count)
    return axis, Profile(axis.candidates, tuple(rankings))


def serialize_network(net: PreferenceNetwork) -> str:
    lines = [f"axis: {net.axis}"]
    for v in net.voters:
        lines.append(f"{v}: {net.opinion(v)}")
    for a, b in net.edges:
        lines.append(f"{a} -- {b}")
    return "\n".join(lines) + "\n"


def parse_network(text: str, sp_mode: bool = True) -> PreferenceNetwork:
    lines = _content_lines(text)
    if not lines:
        raise DomainError("empty network file")
    axis = _parse_axis_line(lines[0])
    voters: list[str] = []
    opinions: list[Ranking] = []
    edges: list[tuple[str, str]] = []
    for line in lines[1:]:
        if "--" in line:
            a, _, b = line.partition("--")
            edges.append((a.strip(), b.strip()))
        elif ":" in line:
            vid, _, body = line.partition(":")
            vid = vid.strip()
            if vid in voters:
                raise DomainError(f"duplicate voter line for {vid!r}")
            voters.append(vid)
            opinions.append(Ranking.from_string(body.strip()))
        else:
            raise DomainError(f"cannot parse network line: {line!r}")
    return PreferenceNetwork(axis, tuple(voters), tuple(opinions), tuple(edges), sp_mode)


def _event_record(event: UpdateEvent) -> dict:
    return {
        "kind": "event",
        "step": event.step,
        "voter": event.voter,
        "before": str(event.before),
        "after": str(event.after),
        "changed": event.changed,
        "potential_before": event.potential_before,
        "potential_after": event.potential_after,
    }


def trace_records(result: RunResult) -> list[dict]:
    """Header plus one record per update event; JSON-serializable."""
    header = {
        "kind": "header",
        "rule": result.rule,
        "scheduler": result.scheduler,
        "seed": result.seed,
        "potential_kind": result.potential_kind,
        "max_steps": result.max_steps,
        "converged": result.converged,
        "changes": result.changes,
        "axis": str(result.initial.axis),
        "voters": list(result.initial.voters),
    }
    return [header] + [_event_record(e) for e in result.events]


def serialize_trace(result: RunResult) -> str:
    return "\n".join(json.dumps(rec, sort_keys=True) for rec in trace_records(result)) + "\n"


def parse_trace(text: str) -> tuple[dict, list[dict]]:
    records = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not records or records[0].get("kind") != "header":
        raise DomainError("trace must start with a header record")
    return records[0], records[1:]


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def write_tsv(path, header: Iterable[str], rows: Iterable[Iterable[object]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(str(cell) for cell in row) + "\n")


def write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
