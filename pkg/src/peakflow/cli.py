"""Command-line front door.

Subcommands: enumerate, rules, check, table1, diffuse, spread. Every run
writes its reports into a fresh directory under --out. Exit codes: 0 when all
assertions held, 1 when a refutation or violation was found (witness
included in the report), 2 for usage or capacity errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .core import Axis, CapacityError, DomainError, Ranking, enumerate_sp_rankings
from .diffusion import (
    DEFAULT_STEP_CAP,
    detect_update_cycle,
    kemeny_step_bound,
    run as run_diffusion,
    stable_state,
)
from .formats import (
    parse_network,
    parse_profile,
    serialize_network,
    serialize_profile,
    serialize_trace,
    write_json,
    write_text,
    write_tsv,
)
from .generate import GRAPH_FAMILIES, generate_network
from .properties import (
    EXPECTED_TABLE1,
    PROPERTIES,
    TABLE1_RULES,
    UNPROVEN_HOLDS_CELLS,
    canonical_axis,
    check_kemeny_majority,
    check_property,
    paper_witness_verdict,
    search_property,
    table1_report,
)
from .reports import (
    ensure_run_dir,
    enumeration_figure,
    potential_figure,
    spread_figure,
    table_figure,
    write_run_header,
)
from .rules import RULE_NAMES, TieBreakContext, apply_rule, tie_break
from .spread import SPREAD_RULES, brute_force_spread, greedy_spread


class UsageError(Exception):
    """Bad configuration; the message names the offending field."""


@dataclass
class ExperimentConfig:
    """Everything a command needs; flags override config-file values."""

    command: str
    rule: str | None = None
    prop: str | None = None
    m: int = 4
    n: int = 4
    voters: int | None = None
    graph: str | None = None
    p: float = 0.5
    seed: int = 0
    max_steps: int | None = None
    scheduler: str = "round-robin"
    sequence: str | None = None
    target: str = "up"
    oracle: bool = False
    paper_witnesses: bool = False
    grid: bool = False
    free_mode: bool = False
    net_path: str | None = None
    profile_path: str | None = None
    current: str | None = None
    axis: str | None = None
    out: str = "runs"
    figures: bool = True

    def options(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def _positive(cfg: ExperimentConfig, name: str) -> None:
    value = getattr(cfg, name)
    if value is not None and value <= 0:
        raise UsageError(f"field '{name}' must be positive, got {value}")


def _network_from_config(cfg: ExperimentConfig):
    if cfg.net_path:
        return parse_network(Path(cfg.net_path).read_text(), sp_mode=not cfg.free_mode)
    if cfg.graph is None:
        raise UsageError("field 'net_path' or 'graph' is required to obtain a network")
    if cfg.graph not in GRAPH_FAMILIES:
        raise UsageError(f"field 'graph' must be one of {GRAPH_FAMILIES}, got {cfg.graph!r}")
    n = cfg.voters if cfg.voters is not None else cfg.n
    if n <= 0:
        raise UsageError("field 'voters' must be positive")
    return generate_network(cfg.m, n, cfg.graph, p=cfg.p, seed=cfg.seed)


def _rule_or_usage(cfg: ExperimentConfig, allowed=RULE_NAMES) -> str:
    if cfg.rule is None:
        raise UsageError("field 'rule' is required")
    if cfg.rule not in allowed:
        raise UsageError(f"field 'rule' must be one of {allowed}, got {cfg.rule!r}")
    return cfg.rule


def _cmd_enumerate(cfg: ExperimentConfig, run_dir: Path) -> int:
    axis = Axis.from_string(cfg.axis) if cfg.axis else canonical_axis(cfg.m)
    seq = enumerate_sp_rankings(axis)
    write_tsv(
        run_dir / "rankings.tsv",
        ("index", "ranking", "peak"),
        ((i, str(r), r.peak) for i, r in enumerate(seq.rankings)),
    )
    write_tsv(
        run_dir / "thresholds.tsv",
        ("pair_index", "left", "right", "threshold"),
        (
            (i, axis.candidates[i], axis.candidates[i + 1], h)
            for i, h in enumerate(seq.thresholds)
        ),
    )
    lines = [
        f"axis: {axis}",
        f"single-peaked rankings: {len(seq)}",
        "thresholds: "
        + ", ".join(
            f"{axis.candidates[i]}|{axis.candidates[i+1]} -> {h}"
            for i, h in enumerate(seq.thresholds)
        ),
    ]
    write_text(run_dir / "report.txt", "\n".join(lines) + "\n")
    if cfg.figures and axis.m >= 2:
        enumeration_figure(run_dir / "thresholds.png", seq.thresholds, len(seq), axis.m)
    return 0


def _cmd_rules(cfg: ExperimentConfig, run_dir: Path) -> int:
    rule = _rule_or_usage(cfg)
    if not cfg.profile_path:
        raise UsageError("field 'profile_path' is required for the rules command")
    axis, profile = parse_profile(Path(cfg.profile_path).read_text())
    outcome = apply_rule(rule, profile, axis)
    lines = [f"rule: {rule}", f"axis: {axis}", f"voters: {profile.n}"]
    if "scores" in outcome.score_trace:
        for c in axis.candidates:
            lines.append(f"score[{c}] = {outcome.score_trace['scores'][c]}")
    if "optimal_score" in outcome.score_trace:
        lines.append(f"optimal distance: {outcome.score_trace['optimal_score']}")
    count = outcome.winner_count()
    lines.append(f"winning rankings: {count}")
    if count <= 50:
        shown = sorted(outcome.winners, key=axis.lex_key)
    else:
        shown = sorted(outcome.sp_winners(axis), key=axis.lex_key)
        lines.append("(large winner set; listing only the single-peaked members)")
    lines.extend(f"  {r}" for r in shown)
    write_tsv(run_dir / "winners.tsv", ("ranking",), ((str(r),) for r in shown))
    if cfg.current:
        current = Ranking.from_string(cfg.current)
        chosen = tie_break(outcome, TieBreakContext(axis, current))
        lines.append(f"tie-broken update from {current}: {chosen}")
    write_text(run_dir / "report.txt", "\n".join(lines) + "\n")
    return 0


def _witness_block(verdict) -> list[str]:
    lines = []
    if verdict.witness is not None:
        lines.append(f"witness (source: {verdict.source}):")
        lines.extend(
            "  " + line
            for line in serialize_profile(verdict.witness.axis, verdict.witness.profile).splitlines()
        )
        for key, value in sorted(verdict.witness.detail.items()):
            lines.append(f"  {key}: {value}")
    return lines


def _cmd_check(cfg: ExperimentConfig, run_dir: Path) -> int:
    rule = _rule_or_usage(cfg, TABLE1_RULES)
    prop = (cfg.prop or "").upper() if cfg.prop else None
    if cfg.prop and cfg.prop.lower() == "majority":
        prop = "majority"
    if prop not in (*PROPERTIES, "majority"):
        raise UsageError(f"field 'prop' must be one of {PROPERTIES} or 'majority'")
    _positive(cfg, "m")
    _positive(cfg, "n")
    if prop == "majority":
        if rule != "kemeny":
            raise UsageError("field 'prop'='majority' is only defined for rule kemeny")
        verdict = check_kemeny_majority(cfg.m, cfg.n)
    elif cfg.grid:
        verdict = search_property(rule, prop, cfg.m, cfg.n, include_witnesses=cfg.paper_witnesses)
    else:
        verdict = check_property(rule, prop, cfg.m, cfg.n)
        if not verdict.refuted and cfg.paper_witnesses:
            from_witness = paper_witness_verdict(rule, prop)
            if from_witness is not None:
                verdict = from_witness
    lines = [
        f"rule: {verdict.rule}",
        f"property: {verdict.prop}",
        f"verdict: {verdict.status}",
        "searched cells (m, n, profiles): "
        + (", ".join(f"({m},{n},{c})" for m, n, c in verdict.searched) or "none"),
    ]
    lines += _witness_block(verdict)
    write_text(run_dir / "report.txt", "\n".join(lines) + "\n")
    write_json(
        run_dir / "verdict.json",
        {
            "rule": verdict.rule,
            "property": verdict.prop,
            "status": verdict.status,
            "source": verdict.source,
            "searched": list(verdict.searched),
            "witness_profile": (
                serialize_profile(verdict.witness.axis, verdict.witness.profile)
                if verdict.witness
                else None
            ),
            "witness_detail": (
                {k: repr(v) for k, v in verdict.witness.detail.items()}
                if verdict.witness
                else None
            ),
        },
    )
    return 1 if verdict.refuted else 0


def _cmd_table1(cfg: ExperimentConfig, run_dir: Path) -> int:
    _positive(cfg, "m")
    _positive(cfg, "n")
    report = table1_report(cfg.m, cfg.n, paper_witnesses=cfg.paper_witnesses)
    rows = []
    holds = {}
    for rule in TABLE1_RULES:
        for prop in PROPERTIES:
            v = report.verdict(rule, prop)
            holds[(rule, prop)] = not v.refuted
            rows.append(
                (
                    rule,
                    prop,
                    v.status,
                    v.source or "",
                    "yes" if EXPECTED_TABLE1[rule][prop] else "no",
                    "paper-asserted" if (rule, prop) in UNPROVEN_HOLDS_CELLS else "",
                )
            )
    write_tsv(
        run_dir / "table1.tsv",
        ("rule", "property", "verdict", "source", "expected_holds", "note"),
        rows,
    )
    width = max(len(r) for r in TABLE1_RULES) + 2
    lines = [
        f"searched grid: m <= {cfg.m}, n <= {cfg.n}"
        + (", plus fixed witnesses" if cfg.paper_witnesses else ""),
        "every 'holds' verdict is holds-on-searched-space, not a proof",
        "",
        " " * width + "".join(f"{p:>10}" for p in PROPERTIES),
    ]
    for rule in TABLE1_RULES:
        cells = []
        for prop in PROPERTIES:
            v = report.verdict(rule, prop)
            cells.append("holds*" if not v.refuted else "refuted")
        lines.append(f"{rule:<{width}}" + "".join(f"{c:>10}" for c in cells))
    lines.append("")
    for rule, prop in UNPROVEN_HOLDS_CELLS:
        v = report.verdict(rule, prop)
        if not v.refuted:
            lines.append(
                f"note: {rule} {prop} holds on the searched space; the table value "
                "is asserted without an in-text argument, so this cell is search-only"
            )
    agreement = report.matches_expected
    lines.append(f"agreement with the expected table: {'yes' if agreement else 'NO'}")
    for rule, prop, expected, got in report.mismatches():
        lines.append(
            f"  mismatch {rule}/{prop}: expected {'holds' if expected else 'refuted'}, "
            f"got {'holds' if got else 'refuted'}"
        )
    witness_lines = []
    for v in report.verdicts:
        if v.refuted:
            witness_lines.append(f"== {v.rule} / {v.prop} ({v.source})")
            witness_lines.extend(_witness_block(v))
    write_text(run_dir / "witnesses.txt", "\n".join(witness_lines) + "\n")
    write_text(run_dir / "report.txt", "\n".join(lines) + "\n")
    if cfg.figures:
        table_figure(run_dir / "table1.png", TABLE1_RULES, list(PROPERTIES), holds)
    return 0 if agreement else 1


def _cmd_diffuse(cfg: ExperimentConfig, run_dir: Path) -> int:
    rule = _rule_or_usage(cfg)
    if cfg.scheduler not in ("round-robin", "random", "sequence"):
        raise UsageError(f"field 'scheduler' invalid: {cfg.scheduler!r}")
    _positive(cfg, "max_steps")
    net = _network_from_config(cfg)
    write_text(run_dir / "network.txt", serialize_network(net))
    sequence = cfg.sequence.split(",") if cfg.sequence else None
    result = run_diffusion(
        net,
        rule,
        cfg.scheduler,
        seed=cfg.seed,
        sequence=sequence,
        max_steps=cfg.max_steps,
    )
    write_text(run_dir / "trace.jsonl", serialize_trace(result))
    write_tsv(
        run_dir / "potential.tsv",
        ("step", "voter", "potential_before", "potential_after"),
        ((e.step, e.voter, e.potential_before, e.potential_after) for e in result.events),
    )
    cycle = detect_update_cycle(result)
    audits: list[str] = []
    ok = result.converged
    if rule in ("kemeny", "kemeny-sp") and net.sp_mode:
        bound = kemeny_step_bound(net)
        within = result.changes <= bound
        decreasing = all(e.potential_after <= e.potential_before - 1 for e in result.events)
        audits.append(f"changing steps {result.changes} <= bound {bound}: {within}")
        audits.append(f"edge Kendall-tau potential strictly decreasing: {decreasing}")
        ok = ok and within and decreasing
    if rule == "mmc":
        monotone = all(e.potential_after <= e.potential_before for e in result.events)
        audits.append(f"peak-distance potential non-increasing: {monotone}")
        ok = ok and monotone
    if rule in ("kemeny", "kemeny-sp", "mmc") and net.sp_mode:
        audits.append(f"update cycle detected: {cycle is not None}")
        ok = ok and cycle is None
    lines = [
        f"rule: {rule}",
        f"scheduler: {cfg.scheduler} (seed {cfg.seed})",
        f"voters: {len(net.voters)}, edges: {net.edge_count}",
        f"opinion-changing steps: {result.changes}",
        f"converged: {result.converged}"
        + ("" if result.converged else f" (step cap {result.max_steps} exhausted)"),
        f"final state stable: {stable_state(result.final, rule)}",
        *audits,
    ]
    if cycle:
        lines.append(f"cycle: {cycle}")
    write_text(run_dir / "report.txt", "\n".join(lines) + "\n")
    write_text(run_dir / "final_network.txt", serialize_network(result.final))
    if cfg.figures and result.events:
        steps = [e.step for e in result.events]
        pots = [e.potential_after for e in result.events]
        potential_figure(
            run_dir / "potential.png",
            steps,
            pots,
            kind=result.potential_kind,
            rule=rule,
        )
    return 0 if ok else 1


def _cmd_spread(cfg: ExperimentConfig, run_dir: Path) -> int:
    rule = _rule_or_usage(cfg, SPREAD_RULES)
    if cfg.target not in ("up", "down"):
        raise UsageError(f"field 'target' must be 'up' or 'down', got {cfg.target!r}")
    _positive(cfg, "max_steps")
    net = _network_from_config(cfg)
    write_text(run_dir / "network.txt", serialize_network(net))
    result = greedy_spread(
        net, rule, cfg.target, phase3_max_steps=cfg.max_steps or DEFAULT_STEP_CAP
    )
    target = result.target
    counts = []
    holders = sum(1 for v in net.voters if net.opinion(v) == target)
    steps, phases = [], []
    for e in result.events:
        if e.after == target:
            holders += 1
        if e.before == target:
            holders -= 1
        steps.append(e.step)
        phases.append(e.phase)
        counts.append(holders)
    write_tsv(
        run_dir / "spread.tsv",
        ("step", "phase", "voter", "before", "after", "target_holders", "potential_after"),
        (
            (e.step, e.phase, e.voter, str(e.before), str(e.after), c, e.potential_after)
            for e, c in zip(result.events, counts)
        ),
    )
    non_interference = result.final_target_holders == result.v_star
    ok = result.converged and non_interference
    lines = [
        f"rule: {rule}",
        f"target: {target}",
        f"voters: {len(net.voters)}, edges: {net.edge_count}",
        f"updates: {len(result.events)} (phases 1-2: {result.phase12_changes})",
        f"stable target holders: {len(result.v_star)}: {sorted(result.v_star)}",
        f"phase 3 left the target set unchanged: {non_interference}",
        f"converged: {result.converged}",
    ]
    payload = {
        "rule": rule,
        "target": str(target),
        "v_star": sorted(result.v_star),
        "v_star_size": len(result.v_star),
        "sequence": [[phase, voter] for phase, voter in result.sequence],
        "converged": result.converged,
        "phase12_changes": result.phase12_changes,
    }
    if cfg.oracle:
        optimum = brute_force_spread(net, rule, cfg.target)
        match = optimum == len(result.v_star)
        lines.append(f"oracle optimum: {optimum} (greedy match: {match})")
        payload["oracle_optimum"] = optimum
        ok = ok and match
    write_json(run_dir / "result.json", payload)
    write_text(run_dir / "report.txt", "\n".join(lines) + "\n")
    write_text(run_dir / "final_network.txt", serialize_network(result.final))
    if cfg.figures and result.events:
        spread_figure(run_dir / "spread.png", steps, counts, phases, rule=rule)
    return 0 if ok else 1


_COMMANDS = {
    "enumerate": _cmd_enumerate,
    "rules": _cmd_rules,
    "check": _cmd_check,
    "table1": _cmd_table1,
    "diffuse": _cmd_diffuse,
    "spread": _cmd_spread,
}


def run_experiment(cfg: ExperimentConfig) -> int:
    """Dispatch a config to its command, writing reports into a fresh run dir."""
    if cfg.command not in _COMMANDS:
        raise UsageError(f"field 'command' must be one of {tuple(_COMMANDS)}")
    started = time.time()
    run_dir = ensure_run_dir(cfg.out, cfg.command)
    try:
        code = _COMMANDS[cfg.command](cfg, run_dir)
    except (UsageError, DomainError, CapacityError) as exc:
        write_run_header(run_dir, cfg.command, cfg.options(), started, 2)
        raise exc
    write_run_header(run_dir, cfg.command, cfg.options(), started, code)
    print(f"[{cfg.command}] exit {code}; reports in {run_dir}")
    return code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peakflow",
        description="Opinion diffusion for single-peaked preference rankings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON file with defaults; explicit flags win")
        p.add_argument("--out", default=None, help="output root directory (default runs)")
        p.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    p = sub.add_parser("enumerate", help="list all single-peaked rankings of an axis")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--axis", help="explicit axis like 'a > b > c'")
    common(p)

    p = sub.add_parser("rules", help="apply a ranking rule to a profile file")
    p.add_argument("--rule", choices=RULE_NAMES)
    p.add_argument("--profile", dest="profile_path")
    p.add_argument("--current", help="tie-break against this opinion")
    common(p)

    p = sub.add_parser("check", help="certify one rule/property cell")
    p.add_argument("--rule", choices=TABLE1_RULES)
    p.add_argument("--property", dest="prop")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--grid", action="store_true", help="sweep all m' <= m, n' <= n")
    p.add_argument("--paper-witnesses", action="store_true")
    common(p)

    p = sub.add_parser("table1", help="certify every rule/property cell")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--paper-witnesses", action="store_true")
    common(p)

    def network_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--net", dest="net_path", help="network file")
        p.add_argument("--graph", choices=GRAPH_FAMILIES, help="generate instead of --net")
        p.add_argument("--voters", type=int, default=None)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--p", type=float, default=None, help="gnp edge probability")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("diffuse", help="run the diffusion process")
    network_flags(p)
    p.add_argument("--rule", choices=RULE_NAMES)
    p.add_argument("--scheduler", choices=("round-robin", "random", "sequence"), default=None)
    p.add_argument("--sequence", help="comma-separated voter ids for the sequence scheduler")
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--free-mode", action="store_true", help="allow non-single-peaked opinions")
    common(p)

    p = sub.add_parser("spread", help="greedily spread an extreme opinion")
    network_flags(p)
    p.add_argument("--rule", choices=SPREAD_RULES)
    p.add_argument("--target", choices=("up", "down"), default=None)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--oracle", action="store_true", help="compare against brute force")
    common(p)

    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig(command=args.command)
    overrides: dict = {}
    if getattr(args, "config", None):
        try:
            overrides = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"field 'config': cannot read {args.config}: {exc}") from None
        if not isinstance(overrides, dict):
            raise UsageError("field 'config' must hold a JSON object")
    for key, value in overrides.items():
        if not hasattr(cfg, key):
            raise UsageError(f"field {key!r} in the config file is unknown")
        setattr(cfg, key, value)
    mapping = {
        "rule": "rule",
        "prop": "prop",
        "m": "m",
        "n": "n",
        "voters": "voters",
        "graph": "graph",
        "p": "p",
        "seed": "seed",
        "max_steps": "max_steps",
        "scheduler": "scheduler",
        "sequence": "sequence",
        "target": "target",
        "oracle": "oracle",
        "paper_witnesses": "paper_witnesses",
        "grid": "grid",
        "free_mode": "free_mode",
        "net_path": "net_path",
        "profile_path": "profile_path",
        "current": "current",
        "axis": "axis",
        "out": "out",
    }
    for arg_name, cfg_name in mapping.items():
        if hasattr(args, arg_name):
            value = getattr(args, arg_name)
            if value is not None and value is not False:
                setattr(cfg, cfg_name, value)
    if getattr(args, "no_figures", False):
        cfg.figures = False
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return run_experiment(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
