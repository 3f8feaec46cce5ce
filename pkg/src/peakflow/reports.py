"""Report emission: run directories, delimited tables, and rendered figures.

Each command writes into a fresh directory under the output root (append
only, never overwriting an earlier run). Timing and timestamps live solely in
run.json so every other artifact is bit-identical across replays of the same
config and seed. Figures are rendered with the Agg backend next to the
delimited data they visualize.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Iterable, Sequence

from .formats import write_json


def ensure_run_dir(base: str | Path, command: str) -> Path:
    """Create a new run directory base/<command>-<stamp>[-k]; never reuses one."""
    root = Path(base)
    root.mkdir(parents=True, exist_ok=True)
    stamp = time.strftime("%Y%m%d-%H%M%S")
    for k in range(10_000):
        suffix = "" if k == 0 else f"-{k}"
        candidate = root / f"{command}-{stamp}{suffix}"
        try:
            candidate.mkdir()
        except FileExistsError:
            continue
        return candidate
    raise RuntimeError("could not allocate a fresh run directory")


def write_run_header(
    run_dir: Path, command: str, options: dict, started: float, exit_code: int
) -> None:
    write_json(
        run_dir / "run.json",
        {
            "command": command,
            "options": options,
            "started_unix": started,
            "duration_sec": time.time() - started,
            "exit_code": exit_code,
        },
    )


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


_PNG_META = {"metadata": {"Date": None}}  # keep PNG bytes replay-identical


def potential_figure(
    path: Path, steps: Sequence[int], potentials: Sequence[int], *, kind: str, rule: str
) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.step(steps, potentials, where="post")
    ax.set_xlabel("opinion-changing step")
    ax.set_ylabel(kind)
    ax.set_title(f"{rule} updates: {kind} per step")
    fig.tight_layout()
    fig.savefig(path, **_PNG_META)
    plt.close(fig)


def spread_figure(
    path: Path,
    steps: Sequence[int],
    target_counts: Sequence[int],
    phases: Sequence[int],
    *,
    rule: str,
) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.step(steps, target_counts, where="post", label="voters on target")
    for boundary in (1, 2):
        crossing = [s for s, ph in zip(steps, phases) if ph > boundary]
        if crossing:
            ax.axvline(crossing[0] - 0.5, linestyle=":", linewidth=1)
    ax.set_xlabel("update")
    ax.set_ylabel("target holders")
    ax.set_title(f"greedy spread under {rule}")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, **_PNG_META)
    plt.close(fig)


def table_figure(path: Path, rules: Sequence[str], props: Sequence[str], holds: dict) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(1.2 + 0.9 * len(props), 0.6 + 0.45 * len(rules)))
    for i, rule in enumerate(rules):
        for j, prop in enumerate(props):
            ok = holds[(rule, prop)]
            color = "#5aa469" if ok else "#d35d6e"
            ax.add_patch(plt.Rectangle((j, len(rules) - 1 - i), 1, 1, color=color))
            ax.text(
                j + 0.5,
                len(rules) - 1 - i + 0.5,
                "holds" if ok else "refuted",
                ha="center",
                va="center",
                fontsize=8,
                color="white",
            )
    ax.set_xlim(0, len(props))
    ax.set_ylim(0, len(rules))
    ax.set_xticks([j + 0.5 for j in range(len(props))])
    ax.set_xticklabels(props)
    ax.set_yticks([len(rules) - 1 - i + 0.5 for i in range(len(rules))])
    ax.set_yticklabels(rules)
    ax.tick_params(length=0)
    for spine in ax.spines.values():
        spine.set_visible(False)
    fig.tight_layout()
    fig.savefig(path, **_PNG_META)
    plt.close(fig)


def enumeration_figure(path: Path, thresholds: Iterable[int], total: int, m: int) -> None:
    plt = _pyplot()
    thresholds = list(thresholds)
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.bar(range(1, len(thresholds) + 1), thresholds)
    ax.axhline(total, linestyle=":", linewidth=1)
    ax.set_xlabel("adjacent axis pair index")
    ax.set_ylabel("rankings preferring the left candidate")
    ax.set_title(f"thresholds across {total} single-peaked rankings (m={m})")
    fig.tight_layout()
    fig.savefig(path, **_PNG_META)
    plt.close(fig)
