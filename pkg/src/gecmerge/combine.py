"""Learning and applying F-beta-optimal edit selection across two systems.

Training partitions the paired outputs into agreement subsets (edits
proposed only by system A, only by system B, or by both), counts per
(error-type, subset) true and false positives against a reference, and
chooses which cells to keep so that corpus-level F_beta is maximized.

With FN = gold_total - TP, the objective is

    F(S) = (1 + b^2) * TP(S) / (TP(S) + FP(S) + b^2 * gold_total)

where TP and FP are linear in the per-cell selection variables S in
[0, 1]. A ratio of affine functions over a box always attains its
maximum at a vertex, so an all-binary optimum exists; it is found by
iterated ratio improvement: at ratio `lam`, keep exactly the cells with
(1 + b^2) * tp > lam * (tp + fp), then update `lam` to the achieved F
and repeat until it stops increasing. The achieved ratio is strictly
increasing over finitely many binary assignments, so the loop
terminates at the optimum.

More than two systems are combined by a left fold that trains a fresh
policy at each pairwise step; a single system is "filtered" by
combining it with an empty system, which drops its weak error types.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence

from .core import AnnotatedSentence, Edit, M2Corpus, spans_overlap
from .rng import SplitMix64
from .score import check_same_sources, match_edits

POLICY_VERSION = 1


class Subset(Enum):
    """Which system(s) proposed an edit."""

    ONLY_A = "only_a"
    ONLY_B = "only_b"
    BOTH = "both"


_SUBSET_RANK = {Subset.BOTH: 0, Subset.ONLY_A: 1, Subset.ONLY_B: 2}


@dataclass(frozen=True)
class SystemOutput:
    """A named system's corrections over a shared set of source sentences."""

    name: str
    corpus: M2Corpus


@dataclass(frozen=True)
class CellStats:
    """Dev-set TP/FP counts for one (error type, agreement subset) cell."""

    etype: str
    subset: Subset
    tp: int
    fp: int

    def __post_init__(self):
        if self.tp < 0 or self.fp < 0:
            raise ValueError("counts must be >= 0")


@dataclass(frozen=True)
class StatsTable:
    """All cell counts plus reference totals from one development set."""

    cells: tuple[CellStats, ...]
    gold_total_per_type: Mapping[str, int]
    gold_total: int

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "gold_total_per_type", dict(self.gold_total_per_type))
        if self.gold_total != sum(self.gold_total_per_type.values()):
            raise ValueError("gold_total does not match the per-type totals")
        tp_per_type: Counter[str] = Counter()
        for cell in self.cells:
            tp_per_type[cell.etype] += cell.tp
        for etype, tp in tp_per_type.items():
            if tp > self.gold_total_per_type.get(etype, 0):
                raise ValueError(
                    f"type {etype}: {tp} true positives exceed the reference total"
                )


@dataclass(frozen=True)
class PolicyEntry:
    """Selection value for one cell plus the statistics it was learned from."""

    s: float
    tp: int
    fp: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp > 0 else 0.0


@dataclass(frozen=True)
class SelectionPolicy:
    """A trained keep/drop rule per (error type, agreement subset).

    Selection values live in [0, 1]; with rounding mode "round" they are
    strictly 0 or 1. Cells never observed during training default to 0
    at application time (unknown-quality edits are dropped).
    """

    beta: float
    min_samples: int
    entries: dict[tuple[str, Subset], PolicyEntry] = field(default_factory=dict)
    dev_name: str = ""
    created: str = ""
    system_names: tuple[str, str] = ("", "")

    def s_value(self, etype: str, subset: Subset) -> float:
        entry = self.entries.get((etype, subset))
        return entry.s if entry is not None else 0.0


def partition_pair(a: SystemOutput, b: SystemOutput) -> dict[Subset, M2Corpus]:
    """Split two systems' edits into the three agreement subsets.

    Edits are compared by (start, end, replacement) key per sentence;
    corrections proposed by both systems land in BOTH carrying system
    A's type label and annotator. The three corpora share the input
    source sentences, their edit sets are pairwise key-disjoint, and
    their union equals the union of the inputs.
    """
    check_same_sources(a.corpus, b.corpus)
    only_a: list[AnnotatedSentence] = []
    only_b: list[AnnotatedSentence] = []
    both: list[AnnotatedSentence] = []
    for sent_a, sent_b in zip(a.corpus, b.corpus):
        keys_a = {e.key: e for e in sent_a.edits}
        keys_b = {e.key: e for e in sent_b.edits}
        only_a.append(
            AnnotatedSentence(sent_a.tokens, tuple(e for k, e in keys_a.items() if k not in keys_b))
        )
        only_b.append(
            AnnotatedSentence(sent_a.tokens, tuple(e for k, e in keys_b.items() if k not in keys_a))
        )
        both.append(
            AnnotatedSentence(sent_a.tokens, tuple(e for k, e in keys_a.items() if k in keys_b))
        )
    return {
        Subset.ONLY_A: M2Corpus(tuple(only_a)),
        Subset.ONLY_B: M2Corpus(tuple(only_b)),
        Subset.BOTH: M2Corpus(tuple(both)),
    }


def build_stats(
    parts: Mapping[Subset, M2Corpus],
    gold: M2Corpus,
    annotator: int = 0,
) -> StatsTable:
    """Count per-cell TP/FP of each agreement subset against a reference.

    Cells with neither true nor false positives are omitted; reference
    totals come from the gold corpus alone, so FN per selection is
    always gold_total minus the selected TP.
    """
    for corpus in parts.values():
        check_same_sources(corpus, gold)
    gold_counts = Counter(
        e.etype for sent in gold for e in sent.edits if e.annotator == annotator
    )
    cells: list[CellStats] = []
    for subset in (Subset.BOTH, Subset.ONLY_A, Subset.ONLY_B):
        stats = match_edits(parts[subset], gold, annotator)
        for etype, st in stats.items():
            if st.tp or st.fp:
                cells.append(CellStats(etype, subset, st.tp, st.fp))
    cells.sort(key=lambda c: (c.etype, c.subset.value))
    return StatsTable(tuple(cells), dict(gold_counts), sum(gold_counts.values()))


def optimize_selection(
    stats: StatsTable,
    beta: float = 0.5,
    min_samples: int = 2,
    rounding: str = "round",
) -> SelectionPolicy:
    """Choose the selection values that maximize F_beta on `stats`.

    Cells with fewer than `min_samples` hypothesis edits (tp + fp) carry
    unreliable statistics and are forced to 0 before optimization; pass
    min_samples=0 to disable. At the optimum a cell can be exactly
    indifferent, leaving F unchanged whether it is kept or dropped:
    rounding "round" sets such cells to 0 (emitting fewer edits at equal
    F), while "sample" records 0.5 so application keeps them with that
    probability.
    """
    if beta <= 0:
        raise ValueError("beta must be > 0")
    if min_samples < 0:
        raise ValueError("min_samples must be >= 0")
    if rounding not in ("round", "sample"):
        raise ValueError(f"unknown rounding mode {rounding!r}")
    b2 = beta * beta
    gold_total = stats.gold_total
    eligible = [c for c in stats.cells if c.tp + c.fp >= min_samples]
    lam = 0.0
    for _ in range(100):
        tp = fp = 0
        for c in eligible:
            if (1 + b2) * c.tp - lam * (c.tp + c.fp) > 0:
                tp += c.tp
                fp += c.fp
        den = tp + fp + b2 * gold_total
        new_lam = (1 + b2) * tp / den if tp > 0 else 0.0
        if new_lam <= lam:
            break
        lam = new_lam
    entries: dict[tuple[str, Subset], PolicyEntry] = {}
    for c in stats.cells:
        if c.tp + c.fp < min_samples:
            s = 0.0
        else:
            margin = (1 + b2) * c.tp - lam * (c.tp + c.fp)
            if margin > 0:
                s = 1.0
            elif margin == 0 and rounding == "sample" and c.tp > 0:
                s = 0.5
            else:
                s = 0.0
        entries[(c.etype, c.subset)] = PolicyEntry(s, c.tp, c.fp)
    return SelectionPolicy(beta=beta, min_samples=min_samples, entries=entries)


def train_policy(
    a: SystemOutput,
    b: SystemOutput,
    gold: M2Corpus,
    *,
    beta: float = 0.5,
    annotator: int = 0,
    min_samples: int = 2,
    rounding: str = "round",
    dev_name: str = "",
    created: str = "",
) -> SelectionPolicy:
    """Partition, count, and optimize in one step, recording provenance."""
    parts = partition_pair(a, b)
    stats = build_stats(parts, gold, annotator)
    policy = optimize_selection(stats, beta=beta, min_samples=min_samples, rounding=rounding)
    return replace(
        policy, dev_name=dev_name, created=created, system_names=(a.name, b.name)
    )


def apply_policy(
    a: SystemOutput,
    b: SystemOutput,
    policy: SelectionPolicy,
    seed: int = 0,
) -> M2Corpus:
    """Combine two systems' outputs under a trained policy.

    Each edit is looked up by its own type label and agreement subset;
    cells with s == 1 are kept, s == 0 dropped, and fractional values
    kept with probability s using a seeded generator. Surviving edits
    that still overlap are arbitrated deterministically: agreement edits
    beat single-system ones (BOTH > ONLY_A > ONLY_B), then earlier
    start, shorter span, smaller replacement. Kept edits are emitted as
    annotator 0, since the merged corpus represents a single system.
    """
    parts = partition_pair(a, b)
    rng = SplitMix64(seed)
    out_sentences: list[AnnotatedSentence] = []
    for idx, source in enumerate(a.corpus):
        kept: list[tuple[Subset, Edit]] = []
        for subset in (Subset.BOTH, Subset.ONLY_A, Subset.ONLY_B):
            for e in parts[subset][idx].edits:
                s = policy.s_value(e.etype, subset)
                if s >= 1.0:
                    keep = True
                elif s <= 0.0:
                    keep = False
                else:
                    keep = rng.random() < s
                if keep:
                    kept.append((subset, e))
        kept.sort(
            key=lambda pair: (
                _SUBSET_RANK[pair[0]],
                pair[1].start,
                pair[1].end - pair[1].start,
                pair[1].replacement,
            )
        )
        accepted: list[Edit] = []
        for _, e in kept:
            if any(spans_overlap(e.start, e.end, x.start, x.end) for x in accepted):
                continue
            accepted.append(Edit(e.start, e.end, e.etype, e.replacement, 0))
        out_sentences.append(AnnotatedSentence(source.tokens, tuple(accepted)))
    return M2Corpus(tuple(out_sentences))


def combine_iterative(
    systems: Sequence[SystemOutput],
    gold_dev: M2Corpus,
    *,
    beta: float = 0.5,
    annotator: int = 0,
    min_samples: int = 2,
    rounding: str = "round",
    seed: int = 0,
    dev_name: str = "",
) -> tuple[M2Corpus, list[SelectionPolicy]]:
    """Combine N systems by folding pairwise, left to right.

    Each step trains a fresh policy on the development reference and
    applies it, so the running combination accumulates the systems one
    by one. Returns the final development-set corpus together with the
    per-step policies, which can be replayed in the same order (via
    apply_policy alone) on unseen data.
    """
    if len(systems) < 2:
        raise ValueError("need at least two systems to combine")
    current = systems[0]
    policies: list[SelectionPolicy] = []
    for nxt in systems[1:]:
        policy = train_policy(
            current,
            nxt,
            gold_dev,
            beta=beta,
            annotator=annotator,
            min_samples=min_samples,
            rounding=rounding,
            dev_name=dev_name,
        )
        merged = apply_policy(current, nxt, policy, seed=seed)
        current = SystemOutput(f"{current.name}+{nxt.name}", merged)
        policies.append(policy)
    return current.corpus, policies


def empty_system(like: M2Corpus, name: str = "") -> SystemOutput:
    """A system that proposes no corrections over the given sources."""
    return SystemOutput(
        name, M2Corpus(tuple(AnnotatedSentence(s.tokens, ()) for s in like))
    )


def filter_system(
    a: SystemOutput,
    gold_dev: M2Corpus,
    *,
    beta: float = 0.5,
    annotator: int = 0,
    min_samples: int = 2,
    rounding: str = "round",
    dev_name: str = "",
) -> tuple[SelectionPolicy, M2Corpus]:
    """Drop the error types a single system performs poorly on.

    Degenerate combination with an empty second system: only ONLY_A
    cells exist, so the optimizer reduces to a per-type keep/drop that
    can only remove harmful corrections.
    """
    b = empty_system(a.corpus)
    policy = train_policy(
        a,
        b,
        gold_dev,
        beta=beta,
        annotator=annotator,
        min_samples=min_samples,
        rounding=rounding,
        dev_name=dev_name,
    )
    return policy, apply_policy(a, b, policy)


def policy_to_json_dict(policy: SelectionPolicy) -> dict:
    """Serializable form of a policy with stable field and entry order."""
    entries = []
    for (etype, subset), entry in sorted(
        policy.entries.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
    ):
        entries.append(
            {
                "etype": etype,
                "subset": subset.value,
                "s": entry.s,
                "tp": entry.tp,
                "fp": entry.fp,
                "precision": entry.precision,
            }
        )
    return {
        "version": POLICY_VERSION,
        "beta": policy.beta,
        "min_samples": policy.min_samples,
        "entries": entries,
        "metadata": {
            "dev_name": policy.dev_name,
            "created": policy.created,
            "system_names": list(policy.system_names),
        },
    }


def policy_from_json_dict(data: dict) -> SelectionPolicy:
    version = data.get("version")
    if version != POLICY_VERSION:
        raise ValueError(f"unsupported policy version {version!r}")
    entries: dict[tuple[str, Subset], PolicyEntry] = {}
    for item in data["entries"]:
        subset = Subset(item["subset"])
        s = float(item["s"])
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"selection value {s} outside [0, 1]")
        entries[(item["etype"], subset)] = PolicyEntry(s, int(item["tp"]), int(item["fp"]))
    metadata = data.get("metadata", {})
    names = tuple(metadata.get("system_names", ())) + ("", "")
    return SelectionPolicy(
        beta=float(data["beta"]),
        min_samples=int(data["min_samples"]),
        entries=entries,
        dev_name=metadata.get("dev_name", ""),
        created=metadata.get("created", ""),
        system_names=names[:2],
    )


def save_policy(path: str | os.PathLike, policy: SelectionPolicy) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(policy_to_json_dict(policy), fh, indent=2)
        fh.write("\n")


def load_policy(path: str | os.PathLike) -> SelectionPolicy:
    with open(path, "r", encoding="utf-8") as fh:
        return policy_from_json_dict(json.load(fh))
