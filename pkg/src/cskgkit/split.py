"""Adversarial train/dev/test splits with head-disjointness over normalized head keys."""
from __future__ import annotations

import json
import os
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .kg_core import SPLITS, KGTuple, KnowledgeGraph
from .normalize import NormalizerConfig, default_config, normalize_concept

# train/dev/test tuple counts of the ATOMIC-2020 release, used as default proportions
_REFERENCE_COUNTS = (1_076_880, 102_024, 152_209)
DEFAULT_RATIOS = tuple(c / sum(_REFERENCE_COUNTS) for c in _REFERENCE_COUNTS)
DEFAULT_CAP = 500
CAP_BASIS = "normalized head key"


@dataclass(frozen=True)
class SplitConfig:
    ratios: tuple[float, float, float] = DEFAULT_RATIOS
    max_head_tuples_eval: int = DEFAULT_CAP
    min_confidence: float | None = None
    seed: int = 0
    preserve_upstream: bool = False

    def __post_init__(self):
        ratios = tuple(float(r) for r in self.ratios)
        object.__setattr__(self, "ratios", ratios)
        if len(ratios) != 3 or any(not r > 0 for r in ratios):
            raise ValueError(f"ratios must be three positive numbers, got {self.ratios}")
        if abs(sum(ratios) - 1.0) > 1e-9:
            raise ValueError(f"ratios must sum to 1, got {sum(ratios)!r}")
        if int(self.max_head_tuples_eval) != self.max_head_tuples_eval or self.max_head_tuples_eval < 1:
            raise ValueError("max_head_tuples_eval must be a positive integer")
        if self.min_confidence is not None and not self.min_confidence >= 0:
            raise ValueError("min_confidence must be >= 0")

    def keeps(self, t: KGTuple) -> bool:
        # with a threshold set, tuples without a weight cannot be vouched for and are dropped
        if self.min_confidence is None:
            return True
        return t.weight is not None and t.weight >= self.min_confidence


@dataclass
class SplitResult:
    assignment: dict[str, str]
    head_partition: dict[str, str]
    counts: dict[str, int]
    dropped_low_confidence: int
    achieved_ratios: tuple[float, ...] = ()
    warnings: list[str] = field(default_factory=list)
    cap_basis: str = CAP_BASIS

    def ids(self, split: str) -> list[str]:
        return [i for i, s in self.assignment.items() if s == split]

    def header(self) -> dict:
        return {"counts": self.counts, "dropped_low_confidence": self.dropped_low_confidence,
                "achieved_ratios": list(self.achieved_ratios), "cap_basis": self.cap_basis,
                "warnings": self.warnings}


def _head_key(t: KGTuple, config: NormalizerConfig) -> str:
    return normalize_concept(t.head, t.source or t.relation.kg, config)


def make_adversarial_split(kg: KnowledgeGraph | Iterable[KGTuple], config: SplitConfig,
                           normalizer: NormalizerConfig | None = None) -> SplitResult:
    normalizer = normalizer or default_config()
    kept, dropped = [], 0
    for t in kg:
        if config.keeps(t):
            kept.append(t)
        else:
            dropped += 1

    groups: dict[str, list[KGTuple]] = {}
    for t in kept:
        groups.setdefault(_head_key(t, normalizer), []).append(t)

    total = len(kept)
    targets = [r * total for r in config.ratios]
    filled = [0, 0, 0]
    partition: dict[str, str] = {}
    free = []
    for key in sorted(groups):
        members = groups[key]
        if len(members) > config.max_head_tuples_eval:
            forced = "train"
        elif config.preserve_upstream:
            tags = {t.split for t in members if t.split is not None}
            forced = (tags.pop() if len(tags) == 1 else "train") if tags else None
        else:
            forced = None
        if forced is None:
            free.append(key)
        else:
            partition[key] = forced
            filled[SPLITS.index(forced)] += len(members)

    warnings = []
    over = [s for s, f, tg in zip(SPLITS, filled, targets) if f > tg]
    if over:
        warnings.append(f"forced assignments exceed the budget of {', '.join(over)}")

    random.Random(config.seed).shuffle(free)
    for key in free:
        # largest remaining deficit wins; ties resolve in train, dev, test order
        i = max(range(3), key=lambda j: (targets[j] - filled[j], -j))
        partition[key] = SPLITS[i]
        filled[i] += len(groups[key])

    assignment = {}
    for t in kept:
        assignment[t.id] = partition[_head_key(t, normalizer)]
    achieved = tuple(f / total for f in filled) if total else (0.0, 0.0, 0.0)
    if over:
        warnings.append("achieved ratios " + "/".join(f"{a:.4f}" for a in achieved))
    return SplitResult(assignment, dict(sorted(partition.items())),
                       dict(zip(SPLITS, filled)), dropped, achieved, warnings)


def verify_split(kg: KnowledgeGraph | Iterable[KGTuple], result: SplitResult, config: SplitConfig,
                 normalizer: NormalizerConfig | None = None) -> list[str]:
    """Human-readable violations; empty when the split is valid."""
    normalizer = normalizer or default_config()
    tuples = list(kg)
    violations = []
    by_id = {t.id: t for t in tuples}
    for tid, s in result.assignment.items():
        if tid not in by_id:
            violations.append(f"completeness: assigned id {tid!r} is not in the KG")
        elif s not in SPLITS:
            violations.append(f"completeness: tuple {tid!r} has unknown split {s!r}")
    kept = [t for t in tuples if config.keeps(t)]
    for t in tuples:
        if not config.keeps(t) and t.id in result.assignment:
            violations.append(f"confidence: tuple {t.id!r} below threshold was assigned")
    for t in kept:
        if t.id not in result.assignment:
            violations.append(f"completeness: tuple {t.id!r} is not assigned")
    if len(result.assignment) + result.dropped_low_confidence != len(tuples):
        violations.append(f"completeness: {len(result.assignment)} assigned + "
                          f"{result.dropped_low_confidence} dropped != {len(tuples)} tuples")

    splits_of: dict[str, set[str]] = {}
    size: Counter = Counter()
    for t in kept:
        s = result.assignment.get(t.id)
        if s is None:
            continue
        key = _head_key(t, normalizer)
        splits_of.setdefault(key, set()).add(s)
        size[key] += 1
    for key in sorted(splits_of):
        if len(splits_of[key]) > 1:
            violations.append(f"disjointness: head {key!r} appears in {sorted(splits_of[key])}")
        elif size[key] > config.max_head_tuples_eval and splits_of[key] != {"train"}:
            violations.append(f"cap: head {key!r} with {size[key]} tuples is in "
                              f"{next(iter(splits_of[key]))}")
    return violations


def write_assignment_jsonl(result: SplitResult, dest: str | os.PathLike) -> int:
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        for tid, s in result.assignment.items():
            fh.write(json.dumps({"id": tid, "split": s}, ensure_ascii=False) + "\n")
    return len(result.assignment)


def write_split_files(kg: Iterable[KGTuple], result: SplitResult, outdir: str | os.PathLike,
                      stem: str = "") -> dict[str, Path]:
    """One canonical tuple JSONL per split, tuples carrying their new split tag."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {s: outdir / f"{stem}{s}.jsonl" for s in SPLITS}
    handles = {s: open(p, "w", encoding="utf-8", newline="\n") for s, p in paths.items()}
    try:
        for t in kg:
            s = result.assignment.get(t.id)
            if s is None:
                continue
            rec = t.to_record()
            rec["split"] = s
            handles[s].write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
    finally:
        for fh in handles.values():
            fh.close()
    return paths
