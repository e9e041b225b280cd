"""Human-evaluation support: HIT sampling, vote aggregation and Fleiss' kappa."""
from __future__ import annotations

import csv
import os
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .kg_core import KGTuple, KnowledgeGraph, RelationId
from .verbalize import TemplateTable, render_human

LIKERT = ("always_often", "sometimes_likely", "farfetched_never", "invalid", "no_judgment")
FINAL = ("accept", "reject", "no_judgment")
HIT_SIZE = 5

_BINARY = {"always_often": "accept", "sometimes_likely": "accept",
           "farfetched_never": "reject", "invalid": "reject", "no_judgment": "no_judgment"}

_LABEL_ALIASES = {
    "always/often": "always_often", "sometimes/likely": "sometimes_likely",
    "farfetched/never": "farfetched_never", "no judgment": "no_judgment",
    "no_judgement": "no_judgment", "nojudgment": "no_judgment",
}


def parse_label(raw: str) -> str:
    key = raw.strip().lower()
    key = _LABEL_ALIASES.get(key, key)
    key = key.replace(" ", "_").replace("-", "_").replace("/", "_")
    key = _LABEL_ALIASES.get(key, key)
    if key not in _BINARY:
        raise ValueError(f"unknown rating label {raw!r}")
    return key


@dataclass(frozen=True)
class Rating:
    tuple_id: str
    worker_id: str
    label: str
    hit_id: str = ""

    def __post_init__(self):
        if self.label not in _BINARY:
            raise ValueError(f"unknown rating label {self.label!r}")


def binarize(label: str) -> str:
    return _BINARY[label]


def aggregate_votes(ratings: Sequence[Rating | str]) -> str:
    """Strict-majority vote over binarized labels; anything short of a majority is no_judgment."""
    if not ratings:
        raise ValueError("aggregate_votes needs at least one rating")
    counts = Counter(binarize(r.label if isinstance(r, Rating) else r) for r in ratings)
    total = len(ratings)
    for label in ("accept", "reject"):
        if 2 * counts[label] > total:
            return label
    return "no_judgment"


@dataclass
class AnnotationRecord:
    tuple_id: str
    ratings: list[Rating]
    final_label: str = field(init=False)
    kg: str = ""
    relation: str = ""

    def __post_init__(self):
        workers = Counter(r.worker_id for r in self.ratings)
        dup = sorted(w for w, c in workers.items() if c > 1)
        if dup:
            raise ValueError(f"tuple {self.tuple_id!r} rated more than once by {dup}")
        if any(r.tuple_id != self.tuple_id for r in self.ratings):
            raise ValueError(f"rating for another tuple attached to {self.tuple_id!r}")
        self.final_label = aggregate_votes(self.ratings)


def build_records(ratings: Iterable[Rating], meta: dict[str, tuple[str, str]] | None = None
                  ) -> list[AnnotationRecord]:
    """Group ratings per tuple (first-seen order). ``meta`` maps tuple id -> (kg, relation)."""
    grouped: dict[str, list[Rating]] = {}
    for r in ratings:
        grouped.setdefault(r.tuple_id, []).append(r)
    meta = meta or {}
    out = []
    for tid, rs in grouped.items():
        kg, rel = meta.get(tid, ("", ""))
        out.append(AnnotationRecord(tid, rs, kg=kg, relation=rel))
    return out


# ---------------------------------------------------------------- agreement

@dataclass(frozen=True)
class KappaResult:
    kappa: float
    degenerate: bool
    items: int
    raters: int
    mode: str = "binarized"


def fleiss_kappa_result(matrix: Sequence[Sequence[int]], mode: str = "binarized") -> KappaResult:
    rows = [list(map(int, row)) for row in matrix]
    if not rows:
        raise ValueError("fleiss_kappa needs at least one item")
    n = sum(rows[0])
    if n < 2:
        raise ValueError("fleiss_kappa needs at least 2 ratings per item")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width or sum(row) != n or min(row) < 0:
            raise ValueError(f"item {i} does not have {n} non-negative ratings over {width} categories")
    N = len(rows)
    p_bar = sum((sum(c * c for c in row) - n) / (n * (n - 1)) for row in rows) / N
    p_j = [sum(row[j] for row in rows) / (N * n) for j in range(width)]
    pe = sum(p * p for p in p_j)
    if pe == 1.0:
        return KappaResult(1.0, True, N, n, mode)
    return KappaResult((p_bar - pe) / (1.0 - pe), False, N, n, mode)


def fleiss_kappa(matrix: Sequence[Sequence[int]]) -> float:
    return fleiss_kappa_result(matrix).kappa


def rating_matrix(records: Iterable[AnnotationRecord], mode: str = "binarized"
                  ) -> tuple[list[list[int]], int]:
    """Item x category counts; items whose rating count differs from the most common count are dropped.

    Returns ``(matrix, dropped)``. ``mode`` is ``binarized`` (accept/reject/no_judgment)
    or ``likert`` (the five raw labels).
    """
    if mode == "binarized":
        cats, fold = FINAL, binarize
    elif mode == "likert":
        cats, fold = LIKERT, (lambda x: x)
    else:
        raise ValueError(f"unknown kappa mode {mode!r}")
    records = list(records)
    if not records:
        return [], 0
    sizes = Counter(len(r.ratings) for r in records)
    # most common size; ties broken toward the larger panel
    n = max(sizes, key=lambda s: (sizes[s], s))
    matrix = []
    for r in records:
        if len(r.ratings) != n:
            continue
        c = Counter(fold(x.label) for x in r.ratings)
        matrix.append([c[k] for k in cats])
    return matrix, len(records) - len(matrix)


# ---------------------------------------------------------------- HIT sampling

@dataclass
class HitBatch:
    hit_id: str
    relation: RelationId
    tuple_ids: list[str]
    rendered_prompts: list[str]
    short: bool = False

    def __post_init__(self):
        if len(self.tuple_ids) != len(self.rendered_prompts):
            raise ValueError("one prompt per tuple required")
        if not self.short and len(self.tuple_ids) != HIT_SIZE:
            raise ValueError(f"a full HIT holds exactly {HIT_SIZE} tuples")


def sample_for_eval(kg: KnowledgeGraph | Sequence[KGTuple], n: int, seed: int,
                    table: TemplateTable | None = None) -> list[HitBatch]:
    tuples = list(kg)
    if not 0 <= n <= len(tuples):
        raise ValueError(f"cannot sample {n} tuples from a KG of {len(tuples)}")
    rng = random.Random(seed)
    picked = rng.sample(range(len(tuples)), n)
    chosen = set(picked)
    by_rel: dict[RelationId, list[int]] = {}
    for i in picked:
        by_rel.setdefault(tuples[i].relation, []).append(i)

    hits: list[HitBatch] = []
    for rel in sorted(by_rel):
        idx = by_rel[rel]
        rem = len(idx) % HIT_SIZE
        if rem:
            pool = [i for i, t in enumerate(tuples) if t.relation == rel and i not in chosen]
            idx = idx + rng.sample(pool, min(HIT_SIZE - rem, len(pool)))
        for start in range(0, len(idx), HIT_SIZE):
            chunk = [tuples[i] for i in idx[start:start + HIT_SIZE]]
            hits.append(HitBatch(f"hit-{len(hits) + 1:05d}", rel, [t.id for t in chunk],
                                 [render_human(t, table) for t in chunk],
                                 short=len(chunk) < HIT_SIZE))
    return hits


HIT_COLUMNS = ("hit_id", "position", "tuple_id", "kg", "relation", "prompt", "short")
RATING_COLUMNS = ("hit_id", "tuple_id", "worker_id", "label")


def write_hits_csv(hits: Iterable[HitBatch], dest: str | os.PathLike) -> int:
    rows = 0
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HIT_COLUMNS)
        for h in hits:
            for pos, (tid, prompt) in enumerate(zip(h.tuple_ids, h.rendered_prompts), 1):
                w.writerow((h.hit_id, pos, tid, h.relation.kg, h.relation.name, prompt,
                            int(h.short)))
                rows += 1
    return rows


def read_hit_meta(path: str | os.PathLike) -> dict[str, tuple[str, str]]:
    """tuple id -> (kg, relation) from an exported HIT CSV."""
    with open(path, encoding="utf-8", newline="") as fh:
        return {row["tuple_id"]: (row["kg"], row["relation"]) for row in csv.DictReader(fh)}


def read_ratings_csv(path: str | os.PathLike) -> list[Rating]:
    """Structural validation only: required columns, known labels, one rating per worker and tuple."""
    out = []
    seen = set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in RATING_COLUMNS if c not in (reader.fieldnames or ())]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        for lineno, row in enumerate(reader, 2):
            try:
                label = parse_label(row["label"])
            except ValueError as e:
                raise ValueError(f"{path}:{lineno}: {e}") from None
            key = (row["tuple_id"], row["worker_id"])
            if key in seen:
                raise ValueError(f"{path}:{lineno}: duplicate rating by worker "
                                 f"{key[1]!r} for tuple {key[0]!r}")
            seen.add(key)
            out.append(Rating(row["tuple_id"], row["worker_id"], label, row["hit_id"]))
    return out
