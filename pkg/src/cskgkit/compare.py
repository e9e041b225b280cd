"""Pairwise coverage between knowledge graphs and per-relation accuracy breakdowns."""
from __future__ import annotations

import hashlib
import math
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .anno import AnnotationRecord
from .kg_core import KnowledgeGraph, RelationMapping, data_path, iter_table
from .normalize import NormalizedIndex, NormalizerConfig, build_normalized_index, default_config

COVERAGE_FIELDS = ("precision_pct", "recall_raw_pct", "recall_dedup_pct", "matched_source_tuples",
                   "source_size", "target_size", "raw_matches", "hit_target_keys",
                   "target_distinct_keys")


def _pct(num: int, den: int) -> float | None:
    return None if den == 0 else 100.0 * num / den


@dataclass
class RelationCoverage:
    precision_pct: float | None
    recall_raw_pct: float | None
    recall_dedup_pct: float | None
    matched_source_tuples: int
    source_size: int
    target_size: int
    raw_matches: int
    hit_target_keys: int
    target_distinct_keys: int


@dataclass
class CoverageReport:
    """Coverage of ``target`` by ``source``.

    Sizes count matchable tuples (mapped relation, non-empty normalized head
    and tail). ``recall_raw_pct`` counts every (source tuple, target key)
    match, so one target key hit by two source tuples counts twice.
    """

    source: str
    target: str
    mode: str
    precision_pct: float | None
    recall_raw_pct: float | None
    recall_dedup_pct: float | None
    matched_source_tuples: int
    source_size: int
    target_size: int
    raw_matches: int
    hit_target_keys: int
    target_distinct_keys: int
    source_excluded: dict[str, int] = field(default_factory=dict)
    target_excluded: dict[str, int] = field(default_factory=dict)
    per_relation: dict[str, RelationCoverage] = field(default_factory=dict)
    config_digest: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_relation"] = {k: asdict(v) for k, v in sorted(self.per_relation.items())}
        return d


def config_digest(mapping: RelationMapping, config: NormalizerConfig, mode: str) -> str:
    h = hashlib.sha256()
    for row in [f"mode={mode}", *mapping.digest_rows(), *config.digest_rows()]:
        h.update(row.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()[:16]


def matched_keys(source: NormalizedIndex, target: NormalizedIndex) -> set:
    """Normalized keys present on both sides."""
    small, big = (source.keys, target.keys) if len(source.keys) <= len(target.keys) \
        else (target.keys, source.keys)
    return {k for k in small if k in big}


def coverage_from_indexes(src: NormalizedIndex, tgt: NormalizedIndex, digest: str = "",
                          source_name: str | None = None,
                          target_name: str | None = None) -> CoverageReport:
    tkeys = tgt.keys
    matched = raw = 0
    hit: set = set()
    rel_src: Counter = Counter()
    rel_matched: Counter = Counter()
    rel_raw: Counter = Counter()
    for keys in src.tuple_keys.values():
        found = [k for k in keys if k in tkeys]
        if found:
            matched += 1
            raw += len(found)
            hit.update(found)
        for rel in {k.relation for k in keys}:
            rel_src[rel] += 1
        for rel in {k.relation for k in found}:
            rel_matched[rel] += 1
        for k in found:
            rel_raw[k.relation] += 1

    rel_tgt_tuples: Counter = Counter()
    for keys in tgt.tuple_keys.values():
        for rel in {k.relation for k in keys}:
            rel_tgt_tuples[rel] += 1
    rel_tgt_keys = Counter(k.relation for k in tkeys)
    rel_hit = Counter(k.relation for k in hit)

    per_relation = {}
    for rel in sorted(set(rel_src) | set(rel_tgt_keys)):
        per_relation[rel.name] = RelationCoverage(
            _pct(rel_matched[rel], rel_src[rel]), _pct(rel_raw[rel], rel_tgt_keys[rel]),
            _pct(rel_hit[rel], rel_tgt_keys[rel]), rel_matched[rel], rel_src[rel],
            rel_tgt_tuples[rel], rel_raw[rel], rel_hit[rel], rel_tgt_keys[rel])

    ntk = len(tkeys)
    return CoverageReport(
        source=source_name or src.kg_id, target=target_name or tgt.kg_id, mode=src.mode,
        precision_pct=_pct(matched, src.matchable), recall_raw_pct=_pct(raw, ntk),
        recall_dedup_pct=_pct(len(hit), ntk), matched_source_tuples=matched,
        source_size=src.matchable, target_size=tgt.matchable, raw_matches=raw,
        hit_target_keys=len(hit), target_distinct_keys=ntk,
        source_excluded={"degenerate": len(src.degenerate), "unmapped": len(src.unmapped)},
        target_excluded={"degenerate": len(tgt.degenerate), "unmapped": len(tgt.unmapped)},
        per_relation=per_relation, config_digest=digest)


def coverage(source: KnowledgeGraph, target: KnowledgeGraph, mapping: RelationMapping,
             mode: str = "all-targets", config: NormalizerConfig | None = None,
             workers: int = 1) -> CoverageReport:
    config = config or default_config()
    src = build_normalized_index(source, mapping, mode, config, workers)
    tgt = build_normalized_index(target, mapping, mode, config, workers)
    return coverage_from_indexes(src, tgt, config_digest(mapping, config, mode))


def coverage_matrix(kgs: Sequence[KnowledgeGraph], mapping: RelationMapping,
                    mode: str = "all-targets", config: NormalizerConfig | None = None,
                    workers: int = 1) -> dict[tuple[str, str], CoverageReport]:
    """Every ordered (source, target) pair except the diagonal; each index is built once."""
    if len(kgs) < 2:
        raise ValueError("coverage_matrix needs at least two knowledge graphs")
    ids = [kg.id for kg in kgs]
    if len(set(ids)) != len(ids):
        raise ValueError(f"knowledge graph ids must be distinct: {ids}")
    config = config or default_config()
    digest = config_digest(mapping, config, mode)
    indexes = [build_normalized_index(kg, mapping, mode, config, workers) for kg in kgs]
    return {(a.kg_id, b.kg_id): coverage_from_indexes(a, b, digest)
            for a in indexes for b in indexes if a is not b}


def _fmt(v: float | None) -> str:
    return "NA" if v is None else f"{v:.1f}"


def render_matrix_tsv(reports: dict[tuple[str, str], CoverageReport], metric: str,
                      order: Sequence[str] | None = None) -> str:
    """Source rows by target columns for one metric; the diagonal prints as ``-``."""
    names = list(order) if order else sorted({k for pair in reports for k in pair})
    lines = ["source\\target\t" + "\t".join(names)]
    for s in names:
        cells = ["-" if s == t else _fmt(getattr(reports[(s, t)], metric)) if (s, t) in reports
                 else "NA" for t in names]
        lines.append(s + "\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"


def render_report_tsv(report: CoverageReport) -> str:
    cols = ("relation",) + COVERAGE_FIELDS
    lines = ["\t".join(cols)]

    def row(name, obj):
        vals = [getattr(obj, c) for c in COVERAGE_FIELDS]
        return "\t".join([name] + [_fmt(v) if c.endswith("_pct") else str(v)
                                   for c, v in zip(COVERAGE_FIELDS, vals)])
    lines.append(row("ALL", report))
    for name in sorted(report.per_relation):
        lines.append(row(name, report.per_relation[name]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- accuracy

SIGNIFICANCE_TEST = "two-proportion z-test on accept rate, two-sided"
ALL_GROUP = "ALL"


def load_cognate_groups(path=None) -> dict[str, str]:
    """relation name -> group label."""
    path = path or data_path("cognates.tsv")
    groups = {}
    for row in iter_table(path):
        for name in row[1].split(","):
            groups[name.strip()] = row[0]
    return groups


def two_proportion_p(x1: int, n1: int, x2: int, n2: int) -> float:
    """Two-sided p-value of H0: equal proportions (pooled variance)."""
    if n1 == 0 or n2 == 0:
        return 1.0
    pool = (x1 + x2) / (n1 + n2)
    se = math.sqrt(pool * (1 - pool) * (1 / n1 + 1 / n2))
    if se == 0:
        return 1.0
    z = (x1 / n1 - x2 / n2) / se
    return math.erfc(abs(z) / math.sqrt(2))


@dataclass
class AccuracyRow:
    kg: str
    group: str
    n: int
    accept_pct: float
    reject_pct: float
    no_judgment_pct: float
    p_value: float | None = None
    significant: bool | None = None


@dataclass
class AccuracyTable:
    rows: list[AccuracyRow]
    baseline: str | None
    alpha: float
    test: str = SIGNIFICANCE_TEST
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_tsv(self) -> str:
        head = ["kg", "group", "n", "accept_pct", "reject_pct", "no_judgment_pct", "p_value",
                "significant"]
        lines = [f"# test: {self.test}; baseline: {self.baseline}; alpha: {self.alpha}",
                 "\t".join(head)]
        for r in self.rows:
            lines.append("\t".join([r.kg, r.group, str(r.n), f"{r.accept_pct:.1f}",
                                    f"{r.reject_pct:.1f}", f"{r.no_judgment_pct:.1f}",
                                    "NA" if r.p_value is None else f"{r.p_value:.4g}",
                                    "NA" if r.significant is None else str(r.significant)]))
        return "\n".join(lines) + "\n"


def accuracy_breakdown(annotations: Iterable[AnnotationRecord], groups: dict[str, str] | None = None,
                       baseline: str | None = "atomic2020", alpha: float = 0.05) -> AccuracyTable:
    """Accept/Reject/No-Judgment percentages per (KG, relation group), plus an ``ALL`` row per KG.

    Relations absent from ``groups`` form their own group. Rows of non-baseline
    KGs carry a p-value against the baseline's row for the same group.
    """
    groups = load_cognate_groups() if groups is None else groups
    counts: dict[tuple[str, str], Counter] = defaultdict(Counter)
    diagnostics = []
    for rec in annotations:
        if not rec.kg or not rec.relation:
            diagnostics.append(f"record {rec.tuple_id!r} lacks kg/relation; skipped")
            continue
        g = groups.get(rec.relation, rec.relation)
        counts[(rec.kg, g)][rec.final_label] += 1
        counts[(rec.kg, ALL_GROUP)][rec.final_label] += 1
    listed = set(groups.values())
    for kg in sorted({k for k, _ in counts}):
        for g in sorted(listed):
            if (kg, g) not in counts:
                diagnostics.append(f"{kg}: group {g!r} has no annotations; row omitted")

    rows = []
    for (kg, g) in sorted(counts, key=lambda kgg: (kgg[0], kgg[1] != ALL_GROUP, kgg[1])):
        c = counts[(kg, g)]
        n = sum(c.values())
        row = AccuracyRow(kg, g, n, 100.0 * c["accept"] / n, 100.0 * c["reject"] / n,
                          100.0 * c["no_judgment"] / n)
        base = counts.get((baseline, g)) if baseline else None
        if base is not None and kg != baseline:
            row.p_value = two_proportion_p(c["accept"], n, base["accept"], sum(base.values()))
            row.significant = row.p_value < alpha
        rows.append(row)
    return AccuracyTable(rows, baseline, alpha, diagnostics=diagnostics)
