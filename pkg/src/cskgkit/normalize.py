"""Concept canonicalization and the normalized tuple index used for cross-KG matching."""
from __future__ import annotations

import hashlib
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .kernels import ConceptKernel
from .kg_core import (ATOMIC, ATOMIC2020, KGTuple, KnowledgeGraph, RelationId,
                      RelationMapping, data_path, iter_table)

PERSON_RULE_KGS = frozenset((ATOMIC, ATOMIC2020))
MODES = ("primary-only", "all-targets")


def load_stopwords(path=None) -> frozenset[str]:
    path = path or data_path("stopwords.txt")
    with open(path, encoding="utf-8") as fh:
        return frozenset(w.strip() for w in fh if w.strip() and not w.startswith("#"))


def load_lexicon(path=None) -> dict[tuple[str, str], str]:
    path = path or data_path("lemmas.tsv")
    return {(row[0], row[1]): row[2] for row in iter_table(path)}


def _file_digest(*paths) -> str:
    h = hashlib.sha256()
    for p in paths:
        with open(p, "rb") as fh:
            h.update(fh.read())
    return h.hexdigest()[:16]


@dataclass(eq=False)
class NormalizerConfig:
    stopword_list: frozenset[str]
    lemma_lexicon: dict[tuple[str, str], str]
    person_token: str = "person"
    blank_token: str = "blank"
    version: str = "custom"
    cache_size: int = 1 << 20
    _kernel: ConceptKernel | None = field(default=None, init=False, repr=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        self.stopword_list = frozenset(self.stopword_list)
        bad = sorted(w for w in self.stopword_list if w != w.lower())
        if bad:
            raise ValueError(f"stopwords must be lowercase: {bad[:5]}")
        for name in ("person_token", "blank_token"):
            token = getattr(self, name)
            if not token or token != token.casefold() or not token.isalnum():
                raise ValueError(f"{name} must be a single lowercase alphanumeric word")
            if token in self.stopword_list:
                raise ValueError(f"{name} {token!r} is in the stopword list")

    @property
    def kernel(self) -> ConceptKernel:
        if self._kernel is None:
            lexicon: dict[str, dict[str, str]] = {}
            for (surface, pos), lemma in self.lemma_lexicon.items():
                lexicon.setdefault(surface, {})[pos] = lemma
            self._kernel = ConceptKernel(self.stopword_list, lexicon,
                                         set(self.lemma_lexicon.values()),
                                         self.person_token, self.blank_token)
        return self._kernel

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_kernel"] = None
        state["_cache"] = {}
        return state

    def digest_rows(self) -> list[str]:
        return [f"normalizer={self.version}", f"person={self.person_token}",
                f"blank={self.blank_token}"]


_DEFAULT: NormalizerConfig | None = None


def default_config() -> NormalizerConfig:
    """Shipped stopword list and lemma lexicon (shared instance)."""
    global _DEFAULT
    if _DEFAULT is None:
        sw, lex = data_path("stopwords.txt"), data_path("lemmas.tsv")
        _DEFAULT = NormalizerConfig(load_stopwords(sw), load_lexicon(lex),
                                    version=_file_digest(sw, lex))
    return _DEFAULT


def normalize_concept(text: str, kg: str, config: NormalizerConfig | None = None) -> str:
    """Canonical token string for a head or tail concept.

    The empty string is a valid result (e.g. a concept made only of stopwords).
    """
    config = config or default_config()
    person_rule = kg in PERSON_RULE_KGS
    cache = config._cache
    key = (text, person_rule)
    out = cache.get(key)
    if out is None:
        out = config.kernel.normalize(text, person_rule)
        if len(cache) >= config.cache_size:
            cache.clear()
        cache[key] = out
    return out


class NormalizedKey(NamedTuple):
    head_key: str
    relation: RelationId
    tail_key: str


def normalize_tuple(t: KGTuple, mapping: RelationMapping, mode: str = "all-targets",
                    config: NormalizerConfig | None = None,
                    diagnostics: Counter | None = None) -> set[NormalizedKey]:
    """One key per mapped target relation; empty set for unmapped relations."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    targets = mapping.targets(t.relation, mode)
    if not targets:
        if diagnostics is not None:
            diagnostics["unmapped"] += 1
        return set()
    kg = t.source or t.relation.kg
    head = normalize_concept(t.head, kg, config)
    tail = normalize_concept(t.tail, kg, config)
    return {NormalizedKey(head, rel, tail) for rel in targets}


@dataclass
class NormalizedIndex:
    """Normalized keys of one KG with per-key tuple ids.

    ``keys`` excludes degenerate (empty head or tail key) and unmapped tuples,
    which are listed separately so denominators stay auditable.
    """

    kg_id: str
    mode: str
    keys: dict[NormalizedKey, list[str]] = field(default_factory=dict)
    tuple_keys: dict[str, tuple[NormalizedKey, ...]] = field(default_factory=dict)
    degenerate: list[str] = field(default_factory=list)
    unmapped: list[str] = field(default_factory=list)
    size: int = 0

    def __contains__(self, key) -> bool:
        return key in self.keys

    def __len__(self):
        return len(self.keys)

    def multiplicity(self, key: NormalizedKey) -> int:
        return len(self.keys.get(key, ()))

    @property
    def matchable(self) -> int:
        return len(self.tuple_keys)

    def diagnostics(self) -> dict[str, int]:
        return {"tuples": self.size, "matchable": self.matchable,
                "degenerate": len(self.degenerate), "unmapped": len(self.unmapped),
                "distinct_keys": len(self.keys)}


def _normalize_chunk(args):
    pairs, config = args
    return [(normalize_concept(h, kg, config), normalize_concept(t, kg, config))
            for h, t, kg in pairs]


def _concept_pairs(tuples: list[KGTuple], config, workers: int, chunk: int = 50_000):
    triples = [(t.head, t.tail, t.source or t.relation.kg) for t in tuples]
    if workers <= 1 or len(triples) < 2 * chunk:
        return _normalize_chunk((triples, config))
    shards = [(triples[i:i + chunk], config) for i in range(0, len(triples), chunk)]
    out = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_normalize_chunk, shards):  # map preserves shard order
            out.extend(part)
    return out


def build_normalized_index(kg: KnowledgeGraph | Iterable[KGTuple], mapping: RelationMapping,
                           mode: str = "all-targets", config: NormalizerConfig | None = None,
                           workers: int = 1) -> NormalizedIndex:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    config = config or default_config()
    tuples = list(kg)
    index = NormalizedIndex(getattr(kg, "id", ""), mode, size=len(tuples))
    mapped = []
    for t in tuples:
        targets = mapping.targets(t.relation, mode)
        if targets:
            mapped.append((t, targets))
        else:
            index.unmapped.append(t.id)
    pairs = _concept_pairs([t for t, _ in mapped], config, workers)
    keys = index.keys
    for (t, targets), (head, tail) in zip(mapped, pairs):
        if not head or not tail:
            index.degenerate.append(t.id)
            continue
        tkeys = tuple(NormalizedKey(head, rel, tail) for rel in targets)
        index.tuple_keys[t.id] = tkeys
        for k in tkeys:
            ids = keys.get(k)
            if ids is None:
                keys[k] = [t.id]
            else:
                ids.append(t.id)
    return index
