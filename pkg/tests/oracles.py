"""Slow, independent reference implementations used to check the library."""
from __future__ import annotations

from collections import Counter
from fractions import Fraction

from cskgkit.normalize import normalize_tuple


def _pct(num, den):
    return None if den == 0 else 100.0 * num / den


def coverage_oracle(source, target, mapping, mode, config):
    """Brute-force double loop over every (source tuple, target tuple) pair."""

    def keyed(tuples):
        out = []
        for t in tuples:
            keys = normalize_tuple(t, mapping, mode, config)
            if keys and all(k.head_key and k.tail_key for k in keys):
                out.append(keys)
        return out

    src, tgt = keyed(source), keyed(target)
    target_keys = set()
    for keys in tgt:
        target_keys |= keys

    matched = 0
    raw_pairs = set()
    hit = set()
    rel_src, rel_matched, rel_raw = Counter(), Counter(), Counter()
    for si, skeys in enumerate(src):
        found = set()
        for tkeys in tgt:
            found |= skeys & tkeys
        if found:
            matched += 1
        for k in found:
            raw_pairs.add((si, k))
        hit |= found
        for rel in {k.relation for k in skeys}:
            rel_src[rel] += 1
        for rel in {k.relation for k in found}:
            rel_matched[rel] += 1
        for k in found:
            rel_raw[k.relation] += 1

    rel_tgt_tuples = Counter()
    for tkeys in tgt:
        for rel in {k.relation for k in tkeys}:
            rel_tgt_tuples[rel] += 1
    rel_tgt_keys = Counter(k.relation for k in target_keys)
    rel_hit = Counter(k.relation for k in hit)

    per_relation = {}
    for rel in set(rel_src) | set(rel_tgt_keys):
        per_relation[rel.name] = {
            "precision_pct": _pct(rel_matched[rel], rel_src[rel]),
            "recall_raw_pct": _pct(rel_raw[rel], rel_tgt_keys[rel]),
            "recall_dedup_pct": _pct(rel_hit[rel], rel_tgt_keys[rel]),
            "matched_source_tuples": rel_matched[rel],
            "source_size": rel_src[rel],
            "target_size": rel_tgt_tuples[rel],
            "raw_matches": rel_raw[rel],
            "hit_target_keys": rel_hit[rel],
            "target_distinct_keys": rel_tgt_keys[rel],
        }
    return {
        "precision_pct": _pct(matched, len(src)),
        "recall_raw_pct": _pct(len(raw_pairs), len(target_keys)),
        "recall_dedup_pct": _pct(len(hit), len(target_keys)),
        "matched_source_tuples": matched,
        "source_size": len(src),
        "target_size": len(tgt),
        "raw_matches": len(raw_pairs),
        "hit_target_keys": len(hit),
        "target_distinct_keys": len(target_keys),
        "per_relation": per_relation,
    }


def windows(tokens, n):
    return [tuple(tokens[i:i + n]) for i in range(len(tokens)) if i + n <= len(tokens)]


def bleu_counts_oracle(hyp, refs, n):
    """(clipped matches, total) for order ``n`` via list enumeration and list.count."""
    grams = windows(hyp, n)
    ref_grams = [windows(r, n) for r in refs]
    matches = 0
    for g in set(grams):
        cap = max(rg.count(g) for rg in ref_grams)
        matches += min(grams.count(g), cap)
    return matches, len(grams)


def fleiss_kappa_oracle(matrix):
    """Exact rational Fleiss' kappa."""
    N = len(matrix)
    n = sum(matrix[0])
    k = len(matrix[0])
    p_i = [Fraction(sum(c * c for c in row) - n, n * (n - 1)) for row in matrix]
    p_bar = sum(p_i) / N
    p_j = [Fraction(sum(row[j] for row in matrix), N * n) for j in range(k)]
    pe = sum(p * p for p in p_j)
    return (p_bar - pe) / (1 - pe)


def lcs_oracle(a, b):
    """Recursive LCS with memoisation (tiny inputs only)."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))
    return go(0, 0)
