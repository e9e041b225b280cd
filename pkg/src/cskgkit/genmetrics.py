"""Automated generation metrics: corpus BLEU-1..4, ROUGE-L, METEOR (exact + stem) and CIDEr-D."""
from __future__ import annotations

import hashlib
import json
import math
import os
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .kernels import lcs_length, strip_punct, suffix_step
from .kg_core import RelationId, RelationRegistry

BLEU_EPSILON = 1e-9
ROUGE_BETA = 1.2
METEOR_ALPHA = 0.9  # Fmean = PR / (alpha P + (1 - alpha) R)
METEOR_GAMMA = 0.5
METEOR_BETA = 3.0
CIDER_SIGMA = 6.0
TSV_COLUMNS = ("Bleu-1", "Bleu-2", "Bleu-3", "Bleu-4", "METEOR", "ROUGE-L", "CIDEr")

HEADER = {
    "bleu": "corpus level, clipped counts, closest-reference brevity penalty; "
            f"zero match counts smoothed with epsilon={BLEU_EPSILON}; orders with no "
            "hypothesis n-grams count as precision 1",
    "rouge_l": f"LCS F-measure, beta={ROUGE_BETA}, max over references, mean over records",
    "meteor": "exact then suffix-stem unigram matching, no synonyms; "
              f"penalty {METEOR_GAMMA}*((chunks-1)/(matches-1))^{METEOR_BETA:g}",
    "cider": f"CIDEr-D, n=1..4, document frequencies over this run's references, sigma={CIDER_SIGMA}",
}


def tokenize(text: str) -> list[str]:
    return strip_punct(text.lower()).split()


@dataclass(frozen=True)
class GenerationRecord:
    head: str
    relation: RelationId | str
    hypothesis: str
    references: tuple[str, ...]

    def __post_init__(self):
        refs = tuple(self.references)
        if not refs:
            raise ValueError(f"record for head {self.head!r} has no references")
        object.__setattr__(self, "references", refs)

    @property
    def relation_name(self) -> str:
        return self.relation.name if isinstance(self.relation, RelationId) else self.relation


def load_generations(path: str | os.PathLike, kg: str = "") -> list[GenerationRecord]:
    """JSONL rows ``{head, relation, generation, references: [...]}``; errors name file:line."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                refs = rec["references"]
                if isinstance(refs, str) or not isinstance(refs, list):
                    raise ValueError("references must be a list")
                rel = rec["relation"]
                space = rec.get("kg", kg)
                out.append(GenerationRecord(rec["head"], RelationId(space, rel) if space else rel,
                                            rec.get("generation") or "", tuple(refs)))
            except (KeyError, ValueError, TypeError) as e:
                raise ValueError(f"{path}:{lineno}: {e}") from None
    return out


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


# ---------------------------------------------------------------- BLEU

def _closest_ref_len(c: int, ref_lens: Sequence[int]) -> int:
    return min(ref_lens, key=lambda r: (abs(r - c), r))


def bleu_stats(hyp: Sequence[str], refs: Sequence[Sequence[str]], max_n: int = 4) -> list[int]:
    """[c, r, match_1, total_1, ..., match_n, total_n] for one record."""
    stats = [len(hyp), _closest_ref_len(len(hyp), [len(r) for r in refs])]
    for n in range(1, max_n + 1):
        h = ngrams(hyp, n)
        best: Counter = Counter()
        for ref in refs:
            best |= ngrams(ref, n)
        stats.append(sum(min(c, best[g]) for g, c in h.items()))
        stats.append(max(len(hyp) - n + 1, 0))
    return stats


def bleu_from_stats(stats: Sequence[int], max_n: int = 4) -> tuple[float, ...]:
    c, r = stats[0], stats[1]
    if c == 0:
        return (0.0,) * max_n
    bp = 1.0 if c > r else math.exp(1.0 - r / c)
    logs = []
    out = []
    for n in range(max_n):
        match, total = stats[2 + 2 * n], stats[3 + 2 * n]
        if total == 0:
            p = 1.0
        elif match == 0:
            p = BLEU_EPSILON / total
        else:
            p = match / total
        logs.append(math.log(p))
        out.append(bp * math.exp(math.fsum(logs) / len(logs)))
    return tuple(out)


# ---------------------------------------------------------------- ROUGE-L

def rouge_l(hyp: Sequence[str], ref: Sequence[str], beta: float = ROUGE_BETA) -> float:
    if not hyp or not ref:
        return 0.0
    lcs = lcs_length(hyp, ref)
    if lcs == 0:
        return 0.0
    p, r = lcs / len(hyp), lcs / len(ref)
    return (1 + beta * beta) * p * r / (r + beta * beta * p)


# ---------------------------------------------------------------- METEOR

_STEM_CACHE: dict[str, str] = {}


def stem(word: str) -> str:
    out = _STEM_CACHE.get(word)
    if out is None:
        out = word
        while True:
            nxt = suffix_step(out, "v")
            if nxt is None or nxt == out:
                break
            out = nxt
        _STEM_CACHE[word] = out
    return out


def meteor_alignment(hyp: Sequence[str], ref: Sequence[str]) -> list[tuple[int, int]]:
    """(hyp position, ref position) pairs from an exact pass then a stem pass.

    Each pass walks the hypothesis left to right; a token takes the reference
    position right after its predecessor's match when that fits, else the
    leftmost free one.
    """
    link: list[int | None] = [None] * len(hyp)
    used = [False] * len(ref)
    for key in (lambda w: w, stem):
        hk = [key(w) for w in hyp]
        rk = [key(w) for w in ref]
        for i, w in enumerate(hk):
            if link[i] is not None:
                continue
            prev = next((link[j] for j in range(i - 1, -1, -1) if link[j] is not None), None)
            want = None
            if prev is not None and prev + 1 < len(ref) and not used[prev + 1] and rk[prev + 1] == w:
                want = prev + 1
            else:
                want = next((j for j in range(len(ref)) if not used[j] and rk[j] == w), None)
            if want is not None:
                link[i] = want
                used[want] = True
    return [(i, j) for i, j in enumerate(link) if j is not None]


def count_chunks(alignment: Sequence[tuple[int, int]]) -> int:
    chunks = 0
    last = None
    for i, j in sorted(alignment):
        if last is None or i != last[0] + 1 or j != last[1] + 1:
            chunks += 1
        last = (i, j)
    return chunks


def meteor(hyp: Sequence[str], ref: Sequence[str]) -> float:
    if not hyp or not ref:
        return 0.0
    align = meteor_alignment(hyp, ref)
    m = len(align)
    if m == 0:
        return 0.0
    p, r = m / len(hyp), m / len(ref)
    fmean = p * r / (METEOR_ALPHA * p + (1 - METEOR_ALPHA) * r)
    frag = (count_chunks(align) - 1) / (m - 1) if m > 1 else 0.0
    return fmean * (1.0 - METEOR_GAMMA * frag ** METEOR_BETA)


# ---------------------------------------------------------------- CIDEr-D

def _cider_vec(tokens: Sequence[str], df: Counter, log_n: float, max_n: int = 4):
    vec = [dict() for _ in range(max_n)]
    norm = [0.0] * max_n
    for n in range(1, max_n + 1):
        for g, tf in ngrams(tokens, n).items():
            w = tf * (log_n - math.log(max(1.0, df[g])))
            vec[n - 1][g] = w
            norm[n - 1] += w * w
    # length follows the reference implementation: the bigram count
    return vec, [math.sqrt(x) for x in norm], max(len(tokens) - 1, 0)


def _cider_sim(hv, rv, max_n: int = 4) -> float:
    (vh, nh, lh), (vr, nr, lr) = hv, rv
    delta = lh - lr
    total = []
    for n in range(max_n):
        val = math.fsum(min(w, vr[n].get(g, 0.0)) * vr[n].get(g, 0.0) for g, w in vh[n].items())
        if nh[n] != 0 and nr[n] != 0:
            val /= nh[n] * nr[n]
        total.append(val * math.exp(-(delta * delta) / (2 * CIDER_SIGMA ** 2)))
    return math.fsum(total) / max_n


def document_frequencies(ref_sets: Iterable[Sequence[Sequence[str]]], max_n: int = 4) -> Counter:
    df: Counter = Counter()
    for refs in ref_sets:
        grams = set()
        for ref in refs:
            for n in range(1, max_n + 1):
                grams.update(ngrams(ref, n))
        df.update(grams)
    return df


def cider_scores(hyps: Sequence[Sequence[str]], ref_sets: Sequence[Sequence[Sequence[str]]]
                 ) -> list[float]:
    df = document_frequencies(ref_sets)
    log_n = math.log(float(len(ref_sets))) if ref_sets else 0.0
    out = []
    for hyp, refs in zip(hyps, ref_sets):
        hv = _cider_vec(hyp, df, log_n)
        sims = [_cider_sim(hv, _cider_vec(r, df, log_n)) for r in refs]
        out.append(10.0 * math.fsum(sims) / len(sims))
    return out


# ---------------------------------------------------------------- reports

@dataclass
class ScoreReport:
    bleu: tuple[float, float, float, float]
    rouge_l: float
    meteor: float
    cider: float
    n: int
    corpus_digest: str
    low_n: bool = False
    header: dict = field(default_factory=lambda: dict(HEADER))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bleu"] = list(self.bleu)
        return d

    def tsv_row(self, system: str = "") -> str:
        vals = (*self.bleu, self.meteor, self.rouge_l, self.cider)
        return "\t".join([system] + [f"{v:.3f}" for v in vals])


def tsv_header() -> str:
    return "\t".join(("system",) + TSV_COLUMNS)


def corpus_digest(records: Sequence[GenerationRecord]) -> str:
    """Order-insensitive hash of the tokenized reference sets."""
    h = hashlib.sha256()
    for line in sorted(json.dumps([tokenize(r) for r in rec.references]) for rec in records):
        h.update(line.encode("utf-8") + b"\n")
    return h.hexdigest()[:16]


def score_corpus(records: Sequence[GenerationRecord]) -> ScoreReport:
    records = list(records)
    if not records:
        raise ValueError("score_corpus needs at least one record")
    hyps = [tokenize(r.hypothesis) for r in records]
    refs = [[tokenize(x) for x in r.references] for r in records]
    stats = [0] * 10
    rouge, met = [], []
    for h, rs in zip(hyps, refs):
        for k, v in enumerate(bleu_stats(h, rs)):
            stats[k] += v
        rouge.append(max(rouge_l(h, r) for r in rs))
        met.append(max(meteor(h, r) for r in rs))
    cider = cider_scores(hyps, refs)
    n = len(records)
    return ScoreReport(bleu_from_stats(stats), math.fsum(rouge) / n, math.fsum(met) / n,
                       math.fsum(cider) / n, n, corpus_digest(records), low_n=n < 2)


def score_per_relation(records: Sequence[GenerationRecord],
                       registry: RelationRegistry | None = None) -> dict[str, ScoreReport]:
    """Independent report per prefix relation (CIDEr frequencies are per partition too)."""
    parts: dict[str, list[GenerationRecord]] = {}
    for r in records:
        name = r.relation_name
        if registry is not None and isinstance(r.relation, RelationId):
            name = registry.canonical_name(r.relation.kg, name)
        parts.setdefault(name, []).append(r)
    return {name: score_corpus(parts[name]) for name in sorted(parts)}
