"""Render tuples as human-readable prompts, LM prefixes, few-shot blocks and training lines."""
from __future__ import annotations

import random
import re
from typing import Iterable

from .kg_core import KGTuple, RelationId, data_path, iter_table

GEN_TOKEN = "[GEN]"
SEP_TOKEN = "[SEP]"
FEWSHOT_K = 5
# decoding-side settings used with few-shot blocks; recorded as metadata only
FEWSHOT_TEMPERATURE = 0.4
FEWSHOT_SEEDS = 3

_LINE_RE = re.compile(r"^(.+) (\S+) \[GEN\] (.+) \[SEP\]$", re.DOTALL)


class TemplateError(KeyError):
    pass


class TemplateTable(dict):
    """Relation name -> human readable template."""

    version = "custom"

    @classmethod
    def from_file(cls, path=None) -> "TemplateTable":
        path = path or data_path("templates.tsv")
        table = cls((row[0], row[1]) for row in iter_table(path))
        with open(path, encoding="utf-8") as fh:
            first = fh.readline()
        if first.startswith("#") and "version" in first:
            table.version = first.split("version", 1)[1].strip()
        return table

    def template(self, relation: RelationId | str) -> str:
        name = relation.name if isinstance(relation, RelationId) else relation
        try:
            return self[name]
        except KeyError:
            raise TemplateError(f"no template for relation {name!r}") from None


_DEFAULT_TABLE: TemplateTable | None = None


def default_templates() -> TemplateTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = TemplateTable.from_file()
    return _DEFAULT_TABLE


def render_prefix(head: str, relation: RelationId | str, table: TemplateTable | None = None) -> str:
    """Zero-shot query form: the head followed by the relation template."""
    table = table or default_templates()
    return f"{head} {table.template(relation)}"


def render_human(t: KGTuple, table: TemplateTable | None = None) -> str:
    return f"{render_prefix(t.head, t.relation, table)} {t.tail}"


def check_exportable(text: str) -> None:
    if GEN_TOKEN in text or SEP_TOKEN in text:
        raise ValueError(f"text contains a reserved delimiter token: {text!r}")
    # splitlines knows every Unicode line boundary, not just \n and \r
    if text.splitlines() != [text]:
        raise ValueError(f"text is empty or spans several lines: {text!r}")


def render_training_line(t: KGTuple, relation_format: str = "{name}") -> str:
    """``head relation [GEN] tail [SEP]``; heads/tails holding delimiters are rejected.

    ``relation_format`` may wrap the relation token, e.g. ``"<{name}>"``.
    """
    check_exportable(t.head)
    check_exportable(t.tail)
    rel = relation_format.format(name=t.relation.name)
    return f"{t.head} {rel} {GEN_TOKEN} {t.tail} {SEP_TOKEN}"


def parse_training_line(line: str) -> tuple[str, str, str]:
    """Inverse of :func:`render_training_line` with the default relation format."""
    m = _LINE_RE.match(line.rstrip("\n"))
    if m is None:
        raise ValueError(f"not a training line: {line!r}")
    return m.group(1), m.group(2), m.group(3)


def build_fewshot_block(relation: RelationId | str, pool: Iterable[KGTuple], query_head: str,
                        k: int = FEWSHOT_K, seed: int = 0,
                        table: TemplateTable | None = None) -> str:
    """k seeded examples of ``relation`` rendered as full sentences, then the query prefix."""
    name = relation.name if isinstance(relation, RelationId) else relation
    candidates = []
    for t in pool:
        if t.relation.name != name:
            continue
        if t.split not in (None, "train"):
            raise ValueError(f"priming pool tuple {t.id!r} is from split {t.split!r}, not train")
        candidates.append(t)
    if k < 0:
        raise ValueError("k must be >= 0")
    if len(candidates) < k:
        raise ValueError(f"need {k} priming examples for {name}, only {len(candidates)} available")
    candidates.sort(key=lambda t: t.id)
    chosen = random.Random(seed).sample(candidates, k)
    lines = [render_human(t, table) for t in chosen]
    lines.append(render_prefix(query_head, name, table))
    return "\n".join(lines)
