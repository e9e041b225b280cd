"""Command-line entry point: ``cskgkit <subcommand> [options]``.

Every subcommand accepts ``--config FILE`` (``key = value`` lines, optional
``[section]`` headers); flags given on the command line win over the file.
Reports carry a ``meta`` block (tool, version, config digest, seed); JSONL
and text outputs get a ``<file>.meta.json`` sidecar instead.
"""
from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import os
import sys
import traceback
from collections import Counter
from pathlib import Path

from . import TOOL_NAME, __version__
from .kg_core import ATOMIC2020, CATEGORIES, KnowledgeGraph, RelationMapping, derive_seed, \
    load_default_mapping, load_default_registries

# -- errors & metadata --------------------------------------------------------


class CliError(Exception):
    def __init__(self, module: str, message: str, hint: str = "", code: int = 1):
        super().__init__(message)
        self.module, self.message, self.hint, self.code = module, message, hint, code

    def to_dict(self) -> dict:
        return {"module": self.module, "message": self.message, "hint": self.hint}


class _Stage:
    """Turn exceptions raised inside a module call into a CliError naming that module."""

    def __init__(self, module: str, hint: str = "", code: int = 1):
        self.module, self.hint, self.code = module, hint, code

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is None or isinstance(exc, CliError):
            return False
        if isinstance(exc, (ValueError, KeyError, OSError, RuntimeError)):
            msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
            raise CliError(self.module, str(msg), self.hint, self.code) from exc
        return False


# options that name inputs: their file contents enter the digest, not their paths
_INPUT_KEYS = ("input", "source", "target", "inputs", "mapping", "ratings", "hits", "pool",
               "queries")
# options that only affect where or how fast results are produced
_NON_DIGEST = {"out", "out_dir", "config", "workers", "func", "parser"}


def _file_sha(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def config_digest(args: argparse.Namespace) -> str:
    h = hashlib.sha256(f"{TOOL_NAME} {__version__}\n".encode())
    items = {}
    for k, v in sorted(vars(args).items()):
        if k in _NON_DIGEST:
            continue
        if k in _INPUT_KEYS and v:
            paths = v if isinstance(v, list) else [v]
            items[k] = [_file_sha(str(p)) if Path(str(p)).is_file() else str(p) for p in paths]
        else:
            items[k] = v
    h.update(json.dumps(items, sort_keys=True, default=str).encode())
    return h.hexdigest()[:16]


def artifact_meta(args: argparse.Namespace) -> dict:
    return {"tool": TOOL_NAME, "version": __version__, "command": args.command,
            "config_digest": config_digest(args), "seed": getattr(args, "seed", None)}


def _dump(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def emit_report(args, payload: dict, tsv: str | None = None, out: str | None = None) -> None:
    """JSON (default) or TSV report to ``out``/``--out`` or stdout."""
    meta = artifact_meta(args)
    if args.report_format == "tsv" and tsv is not None:
        text = "# " + json.dumps(meta, sort_keys=True) + "\n" + tsv
    else:
        text = _dump({"meta": meta, **payload})
    out = out or args.out
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def write_sidecar(args, path: str | Path, extra: dict | None = None) -> Path:
    side = Path(f"{path}.meta.json")
    with open(side, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_dump({"meta": artifact_meta(args), **(extra or {})}))
    return side


def _require_out(args):
    if not args.out:
        raise CliError("cli", f"{args.command} writes a file; --out is required", "pass --out PATH",
                       code=2)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    return args.out


# -- shared loaders -----------------------------------------------------------

def _peek_space(path: str) -> str:
    from .ingest import open_text
    lines, _ = open_text(path)
    try:
        for line in lines:
            if line.strip():
                space = json.loads(line).get("kg")
                if space:
                    return space
                break
    except (json.JSONDecodeError, AttributeError):
        pass
    finally:
        close = getattr(lines, "close", None)
        if close:
            close()
    raise CliError("ingest", f"{path}: cannot tell the relation space from the first record",
                   "pass --kg NAME", code=2)


def load_canonical(path: str, kg: str | None = None, label: str | None = None) -> KnowledgeGraph:
    from .ingest import IngestConfig, load_kg
    space = kg or _peek_space(path)
    with _Stage("ingest", "check the canonical JSONL file"):
        graph, report = load_kg(path, space, IngestConfig(format="generic-jsonl"),
                                load_default_registries(), label)
    if report.errors:
        print(f"warning: {path}: {sum(report.rejected_by.values())} records rejected; "
              f"first: {report.errors[0]}", file=sys.stderr)
    return graph


def _mapping(args) -> RelationMapping:
    with _Stage("kg_core", "check the mapping file layout: source_kg, source_rel, target_rel, "
                           "is_primary"):
        return RelationMapping.from_file(args.mapping) if args.mapping else load_default_mapping()


def _workers(args) -> int:
    return args.workers or os.cpu_count() or 1


def _ratios(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"ratios must be comma separated numbers: {text!r}")


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


# -- subcommands --------------------------------------------------------------

def cmd_ingest(args) -> int:
    from .ingest import CONCEPTNET_PRESET, TRANSOMCS_PRESET, IngestConfig, apply_conceptnet_curation, \
        parse, write_jsonl
    preset = {"conceptnet": CONCEPTNET_PRESET, "transomcs": TRANSOMCS_PRESET}.get(args.preset, {})
    opts = dict(preset)
    if args.format:
        opts["format"] = args.format
    if args.min_weight is not None:
        opts["min_weight_exclusive"] = args.min_weight
    if args.keep_equal is not None:
        opts["keep_equal"] = args.keep_equal
    if args.all_languages:
        opts["english_only"] = False
    if args.dedup is not None:
        opts["dedup_exact"] = args.dedup
    kg = args.kg or args.preset or ATOMIC2020
    if args.curate and kg != "conceptnet":
        raise CliError("ingest", f"--curate maps ConceptNet relations, but the input space is {kg!r}",
                       "drop --kg or use --kg conceptnet; curated output is always atomic2020", 2)
    out = _require_out(args)
    with _Stage("ingest", "check --format against the input layout"):
        config = IngestConfig(**opts)
        tuples, report = parse(args.input, config, kg, load_default_registries())
        curation = None
        if args.curate:
            tuples, curation = apply_conceptnet_curation(tuples, _mapping(args))
        n = write_jsonl(tuples, out)
    extra = {"ingest": report.to_dict(), "written": n}
    if curation is not None:
        extra["curation"] = curation.to_dict()
    write_sidecar(args, out, extra)
    print(f"{out}: {n} tuples ({report.read} read)", file=sys.stderr)
    return 0


def cmd_normalize(args) -> int:
    from .normalize import build_normalized_index, default_config
    out = _require_out(args)
    graph = load_canonical(args.input, args.kg)
    with _Stage("normalize"):
        index = build_normalized_index(graph, _mapping(args), args.mode, default_config(),
                                       _workers(args))
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for tid, keys in index.tuple_keys.items():
            fh.write(json.dumps({"id": tid, "keys": [[k.head_key, k.relation.name, k.tail_key]
                                                     for k in keys]}, ensure_ascii=False) + "\n")
    write_sidecar(args, out, {"diagnostics": index.diagnostics(), "degenerate": index.degenerate,
                              "unmapped": index.unmapped})
    return 0


def _labels(paths: list[str], graphs_space: list[str]) -> list[str]:
    if len(set(graphs_space)) == len(graphs_space):
        return graphs_space
    return [Path(p).name.split(".")[0] for p in paths]


def cmd_compare(args) -> int:
    from .compare import coverage_matrix, render_matrix_tsv, render_report_tsv
    from .normalize import default_config
    paths = [args.source, args.target] if args.source else list(args.inputs or [])
    if len(paths) < 2 or not all(paths):
        raise CliError("compare", "need --source and --target, or --inputs with two or more files",
                       code=2)
    spaces = [_peek_space(p) for p in paths]
    labels = _labels(paths, spaces)
    if len(set(labels)) != len(labels):
        raise CliError("compare", f"input labels collide: {labels}", "rename the input files", 2)
    graphs = [load_canonical(p, s, lab) for p, s, lab in zip(paths, spaces, labels)]
    with _Stage("compare"):
        reports = coverage_matrix(graphs, _mapping(args), args.mode, default_config(),
                                  _workers(args))
    payload = {"mode": args.mode,
               "reports": [reports[k].to_dict() for k in sorted(reports)]}
    if len(graphs) == 2:
        tsv = render_report_tsv(reports[(labels[0], labels[1])])
    else:
        tsv = "".join(f"# {metric}\n" + render_matrix_tsv(reports, metric, labels)
                      for metric in ("precision_pct", "recall_raw_pct", "recall_dedup_pct"))
    emit_report(args, payload, tsv)
    return 0


def _split_config(args):
    from .split import SplitConfig
    with _Stage("split", "ratios must be three positive numbers summing to 1; cap >= 1", code=2):
        kwargs = dict(max_head_tuples_eval=args.cap, min_confidence=args.min_confidence,
                      seed=derive_seed(args.seed, "split"),
                      preserve_upstream=bool(args.preserve_upstream))
        if args.ratios is not None:
            kwargs["ratios"] = args.ratios
        return SplitConfig(**kwargs)


def _run_split(args, graph, config, out_dir: Path):
    from .split import make_adversarial_split, verify_split, write_assignment_jsonl, \
        write_split_files
    with _Stage("split"):
        result = make_adversarial_split(graph, config)
        violations = verify_split(graph, result, config)
    if violations:
        raise CliError("split", f"split failed verification: {violations[0]}")
    out_dir.mkdir(parents=True, exist_ok=True)
    assign = out_dir / "assignment.jsonl"
    write_assignment_jsonl(result, assign)
    files = write_split_files(graph, result, out_dir)
    header = result.header()
    for p in [assign, *files.values()]:
        write_sidecar(args, p, {"split": header})
    return result, files


def cmd_split(args) -> int:
    config = _split_config(args)  # validated before any I/O
    if not args.out_dir:
        raise CliError("split", "--out-dir is required", code=2)
    graph = load_canonical(args.input, args.kg)
    result, _ = _run_split(args, graph, config, Path(args.out_dir))
    emit_report(args, {"split": result.header()},
                out=str(Path(args.out_dir) / "split_report.json"))
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_score(args) -> int:
    from .genmetrics import load_generations, score_corpus, score_per_relation, tsv_header
    with _Stage("genmetrics", "each line needs head, relation, generation and a references list"):
        records = load_generations(args.input, args.kg or "")
        overall = score_corpus(records)
        per = score_per_relation(records) if args.per_relation else {}
    payload = {"overall": overall.to_dict(), "per_relation": {k: v.to_dict() for k, v in per.items()}}
    lines = [tsv_header(), overall.tsv_row(args.system)]
    lines += [v.tsv_row(f"{args.system}:{k}" if args.system else k) for k, v in per.items()]
    emit_report(args, payload, "\n".join(lines) + "\n")
    return 0


def cmd_sample_hits(args) -> int:
    from .anno import write_hits_csv, sample_for_eval
    out = _require_out(args)
    graph = load_canonical(args.input, args.kg)
    with _Stage("anno"):
        hits = sample_for_eval(graph, args.n, derive_seed(args.seed, "sample-hits"))
    write_hits_csv(hits, out)
    write_sidecar(args, out, {"hits": len(hits), "short_hits": sum(h.short for h in hits)})
    return 0


def cmd_aggregate_votes(args) -> int:
    from .anno import build_records, fleiss_kappa_result, rating_matrix, read_hit_meta, \
        read_ratings_csv
    from .compare import accuracy_breakdown
    with _Stage("anno", "ratings CSV needs columns hit_id, tuple_id, worker_id, label"):
        ratings = read_ratings_csv(args.ratings)
        meta = read_hit_meta(args.hits) if args.hits else {}
        records = build_records(ratings, meta)
        matrix, dropped = rating_matrix(records, args.kappa_mode)
        kappa = fleiss_kappa_result(matrix, args.kappa_mode) if matrix else None
    payload = {
        "labels": {r.tuple_id: r.final_label for r in records},
        "label_counts": dict(sorted(Counter(r.final_label for r in records).items())),
        "kappa": None if kappa is None else {"value": kappa.kappa, "degenerate": kappa.degenerate,
                                             "mode": kappa.mode, "items": kappa.items,
                                             "raters_per_item": kappa.raters,
                                             "items_dropped": dropped},
    }
    tsv = None
    if meta:
        table = accuracy_breakdown(records, baseline=args.baseline)
        payload["accuracy"] = table.to_dict()
        tsv = table.to_tsv()
    emit_report(args, payload, tsv)
    return 0


def cmd_export_training(args) -> int:
    from .verbalize import render_training_line
    out = _require_out(args)
    graph = load_canonical(args.input, args.kg)
    n = 0
    with _Stage("verbalize", "drop tuples containing [GEN]/[SEP] or line breaks before export"), \
            open(out, "w", encoding="utf-8", newline="\n") as fh:
        for t in graph:
            if args.split and t.split != args.split:
                continue
            fh.write(render_training_line(t, args.relation_format) + "\n")
            n += 1
    write_sidecar(args, out, {"lines": n, "relation_format": args.relation_format})
    return 0


def cmd_export_prompts(args) -> int:
    from .verbalize import FEWSHOT_SEEDS, FEWSHOT_TEMPERATURE, build_fewshot_block, render_prefix
    out = _require_out(args)
    pool = list(load_canonical(args.pool, args.kg)) if args.pool else []
    base = derive_seed(args.seed, "fewshot")
    n = 0
    with _Stage("verbalize", "queries are JSONL lines with head and relation"), \
            open(args.queries, encoding="utf-8") as src, \
            open(out, "w", encoding="utf-8", newline="\n") as fh:
        for lineno, line in enumerate(src, 1):
            if not line.strip():
                continue
            try:
                q = json.loads(line)
                head, rel = q["head"], q["relation"]
            except (json.JSONDecodeError, KeyError, TypeError):
                raise ValueError(f"{args.queries}:{lineno}: expected {{head, relation}}") from None
            if args.k:
                prompt = build_fewshot_block(rel, pool, head, args.k, base + n)
            else:
                prompt = render_prefix(head, rel)
            fh.write(json.dumps({"head": head, "relation": rel, "prompt": prompt},
                                ensure_ascii=False) + "\n")
            n += 1
    write_sidecar(args, out, {"prompts": n, "k": args.k,
                              "decoding": {"temperature": FEWSHOT_TEMPERATURE,
                                           "seeds": FEWSHOT_SEEDS}})
    return 0


def compute_stats(graph, registry=None) -> dict:
    registry = registry or load_default_registries()
    per_rel: Counter = Counter()
    per_cat: Counter = Counter()
    unknown: Counter = Counter()
    for t in graph:
        per_rel[t.relation.name] += 1
        if t.relation in registry:
            per_cat[registry.category(t.relation)] += 1
        else:
            per_cat["other"] += 1
            unknown[t.relation.name] += 1
    return {"relations": dict(sorted(per_rel.items())),
            "categories": {c: per_cat[c] for c in CATEGORIES if per_cat[c]},
            "total": sum(per_rel.values()),
            "unknown_relations": dict(sorted(unknown.items()))}


def cmd_stats(args) -> int:
    if Path(args.input).stat().st_size == 0:
        graph = []
    else:
        graph = load_canonical(args.input, args.kg)
    stats = compute_stats(graph)
    for name, c in stats["unknown_relations"].items():
        print(f"warning: relation {name!r} is not registered; {c} tuples counted under 'other'",
              file=sys.stderr)
    lines = ["relation\tcount"] + [f"{k}\t{v}" for k, v in stats["relations"].items()]
    lines += [f"[{k}]\t{v}" for k, v in stats["categories"].items()]
    lines.append(f"TOTAL\t{stats['total']}")
    emit_report(args, stats, "\n".join(lines) + "\n")
    return 0


# -- pipeline -----------------------------------------------------------------

PIPELINES = ("compare", "split", "export")


def cmd_pipeline(args) -> int:
    if args.pipeline not in PIPELINES:
        raise CliError("cli", f"unknown pipeline {args.pipeline!r}", f"use one of {PIPELINES}", 2)
    inputs = [p.strip() for p in (args.inputs or []) if p.strip()]
    if not inputs:
        raise CliError("cli", "pipeline needs inputs", "set inputs = a.jsonl, b.jsonl", 2)
    missing = [p for p in inputs if not Path(p).is_file()]
    if missing:
        raise CliError("cli", f"input files not found: {missing}", code=2)
    if args.pipeline == "compare" and len(inputs) < 2:
        raise CliError("cli", "compare pipeline needs two or more inputs", code=2)
    split_config = _split_config(args) if args.pipeline in ("split", "export") else None
    if not args.out_dir:
        raise CliError("cli", "pipeline needs out_dir", code=2)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    from .compare import coverage_matrix, render_matrix_tsv
    from .ingest import IngestConfig, load_kg, write_jsonl
    from .normalize import build_normalized_index, default_config
    kgs = [k.strip() for k in (args.kgs or []) if k.strip()]
    if kgs and len(kgs) != len(inputs):
        raise CliError("cli", "kgs must list one relation space per input", code=2)
    graphs = []
    registry = load_default_registries()
    for i, path in enumerate(inputs):
        space = kgs[i] if kgs else _peek_space(path)
        with _Stage("ingest", "check input_format and kgs"):
            label = space if not kgs or kgs.count(space) == 1 else f"{space}_{i}"
            graph, report = load_kg(path, space, IngestConfig(format=args.input_format), registry,
                                    label)
        dest = out_dir / f"ingested_{graph.id}.jsonl"
        write_jsonl(graph, dest)
        write_sidecar(args, dest, {"ingest": report.to_dict()})
        graphs.append(graph)
    if len({g.id for g in graphs}) != len(graphs):
        raise CliError("cli", "two inputs share a relation space", "set kgs explicitly", 2)

    mapping = _mapping(args)
    with _Stage("normalize"):
        for g in graphs:
            index = build_normalized_index(g, mapping, args.mode, default_config(), _workers(args))
            diag = out_dir / f"normalized_{g.id}.json"
            emit_report(args, {"kg": g.id, "diagnostics": index.diagnostics()}, out=str(diag))

    if args.pipeline == "compare":
        with _Stage("compare"):
            reports = coverage_matrix(graphs, mapping, args.mode, default_config(), _workers(args))
        emit_report(args, {"mode": args.mode, "reports": [reports[k].to_dict()
                                                          for k in sorted(reports)]},
                    out=str(out_dir / "coverage.json"))
        labels = [g.id for g in graphs]
        for metric in ("precision_pct", "recall_raw_pct", "recall_dedup_pct"):
            path = out_dir / f"coverage_{metric}.tsv"
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("# " + json.dumps(artifact_meta(args), sort_keys=True) + "\n")
                fh.write(render_matrix_tsv(reports, metric, labels))
        return 0

    graph = graphs[0]
    result, files = _run_split(args, graph, split_config, out_dir / "split")
    emit_report(args, {"split": result.header()}, out=str(out_dir / "split_report.json"))
    if args.pipeline == "export":
        from .verbalize import render_training_line
        dest = out_dir / "train.txt"
        n = 0
        with _Stage("verbalize"), open(dest, "w", encoding="utf-8", newline="\n") as fh:
            for t in graph:
                if result.assignment.get(t.id) == "train":
                    fh.write(render_training_line(t, args.relation_format) + "\n")
                    n += 1
        write_sidecar(args, dest, {"lines": n})
    return 0


# -- parser -------------------------------------------------------------------

DEFAULTS = {"seed": 0, "mode": "all-targets", "report_format": "json", "cap": 500,
            "relation_format": "{name}", "n": 3000, "k": 5, "kappa_mode": "binarized",
            "baseline": ATOMIC2020, "input_format": "generic-jsonl", "system": "",
            "pipeline": "compare"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=TOOL_NAME, description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"{TOOL_NAME} {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--config", help="key = value file; flags override it")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--workers", type=int, help="worker processes (default: all cores)")
        sp.add_argument("--report-format", choices=("json", "tsv"))
        sp.add_argument("--out")
        sp.add_argument("--kg", help="relation space of the input (default: read from records)")
        return sp

    sp = add("ingest", cmd_ingest, "parse a dump into canonical tuple JSONL")
    sp.add_argument("--input", required=True)
    sp.add_argument("--format", choices=("conceptnet-edges", "generic-jsonl", "atomic-tsv"))
    sp.add_argument("--preset", choices=("conceptnet", "transomcs"))
    sp.add_argument("--min-weight", type=float)
    sp.add_argument("--keep-equal", type=_bool)
    sp.add_argument("--dedup", type=_bool)
    sp.add_argument("--all-languages", action="store_true", default=None)
    sp.add_argument("--curate", action="store_true", default=None,
                    help="apply ConceptNet curation into the ATOMIC-2020 relation space")
    sp.add_argument("--mapping")

    sp = add("normalize", cmd_normalize, "write normalized keys per tuple")
    sp.add_argument("--input", required=True)
    sp.add_argument("--mapping")
    sp.add_argument("--mode", choices=("primary-only", "all-targets"))

    sp = add("compare", cmd_compare, "coverage precision/recall between KGs")
    sp.add_argument("--source")
    sp.add_argument("--target")
    sp.add_argument("--inputs", nargs="+")
    sp.add_argument("--mapping")
    sp.add_argument("--mode", choices=("primary-only", "all-targets"))

    def split_opts(sp):
        sp.add_argument("--ratios", type=_ratios)
        sp.add_argument("--cap", type=int)
        sp.add_argument("--min-confidence", type=float)
        sp.add_argument("--preserve-upstream", type=_bool, nargs="?", const=True)
        sp.add_argument("--out-dir")

    sp = add("split", cmd_split, "head-disjoint train/dev/test split")
    sp.add_argument("--input", required=True)
    split_opts(sp)

    sp = add("score", cmd_score, "score generations against references")
    sp.add_argument("--input", required=True)
    sp.add_argument("--per-relation", action="store_true", default=None)
    sp.add_argument("--system")

    sp = add("sample-hits", cmd_sample_hits, "sample tuples into 5-tuple HITs (CSV)")
    sp.add_argument("--input", required=True)
    sp.add_argument("-n", type=int)

    sp = add("aggregate-votes", cmd_aggregate_votes, "labels, Fleiss' kappa and accuracy table")
    sp.add_argument("--ratings", required=True)
    sp.add_argument("--hits", help="exported HIT CSV supplying kg and relation per tuple")
    sp.add_argument("--kappa-mode", choices=("binarized", "likert"))
    sp.add_argument("--baseline")

    sp = add("export-training", cmd_export_training, "HEAD REL [GEN] TAIL [SEP] lines")
    sp.add_argument("--input", required=True)
    sp.add_argument("--split", choices=("train", "dev", "test"))
    sp.add_argument("--relation-format")

    sp = add("export-prompts", cmd_export_prompts, "zero- or few-shot prompts for queries")
    sp.add_argument("--queries", required=True)
    sp.add_argument("--pool", help="train-split tuples to draw priming examples from")
    sp.add_argument("-k", type=int)

    sp = add("stats", cmd_stats, "tuple counts per relation and category")
    sp.add_argument("--input", required=True)

    sp = add("pipeline", cmd_pipeline, "ingest -> normalize -> compare | split | export")
    sp.add_argument("--pipeline", choices=PIPELINES)
    sp.add_argument("--inputs", nargs="+")
    sp.add_argument("--kgs", nargs="+")
    sp.add_argument("--input-format", choices=("conceptnet-edges", "generic-jsonl", "atomic-tsv"))
    sp.add_argument("--mapping")
    sp.add_argument("--mode", choices=("primary-only", "all-targets"))
    sp.add_argument("--relation-format")
    split_opts(sp)
    return p


def read_config(path: str) -> dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if not text.lstrip().startswith("["):
        text = "[cskgkit]\n" + text
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.read_string(text, source=path)
    out = {}
    for section in cp.sections():
        for k, v in cp[section].items():
            out[k.replace("-", "_")] = v.strip().strip("\"'")
    return out


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise KeyError(command)


def apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    """Fill options left unset on the command line from --config, then from DEFAULTS."""
    if args.config:
        sp = _subparser(parser, args.command)
        actions = {a.dest: a for a in sp._actions}
        for key, raw in read_config(args.config).items():
            action = actions.get(key)
            if action is None or key in ("config", "func", "help"):
                raise CliError("cli", f"{args.config}: unknown key {key!r} for {args.command}",
                               "remove the key or check its spelling", 2)
            if getattr(args, key) is not None:
                continue
            try:
                if action.nargs in ("+", "*"):
                    value = [x.strip() for x in raw.split(",") if x.strip()]
                elif action.const is True or isinstance(action, argparse._StoreTrueAction):
                    value = _bool(raw)
                elif action.type is not None:
                    value = action.type(raw)
                else:
                    value = raw
            except (ValueError, argparse.ArgumentTypeError) as e:
                raise CliError("cli", f"{args.config}: bad value for {key}: {e}", code=2) from None
            if action.choices is not None and value not in action.choices:
                raise CliError("cli", f"{args.config}: {key} must be one of {list(action.choices)}",
                               code=2)
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None and hasattr(args, key):
            setattr(args, key, value)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        apply_config(parser, args)
        return args.func(args)
    except CliError as e:
        print(json.dumps({"error": e.to_dict()}), file=sys.stderr)
        return e.code
    except Exception as e:  # noqa: BLE001 - last-resort structured report
        if os.environ.get("CSKGKIT_DEBUG"):
            traceback.print_exc()
        print(json.dumps({"error": {"module": "cli", "message": f"{type(e).__name__}: {e}",
                                    "hint": "rerun with CSKGKIT_DEBUG=1 for a traceback"}}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
