"""Time ingest + normalize + index over synthetic tuples.

    python3 benchmarks/bench_pipeline.py --tuples 1000000

Prints one JSON line with wall time per stage and peak RSS. Writing the
synthetic input file is not timed.
"""
import argparse
import json
import os
import random
import resource
import sys
import tempfile
import time

from cskgkit import kernels
from cskgkit.ingest import IngestConfig, load_kg
from cskgkit.kg_core import ATOMIC2020, load_default_mapping, load_default_registries
from cskgkit.normalize import build_normalized_index, default_config

VERBS = ["eats", "runs", "buys", "bakes", "reads", "drives", "paints", "visits", "cleans",
         "writes", "plays", "watches", "cooks", "learns", "builds", "sells", "finds", "loses"]
NOUNS = ["bread", "car", "house", "dogs", "books", "guitar", "garden", "letters", "coffee",
         "movies", "friends", "stories", "boxes", "kitchen", "tickets", "flowers", "games"]
ADJS = ["happy", "tired", "hungry", "excited", "nervous", "proud", "bored", "calm"]
RELATIONS = ["xWant", "xNeed", "xAttr", "xEffect", "xIntent", "xReact", "oWant", "oEffect",
             "AtLocation", "ObjectUse", "HinderedBy", "isAfter"]


def write_synthetic(path, n, seed=0):
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(n):
            head = f"PersonX {rng.choice(VERBS)} {rng.choice(ADJS)} {rng.choice(NOUNS)} {i % 50000}"
            tail = f"to {rng.choice(VERBS)} the {rng.choice(NOUNS)}"
            fh.write(json.dumps({"id": f"s{i}", "head": head, "relation": rng.choice(RELATIONS),
                                 "tail": tail, "kg": ATOMIC2020}) + "\n")


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--tuples", type=int, default=1_000_000)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args(argv)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "synthetic.jsonl")
        write_synthetic(path, args.tuples)
        registry, mapping = load_default_registries(), load_default_mapping()
        t0 = time.perf_counter()
        graph, report = load_kg(path, ATOMIC2020, IngestConfig(dedup_exact=False), registry)
        t1 = time.perf_counter()
        index = build_normalized_index(graph, mapping, config=default_config(), workers=args.workers)
        t2 = time.perf_counter()
    rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024  # KiB -> MiB on Linux
    print(json.dumps({"tuples": len(graph), "keys": len(index.keys), "kernels": kernels.IMPLEMENTATION,
                      "workers": args.workers, "ingest_s": round(t1 - t0, 2),
                      "index_s": round(t2 - t1, 2), "total_s": round(t2 - t0, 2),
                      "max_rss_mb": round(rss, 1)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
