"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--phrases 200000]

Both implementations run on the same inputs; their outputs are checked for
equality before timings are reported.
"""
import argparse
import random
import sys
import time

from cskgkit import _pykernels
from cskgkit.normalize import default_config

try:
    from cskgkit import _ckernels
except ImportError:
    _ckernels = None

WORDS = ("PersonX PersonY eats running boxes cries studied hopping the a of to bread kitchen "
         "geese went happier ___ well-known rock&roll coffee drinks children sleeping").split()


def phrases(n, seed=0):
    rng = random.Random(seed)
    return [" ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 7))) for _ in range(n)]


def make(mod):
    k = default_config().kernel
    return mod.ConceptKernel(k.stopwords, k.lexicon, k.lemmas, k.person_token, k.blank_token)


def bench(mod, texts, pairs):
    kernel = make(mod)
    t0 = time.perf_counter()
    norm = [kernel.normalize(t, True) for t in texts]
    t1 = time.perf_counter()
    lcs = [mod.lcs_length(a, b) for a, b in pairs]
    t2 = time.perf_counter()
    return norm, lcs, t1 - t0, t2 - t1


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--phrases", type=int, default=200_000)
    ap.add_argument("--pairs", type=int, default=50_000)
    args = ap.parse_args(argv)
    texts = phrases(args.phrases)
    toks = phrases(2 * args.pairs, seed=1)
    pairs = [(toks[i].split(), toks[i + 1].split()) for i in range(0, len(toks), 2)]
    impls = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    results = {name: bench(mod, texts, pairs) for name, mod in impls}
    print(f"{'kernel':8} {'normalize/s':>14} {'lcs/s':>12}")
    for name, (_, _, tn, tl) in results.items():
        print(f"{name:8} {len(texts) / tn:14,.0f} {len(pairs) / tl:12,.0f}")
    if "cython" in results:
        py, cy = results["python"], results["cython"]
        assert py[0] == cy[0] and py[1] == cy[1], "implementations disagree"
        print(f"speedup  {py[2] / cy[2]:14.2f}x {py[3] / cy[3]:11.2f}x")
    else:
        print("compiled kernels not built; only the fallback was timed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
