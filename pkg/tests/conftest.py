import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cskgkit.kg_core import KGTuple, KnowledgeGraph, RelationId, load_default_mapping, \
    load_default_registries  # noqa: E402
from cskgkit.normalize import default_config  # noqa: E402

DATA = Path(__file__).parent / "data"

# small vocabularies so independent random KGs collide often after normalization
HEAD_WORDS = ["eat", "eats", "eating", "ate", "breakfast", "run", "runs", "ran", "dog", "dogs",
              "bread", "the", "a", "store", "goes", "went", "cake", "cakes", "happy", "happier",
              "coffee", "drinks", "to", "of", "car", "cars", "child", "children", "sleep",
              "sleeping", "work", "working", "box", "boxes", "pantry", "kitchen"]
TAIL_WORDS = ["energy", "food", "hungry", "full", "tired", "rest", "rested", "the", "an",
              "kitchen", "table", "tables", "fridge", "baked", "baking", "oven", "sweet", "work"]
PERSON = ["PersonX", "PersonY", "X", "Y"]


def random_phrase(rng, words, lo=1, hi=3, person=False):
    toks = [rng.choice(words) for _ in range(rng.randint(lo, hi))]
    if person and rng.random() < 0.5:
        toks.insert(0, rng.choice(PERSON))
    if rng.random() < 0.1:
        toks.append(rng.choice(["!", "...", "-ish", "___"]))
    if rng.random() < 0.2:
        toks = [t.capitalize() for t in toks]
    return " ".join(toks)


_REGISTRY = None


def registry():
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = load_default_registries()
    return _REGISTRY


def random_kg(rng, n, space="atomic2020", label=None, relations=None):
    rels = relations or [r.name for r in registry().relations(space)]
    kg = KnowledgeGraph(label or space, space=space)
    for i in range(n):
        kg.add(KGTuple(random_phrase(rng, HEAD_WORDS, person=space.startswith("atomic")),
                       RelationId(space, rng.choice(rels)),
                       random_phrase(rng, TAIL_WORDS), id=f"{label or space}:{i}", source=space))
    return kg.freeze()


@pytest.fixture(scope="session")
def mapping():
    return load_default_mapping()


@pytest.fixture(scope="session")
def norm_config():
    return default_config()


@pytest.fixture
def rng():
    return random.Random(1234)


# PASS/FAIL lines recorded by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
