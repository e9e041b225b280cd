import pickle
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from cskgkit.kg_core import ATOMIC2020, KGTuple, KnowledgeGraph, RelationId
from cskgkit.normalize import (NormalizedKey, NormalizerConfig, build_normalized_index,
                               default_config, load_lexicon, load_stopwords, normalize_concept,
                               normalize_tuple)

from conftest import DATA


def golden_rows():
    rows = []
    for line in (DATA / "normalization_golden.tsv").read_text(encoding="utf-8").splitlines():
        if line.startswith("#") or not line.strip():
            continue
        text, kg, expected = line.split("\t")
        rows.append((text, kg, expected))
    return rows


def test_worked_example():
    assert normalize_concept("PersonX eats breakfast", ATOMIC2020) == "eat breakfast"


@pytest.mark.parametrize("text,kg,expected", golden_rows())
def test_golden(text, kg, expected):
    assert normalize_concept(text, kg) == expected


def test_golden_has_fifty_cases():
    assert len(golden_rows()) == 50


def test_person_rule_only_for_atomic_kgs():
    assert normalize_concept("PersonX greets PersonY", "atomic") == "greet person"
    assert normalize_concept("PersonX greets PersonY", "conceptnet") == "personx greet persony"


def test_blank_and_punctuation():
    assert normalize_concept("PersonX watches ___ anyway", ATOMIC2020) == "watch blank anyway"
    assert normalize_concept("popcorn\u2014bucket\u00ae", "conceptnet") == "popcorn bucket"
    assert normalize_concept("the of and", "conceptnet") == ""


def test_tuple_keys_follow_mapping(mapping):
    t = KGTuple("cake", RelationId("conceptnet", "HasA"), "sweetness", source="conceptnet")
    all_keys = normalize_tuple(t, mapping, "all-targets")
    primary = normalize_tuple(t, mapping, "primary-only")
    assert primary < all_keys or primary == all_keys
    assert len(primary) == 1
    diag = Counter()
    assert normalize_tuple(KGTuple("a", RelationId("conceptnet", "IsA"), "b"), mapping,
                           diagnostics=diag) == set()
    assert diag["unmapped"] == 1
    with pytest.raises(ValueError):
        normalize_tuple(t, mapping, "nope")


def test_index_separates_degenerate_and_unmapped(mapping):
    r = RelationId(ATOMIC2020, "xWant")
    kg = KnowledgeGraph(ATOMIC2020, [
        KGTuple("PersonX eats", r, "food", id="1"),
        KGTuple("X eats", r, "foods", id="2"),
        KGTuple("the", r, "food", id="3"),
    ])
    kg.add(KGTuple("apple", RelationId(ATOMIC2020, "xWant"), "pie", id="4"))
    idx = build_normalized_index(kg, mapping)
    key = NormalizedKey("eat", r, "food")
    assert idx.multiplicity(key) == 2 and key in idx
    assert idx.degenerate == ["3"]
    assert idx.diagnostics()["matchable"] == 3
    cn = KnowledgeGraph("conceptnet", [KGTuple("a", RelationId("conceptnet", "IsA"), "b", id="x")])
    assert build_normalized_index(cn, mapping).unmapped == ["x"]


def test_config_validation():
    sw, lex = load_stopwords(), load_lexicon()
    with pytest.raises(ValueError):
        NormalizerConfig(sw | {"The"}, lex)
    with pytest.raises(ValueError):
        NormalizerConfig(sw | {"person"}, lex)
    with pytest.raises(ValueError):
        NormalizerConfig(sw, lex, blank_token="two words")


def test_config_pickles_without_kernel():
    cfg = default_config()
    normalize_concept("dogs", "conceptnet", cfg)
    clone = pickle.loads(pickle.dumps(cfg))
    assert clone._kernel is None and clone._cache == {}
    assert normalize_concept("dogs", "conceptnet", clone) == "dog"


def test_custom_lexicon_changes_result():
    cfg = NormalizerConfig(load_stopwords(), {("dogs", "n"): "hound"})
    assert normalize_concept("dogs", "conceptnet", cfg) == "hound"


def test_cache_eviction_keeps_results():
    cfg = NormalizerConfig(load_stopwords(), load_lexicon(), cache_size=2)
    outs = [normalize_concept(w, "conceptnet", cfg) for w in ["dogs", "cats", "boxes", "dogs"]]
    assert outs == ["dog", "cat", "box", "dog"]
    assert len(cfg._cache) <= 2


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=40), st.sampled_from([ATOMIC2020, "atomic", "conceptnet"]))
def test_idempotent(text, kg):
    once = normalize_concept(text, kg)
    assert normalize_concept(once, kg) == once
