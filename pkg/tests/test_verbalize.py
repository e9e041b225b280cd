import pytest
from hypothesis import given, settings, strategies as st

from cskgkit.kg_core import ATOMIC2020, KGTuple, RelationId
from cskgkit.verbalize import (TemplateError, TemplateTable, build_fewshot_block,
                               check_exportable, default_templates, parse_training_line,
                               render_human, render_prefix, render_training_line)

from conftest import registry


def tup(head, rel, tail, kg=ATOMIC2020, split=None, id=""):
    return KGTuple(head, RelationId(kg, rel), tail, split=split, id=id)


def test_human_forms():
    assert render_human(tup("PersonX is hungry", "xWant", "to eat")) == \
        "PersonX is hungry as a result, PersonX wants to eat"
    assert render_human(tup("bread", "AtLocation", "pantry", "conceptnet")) == \
        "bread located or found at/in/on pantry"


def test_prefixes():
    assert render_prefix("X adopts a cat", "HinderedBy") == "X adopts a cat can be hindered by"
    assert render_prefix("baker", RelationId("conceptnet", "CapableOf")) == "baker is/are capable of"


def test_training_lines():
    assert render_training_line(tup("bread", "MadeUpOf", "dough")) == "bread MadeUpOf [GEN] dough [SEP]"
    assert render_training_line(tup("a", "xAttr", "b")) == "a xAttr [GEN] b [SEP]"
    assert render_training_line(tup("a", "xAttr", "b"), "<{name}>") == "a <xAttr> [GEN] b [SEP]"
    assert parse_training_line("bread MadeUpOf [GEN] dough [SEP]\n") == ("bread", "MadeUpOf", "dough")
    with pytest.raises(ValueError):
        parse_training_line("bread MadeUpOf dough")


@pytest.mark.parametrize("bad", ["has [GEN] inside", "ends [SEP]", "two\nlines", "cr\rhere",
                                 "sep arator", ""])
def test_rejects_unexportable_text(bad):
    with pytest.raises(ValueError):
        check_exportable(bad)
    with pytest.raises(ValueError):
        render_training_line(tup("head", "xWant", bad))


TEXT = st.text(st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=30).filter(
    lambda x: x.strip())
DELIMITED = st.lists(st.sampled_from(["a", " ", "[GEN]", "[SEP]", "xWant", "\u2028", "b"]),
                     min_size=1, max_size=6).map("".join).filter(lambda x: x.strip())


@settings(max_examples=1000, deadline=None)
@given(st.one_of(TEXT, DELIMITED), st.sampled_from(["xWant", "AtLocation", "HinderedBy", "isAfter"]),
       st.one_of(TEXT, DELIMITED))
def test_round_trip(head, rel, tail):
    t = tup(head, rel, tail)
    try:
        check_exportable(head)
        check_exportable(tail)
    except ValueError:
        with pytest.raises(ValueError):
            render_training_line(t)
        return
    assert parse_training_line(render_training_line(t)) == (head, rel, tail)


def test_every_registered_relation_has_a_template():
    table = default_templates()
    reg = registry()
    missing = [str(r) for r in reg.relations() if r.name not in table]
    assert missing == []
    for rid in reg.relations():
        t = KGTuple("head", rid, "tail")
        assert render_human(t).startswith(render_prefix("head", rid))


def test_unknown_relation_names_the_relation():
    with pytest.raises(TemplateError, match="Nope"):
        render_prefix("h", "Nope")


def test_template_file_version(tmp_path):
    assert default_templates().version == "1"
    p = tmp_path / "t.tsv"
    p.write_text("# template table version 7b\nxWant\twants\n")
    table = TemplateTable.from_file(p)
    assert table.version == "7b" and render_prefix("h", "xWant", table) == "h wants"


def pool(n, rel="xWant", split="train"):
    return [tup(f"PersonX does {i}", rel, f"thing {i}", split=split, id=f"p{i:03d}")
            for i in range(n)]


def test_fewshot_block():
    block = build_fewshot_block("xWant", pool(20), "PersonX is tired", k=5, seed=1)
    lines = block.split("\n")
    assert len(lines) == 6
    assert lines[-1] == "PersonX is tired as a result, PersonX wants"
    assert all(line.startswith("PersonX does ") for line in lines[:5])
    assert block == build_fewshot_block("xWant", list(reversed(pool(20))), "PersonX is tired",
                                        k=5, seed=1)
    assert build_fewshot_block("xWant", pool(20), "q", k=0) == "q as a result, PersonX wants"


def test_fewshot_pool_rules():
    with pytest.raises(ValueError, match="only 3 available"):
        build_fewshot_block("xWant", pool(3), "q", k=5)
    with pytest.raises(ValueError, match="test"):
        build_fewshot_block("xWant", pool(10, split="test"), "q")
    mixed = pool(10) + pool(10, rel="xNeed")
    block = build_fewshot_block("xNeed", mixed, "q", k=5, seed=0)
    assert block.count("but before, PersonX needed") == 6
