"""The compiled and pure-Python kernels must agree exactly."""
import importlib
import os
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from cskgkit import _pykernels, kernels
from cskgkit.normalize import default_config

from oracles import lcs_oracle

try:
    from cskgkit import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")

WORDS = st.sampled_from(["running", "cries", "boxes", "stopped", "personx", "PersonY", "the",
                         "hopping", "bus", "glass", "studied", "making", "___", "x", "Café",
                         "dogs", "geese", "ran", "rock&roll", "well-known", "a"])
PHRASES = st.one_of(st.lists(WORDS, max_size=6).map(" ".join), st.text(max_size=30))


def make(mod):
    cfg = default_config()
    k = cfg.kernel
    return mod.ConceptKernel(k.stopwords, k.lexicon, k.lemmas, k.person_token, k.blank_token)


@needs_ext
@settings(max_examples=400, deadline=None)
@given(PHRASES, st.booleans())
def test_normalize_equivalence(text, person_rule):
    assert make(_ckernels).normalize(text, person_rule) == make(_pykernels).normalize(text, person_rule)


@needs_ext
@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="abcdeilnorsuyz", min_size=0, max_size=12), st.sampled_from(["v", "n", "a"]))
def test_suffix_step_equivalence(word, pos):
    assert _ckernels.suffix_step(word, pos) == _pykernels.suffix_step(word, pos)


@needs_ext
@settings(max_examples=200, deadline=None)
@given(st.text(max_size=30))
def test_strip_punct_equivalence(text):
    assert _ckernels.strip_punct(text) == _pykernels.strip_punct(text)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from("abcd"), max_size=8), st.lists(st.sampled_from("abcd"), max_size=8))
def test_lcs_matches_recursive_oracle(a, b):
    assert _pykernels.lcs_length(a, b) == lcs_oracle(tuple(a), tuple(b))
    if _ckernels is not None:
        assert _ckernels.lcs_length(a, b) == lcs_oracle(tuple(a), tuple(b))


def test_suffix_rules():
    s = _pykernels.suffix_step
    assert s("cries", "n") == "cry"
    assert s("boxes", "n") == "box"
    assert s("glass", "n") is None and s("bus", "n") is None
    assert s("hopping", "v") == "hop"
    assert s("rated", "v") == "rate"
    assert s("running", "n") is None
    assert s("sing", "v") is None


def test_pure_python_switch():
    env = dict(os.environ, CSKGKIT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from cskgkit import kernels; print(kernels.IMPLEMENTATION)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert kernels.IMPLEMENTATION in ("python", "cython")
    importlib.reload(kernels)
