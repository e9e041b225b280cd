"""Pure-Python hot kernels: concept canonicalization and LCS length.

``_ckernels.pyx`` mirrors this module line for line; keep the two in sync.
"""
import re
import string
import unicodedata

_ASCII_STRIP = str.maketrans({c: " " for c in string.punctuation})
_BLANK_RE = re.compile(r"_{2,}")
_PERSON_MARKERS = frozenset(("personx", "persony", "personz", "x", "y", "z"))
_VERB_FIRST = ("v", "n", "a")
_NOUN_FIRST = ("n", "v", "a")


def strip_punct(text):
    """Replace Unicode punctuation and symbol characters with spaces."""
    if text.isascii():
        return text.translate(_ASCII_STRIP)
    return "".join(" " if unicodedata.category(c)[0] in "PS" else c for c in text)


def _has_vowel(s):
    for c in s:
        if c in "aeiouy":
            return True
    return False


def _cvc(s):
    # consonant-vowel-consonant ending, final consonant not w/x/y
    if len(s) < 3:
        return False
    a, b, c = s[-3], s[-2], s[-1]
    return (a not in "aeiou" and b in "aeiouy" and c not in "aeiouwxy"
            and a.isalpha() and c.isalpha())


def suffix_step(word, pos):
    """One suffix-stripping step; None when no rule applies."""
    n = len(word)
    if n <= 3:
        return None
    if word.endswith("ies") and n > 4:
        return word[:-3] + "y"
    if word.endswith(("sses", "shes", "ches", "xes", "zes")):
        return word[:-2]
    if word.endswith("s") and not word.endswith(("ss", "us", "is", "ous")):
        return word[:-1]
    if pos != "v":
        return None
    if word.endswith("ied") and n > 4:
        return word[:-3] + "y"
    for suffix in ("ing", "ed"):
        if word.endswith(suffix):
            stem = word[:-len(suffix)]
            if len(stem) < 3 or not _has_vowel(stem):
                return None
            if stem.endswith(("at", "bl", "iz")):
                return stem + "e"
            if stem[-1] == stem[-2] and stem[-1] not in "aeioulsz" and stem[-1].isalpha():
                return stem[:-1]
            if len(stem) == 3 and _cvc(stem):
                return stem + "e"
            return stem
    return None


class ConceptKernel:
    """Canonicalize one concept string against a fixed lexical configuration.

    ``lexicon`` maps surface -> {pos: lemma}; ``lemmas`` holds every lemma
    value (always a fixed point); ``forbidden`` words are never produced by
    lemmatization.
    """

    def __init__(self, stopwords, lexicon, lemmas, person_token, blank_token):
        self.stopwords = frozenset(stopwords)
        self.lexicon = dict(lexicon)
        self.lemmas = frozenset(lemmas)
        self.person_token = person_token
        self.blank_token = blank_token
        self.forbidden = self.stopwords | _PERSON_MARKERS | {""}
        self.keep = frozenset((person_token, blank_token))

    def lemmatize(self, word, prefs):
        cur = word
        while True:
            if cur in self.lemmas:
                return cur
            nxt = None
            entries = self.lexicon.get(cur)
            if entries is not None:
                for pos in prefs:
                    if pos in entries:
                        nxt = entries[pos]
                        break
            if nxt is None:
                nxt = suffix_step(cur, prefs[0])
            if nxt is None or nxt == cur or nxt in self.forbidden:
                return cur
            cur = nxt

    def normalize(self, text, person_rule):
        text = text.casefold()
        if "__" in text:
            text = _BLANK_RE.sub(" " + self.blank_token + " ", text)
        tokens = strip_punct(text).split()
        if person_rule and tokens:
            if tokens[0] in _PERSON_MARKERS:
                tokens = tokens[1:]
            tokens = [self.person_token if t in _PERSON_MARKERS else t for t in tokens]
        stop = self.stopwords
        keep = self.keep
        content = [t for t in tokens if t in keep or t not in stop]
        if not content:
            return ""
        out = []
        first = _VERB_FIRST if len(content) > 1 else _NOUN_FIRST
        for i, tok in enumerate(content):
            if tok in keep:
                out.append(tok)
            else:
                out.append(self.lemmatize(tok, first if i == 0 else _NOUN_FIRST))
        return " ".join(out)


def lcs_length(a, b):
    """Length of the longest common subsequence of two token sequences."""
    if len(a) < len(b):
        a, b = b, a
    m = len(b)
    if m == 0:
        return 0
    prev = [0] * (m + 1)
    for x in a:
        cur = [0] * (m + 1)
        for j in range(m):
            if x == b[j]:
                cur[j + 1] = prev[j] + 1
            else:
                cur[j + 1] = cur[j] if cur[j] > prev[j + 1] else prev[j + 1]
        prev = cur
    return prev[m]
