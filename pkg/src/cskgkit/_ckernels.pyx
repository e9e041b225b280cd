# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels; semantics mirror ``_pykernels`` exactly."""
import re
import string
import unicodedata

from libc.stdlib cimport malloc, free

cdef dict _ASCII_STRIP = str.maketrans({c: " " for c in string.punctuation})
_BLANK_RE = re.compile(r"_{2,}")
cdef frozenset _PERSON_MARKERS = frozenset(("personx", "persony", "personz", "x", "y", "z"))
cdef tuple _VERB_FIRST = ("v", "n", "a")
cdef tuple _NOUN_FIRST = ("n", "v", "a")


cpdef str strip_punct(str text):
    cdef Py_UCS4 c
    cdef list out
    if text.isascii():
        return text.translate(_ASCII_STRIP)
    out = []
    for c in text:
        if unicodedata.category(c)[0] in "PS":
            out.append(" ")
        else:
            out.append(c)
    return "".join(out)


cdef bint _has_vowel(str s):
    cdef Py_UCS4 c
    for c in s:
        if c in "aeiouy":
            return True
    return False


cdef bint _cvc(str s):
    cdef Py_ssize_t n = len(s)
    cdef Py_UCS4 a, b, c
    if n < 3:
        return False
    a = s[n - 3]
    b = s[n - 2]
    c = s[n - 1]
    return (a not in "aeiou" and b in "aeiouy" and c not in "aeiouwxy"
            and a.isalpha() and c.isalpha())


cpdef object suffix_step(str word, str pos):
    cdef Py_ssize_t n = len(word)
    cdef str stem, suffix
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
            stem = word[:n - len(suffix)]
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


cdef class ConceptKernel:
    cdef readonly frozenset stopwords
    cdef readonly dict lexicon
    cdef readonly frozenset lemmas
    cdef readonly str person_token
    cdef readonly str blank_token
    cdef readonly frozenset forbidden
    cdef readonly frozenset keep

    def __init__(self, stopwords, lexicon, lemmas, person_token, blank_token):
        self.stopwords = frozenset(stopwords)
        self.lexicon = dict(lexicon)
        self.lemmas = frozenset(lemmas)
        self.person_token = person_token
        self.blank_token = blank_token
        self.forbidden = self.stopwords | _PERSON_MARKERS | {""}
        self.keep = frozenset((person_token, blank_token))

    cpdef str lemmatize(self, str word, tuple prefs):
        cdef str cur = word
        cdef object nxt
        cdef object entries
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

    cpdef str normalize(self, str text, bint person_rule):
        cdef list tokens, content, out
        cdef str t, tok
        cdef Py_ssize_t i
        cdef tuple first
        text = text.casefold()
        if "__" in text:
            text = _BLANK_RE.sub(" " + self.blank_token + " ", text)
        tokens = strip_punct(text).split()
        if person_rule and tokens:
            if tokens[0] in _PERSON_MARKERS:
                tokens = tokens[1:]
            tokens = [self.person_token if t in _PERSON_MARKERS else t for t in tokens]
        content = [t for t in tokens if t in self.keep or t not in self.stopwords]
        if not content:
            return ""
        out = []
        first = _VERB_FIRST if len(content) > 1 else _NOUN_FIRST
        for i in range(len(content)):
            tok = content[i]
            if tok in self.keep:
                out.append(tok)
            else:
                out.append(self.lemmatize(tok, first if i == 0 else _NOUN_FIRST))
        return " ".join(out)


def lcs_length(a, b):
    cdef Py_ssize_t n, m, i, j
    cdef int *prev
    cdef int *cur
    cdef int *tmp
    cdef list la, lb
    cdef object x
    la = list(a)
    lb = list(b)
    if len(la) < len(lb):
        la, lb = lb, la
    n = len(la)
    m = len(lb)
    if m == 0:
        return 0
    prev = <int *> malloc((m + 1) * sizeof(int))
    cur = <int *> malloc((m + 1) * sizeof(int))
    if prev == NULL or cur == NULL:
        free(prev)
        free(cur)
        raise MemoryError()
    try:
        for j in range(m + 1):
            prev[j] = 0
            cur[j] = 0
        for i in range(n):
            x = la[i]
            cur[0] = 0
            for j in range(m):
                if x == lb[j]:
                    cur[j + 1] = prev[j] + 1
                elif cur[j] > prev[j + 1]:
                    cur[j + 1] = cur[j]
                else:
                    cur[j + 1] = prev[j + 1]
            tmp = prev
            prev = cur
            cur = tmp
        return prev[m]
    finally:
        free(prev)
        free(cur)
