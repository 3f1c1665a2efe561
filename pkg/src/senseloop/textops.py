"""Sentence splitting and lightweight token utilities.

The splitter is rule-based on purpose: metric inputs have to be deterministic
and auditable, so there is no statistical model anywhere in here.
"""

from __future__ import annotations

import re

_TERMINALS = ".!?"
_CLOSERS = "\"')]}”’"

# Tokens that end with a period mid-sentence. Checked case-insensitively with
# internal periods removed ("e.g." -> "eg").
ABBREVIATIONS = frozenset({
    "mr", "mrs", "ms", "dr", "prof", "rev", "hon", "jr", "sr",
    "gen", "col", "sgt", "lt", "capt", "cpl", "maj", "cmdr",
    "st", "mt", "ft", "ave", "blvd",
    "etc", "vs", "eg", "ie", "cf", "al", "ca", "approx",
    "inc", "ltd", "co", "corp", "dept", "univ", "assn",
    "no", "fig", "vol", "pp", "ed",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
    "oct", "nov", "dec",
})

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:[-'][A-Za-z0-9]+)*")
_WS_RE = re.compile(r"\s+")


def normalize_ws(text: str) -> str:
    """Collapse whitespace runs to single spaces and strip the ends."""
    return _WS_RE.sub(" ", text).strip()


def _word_before(text: str, index: int) -> str:
    """The word immediately preceding text[index], lowercased, periods removed."""
    j = index
    while j > 0 and (text[j - 1].isalnum() or text[j - 1] in ".-'"):
        j -= 1
    return text[j:index].lower().replace(".", "")


def _starts_new_sentence(text: str, index: int) -> bool:
    """Whether the text at index looks like the opening of a sentence."""
    while index < len(text) and text[index] in "\"'([{“‘":
        index += 1
    if index >= len(text):
        return True
    ch = text[index]
    return ch.isupper() or ch.isdigit()


def split_sentences(text: str) -> list[str]:
    """Split text into sentences on terminal punctuation.

    Breaks after runs of ``. ! ?`` (plus closing quotes/brackets) that are
    followed by whitespace and an uppercase/digit opener, unless the word
    before the period is a known abbreviation. Joining the result with single
    spaces reproduces the input modulo whitespace normalization.
    """
    if not text or not text.strip():
        return []
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in _TERMINALS:
            end = i + 1
            while end < n and (text[end] in _TERMINALS or text[end] in _CLOSERS):
                end += 1
            if end >= n:
                break
            if not text[end].isspace():
                i = end
                continue
            ws_end = end
            while ws_end < n and text[ws_end].isspace():
                ws_end += 1
            if ch == "." and _word_before(text, i) in ABBREVIATIONS:
                i = end
                continue
            if not _starts_new_sentence(text, ws_end):
                i = end
                continue
            sentence = text[start:end].strip()
            if sentence:
                sentences.append(sentence)
            start = ws_end
            i = ws_end
        else:
            i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def tokens(text: str) -> list[str]:
    """Lowercased word tokens; hyphens and apostrophes stay inside tokens."""
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]


def capitalized_phrases(text: str) -> set[str]:
    """Maximal runs of adjacent capitalized words, normalized to lowercase.

    "Meeting at North Bergen" -> {"meeting", "north bergen"}; hyphenated
    terms like "C-4" survive as single tokens.
    """
    matches = list(_TOKEN_RE.finditer(text))
    phrases: set[str] = set()
    current: list[str] = []
    prev_end = -1
    for m in matches:
        word = m.group(0)
        adjacent = prev_end >= 0 and text[prev_end:m.start()].isspace()
        if word[0].isupper():
            if current and not adjacent:
                phrases.add(" ".join(current).lower())
                current = []
            current.append(word)
        else:
            if current:
                phrases.add(" ".join(current).lower())
                current = []
        prev_end = m.end()
    if current:
        phrases.add(" ".join(current).lower())
    return phrases


def contains_token_seq(haystack_tokens: list[str], needle: str) -> bool:
    """True if needle's tokens appear consecutively in haystack_tokens."""
    needle_tokens = needle.split(" ")
    k = len(needle_tokens)
    if k == 0:
        return False
    for i in range(len(haystack_tokens) - k + 1):
        if haystack_tokens[i:i + k] == needle_tokens:
            return True
    return False
