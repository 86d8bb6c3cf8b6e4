"""Frequency-dictionary spellchecker.

A model counts surface forms from a monolingual corpus, skipping words
shorter than three characters and words that are not purely alphabetic,
and keeps a reference dictionary for words the corpus may lack. A word
is a suspect when it is rare (count below `known_min_count`), absent
from the dictionary, contains no digit, is not all-uppercase, and has
at least three characters.

Suggestions are searched in three stages:

1. counted words with count above `candidate_min_count`, in descending
   count order (ties lexicographic), accepting the first candidate that
   differs from the suspect by swapping one pair of character positions
   or that sits at Levenshtein distance exactly 1;
2. the same tests over dictionary words in lexicographic order;
3. the leftmost split of the suspect into two known words.

Words with counts between `known_min_count` and `candidate_min_count`
are known (never flagged) but deliberately never suggested, mirroring
the two separate thresholds.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .distance import is_character_swap, is_levenshtein_one

DEFAULT_KNOWN_MIN_COUNT = 3
DEFAULT_CANDIDATE_MIN_COUNT = 20


@dataclass
class FrequencyModel:
    """Word counts plus a dictionary, with precomputed candidate orders."""

    counts: dict[str, int]
    dictionary: frozenset[str]
    known_min_count: int = DEFAULT_KNOWN_MIN_COUNT
    candidate_min_count: int = DEFAULT_CANDIDATE_MIN_COUNT
    _frequent: tuple[str, ...] = field(init=False, repr=False, compare=False)
    _dict_sorted: tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.dictionary = frozenset(self.dictionary)
        self._frequent = tuple(
            sorted(
                (w for w, c in self.counts.items() if c > self.candidate_min_count),
                key=lambda w: (-self.counts[w], w),
            )
        )
        self._dict_sorted = tuple(sorted(self.dictionary))

    def in_dictionary(self, word: str) -> bool:
        """Case-sensitive membership with a lowercase fallback."""
        return word in self.dictionary or word.lower() in self.dictionary

    def is_known(self, word: str) -> bool:
        return self.counts.get(word, 0) >= self.known_min_count or self.in_dictionary(word)


def count_words(lines: Iterable[str]) -> Counter[str]:
    """Count surface forms, skipping short and non-alphabetic words.

    Counting is order-free, so a corpus may be split into shards whose
    Counters are summed afterwards with identical results.
    """
    counts: Counter[str] = Counter()
    for line in lines:
        for word in line.split():
            if len(word) >= 3 and word.isalpha():
                counts[word] += 1
    return counts


def build_model(
    lines: Iterable[str],
    dictionary: Iterable[str],
    known_min_count: int = DEFAULT_KNOWN_MIN_COUNT,
    candidate_min_count: int = DEFAULT_CANDIDATE_MIN_COUNT,
) -> FrequencyModel:
    return FrequencyModel(
        dict(count_words(lines)),
        frozenset(dictionary),
        known_min_count,
        candidate_min_count,
    )


def is_suspect(word: str, model: FrequencyModel) -> bool:
    """True when `word` looks misspelled and is worth trying to correct."""
    if len(word) < 3:
        return False
    if any(ch.isdigit() for ch in word):
        return False
    if word.isupper():
        return False
    if model.counts.get(word, 0) >= model.known_min_count:
        return False
    if model.in_dictionary(word):
        return False
    return True


def _close_enough(word: str, candidate: str) -> bool:
    if len(word) == len(candidate):
        return is_character_swap(word, candidate) or is_levenshtein_one(word, candidate)
    if abs(len(word) - len(candidate)) == 1:
        return is_levenshtein_one(word, candidate)
    return False


def suggest(word: str, model: FrequencyModel) -> str | None:
    """Best correction for a suspect word, or None when nothing qualifies.

    A returned suggestion is always a known word (or a pair of known
    words separated by a space, for the split stage), so correction is
    idempotent.
    """
    for candidate in model._frequent:
        if _close_enough(word, candidate):
            return candidate
    for candidate in model._dict_sorted:
        if _close_enough(word, candidate):
            return candidate
    for i in range(1, len(word)):
        left, right = word[:i], word[i:]
        if model.is_known(left) and model.is_known(right):
            return f"{left} {right}"
    return None


def _correct_token(token: str, model: FrequencyModel) -> list[str]:
    if len(token) < 3 or token.isupper() or any(ch.isdigit() for ch in token):
        return [token]
    capitalized = token[0].isupper()
    lookup = token.lower() if capitalized else token
    if not is_suspect(lookup, model):
        return [token]
    fixed = suggest(lookup, model)
    if fixed is None:
        return [token]
    if capitalized:
        fixed = fixed[0].upper() + fixed[1:]
    return fixed.split()


def correct_sentence(tokens: Sequence[str], model: FrequencyModel) -> list[str]:
    """Replace each suspect token with its suggestion, if any.

    Initial-capital tokens are lowercased for lookup and the suggestion
    re-capitalized; all-uppercase tokens and tokens containing digits
    pass through untouched. A split suggestion expands into two tokens.
    """
    out: list[str] = []
    for token in tokens:
        out.extend(_correct_token(token, model))
    return out


def save_model(path: str | os.PathLike, model: FrequencyModel) -> None:
    """Persist counts as "word<TAB>count", descending count then lexicographic."""
    rows = sorted(model.counts.items(), key=lambda kv: (-kv[1], kv[0]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for word, count in rows:
            fh.write(f"{word}\t{count}\n")


def load_model(
    path: str | os.PathLike,
    dictionary: Iterable[str],
    known_min_count: int = DEFAULT_KNOWN_MIN_COUNT,
    candidate_min_count: int = DEFAULT_CANDIDATE_MIN_COUNT,
) -> FrequencyModel:
    counts: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            try:
                word, count = line.split("\t")
                counts[word] = int(count)
            except ValueError:
                raise ValueError(f"model line {line_no}: expected 'word<TAB>count'") from None
    return FrequencyModel(counts, frozenset(dictionary), known_min_count, candidate_min_count)


def load_dictionary(path: str | os.PathLike) -> frozenset[str]:
    """One word per line; blank lines ignored."""
    with open(path, "r", encoding="utf-8") as fh:
        return frozenset(word.strip() for word in fh if word.strip())
