"""Shared edit data model: tokens, edits, annotated sentences, corpora.

Tokens are plain strings (non-empty, no whitespace); edits rewrite the
half-open token span [start, end) of their sentence with a replacement
string holding zero or more space-separated tokens. Sentences keep their
edits in a canonical (start, end, annotator) order, so structural
equality doubles as semantic equality. Everything here is an immutable
value that can be shared freely between threads or processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class OverlapError(ValueError):
    """Two edits claim conflicting spans of one sentence."""

    def __init__(self, first: "Edit", second: "Edit"):
        super().__init__(
            f"overlapping edits {first.describe()} and {second.describe()}"
        )
        self.first = first
        self.second = second


def spans_overlap(start_a: int, end_a: int, start_b: int, end_b: int) -> bool:
    """True when two half-open spans cannot be edited independently.

    Insertion points (start == end) conflict with each other only when
    they coincide, and with a wider span only when strictly inside it;
    touching a span's boundary is fine.
    """
    if start_a == end_a and start_b == end_b:
        return start_a == start_b
    return start_a < end_b and start_b < end_a


def check_token(text: str) -> str:
    """Validate a single token: non-empty, no whitespace characters."""
    if not text:
        raise ValueError("token must be non-empty")
    if any(ch.isspace() for ch in text):
        raise ValueError(f"token {text!r} contains whitespace")
    return text


@dataclass(frozen=True)
class Edit:
    """A single correction: replace tokens[start:end] with `replacement`.

    The replacement holds space-separated tokens; the empty string is a
    deletion (and requires a non-empty span), while an empty span
    (start == end) is an insertion before token `start` (and requires a
    non-empty replacement). `etype` is a free-form error-type label such
    as "R:SPELL"; `annotator` identifies the annotator or system that
    proposed the correction.
    """

    start: int
    end: int
    etype: str
    replacement: str = ""
    annotator: int = 0

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span [{self.start}, {self.end})")
        if not self.etype:
            raise ValueError("etype must be non-empty")
        if self.annotator < 0:
            raise ValueError("annotator id must be >= 0")
        if self.replacement != " ".join(self.replacement.split()):
            raise ValueError(
                f"replacement {self.replacement!r} is not canonical "
                "(single spaces, no leading or trailing whitespace)"
            )
        if self.start == self.end and not self.replacement:
            raise ValueError("edit changes nothing: empty span and empty replacement")

    @property
    def key(self) -> tuple[int, int, str]:
        """Identity used to match corrections across systems.

        The error-type label and annotator id are deliberately excluded:
        two systems proposing the same rewrite of the same span made the
        same correction no matter how they labeled it.
        """
        return (self.start, self.end, self.replacement)

    @property
    def replacement_tokens(self) -> tuple[str, ...]:
        return tuple(self.replacement.split())

    def is_insertion(self) -> bool:
        return self.start == self.end

    def is_deletion(self) -> bool:
        return not self.replacement

    def describe(self) -> str:
        return f"[{self.start}:{self.end})->{self.replacement!r} ({self.etype}, a{self.annotator})"


@dataclass(frozen=True)
class AnnotatedSentence:
    """A tokenized source sentence plus the edits proposed for it.

    Edits of one annotator must be pairwise non-overlapping; edits of
    different annotators may conflict (gold files carry alternative
    annotations). Construction normalizes edit order to
    (start, end, annotator), which is unique for any valid edit set.
    """

    tokens: tuple[str, ...]
    edits: tuple[Edit, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for tok in self.tokens:
            check_token(tok)
        ordered = tuple(sorted(self.edits, key=lambda e: (e.start, e.end, e.annotator)))
        object.__setattr__(self, "edits", ordered)
        n = len(self.tokens)
        for e in ordered:
            if e.end > n:
                raise ValueError(f"edit {e.describe()} exceeds sentence length {n}")
        by_annotator: dict[int, list[Edit]] = {}
        for e in ordered:
            by_annotator.setdefault(e.annotator, []).append(e)
        for group in by_annotator.values():
            for i, a in enumerate(group):
                for b in group[i + 1:]:
                    if spans_overlap(a.start, a.end, b.start, b.end):
                        raise OverlapError(a, b)

    def edits_for(self, annotator: int) -> tuple[Edit, ...]:
        return tuple(e for e in self.edits if e.annotator == annotator)

    def source_text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class M2Corpus:
    """An ordered collection of annotated sentences."""

    sentences: tuple[AnnotatedSentence, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[AnnotatedSentence]:
        return iter(self.sentences)

    def __getitem__(self, index: int) -> AnnotatedSentence:
        return self.sentences[index]


def apply_edits(tokens: Sequence[str], edits: Iterable[Edit]) -> list[str]:
    """Apply a non-overlapping edit set, returning the corrected tokens.

    Edits are applied in descending (start, end) order so spans earlier
    in the sentence keep their offsets while later ones are rewritten.
    Replacements are whitespace-split into tokens; an empty replacement
    removes the span.
    """
    todo = sorted(edits, key=lambda e: (e.start, e.end), reverse=True)
    n = len(tokens)
    for i, a in enumerate(todo):
        if a.end > n:
            raise ValueError(f"edit {a.describe()} exceeds sentence length {n}")
        for b in todo[i + 1:]:
            if spans_overlap(a.start, a.end, b.start, b.end):
                raise OverlapError(b, a)
    out = list(tokens)
    for e in todo:
        out[e.start:e.end] = e.replacement.split()
    return out


@dataclass(frozen=True)
class ReverseAction:
    """The action that injects an error by undoing a correction.

    kind "delete": remove one occurrence of `find` from a clean sentence;
    kind "insert": insert `put` at a chosen position;
    kind "replace": rewrite one occurrence of `find` with `put`.
    """

    kind: str
    find: tuple[str, ...]
    put: tuple[str, ...]


def reverse_edit(edit: Edit, source_tokens: Sequence[str]) -> ReverseAction:
    """Describe the inverse of `edit`.

    A correction that inserts text is undone by deleting an occurrence
    of that text; one that deletes text is undone by inserting the text
    back somewhere; a replacement is undone by rewriting the corrected
    form with the original form.
    """
    span = tuple(source_tokens[edit.start:edit.end])
    repl = edit.replacement_tokens
    if edit.is_insertion():
        return ReverseAction("delete", find=repl, put=())
    if edit.is_deletion():
        return ReverseAction("insert", find=(), put=span)
    return ReverseAction("replace", find=repl, put=span)
