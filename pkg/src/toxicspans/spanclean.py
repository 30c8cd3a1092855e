"""Annotation cleaning so that toxic spans line up with whole words.

Each maximal run of annotated offsets goes through three rules in order:

1. trim whitespace from both ends,
2. drop the run if a single character is left,
3. grow the run left and right while the neighbouring character is
   alphanumeric, so partially marked words become fully marked.

Whitespace is the Unicode ``White_Space`` property; alphanumeric means
``Alphabetic`` or a decimal digit (``Nd``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import regex

from .corpus import Comment, Span, offsets_to_spans, spans_to_offsets

__all__ = [
    "CleanReport",
    "clean_comment",
    "clean_corpus",
    "clean_offsets",
    "discard_partial_words",
    "drop_singleton",
    "expand_to_word_boundaries",
    "is_alnum",
    "is_whitespace",
    "trim_whitespace_boundaries",
]

_WHITESPACE = regex.compile(r"\p{White_Space}")
_ALNUM = regex.compile(r"[\p{Alphabetic}\p{Nd}]")


def is_whitespace(ch: str) -> bool:
    return _WHITESPACE.fullmatch(ch) is not None


def is_alnum(ch: str) -> bool:
    return _ALNUM.fullmatch(ch) is not None


@dataclass
class CleanReport:
    """How many span groups each rule touched."""

    trimmed_whitespace: int = 0
    dropped_singletons: int = 0
    expanded_left: int = 0
    expanded_right: int = 0

    def __add__(self, other: CleanReport) -> CleanReport:
        return CleanReport(
            self.trimmed_whitespace + other.trimmed_whitespace,
            self.dropped_singletons + other.dropped_singletons,
            self.expanded_left + other.expanded_left,
            self.expanded_right + other.expanded_right,
        )

    def summary(self) -> str:
        return (
            f"trimmed_whitespace={self.trimmed_whitespace} "
            f"dropped_singletons={self.dropped_singletons} "
            f"expanded_left={self.expanded_left} "
            f"expanded_right={self.expanded_right}"
        )


def trim_whitespace_boundaries(text: str, group: Span) -> Span | None:
    start, end = group.start, group.end
    while start <= end and is_whitespace(text[start]):
        start += 1
    while end >= start and is_whitespace(text[end]):
        end -= 1
    if start > end:
        return None
    return Span(start, end)


def drop_singleton(text: str, group: Span) -> Span | None:
    return None if group.start == group.end else group


def expand_to_word_boundaries(text: str, group: Span) -> Span:
    start, end = group.start, group.end
    while start > 0 and is_alnum(text[start - 1]):
        start -= 1
    while end < len(text) - 1 and is_alnum(text[end + 1]):
        end += 1
    return Span(start, end)


def discard_partial_words(text: str, group: Span) -> Span | None:
    """Alternative to expansion: shrink the group past partially marked words."""
    start, end = group.start, group.end
    if start > 0 and is_alnum(text[start - 1]):
        while start <= end and is_alnum(text[start]):
            start += 1
    if end < len(text) - 1 and is_alnum(text[end + 1]):
        while end >= start and is_alnum(text[end]):
            end -= 1
    return trim_whitespace_boundaries(text, Span(start, end)) if start <= end else None


def _clean_pass(
    text: str, offsets: Iterable[int], report: CleanReport, discard: bool
) -> tuple[int, ...]:
    kept: list[Span] = []
    for group in offsets_to_spans(offsets):
        span = trim_whitespace_boundaries(text, group)
        if span != group:
            report.trimmed_whitespace += 1
        if span is None:
            continue
        span = drop_singleton(text, span)
        if span is None:
            report.dropped_singletons += 1
            continue
        if discard:
            span = discard_partial_words(text, span)
            if span is None:
                continue
        else:
            grown = expand_to_word_boundaries(text, span)
            report.expanded_left += grown.start < span.start
            report.expanded_right += grown.end > span.end
            span = grown
        kept.append(span)
    return spans_to_offsets(kept)


def clean_offsets(
    text: str, raw: Iterable[int], *, discard_partial: bool = False
) -> tuple[tuple[int, ...], CleanReport]:
    """Apply the three cleaning rules to every maximal group of ``raw``.

    The pipeline is run a second time on the merged result, since grown
    groups can touch each other. The report counts first-pass rule firings
    plus any from the second pass (normally none).

    ``discard_partial`` swaps rule 3 for dropping partially marked words;
    it is off by default because it does worse in practice.
    """
    report = CleanReport()
    offsets = _clean_pass(text, raw, report, discard_partial)
    offsets = _clean_pass(text, offsets, report, discard_partial)
    return offsets, report


def clean_comment(comment: Comment, *, discard_partial: bool = False) -> tuple[Comment, CleanReport]:
    offsets, report = clean_offsets(
        comment.text, comment.toxic_offsets, discard_partial=discard_partial
    )
    return Comment(comment.id, comment.text, offsets), report


def clean_corpus(
    comments: Iterable[Comment], *, discard_partial: bool = False
) -> tuple[list[Comment], CleanReport]:
    cleaned, total = [], CleanReport()
    for c in comments:
        new, report = clean_comment(c, discard_partial=discard_partial)
        cleaned.append(new)
        total = total + report
    return cleaned, total
