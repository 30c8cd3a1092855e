"""Reading and writing span-annotated comment corpora.

A corpus file is a two-column CSV with header ``spans,text``. The spans
column holds a bracketed list of toxic character offsets, e.g.
``"[11, 12, 13, 14, 15]"``. Offsets count Unicode code points, which is
what Python string indexing already does.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

__all__ = [
    "Comment",
    "CorpusError",
    "CorpusFormatError",
    "CorpusValidationError",
    "Span",
    "format_offsets",
    "offsets_to_spans",
    "parse_offsets",
    "parse_tsd_csv",
    "read_tsd_csv",
    "spans_to_offsets",
    "write_tsd_csv",
]

_OFFSET_LIST = re.compile(r"^\[\s*(?:\d+\s*(?:,\s*\d+\s*)*)?\]$")


class CorpusError(ValueError):
    """Base class for corpus problems."""


class CorpusFormatError(CorpusError):
    """The file does not have the expected columns or list syntax."""


class CorpusValidationError(CorpusError):
    """A row parsed but its offsets do not fit its text."""


@dataclass(frozen=True, order=True)
class Span:
    """Inclusive character range ``[start, end]``."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.start > self.end:
            raise ValueError(f"invalid span ({self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start + 1

    def offsets(self) -> range:
        return range(self.start, self.end + 1)


@dataclass(frozen=True)
class Comment:
    id: int
    text: str
    toxic_offsets: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        offsets = tuple(sorted(set(self.toxic_offsets)))
        object.__setattr__(self, "toxic_offsets", offsets)
        if offsets and (offsets[0] < 0 or offsets[-1] >= len(self.text)):
            bad = offsets[0] if offsets[0] < 0 else offsets[-1]
            raise CorpusValidationError(
                f"row {self.id}: offset {bad} outside text of length {len(self.text)}"
            )

    @property
    def spans(self) -> list[Span]:
        return offsets_to_spans(self.toxic_offsets)


def offsets_to_spans(offsets: Iterable[int]) -> list[Span]:
    """Group offsets into maximal runs of consecutive integers."""
    spans: list[Span] = []
    start = prev = None
    for o in sorted(set(offsets)):
        if prev is not None and o == prev + 1:
            prev = o
            continue
        if start is not None:
            spans.append(Span(start, prev))
        start = prev = o
    if start is not None:
        spans.append(Span(start, prev))
    return spans


def spans_to_offsets(spans: Iterable[Span | tuple[int, int]]) -> tuple[int, ...]:
    """Union of inclusive ranges; overlapping spans merge silently."""
    out: set[int] = set()
    for s in spans:
        start, end = (s.start, s.end) if isinstance(s, Span) else s
        out.update(range(start, end + 1))
    return tuple(sorted(out))


def parse_offsets(field_value: str) -> tuple[int, ...]:
    """Parse ``"[1, 2, 3]"`` (any spacing) into a sorted tuple of unique ints."""
    value = field_value.strip()
    if not _OFFSET_LIST.match(value):
        raise CorpusFormatError(f"malformed offset list {field_value!r}")
    inner = value[1:-1].strip()
    if not inner:
        return ()
    return tuple(sorted({int(x) for x in inner.split(",")}))


def format_offsets(offsets: Iterable[int]) -> str:
    return "[" + ", ".join(str(o) for o in sorted(set(offsets))) + "]"


def read_tsd_csv(stream: io.TextIOBase) -> list[Comment]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        raise CorpusFormatError("empty file: expected header 'spans,text'")
    header = [h.strip().lstrip("\ufeff") for h in header]
    try:
        spans_col, text_col = header.index("spans"), header.index("text")
    except ValueError:
        raise CorpusFormatError(f"expected columns 'spans' and 'text', got {header}") from None

    comments = []
    for row in reader:
        row_id = len(comments)
        if len(row) != len(header):
            raise CorpusFormatError(
                f"row {row_id} (line {reader.line_num}): expected {len(header)} fields, got {len(row)}"
            )
        try:
            offsets = parse_offsets(row[spans_col])
        except CorpusFormatError as exc:
            raise CorpusFormatError(f"row {row_id} (line {reader.line_num}): {exc}") from None
        comments.append(Comment(row_id, row[text_col], offsets))
    return comments


def parse_tsd_csv(path: str | Path) -> list[Comment]:
    """Load a TSD-style CSV; ``id`` is the zero-based data row index."""
    with open(path, encoding="utf-8", newline="") as fh:
        return read_tsd_csv(fh)


def write_tsd_csv(path: str | Path, comments: Sequence[Comment]) -> None:
    # Minimal quoting and LF line ends, the layout pandas gives the public files.
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["spans", "text"])
        for c in comments:
            writer.writerow([format_offsets(c.toxic_offsets), c.text])
