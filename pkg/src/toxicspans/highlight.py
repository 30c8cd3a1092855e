"""Render gold and predicted spans side by side.

Gold offsets are underlined, predicted offsets are coloured red; a
character in both carries both styles.
"""

from __future__ import annotations

import html
from itertools import groupby
from typing import Iterable, Sequence

__all__ = ["render_html", "render_terminal", "segments"]

ANSI_RESET = "\x1b[0m"
ANSI_STYLE = {
    (True, False): "\x1b[4m",
    (False, True): "\x1b[31m",
    (True, True): "\x1b[4;31m",
}

HTML_STYLE = """<style>
u.gold { text-decoration: underline; }
span.pred { color: red; }
</style>"""


def segments(text: str, gold: Iterable[int], pred: Iterable[int]) -> list[tuple[str, bool, bool]]:
    """Split ``text`` into maximal runs of ``(chunk, in_gold, in_pred)``."""
    gold, pred = set(gold), set(pred)
    runs = []
    for key, group in groupby(range(len(text)), key=lambda i: (i in gold, i in pred)):
        idx = list(group)
        runs.append((text[idx[0]:idx[-1] + 1], *key))
    return runs


def render_terminal(text: str, gold: Iterable[int], pred: Iterable[int]) -> str:
    out = []
    for chunk, g, p in segments(text, gold, pred):
        out.append(f"{ANSI_STYLE[g, p]}{chunk}{ANSI_RESET}" if g or p else chunk)
    return "".join(out)


def _html_comment(text: str, gold: Iterable[int], pred: Iterable[int]) -> str:
    out = []
    for chunk, g, p in segments(text, gold, pred):
        piece = html.escape(chunk)
        if p:
            piece = f'<span class="pred">{piece}</span>'
        if g:
            piece = f'<u class="gold">{piece}</u>'
        out.append(piece)
    return "".join(out)


def render_html(rows: Sequence[tuple[int, str, Iterable[int], Iterable[int]]]) -> str:
    """A standalone HTML page, one paragraph per ``(id, text, gold, pred)`` row."""
    body = "\n".join(
        f'<p data-id="{cid}">{_html_comment(text, gold, pred)}</p>' for cid, text, gold, pred in rows
    )
    return f'<!DOCTYPE html>\n<html><head><meta charset="utf-8">\n{HTML_STYLE}\n</head><body>\n{body}\n</body></html>\n'
