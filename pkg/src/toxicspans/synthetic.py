"""Synthetic corpora where toxicity is exactly membership in a word list.

Useful as a learnability check: a working model must drive character F1
on such a corpus close to 1.
"""

from __future__ import annotations

import numpy as np

from .corpus import Comment

__all__ = ["NEUTRAL_WORDS", "PLANTED_LEXICON", "planted_lexicon_corpus"]

PLANTED_LEXICON = ("idiot", "stupid", "moron", "dumb", "pathetic")

NEUTRAL_WORDS = (
    "the", "people", "city", "council", "voted", "again", "for", "new", "roads",
    "and", "this", "is", "a", "plan", "you", "are", "so", "not", "what", "they",
    "said", "about", "taxes", "today", "our", "mayor", "thinks", "it", "will",
    "work", "who", "cares", "really", "just", "read", "article", "before", "posting",
)


def planted_lexicon_corpus(
    n: int = 32,
    seed: int = 0,
    lexicon: tuple[str, ...] = PLANTED_LEXICON,
    min_words: int = 5,
    max_words: int = 12,
) -> list[Comment]:
    """``n`` random sentences; the characters of every lexicon word are toxic.

    About a quarter of the sentences contain no lexicon word at all. Some
    sentences end with punctuation, and lexicon words are occasionally
    capitalised.
    """
    rng = np.random.default_rng(seed)
    comments = []
    for i in range(n):
        length = int(rng.integers(min_words, max_words + 1))
        words = [str(rng.choice(NEUTRAL_WORDS)) for _ in range(length)]
        if rng.random() >= 0.25:
            for _ in range(int(rng.integers(1, 3))):
                word = str(rng.choice(lexicon))
                if rng.random() < 0.2:
                    word = word.capitalize()
                words[int(rng.integers(length))] = word

        text, toxic = "", []
        for j, word in enumerate(words):
            if j:
                text += " "
            if word.lower() in lexicon:
                toxic.extend(range(len(text), len(text) + len(word)))
            text += word
        if rng.random() < 0.5:
            text += str(rng.choice([".", "!", "?"]))
        comments.append(Comment(i, text, tuple(toxic)))
    return comments
