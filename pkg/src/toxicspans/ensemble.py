"""Majority voting over several models' predicted offset sets."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["REFERENCE_LAST_N", "VoteConfig", "majority_vote", "vote_corpus"]

# Depth recipes of the reference three-member ensemble ("last N" blocks).
REFERENCE_LAST_N = (1, 3, 6)


@dataclass(frozen=True)
class VoteConfig:
    member_count: int

    def __post_init__(self) -> None:
        if self.member_count < 1:
            raise ValueError("an ensemble needs at least one member")

    @property
    def threshold(self) -> int:
        return self.member_count // 2 + 1


def majority_vote(predictions: Sequence[Iterable[int]], config: VoteConfig | None = None) -> tuple[int, ...]:
    """Keep every offset predicted by a strict majority of members."""
    config = config or VoteConfig(len(predictions))
    if len(predictions) != config.member_count:
        raise ValueError(f"expected {config.member_count} members, got {len(predictions)}")
    votes = Counter(o for member in predictions for o in set(member))
    return tuple(sorted(o for o, n in votes.items() if n >= config.threshold))


def vote_corpus(members: Sequence[Sequence[Iterable[int]]]) -> list[tuple[int, ...]]:
    """Vote comment by comment; ``members[m][i]`` is model m's set for comment i."""
    if not members:
        raise ValueError("no ensemble members")
    lengths = {len(m) for m in members}
    if len(lengths) != 1:
        raise ValueError(f"members cover different numbers of comments: {sorted(lengths)}")
    config = VoteConfig(len(members))
    return [majority_vote(column, config) for column in zip(*members)]
