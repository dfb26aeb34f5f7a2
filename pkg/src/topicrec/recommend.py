"""Round-robin assembly of explained recommendation lists.

For the user's top interests, each topic contributes its best-scoring
candidate tweets; per-topic lists are deduplicated by entity-set
Jaccard similarity, interleaved one-per-topic in interest order, then
the merged list is deduplicated again and truncated.  Every emitted
item keeps the topic that selected it as its explanation.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .bim import EntityBag, TopicModelIndex, top_tweets
from .errors import NoExpertFollowingsError
from .interest import InterestVector, top_interests

DEFAULT_SIMILARITY_THRESHOLD = 0.7
DEFAULT_M = 50
DEFAULT_N = 1000
DEFAULT_LIMIT = 10


@dataclass(frozen=True)
class RecommendationItem:
    tweet_id: str
    topic: str
    topical_rank: int
    final_rank: int


@dataclass(frozen=True)
class RecommendationList:
    user_id: str
    items: tuple[RecommendationItem, ...]
    generated_at: int

    def as_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "items": [
                {
                    "tweet_id": it.tweet_id,
                    "topic": it.topic,
                    "topical_rank": it.topical_rank,
                    "final_rank": it.final_rank,
                }
                for it in self.items
            ],
            "generated_at": self.generated_at,
        }


def jaccard(a: Iterable[str], b: Iterable[str]) -> float:
    """Set overlap in [0, 1]; two empty sets count as identical."""
    a, b = set(a), set(b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def dedup_list(bags: Sequence[EntityBag],
               threshold: float = DEFAULT_SIMILARITY_THRESHOLD) -> list[EntityBag]:
    """Keep each bag only if it clears the similarity threshold against
    everything already kept; order is preserved."""
    kept: list[EntityBag] = []
    for bag in bags:
        if all(jaccard(bag.entities, k.entities) < threshold for k in kept):
            kept.append(bag)
    return kept


def round_robin(topical_lists: Sequence[Sequence[str]]) -> list[tuple[str, int, int]]:
    """Interleave per-topic tweet id lists one element per list per
    round, in list order.

    A tweet id present in several lists is emitted only the first time
    it comes up; on its later turns the owning list advances to its
    next unseen element within the same turn.  Returns
    ``(tweet_id, list_index, rank_in_list)`` triples, ranks 1-based.
    """
    cursors = [0] * len(topical_lists)
    emitted: set[str] = set()
    merged: list[tuple[str, int, int]] = []
    while True:
        progressed = False
        for li, items in enumerate(topical_lists):
            at = cursors[li]
            while at < len(items) and items[at] in emitted:
                at += 1
            cursors[li] = at
            if at < len(items):
                merged.append((items[at], li, at + 1))
                emitted.add(items[at])
                cursors[li] = at + 1
                progressed = True
        if not progressed:
            return merged


def recommend_for_topics(
    user_id: str,
    topics_in_order: Sequence[str],
    index: TopicModelIndex,
    candidates: Sequence[EntityBag],
    n: int = DEFAULT_N,
    threshold: float = DEFAULT_SIMILARITY_THRESHOLD,
    limit: int = DEFAULT_LIMIT,
    generated_at: int | None = None,
) -> RecommendationList:
    """Assembly pipeline given an already-ordered topic list."""
    by_id = {bag.tweet_id: bag for bag in candidates}
    topical_ids: list[list[str]] = []
    for topic in topics_in_order:
        ranked = top_tweets(topic, candidates, index, n=n)
        bags = [by_id[tweet_id] for tweet_id, _ in ranked]
        topical_ids.append([bag.tweet_id for bag in dedup_list(bags, threshold)])

    merged = round_robin(topical_ids)
    merged_bags = [by_id[tweet_id] for tweet_id, _, _ in merged]
    kept = {bag.tweet_id for bag in dedup_list(merged_bags, threshold)}

    items = []
    for tweet_id, list_idx, topical_rank in merged:
        if tweet_id not in kept:
            continue
        items.append(RecommendationItem(
            tweet_id=tweet_id,
            topic=topics_in_order[list_idx],
            topical_rank=topical_rank,
            final_rank=len(items) + 1,
        ))
        if len(items) >= limit:
            break
    return RecommendationList(
        user_id=user_id,
        items=tuple(items),
        generated_at=int(time.time()) if generated_at is None else generated_at,
    )


def recommend(
    user_id: str,
    interests: InterestVector,
    index: TopicModelIndex,
    candidates: Sequence[EntityBag],
    m: int = DEFAULT_M,
    n: int = DEFAULT_N,
    threshold: float = DEFAULT_SIMILARITY_THRESHOLD,
    limit: int = DEFAULT_LIMIT,
    generated_at: int | None = None,
) -> RecommendationList:
    """Top-M interests, top-N per topic, dedup, round robin, dedup, cut."""
    topics = top_interests(interests, m)
    if not topics:
        raise NoExpertFollowingsError(user_id)
    return recommend_for_topics(
        user_id, topics, index, candidates,
        n=n, threshold=threshold, limit=limit, generated_at=generated_at,
    )


def save_recommendations(recs: Iterable[RecommendationList], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in recs:
            fh.write(json.dumps(rec.as_dict(), sort_keys=True,
                                separators=(",", ":"), ensure_ascii=False) + "\n")
