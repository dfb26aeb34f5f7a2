"""Straight-line reference implementation of the recommendation
pipeline, used as the oracle for the golden end-to-end test.

Everything is recomputed inline from the index count tables: per-entity
factors, truncated products, similarity, interleaving.  Deliberately no
imports from the production scoring or assembly modules.
"""

from __future__ import annotations

import math


def reference_recommend(user_id, weights, global_topic, index, candidates,
                        m, n, threshold, limit, generated_at):
    """Steps: top interests, per-topic ranking, per-topic dedup,
    round robin, merged dedup, truncate."""
    # Step 1: top-M regular topics by weight, ties by title.
    regular = [(t, w) for t, w in weights.items() if t != global_topic]
    regular.sort(key=lambda kv: (-kv[1], kv[0]))
    topics = [t for t, _ in regular[:m]]

    bags = {bag.tweet_id: set(bag.entities) for bag in candidates}

    def factor(entity, topic):
        pair = index.n_et.get(topic, {}).get(entity, 0)
        if pair < index.k:
            return 1.0
        n_e = index.n_e.get(entity, 0)
        if n_e == 0:
            return 1.0
        n_t = index.n_t.get(topic, 0)
        return pair * (index.n - n_e + index.delta) / (
            n_e * (n_t - pair + index.delta))

    def log_score(tweet_id, topic):
        logs = sorted(
            (math.log(factor(e, topic)) for e in sorted(bags[tweet_id])),
            reverse=True,
        )
        total = 0.0
        for value in logs[: index.nu]:
            total += value
        return total

    def jac(a, b):
        if not a and not b:
            return 1.0
        return len(a & b) / len(a | b)

    def dedup(ids):
        kept = []
        for tid in ids:
            if all(jac(bags[tid], bags[k]) < threshold for k in kept):
                kept.append(tid)
        return kept

    # Steps 2 + 3: per-topic top-N ranking, then within-list dedup.
    topical = []
    for topic in topics:
        scored = sorted(
            ((tid, log_score(tid, topic)) for tid in bags),
            key=lambda pair: (-pair[1], pair[0]),
        )[:n]
        topical.append(dedup([tid for tid, _ in scored]))

    # Step 4: round robin, one per list per turn, skipping ids already
    # emitted (the owning list advances within its turn).
    cursors = [0] * len(topical)
    emitted = set()
    merged = []  # (tweet_id, topic, rank_in_topic_list)
    progressed = True
    while progressed:
        progressed = False
        for li, items in enumerate(topical):
            at = cursors[li]
            while at < len(items) and items[at] in emitted:
                at += 1
            if at < len(items):
                merged.append((items[at], topics[li], at + 1))
                emitted.add(items[at])
                cursors[li] = at + 1
                progressed = True
            else:
                cursors[li] = at

    # Step 5: dedup the merged list, then truncate.
    final_kept = dedup([tid for tid, _, _ in merged])
    keep = set(final_kept)
    items = []
    for tid, topic, topical_rank in merged:
        if tid not in keep:
            continue
        items.append({
            "tweet_id": tid,
            "topic": topic,
            "topical_rank": topical_rank,
            "final_rank": len(items) + 1,
        })
        if len(items) >= limit:
            break
    return {"user_id": user_id, "items": items, "generated_at": generated_at}
