"""Relevance metrics over human-judged rankings, plus the
expert-counting interest baseline used for comparison runs.

Judgments are 1-5 ratings in system rank order.  Precision-style
metrics binarize at rating >= 4; the gain for discounted cumulative
gain is the raw rating with a 1/log2(rank+1) discount, which is a
pinned convention (reports should label it), not an industry-wide one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import CorpusHandle
from .errors import NoExpertFollowingsError
from .expertise import ExpertRecord

RELEVANT_MIN_SCORE = 4


@dataclass(frozen=True)
class JudgedRanking:
    user_id: str
    items: tuple[tuple[str, int], ...]  # (item_id, likert 1-5) in rank order


@dataclass(frozen=True)
class MetricReport:
    mean_average_score: float
    mean_precision: float
    map: float
    mean_ndcg: float

    def as_dict(self) -> dict:
        return {
            "mean_average_score": self.mean_average_score,
            "mean_precision": self.mean_precision,
            "map": self.map,
            "mean_ndcg": self.mean_ndcg,
        }


def binarize(likert_score: int) -> bool:
    """Ratings of 4 and 5 count as relevant."""
    if not isinstance(likert_score, int) or not 1 <= likert_score <= 5:
        raise ValueError(f"likert score must be in 1..5, got {likert_score!r}")
    return likert_score >= RELEVANT_MIN_SCORE


def average_precision(scores: Sequence[int]) -> float:
    """AP over the binarized list; 0 when nothing is relevant."""
    hits = 0
    total = 0.0
    for rank, score in enumerate(scores, start=1):
        if binarize(score):
            hits += 1
            total += hits / rank
    return total / hits if hits else 0.0


def dcg(scores: Sequence[int]) -> float:
    return sum(s / math.log2(rank + 1) for rank, s in enumerate(scores, start=1))


def ndcg(scores: Sequence[int]) -> float:
    ideal = dcg(sorted(scores, reverse=True))
    return dcg(scores) / ideal if ideal > 0 else 0.0


def compute_metrics(rankings: Iterable[JudgedRanking]) -> MetricReport:
    """Per-user metrics at full list length, averaged over users."""
    rankings = list(rankings)
    if not rankings:
        raise ValueError("no judged rankings supplied")
    avg_scores, precisions, aps, ndcgs = [], [], [], []
    for ranking in rankings:
        if not ranking.items:
            raise ValueError(f"empty ranking for user {ranking.user_id}")
        scores = [score for _, score in ranking.items]
        for s in scores:
            binarize(s)  # validates range
        avg_scores.append(sum(scores) / len(scores))
        precisions.append(sum(binarize(s) for s in scores) / len(scores))
        aps.append(average_precision(scores))
        ndcgs.append(ndcg(scores))
    n = len(rankings)
    return MetricReport(
        mean_average_score=sum(avg_scores) / n,
        mean_precision=sum(precisions) / n,
        map=sum(aps) / n,
        mean_ndcg=sum(ndcgs) / n,
    )


def expert_count_interests(
    user_id: str,
    experts: Mapping[str, ExpertRecord],
    corpus: CorpusHandle,
    m: int,
) -> list[str]:
    """Baseline interest ranking: count followed experts per topic.

    No popularity correction: crowded topics win simply by having more
    experts to follow.  Ties break by title.
    """
    followings = corpus.expert_followings(user_id, experts)
    if not followings:
        raise NoExpertFollowingsError(user_id)
    counts: dict[str, int] = {}
    for v in followings:
        for topic in experts[v].expertise:
            counts[topic] = counts.get(topic, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [t for t, _ in ranked[:m]]


def load_judgments(path: str | Path) -> list[JudgedRanking]:
    rankings = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            rankings.append(JudgedRanking(
                user_id=obj["user_id"],
                items=tuple(
                    (item["item_id"], int(item["score"])) for item in obj["items"]
                ),
            ))
    return rankings


def save_report(report: MetricReport, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
