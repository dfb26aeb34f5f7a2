"""Interest inference from expert followings.

Following is modeled as a two-step draw: pick a topic from the user's
interest distribution, then pick an expert from that topic's
popularity distribution.  Regular-topic popularity is proportional to
the expert's List-inclusion count for the topic; a synthetic global
topic, in which every expert participates with popularity proportional
to follower count, absorbs celebrity-following.  The interest vector
is the maximum-likelihood fit to the observed follow set, computed by
EM:

    E-step:  w[v][t] = theta[t][v] * i[t] / sum_t' theta[t'][v] * i[t']
    M-step:  i[t] = mean over followed experts of w[v][t]

with log-likelihood  sum_v log sum_t theta[t][v] * i[t]  over each
expert's own topics.  Iteration stops when the relative gain falls
below the configured fraction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .corpus import CorpusHandle
from .errors import DegenerateModelError, NoExpertFollowingsError
from .expertise import ExpertRecord

#: Key of the synthetic global topic. Underscores cannot survive title
#: normalization, so no catalog topic can collide with it.
GLOBAL_TOPIC = "__global__"


@dataclass(frozen=True)
class TopicPopularity:
    """Per-topic expert-selection distributions.

    ``theta[t][v]`` is the probability of picking expert ``v`` when
    following on topic ``t``; every inner map sums to 1.  The global
    topic covers all experts.
    """

    theta: Mapping[str, Mapping[str, float]]
    expert_topics: Mapping[str, tuple[str, ...]]


@dataclass(frozen=True)
class InterestVector:
    user_id: str
    weights: Mapping[str, float]
    iterations_run: int = 0
    final_log_likelihood: float | None = None


@dataclass(frozen=True)
class EMConfig:
    rel_improvement_stop: float = 0.01
    max_iterations: int = 100
    #: Absolute stop threshold used when the previous log-likelihood is 0.
    abs_stop: float = 1e-12

    def __post_init__(self):
        if self.rel_improvement_stop <= 0:
            raise ValueError("rel_improvement_stop must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


def build_popularity(experts: Mapping[str, ExpertRecord]) -> TopicPopularity:
    """Normalize expertise counts into per-topic distributions.

    Regular topics use raw List-inclusion counts (always >= 1 by the
    expert-record invariant); the global topic uses follower counts
    with add-one smoothing, since those may be zero.
    """
    if not experts:
        raise ValueError("experts must be nonempty")
    by_topic: dict[str, dict[str, float]] = {}
    for rec in experts.values():
        for topic, count in rec.expertise.items():
            by_topic.setdefault(topic, {})[rec.user_id] = float(count)

    theta: dict[str, dict[str, float]] = {}
    for topic in sorted(by_topic):
        weights = by_topic[topic]
        total = sum(weights.values())
        theta[topic] = {v: w / total for v, w in sorted(weights.items())}

    smoothed = {
        v: float(rec.follower_count + 1) for v, rec in sorted(experts.items())
    }
    total = sum(smoothed.values())
    theta[GLOBAL_TOPIC] = {v: w / total for v, w in smoothed.items()}

    expert_topics = {
        v: tuple(sorted(rec.expertise)) + (GLOBAL_TOPIC,)
        for v, rec in sorted(experts.items())
    }
    return TopicPopularity(theta=theta, expert_topics=expert_topics)


def init_interest(
    user_followings: Iterable[str],
    experts: Mapping[str, ExpertRecord],
    popularity: TopicPopularity,
    user_id: str = "",
) -> InterestVector:
    """Data-driven start: each regular topic weighted by how many of the
    followed experts hold it, the global topic by the following count."""
    followings = sorted(set(user_followings))
    if not followings:
        raise NoExpertFollowingsError(user_id or "<anonymous>")
    raw: dict[str, float] = {}
    for v in followings:
        for topic in experts[v].expertise:
            raw[topic] = raw.get(topic, 0.0) + 1.0
    raw[GLOBAL_TOPIC] = float(len(followings))
    total = sum(raw.values())
    weights = {t: w / total for t, w in sorted(raw.items())}
    return InterestVector(user_id=user_id, weights=weights)


def e_step(
    interest: InterestVector,
    followings: Iterable[str],
    popularity: TopicPopularity,
) -> dict[str, dict[str, float]]:
    """Responsibilities w[v][t] over each followed expert's own topics."""
    weights: dict[str, dict[str, float]] = {}
    for v in sorted(set(followings)):
        terms = {
            t: popularity.theta[t][v] * interest.weights.get(t, 0.0)
            for t in popularity.expert_topics[v]
        }
        denom = sum(terms.values())
        if denom <= 0.0:
            raise DegenerateModelError(
                f"zero normalizer for expert {v}; interest has no mass on its topics"
            )
        weights[v] = {t: x / denom for t, x in terms.items()}
    return weights


def m_step(
    weights: Mapping[str, Mapping[str, float]],
    n_followings: int,
    user_id: str = "",
) -> InterestVector:
    """Average the responsibilities into the next interest vector."""
    acc: dict[str, float] = {}
    for per_expert in weights.values():
        for t, w in per_expert.items():
            acc[t] = acc.get(t, 0.0) + w
    return InterestVector(
        user_id=user_id,
        weights={t: w / n_followings for t, w in sorted(acc.items())},
    )


def log_likelihood(
    weights: Mapping[str, float],
    followings: Iterable[str],
    popularity: TopicPopularity,
) -> float:
    """Joint log-likelihood of a follow set under an interest vector."""
    total = 0.0
    for v in followings:
        s = sum(
            popularity.theta[t][v] * weights.get(t, 0.0)
            for t in popularity.expert_topics[v]
        )
        if s <= 0.0:
            return -math.inf
        total += math.log(s)
    return total


def _flatten(followings: list[str], popularity: TopicPopularity,
             init: Mapping[str, float]):
    """Pack one user's EM problem into the flat kernel layout."""
    topics = sorted({
        t for v in followings for t in popularity.expert_topics[v]
        if t != GLOBAL_TOPIC
    })
    topics.append(GLOBAL_TOPIC)
    pos = {t: idx for idx, t in enumerate(topics)}

    theta_vals: list[float] = []
    topic_idx: list[int] = []
    indptr = [0]
    for v in followings:
        for t in popularity.expert_topics[v]:
            theta_vals.append(popularity.theta[t][v])
            topic_idx.append(pos[t])
        indptr.append(len(theta_vals))

    i0 = np.zeros(len(topics))
    for t, w in init.items():
        i0[pos[t]] = w
    return (
        topics,
        np.asarray(theta_vals, dtype=np.float64),
        np.asarray(topic_idx, dtype=np.int64),
        np.asarray(indptr, dtype=np.int64),
        i0,
    )


def infer_interest_trace(
    user_id: str,
    followings: Iterable[str],
    experts: Mapping[str, ExpertRecord],
    popularity: TopicPopularity,
    config: EMConfig = EMConfig(),
):
    """Full EM run returning the result plus per-iteration history.

    Returns ``(vector, ll_history, iterate_history, topics)`` where the
    histories include the initialization at index 0.
    """
    followings = sorted(set(followings))
    init = init_interest(followings, experts, popularity, user_id=user_id)
    topics, theta, topic_idx, indptr, i0 = _flatten(
        followings, popularity, init.weights
    )
    final, n_iters, ll_hist, iter_hist = _kernels.em_run(
        theta, topic_idx, indptr, len(topics), i0,
        config.max_iterations, config.rel_improvement_stop, config.abs_stop,
    )
    vector = InterestVector(
        user_id=user_id,
        weights={t: float(final[idx]) for idx, t in enumerate(topics)},
        iterations_run=int(n_iters),
        final_log_likelihood=float(ll_hist[-1]),
    )
    return vector, ll_hist, iter_hist, topics


def infer_interest(
    user_id: str,
    corpus: CorpusHandle,
    experts: Mapping[str, ExpertRecord],
    popularity: TopicPopularity,
    config: EMConfig = EMConfig(),
) -> InterestVector:
    """Infer the interest vector of ``user_id`` from its expert followings."""
    followings = corpus.expert_followings(user_id, experts)
    if not followings:
        raise NoExpertFollowingsError(user_id)
    vector, _, _, _ = infer_interest_trace(
        user_id, followings, experts, popularity, config
    )
    return vector


def top_interests(interest: InterestVector, m: int) -> list[str]:
    """Top ``m`` regular topics by weight, ties broken by title; the
    global topic never appears."""
    regular = [
        (t, w) for t, w in interest.weights.items() if t != GLOBAL_TOPIC
    ]
    regular.sort(key=lambda kv: (-kv[1], kv[0]))
    return [t for t, _ in regular[:m]]


def save_interests(vectors: Iterable[InterestVector], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for vec in vectors:
            fh.write(json.dumps({
                "user_id": vec.user_id,
                "weights": dict(sorted(vec.weights.items())),
                "iterations_run": vec.iterations_run,
                "final_log_likelihood": vec.final_log_likelihood,
            }, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n")


def load_interests(path: str | Path) -> dict[str, InterestVector]:
    vectors: dict[str, InterestVector] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            vectors[obj["user_id"]] = InterestVector(
                user_id=obj["user_id"],
                weights={t: float(w) for t, w in obj["weights"].items()},
                iterations_run=int(obj["iterations_run"]),
                final_log_likelihood=(
                    None if obj["final_log_likelihood"] is None
                    else float(obj["final_log_likelihood"])
                ),
            )
    return vectors
