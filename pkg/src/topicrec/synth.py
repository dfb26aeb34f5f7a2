"""Deterministic synthetic corpora with recorded ground truth.

Runs the follow model forward: every user gets a true interest vector,
every expert a topic set with List-inclusion counts, and follows are
sampled topic-first then expert-by-popularity.  List records are
constructed so that mining recovers exactly the inclusion counts used
for sampling, making generated corpora a ground-truth oracle for the
inference path.  Expert tweets draw entities from per-topic truncated
power-law distributions over a shared vocabulary.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import SpecError
from .expertise import ExpertRecord
from .interest import GLOBAL_TOPIC, build_popularity

TOPICS_PER_USER = 3
TOPICS_PER_EXPERT = 5
MIN_INCLUSION_COUNT = 10  # keep every generated expert above the mining threshold

_EPOCH_BASE = 1700000000


@dataclass(frozen=True)
class SynthSpec:
    num_topics: int
    num_experts: int
    num_users: int
    follows_per_user: int
    tweets_per_expert: int
    vocab_size: int
    entities_per_tweet: int
    topic_entity_skew: float = 1.2
    seed: int = 0

    def validate(self) -> None:
        counts = {
            "num_topics": self.num_topics,
            "num_experts": self.num_experts,
            "num_users": self.num_users,
            "follows_per_user": self.follows_per_user,
            "tweets_per_expert": self.tweets_per_expert,
            "vocab_size": self.vocab_size,
            "entities_per_tweet": self.entities_per_tweet,
        }
        for name, value in counts.items():
            if value < 1:
                raise SpecError(f"{name} must be positive, got {value}")
        if self.num_topics < TOPICS_PER_USER:
            raise SpecError(
                f"num_topics must be at least {TOPICS_PER_USER} so each user "
                "can hold that many interests"
            )
        if self.entities_per_tweet > self.vocab_size:
            raise SpecError("entities_per_tweet cannot exceed vocab_size")
        if self.topic_entity_skew <= 0:
            raise SpecError("topic_entity_skew must be positive")

    @classmethod
    def from_json(cls, path: str | Path) -> "SynthSpec":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(**obj)


@dataclass
class SynthResult:
    out_dir: Path
    true_interests: dict[str, dict[str, float]] = field(default_factory=dict)
    expert_topics: dict[str, list[str]] = field(default_factory=dict)
    topic_selections: dict[str, Counter] = field(default_factory=dict)


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _entity_name(i: int) -> str:
    """Purely alphabetic entity names so extraction keeps them."""
    letters = []
    for _ in range(4):
        letters.append(chr(ord("a") + i % 26))
        i //= 26
    return "w" + "".join(reversed(letters))


def topic_entity_weights(topic_index: int, vocab_size: int, skew: float) -> tuple[list[str], list[float]]:
    """Entity names and sampling weights for one topic: the shared
    vocabulary rotated so each topic has its own power-law head."""
    stride = max(1, vocab_size // 7)
    names = [
        _entity_name((topic_index * stride + r) % vocab_size)
        for r in range(vocab_size)
    ]
    weights = [(r + 1.0) ** (-skew) for r in range(vocab_size)]
    return names, weights


def sample_follows(
    rng: random.Random,
    interest: Mapping[str, float],
    theta: Mapping[str, Mapping[str, float]],
    n_draws: int,
) -> tuple[list[str], Counter]:
    """Draw follows via the two-step process; duplicates collapse.

    Returns the distinct followed experts in first-draw order plus the
    per-topic selection counts (before collapsing), which tests use to
    check that empirical selection frequencies converge to the
    interest vector.
    """
    topics = sorted(interest)
    topic_weights = [interest[t] for t in topics]
    followed: list[str] = []
    seen: set[str] = set()
    selections: Counter = Counter()
    for _ in range(n_draws):
        topic = rng.choices(topics, weights=topic_weights)[0]
        selections[topic] += 1
        expert_ids = sorted(theta[topic])
        expert_weights = [theta[topic][v] for v in expert_ids]
        expert = rng.choices(expert_ids, weights=expert_weights)[0]
        if expert not in seen:
            seen.add(expert)
            followed.append(expert)
    return followed, selections


def _lists_for_counts(
    topic: str,
    counts: Mapping[str, int],
    next_list_id: int,
) -> tuple[list[dict], int]:
    """List records whose mining yields exactly ``counts``: record j
    includes every expert whose target count exceeds j."""
    records = []
    for j in range(max(counts.values())):
        members = sorted(v for v, c in counts.items() if c > j)
        records.append({
            "list_id": f"L{next_list_id:06d}",
            "owner_id": "curator",
            "name": topic,
            "description": "",
            "member_ids": members,
        })
        next_list_id += 1
    return records, next_list_id


def generate(spec: SynthSpec, out_dir: str | Path) -> SynthResult:
    """Emit a full corpus plus ground_truth.ndjson; byte-identical for
    identical specs."""
    spec.validate()
    rng = random.Random(spec.seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = SynthResult(out_dir=out_dir)

    topics = [f"topic{i:02d}" for i in range(spec.num_topics)]
    experts = [f"exp{i:03d}" for i in range(spec.num_experts)]
    users = [f"user{i:04d}" for i in range(spec.num_users)]

    # Topic assignment: cycle once so every topic is covered, then fill
    # with random extras.  Distinct random sets keep topics mutually
    # identifiable; regular overlap patterns would not be.
    expert_topic_sets: dict[str, set[str]] = {v: set() for v in experts}
    for i, v in enumerate(experts):
        expert_topic_sets[v].add(topics[i % spec.num_topics])
    k_eff = min(TOPICS_PER_EXPERT, spec.num_topics)
    for v in experts:
        while len(expert_topic_sets[v]) < k_eff:
            expert_topic_sets[v].add(rng.choice(topics))

    # Inclusion counts: flat within a topic (mild jitter), well above the
    # mining threshold, so within-topic popularity is near uniform.
    inclusion: dict[str, dict[str, int]] = {t: {} for t in topics}
    for v in experts:
        for t in sorted(expert_topic_sets[v]):
            inclusion[t][v] = MIN_INCLUSION_COUNT + 50 + int(31 * rng.random())

    # Follower counts fall off steeply, so global-topic draws concentrate
    # on a handful of celebrities; deep-tail experts sit at zero.
    follower_counts = {
        v: int(20000 * (i + 1) ** -3.2) for i, v in enumerate(experts)
    }

    expert_records = {
        v: ExpertRecord(
            user_id=v,
            follower_count=follower_counts[v],
            expertise={t: inclusion[t][v] for t in sorted(expert_topic_sets[v])},
        )
        for v in experts
    }
    popularity = build_popularity(expert_records)

    # True interests: three active topics with near-even weights plus a
    # small global share.
    for u in users:
        active = rng.sample(topics, TOPICS_PER_USER)
        raw = [rng.gammavariate(40.0, 1.0) for _ in active]
        global_share = rng.uniform(0.02, 0.06)
        scale = (1.0 - global_share) / sum(raw)
        interest = {t: w * scale for t, w in zip(active, raw)}
        interest[GLOBAL_TOPIC] = global_share
        result.true_interests[u] = interest

    follows: list[tuple[str, str]] = []
    for u in users:
        followed, selections = sample_follows(
            rng, result.true_interests[u], popularity.theta, spec.follows_per_user
        )
        result.topic_selections[u] = selections
        follows.extend((u, v) for v in followed)

    # Expert tweets: pick one of the author's topics (weighted by its
    # inclusion count), then distinct entities from the topic distribution.
    entity_tables = {
        t: topic_entity_weights(i, spec.vocab_size, spec.topic_entity_skew)
        for i, t in enumerate(topics)
    }
    tweets: list[dict] = []
    tweet_no = 0
    for v in experts:
        own_topics = sorted(expert_topic_sets[v])
        own_weights = [inclusion[t][v] for t in own_topics]
        for _ in range(spec.tweets_per_expert):
            topic = rng.choices(own_topics, weights=own_weights)[0]
            names, weights = entity_tables[topic]
            chosen: list[str] = []
            seen: set[str] = set()
            while len(chosen) < spec.entities_per_tweet:
                entity = rng.choices(names, weights=weights)[0]
                if entity not in seen:
                    seen.add(entity)
                    chosen.append(entity)
            tweets.append({
                "tweet_id": f"T{tweet_no:07d}",
                "author_id": v,
                "text": " ".join(chosen),
                "lang": "en",
                "posted_at": _EPOCH_BASE + tweet_no,
            })
            tweet_no += 1

    result.expert_topics = {v: sorted(expert_topic_sets[v]) for v in experts}

    # -- write the corpus ---------------------------------------------
    list_records: list[dict] = []
    next_list_id = 0
    for t in topics:
        if inclusion[t]:
            records, next_list_id = _lists_for_counts(t, inclusion[t], next_list_id)
            list_records.extend(records)

    with (out_dir / "lists.ndjson").open("w", encoding="utf-8") as fh:
        for rec in list_records:
            fh.write(_dump(rec) + "\n")
    with (out_dir / "tweets.ndjson").open("w", encoding="utf-8") as fh:
        for rec in tweets:
            fh.write(_dump(rec) + "\n")
    with (out_dir / "follows.ndjson").open("w", encoding="utf-8") as fh:
        for follower, followee in follows:
            fh.write(_dump({"follower_id": follower, "followee_id": followee}) + "\n")
    with (out_dir / "profiles.ndjson").open("w", encoding="utf-8") as fh:
        for v in experts:
            fh.write(_dump({"user_id": v, "follower_count": follower_counts[v]}) + "\n")
        for u in users:
            fh.write(_dump({"user_id": u, "follower_count": 5}) + "\n")
    with (out_dir / "topics.tsv").open("w", encoding="utf-8") as fh:
        for t in topics:
            fh.write(f"{t}\t{t}\n")
    (out_dir / "redirects.tsv").write_text("", encoding="utf-8")
    with (out_dir / "ground_truth.ndjson").open("w", encoding="utf-8") as fh:
        for u in users:
            fh.write(_dump({
                "user_id": u,
                "true_interest": {
                    t: result.true_interests[u][t]
                    for t in sorted(result.true_interests[u])
                },
            }) + "\n")
        for v in experts:
            fh.write(_dump({
                "expert_id": v,
                "topics": result.expert_topics[v],
            }) + "\n")
    return result


def load_ground_truth(path: str | Path) -> tuple[dict[str, dict[str, float]], dict[str, list[str]]]:
    """Read ground_truth.ndjson back into (user interests, expert topics)."""
    interests: dict[str, dict[str, float]] = {}
    expert_topics: dict[str, list[str]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            if "user_id" in obj:
                interests[obj["user_id"]] = {
                    t: float(w) for t, w in obj["true_interest"].items()
                }
            else:
                expert_topics[obj["expert_id"]] = list(obj["topics"])
    return interests, expert_topics


POPULAR_TOPIC = "politics"
NICHE_TOPIC = "quantum computing"


def popularity_bias_fixture(out_dir: str | Path) -> Path:
    """A frozen corpus where expert counting and model-based inference
    disagree: one user follows five experts on a crowded topic and five
    on a sparse one.

    Expert counting ties the two topics (the tie resolves to the
    lexicographically first, the crowded one); the model explains each
    sparse-topic follow far better, so inference puts strictly more
    mass on the sparse topic.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    popular_experts = [f"pol{i:03d}" for i in range(100)]
    niche_experts = [f"qng{i:02d}" for i in range(6)]
    inclusion_popular = {
        v: 40 + (i * 7) % 160 for i, v in enumerate(popular_experts)
    }
    inclusion_niche = {v: 12 + 3 * i for i, v in enumerate(niche_experts)}

    list_records: list[dict] = []
    next_list_id = 0
    for topic, counts in ((POPULAR_TOPIC, inclusion_popular),
                          (NICHE_TOPIC, inclusion_niche)):
        records, next_list_id = _lists_for_counts(topic, counts, next_list_id)
        list_records.extend(records)

    user = "u_bias"
    followed = popular_experts[:5] + niche_experts[:5]

    with (out_dir / "lists.ndjson").open("w", encoding="utf-8") as fh:
        for rec in list_records:
            fh.write(_dump(rec) + "\n")
    with (out_dir / "tweets.ndjson").open("w", encoding="utf-8") as fh:
        for i, author in enumerate((popular_experts[0], niche_experts[0])):
            fh.write(_dump({
                "tweet_id": f"T{i:07d}",
                "author_id": author,
                "text": "placeholder coverage tweet",
                "lang": "en",
                "posted_at": _EPOCH_BASE + i,
            }) + "\n")
    with (out_dir / "follows.ndjson").open("w", encoding="utf-8") as fh:
        for v in followed:
            fh.write(_dump({"follower_id": user, "followee_id": v}) + "\n")
    with (out_dir / "profiles.ndjson").open("w", encoding="utf-8") as fh:
        for v in popular_experts + niche_experts:
            fh.write(_dump({"user_id": v, "follower_count": 100}) + "\n")
        fh.write(_dump({"user_id": user, "follower_count": 5}) + "\n")
    with (out_dir / "topics.tsv").open("w", encoding="utf-8") as fh:
        for t in (POPULAR_TOPIC, NICHE_TOPIC):
            fh.write(f"{t}\t{t}\n")
    (out_dir / "redirects.tsv").write_text("", encoding="utf-8")
    (out_dir / "expected_ordering.json").write_text(_dump({
        "popular_topic": POPULAR_TOPIC,
        "niche_topic": NICHE_TOPIC,
        "expert_count_baseline": "ranks popular topic at or above niche topic",
        "model_inference": "assigns strictly higher weight to niche topic",
    }) + "\n", encoding="utf-8")
    return out_dir
