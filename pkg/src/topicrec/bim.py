"""Tweet-topic relevance scoring from binary entity occurrence.

A tweet is a set of entities.  Relevance to a topic multiplies one
factor per entity,

    s[e,t] = n_et * (n - n_e + delta) / (n_e * (n_t - n_et + delta))

when the entity appears in at least ``k`` of the topic experts' tweets,
and 1 otherwise; ``n`` counts corpus tweets, ``n_e`` corpus tweets with
the entity, ``n_t`` tweets by experts on the topic, ``n_et`` those that
contain the entity.  Only the ``nu`` largest factors enter the product,
which both damps long tweets and keeps per-tweet scoring cost
proportional to the tweet's own entity count rather than the corpus
vocabulary.  Products are accumulated as sums of logs.
"""

from __future__ import annotations

import json
import math
import re
import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Collection, Iterable, Sequence

import numpy as np

from . import _kernels
from .corpus import TweetRecord

DEFAULT_DELTA = 1
DEFAULT_K = 5
DEFAULT_NU = 3

_URL = re.compile(r"^(https?://|www\.)", re.IGNORECASE)
_ALPHA_RUN = re.compile(r"[a-z]+")
_ALNUM = re.compile(r"[^0-9a-z]+")


@dataclass(frozen=True)
class EntityBag:
    """Binary entity occurrence for one tweet."""

    tweet_id: str
    entities: frozenset[str]


def extract_entities(tweet: TweetRecord, stopwords: Collection[str] = ()) -> EntityBag:
    """Deterministic entity extraction: hashtags (marker stripped) plus
    non-stopword alphabetic tokens of length >= 2, all lowercased;
    URLs and @mentions are dropped.  Callers filter to lang == "en".
    """
    entities: set[str] = set()
    for raw in tweet.text.split():
        if not raw:
            continue
        if raw.startswith("@"):
            continue
        if _URL.match(raw):
            continue
        if raw.startswith("#"):
            tag = _ALNUM.sub("", raw[1:].lower())
            if tag:
                entities.add(tag)
            continue
        for run in _ALPHA_RUN.findall(raw.lower()):
            if len(run) >= 2 and run not in stopwords:
                entities.add(run)
    return EntityBag(tweet_id=tweet.tweet_id, entities=frozenset(entities))


class TopicModelIndex:
    """Count tables backing the scorer.

    ``s_lookups`` counts per-entity score computations, so tests can
    assert that scoring a tweet touches exactly its own entities.
    """

    def __init__(self, delta: int = DEFAULT_DELTA, k: int = DEFAULT_K,
                 nu: int = DEFAULT_NU):
        if delta < 0 or k < 0 or nu < 1:
            raise ValueError("require delta >= 0, k >= 0, nu >= 1")
        self.n = 0
        self.n_e: dict[str, int] = {}
        self.n_t: dict[str, int] = {}
        self.n_et: dict[str, dict[str, int]] = {}
        self.delta = delta
        self.k = k
        self.nu = nu
        self.s_lookups = 0

    def add_tweet(self, bag: EntityBag, author_topics: Collection[str]) -> None:
        """Fold one expert tweet into the tables; a multi-topic author
        counts the tweet once under each of their topics."""
        self.n += 1
        for e in bag.entities:
            self.n_e[e] = self.n_e.get(e, 0) + 1
        for t in author_topics:
            self.n_t[t] = self.n_t.get(t, 0) + 1
            per_topic = self.n_et.setdefault(t, {})
            for e in bag.entities:
                per_topic[e] = per_topic.get(e, 0) + 1

    def pair_count(self, entity: str, topic: str) -> int:
        return self.n_et.get(topic, {}).get(entity, 0)

    # -- persistence -------------------------------------------------

    MAGIC = b"TBIMIDX1"

    def save(self, path: str | Path) -> None:
        """Write the binary index file (layout in docs/index-format.md)."""
        entities = sorted(self.n_e)
        topics = sorted(self.n_t)
        e_pos = {e: i for i, e in enumerate(entities)}
        t_pos = {t: i for i, t in enumerate(topics)}

        def string_table(strings: list[str]) -> bytes:
            chunks = []
            for s in strings:
                raw = s.encode("utf-8")
                chunks.append(struct.pack("<I", len(raw)) + raw)
            return b"".join(chunks)

        sec_entities = string_table(entities)
        sec_topics = string_table(topics)
        sec_ne = b"".join(struct.pack("<Q", self.n_e[e]) for e in entities)
        sec_nt = b"".join(struct.pack("<Q", self.n_t[t]) for t in topics)
        pairs = sorted(
            (t_pos[t], e_pos[e], c)
            for t, per_topic in self.n_et.items()
            for e, c in per_topic.items()
        )
        sec_pairs = b"".join(struct.pack("<IIQ", *row) for row in pairs)

        sections = {
            "entities": sec_entities,
            "topics": sec_topics,
            "entity_tweet_counts": sec_ne,
            "topic_tweet_counts": sec_nt,
            "pair_counts": sec_pairs,
        }
        header = {
            "n": self.n,
            "delta": self.delta,
            "k": self.k,
            "nu": self.nu,
            "counts": {
                "entities": len(entities),
                "topics": len(topics),
                "pairs": len(pairs),
            },
            "sections": {},
        }
        # Offsets are relative to the end of the fixed-size preamble;
        # compute them with the header length itself pinned first.
        order = list(sections)
        offset = 0
        for name in order:
            header["sections"][name] = {
                "offset": offset, "length": len(sections[name]),
            }
            offset += len(sections[name])
        header_bytes = json.dumps(header, sort_keys=True,
                                  separators=(",", ":")).encode("utf-8")
        with Path(path).open("wb") as fh:
            fh.write(self.MAGIC)
            fh.write(struct.pack("<I", len(header_bytes)))
            fh.write(header_bytes)
            for name in order:
                fh.write(sections[name])

    @classmethod
    def load(cls, path: str | Path) -> "TopicModelIndex":
        blob = Path(path).read_bytes()
        if blob[: len(cls.MAGIC)] != cls.MAGIC:
            raise ValueError(f"{path}: not a topic index file")
        pos = len(cls.MAGIC)
        (header_len,) = struct.unpack_from("<I", blob, pos)
        pos += 4
        header = json.loads(blob[pos: pos + header_len].decode("utf-8"))
        base = pos + header_len

        def section(name: str) -> bytes:
            meta = header["sections"][name]
            start = base + meta["offset"]
            return blob[start: start + meta["length"]]

        def read_strings(raw: bytes, count: int) -> list[str]:
            out, at = [], 0
            for _ in range(count):
                (length,) = struct.unpack_from("<I", raw, at)
                at += 4
                out.append(raw[at: at + length].decode("utf-8"))
                at += length
            return out

        index = cls(delta=header["delta"], k=header["k"], nu=header["nu"])
        index.n = header["n"]
        entities = read_strings(section("entities"), header["counts"]["entities"])
        topics = read_strings(section("topics"), header["counts"]["topics"])
        ne_vals = struct.unpack(f"<{len(entities)}Q", section("entity_tweet_counts"))
        nt_vals = struct.unpack(f"<{len(topics)}Q", section("topic_tweet_counts"))
        index.n_e = dict(zip(entities, ne_vals))
        index.n_t = dict(zip(topics, nt_vals))
        raw = section("pair_counts")
        for at in range(0, len(raw), 16):
            t_idx, e_idx, count = struct.unpack_from("<IIQ", raw, at)
            index.n_et.setdefault(topics[t_idx], {})[entities[e_idx]] = count
        return index


def train_index(
    expert_tweets: Iterable[tuple[EntityBag, Collection[str]]],
    delta: int = DEFAULT_DELTA,
    k: int = DEFAULT_K,
    nu: int = DEFAULT_NU,
) -> TopicModelIndex:
    """Single pass over (entity bag, author topics) pairs."""
    index = TopicModelIndex(delta=delta, k=k, nu=nu)
    for bag, author_topics in expert_tweets:
        index.add_tweet(bag, author_topics)
    return index


def entity_topic_score(entity: str, topic: str, index: TopicModelIndex,
                       delta: int | None = None,
                       k: int | None = None) -> float:
    """The per-entity factor s[e,t]; 1.0 below the occurrence gate."""
    index.s_lookups += 1
    delta = index.delta if delta is None else delta
    k = index.k if k is None else k
    n_et = index.pair_count(entity, topic)
    if n_et < k:
        return 1.0
    n_e = index.n_e.get(entity, 0)
    n_t = index.n_t.get(topic, 0)
    if n_e == 0:
        # Only reachable with k == 0 and an unseen entity.
        return 1.0
    return n_et * (index.n - n_e + delta) / (n_e * (n_t - n_et + delta))


def entity_topic_score_exact(entity: str, topic: str, index: TopicModelIndex,
                             delta: int | None = None,
                             k: int | None = None) -> Fraction:
    """Exact-rational s[e,t], for derivation-equivalence checks where
    delta may be 0.  Requires no boundary counts when delta == 0."""
    index.s_lookups += 1
    delta = index.delta if delta is None else delta
    k = index.k if k is None else k
    n_et = index.pair_count(entity, topic)
    if n_et < k:
        return Fraction(1)
    n_e = index.n_e.get(entity, 0)
    n_t = index.n_t.get(topic, 0)
    if n_e == 0:
        return Fraction(1)
    return Fraction(n_et * (index.n - n_e + delta),
                    n_e * (n_t - n_et + delta))


def _gather_log_s(bag: EntityBag, topic: str, index: TopicModelIndex,
                  delta: int | None, k: int | None) -> np.ndarray:
    values = np.empty(len(bag.entities))
    for i, e in enumerate(sorted(bag.entities)):
        s = entity_topic_score(e, topic, index, delta=delta, k=k)
        values[i] = math.log(s) if s > 0.0 else -math.inf
    return values


def rank_score(bag: EntityBag, topic: str, index: TopicModelIndex,
               nu: int | None = None, delta: int | None = None,
               k: int | None = None) -> float:
    """Product of the ``nu`` largest s factors (all of them when the bag
    is smaller); empty bags score 1.  Computed as a sum of logs."""
    if not bag.entities:
        return 1.0
    nu = index.nu if nu is None else nu
    values = _gather_log_s(bag, topic, index, delta, k)
    indptr = np.array([0, len(values)], dtype=np.int64)
    return float(math.exp(_kernels.top_sum(values, indptr, nu)[0]))


def rank_score_exact(bag: EntityBag, topic: str, index: TopicModelIndex,
                     nu: int | None = None, delta: int | None = None,
                     k: int | None = None) -> Fraction:
    """Exact-rational rank score over the ``nu`` largest factors."""
    if not bag.entities:
        return Fraction(1)
    nu = index.nu if nu is None else nu
    factors = sorted(
        (entity_topic_score_exact(e, topic, index, delta=delta, k=k)
         for e in sorted(bag.entities)),
        reverse=True,
    )[:nu]
    product = Fraction(1)
    for f in factors:
        product *= f
    return product


def top_tweets(topic: str, candidates: Sequence[EntityBag],
               index: TopicModelIndex, n: int = 1000,
               nu: int | None = None) -> list[tuple[str, float]]:
    """Candidates ranked by descending score, ties by ascending tweet
    id, truncated to ``n``.  Scores for the whole batch go through one
    kernel call."""
    nu = index.nu if nu is None else nu
    values_parts = []
    indptr = [0]
    for bag in candidates:
        values_parts.append(_gather_log_s(bag, topic, index, None, None))
        indptr.append(indptr[-1] + len(bag.entities))
    if values_parts:
        flat = np.concatenate(values_parts)
    else:
        flat = np.empty(0)
    log_scores = _kernels.top_sum(flat, np.asarray(indptr, dtype=np.int64), nu)
    order = sorted(
        range(len(candidates)),
        key=lambda i: (-log_scores[i], candidates[i].tweet_id),
    )
    return [
        (candidates[i].tweet_id, float(math.exp(log_scores[i])))
        for i in order[:n]
    ]
