"""Mining per-user topical expertise from List annotations.

A user who keeps getting filed into Lists named after a topic is
treated as an expert on it.  List names and descriptions are matched
against catalog titles (and their redirect aliases) as whole-word
phrases; when two matched phrases overlap, only the longest survives,
so "new york" never fires alongside "new york yankees".
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import CorpusHandle, TopicCatalog, normalize_title

# Split before an uppercase letter that follows a lowercase one, so
# "MusicAndMusicians" splits but an all-caps run like "NYC" stays whole.
_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z])(?=[A-Z])")

DEFAULT_EXPERT_THRESHOLD = 10
DEFAULT_MAX_TOPICS = 50


@dataclass(frozen=True)
class ExpertRecord:
    """A user with qualifying topics; ``expertise`` maps topic to its
    List-inclusion count."""

    user_id: str
    follower_count: int
    expertise: Mapping[str, int]


def split_camel_case(name: str) -> str:
    return _CAMEL_BOUNDARY.sub(" ", name)


def normalize_list_text(name: str, description: str) -> str:
    """Normalize a List's name and description into one token string.

    Only the name gets the CamelCase split: the 25-character name limit
    is what forces word-joining in the first place.
    """
    parts = [normalize_title(split_camel_case(name))]
    if description:
        parts.append(normalize_title(description))
    return " ".join(p for p in parts if p)


def _is_subphrase(short: tuple[str, ...], long: tuple[str, ...]) -> bool:
    """Whether ``short`` occurs as a contiguous token run inside ``long``."""
    if len(short) >= len(long):
        return False
    return any(
        long[i : i + len(short)] == short
        for i in range(len(long) - len(short) + 1)
    )


class TopicMatcher:
    """Compiled query table from a catalog: normalized title and alias
    phrases, keyed by token tuple, mapped to their canonical title.

    Phrases made entirely of stopwords are dropped at build time.  When
    two catalog entries normalize to the same phrase, a title beats an
    alias and remaining collisions resolve to the lexicographically
    smallest canonical title.
    """

    def __init__(self, catalog: TopicCatalog, stopwords: Iterable[str]):
        stop = set(stopwords)
        self.queries: dict[tuple[str, ...], str] = {}
        is_title: dict[tuple[str, ...], bool] = {}

        def add(phrase: str, canonical: str, title: bool) -> None:
            tokens = tuple(phrase.split())
            if not tokens or all(tok in stop for tok in tokens):
                return
            if tokens in self.queries:
                if is_title[tokens] and not title:
                    return
                if title and not is_title[tokens]:
                    pass  # titles override aliases
                elif canonical >= self.queries[tokens]:
                    return
            self.queries[tokens] = canonical
            is_title[tokens] = is_title.get(tokens, False) or title

        for topic in sorted(catalog.topics):
            add(normalize_title(topic), topic, title=True)
        for alias in sorted(catalog.redirects):
            add(normalize_title(alias), catalog.redirects[alias], title=False)
        self.max_len = max((len(q) for q in self.queries), default=0)

    def match(self, normalized_text: str) -> set[str]:
        """Canonical topics whose phrase occurs whole-word in the text,
        after discarding phrases contained in longer matched phrases."""
        tokens = tuple(normalized_text.split())
        hits: set[tuple[str, ...]] = set()
        for n in range(1, min(self.max_len, len(tokens)) + 1):
            for i in range(len(tokens) - n + 1):
                gram = tokens[i : i + n]
                if gram in self.queries:
                    hits.add(gram)
        kept = {
            q for q in hits
            if not any(_is_subphrase(q, other) for other in hits)
        }
        return {self.queries[q] for q in kept}


def match_topics(
    normalized_text: str, catalog: TopicCatalog, stopwords: Iterable[str]
) -> set[str]:
    """One-shot form of :meth:`TopicMatcher.match`; callers with many
    Lists should build the matcher once."""
    return TopicMatcher(catalog, stopwords).match(normalized_text)


def mine_experts(
    corpus: CorpusHandle,
    catalog: TopicCatalog | None = None,
    stopwords: Iterable[str] = (),
    expert_threshold: int = DEFAULT_EXPERT_THRESHOLD,
    max_topics: int = DEFAULT_MAX_TOPICS,
) -> dict[str, ExpertRecord]:
    """Aggregate List-topic matches into per-user expertise.

    A (user, topic) count is the number of List records that include
    the user and match the topic; a List counts once per topic however
    many of its phrases hit.  Users keep counts at or above
    ``expert_threshold``, truncated to the ``max_topics`` largest
    (ties broken by title).
    """
    catalog = catalog or corpus.catalog
    matcher = TopicMatcher(catalog, stopwords)
    counts: dict[str, dict[str, int]] = {}
    for rec in corpus.lists:
        topics = matcher.match(normalize_list_text(rec.name, rec.description))
        if not topics:
            continue
        for member in rec.member_ids:
            per_user = counts.setdefault(member, {})
            for topic in topics:
                per_user[topic] = per_user.get(topic, 0) + 1

    experts: dict[str, ExpertRecord] = {}
    for user_id in sorted(counts):
        qualifying = {
            t: c for t, c in counts[user_id].items() if c >= expert_threshold
        }
        if not qualifying:
            continue
        top = sorted(qualifying.items(), key=lambda kv: (-kv[1], kv[0]))[:max_topics]
        experts[user_id] = ExpertRecord(
            user_id=user_id,
            follower_count=corpus.follower_count(user_id),
            expertise=dict(top),
        )
    return experts


def save_experts(experts: Mapping[str, ExpertRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for user_id in sorted(experts):
            rec = experts[user_id]
            fh.write(json.dumps({
                "user_id": rec.user_id,
                "follower_count": rec.follower_count,
                "expertise": dict(sorted(rec.expertise.items())),
            }, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n")


def load_experts(path: str | Path) -> dict[str, ExpertRecord]:
    experts: dict[str, ExpertRecord] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            experts[obj["user_id"]] = ExpertRecord(
                user_id=obj["user_id"],
                follower_count=int(obj["follower_count"]),
                expertise={t: int(c) for t, c in obj["expertise"].items()},
            )
    return experts
