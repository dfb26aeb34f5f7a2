"""Corpus ingestion, validation, and read access.

Five inputs back the whole pipeline: List records, tweets, follow
edges, user profiles (all newline-delimited JSON), and a topic catalog
with redirects (2-column TSV).  Invalid records are skipped and
counted, never fatal, unless ``strict`` is set.  The persisted store is
a canonical re-serialization, so re-ingesting identical inputs yields
byte-identical state.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import IngestError, UnknownUserError

LOG = logging.getLogger(__name__)

MAX_LIST_NAME_LEN = 25

_NON_ALNUM = re.compile(r"[^0-9a-z]+")


def normalize_title(text: str) -> str:
    """Case-fold and strip special characters, collapsing to single spaces."""
    return _NON_ALNUM.sub(" ", text.lower()).strip()


@dataclass(frozen=True)
class TopicCatalog:
    """Canonical topic titles plus a one-hop alias map onto them."""

    topics: frozenset[str]
    redirects: Mapping[str, str]

    def canonical(self, name: str) -> str | None:
        if name in self.topics:
            return name
        return self.redirects.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self.topics


@dataclass(frozen=True)
class ListRecord:
    list_id: str
    owner_id: str
    name: str
    description: str
    member_ids: frozenset[str]


@dataclass(frozen=True)
class FollowEdge:
    follower_id: str
    followee_id: str


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    author_id: str
    text: str
    lang: str
    posted_at: int


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    follower_count: int


@dataclass
class IngestReport:
    """Per-corpus accept/reject tallies with line-level reject reasons."""

    accepted: dict[str, int] = field(default_factory=dict)
    rejected: dict[str, int] = field(default_factory=dict)
    reasons: dict[str, list[tuple[int, str]]] = field(default_factory=dict)

    def record(self, corpus: str, line_no: int | None, reason: str | None) -> None:
        if reason is None:
            self.accepted[corpus] = self.accepted.get(corpus, 0) + 1
        else:
            self.rejected[corpus] = self.rejected.get(corpus, 0) + 1
            self.reasons.setdefault(corpus, []).append((line_no, reason))
            LOG.warning("%s line %s rejected: %s", corpus, line_no, reason)

    def as_dict(self) -> dict:
        return {
            "accepted": dict(sorted(self.accepted.items())),
            "rejected": dict(sorted(self.rejected.items())),
            "reasons": {
                k: [[ln, why] for ln, why in v]
                for k, v in sorted(self.reasons.items())
            },
        }


def _require(obj: dict, key: str, kind: type) -> object:
    if key not in obj:
        raise ValueError(f"missing required field {key!r}")
    value = obj[key]
    if kind is str:
        if not isinstance(value, str):
            raise ValueError(f"field {key!r} must be a string")
    elif kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"field {key!r} must be an integer")
    return value


def _parse_list(obj: dict) -> ListRecord:
    name = _require(obj, "name", str)
    if not name:
        raise ValueError("name is empty")
    if len(name) > MAX_LIST_NAME_LEN:
        raise ValueError(f"name exceeds {MAX_LIST_NAME_LEN} characters")
    members = obj.get("member_ids")
    if not isinstance(members, list) or not members:
        raise ValueError("member_ids is missing or empty")
    if not all(isinstance(m, str) and m for m in members):
        raise ValueError("member_ids must be nonempty strings")
    return ListRecord(
        list_id=str(_require(obj, "list_id", str)),
        owner_id=str(_require(obj, "owner_id", str)),
        name=name,
        description=str(obj.get("description", "")),
        member_ids=frozenset(members),
    )


def _parse_tweet(obj: dict) -> TweetRecord:
    text = _require(obj, "text", str)
    if not text:
        raise ValueError("text is empty")
    return TweetRecord(
        tweet_id=str(_require(obj, "tweet_id", str)),
        author_id=str(_require(obj, "author_id", str)),
        text=text,
        lang=str(_require(obj, "lang", str)),
        posted_at=int(_require(obj, "posted_at", int)),
    )


def _parse_follow(obj: dict) -> FollowEdge:
    follower = str(_require(obj, "follower_id", str))
    followee = str(_require(obj, "followee_id", str))
    if follower == followee:
        raise ValueError("self-follow edge")
    return FollowEdge(follower, followee)


def _parse_profile(obj: dict) -> UserProfile:
    count = int(_require(obj, "follower_count", int))
    if count < 0:
        raise ValueError("follower_count is negative")
    return UserProfile(str(_require(obj, "user_id", str)), count)


def _read_ndjson(path: Path, parse, corpus: str, report: IngestReport, strict: bool):
    records = []
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("record is not a JSON object")
                records.append((line_no, parse(obj)))
            except (ValueError, TypeError) as exc:
                if strict:
                    raise IngestError(f"{path}:{line_no}: {exc}") from exc
                report.record(corpus, line_no, str(exc))
                continue
    return records


def _read_tsv(path: Path) -> list[tuple[int, list[str]]]:
    rows = []
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            rows.append((line_no, line.split("\t")))
    return rows


def _load_catalog(
    topics_path: Path, redirects_path: Path, report: IngestReport, strict: bool
) -> TopicCatalog:
    topics: list[str] = []
    seen: set[str] = set()
    for line_no, cols in _read_tsv(topics_path):
        title = cols[0].strip()
        if not normalize_title(title):
            msg = "title is empty after normalization"
            if strict:
                raise IngestError(f"{topics_path}:{line_no}: {msg}")
            report.record("topics", line_no, msg)
            continue
        if title in seen:
            report.record("topics", line_no, "duplicate title")
            continue
        seen.add(title)
        topics.append(title)
        report.record("topics", None, None)

    topic_set = frozenset(topics)
    normalized_titles = {normalize_title(t) for t in topic_set}
    redirects: dict[str, str] = {}
    for line_no, cols in _read_tsv(redirects_path):
        reason = None
        if len(cols) < 2:
            reason = "redirect row needs alias and target columns"
        else:
            alias, target = cols[0].strip(), cols[1].strip()
            if target not in topic_set:
                reason = f"redirect target {target!r} is not a catalog title"
            elif not normalize_title(alias):
                reason = "alias is empty after normalization"
            elif normalize_title(alias) in normalized_titles:
                reason = "alias shadows a canonical title"
            elif alias in redirects and redirects[alias] != target:
                reason = "conflicting duplicate alias"
        if reason is not None:
            if strict:
                raise IngestError(f"{redirects_path}:{line_no}: {reason}")
            report.record("redirects", line_no, reason)
            continue
        redirects[alias] = target
        report.record("redirects", None, None)
    return TopicCatalog(topics=topic_set, redirects=redirects)


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class CorpusHandle:
    """Immutable view over an ingested store.

    Single-writer during ingestion; afterwards safe to share across
    readers.
    """

    def __init__(
        self,
        store_dir: Path,
        lists: list[ListRecord],
        tweets: list[TweetRecord],
        follows: list[FollowEdge],
        profiles: dict[str, UserProfile],
        catalog: TopicCatalog,
    ):
        self.store_dir = store_dir
        self.lists = tuple(lists)
        self.tweets = tuple(tweets)
        self.follows = tuple(follows)
        self.profiles = profiles
        self.catalog = catalog
        self.tweets_by_id = {t.tweet_id: t for t in self.tweets}
        self._followees: dict[str, set[str]] = {}
        for edge in self.follows:
            self._followees.setdefault(edge.follower_id, set()).add(edge.followee_id)
        # A user is "known" if any corpus recorded them as an actor, even
        # with zero follow edges.
        self.known_users = set(profiles) | set(self._followees)

    def followees(self, user_id: str) -> set[str]:
        if user_id not in self.known_users:
            raise UnknownUserError(user_id)
        return set(self._followees.get(user_id, ()))

    def expert_followings(self, user_id: str, experts: Iterable[str]) -> set[str]:
        """Followees of ``user_id`` restricted to the mined expert set."""
        expert_ids = set(experts)
        return self.followees(user_id) & expert_ids

    def follower_count(self, user_id: str) -> int:
        profile = self.profiles.get(user_id)
        return profile.follower_count if profile else 0

    @classmethod
    def load(cls, store_dir: str | Path) -> "CorpusHandle":
        store_dir = Path(store_dir)
        handle, _ = ingest_corpus(
            lists=store_dir / "lists.ndjson",
            tweets=store_dir / "tweets.ndjson",
            follows=store_dir / "follows.ndjson",
            profiles=store_dir / "profiles.ndjson",
            topics=store_dir / "topics.tsv",
            redirects=store_dir / "redirects.tsv",
            out_dir=None,
        )
        handle.store_dir = store_dir
        return handle


def ingest_corpus(
    lists: str | Path,
    tweets: str | Path,
    follows: str | Path,
    profiles: str | Path,
    topics: str | Path,
    redirects: str | Path,
    out_dir: str | Path | None,
    strict: bool = False,
) -> tuple[CorpusHandle, IngestReport]:
    """Parse, validate, and (optionally) persist the corpora.

    Returns the loaded handle plus a report whose accepted+rejected
    counts add up to the nonblank input line count of each file.
    """
    for path in (lists, tweets, follows, profiles, topics, redirects):
        if not Path(path).is_file():
            raise IngestError(f"input file not found: {path}")

    report = IngestReport()

    list_rows = _read_ndjson(Path(lists), _parse_list, "lists", report, strict)
    for _, _rec in list_rows:
        report.record("lists", None, None)

    tweet_rows = _read_ndjson(Path(tweets), _parse_tweet, "tweets", report, strict)
    tweet_records: list[TweetRecord] = []
    seen_ids: set[str] = set()
    for line_no, rec in tweet_rows:
        if rec.tweet_id in seen_ids:
            if strict:
                raise IngestError(f"{tweets}:{line_no}: duplicate tweet_id {rec.tweet_id}")
            report.record("tweets", line_no, f"duplicate tweet_id {rec.tweet_id}")
            continue
        seen_ids.add(rec.tweet_id)
        tweet_records.append(rec)
        report.record("tweets", None, None)

    follow_rows = _read_ndjson(Path(follows), _parse_follow, "follows", report, strict)
    follow_records: list[FollowEdge] = []
    seen_edges: set[FollowEdge] = set()
    for line_no, rec in follow_rows:
        if rec in seen_edges:
            if strict:
                raise IngestError(f"{follows}:{line_no}: duplicate edge")
            report.record("follows", line_no, "duplicate edge")
            continue
        seen_edges.add(rec)
        follow_records.append(rec)
        report.record("follows", None, None)

    profile_rows = _read_ndjson(Path(profiles), _parse_profile, "profiles", report, strict)
    profile_map: dict[str, UserProfile] = {}
    for line_no, rec in profile_rows:
        if rec.user_id in profile_map:
            if strict:
                raise IngestError(f"{profiles}:{line_no}: duplicate user_id {rec.user_id}")
            report.record("profiles", line_no, f"duplicate user_id {rec.user_id}")
            continue
        profile_map[rec.user_id] = rec
        report.record("profiles", None, None)

    catalog = _load_catalog(Path(topics), Path(redirects), report, strict)

    handle = CorpusHandle(
        store_dir=Path(out_dir) if out_dir else Path(lists).parent,
        lists=[rec for _, rec in list_rows],
        tweets=tweet_records,
        follows=follow_records,
        profiles=profile_map,
        catalog=catalog,
    )
    if out_dir is not None:
        persist_store(handle, report, Path(out_dir))
    return handle, report


def persist_store(handle: CorpusHandle, report: IngestReport, out_dir: Path) -> None:
    """Write the canonical store files; deterministic for identical inputs."""
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "lists.ndjson").open("w", encoding="utf-8") as fh:
        for rec in handle.lists:
            fh.write(_dump({
                "list_id": rec.list_id,
                "owner_id": rec.owner_id,
                "name": rec.name,
                "description": rec.description,
                "member_ids": sorted(rec.member_ids),
            }) + "\n")
    with (out_dir / "tweets.ndjson").open("w", encoding="utf-8") as fh:
        for rec in handle.tweets:
            fh.write(_dump({
                "tweet_id": rec.tweet_id,
                "author_id": rec.author_id,
                "text": rec.text,
                "lang": rec.lang,
                "posted_at": rec.posted_at,
            }) + "\n")
    with (out_dir / "follows.ndjson").open("w", encoding="utf-8") as fh:
        for rec in handle.follows:
            fh.write(_dump({
                "follower_id": rec.follower_id,
                "followee_id": rec.followee_id,
            }) + "\n")
    with (out_dir / "profiles.ndjson").open("w", encoding="utf-8") as fh:
        for rec in handle.profiles.values():
            fh.write(_dump({
                "user_id": rec.user_id,
                "follower_count": rec.follower_count,
            }) + "\n")
    with (out_dir / "topics.tsv").open("w", encoding="utf-8") as fh:
        for title in sorted(handle.catalog.topics):
            fh.write(f"{title}\t{title}\n")
    with (out_dir / "redirects.tsv").open("w", encoding="utf-8") as fh:
        for alias in sorted(handle.catalog.redirects):
            fh.write(f"{alias}\t{handle.catalog.redirects[alias]}\n")
    (out_dir / "manifest.json").write_text(
        json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
