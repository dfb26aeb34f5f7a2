"""HTTP surface over the trained artifacts.

Versioned JSON endpoints for viewing and editing interests, triggering
re-computation, browsing topical tweets, and fetching explained
recommendations.  Scoring state is loaded once (index built offline)
and swapped atomically on reload; manual interest edits are journaled
per user and replayed at startup, so removals survive recomputes and
restarts.
"""

from __future__ import annotations

import json
import threading
import time
import urllib.parse
from collections import defaultdict
from pathlib import Path

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .bim import EntityBag, TopicModelIndex, extract_entities, top_tweets
from .corpus import CorpusHandle
from .errors import NoExpertFollowingsError
from .expertise import load_experts
from .interest import (
    EMConfig,
    InterestVector,
    build_popularity,
    infer_interest,
    load_interests,
    top_interests,
)
from .recommend import (
    DEFAULT_M,
    DEFAULT_N,
    DEFAULT_SIMILARITY_THRESHOLD,
    jaccard,
    recommend_for_topics,
)
from .stopwords import load_stopwords

EXPLANATION_TEMPLATE = "recommended because you are interested in {topic}"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class EditRequest(BaseModel):
    add: list[str] = []
    remove: list[str] = []


class ManualEdits:
    """Per-user manual interest edits; last operation per topic wins."""

    def __init__(self):
        self.added: dict[str, bool] = {}  # insertion-ordered
        self.removed: set[str] = set()

    def apply(self, op: str, topic: str) -> None:
        if op == "add":
            self.removed.discard(topic)
            self.added.pop(topic, None)
            self.added[topic] = True
        elif op == "remove":
            self.added.pop(topic, None)
            self.removed.add(topic)
        else:
            raise ValueError(f"unknown edit op {op!r}")


class ServiceState:
    def __init__(
        self,
        store_dir: str | Path,
        experts_path: str | Path,
        index_path: str | Path,
        interests_path: str | Path | None = None,
        edits_dir: str | Path | None = None,
        stopwords_dir: str | Path | None = None,
        em_config: EMConfig | None = None,
        m: int = DEFAULT_M,
        n: int = DEFAULT_N,
        threshold: float = DEFAULT_SIMILARITY_THRESHOLD,
    ):
        self.corpus = CorpusHandle.load(store_dir)
        self.experts = load_experts(experts_path)
        self.popularity = build_popularity(self.experts)
        self.index_path = Path(index_path)
        self.index = TopicModelIndex.load(self.index_path)
        self.interests: dict[str, InterestVector] = (
            load_interests(interests_path) if interests_path else {}
        )
        self.edits_dir = Path(edits_dir) if edits_dir else Path(store_dir) / "edits"
        self.edits_dir.mkdir(parents=True, exist_ok=True)
        self.em_config = em_config or EMConfig()
        self.m = m
        self.n = n
        self.threshold = threshold
        stopwords = load_stopwords(stopwords_dir)
        self.candidates: list[EntityBag] = [
            extract_entities(t, stopwords)
            for t in self.corpus.tweets
            if t.lang == "en"
        ]
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self.edits: dict[str, ManualEdits] = defaultdict(ManualEdits)
        self._replay_journals()
        # Changes only when state mutates, so unchanged repeated reads
        # serialize byte-identically.
        self.stamp = int(time.time())

    # -- manual-edit journal ------------------------------------------

    def _journal_path(self, user_id: str) -> Path:
        return self.edits_dir / (urllib.parse.quote(user_id, safe="") + ".ndjson")

    def _replay_journals(self) -> None:
        for path in sorted(self.edits_dir.glob("*.ndjson")):
            user_id = urllib.parse.unquote(path.stem)
            for line in path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                entry = json.loads(line)
                self.edits[user_id].apply(entry["op"], entry["topic"])

    def journal_edit(self, user_id: str, op: str, topic: str) -> None:
        self.edits[user_id].apply(op, topic)
        with self._journal_path(user_id).open("a", encoding="utf-8") as fh:
            fh.write(json.dumps({"op": op, "topic": topic},
                                sort_keys=True, separators=(",", ":")) + "\n")
        self.stamp = int(time.time())

    def lock(self, user_id: str) -> threading.Lock:
        return self._locks[user_id]

    # -- views ----------------------------------------------------------

    def require_known_user(self, user_id: str) -> None:
        if user_id not in self.corpus.known_users:
            raise ApiError(404, "unknown_user", f"user {user_id!r} is not in the corpus")

    def interests_view(self, user_id: str) -> list[dict]:
        vector = self.interests.get(user_id)
        if vector is None:
            raise ApiError(
                409, "interests_not_computed",
                f"interests for {user_id!r} have not been inferred yet",
            )
        edits = self.edits[user_id]
        view = [
            {"topic": t, "weight": vector.weights[t]}
            for t in top_interests(vector, len(vector.weights))
            if t not in edits.removed
        ]
        present = {entry["topic"] for entry in view}
        for topic in edits.added:
            if topic not in present:
                view.append({"topic": topic, "weight": "manual"})
        return view

    def ordered_topics(self, user_id: str) -> list[str]:
        vector = self.interests.get(user_id)
        if vector is None:
            raise ApiError(
                409, "interests_not_computed",
                f"interests for {user_id!r} have not been inferred yet",
            )
        edits = self.edits[user_id]
        topics = [
            t for t in top_interests(vector, self.m) if t not in edits.removed
        ]
        topics.extend(t for t in edits.added if t not in topics)
        return topics


def create_app(
    store_dir: str | Path,
    experts_path: str | Path,
    index_path: str | Path,
    interests_path: str | Path | None = None,
    edits_dir: str | Path | None = None,
    stopwords_dir: str | Path | None = None,
    em_config: EMConfig | None = None,
) -> FastAPI:
    state = ServiceState(
        store_dir, experts_path, index_path,
        interests_path=interests_path, edits_dir=edits_dir,
        stopwords_dir=stopwords_dir, em_config=em_config,
    )
    app = FastAPI(title="topicrec service", version="1.0.0")
    app.state.service = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def _api_error(_request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": exc.code, "message": exc.message},
        )

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "tweets": state.index.n}

    @app.get("/v1/users")
    def list_users():
        ids = {edge.follower_id for edge in state.corpus.follows}
        ids |= set(state.interests)
        return {"users": sorted(ids)}

    @app.get("/v1/users/{user_id}/interests")
    def get_interests(user_id: str):
        state.require_known_user(user_id)
        return {"user_id": user_id, "interests": state.interests_view(user_id)}

    @app.post("/v1/users/{user_id}/interests/edits")
    def post_edits(user_id: str, edit: EditRequest):
        state.require_known_user(user_id)
        add, remove = set(edit.add), set(edit.remove)
        if add & remove:
            raise ApiError(422, "conflicting_edit",
                           "a topic cannot be both added and removed")
        for topic in sorted(add | remove):
            if topic not in state.corpus.catalog:
                raise ApiError(404, "unknown_topic",
                               f"topic {topic!r} is not in the catalog")
        with state.lock(user_id):
            for topic in edit.add:
                state.journal_edit(user_id, "add", topic)
            for topic in edit.remove:
                state.journal_edit(user_id, "remove", topic)
        return {"user_id": user_id, "interests": state.interests_view(user_id)}

    @app.delete("/v1/users/{user_id}/interests/{topic}")
    def delete_interest(user_id: str, topic: str):
        state.require_known_user(user_id)
        if topic not in state.corpus.catalog:
            raise ApiError(404, "unknown_topic",
                           f"topic {topic!r} is not in the catalog")
        with state.lock(user_id):
            state.journal_edit(user_id, "remove", topic)
        return {"user_id": user_id, "interests": state.interests_view(user_id)}

    @app.post("/v1/users/{user_id}/interests/recompute")
    def recompute(user_id: str):
        state.require_known_user(user_id)
        with state.lock(user_id):
            try:
                vector = infer_interest(
                    user_id, state.corpus, state.experts,
                    state.popularity, state.em_config,
                )
            except NoExpertFollowingsError:
                raise ApiError(422, "no_expert_followings",
                               f"user {user_id!r} follows no known experts")
            state.interests[user_id] = vector
            state.stamp = int(time.time())
        return {
            "user_id": user_id,
            "iterations_run": vector.iterations_run,
            "final_log_likelihood": vector.final_log_likelihood,
            "interests": state.interests_view(user_id),
        }

    @app.get("/v1/users/{user_id}/recommendations")
    def recommendations(user_id: str, limit: int = 10):
        state.require_known_user(user_id)
        topics = state.ordered_topics(user_id)
        recs = recommend_for_topics(
            user_id, topics, state.index, state.candidates,
            n=state.n, threshold=state.threshold, limit=limit,
            generated_at=state.stamp,
        )
        items = []
        for item in recs.items:
            tweet = state.corpus.tweets_by_id.get(item.tweet_id)
            items.append({
                "tweet_id": item.tweet_id,
                "text": tweet.text if tweet else "",
                "topic": item.topic,
                "topical_rank": item.topical_rank,
                "final_rank": item.final_rank,
                "explanation": EXPLANATION_TEMPLATE.format(topic=item.topic),
            })
        return {
            "user_id": user_id,
            "items": items,
            "generated_at": recs.generated_at,
        }

    @app.get("/v1/topics/{topic}/tweets")
    def topic_tweets(topic: str, limit: int = 10):
        if topic not in state.corpus.catalog:
            raise ApiError(404, "unknown_topic",
                           f"topic {topic!r} is not in the catalog")
        ranked = top_tweets(topic, state.candidates, state.index,
                            n=len(state.candidates))
        by_id = {bag.tweet_id: bag for bag in state.candidates}
        kept: list[dict] = []
        kept_bags: list[EntityBag] = []
        for tweet_id, score in ranked:
            bag = by_id[tweet_id]
            if all(jaccard(bag.entities, k.entities) < state.threshold
                   for k in kept_bags):
                tweet = state.corpus.tweets_by_id.get(tweet_id)
                kept.append({
                    "tweet_id": tweet_id,
                    "text": tweet.text if tweet else "",
                    "score": score,
                })
                kept_bags.append(bag)
                if len(kept) >= limit:
                    break
        return {"topic": topic, "tweets": kept}

    @app.post("/v1/admin/reload")
    def reload_index():
        state.index = TopicModelIndex.load(state.index_path)
        state.stamp = int(time.time())
        return {"status": "ok", "tweets": state.index.n}

    return app
