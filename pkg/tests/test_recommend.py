"""Jaccard dedup, round-robin interleaving, and list assembly."""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topicrec.bim import EntityBag, TopicModelIndex
from topicrec.errors import NoExpertFollowingsError
from topicrec.interest import GLOBAL_TOPIC, InterestVector
from topicrec.recommend import (
    dedup_list,
    jaccard,
    recommend,
    round_robin,
)


def _bag(tweet_id, *entities):
    return EntityBag(tweet_id=tweet_id, entities=frozenset(entities))


class TestJaccard:
    def test_identity(self):
        assert jaccard({"a", "b", "c"}, {"a", "b", "c"}) == 1.0

    def test_three_quarters(self):
        assert jaccard({"a", "b", "c"}, {"a", "b", "c", "d"}) == 0.75

    def test_disjoint(self):
        assert jaccard({"a"}, {"b"}) == 0.0

    def test_both_empty_defined_as_one(self):
        assert jaccard(set(), set()) == 1.0

    def test_one_empty(self):
        assert jaccard(set(), {"a"}) == 0.0

    @given(
        st.sets(st.sampled_from("abcdefgh")),
        st.sets(st.sampled_from("abcdefgh")),
    )
    @settings(max_examples=100, deadline=None)
    def test_bounds_and_symmetry(self, a, b):
        j = jaccard(a, b)
        assert 0.0 <= j <= 1.0
        assert j == jaccard(b, a)


class TestDedupList:
    def test_near_duplicate_removed(self):
        kept = dedup_list([_bag("x", "a", "b", "c"), _bag("y", "a", "b", "c", "d")])
        assert [b.tweet_id for b in kept] == ["x"]  # J = 0.75 >= 0.7

    def test_distinct_kept(self):
        kept = dedup_list([_bag("x", "a"), _bag("y", "b")])
        assert [b.tweet_id for b in kept] == ["x", "y"]

    def test_empty_input(self):
        assert dedup_list([]) == []

    def test_empty_bags_mutually_similar(self):
        kept = dedup_list([_bag("x"), _bag("y")])
        assert [b.tweet_id for b in kept] == ["x"]

    def test_later_item_checked_against_all_kept(self):
        # z is fine against y but collides with the already-kept x.
        bags = [_bag("x", "a", "b", "c"), _bag("y", "p", "q"),
                _bag("z", "a", "b", "c", "d")]
        kept = dedup_list(bags)
        assert [b.tweet_id for b in kept] == ["x", "y"]

    @given(st.lists(st.sets(st.sampled_from("abcdef"), min_size=1), max_size=8))
    @settings(max_examples=100, deadline=None)
    def test_no_kept_pair_at_or_above_threshold(self, entity_sets):
        bags = [_bag(f"T{i}", *s) for i, s in enumerate(entity_sets)]
        kept = dedup_list(bags)
        for a, b in itertools.combinations(kept, 2):
            assert jaccard(a.entities, b.entities) < 0.7


class TestRoundRobin:
    def test_interleave(self):
        got = round_robin([["A1", "A2"], ["B1"]])
        assert [tid for tid, _, _ in got] == ["A1", "B1", "A2"]

    def test_exhausted_list_skipped(self):
        got = round_robin([[], ["B1", "B2"]])
        assert [tid for tid, _, _ in got] == ["B1", "B2"]

    def test_duplicate_id_emitted_once_under_first_topic(self):
        got = round_robin([["A1", "A2"], ["A1", "B2"]])
        assert [(tid, li) for tid, li, _ in got] == \
            [("A1", 0), ("B2", 1), ("A2", 0)]

    def test_ranks_point_into_source_lists(self):
        lists = [["A1", "A2", "A3"], ["B1"], ["C1", "C2"]]
        for tid, li, rank in round_robin(lists):
            assert lists[li][rank - 1] == tid


def _uniform_index(topics, entities):
    """Index where every listed entity is diagnostic for every topic."""
    index = TopicModelIndex(delta=1, k=1, nu=3)
    index.n = 100
    index.n_t = {t: 10 for t in topics}
    index.n_e = {e: 5 for e in entities}
    index.n_et = {t: {e: 3 for e in entities} for t in topics}
    return index


class TestRecommend:
    def test_single_topic_collapse(self):
        index = _uniform_index(["t"], ["a", "b", "c", "d", "e", "f"])
        interests = InterestVector("u", {"t": 0.8, GLOBAL_TOPIC: 0.2})
        candidates = [_bag("T1", "a", "b"), _bag("T2", "c", "d"), _bag("T3", "e")]
        recs = recommend("u", interests, index, candidates, limit=10,
                         generated_at=5)
        assert [item.topic for item in recs.items] == ["t"] * len(recs.items)
        assert {item.tweet_id for item in recs.items} == {"T1", "T2", "T3"}
        assert [item.final_rank for item in recs.items] == [1, 2, 3]

    def test_two_disjoint_topics_alternate(self):
        index = TopicModelIndex(delta=1, k=1, nu=3)
        index.n = 100
        index.n_t = {"t1": 10, "t2": 10}
        index.n_e = {e: 5 for e in "abcdxyzw"}
        index.n_et = {
            "t1": {e: 3 for e in "abcd"},
            "t2": {e: 3 for e in "xyzw"},
        }
        interests = InterestVector("u", {"t1": 0.5, "t2": 0.3, GLOBAL_TOPIC: 0.2})
        candidates = [
            _bag("A1", "a", "b"), _bag("A2", "c", "d"),
            _bag("B1", "x", "y"), _bag("B2", "z", "w"),
        ]
        recs = recommend("u", interests, index, candidates, limit=10,
                         generated_at=5)
        topics = [item.topic for item in recs.items]
        assert topics[:2] == ["t1", "t2"]
        assert set(topics) == {"t1", "t2"}

    def test_no_interests_propagates(self):
        index = _uniform_index(["t"], ["a"])
        interests = InterestVector("u", {GLOBAL_TOPIC: 1.0})
        with pytest.raises(NoExpertFollowingsError):
            recommend("u", interests, index, [_bag("T1", "a")], generated_at=5)

    def test_final_list_has_no_similar_pair(self):
        rng = random.Random(17)
        entities = list("abcdefghij")
        index = _uniform_index(["t1", "t2", "t3"], entities)
        interests = InterestVector(
            "u", {"t1": 0.4, "t2": 0.3, "t3": 0.2, GLOBAL_TOPIC: 0.1})
        candidates = [
            _bag(f"T{i:02d}", *rng.sample(entities, rng.randrange(1, 4)))
            for i in range(30)
        ]
        recs = recommend("u", interests, index, candidates, limit=30,
                         generated_at=5)
        by_id = {b.tweet_id: b for b in candidates}
        for one, two in itertools.combinations(recs.items, 2):
            j = jaccard(by_id[one.tweet_id].entities, by_id[two.tweet_id].entities)
            assert j < 0.7

    def test_deterministic(self):
        index = _uniform_index(["t1", "t2"], list("abcdef"))
        interests = InterestVector("u", {"t1": 0.6, "t2": 0.3, GLOBAL_TOPIC: 0.1})
        candidates = [_bag(f"T{i}", *c) for i, c in
                      enumerate((("a", "b"), ("c",), ("d", "e"), ("f",)))]
        first = recommend("u", interests, index, candidates, generated_at=5)
        second = recommend("u", interests, index, candidates, generated_at=5)
        assert first == second

    def test_items_same_topic_keep_topical_order(self):
        index = _uniform_index(["t"], list("abcdef"))
        interests = InterestVector("u", {"t": 1.0})
        candidates = [_bag("T1", "a", "b"), _bag("T2", "c", "d"), _bag("T3", "e", "f")]
        recs = recommend("u", interests, index, candidates, generated_at=5)
        ranks = [it.topical_rank for it in recs.items if it.topic == "t"]
        assert ranks == sorted(ranks)

    def test_removing_unemitted_candidate_preserves_order(self):
        index = _uniform_index(["t1", "t2"], list("abcdefgh"))
        interests = InterestVector("u", {"t1": 0.6, "t2": 0.4})
        candidates = [
            _bag("T1", "a", "b", "c"), _bag("T2", "a", "b", "c", "d"),  # J = 0.75
            _bag("T3", "e", "f"), _bag("T4", "g"),
        ]
        full = recommend("u", interests, index, candidates, generated_at=5)
        emitted = {it.tweet_id for it in full.items}
        assert "T2" not in emitted
        pruned = [b for b in candidates if b.tweet_id != "T2"]
        again = recommend("u", interests, index, pruned, generated_at=5)
        assert [it.tweet_id for it in again.items] == \
            [it.tweet_id for it in full.items]
