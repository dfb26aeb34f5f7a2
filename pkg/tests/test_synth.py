"""Generator determinism, feasibility checks, and model consistency."""

import random
from collections import Counter
from pathlib import Path

import pytest

from topicrec import synth
from topicrec.corpus import ingest_corpus
from topicrec.errors import SpecError
from topicrec.expertise import mine_experts
from topicrec.interest import GLOBAL_TOPIC, build_popularity
from topicrec.synth import SynthSpec, generate, load_ground_truth, sample_follows


SMALL_SPEC = SynthSpec(
    num_topics=6, num_experts=10, num_users=5, follows_per_user=12,
    tweets_per_expert=8, vocab_size=80, entities_per_tweet=4, seed=13,
)


def _ingest(d: Path):
    return ingest_corpus(
        lists=d / "lists.ndjson", tweets=d / "tweets.ndjson",
        follows=d / "follows.ndjson", profiles=d / "profiles.ndjson",
        topics=d / "topics.tsv", redirects=d / "redirects.tsv",
        out_dir=None,
    )


def _files(d: Path):
    return sorted(p.name for p in d.iterdir() if p.is_file())


class TestDeterminism:
    def test_same_spec_same_bytes(self, tmp_path):
        generate(SMALL_SPEC, tmp_path / "one")
        generate(SMALL_SPEC, tmp_path / "two")
        names = _files(tmp_path / "one")
        assert names == _files(tmp_path / "two") and names
        for name in names:
            assert (tmp_path / "one" / name).read_bytes() == \
                (tmp_path / "two" / name).read_bytes()

    def test_different_seed_different_corpus(self, tmp_path):
        generate(SMALL_SPEC, tmp_path / "one")
        other = SynthSpec(**{**SMALL_SPEC.__dict__, "seed": 14})
        generate(other, tmp_path / "two")
        assert (tmp_path / "one" / "follows.ndjson").read_bytes() != \
            (tmp_path / "two" / "follows.ndjson").read_bytes()


class TestCorpusValidity:
    def test_ingests_with_zero_rejects(self, tmp_path):
        generate(SMALL_SPEC, tmp_path)
        _, report = _ingest(tmp_path)
        assert not report.rejected

    def test_mining_recovers_exact_inclusion_counts(self, tmp_path):
        result = generate(SMALL_SPEC, tmp_path)
        handle, _ = _ingest(tmp_path)
        experts = mine_experts(handle)
        assert set(experts) == set(result.expert_topics)
        truth, expert_topics = load_ground_truth(tmp_path / "ground_truth.ndjson")
        for v, rec in experts.items():
            assert sorted(rec.expertise) == expert_topics[v]
        # Inclusion-count construction: record j holds experts with count > j,
        # so the mined count equals the constructed target exactly.
        by_topic: dict[str, dict[str, int]] = {}
        for rec in handle.lists:
            for member in rec.member_ids:
                by_topic.setdefault(member, Counter())[rec.name] += 1
        for v, rec in experts.items():
            assert dict(by_topic[v]) == dict(rec.expertise)

    def test_ground_truth_vectors_normalized(self, tmp_path):
        generate(SMALL_SPEC, tmp_path)
        truth, _ = load_ground_truth(tmp_path / "ground_truth.ndjson")
        assert len(truth) == SMALL_SPEC.num_users
        for weights in truth.values():
            assert sum(weights.values()) == pytest.approx(1.0, abs=1e-9)
            assert GLOBAL_TOPIC in weights


class TestSpecValidation:
    def test_nonpositive_count_rejected(self):
        with pytest.raises(SpecError):
            SynthSpec(**{**SMALL_SPEC.__dict__, "num_users": 0}).validate()

    def test_entities_cannot_exceed_vocab(self):
        with pytest.raises(SpecError):
            SynthSpec(**{**SMALL_SPEC.__dict__, "entities_per_tweet": 99,
                         "vocab_size": 10}).validate()

    def test_too_few_topics_for_user_interests(self):
        with pytest.raises(SpecError):
            SynthSpec(**{**SMALL_SPEC.__dict__, "num_topics": 2}).validate()


class TestSamplingConvergence:
    def test_selection_frequencies_match_interest(self):
        # Law-of-large-numbers check on the two-step sampler.
        rng = random.Random(99)
        theta = {
            "t0": {"e0": 0.5, "e1": 0.3, "e2": 0.2},
            "t1": {"e3": 0.9, "e4": 0.1},
            "t2": {"e5": 1.0},
            GLOBAL_TOPIC: {f"e{i}": 1 / 6 for i in range(6)},
        }
        interest = {"t0": 0.5, "t1": 0.25, "t2": 0.15, GLOBAL_TOPIC: 0.10}
        _, selections = sample_follows(rng, interest, theta, 10_000)
        total = sum(selections.values())
        assert total == 10_000
        for topic, weight in interest.items():
            assert selections[topic] / total == pytest.approx(weight, abs=0.02)


class TestPopularityBiasFixture:
    def test_regeneration_identical_bytes(self, tmp_path):
        synth.popularity_bias_fixture(tmp_path / "one")
        synth.popularity_bias_fixture(tmp_path / "two")
        for name in _files(tmp_path / "one"):
            assert (tmp_path / "one" / name).read_bytes() == \
                (tmp_path / "two" / name).read_bytes()

    def test_user_follows_five_experts_per_topic(self, tmp_path):
        synth.popularity_bias_fixture(tmp_path)
        handle, report = _ingest(tmp_path)
        assert not report.rejected
        experts = mine_experts(handle)
        followed = handle.expert_followings("u_bias", experts)
        per_topic = Counter()
        for v in followed:
            for t in experts[v].expertise:
                per_topic[t] += 1
        assert per_topic[synth.POPULAR_TOPIC] == 5
        assert per_topic[synth.NICHE_TOPIC] == 5

    def test_topic_sizes_differ(self, tmp_path):
        synth.popularity_bias_fixture(tmp_path)
        handle, _ = _ingest(tmp_path)
        experts = mine_experts(handle)
        sizes = Counter()
        for rec in experts.values():
            for t in rec.expertise:
                sizes[t] += 1
        assert sizes[synth.POPULAR_TOPIC] == 100
        assert sizes[synth.NICHE_TOPIC] == 6
