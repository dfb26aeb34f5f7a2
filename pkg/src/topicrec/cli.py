"""Command-line entry points for the full offline pipeline."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import bim, corpus, evaluation, expertise, interest, recommend, synth
from .stopwords import load_stopwords


def _cmd_ingest(args) -> int:
    handle, report = corpus.ingest_corpus(
        lists=args.lists, tweets=args.tweets, follows=args.follows,
        profiles=args.profiles, topics=args.topics, redirects=args.redirects,
        out_dir=args.out, strict=args.strict,
    )
    for name in sorted(set(report.accepted) | set(report.rejected)):
        print(f"{name}: accepted={report.accepted.get(name, 0)} "
              f"rejected={report.rejected.get(name, 0)}")
    print(f"store written to {args.out}")
    return 0


def _cmd_mine_experts(args) -> int:
    handle = corpus.CorpusHandle.load(args.store)
    stopwords = load_stopwords(args.stopwords_dir)
    experts = expertise.mine_experts(
        handle, stopwords=stopwords,
        expert_threshold=args.threshold, max_topics=args.max_topics,
    )
    expertise.save_experts(experts, args.out)
    print(f"{len(experts)} experts written to {args.out}")
    return 0


def _cmd_infer_interests(args) -> int:
    handle = corpus.CorpusHandle.load(args.store)
    experts = expertise.load_experts(args.experts)
    popularity = interest.build_popularity(experts)
    config = interest.EMConfig(
        rel_improvement_stop=args.stop, max_iterations=args.max_iters,
    )
    if args.all_users:
        user_ids = sorted({edge.follower_id for edge in handle.follows})
    elif args.user:
        user_ids = [args.user]
    else:
        print("error: pass --user ID or --all-users", file=sys.stderr)
        return 2
    vectors = []
    for user_id in user_ids:
        try:
            vectors.append(interest.infer_interest(
                user_id, handle, experts, popularity, config))
        except Exception as exc:
            if args.all_users:
                logging.warning("skipping %s: %s", user_id, exc)
                continue
            raise
    interest.save_interests(vectors, args.out)
    print(f"{len(vectors)} interest vectors written to {args.out}")
    return 0


def _cmd_train_bim(args) -> int:
    handle = corpus.CorpusHandle.load(args.store)
    experts = expertise.load_experts(args.experts)
    stopwords = load_stopwords(args.stopwords_dir)
    stream = (
        (bim.extract_entities(t, stopwords), list(experts[t.author_id].expertise))
        for t in handle.tweets
        if t.lang == "en" and t.author_id in experts
    )
    index = bim.train_index(stream, delta=args.delta, k=args.k, nu=args.nu)
    index.save(args.out)
    print(f"index over {index.n} tweets, {len(index.n_e)} entities, "
          f"{len(index.n_t)} topics written to {args.out}")
    return 0


def _cmd_score(args) -> int:
    index = bim.TopicModelIndex.load(args.index)
    stopwords = load_stopwords(args.stopwords_dir)
    bags = []
    with Path(args.tweets).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("lang") != "en":
                continue
            record = corpus.TweetRecord(
                tweet_id=str(obj["tweet_id"]), author_id=str(obj["author_id"]),
                text=str(obj["text"]), lang="en",
                posted_at=int(obj["posted_at"]),
            )
            bags.append(bim.extract_entities(record, stopwords))
    ranked = bim.top_tweets(args.topic, bags, index, n=args.top)
    with Path(args.out).open("w", encoding="utf-8") as fh:
        for tweet_id, score in ranked:
            fh.write(json.dumps(
                {"tweet_id": tweet_id, "topic": args.topic, "score": score},
                sort_keys=True, separators=(",", ":")) + "\n")
    print(f"{len(ranked)} scores written to {args.out}")
    return 0


def _cmd_recommend(args) -> int:
    handle = corpus.CorpusHandle.load(args.store)
    interests = interest.load_interests(args.interests)
    if args.user not in interests:
        print(f"error: no interests for user {args.user}", file=sys.stderr)
        return 2
    index = bim.TopicModelIndex.load(args.index)
    stopwords = load_stopwords(args.stopwords_dir)
    candidates = [
        bim.extract_entities(t, stopwords)
        for t in handle.tweets if t.lang == "en"
    ]
    rec = recommend.recommend(
        args.user, interests[args.user], index, candidates,
        m=args.m, n=args.n, limit=args.limit,
        generated_at=int(time.time()),
    )
    recommend.save_recommendations([rec], args.out)
    print(f"{len(rec.items)} recommendations written to {args.out}")
    return 0


def _cmd_synth(args) -> int:
    spec = synth.SynthSpec.from_json(args.spec)
    synth.generate(spec, args.out)
    print(f"synthetic corpus written to {args.out}")
    return 0


def _cmd_bias_fixture(args) -> int:
    synth.popularity_bias_fixture(args.out)
    print(f"popularity-bias fixture written to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    rankings = evaluation.load_judgments(args.judgments)
    report = evaluation.compute_metrics(rankings)
    evaluation.save_report(report, args.out)
    print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        store_dir=args.store, experts_path=args.experts,
        index_path=args.index, interests_path=args.interests,
        edits_dir=args.edits_dir, stopwords_dir=args.stopwords_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topicrec",
        description="Explainable topical tweet recommendations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and persist the input corpora")
    p.add_argument("--lists", required=True)
    p.add_argument("--tweets", required=True)
    p.add_argument("--follows", required=True)
    p.add_argument("--profiles", required=True)
    p.add_argument("--topics", required=True)
    p.add_argument("--redirects", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("mine-experts", help="mine topical experts from Lists")
    p.add_argument("--store", required=True)
    p.add_argument("--stopwords-dir", default=None)
    p.add_argument("--threshold", type=int, default=expertise.DEFAULT_EXPERT_THRESHOLD)
    p.add_argument("--max-topics", type=int, default=expertise.DEFAULT_MAX_TOPICS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mine_experts)

    p = sub.add_parser("infer-interests", help="run EM interest inference")
    p.add_argument("--store", required=True)
    p.add_argument("--experts", required=True)
    p.add_argument("--user", default=None)
    p.add_argument("--all-users", action="store_true")
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--stop", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_infer_interests)

    p = sub.add_parser("train-bim", help="train the tweet-topic count index")
    p.add_argument("--store", required=True)
    p.add_argument("--experts", required=True)
    p.add_argument("--stopwords-dir", default=None)
    p.add_argument("--delta", type=int, default=bim.DEFAULT_DELTA)
    p.add_argument("--k", type=int, default=bim.DEFAULT_K)
    p.add_argument("--nu", type=int, default=bim.DEFAULT_NU)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train_bim)

    p = sub.add_parser("score", help="rank tweets for one topic")
    p.add_argument("--index", required=True)
    p.add_argument("--topic", required=True)
    p.add_argument("--tweets", required=True)
    p.add_argument("--stopwords-dir", default=None)
    p.add_argument("--top", type=int, default=recommend.DEFAULT_N)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("recommend", help="assemble an explained recommendation list")
    p.add_argument("--store", required=True)
    p.add_argument("--experts", required=True)
    p.add_argument("--interests", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--user", required=True)
    p.add_argument("--stopwords-dir", default=None)
    p.add_argument("--m", type=int, default=recommend.DEFAULT_M)
    p.add_argument("--n", type=int, default=recommend.DEFAULT_N)
    p.add_argument("--limit", type=int, default=recommend.DEFAULT_LIMIT)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("bias-fixture",
                       help="emit the popularity-bias disagreement fixture")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bias_fixture)

    p = sub.add_parser("eval", help="compute metrics over judged rankings")
    p.add_argument("--judgments", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--store", required=True)
    p.add_argument("--experts", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--interests", default=None)
    p.add_argument("--edits-dir", default=None)
    p.add_argument("--stopwords-dir", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
