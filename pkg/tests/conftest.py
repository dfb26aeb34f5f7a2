"""Shared fixtures: tiny corpus builders and acceptance-line reporting."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from topicrec import corpus


def write_ndjson(path: Path, records: list[dict]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def make_store(
    root: Path,
    lists: list[dict] | None = None,
    tweets: list[dict] | None = None,
    follows: list[dict] | None = None,
    profiles: list[dict] | None = None,
    topics: list[str] | None = None,
    redirects: dict[str, str] | None = None,
    out: Path | None = None,
    strict: bool = False,
):
    """Write raw corpus files under ``root`` and ingest them."""
    root.mkdir(parents=True, exist_ok=True)
    write_ndjson(root / "lists.ndjson", lists or [])
    write_ndjson(root / "tweets.ndjson", tweets or [])
    write_ndjson(root / "follows.ndjson", follows or [])
    write_ndjson(root / "profiles.ndjson", profiles or [])
    with (root / "topics.tsv").open("w", encoding="utf-8") as fh:
        for t in topics or []:
            fh.write(f"{t}\t{t}\n")
    with (root / "redirects.tsv").open("w", encoding="utf-8") as fh:
        for alias, target in (redirects or {}).items():
            fh.write(f"{alias}\t{target}\n")
    return corpus.ingest_corpus(
        lists=root / "lists.ndjson",
        tweets=root / "tweets.ndjson",
        follows=root / "follows.ndjson",
        profiles=root / "profiles.ndjson",
        topics=root / "topics.tsv",
        redirects=root / "redirects.tsv",
        out_dir=out,
        strict=strict,
    )


@pytest.fixture
def store_builder(tmp_path):
    def build(name="corpus", **kwargs):
        return make_store(tmp_path / name, **kwargs)

    return build


def pytest_runtest_logreport(report):
    """Print one PASS/FAIL line per acceptance criterion."""
    if report.when != "call":
        return
    name = report.location[2]
    if "test_acceptance" not in report.nodeid or not name.startswith("test_a"):
        return
    criterion = name.split("_")[1].upper()
    outcome = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE {criterion}: {outcome} ({name})")
