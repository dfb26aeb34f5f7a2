"""Stopword lists used by topic matching and entity extraction.

Small embedded defaults for English, Spanish, Portuguese, and
platform-specific noise words; a directory of ``*.txt`` files (one word
per line, ``#`` comments allowed) can replace or extend them.
"""

from __future__ import annotations

from pathlib import Path

ENGLISH = {
    "a", "about", "after", "all", "also", "an", "and", "any", "are", "as",
    "at", "be", "been", "best", "but", "by", "can", "could", "did", "do",
    "does", "for", "from", "get", "had", "has", "have", "he", "her", "his",
    "how", "i", "if", "in", "into", "is", "it", "its", "just", "like",
    "me", "more", "most", "my", "new", "no", "not", "now", "of", "on",
    "one", "only", "or", "other", "our", "out", "over", "she", "so",
    "some", "such", "than", "that", "the", "their", "them", "then",
    "there", "these", "they", "this", "to", "top", "up", "us", "was",
    "we", "were", "what", "when", "which", "who", "will", "with", "would",
    "you", "your",
}

SPANISH = {
    "al", "como", "con", "de", "del", "el", "ella", "en", "es", "esta",
    "este", "la", "las", "lo", "los", "mas", "mi", "muy", "no", "nos",
    "para", "pero", "por", "que", "se", "si", "sin", "son", "su", "sus",
    "te", "tu", "un", "una", "uno", "unos", "y", "ya",
}

PORTUGUESE = {
    "ao", "aos", "aquele", "as", "com", "da", "das", "de", "dela", "dele",
    "do", "dos", "e", "ela", "ele", "em", "essa", "esse", "eu", "isso",
    "mais", "mas", "na", "nao", "nas", "no", "nos", "o", "os", "ou",
    "para", "pela", "pelo", "por", "que", "se", "sem", "seu", "sua",
    "um", "uma", "voce",
}

# Platform noise: words that name the medium rather than a topic.
TWITTER = {
    "dm", "fav", "follow", "follower", "followers", "following", "list",
    "lists", "retweet", "retweets", "rt", "tweep", "tweeps", "tweet",
    "tweeting", "tweets", "twitter",
}

_FILES = {
    "english.txt": ENGLISH,
    "spanish.txt": SPANISH,
    "portuguese.txt": PORTUGUESE,
    "twitter.txt": TWITTER,
}


def default_stopwords() -> set[str]:
    """Union of all embedded lists."""
    return ENGLISH | SPANISH | PORTUGUESE | TWITTER


def load_stopwords(directory: str | Path | None = None) -> set[str]:
    """Load stopwords from ``directory``, falling back to the defaults.

    Each ``*.txt`` file in the directory contributes one word per line.
    Files named after an embedded list replace that list; any other
    ``*.txt`` file is additive.
    """
    if directory is None:
        return default_stopwords()
    directory = Path(directory)
    merged: set[str] = set()
    seen_names: set[str] = set()
    for path in sorted(directory.glob("*.txt")):
        seen_names.add(path.name)
        for line in path.read_text(encoding="utf-8").splitlines():
            word = line.strip().lower()
            if word and not word.startswith("#"):
                merged.add(word)
    for name, words in _FILES.items():
        if name not in seen_names:
            merged |= words
    return merged


def write_default_stopwords(directory: str | Path) -> None:
    """Materialize the embedded lists as editable files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, words in _FILES.items():
        (directory / name).write_text(
            "\n".join(sorted(words)) + "\n", encoding="utf-8"
        )
