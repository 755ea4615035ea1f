"""Text cleaning for social-media posts.

Rules run in a fixed order: lowercase, URLs, e-mail addresses, @mentions,
the retweet marker ``rt``, symbols, non-ASCII characters, whitespace. Every
removal substitutes a space, so no step can fuse two neighbouring words and
the whole pipeline is idempotent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

__all__ = [
    "CleaningConfig",
    "StopwordList",
    "clean_text",
    "remove_stopwords",
    "load_stopwords",
    "default_stopwords",
]

_URL = re.compile(r"(?:https?://|www\.)\S+")
_EMAIL = re.compile(r"[a-z0-9._%+-]+@[a-z0-9-]+(?:\.[a-z0-9-]+)*\.[a-z]{2,}")
_MENTION = re.compile(r"@[a-z0-9_]+")
_ENTITY = re.compile(r"&(?:[a-z]+|#[0-9]+);")
_NON_ASCII = re.compile(r"[^\x00-\x7f]")
_SPACES = re.compile(r"\s+")

# "word" = characters that survive every later stage; rt/# boundaries are
# judged against them so a second pass cannot expose a new match
_ASCII_WORD = "A-Za-z0-9_"
_ANY_WORD = r"\w"


def _patterns(ascii_only: bool):
    word = _ASCII_WORD if ascii_only else _ANY_WORD
    rt = re.compile(rf"(?<![#{word}])rt(?![{word}])")
    symbols = re.compile(rf"[^\w\s#]|#(?![{word}])")
    return rt, symbols


_PATTERNS = {True: _patterns(True), False: _patterns(False)}


@dataclass(frozen=True)
class StopwordList:
    words: frozenset

    def __post_init__(self):
        words = frozenset(self.words)
        for w in words:
            if w != w.lower() or not w or any(ch.isspace() for ch in w):
                raise ValueError(f"invalid stopword {w!r}: must be lowercase without whitespace")
        object.__setattr__(self, "words", words)

    def __contains__(self, token):
        return token in self.words

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(sorted(self.words))

    def union(self, other: "StopwordList") -> "StopwordList":
        return StopwordList(self.words | other.words)


EMPTY_STOPWORDS = StopwordList(frozenset())


@dataclass(frozen=True)
class CleaningConfig:
    """Per-rule switches; all are required so call sites state every choice."""

    lowercase: bool
    strip_mentions: bool
    strip_retweet_markers: bool
    strip_urls: bool
    strip_emails: bool
    strip_symbols: bool
    strip_non_ascii: bool
    remove_stopwords: bool
    stopword_list: StopwordList = EMPTY_STOPWORDS

    @classmethod
    def all_on(cls, stopwords: StopwordList | None = None) -> "CleaningConfig":
        """Every rule enabled; stopwords removed when a list is given."""
        return cls(
            lowercase=True,
            strip_mentions=True,
            strip_retweet_markers=True,
            strip_urls=True,
            strip_emails=True,
            strip_symbols=True,
            strip_non_ascii=True,
            remove_stopwords=stopwords is not None,
            stopword_list=stopwords if stopwords is not None else EMPTY_STOPWORDS,
        )


def _lower(text: str) -> str:
    # keep characters whose lowercase form is longer (e.g. U+0130) unchanged
    out = text.lower()
    if len(out) == len(text):
        return out
    return "".join(c.lower() if len(c.lower()) == 1 else c for c in text)


def clean_text(raw: str, config: CleaningConfig) -> str:
    """Apply the enabled cleaning rules in their fixed order.

    Stopword removal is token-level and therefore not done here, see
    :func:`remove_stopwords`.

    >>> clean_text("RT @MinOfHealthUG Corona &amp; COVID19 https://t.co/x", CleaningConfig.all_on())
    'corona covid19'
    """
    text = raw
    if config.lowercase:
        text = _lower(text)
    if config.strip_urls:
        text = _URL.sub(" ", text)
    if config.strip_emails:
        text = _EMAIL.sub(" ", text)
    if config.strip_mentions:
        text = _MENTION.sub(" ", text)
    rt, symbols = _PATTERNS[config.strip_non_ascii]
    if config.strip_retweet_markers:
        text = rt.sub(" ", text)
    if config.strip_symbols:
        text = _ENTITY.sub(" ", text)
        text = symbols.sub(" ", text)
    if config.strip_non_ascii:
        text = _NON_ASCII.sub(" ", text)
    return _SPACES.sub(" ", text).strip()


def remove_stopwords(tokens: Sequence[str], stopwords: StopwordList | Iterable[str]) -> list[str]:
    """Order-preserving filter dropping tokens found in ``stopwords``."""
    if not isinstance(stopwords, StopwordList):
        stopwords = frozenset(stopwords)
    return [t for t in tokens if t not in stopwords]


def _parse_stopwords(lines: Iterable[str]) -> StopwordList:
    words = set()
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line.lower())
    return StopwordList(frozenset(words))


def load_stopwords(path: str | Path) -> StopwordList:
    """Read a one-token-per-line stopword file; ``#`` starts a comment line."""
    with open(path, encoding="utf-8") as fh:
        return _parse_stopwords(fh)


def default_stopwords(include_english: bool = True) -> StopwordList:
    """The bundled Luganda list, optionally merged with a short English list."""
    data = resources.files("lugmis") / "data"
    words = _parse_stopwords((data / "luganda_stopwords.txt").read_text(encoding="utf-8").splitlines())
    if include_english:
        english = _parse_stopwords((data / "english_stopwords.txt").read_text(encoding="utf-8").splitlines())
        words = words.union(english)
    return words


def prepare_text(raw: str, config: CleaningConfig) -> str:
    """``clean_text`` followed by stopword removal when the config asks for it."""
    text = clean_text(raw, config)
    if config.remove_stopwords:
        text = " ".join(remove_stopwords(text.split(), config.stopword_list))
    return text
