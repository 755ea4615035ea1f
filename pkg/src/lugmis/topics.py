"""LDA topic models fitted by collapsed Gibbs sampling.

Perplexities from this sampler are not comparable with numbers produced by
online variational LDA toolkits; reports label them as Gibbs estimates.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .accel.gibbs import lda_fold_in_sweep, lda_sweep
from .featurize import extract_ngrams, tokenize
from .preprocess import StopwordList, remove_stopwords


@dataclass(frozen=True)
class LdaConfig:
    num_topics: int = 10
    alpha: float | None = None  # None -> 50 / num_topics
    beta: float = 0.01
    iterations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.num_topics < 1:
            raise ValueError("num_topics must be >= 1")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 50.0 / self.num_topics)
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be > 0")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass(frozen=True)
class TopicModel:
    """Count tables of a collapsed Gibbs state.

    ``nkw`` is topics x words, ``ndk`` documents x topics, ``z`` the topic of
    every training token (flattened in document order).
    """

    vocab: tuple[str, ...]
    nkw: np.ndarray
    ndk: np.ndarray
    z: np.ndarray
    config: LdaConfig

    @property
    def num_topics(self) -> int:
        return self.nkw.shape[0]

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def topic_word(self) -> np.ndarray:
        """Smoothed topic-word distributions, rows sum to 1."""
        beta = self.config.beta
        nk = self.nkw.sum(axis=1, keepdims=True)
        return (self.nkw + beta) / (nk + self.vocab_size * beta)

    def doc_topic(self) -> np.ndarray:
        alpha = self.config.alpha
        nd = self.ndk.sum(axis=1, keepdims=True)
        return (self.ndk + alpha) / (nd + self.num_topics * alpha)


@dataclass(frozen=True)
class EncodedCorpus:
    vocab: tuple[str, ...]
    doc: np.ndarray
    word: np.ndarray
    n_docs: int


def encode(docs: Sequence[Sequence[str]], vocab: Sequence[str] | None = None) -> EncodedCorpus:
    """Flatten token lists into (doc, word) id arrays.

    With a fixed ``vocab``, tokens outside it are dropped.
    """
    index: dict[str, int] = {w: i for i, w in enumerate(vocab)} if vocab is not None else {}
    grow = vocab is None
    doc, word = [], []
    for d, tokens in enumerate(docs):
        for t in tokens:
            j = index.get(t)
            if j is None:
                if not grow:
                    continue
                j = index[t] = len(index)
            doc.append(d)
            word.append(j)
    terms = tuple(index) if grow else tuple(vocab)
    return EncodedCorpus(terms, np.array(doc, dtype=np.int64), np.array(word, dtype=np.int64), len(docs))


def _check_docs(docs):
    if len(docs) == 0:
        raise ValueError("empty corpus")
    for i, tokens in enumerate(docs):
        if len(tokens) == 0:
            raise ValueError(f"document {i} has no tokens")


def init_lda(docs: Sequence[Sequence[str]], config: LdaConfig) -> TopicModel:
    """Random initial assignment, before any sweep."""
    _check_docs(docs)
    enc = encode(docs)
    rng = np.random.default_rng(config.seed)
    K = config.num_topics
    z = rng.integers(0, K, enc.word.size).astype(np.int64)
    nkw = np.zeros((K, len(enc.vocab)), dtype=np.int64)
    ndk = np.zeros((enc.n_docs, K), dtype=np.int64)
    np.add.at(nkw, (z, enc.word), 1)
    np.add.at(ndk, (enc.doc, z), 1)
    return TopicModel(enc.vocab, nkw, ndk, z, config)


def train_lda(docs: Sequence[Sequence[str]], config: LdaConfig,
              on_sweep: Callable[[int, TopicModel], None] | None = None) -> TopicModel:
    """Collapsed Gibbs sampling for ``config.iterations`` sweeps.

    The sampler's uniforms come from one generator seeded by
    ``config.seed``, drawn a sweep at a time. ``on_sweep(i, model)`` sees
    the live state after sweep ``i`` and must not modify it.
    """
    model = init_lda(docs, config)
    enc = encode(docs)
    rng = np.random.default_rng([config.seed, 1])
    nk = model.nkw.sum(axis=1)
    z, ndk, nkw = model.z, model.ndk, model.nkw
    for it in range(config.iterations):
        u = rng.random(z.size)
        lda_sweep(enc.doc, enc.word, z, ndk, nkw, nk, float(config.alpha), float(config.beta), u)
        if on_sweep is not None:
            on_sweep(it, model)
    for a in (z, ndk, nkw):
        a.setflags(write=False)
    return model


def check_counts(model: TopicModel, n_tokens: int) -> None:
    """Raise AssertionError if the count tables are inconsistent."""
    assert (model.nkw >= 0).all() and (model.ndk >= 0).all()
    assert int(model.nkw.sum()) == n_tokens
    assert int(model.ndk.sum()) == n_tokens
    assert np.array_equal(model.nkw.sum(axis=1), model.ndk.sum(axis=0))
    assert np.array_equal(np.bincount(model.z, minlength=model.num_topics), model.nkw.sum(axis=1))


def _log_likelihood(theta, phi, enc: EncodedCorpus) -> float:
    p = np.einsum("ik,ki->i", theta[enc.doc], phi[:, enc.word])
    return float(np.log(p).sum())


def training_perplexity(model: TopicModel, docs: Sequence[Sequence[str]]) -> float:
    """Perplexity of the training documents under the fitted mixtures."""
    enc = encode(docs, model.vocab)
    if enc.word.size != int(model.nkw.sum()):
        raise ValueError("docs do not match the model's training corpus")
    return math.exp(-_log_likelihood(model.doc_topic(), model.topic_word(), enc) / enc.word.size)


def perplexity(model: TopicModel, heldout: Sequence[Sequence[str]], sweeps: int = 50, seed: int = 0) -> float:
    """Held-out perplexity with document mixtures estimated by fold-in.

    Topic-word tables stay frozen; each held-out document's topics are
    resampled for ``sweeps`` sweeps. Words unseen in training are dropped
    before scoring.
    """
    if len(heldout) == 0:
        raise ValueError("empty held-out corpus")
    enc = encode(heldout, model.vocab)
    if enc.word.size == 0:
        raise ValueError("held-out corpus has no in-vocabulary tokens")
    K = model.num_topics
    phi = model.topic_word()
    rng = np.random.default_rng([seed, 2])
    z = rng.integers(0, K, enc.word.size).astype(np.int64)
    ndk = np.zeros((enc.n_docs, K), dtype=np.int64)
    np.add.at(ndk, (enc.doc, z), 1)
    alpha = float(model.config.alpha)
    for _ in range(sweeps):
        lda_fold_in_sweep(enc.doc, enc.word, z, ndk, phi, alpha, rng.random(z.size))
    nd = ndk.sum(axis=1, keepdims=True)
    theta = (ndk + alpha) / (nd + K * alpha)
    return math.exp(-_log_likelihood(theta, phi, enc) / enc.word.size)


def top_words(model: TopicModel, topic: int, n: int) -> list[tuple[str, float]]:
    """``n`` most probable words of ``topic``; equal probabilities in
    alphabetical order."""
    if not 0 <= topic < model.num_topics:
        raise IndexError(f"topic {topic} out of range 0..{model.num_topics - 1}")
    row = model.topic_word()[topic]
    ranked = sorted(range(model.vocab_size), key=lambda j: (-row[j], model.vocab[j]))
    return [(model.vocab[j], float(row[j])) for j in ranked[:max(n, 0)]]


@dataclass(frozen=True)
class TopicSummary:
    words: tuple  # per topic: tuple of (word, probability)
    mass: tuple  # fraction of training tokens per topic


def summarize(model: TopicModel, n: int = 10) -> TopicSummary:
    nk = model.nkw.sum(axis=1)
    total = nk.sum()
    return TopicSummary(
        tuple(tuple(top_words(model, k, n)) for k in range(model.num_topics)),
        tuple(float(c / total) for c in nk),
    )


def word_frequencies(docs: Iterable[Sequence[str]]) -> list[tuple[str, int]]:
    counts = Counter(t for tokens in docs for t in tokens)
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def topic_tokens(text: str, stopwords: StopwordList | None = None, max_n: int = 1) -> list[str]:
    """Tokens for topic modelling: stopwords removed, then optional
    n-grams treated as single tokens."""
    tokens = tokenize(text)
    if stopwords is not None:
        tokens = remove_stopwords(tokens, stopwords)
    return extract_ngrams(tokens, max_n) if max_n > 1 else tokens


def topics_csv(summary: TopicSummary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["topic", "rank", "word", "probability"])
    for k, words in enumerate(summary.words):
        for rank, (word, p) in enumerate(words, start=1):
            w.writerow([k, rank, word, repr(p)])
    return buf.getvalue()


def frequencies_csv(freqs: Sequence[tuple[str, int]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["word", "count"])
    w.writerows(freqs)
    return buf.getvalue()
