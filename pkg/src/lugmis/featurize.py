"""Word n-gram features.

Texts are expected to be cleaned already (see :mod:`lugmis.preprocess`).
Tokens are whitespace-delimited, n-grams are joined with a single space, and
the vocabulary assigns indices in order of first occurrence over the corpus.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "NGramConfig",
    "Vocabulary",
    "SparseVector",
    "tokenize",
    "extract_ngrams",
    "build_vocabulary",
    "vectorize",
    "vectorize_all",
    "write_vocabulary_csv",
    "write_sparse_matrix",
]


@dataclass(frozen=True)
class NGramConfig:
    max_n: int = 1
    min_doc_frequency: int = 1
    binary_features: bool = True

    def __post_init__(self):
        if self.max_n not in (1, 2, 3):
            raise ValueError(f"max_n must be 1, 2 or 3, got {self.max_n}")
        if self.min_doc_frequency < 1:
            raise ValueError("min_doc_frequency must be >= 1")


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    doc_frequency: tuple[int, ...]
    config: NGramConfig
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.terms) != len(self.doc_frequency):
            raise ValueError("terms and doc_frequency differ in length")
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})
        if len(self.index) != len(self.terms):
            raise ValueError("duplicate vocabulary terms")

    def __len__(self):
        return len(self.terms)

    @property
    def size(self) -> int:
        return len(self.terms)

    def __contains__(self, term):
        return term in self.index

    def to_dict(self) -> dict:
        return {
            "terms": list(self.terms),
            "doc_frequency": list(self.doc_frequency),
            "config": {
                "max_n": self.config.max_n,
                "min_doc_frequency": self.config.min_doc_frequency,
                "binary_features": self.config.binary_features,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        return cls(tuple(d["terms"]), tuple(int(x) for x in d["doc_frequency"]), NGramConfig(**d["config"]))


@dataclass(frozen=True, eq=False)
class SparseVector:
    """Sorted ``(index, value)`` pairs of a single document."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and values must be 1-D arrays of equal length")
        if idx.size:
            if np.any(np.diff(idx) <= 0):
                raise ValueError("indices must be strictly increasing")
            if idx[0] < 0 or idx[-1] >= self.dim:
                raise ValueError("index out of range")
        if np.any(val == 0):
            raise ValueError("stored values must be nonzero")
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_dense(cls, x) -> "SparseVector":
        x = np.asarray(x, dtype=np.float64)
        nz = np.flatnonzero(x)
        return cls(nz, x[nz], x.shape[0])

    @classmethod
    def from_row(cls, row) -> "SparseVector":
        """From a 1 x d scipy sparse row."""
        row = sp.csr_matrix(row)
        row.sum_duplicates()
        row.sort_indices()
        keep = row.data != 0
        return cls(row.indices[keep], row.data[keep], row.shape[1])

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (self.dim == other.dim and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def to_row(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.values, self.indices, np.array([0, self.indices.size])), shape=(1, self.dim)
        )

    def pairs(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.values.tolist()))

    def dot(self, other: "SparseVector") -> float:
        if self.dim != other.dim:
            raise ValueError(f"dimensionality mismatch: {self.dim} vs {other.dim}")
        common, ia, ib = np.intersect1d(self.indices, other.indices, assume_unique=True, return_indices=True)
        return float(np.dot(self.values[ia], other.values[ib]))


def tokenize(text: str) -> list[str]:
    """Whitespace tokenizer; hashtags survive as single tokens."""
    return text.split()


def extract_ngrams(tokens: Sequence[str], max_n: int) -> list[str]:
    """All contiguous k-grams for k = 1..max_n, grouped by k, left to right."""
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    out = list(tokens)
    for k in range(2, max_n + 1):
        out.extend(" ".join(tokens[i:i + k]) for i in range(len(tokens) - k + 1))
    return out


def _doc_ngrams(text: str, max_n: int) -> list[str]:
    return extract_ngrams(tokenize(text), max_n)


def build_vocabulary(texts: Sequence[str], config: NGramConfig) -> Vocabulary:
    """Vocabulary over cleaned texts, indices in first-occurrence order."""
    if len(texts) == 0:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    df: dict[str, int] = {}
    for text in texts:
        for gram in dict.fromkeys(_doc_ngrams(text, config.max_n)):
            df[gram] = df.get(gram, 0) + 1
    # dict preserves first-insertion order
    kept = [(g, c) for g, c in df.items() if c >= config.min_doc_frequency]
    return Vocabulary(tuple(g for g, _ in kept), tuple(c for _, c in kept), config)


def _doc_counts(text: str, vocab: Vocabulary) -> dict[int, int]:
    counts: dict[int, int] = {}
    index = vocab.index
    for gram in _doc_ngrams(text, vocab.config.max_n):
        j = index.get(gram)
        if j is not None:
            counts[j] = counts.get(j, 0) + 1
    return counts


def vectorize(text: str, vocab: Vocabulary) -> SparseVector:
    """Feature vector of one cleaned text; unknown n-grams are dropped."""
    counts = _doc_counts(text, vocab)
    idx = np.array(sorted(counts), dtype=np.int64)
    if vocab.config.binary_features:
        val = np.ones(idx.size)
    else:
        val = np.array([counts[j] for j in idx.tolist()], dtype=np.float64)
    return SparseVector(idx, val, vocab.size)


def vectorize_all(texts: Iterable[str], vocab: Vocabulary) -> sp.csr_matrix:
    """Stack the feature vectors of many texts into a CSR matrix."""
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    binary = vocab.config.binary_features
    for text in texts:
        counts = _doc_counts(text, vocab)
        for j in sorted(counts):
            indices.append(j)
            data.append(1.0 if binary else float(counts[j]))
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(indptr) - 1, vocab.size),
    )


def write_vocabulary_csv(vocab: Vocabulary, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["ngram", "index", "doc_frequency"])
    for i, (term, df) in enumerate(zip(vocab.terms, vocab.doc_frequency)):
        writer.writerow([term, i, df])


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def write_sparse_matrix(X: sp.csr_matrix, labels: Sequence[str], fh) -> None:
    """One line per row: ``label idx:value idx:value ...``, indices ascending."""
    X = sp.csr_matrix(X)
    X.sort_indices()
    for i, label in enumerate(labels):
        lo, hi = X.indptr[i], X.indptr[i + 1]
        feats = " ".join(f"{j}:{_fmt(v)}" for j, v in zip(X.indices[lo:hi].tolist(), X.data[lo:hi].tolist()))
        fh.write(f"{label} {feats}".rstrip() + "\n")


def sparse_matrix_text(X: sp.csr_matrix, labels: Sequence[str]) -> str:
    buf = io.StringIO()
    write_sparse_matrix(X, labels, buf)
    return buf.getvalue()
