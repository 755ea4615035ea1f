"""Synthetic stand-in corpora for smoke tests and benchmarks.

These documents are generated, not collected. They imitate the shape of a
short-post corpus (two platforms, two labels, a shared topical vocabulary
plus label-leaning words) so the pipeline can be exercised end to end
without the real data. Metrics measured on them say nothing about
misinformation detection.
"""

from __future__ import annotations

import numpy as np

from .corpus import Document, LabeledDataset

SYNTHETIC_PREFIX = "synthetic-"

_SHARED = (
    "corona covid19 virus ssenyiga obulwadde abantu uganda kampala gavumenti minisita "
    "eddagala ddwaliro abalwadde okwetangira masks lockdown health people today news "
    "test tests vaccine okugema abasawo ennaku kati buli nnyo mu ku era nti"
).split()
_LEAN = {
    0: ("tekiriiwo kulimba lies 5g plot bill gates cure garlic lemon kiyita kufa abazungu "
        "secret hoax fake kirimba chinese conspiracy mwenge omususa").split(),
    1: ("who guidelines wash hands distance stay home facts confirmed recovered cases "
        "ministry update tusaba mwetangire obuyonjo sanitizer hospital statistics").split(),
}
# per-platform (n_misinformation, n_no_misinformation) at scale 1.0
_SHAPE = {"twitter": (36, 250), "facebook": (577, 182)}


def synthetic_dataset(seed: int = 0, scale: float = 1.0, signal: float = 0.35,
                      min_len: int = 6, max_len: int = 25) -> LabeledDataset:
    """Random labelled posts with ``round(scale * n)`` documents per cell.

    Each token is label-leaning with probability ``signal`` and drawn from
    the shared pool otherwise, so accuracy is bounded away from 100%.
    """
    rng = np.random.default_rng(seed)
    docs = []
    for source, counts in _SHAPE.items():
        for label, count in enumerate(counts):
            for _ in range(max(1, round(scale * count))):
                length = int(rng.integers(min_len, max_len + 1))
                lean = rng.random(length) < signal
                words = [
                    _LEAN[label][rng.integers(len(_LEAN[label]))] if flag else _SHARED[rng.integers(len(_SHARED))]
                    for flag in lean
                ]
                if rng.random() < 0.3:
                    words.insert(0, "RT @user_" + str(int(rng.integers(100))))
                if rng.random() < 0.2:
                    words.append("https://t.co/" + format(int(rng.integers(1 << 20)), "x"))
                docs.append((source, label, " ".join(words)))
    order = rng.permutation(len(docs))
    names = ("misinformation", "no-misinformation")
    return LabeledDataset(tuple(
        Document(f"{SYNTHETIC_PREFIX}{i:06d}", docs[j][2], docs[j][0], names[docs[j][1]])
        for i, j in enumerate(order)
    ))


def separable_dataset(n_per_label: int = 20, seed: int = 0) -> LabeledDataset:
    """Each document carries three label-specific tokens and three shared
    filler words, so every learner separates the labels."""
    rng = np.random.default_rng(seed)
    names = ("misinformation", "no-misinformation")
    docs = []
    for i in range(2 * n_per_label):
        label = i % 2
        filler = " ".join(_SHARED[j] for j in rng.integers(0, len(_SHARED), 3))
        marks = " ".join(f"labeltoken{label}{c}" for c in "abc")
        docs.append(Document(f"{SYNTHETIC_PREFIX}{i:06d}", f"{marks} {filler}",
                             "twitter" if i % 3 else "facebook", names[label]))
    return LabeledDataset(tuple(docs))
