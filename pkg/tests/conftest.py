import json
import os
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sp

from lugmis.corpus import save_dataset
from lugmis.synthetic import separable_dataset, synthetic_dataset

REPO = Path(__file__).resolve().parents[1]


def released_dataset_path():
    """Location of the real labelled corpus, if present on this machine."""
    env = os.environ.get("LUGMIS_DATASET")
    candidates = [Path(env)] if env else []
    candidates += [REPO / "data" / "covid_facebook_twitter_Luganda.json", REPO / "data" / "covid_luganda.json"]
    for p in candidates:
        if p.is_file():
            return p
    return None


@pytest.fixture
def toy_separable():
    """Two features, one per label."""
    X = sp.csr_matrix(np.array([[1, 0], [1, 0], [0, 1], [0, 1]], dtype=float))
    y = np.array([0, 0, 1, 1])
    return X, y


@pytest.fixture
def separable_points():
    """200 seeded points, linearly separable with a margin (features >= 0)."""
    rng = np.random.default_rng(7)
    X = rng.random((400, 2)) * 2
    s = X[:, 0] - X[:, 1]
    keep = np.abs(s) > 0.2
    X, s = X[keep][:200], s[keep][:200]
    y = np.where(s > 0, 0, 1)
    return sp.csr_matrix(X), y


@pytest.fixture
def syn_ds():
    return synthetic_dataset(seed=0, scale=0.3, signal=0.3)


@pytest.fixture
def sep_ds():
    return separable_dataset(20, seed=0)


@pytest.fixture
def syn_path(tmp_path):
    p = tmp_path / "syn.json"
    save_dataset(synthetic_dataset(seed=1, scale=0.3, signal=0.3), p)
    return p


def write_records(path, records):
    Path(path).write_text(json.dumps(records), encoding="utf-8")
    return path


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
