import json
import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.sparse as sp

from lugmis import accel
from lugmis.accel.bayes import dmnb_passes
from lugmis.accel.gibbs import lda_fold_in_sweep, lda_sweep
from lugmis.accel.sgd import pegasos_epoch
from lugmis.accel.smo import smo_solve
from lugmis.accel.tree import grow_tree, tree_predict
from lugmis.classifiers.tree import _csc_parts

# in-process comparison needs the jitted helpers; the subprocess test covers numpy mode
needs_numba = pytest.mark.skipif(not accel.USE_NUMBA, reason="numba backend not active")


def _both(fn):
    return accel.compile_kernel(fn), fn.py_func


def _matrix(seed=0, n=40, d=12):
    rng = np.random.default_rng(seed)
    X = sp.csr_matrix(rng.integers(0, 3, (n, d)) * (rng.random((n, d)) < 0.4)).astype(np.float64)
    y = rng.integers(0, 2, n).astype(np.int64)
    return X, y, rng


def test_backend_name():
    assert accel.backend() in ("numba", "numpy")
    assert accel.backend() == ("numba" if accel.USE_NUMBA else "numpy")


def test_env_flag_selects_numpy_backend():
    code = ("import json, lugmis.accel as a; from lugmis.accel.bayes import dmnb_passes;"
            "print(json.dumps([a.backend(), hasattr(dmnb_passes, 'py_func')]))")
    env = dict(os.environ, **{accel.ENV_FLAG: "0"})
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert json.loads(out.stdout) == ["numpy", True]


@needs_numba
def test_dmnb_kernel_equivalence():
    X, y, rng = _matrix()
    order = rng.permutation(len(y)).astype(np.int64)
    weight = rng.random(len(y)) + 0.5
    outs = []
    for fn in _both(dmnb_passes):
        counts, prior = np.full((2, X.shape[1]), 0.5), np.full(2, 0.5)
        totals = counts.sum(axis=1)
        fn(X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data, y, weight,
           order, 3, counts, totals, prior)
        outs.append((counts, totals, prior))
    for a, b in zip(*outs):
        assert np.array_equal(a, b)


@needs_numba
def test_pegasos_kernel_equivalence():
    X, y, rng = _matrix(1)
    sign = np.where(y == 0, 1.0, -1.0)
    order = rng.permutation(len(y)).astype(np.int64)
    outs = []
    for fn in _both(pegasos_epoch):
        for loss in (0, 1):
            v, state = np.zeros(X.shape[1]), np.array([1.0, 0.0])
            for _ in range(3):
                fn(X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data, sign, order, 0.01, loss, v, state)
            outs.append(np.concatenate([v, state]))
    assert np.array_equal(outs[0], outs[2]) and np.array_equal(outs[1], outs[3])


@needs_numba
def test_smo_kernel_equivalence():
    X, y, _ = _matrix(2, n=30)
    K = ((X @ X.T).toarray() + 1.0) ** 2
    t = np.where(y == 0, 1.0, -1.0)
    outs = []
    for fn in _both(smo_solve):
        alpha, G = np.zeros(len(t)), -np.ones(len(t))
        res = fn(K, t, 1.0, 1e-3, 5000, alpha, G)
        outs.append((alpha, G, res))
    assert np.array_equal(outs[0][0], outs[1][0]) and np.array_equal(outs[0][1], outs[1][1])
    assert tuple(outs[0][2]) == tuple(outs[1][2])


@needs_numba
def test_tree_kernel_equivalence():
    X, y, _ = _matrix(3, n=60, d=10)
    csc = _csc_parts(X)
    outs = []
    for fn in _both(grow_tree):
        res = fn(*csc, X.shape[1], y, np.ones(len(y)), np.arange(len(y), dtype=np.int64), 1.0, -1, 4,
                 np.array([12345], dtype=np.int64), 1e-10)
        n = res[5]
        outs.append([a[:n] for a in res[:5]])
    for a, b in zip(*outs):
        assert np.array_equal(a, b)
    feature, threshold, left, right, dist = outs[0]
    preds = []
    for fn in _both(tree_predict):
        out = np.zeros((X.shape[0], 2))
        fn(X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data, feature, threshold, left, right, dist, out)
        preds.append(out)
    assert np.array_equal(*preds)


@needs_numba
def test_gibbs_kernel_equivalence():
    rng = np.random.default_rng(4)
    doc = np.repeat(np.arange(8), 6).astype(np.int64)
    word = rng.integers(0, 15, doc.size).astype(np.int64)
    K = 3
    z0 = rng.integers(0, K, doc.size).astype(np.int64)
    u = rng.random((4, doc.size))
    outs = []
    for fn in _both(lda_sweep):
        z = z0.copy()
        ndk = np.zeros((8, K), dtype=np.int64)
        nkw = np.zeros((K, 15), dtype=np.int64)
        np.add.at(ndk, (doc, z), 1)
        np.add.at(nkw, (z, word), 1)
        nk = nkw.sum(axis=1)
        for s in range(4):
            fn(doc, word, z, ndk, nkw, nk, 0.5, 0.01, u[s])
        outs.append((z, ndk, nkw, nk))
    for a, b in zip(*outs):
        assert np.array_equal(a, b)
    phi = rng.dirichlet(np.ones(15), K)
    folds = []
    for fn in _both(lda_fold_in_sweep):
        z = z0.copy()
        ndk = np.zeros((8, K), dtype=np.int64)
        np.add.at(ndk, (doc, z), 1)
        fn(doc, word, z, ndk, phi, 0.5, u[0])
        folds.append((z, ndk))
    assert np.array_equal(folds[0][0], folds[1][0]) and np.array_equal(folds[0][1], folds[1][1])


def test_backends_agree_end_to_end():
    """Train a few learners in two interpreters, one per backend."""
    code = """
import hashlib, json, numpy as np
from lugmis.classifiers import ModelSpec, train
from lugmis.synthetic import synthetic_dataset
from lugmis.featurize import NGramConfig, build_vocabulary, vectorize_all
from lugmis.topics import LdaConfig, train_lda
ds = synthetic_dataset(seed=2, scale=0.15)
texts = [t.lower() for t in ds.texts]
X = vectorize_all(texts, build_vocabulary(texts, NGramConfig(1)))
y = ds.labels()
out = {}
for kind in ("dmnb", "pegasos", "smo_kernel", "random_forest"):
    m = train(ModelSpec(kind, {"n_trees": 5} if kind == "random_forest" else {"epochs": 5} if kind == "pegasos" else {}), X, y, seed=1)
    out[kind] = hashlib.sha1(m.scores(X).tobytes()).hexdigest()
lda = train_lda([t.split() for t in texts], LdaConfig(num_topics=4, iterations=5))
out["lda"] = hashlib.sha1(lda.z.tobytes()).hexdigest()
print(json.dumps(out))
"""
    digests = []
    for flag in ("1", "0"):
        env = dict(os.environ, **{accel.ENV_FLAG: flag})
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        digests.append(json.loads(res.stdout.strip().splitlines()[-1]))
    assert digests[0] == digests[1]
