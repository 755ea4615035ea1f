import numpy as np
import pytest
import scipy.sparse as sp

from lugmis.accel.bayes import dmnb_passes
from lugmis.classifiers import ModelSpec, SpecError, train, train_dmnb, train_mnb


def test_mnb_toy_posterior_hand_value():
    # docs a, b (label 0) and c, d (label 1); alpha = 1
    # label 0 counts: a=2 b=2 c=1 d=1 (total 6); label 1 mirrored
    # P(0 | a) = (1/2 * 2/6) / (1/2 * 2/6 + 1/2 * 1/6) = 2/3
    X = sp.identity(4, format="csr")
    m = train_mnb(X, [0, 0, 1, 1], alpha=1.0)
    s = m.scores(X)
    assert s[0, 0] == pytest.approx(2 / 3, abs=1e-12)
    assert np.all(s[np.arange(4), [0, 0, 1, 1]] > 0.5)


def test_mnb_uniform_corpus():
    X = sp.csr_matrix(np.ones((4, 3)))
    m = train_mnb(X, [0, 1, 0, 1])
    assert np.allclose(m.scores(X), 0.5, atol=1e-12)


def test_mnb_empty_vector_gives_priors():
    X = sp.csr_matrix(np.array([[1, 0], [0, 1], [0, 1]], dtype=float))
    m = train_mnb(X, [0, 1, 1])
    assert np.allclose(m.scores(np.zeros((1, 2)))[0], [1 / 3, 2 / 3])


def test_mnb_missing_label():
    with pytest.raises(ValueError, match="label 1"):
        train_mnb(sp.identity(2, format="csr"), [0, 0])


def test_mnb_order_invariant():
    rng = np.random.default_rng(0)
    X = sp.csr_matrix(rng.integers(0, 3, (30, 8)).astype(float))
    y = rng.integers(0, 2, 30)
    p = rng.permutation(30)
    a, b = train_mnb(X, y), train_mnb(X[p], y[p])
    assert np.allclose(a.log_likelihood, b.log_likelihood, rtol=0, atol=1e-12)


def test_mnb_alpha_must_be_positive():
    with pytest.raises(SpecError):
        ModelSpec("mnb", {"alpha": 0})


def test_dmnb_zero_passes_is_smoothing_only():
    X = sp.csr_matrix(np.array([[1, 0, 2], [0, 1, 0], [0, 1, 1]], dtype=float))
    m = train_dmnb(X, [0, 1, 1], passes=0)
    assert np.allclose(m.scores(X), 0.5)
    assert np.allclose(np.exp(m.log_likelihood), 1 / 3)


def test_dmnb_single_pass_hand_trace():
    # two docs, token 0 -> label 0, token 1 -> label 1, alpha = 1, order (0, 1)
    # doc 0: p(0) = 1/2 -> g = 1/2: prior0 = 1.5, n0[0] = 1.5, total0 = 2.5
    # doc 1: p(1) ~ (1/2.5)(1/2) = 0.2, p(0) ~ (1.5/2.5)(1/2.5) = 0.24
    #        p(1) = 5/11 -> g = 6/11: prior1 = n1[1] = 17/11, total1 = 28/11
    X = sp.identity(2, format="csr")
    counts = np.ones((2, 2))
    totals = counts.sum(axis=1)
    prior = np.ones(2)
    dmnb_passes(X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data, np.array([0, 1]), np.ones(2),
                np.array([0, 1], dtype=np.int64), 1, counts, totals, prior)
    assert prior == pytest.approx([1.5, 17 / 11])
    assert counts == pytest.approx(np.array([[1.5, 1.0], [1.0, 17 / 11]]))
    assert totals == pytest.approx([2.5, 28 / 11])


def test_dmnb_separable_one_pass(toy_separable):
    X, y = toy_separable
    m = train_dmnb(X, y, passes=1, seed=3)
    assert np.array_equal(m.predict(X), y)


def _reference_dmnb(X, y, passes, alpha, order):
    # plain-python oracle of the frequency-estimate update
    D = X.toarray()
    n0 = np.full((2, D.shape[1]), alpha)
    pri = np.full(2, alpha)
    for _ in range(passes):
        for i in order:
            lp = [np.log(pri[c] / pri.sum()) + sum(D[i, j] * np.log(n0[c, j] / n0[c].sum())
                                                   for j in range(D.shape[1])) for c in (0, 1)]
            p = np.exp(lp - np.max(lp))
            p /= p.sum()
            g = 1 - p[y[i]]
            pri[y[i]] += g
            n0[y[i]] += g * D[i]
    return n0, pri


def test_dmnb_matches_reference():
    rng = np.random.default_rng(2)
    X = sp.csr_matrix(rng.integers(0, 2, (25, 6)).astype(float))
    y = rng.integers(0, 2, 25)
    y[:2] = [0, 1]
    m = train_dmnb(X, y, passes=2, alpha=0.5, seed=11)
    order = np.random.default_rng(11).permutation(25)
    n0, pri = _reference_dmnb(X, y, 2, 0.5, order)
    assert np.allclose(m.log_likelihood, np.log(n0 / n0.sum(axis=1, keepdims=True)), atol=1e-10)
    assert np.allclose(m.log_prior, np.log(pri / pri.sum()), atol=1e-10)


def test_dmnb_deterministic_given_seed():
    rng = np.random.default_rng(4)
    X = sp.csr_matrix(rng.integers(0, 2, (40, 10)).astype(float))
    y = rng.integers(0, 2, 40)
    a = train(ModelSpec("dmnb", {"passes": 3}), X, y, seed=5)
    b = train(ModelSpec("dmnb", {"passes": 3}), X, y, seed=5)
    assert np.array_equal(a.log_likelihood, b.log_likelihood)


def test_sample_weights_equal_duplication():
    rng = np.random.default_rng(3)
    X = sp.csr_matrix(rng.integers(0, 3, (10, 5)).astype(float))
    y = np.array([0, 1] * 5)
    w = np.array([2, 1, 1, 1, 3, 1, 1, 1, 1, 1], dtype=float)
    idx = np.repeat(np.arange(10), w.astype(int))
    a = train_mnb(X, y, sample_weight=w)
    b = train_mnb(X[idx], y[idx])
    assert np.allclose(a.log_likelihood, b.log_likelihood) and np.allclose(a.log_prior, b.log_prior)
