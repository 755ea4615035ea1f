import itertools

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.optimize import minimize_scalar

from lugmis.accel.smo import smo_solve
from lugmis.classifiers import KernelConfig, ModelSpec, kernel_eval, train, train_logistic_ridge, train_pegasos, train_smo
from lugmis.classifiers.linear import pegasos_objective
from lugmis.featurize import SparseVector


def test_kernel_examples():
    sig = KernelConfig("sigmoid", gamma=0.4, coef0=0.0)
    x = SparseVector.from_dense([1.0, 1.0])
    zero = SparseVector.from_dense([0.0, 0.0])
    assert kernel_eval(sig, x, zero) == 0.0
    assert kernel_eval(sig, x, x) == pytest.approx(0.664037, abs=1e-6)
    assert kernel_eval(sig, x, x) == pytest.approx(np.tanh(0.8), abs=1e-15)
    poly = KernelConfig("polynomial", gamma=1.0, coef0=1.0, degree=2)
    assert kernel_eval(poly, SparseVector.from_dense([1.0, 0]), SparseVector.from_dense([1.0, 0])) == 4.0
    with pytest.raises(ValueError):
        kernel_eval(poly, x, SparseVector.from_dense([1.0]))
    with pytest.raises(ValueError):
        KernelConfig("polynomial", gamma=0)


def test_kernel_symmetry():
    rng = np.random.default_rng(0)
    for kind in ("linear", "polynomial", "sigmoid"):
        cfg = KernelConfig(kind, gamma=0.7, coef0=-0.3, degree=3)
        for _ in range(20):
            a = SparseVector.from_dense(rng.integers(0, 3, 6).astype(float))
            b = SparseVector.from_dense(rng.integers(0, 3, 6).astype(float))
            assert kernel_eval(cfg, a, b) == kernel_eval(cfg, b, a)


def test_sigmoid_degree_is_ignored():
    a = ModelSpec("smo_kernel", {"kernel": "sigmoid", "gamma": 0.4, "coef0": 0.0, "degree": 5})
    b = ModelSpec("smo_kernel", {"kernel": "sigmoid", "gamma": 0.4, "coef0": 0.0, "degree": 1})
    X = sp.csr_matrix(np.array([[1, 0, 1], [0, 1, 1], [1, 1, 0], [0, 0, 1]], dtype=float))
    y = [0, 1, 0, 1]
    assert np.array_equal(train(a, X, y).scores(X), train(b, X, y).scores(X))


def test_logistic_separable(toy_separable):
    X, y = toy_separable
    m = train_logistic_ridge(X, y, lam=0.1)
    assert np.array_equal(m.predict(X), y) and m.converged


def test_logistic_symmetric_feature_gets_zero_weight():
    X = sp.csr_matrix(np.array([[1, 1], [1, 0], [1, 1], [1, 0]], dtype=float))
    y = [0, 0, 1, 1]
    m = train_logistic_ridge(X, y, lam=1.0)
    assert abs(m.weights[0]) < 1e-4 and abs(m.weights[1]) < 1e-4


def test_logistic_two_point_matches_scalar_oracle():
    # x=+1 (label 0, sign +1), x=-1 (label 1); by symmetry b = 0 and
    # w minimizes w^2/2 + 2 log(1 + exp(-w))
    X = sp.csr_matrix(np.array([[1.0], [-1.0]]))
    m = train_logistic_ridge(X, [0, 1], lam=1.0, tol=1e-10)
    f = lambda w: 0.5 * w * w + 2 * np.log1p(np.exp(-w))
    grid = np.linspace(0, 3, 300001)
    w_grid = grid[np.argmin(f(grid))]
    w_ref = minimize_scalar(f, bounds=(0, 3), method="bounded", options={"xatol": 1e-12}).x
    assert m.weights[0] == pytest.approx(w_grid, abs=2e-5)
    assert m.weights[0] == pytest.approx(w_ref, abs=1e-6)
    assert abs(m.bias) < 1e-6


def test_logistic_nonconvergence_flag():
    rng = np.random.default_rng(0)
    X = sp.csr_matrix(rng.random((50, 20)))
    y = rng.integers(0, 2, 50)
    m = train_logistic_ridge(X, y, lam=1e-3, max_iter=1)
    assert m.converged is False
    assert np.allclose(m.scores(X).sum(axis=1), 1.0)


def test_pegasos_separable(separable_points):
    X, y = separable_points
    m = train_pegasos(X, y, "hinge", lam=1e-4, epochs=200, seed=0)
    assert np.array_equal(m.predict(X), y)


def test_pegasos_single_label():
    X = sp.csr_matrix(np.random.default_rng(0).random((10, 3)))
    for label in (0, 1):
        m = train_pegasos(X, np.full(10, label), lam=0.01, epochs=20, seed=1)
        assert np.all(m.predict(X) == label)


def test_pegasos_deterministic():
    X = sp.csr_matrix(np.random.default_rng(0).random((30, 4)))
    y = np.arange(30) % 2
    a = train_pegasos(X, y, "log", 1e-3, 10, seed=9)
    b = train_pegasos(X, y, "log", 1e-3, 10, seed=9)
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias
    assert a.probabilistic


def test_pegasos_objective_trend():
    rng = np.random.default_rng(1)
    X = sp.csr_matrix(rng.random((60, 5)))
    y = (X.toarray() @ np.array([1, -1, 0.5, 0, -0.5]) > 0).astype(int)
    lam = 0.01
    curves = []
    for seed in range(10):
        vals = []
        train_pegasos(X, y, "hinge", lam, 30, seed=seed,
                      callback=lambda e, w, b: vals.append(pegasos_objective(X, y, w, b, lam)))
        curves.append(vals)
    mean = np.mean(curves, axis=0)
    assert mean[-1] <= mean[0]


def test_smo_two_points_linear():
    X = sp.csr_matrix(np.array([[1.0], [-1.0]]))
    m = train_smo(X, [0, 1], KernelConfig("linear"), C=10.0, tol=1e-6)
    assert m.info.converged
    assert m.support.shape[0] == 2
    assert np.allclose(np.abs(m.coef), 0.5, atol=1e-6)
    assert m.decision_function(np.array([[0.0]]))[0] == pytest.approx(0.0, abs=1e-6)


def _dual(alpha, t, K):
    v = alpha * t
    return alpha.sum() - 0.5 * v @ K @ v


def test_smo_xor_polynomial_against_grid():
    P = np.array([[1, 1], [-1, -1], [1, -1], [-1, 1]], dtype=float)
    y = np.array([0, 0, 1, 1])
    t = np.where(y == 0, 1.0, -1.0)
    cfg = KernelConfig("polynomial", 1.0, 1.0, 2)
    K = (P @ P.T + 1.0) ** 2
    C = 1.0
    alpha, G = np.zeros(4), -np.ones(4)
    _, gap, ok = smo_solve(K, t, C, 1e-6, 10000, alpha, G)
    assert ok
    # brute force over a multiplier grid restricted to sum(alpha * t) = 0
    g = np.linspace(0, C, 41)
    best = -np.inf
    for a0, a1, a2 in itertools.product(g, g, g):
        a3 = a0 + a1 - a2
        if 0 <= a3 <= C:
            best = max(best, _dual(np.array([a0, a1, a2, a3]), t, K))
    assert _dual(alpha, t, K) >= best - 1e-6
    m = train_smo(sp.csr_matrix(P), y, cfg, C=C, tol=1e-6)
    assert np.array_equal(m.predict(P), y)


def test_smo_separable_and_kkt(separable_points):
    X, y = separable_points
    t = np.where(y == 0, 1.0, -1.0)
    C, tol = 100.0, 1e-3
    K = (X @ X.T).toarray()
    alpha, G = np.zeros(len(y)), -np.ones(len(y))
    _, gap, ok = smo_solve(K, t, C, tol, 100 * len(y), alpha, G)
    assert ok and gap <= tol
    assert np.all(alpha >= 0) and np.all(alpha <= C)
    assert abs(alpha @ t) <= tol
    m = train_smo(X, y, KernelConfig("linear"), C=C, tol=tol)
    assert np.array_equal(m.predict(X), y)


def test_smo_sigmoid_terminates_with_flag():
    rng = np.random.default_rng(0)
    X = sp.csr_matrix(rng.random((40, 6)) * 3)
    y = rng.integers(0, 2, 40)
    m = train_smo(X, y, KernelConfig("sigmoid", 2.0, -1.0), C=10.0, tol=1e-8, max_updates=50)
    assert isinstance(m.converged, bool)
    assert m.info.n_updates <= 50
    assert np.allclose(m.scores(X).sum(axis=1), 1.0)


def test_smo_calibrated_probabilities():
    rng = np.random.default_rng(0)
    X = sp.csr_matrix(rng.random((40, 6)))
    y = (X.toarray()[:, 0] > 0.5).astype(int)
    m = train_smo(X, y, KernelConfig("polynomial", 1.0, 1.0, 2), calibrate=True)
    s = m.scores(X)
    assert m.probabilistic and np.all(s >= 0) and np.allclose(s.sum(axis=1), 1.0, atol=1e-9)
