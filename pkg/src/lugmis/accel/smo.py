import numpy as np

from . import jit

TAU = 1e-12


@jit
def smo_solve(K, y, C, tol, max_updates, alpha, G):
    """Sequential minimal optimization of the binary SVM dual.

    Minimizes ``0.5 a'Qa - sum(a)`` with ``Q_ij = y_i y_j K_ij`` subject to
    ``y'a = 0`` and ``0 <= a <= C``. The working pair is chosen by maximal
    violation with second-order selection of the partner; non-positive
    curvature (indefinite kernels) is replaced by ``TAU``. ``alpha`` and the
    gradient ``G = Qa - 1`` are updated in place.

    Returns ``(n_updates, kkt_gap, converged)`` where ``kkt_gap`` is the
    maximal KKT violation m(a) - M(a) at exit.
    """
    n = y.shape[0]
    updates = 0
    gap = np.inf
    while True:
        # most violating i in I_up
        gmax = -np.inf
        i = -1
        for t in range(n):
            if y[t] > 0:
                if alpha[t] < C and -G[t] >= gmax:
                    gmax = -G[t]
                    i = t
            else:
                if alpha[t] > 0 and G[t] >= gmax:
                    gmax = G[t]
                    i = t
        gmax2 = -np.inf
        j = -1
        best = np.inf
        for t in range(n):
            if y[t] > 0:
                if alpha[t] > 0:
                    diff = gmax + G[t]
                    if G[t] >= gmax2:
                        gmax2 = G[t]
                    if diff > 0 and i >= 0:
                        quad = K[i, i] + K[t, t] - 2.0 * K[i, t]
                        if quad <= 0:
                            quad = TAU
                        obj = -(diff * diff) / quad
                        if obj <= best:
                            best = obj
                            j = t
            else:
                if alpha[t] < C:
                    diff = gmax - G[t]
                    if -G[t] >= gmax2:
                        gmax2 = -G[t]
                    if diff > 0 and i >= 0:
                        quad = K[i, i] + K[t, t] - 2.0 * K[i, t]
                        if quad <= 0:
                            quad = TAU
                        obj = -(diff * diff) / quad
                        if obj <= best:
                            best = obj
                            j = t
        gap = gmax + gmax2
        if gap < tol or j == -1 or i == -1:
            return updates, gap, True
        if updates >= max_updates:
            return updates, gap, False
        updates += 1

        old_ai = alpha[i]
        old_aj = alpha[j]
        Qij = y[i] * y[j] * K[i, j]
        if y[i] != y[j]:
            quad = K[i, i] + K[j, j] + 2.0 * Qij
            if quad <= 0:
                quad = TAU
            delta = (-G[i] - G[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            quad = K[i, i] + K[j, j] - 2.0 * Qij
            if quad <= 0:
                quad = TAU
            delta = (G[i] - G[j]) / quad
            s = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if s > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = s - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = s
            if s > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = s - C
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = s
        dai = alpha[i] - old_ai
        daj = alpha[j] - old_aj
        for t in range(n):
            G[t] += y[t] * (y[i] * K[t, i] * dai + y[j] * K[t, j] * daj)


@jit
def smo_rho(y, C, alpha, G):
    """Offset of the decision function ``sum_i y_i a_i K(x_i, x) - rho``."""
    ub = np.inf
    lb = -np.inf
    sum_free = 0.0
    n_free = 0
    for t in range(y.shape[0]):
        yg = y[t] * G[t]
        if alpha[t] >= C:
            if y[t] < 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        elif alpha[t] <= 0:
            if y[t] > 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        else:
            n_free += 1
            sum_free += yg
    if n_free > 0:
        return sum_free / n_free
    return (ub + lb) / 2.0
