import numpy as np

from . import jit


@jit
def _draw(p, n_topics, target):
    k = 0
    while k < n_topics - 1 and p[k] <= target:
        k += 1
    return k


@jit
def lda_sweep(doc, word, z, ndk, nkw, nk, alpha, beta, u):
    """One collapsed Gibbs sweep over all tokens, counts updated in place.

    ``u`` holds one uniform draw per token; drawing them outside the kernel
    keeps the numba and numpy paths on the same random stream.
    """
    n_topics = nk.shape[0]
    vbeta = nkw.shape[1] * beta
    p = np.empty(n_topics)
    for i in range(doc.shape[0]):
        d = doc[i]
        v = word[i]
        k = z[i]
        ndk[d, k] -= 1
        nkw[k, v] -= 1
        nk[k] -= 1
        total = 0.0
        for t in range(n_topics):
            total += (ndk[d, t] + alpha) * (nkw[t, v] + beta) / (nk[t] + vbeta)
            p[t] = total
        k = _draw(p, n_topics, u[i] * total)
        z[i] = k
        ndk[d, k] += 1
        nkw[k, v] += 1
        nk[k] += 1


@jit
def lda_fold_in_sweep(doc, word, z, ndk, phi, alpha, u):
    """Gibbs sweep for held-out documents against a frozen topic-word matrix."""
    n_topics = phi.shape[0]
    p = np.empty(n_topics)
    for i in range(doc.shape[0]):
        d = doc[i]
        v = word[i]
        k = z[i]
        ndk[d, k] -= 1
        total = 0.0
        for t in range(n_topics):
            total += (ndk[d, t] + alpha) * phi[t, v]
            p[t] = total
        k = _draw(p, n_topics, u[i] * total)
        z[i] = k
        ndk[d, k] += 1
