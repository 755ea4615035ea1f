import math

import numpy as np

from . import jit


@jit
def dmnb_passes(indptr, indices, data, y, weight, order, passes, counts, totals, prior):
    """Discriminative frequency estimate updates, in place.

    For each instance (in ``order``) the current model's probability of the
    true class is computed and ``1 - p`` times the instance weight is added
    to that class's prior count and, scaled by the feature values, to its
    word counts. ``counts`` is (2, d), ``totals`` its row sums, ``prior``
    the class counts.
    """
    lp = np.empty(2)
    for _ in range(passes):
        for ii in range(order.shape[0]):
            i = order[ii]
            lo = indptr[i]
            hi = indptr[i + 1]
            for c in range(2):
                s = math.log(prior[c])
                lt = math.log(totals[c])
                for q in range(lo, hi):
                    s += data[q] * (math.log(counts[c, indices[q]]) - lt)
                lp[c] = s
            top = max(lp[0], lp[1])
            e0 = math.exp(lp[0] - top)
            e1 = math.exp(lp[1] - top)
            c = y[i]
            p_true = (e0 if c == 0 else e1) / (e0 + e1)
            g = (1.0 - p_true) * weight[i]
            if g == 0.0:
                continue
            prior[c] += g
            for q in range(lo, hi):
                inc = g * data[q]
                counts[c, indices[q]] += inc
                totals[c] += inc
