import math

import numpy as np

from . import jit

HINGE = 0
LOG = 1


@jit
def pegasos_epoch(indptr, indices, data, sign, order, lam, loss, v, state):
    """One Pegasos epoch over ``order``; updates ``v`` and ``state`` in place.

    The weight vector is kept as ``w = state[0] * v`` so the shrink step
    ``w <- (1 - 1/t) w`` costs O(1). ``state[1]`` is the step counter t.
    The last column of the design matrix is the always-on bias feature.
    """
    scale = state[0]
    t = state[1]
    for ii in range(order.shape[0]):
        i = order[ii]
        lo = indptr[i]
        hi = indptr[i + 1]
        t += 1.0
        eta = 1.0 / (lam * t)
        dot = 0.0
        for q in range(lo, hi):
            dot += v[indices[q]] * data[q]
        margin = sign[i] * scale * dot
        if loss == 0:
            g = 1.0 if margin < 1.0 else 0.0
        else:
            if margin > 0:
                em = math.exp(-margin)
                g = em / (1.0 + em)
            else:
                g = 1.0 / (1.0 + math.exp(margin))
        shrink = 1.0 - eta * lam
        if shrink <= 0.0:
            # first step: w collapses to zero
            v[:] = 0.0
            scale = 1.0
        else:
            scale *= shrink
        if g != 0.0:
            step = eta * g * sign[i] / scale
            for q in range(lo, hi):
                v[indices[q]] += step * data[q]
        if scale < 1e-9:
            v *= scale
            scale = 1.0
    state[0] = scale
    state[1] = t
