"""Time the hot kernels under the numba and pure-numpy backends.

Each backend runs in its own interpreter (the backend is fixed at import
time by LUGMIS_NUMBA). Numba timings exclude the first, compiling call.
Outputs of both backends are hashed and compared.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import hashlib
import json
import os
import subprocess
import sys
import time

import numpy as np


def workloads():
    from lugmis.accel.bayes import dmnb_passes
    from lugmis.accel.gibbs import lda_sweep
    from lugmis.accel.sgd import pegasos_epoch
    from lugmis.accel.smo import smo_solve
    from lugmis.accel.tree import grow_tree
    from lugmis.classifiers.base import sign_from_labels
    from lugmis.classifiers.kernels import KernelConfig, gram
    from lugmis.classifiers.tree import _csc_parts
    from lugmis.featurize import NGramConfig, build_vocabulary, vectorize_all
    from lugmis.preprocess import CleaningConfig, clean_text
    from lugmis.synthetic import synthetic_dataset
    from lugmis.topics import encode, init_lda, LdaConfig

    ds = synthetic_dataset(seed=0, signal=0.12)
    texts = [clean_text(t, CleaningConfig.all_on()) for t in ds.texts]
    X = vectorize_all(texts, build_vocabulary(texts, NGramConfig(2)))
    y = ds.labels()
    n, d = X.shape
    ip, ix = X.indptr.astype(np.int64), X.indices.astype(np.int64)
    order = np.random.default_rng(0).permutation(n).astype(np.int64)

    def dmnb():
        counts = np.ones((2, d))
        totals = counts.sum(axis=1)
        prior = np.ones(2)
        dmnb_passes(ip, ix, X.data, y, np.ones(n), order, 3, counts, totals, prior)
        return counts

    def pegasos():
        v = np.zeros(d)
        state = np.array([1.0, 0.0])
        sign = sign_from_labels(y)
        for _ in range(5):
            pegasos_epoch(ip, ix, X.data, sign, order, 1e-4, 0, v, state)
        return v * state[0]

    m = 250
    K = gram(KernelConfig("polynomial", 1.0, 1.0, 2), X[:m], X[:m])
    t = sign_from_labels(y[:m])

    def smo():
        alpha = np.zeros(m)
        G = -np.ones(m)
        smo_solve(K, t, 1.0, 1e-3, 3000, alpha, G)
        return alpha

    csc = _csc_parts(X)

    def tree():
        out = grow_tree(*csc, d, y, np.ones(n), np.arange(n, dtype=np.int64), 2.0, -1, 0,
                        np.array([1], dtype=np.int64), 1e-10)
        return out[0][: out[5]]

    docs = [t.split() for t in texts]
    enc = encode(docs)
    base = init_lda(docs, LdaConfig(num_topics=10, iterations=1))
    u = np.random.default_rng(1).random((5, enc.word.size))

    def lda():
        z, ndk, nkw = base.z.copy(), base.ndk.copy(), base.nkw.copy()
        nk = nkw.sum(axis=1)
        for s in range(5):
            lda_sweep(enc.doc, enc.word, z, ndk, nkw, nk, 5.0, 0.01, u[s])
        return z

    return {"dmnb_passes x3": dmnb, "pegasos_epoch x5": pegasos, "smo_solve n=250": smo,
            "grow_tree": tree, "lda_sweep x5": lda}


def child(repeat):
    from lugmis.accel import backend

    out = {}
    for name, fn in workloads().items():
        result = fn()  # warm-up (JIT compile under numba)
        times = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        digest = hashlib.sha1(np.ascontiguousarray(result).tobytes()).hexdigest()[:12]
        out[name] = {"seconds": min(times), "digest": digest}
    print(json.dumps({"backend": backend(), "results": out}))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        child(args.repeat)
        return
    runs = {}
    for flag in ("1", "0"):
        env = dict(os.environ, LUGMIS_NUMBA=flag)
        proc = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(args.repeat)],
                              env=env, capture_output=True, text=True, check=True)
        res = json.loads(proc.stdout.strip().splitlines()[-1])
        runs[res["backend"]] = res["results"]
    fast, slow = runs["numba"], runs["numpy"]
    print(f"{'kernel':<20}{'numba s':>12}{'numpy s':>12}{'speedup':>10}  outputs")
    for name in fast:
        a, b = fast[name], slow[name]
        same = "equal" if a["digest"] == b["digest"] else "DIFFER"
        print(f"{name:<20}{a['seconds']:>12.4f}{b['seconds']:>12.4f}{b['seconds'] / a['seconds']:>9.1f}x  {same}")


if __name__ == "__main__":
    main()
