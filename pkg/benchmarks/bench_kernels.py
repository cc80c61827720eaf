"""Time the numba and numpy flavours of each hot loop.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one CSV row per kernel: best wall time of each flavour and the
speedup.  The first numba call (compilation or cache load) is excluded.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from helperdmc import _kernels as K
from helperdmc.blockmarkov import bm_rate_feasible_region
from helperdmc.blockmarkov.sim import _tables, draw_states, encode_trial, trial_books
from helperdmc.examples import Example2Params, build_bungi_spec
from helperdmc.rng import derive


def best_of(fn, repeat: int) -> float:
    fn()
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    w = rng.dirichlet(np.ones(16) * 0.5, size=64)
    yield "blahut_arimoto 64x16", (lambda: K.ba_np(w, 1e-9, 100_000)), (lambda: K.ba_jit(w, 1e-9, 100_000))

    pmf = rng.dirichlet(np.ones(32))
    codes = rng.integers(0, 32, size=100_000)
    yield ("typicality n=1e5", (lambda: K.typical_counts_np(codes, pmf, 0.1)),
           (lambda: K.typical_counts_jit(codes, pmf, 0.1)))

    s0, s1 = rng.integers(0, 2, size=(2, 1_000_000))
    yield "ex2 help n=1e6", (lambda: K.ex2_help_np(s0, s1)), (lambda: K.ex2_help_jit(s0, s1))

    spec = build_bungi_spec(Example2Params(1))
    rates = bm_rate_feasible_region(spec, 0.4)
    tb = _tables(spec)
    n, eps = 12, 3.0
    key, books = trial_books(0, 0, n, rates)
    states = draw_states(tb, derive(key, 1), 1, n)
    enc = encode_trial(spec, tb, books, np.zeros(1, dtype=np.int64), states, derive(key, 2), eps)
    # a t the encoder cannot match forces a search over the whole codebook
    t_bad = np.zeros(n, dtype=np.int64)
    yield (f"encoder search n={n} full",
           (lambda: K.encoder_search_np(t_bad, books.key_v, tb.v_cdf, books.n_l, books.n_k, tb.vt_pmf, tb.n_t, 0.01)),
           (lambda: K.encoder_search_jit(t_bad, np.uint64(books.key_v), tb.v_cdf, books.n_l, books.n_k,
                                         tb.vt_pmf, tb.n_t, 0.01)))
    y = np.ascontiguousarray(enc.outputs[0])
    v_rows = np.ascontiguousarray(books.v_bin(tb, enc.bins[1]))
    args = (books.n_l, books.n_m, tb.cell_pmf, tb.zvy_ok)
    dims = np.asarray(tb.dims, dtype=np.int64)
    yield (f"decoder search n={n}",
           (lambda: K.decoder_search_np(y, v_rows, books.key_z, books.key_u, tb.z_cdf, tb.u_cdf, *args, tb.dims,
                                        eps)),
           (lambda: K.decoder_search_jit(y, v_rows, np.uint64(books.key_z), np.uint64(books.key_u), tb.z_cdf,
                                         tb.u_cdf, *args, dims, eps)))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not K.HAVE_NUMBA:
        print("numba is not importable; nothing to compare", file=sys.stderr)
        return 1
    print("kernel,numpy_s,numba_s,speedup")
    for name, np_fn, jit_fn in cases():
        a = best_of(np_fn, args.repeat)
        b = best_of(jit_fn, args.repeat)
        print(f"{name},{a:.6f},{b:.6f},{a / b:.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
