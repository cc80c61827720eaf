"""The numba and numpy flavours of every hot loop must agree."""
import os
import subprocess
import sys

import numpy as np
import pytest

from helperdmc import _kernels as K
from helperdmc.blockmarkov import bm_rate_feasible_region
from helperdmc.blockmarkov.sim import _tables, codebook_size, draw_states, encode_trial, trial_books
from helperdmc.rng import derive

pytestmark = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not importable")


def test_flavour_selected_by_environment():
    code = "from helperdmc import _kernels as K; print(K.USE_NUMBA, K.ba is K.ba_np)"
    env = dict(os.environ, HELPERDMC_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "True"]
    env["HELPERDMC_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["True", "False"]


@pytest.mark.parametrize("seed", range(20))
def test_ba_flavours_agree_within_gap(seed):
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(4) * 0.5, size=rng.integers(2, 6))
    r1, lo1, up1, _ = K.ba_np(w, 1e-10, 100_000)
    r2, lo2, up2, _ = K.ba_jit(w, 1e-10, 100_000)
    assert up1 - lo1 <= 1e-10 and up2 - lo2 <= 1e-10
    assert abs(lo1 - lo2) <= 2e-10


@pytest.mark.parametrize("seed", range(10))
def test_typicality_flavours_identical(seed):
    rng = np.random.default_rng(seed)
    pmf = rng.dirichlet(np.ones(5))
    pmf[rng.integers(5)] = 0
    pmf /= pmf.sum()
    for _ in range(20):
        codes = rng.integers(0, 5, size=rng.integers(1, 60))
        for eps in (0.1, 0.5, 2.0):
            assert K.typical_counts_np(codes, pmf, eps) == K.typical_counts_jit(codes, pmf, eps)


def test_ex2_help_flavours_identical():
    rng = np.random.default_rng(0)
    s0, s1 = rng.integers(0, 2, size=(2, 500))
    assert np.array_equal(K.ex2_help_np(s0, s1), K.ex2_help_jit(s0, s1))


@pytest.mark.parametrize("n", [6, 8, 10])
@pytest.mark.parametrize("eps", [0.5, 3.0])
def test_search_flavours_identical(bungi1, n, eps):
    rates = bm_rate_feasible_region(bungi1, 0.4)
    tb = _tables(bungi1)
    hits = 0
    for trial in range(6):
        key, books = trial_books(5, trial, n, rates)
        states = draw_states(tb, derive(key, 99), 1, n)
        enc = encode_trial(bungi1, tb, books, np.array([trial % books.n_m]), states, derive(key, 98), eps)
        t = np.ascontiguousarray(enc.help[0])
        enc_np = K.encoder_search_np(t, books.key_v, tb.v_cdf, books.n_l, books.n_k, tb.vt_pmf, tb.n_t, eps)
        enc_jit = K.encoder_search_jit(t, np.uint64(books.key_v), tb.v_cdf, books.n_l, books.n_k,
                                       tb.vt_pmf, tb.n_t, eps)
        assert tuple(enc_np) == tuple(enc_jit)
        # decode the real output against the bin the encoder picked, and a random output
        v_rows = np.ascontiguousarray(books.v_bin(tb, enc.bins[1]))
        noise = np.random.default_rng(trial).integers(0, tb.dims[3], size=n)
        for y in (np.ascontiguousarray(enc.outputs[0]), noise):
            args = (books.n_l, books.n_m, tb.cell_pmf, tb.zvy_ok)
            dec_np = K.decoder_search_np(y, v_rows, books.key_z, books.key_u, tb.z_cdf, tb.u_cdf, *args,
                                         tb.dims, eps)
            dec_jit = K.decoder_search_jit(y, v_rows, np.uint64(books.key_z), np.uint64(books.key_u), tb.z_cdf,
                                           tb.u_cdf, *args, np.asarray(tb.dims, dtype=np.int64), eps)
            assert tuple(dec_np) == tuple(dec_jit)
            hits += dec_np[0] >= 0
    if eps == 3.0:
        assert hits > 0  # the comparison covered successful searches too


def test_codebook_size_floor():
    assert codebook_size(8, 0.5) == 16
    assert codebook_size(10, 0.0) == 1
    assert codebook_size(3, 0.1) == 1
