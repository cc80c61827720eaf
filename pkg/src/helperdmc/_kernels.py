"""Hot loops, each in a numba-compiled and a pure-numpy flavour.

The flavour used by the public API is picked once at import time: numba
when it imports and ``HELPERDMC_NUMBA`` is not set to ``0``/``false``/``off``.
Both flavours are always importable under their ``*_jit``/``*_np`` names so
the test-suite and ``benchmarks/`` can compare them directly.  The codebook
and search kernels return bit-identical results (same hash stream, same
comparisons); the Blahut-Arimoto flavours sum in different orders, so they
agree to within the requested gap rather than bit for bit.
"""
from __future__ import annotations

import os

import numpy as np

from .rng import GOLDEN, INV53, MIX1, MIX2, categorical, counter_u64, to_unit

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("HELPERDMC_NUMBA", "1").strip().lower() not in (
    "0",
    "false",
    "off",
    "no",
)

# --------------------------------------------------------------------------
# Blahut-Arimoto
# --------------------------------------------------------------------------


MU_MAX = float(1 << 30)


def _ba_eval_np(w, neg_ent, r):
    q = r @ w
    q_log = np.log2(np.where(q > 0, q, 1.0))
    d = neg_ent - w @ q_log
    return d, float(r @ d), float(d.max())


def ba_np(w: np.ndarray, tol: float, max_iter: int):
    """Returns ``(r, lower, upper, iterations)`` for the row-stochastic ``w``.

    The update ``r <- r 2^(mu D)`` uses an adaptive exponent ``mu >= 1``:
    it grows while the lower bound keeps increasing and falls back to the
    plain (always monotone) ``mu = 1`` step otherwise.  This matters for
    nearly useless channels, where the plain step crawls.
    """
    m = w.shape[0]
    pos = w > 0
    w_log = np.where(pos, np.log2(np.where(pos, w, 1.0)), 0.0)
    neg_ent = (w * w_log).sum(axis=1)
    r = np.full(m, 1.0 / m)
    d, lower, upper = _ba_eval_np(w, neg_ent, r)
    mu = 1.0
    it = 1
    while upper - lower > tol and it < max_iter:
        it += 1
        r_new = r * np.exp2(mu * (d - upper))
        r_new /= r_new.sum()
        d_new, lo_new, up_new = _ba_eval_np(w, neg_ent, r_new)
        if mu > 1.0 and lo_new < lower:
            mu = 1.0
            continue
        r, d, lower, upper = r_new, d_new, lo_new, up_new
        mu = min(2.0 * mu, MU_MAX)
    return r, max(lower, 0.0), max(upper, 0.0), it


# --------------------------------------------------------------------------
# robust typicality
# --------------------------------------------------------------------------


def typical_counts_np(codes: np.ndarray, pmf: np.ndarray, eps: float) -> bool:
    n = codes.shape[-1]
    counts = np.bincount(codes, minlength=pmf.size)
    freq = counts / n
    zero = pmf == 0
    if np.any(counts[zero] > 0):
        return False
    return bool(np.all(np.abs(freq[~zero] - pmf[~zero]) <= eps * pmf[~zero]))


def _typical_rows_np(codes: np.ndarray, pmf: np.ndarray, eps: float) -> np.ndarray:
    """Row-wise robust typicality of a ``(rows, n)`` array of cell codes."""
    rows, n = codes.shape
    ncell = pmf.size
    flat = codes + (np.arange(rows, dtype=np.int64) * ncell)[:, None]
    counts = np.bincount(flat.ravel(), minlength=rows * ncell).reshape(rows, ncell)
    freq = counts / n
    zero = pmf == 0
    bad_zero = (counts[:, zero] > 0).any(axis=1)
    ok = (np.abs(freq[:, ~zero] - pmf[~zero]) <= eps * pmf[~zero]).all(axis=1)
    return ok & ~bad_zero


# --------------------------------------------------------------------------
# lazily generated codebooks
#
# entry i of codeword (a, b) in a book with nb columns is drawn from the
# stream ``key`` at position (a * nb + b) * n + i.
# --------------------------------------------------------------------------


def codewords_np(key: int, a: np.ndarray, b: np.ndarray, nb: int, n: int, cdf: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.uint64).reshape(-1)
    b = np.asarray(b, dtype=np.uint64).reshape(-1)
    base = (a * np.uint64(nb) + b) * np.uint64(n)
    pos = base[:, None] + np.arange(n, dtype=np.uint64)[None, :]
    return categorical(cdf, to_unit(counter_u64(key, pos)))


def cond_codewords_np(key, a, b, nb, n, cdf_rows: np.ndarray, parent: np.ndarray) -> np.ndarray:
    """Like :func:`codewords_np` but entry i uses ``cdf_rows[parent[..., i]]``."""
    a = np.asarray(a, dtype=np.uint64).reshape(-1)
    b = np.asarray(b, dtype=np.uint64).reshape(-1)
    base = (a * np.uint64(nb) + b) * np.uint64(n)
    pos = base[:, None] + np.arange(n, dtype=np.uint64)[None, :]
    f = to_unit(counter_u64(key, pos))
    return categorical(cdf_rows[np.broadcast_to(parent, f.shape)], f)


_CHUNK = 4096


def encoder_search_np(t, key_v, v_cdf, n_l, n_k, vt_pmf, n_t, eps):
    """First (l, k) in lexicographic order with v(l, k) typical with ``t``."""
    n = t.size
    total = n_l * n_k
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        ls, ks = flat // n_k, flat % n_k
        v = codewords_np(key_v, ls, ks, n_k, n, v_cdf)
        ok = _typical_rows_np(v * n_t + t[None, :], vt_pmf, eps)
        hit = np.flatnonzero(ok)
        if hit.size:
            return int(ls[hit[0]]), int(ks[hit[0]])
    return -1, -1


def decoder_search_np(y, v_rows, key_z, key_u, z_cdf, u_cdf, n_l, n_m, cell_pmf, zvy_ok, dims, eps):
    """First (l, m, k) with (z(l), u(l, m), v_rows[k], y) jointly typical."""
    n_z, n_u, n_v, n_y = dims
    n = y.size
    n_k = v_rows.shape[0]
    for start in range(0, n_l, _CHUNK):
        ls = np.arange(start, min(start + _CHUNK, n_l), dtype=np.int64)
        z = codewords_np(key_z, ls, np.zeros_like(ls), 1, n, z_cdf)
        # (chunk, k, n): necessary condition, exact pruning
        sup = zvy_ok[(z[:, None, :] * n_v + v_rows[None, :, :]) * n_y + y[None, None, :]].all(axis=2)
        for li in np.flatnonzero(sup.any(axis=1)):
            ks = np.flatnonzero(sup[li])
            zl = z[li]
            ms = np.arange(n_m, dtype=np.int64)
            u = cond_codewords_np(key_u, np.full(n_m, ls[li]), ms, n_m, n, u_cdf, zl[None, :])
            base = zl[None, :] * n_u + u  # (m, n)
            for mi in range(n_m):
                codes = ((base[mi][None, :] * n_v + v_rows[ks]) * n_y) + y[None, :]
                ok = _typical_rows_np(codes, cell_pmf, eps)
                hit = np.flatnonzero(ok)
                if hit.size:
                    return int(ls[li]), mi, int(ks[hit[0]])
    return -1, -1, -1


def ex2_help_np(s0: np.ndarray, s1: np.ndarray) -> np.ndarray:
    """Help sequence T_i = S_i^(T_{i-1}) with T_0 = 0 (index 0 is T_0)."""
    n = s0.size
    t = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        t[i + 1] = s1[i] if t[i] else s0[i]
    return t


# --------------------------------------------------------------------------
# numba flavour
# --------------------------------------------------------------------------

if HAVE_NUMBA:
    _G = np.uint64(GOLDEN)
    _M1 = np.uint64(MIX1)
    _M2 = np.uint64(MIX2)

    @njit(cache=True)
    def _mix(z):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))

    @njit(cache=True)
    def _unit(key, pos):
        u = _mix(key + (pos + np.uint64(1)) * _G)
        return np.float64(u >> np.uint64(11)) * INV53

    @njit(cache=True)
    def _cat(cdf, f):
        idx = 0
        k = cdf.shape[0]
        while idx < k - 1 and f >= cdf[idx]:
            idx += 1
        return idx

    @njit(cache=True)
    def _ba_eval_jit(w, neg_ent, r, q, d):
        m, ny = w.shape
        q[:] = 0.0
        for x in range(m):
            rx = r[x]
            for y in range(ny):
                q[y] += rx * w[x, y]
        lower = 0.0
        upper = -1e300
        for x in range(m):
            acc = neg_ent[x]
            for y in range(ny):
                if w[x, y] > 0:
                    acc -= w[x, y] * np.log2(q[y])
            d[x] = acc
            lower += r[x] * acc
            if acc > upper:
                upper = acc
        return lower, upper

    @njit(cache=True)
    def ba_jit(w, tol, max_iter):
        m, ny = w.shape
        neg_ent = np.zeros(m)
        for x in range(m):
            for y in range(ny):
                if w[x, y] > 0:
                    neg_ent[x] += w[x, y] * np.log2(w[x, y])
        r = np.full(m, 1.0 / m)
        q = np.zeros(ny)
        d = np.zeros(m)
        r_new = np.zeros(m)
        d_new = np.zeros(m)
        lower, upper = _ba_eval_jit(w, neg_ent, r, q, d)
        mu = 1.0
        it = 1
        while upper - lower > tol and it < max_iter:
            it += 1
            tot = 0.0
            for x in range(m):
                r_new[x] = r[x] * np.exp2(mu * (d[x] - upper))
                tot += r_new[x]
            for x in range(m):
                r_new[x] /= tot
            lo_new, up_new = _ba_eval_jit(w, neg_ent, r_new, q, d_new)
            if mu > 1.0 and lo_new < lower:
                mu = 1.0
                continue
            r[:] = r_new
            d[:] = d_new
            lower, upper = lo_new, up_new
            mu = min(2.0 * mu, MU_MAX)
        return r, max(lower, 0.0), max(upper, 0.0), it

    @njit(cache=True)
    def typical_counts_jit(codes, pmf, eps):
        n = codes.shape[0]
        counts = np.zeros(pmf.shape[0], dtype=np.int64)
        for i in range(n):
            counts[codes[i]] += 1
        for c in range(pmf.shape[0]):
            p = pmf[c]
            if p == 0.0:
                if counts[c] > 0:
                    return False
            elif abs(counts[c] / n - p) > eps * p:
                return False
        return True

    @njit(cache=True)
    def encoder_search_jit(t, key_v, v_cdf, n_l, n_k, vt_pmf, n_t, eps):
        n = t.shape[0]
        key = np.uint64(key_v)
        codes = np.zeros(n, dtype=np.int64)
        for l in range(n_l):
            for k in range(n_k):
                base = (np.uint64(l) * np.uint64(n_k) + np.uint64(k)) * np.uint64(n)
                alive = True
                for i in range(n):
                    v = _cat(v_cdf, _unit(key, base + np.uint64(i)))
                    c = v * n_t + t[i]
                    if vt_pmf[c] == 0.0:
                        alive = False
                        break
                    codes[i] = c
                if alive and typical_counts_jit(codes, vt_pmf, eps):
                    return l, k
        return -1, -1

    @njit(cache=True)
    def decoder_search_jit(y, v_rows, key_z, key_u, z_cdf, u_cdf, n_l, n_m, cell_pmf, zvy_ok, dims, eps):
        n_z, n_u, n_v, n_y = dims[0], dims[1], dims[2], dims[3]
        n = y.shape[0]
        n_k = v_rows.shape[0]
        kz = np.uint64(key_z)
        ku = np.uint64(key_u)
        z = np.zeros(n, dtype=np.int64)
        u = np.zeros(n, dtype=np.int64)
        codes = np.zeros(n, dtype=np.int64)
        k_ok = np.zeros(n_k, dtype=np.bool_)
        for l in range(n_l):
            base = np.uint64(l) * np.uint64(n)
            k_ok[:] = True
            alive = n_k
            # draw z(l) one entry at a time; drop k as soon as (z, v, y) leaves the support
            for i in range(n):
                z[i] = _cat(z_cdf, _unit(kz, base + np.uint64(i)))
                for k in range(n_k):
                    if k_ok[k] and not zvy_ok[(z[i] * n_v + v_rows[k, i]) * n_y + y[i]]:
                        k_ok[k] = False
                        alive -= 1
                if alive == 0:
                    break
            if alive == 0:
                continue
            for m in range(n_m):
                ubase = (np.uint64(l) * np.uint64(n_m) + np.uint64(m)) * np.uint64(n)
                for i in range(n):
                    u[i] = _cat(u_cdf[z[i]], _unit(ku, ubase + np.uint64(i)))
                for k in range(n_k):
                    if not k_ok[k]:
                        continue
                    for i in range(n):
                        codes[i] = ((z[i] * n_u + u[i]) * n_v + v_rows[k, i]) * n_y + y[i]
                    if typical_counts_jit(codes, cell_pmf, eps):
                        return l, m, k
        return -1, -1, -1

    @njit(cache=True)
    def ex2_help_jit(s0, s1):
        n = s0.shape[0]
        t = np.zeros(n + 1, dtype=np.int64)
        for i in range(n):
            t[i + 1] = s1[i] if t[i] else s0[i]
        return t


if USE_NUMBA:
    ba = ba_jit
    typical_counts = typical_counts_jit

    def encoder_search(t, key_v, v_cdf, n_l, n_k, vt_pmf, n_t, eps):
        return encoder_search_jit(t, np.uint64(key_v), v_cdf, n_l, n_k, vt_pmf, n_t, eps)

    def decoder_search(y, v_rows, key_z, key_u, z_cdf, u_cdf, n_l, n_m, cell_pmf, zvy_ok, dims, eps):
        return decoder_search_jit(
            y, v_rows, np.uint64(key_z), np.uint64(key_u), z_cdf, u_cdf, n_l, n_m,
            cell_pmf, zvy_ok, np.asarray(dims, dtype=np.int64), eps,
        )

    ex2_help = ex2_help_jit
else:
    ba = ba_np
    typical_counts = typical_counts_np
    encoder_search = encoder_search_np
    decoder_search = decoder_search_np
    ex2_help = ex2_help_np
