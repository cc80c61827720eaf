"""Monte Carlo simulation of the block-Markov scheme.

Each trial draws its own codebooks, messages, states and channel noise from
counter-based streams keyed by ``(seed, trial)``, so any parallel schedule
gives identical counts.  Codebooks are never stored: codeword entries are
regenerated from their stream position on demand (see ``_kernels``).

Index conventions are 0-based: the first bin is ``l = 0`` and ``l_0 = 0``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .. import _kernels
from ..helpercap import build_positivity_helper, check_positive_capacity, positivity_rows
from ..probcore import DEFAULT_EPS
from ..rng import categorical, counter_u64, derive, make_cdf, to_unit
from ..tables import to_csv
from .spec import BlockMarkovSpec, RateTuple, bm_joint

SEARCH_CAP = 10_000_000
CODE_BUDGET = 1e-3

# stream labels under a trial key
_V, _Z, _U, _MSG, _STATE, _NOISE, _LAST = range(1, 8)


class SearchCapExceeded(RuntimeError):
    def __init__(self, hypotheses: int, cap: int):
        super().__init__(f"decoder would search {hypotheses} hypotheses; the cap is {cap}")
        self.hypotheses = hypotheses
        self.cap = cap


@dataclass(frozen=True)
class SimConfig:
    n: int
    lam: int = 4
    eps: float = DEFAULT_EPS
    seed: int = 0
    last_block_mode: str = "genie"
    search_cap: int = SEARCH_CAP
    code_budget: float = CODE_BUDGET

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.lam < 2:
            raise ValueError("lambda must be at least 2")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.last_block_mode not in ("genie", "coded"):
            raise ValueError("last_block_mode is 'genie' or 'coded'")


@dataclass
class SimReport:
    n: int
    seed: int
    trials: int
    no_bin_index: int = 0
    satellite_error: int = 0
    bin_decode_error: int = 0
    last_block_error: int = 0
    block_errors: int = 0
    message_errors: int = 0
    blocks: int = 0
    effective_rate: float = 0.0

    @property
    def block_error_rate(self) -> float:
        return self.block_errors / self.blocks if self.blocks else 0.0

    @property
    def message_error_rate(self) -> float:
        return self.message_errors / self.trials if self.trials else 0.0

    def row(self) -> dict:
        d = asdict(self)
        d["block_error_rate"] = self.block_error_rate
        d["message_error_rate"] = self.message_error_rate
        return d


REPORT_FIELDS = ("n", "seed", "trials", "no_bin_index", "satellite_error", "bin_decode_error",
                 "last_block_error", "block_errors", "message_errors", "blocks",
                 "block_error_rate", "message_error_rate", "effective_rate")


def reports_to_csv(reports) -> str:
    return to_csv([r.row() for r in reports], REPORT_FIELDS)


def codebook_size(n: int, rate: float) -> int:
    """``floor(2^{n rate})``, at least 1."""
    return max(1, int(math.floor(2.0 ** (n * rate) + 1e-9)))


# --------------------------------------------------------------------------
# tables shared by all trials
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class _Tables:
    dims: tuple[int, int, int, int]
    n_t: int
    v_cdf: np.ndarray
    z_cdf: np.ndarray
    u_cdf: np.ndarray
    s_cdf: np.ndarray
    w_cdf: np.ndarray
    vt_pmf: np.ndarray
    cell_pmf: np.ndarray
    zvy_ok: np.ndarray
    h_idx: np.ndarray
    f_idx: np.ndarray


def _tables(spec: BlockMarkovSpec) -> _Tables:
    j = bm_joint(spec)
    sz = spec.sizes()
    return _Tables(
        dims=(sz["Z"], sz["U"], sz["V"], sz["Y"]),
        n_t=sz["T"],
        v_cdf=make_cdf(j.marginal(("V",)).probs),
        z_cdf=make_cdf(spec.p_z.probs),
        u_cdf=np.ascontiguousarray(make_cdf(spec.p_u_given_z.rows)),
        s_cdf=make_cdf(spec.channel.p_s.probs),
        w_cdf=make_cdf(spec.channel.w),
        vt_pmf=np.ascontiguousarray(j.marginal(("V", "T")).probs.ravel()),
        cell_pmf=np.ascontiguousarray(j.marginal(("Z", "U", "V", "Y")).probs.ravel()),
        zvy_ok=np.ascontiguousarray(j.marginal(("Z", "V", "Y")).probs.ravel() > 0),
        h_idx=np.asarray(spec.h_idx),
        f_idx=np.asarray(spec.f_idx),
    )


@dataclass(frozen=True)
class _Books:
    """Keys and sizes of one trial's lazily generated codebooks."""

    key_v: int
    key_z: int
    key_u: int
    n: int
    n_l: int
    n_m: int
    n_k: int

    def z(self, tb: _Tables, l: int) -> np.ndarray:
        return _kernels.codewords_np(self.key_z, [l], [0], 1, self.n, tb.z_cdf)[0]

    def u(self, tb: _Tables, l: int, m: int, z: np.ndarray) -> np.ndarray:
        return _kernels.cond_codewords_np(self.key_u, [l], [m], self.n_m, self.n, tb.u_cdf, z[None, :])[0]

    def v_bin(self, tb: _Tables, l: int) -> np.ndarray:
        ks = np.arange(self.n_k)
        return _kernels.codewords_np(self.key_v, np.full(self.n_k, l), ks, self.n_k, self.n, tb.v_cdf)


# --------------------------------------------------------------------------
# encoder side
# --------------------------------------------------------------------------


@dataclass
class EncodedTrial:
    """Everything the encoder, helper and channel produced in one trial."""

    states: np.ndarray   # (lam - 1, n)
    help: np.ndarray
    inputs: np.ndarray
    outputs: np.ndarray
    bins: list[int]      # l_0 .. l_{lam-1}
    found: list[bool]    # bin search success per block
    messages: np.ndarray


def draw_states(tb: _Tables, key: int, blocks: int, n: int) -> np.ndarray:
    pos = np.arange(blocks * n, dtype=np.uint64)
    return categorical(tb.s_cdf, to_unit(counter_u64(key, pos))).reshape(blocks, n)


def encode_trial(spec: BlockMarkovSpec, tb: _Tables, books: _Books, messages: np.ndarray,
                 states: np.ndarray, noise_key: int, eps: float) -> EncodedTrial:
    """Run blocks ``1 .. lam-1``.  Help ``t_i = h(s_i, z_i)`` and input
    ``x_i = f(u_i, t_i)`` use only the current state and indices fixed
    before the block starts, so the encoder is causal by construction."""
    blocks, n = states.shape
    help_ = np.empty_like(states)
    inputs = np.empty_like(states)
    outputs = np.empty_like(states)
    bins = [0]
    found = []
    for j in range(blocks):
        l_prev = bins[-1]
        z = books.z(tb, l_prev)
        u = books.u(tb, l_prev, int(messages[j]), z)
        t = tb.h_idx[states[j], z]
        x = tb.f_idx[u, t]
        pos = np.arange(j * n, (j + 1) * n, dtype=np.uint64)
        f = to_unit(counter_u64(noise_key, pos))
        y = categorical(tb.w_cdf[states[j], x], f)
        l, _k = _kernels.encoder_search(np.ascontiguousarray(t), books.key_v, tb.v_cdf, books.n_l, books.n_k,
                                        tb.vt_pmf, tb.n_t, eps)
        found.append(l >= 0)
        bins.append(l if l >= 0 else 0)
        help_[j], inputs[j], outputs[j] = t, x, y
    return EncodedTrial(states, help_, inputs, outputs, bins, found, messages)


# --------------------------------------------------------------------------
# last block
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LastBlockCode:
    """Repetition code over the two-strategy positivity channel."""

    bits: int
    reps: int
    rows: np.ndarray      # (2, |Y|) super-channel rows
    help_idx: np.ndarray  # state -> help index
    inputs: np.ndarray    # (2, |T|) input index per strategy and help

    @property
    def length(self) -> int:
        return self.bits * self.reps


def bhattacharyya(rows: np.ndarray) -> float:
    return float(np.sqrt(rows[0] * rows[1]).sum())


def last_block_code(spec: BlockMarkovSpec, n_l: int, budget: float) -> LastBlockCode:
    ch = spec.channel
    ok, witness = check_positive_capacity(ch)
    if not ok:
        raise ValueError("no symbol-by-symbol helper with positive capacity exists for this channel")
    h, strategies = build_positivity_helper(ch, witness, spec.t.t_alphabet)
    rows = positivity_rows(ch, h, strategies)
    bits = max(0, math.ceil(math.log2(n_l))) if n_l > 1 else 0
    z = bhattacharyya(rows)
    reps = 1
    if bits and z > 0:
        # union bound over bits of the per-bit Bhattacharyya bound
        reps = max(1, math.ceil(math.log(budget / bits) / math.log(z)))
    return LastBlockCode(bits, reps, rows, h.indices, np.stack([u.indices for u in strategies]))


def send_last_block(tb: _Tables, code: LastBlockCode, l: int, key: int) -> int:
    if code.bits == 0:
        return 0
    bits = np.array([(l >> (code.bits - 1 - b)) & 1 for b in range(code.bits)], dtype=np.int64)
    sent = np.repeat(bits, code.reps)
    size = sent.size
    s = categorical(tb.s_cdf, to_unit(counter_u64(key, np.arange(size, dtype=np.uint64))))
    x = code.inputs[sent, code.help_idx[s]]
    f = to_unit(counter_u64(key, np.arange(size, 2 * size, dtype=np.uint64)))
    y = categorical(tb.w_cdf[s, x], f).reshape(code.bits, code.reps)
    with np.errstate(divide="ignore"):
        ll = np.log(code.rows[:, y]).sum(axis=2)  # (2, bits)
    hat = (ll[1] > ll[0]).astype(np.int64)
    return int(sum(int(b) << (code.bits - 1 - i) for i, b in enumerate(hat)))


# --------------------------------------------------------------------------
# one trial
# --------------------------------------------------------------------------


@dataclass
class TrialOutcome:
    no_bin_index: bool = False
    satellite_error: bool = False
    bin_decode_error: bool = False
    last_block_error: bool = False
    block_errors: int = 0


def trial_books(seed: int, trial: int, n: int, rates: RateTuple) -> tuple[int, _Books]:
    key = derive(seed, trial)
    return key, _Books(derive(key, _V), derive(key, _Z), derive(key, _U), n,
                       codebook_size(n, rates.r_v), codebook_size(n, rates.r), codebook_size(n, rates.r_tilde))


def run_trial(spec: BlockMarkovSpec, tb: _Tables, rates: RateTuple, cfg: SimConfig, trial: int,
              code: LastBlockCode | None) -> TrialOutcome:
    key, books = trial_books(cfg.seed, trial, cfg.n, rates)
    blocks = cfg.lam - 1
    msgs = np.minimum((to_unit(counter_u64(derive(key, _MSG), np.arange(blocks, dtype=np.uint64)))
                       * books.n_m).astype(np.int64), books.n_m - 1)
    states = draw_states(tb, derive(key, _STATE), blocks, cfg.n)
    enc = encode_trial(spec, tb, books, msgs, states, derive(key, _NOISE), cfg.eps)
    out = TrialOutcome(no_bin_index=not all(enc.found))

    l_hat = enc.bins[-1]
    if code is not None:
        l_hat = send_last_block(tb, code, enc.bins[-1], derive(key, _LAST))
        out.last_block_error = l_hat != enc.bins[-1]

    for j in range(blocks - 1, -1, -1):
        v_rows = np.ascontiguousarray(books.v_bin(tb, l_hat))
        l_prev, m_hat, _k = _kernels.decoder_search(
            np.ascontiguousarray(enc.outputs[j]), v_rows, books.key_z, books.key_u, tb.z_cdf, tb.u_cdf,
            books.n_l, books.n_m, tb.cell_pmf, tb.zvy_ok, tb.dims, cfg.eps)
        if l_prev < 0:
            # no typical triple: abort, this and all earlier blocks are lost
            out.bin_decode_error = True
            out.block_errors += j + 1
            break
        if m_hat != enc.messages[j]:
            out.block_errors += 1
            if l_prev == enc.bins[j]:
                out.satellite_error = True
        if l_prev != enc.bins[j]:
            out.bin_decode_error = True
        l_hat = l_prev
    return out


def simulate_block_markov(spec: BlockMarkovSpec, rates: RateTuple, cfg: SimConfig, trials: int,
                          threads: int | None = 1) -> SimReport:
    """Tally failure modes over ``trials`` independent runs of ``lam - 1``
    message blocks plus the last block."""
    n = cfg.n
    n_l, n_m, n_k = (codebook_size(n, r) for r in (rates.r_v, rates.r, rates.r_tilde))
    hyp = n_l * n_m * n_k
    if hyp > cfg.search_cap:
        raise SearchCapExceeded(hyp, cfg.search_cap)
    tb = _tables(spec)
    code = last_block_code(spec, n_l, cfg.code_budget) if cfg.last_block_mode == "coded" else None
    task = lambda i: run_trial(spec, tb, rates, cfg, i, code)
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            outcomes = list(pool.map(task, range(trials)))
    else:
        outcomes = [task(i) for i in range(trials)]
    blocks = cfg.lam - 1
    rep = SimReport(n, cfg.seed, trials, blocks=blocks * trials)
    for o in outcomes:
        rep.no_bin_index += o.no_bin_index
        rep.satellite_error += o.satellite_error
        rep.bin_decode_error += o.bin_decode_error
        rep.last_block_error += o.last_block_error
        rep.block_errors += o.block_errors
        rep.message_errors += o.block_errors > 0
    uses = blocks * n + (code.length if code is not None else 0)
    rep.effective_rate = blocks * n * rates.r / uses if uses else 0.0
    return rep


def encoder_success_rate(spec: BlockMarkovSpec, rates: RateTuple, n: int, eps: float, trials: int,
                         seed: int = 0) -> float:
    """Fraction of blocks in which the bin search finds a typical ``v``.

    Each trial encodes one block with ``l_0 = 0`` and message 0."""
    tb = _tables(spec)
    hits = 0
    for i in range(trials):
        key, books = trial_books(seed, i, n, rates)
        states = draw_states(tb, derive(key, _STATE), 1, n)
        enc = encode_trial(spec, tb, books, np.zeros(1, dtype=np.int64), states, derive(key, _NOISE), eps)
        hits += enc.found[0]
    return hits / trials
