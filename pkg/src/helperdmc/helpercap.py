"""Capacity evaluators for the helper settings.

Every evaluator enumerates deterministic objects (helpers ``S -> T``,
strategies ``T -> X`` or ``S -> X``), turns each candidate into a
state-free channel and hands it to Blahut-Arimoto.  Reductions over helpers
take the largest value; candidates within the solver tolerance of the best
are tied and the lexicographically first helper table wins, so the result
does not depend on evaluation order or thread count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from .blahut import DEFAULT_TOL, CapacityReport, NonConvergence, blahut_arimoto
from .channels import (
    Channel,
    DmcChannel,
    HelpAlphabet,
    meta_state_law,
    reduce_to_meta_state_channel,
    super_channel_matrix,
)
from .maps import (
    EnumerationCapExceeded,
    HelperMap,
    McStrategy,
    Strategy,
    canonical_helper,
    count_maps,
    map_tables,
)
from .probcore import JointTable, mutual_information

__all__ = [
    "ENUMERATION_CAP",
    "CapacityReport",
    "EnumerationCapExceeded",
    "HelperMap",
    "McStrategy",
    "NonConvergence",
    "Strategy",
    "blahut_arimoto",
    "build_positivity_helper",
    "check_positive_capacity",
    "decoder_csi_capacity",
    "helper_to_both_capacity",
    "message_cognizant_capacity",
    "no_csi_capacity",
    "positivity_rate",
    "positivity_rows",
    "sbs_helper_to_both_capacity",
    "sbs_helper_capacity",
    "shannon_causal_capacity",
]

ENUMERATION_CAP = 1 << 20
POSITIVITY_TV = 1e-9


def _check_cap(what: str, count: int, cap: int):
    if count > cap:
        raise EnumerationCapExceeded(what, count, cap)


def _help_alphabet(ch: Channel, t) -> HelpAlphabet:
    if t is None:
        if ch.t_alphabet is None:
            raise ValueError("no help alphabet given and the channel declares none")
        return HelpAlphabet(ch.t_alphabet)
    if isinstance(t, int):
        return HelpAlphabet.of_size(t)
    if isinstance(t, HelpAlphabet):
        return t
    return HelpAlphabet(tuple(t))


def _pmap(fn: Callable, items: Sequence, threads: int | None):
    if threads is None or threads <= 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _pick_best(values: Sequence[float], tol: float) -> int:
    top = max(values)
    return next(i for i, v in enumerate(values) if v >= top - tol)


def _helper_candidates(n_s: int, n_t: int, symmetry: bool) -> np.ndarray:
    tables = map_tables(n_s, n_t)
    if not symmetry:
        return tables
    keep = [i for i, row in enumerate(tables) if canonical_helper(row) == tuple(row)]
    return tables[keep]


def _support_description(labels: Sequence[str], r: np.ndarray, floor: float = 1e-6) -> list[tuple[str, float]]:
    return [(labels[i], float(r[i])) for i in np.flatnonzero(r > floor)]


def no_csi_capacity(ch: Channel, tol: float = DEFAULT_TOL) -> CapacityReport:
    """Capacity with no state information anywhere."""
    return blahut_arimoto(ch.averaged(), tol=tol)


def shannon_causal_capacity(ch: Channel, tol: float = DEFAULT_TOL, cap: int = ENUMERATION_CAP) -> CapacityReport:
    """Causal state information at the encoder: BA over all maps ``S -> X``."""
    n_x, _, n_s = ch.sizes()
    _check_cap("Shannon strategies", count_maps(n_s, n_x), cap)
    tables = map_tables(n_s, n_x)
    rows = super_channel_matrix(ch, tables)
    labels = tuple(",".join(f"{s}->{ch.x_alphabet[x]}" for s, x in zip(ch.s_alphabet, row)) for row in tables)
    rep = blahut_arimoto(DmcChannel(labels, ch.y_alphabet, rows), tol=tol)
    return CapacityReport(rep.value_bits, _support_description(labels, rep.input_pmf.probs), rep.input_pmf,
                          rep.iterations, rep.final_gap, tol, rep.details)


def sbs_helper_capacity(ch: Channel, t=None, tol: float = DEFAULT_TOL, cap: int = ENUMERATION_CAP,
                        symmetry: bool = False, threads: int | None = None) -> CapacityReport:
    """Best symbol-by-symbol helper (help at the encoder only)."""
    ta = _help_alphabet(ch, t)
    n_x, _, n_s = ch.sizes()
    n_t = len(ta)
    _check_cap("symbol-by-symbol helpers x strategies", count_maps(n_s, n_t) * count_maps(n_t, n_x), cap)
    helpers = _helper_candidates(n_s, n_t, symmetry)

    def evaluate(idx):
        h = HelperMap.from_indices(ch.s_alphabet, ta.t_alphabet, idx)
        return h, shannon_causal_capacity(reduce_to_meta_state_channel(ch, h), tol=tol, cap=cap)

    results = _pmap(evaluate, list(helpers), threads)
    best = _pick_best([r.value_bits for _, r in results], tol)
    h, rep = results[best]
    return CapacityReport(rep.value_bits, {"helper": h, "strategies": rep.argmax_object}, rep.input_pmf,
                          rep.iterations, rep.final_gap, tol,
                          {"helpers_evaluated": len(results), "per_helper": [r.value_bits for _, r in results]})


def message_cognizant_capacity(ch: Channel, t=None, tol: float = DEFAULT_TOL,
                               cap: int = ENUMERATION_CAP) -> CapacityReport:
    """Message-cognizant symbol-by-symbol helper: BA on the super channel over
    all (help rule, input rule) pairs."""
    ta = _help_alphabet(ch, t)
    n_x, _, n_s = ch.sizes()
    n_t = len(ta)
    _check_cap("message-cognizant strategy pairs", count_maps(n_s, n_t) * count_maps(n_t, n_x), cap)
    helpers = map_tables(n_s, n_t)
    inputs = map_tables(n_t, n_x)
    # composites[h, u, s] = inputs[u, helpers[h, s]]
    composites = inputs[:, helpers].transpose(1, 0, 2).reshape(-1, n_s)
    rows = super_channel_matrix(ch, composites)
    rep = blahut_arimoto(rows, tol=tol)
    pairs = []
    for flat in np.flatnonzero(rep.input_pmf.probs > 1e-6):
        hi, ui = divmod(int(flat), len(inputs))
        pairs.append((McStrategy(HelperMap.from_indices(ch.s_alphabet, ta.t_alphabet, helpers[hi]),
                                 Strategy.from_indices(ta.t_alphabet, ch.x_alphabet, inputs[ui])),
                      float(rep.input_pmf.probs[flat])))
    return CapacityReport(rep.value_bits, pairs, None, rep.iterations, rep.final_gap, tol,
                          {"pairs": int(composites.shape[0]), **rep.details})


def _per_help_value(ch: Channel, h: HelperMap, tol: float, with_state: bool):
    p_t, p_s_given_t = meta_state_law(ch, h)
    value = gap = 0.0
    iters = 0
    per_t = {}
    for ti, t in enumerate(h.t_alphabet):
        if p_t[ti] == 0:
            continue
        if with_state:
            # x -> (s, y) with law P(s|t) W(y|x,s)
            m = np.einsum("s,sxy->xsy", p_s_given_t[ti], ch.w).reshape(len(ch.x_alphabet), -1)
        else:
            m = np.einsum("s,sxy->xy", p_s_given_t[ti], ch.w)
        rep = blahut_arimoto(m, tol=tol)
        per_t[t] = rep.value_bits
        value += p_t[ti] * rep.value_bits
        gap += p_t[ti] * rep.final_gap
        iters = max(iters, rep.iterations)
    return value, gap, iters, per_t


def helper_to_both_capacity(ch: Channel, h: HelperMap, tol: float = DEFAULT_TOL) -> CapacityReport:
    """Fixed helper whose output reaches encoder and decoder: ``max I(X;Y|T)``."""
    value, gap, iters, per_t = _per_help_value(ch, h, tol, with_state=False)
    return CapacityReport(value, h, None, iters, gap, tol, {"per_help": per_t})


def _best_helper(ch: Channel, t, tol, cap, symmetry, threads, with_state: bool) -> CapacityReport:
    ta = _help_alphabet(ch, t)
    n_s = len(ch.s_alphabet)
    _check_cap("symbol-by-symbol helpers", count_maps(n_s, len(ta)), cap)
    helpers = [HelperMap.from_indices(ch.s_alphabet, ta.t_alphabet, idx)
               for idx in _helper_candidates(n_s, len(ta), symmetry)]
    results = _pmap(lambda h: _per_help_value(ch, h, tol, with_state), helpers, threads)
    best = _pick_best([r[0] for r in results], tol)
    value, gap, iters, per_t = results[best]
    return CapacityReport(value, helpers[best], None, iters, gap, tol,
                          {"per_help": per_t, "per_helper": [r[0] for r in results]})


def decoder_csi_capacity(ch: Channel, t=None, tol: float = DEFAULT_TOL, cap: int = ENUMERATION_CAP,
                         symmetry: bool = False, threads: int | None = None) -> CapacityReport:
    """Causal helper with the state known at the decoder: ``max I(X;Y|S)``
    over ``P_{T|S}`` deterministic and ``P_{X|T}``."""
    return _best_helper(ch, t, tol, cap, symmetry, threads, with_state=True)


def sbs_helper_to_both_capacity(ch: Channel, t=None, tol: float = DEFAULT_TOL, cap: int = ENUMERATION_CAP,
                                symmetry: bool = False, threads: int | None = None) -> CapacityReport:
    """Best symbol-by-symbol helper whose output also reaches the decoder."""
    return _best_helper(ch, t, tol, cap, symmetry, threads, with_state=False)


# --------------------------------------------------------------------------
# positivity
# --------------------------------------------------------------------------


def check_positive_capacity(ch: Channel) -> tuple[bool, tuple[str, str, str] | None]:
    """Whether some reachable state has two inputs with different output laws.

    Returns ``(True, (s*, x1, x2))`` for the first such triple in alphabet
    order, else ``(False, None)``.
    """
    for si, s in enumerate(ch.s_alphabet):
        if ch.p_s.probs[si] <= 0:
            continue
        rows = ch.w[si]
        for a in range(len(ch.x_alphabet)):
            tv = 0.5 * np.abs(rows[a + 1:] - rows[a]).sum(axis=1)
            hit = np.flatnonzero(tv > POSITIVITY_TV)
            if hit.size:
                return True, (s, ch.x_alphabet[a], ch.x_alphabet[a + 1 + int(hit[0])])
    return False, None


def build_positivity_helper(ch: Channel, witness, t_alphabet: Sequence[str] = ("0", "1")
                            ) -> tuple[HelperMap, tuple[Strategy, Strategy]]:
    """Helper flagging ``s*`` and the two strategies that differ only there."""
    if witness is None or len(witness) != 3:
        raise ValueError("a witness is a triple (s*, x1, x2)")
    s_star, x1, x2 = (str(v) for v in witness)
    if s_star not in ch.s_alphabet or x1 not in ch.x_alphabet or x2 not in ch.x_alphabet:
        raise ValueError(f"witness {witness!r} names symbols outside the channel alphabets")
    si = ch.s_alphabet.index(s_star)
    r1, r2 = ch.w[si, ch.x_alphabet.index(x1)], ch.w[si, ch.x_alphabet.index(x2)]
    if ch.p_s.probs[si] <= 0 or 0.5 * np.abs(r1 - r2).sum() <= POSITIVITY_TV:
        raise ValueError(f"{witness!r} is not a positivity witness")
    ta = HelpAlphabet(tuple(t_alphabet)).t_alphabet
    t0, t1 = ta[0], ta[1]
    h = HelperMap(ch.s_alphabet, ta, tuple(t0 if s == s_star else t1 for s in ch.s_alphabet))
    x0 = ch.x_alphabet[0]
    rest = (x0,) * (len(ta) - 1)
    u1 = Strategy(ta, ch.x_alphabet, (x1,) + rest)
    u2 = Strategy(ta, ch.x_alphabet, (x2,) + rest)
    return h, (u1, u2)


def positivity_rows(ch: Channel, h: HelperMap, strategies: Sequence[Strategy]) -> np.ndarray:
    composites = np.array([u.indices[h.indices] for u in strategies], dtype=np.int64)
    return super_channel_matrix(ch, composites)


def positivity_rate(ch: Channel, h: HelperMap, strategies: Sequence[Strategy]) -> float:
    """``I(U;Y)`` with ``U`` uniform over the given strategies."""
    rows = positivity_rows(ch, h, strategies)
    joint = rows / len(strategies)
    j = JointTable((("U", tuple(str(i) for i in range(len(strategies)))), ("Y", ch.y_alphabet)), joint)
    return mutual_information(j, "U", "Y")
