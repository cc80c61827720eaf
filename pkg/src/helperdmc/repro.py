"""The claim table: every headline number recomputed and compared.

Each row carries the reference value, the computed value, the tolerance and
a status.  For inequality-type checks the reference is an expression such as
``"<= 0"`` and ``computed`` is the quantity being compared.  The table
contains no timings, so two runs produce identical bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .blahut import DEFAULT_TOL, blahut_arimoto
from .blockmarkov import (
    SimConfig,
    bm_joint,
    bm_rate,
    bm_rate_dominated_by_mc_capacity,
    bm_rate_feasible_region,
    random_bm_spec,
    simulate_block_markov,
)
from .channels import full_csi_capacity
from .duality import DualityConfig, duality_rows, duality_upper_bound, optimized_duality_bound
from .examples import (
    Example2Params,
    build_bungi_spec,
    build_example1,
    build_example3,
    ex3_helper,
    ex3_no_csi_channel,
    ex3_two_letter_rate,
    simulate_ex2_causal_scheme,
)
from .helpercap import (
    check_positive_capacity,
    helper_to_both_capacity,
    message_cognizant_capacity,
    sbs_helper_capacity,
    sbs_helper_to_both_capacity,
)
from .probcore import check_markov
from .randgen import random_positivity_channel
from .tables import to_csv

FIELDS = ("claim_id", "paper_value", "computed_value", "tolerance", "status")

# block-Markov smoke test settings
BM_ETA = 1
BM_MARGIN = 0.4
BM_EPS = 3.0
BM_LAMBDA = 4
BM_TRIALS = 200
BM_SEEDS = 5
BM_SEARCH_CAP = 1 << 30


@dataclass(frozen=True)
class ReproRow:
    claim_id: str
    paper_value: object
    computed_value: float
    tolerance: float
    status: str

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in FIELDS}


def _close(cid, ref: float, got: float, tol: float) -> ReproRow:
    return ReproRow(cid, float(ref), float(got), tol, "pass" if abs(got - ref) <= tol else "fail")


def _check(cid, ref: str, got: float, ok: bool, tol: float = 0.0) -> ReproRow:
    return ReproRow(cid, ref, float(got), tol, "pass" if ok else "fail")


def example1_rows(tol=DEFAULT_TOL) -> list[ReproRow]:
    ch, t = build_example1()
    return [
        _close("C1.ex1.message_cognizant", 2.0, message_cognizant_capacity(ch, t, tol).value_bits, 1e-6),
        _close("C2.ex1.symbol_by_symbol", math.log2(3), sbs_helper_capacity(ch, t, tol).value_bits, 1e-6),
    ]


def example3_rows(tol=DEFAULT_TOL) -> list[ReproRow]:
    ch, t = build_example3()
    return [
        _close("C3.ex3.symbol_by_symbol", 0.5, sbs_helper_to_both_capacity(ch, t, tol).value_bits, 1e-6),
        _close("C3.ex3.single_state_helper", 0.25 + 0.75 * (1.5 - 0.75 * math.log2(3)),
               helper_to_both_capacity(ch, ex3_helper("single"), tol).value_bits, 1e-9),
        _close("C3.ex3.two_letter", 0.5 + 0.1875 * math.log2(1.5), ex3_two_letter_rate(), 1e-12),
        _close("C4.ex3.no_csi", 0.375 * math.log2(1.5), blahut_arimoto(ex3_no_csi_channel(), tol).value_bits, 1e-6),
    ]


def example2_sim_rows(n: int = 10_000, seeds: int = 10) -> list[ReproRow]:
    rows = []
    for eta in (2, 4, 8):
        errors = 0
        rate_ok = True
        for seed in range(seeds):
            e, rate = simulate_ex2_causal_scheme(Example2Params(eta), n, seed)
            errors += e
            rate_ok &= rate == (n - 1) * eta / n
        rows.append(_check(f"C5.ex2.causal_scheme.eta{eta}.errors", "0", errors, errors == 0))
        rows.append(_check(f"C5.ex2.causal_scheme.eta{eta}.rate", f"{(n - 1) * eta / n!r}",
                           (n - 1) * eta / n if rate_ok else -1.0, rate_ok))
    return rows


def bungi_rows() -> list[ReproRow]:
    rows = []
    for eta in (1, 2, 3):
        spec = build_bungi_spec(Example2Params(eta))
        rate, (a, b, c) = bm_rate(spec)
        rows += [
            _close(f"C6.bungi.eta{eta}.I(U;Y|V,Z)", eta, a, 1e-9),
            _close(f"C6.bungi.eta{eta}.I(U,Z;V,Y)", eta + 1, b, 1e-9),
            _close(f"C6.bungi.eta{eta}.I(V;T|Y)", 1, c, 1e-9),
            _close(f"C6.bungi.eta{eta}.rate", eta, rate, 1e-9),
        ]
    return rows


def duality_rows_summary() -> list[ReproRow]:
    rows = []
    worst_excess = -math.inf
    worst_tight = 0.0
    for eta in range(2, 6):
        for delta in (0.1, 0.25, 0.4):
            for r in duality_rows(DualityConfig(eta, delta)):
                worst_excess = max(worst_excess, r["exact_kl"] - r["class_bound"])
                if r["tight"]:
                    worst_tight = max(worst_tight, abs(r["exact_kl"] - r["class_bound"]))
    rows.append(_check("C7.duality.exact_minus_class_bound.max", "<= 0", worst_excess, worst_excess <= 1e-12, 1e-12))
    rows.append(_close("C7.duality.tight_class.abs_error", 0.0, worst_tight, 1e-9))
    margin = min(eta - duality_upper_bound(DualityConfig(eta, 0.25)) for eta in range(9, 21))
    rows.append(_check("C7.duality.delta_quarter.min(eta-bound).eta9-20", "> 0", margin, margin > 0))
    best, _ = optimized_duality_bound(64)
    rows.append(_close("C7.duality.optimized.eta64", 63.0, best, 0.2))
    return rows


def positivity_rows_summary(count: int = 200, tol=DEFAULT_TOL) -> list[ReproRow]:
    agree = 0
    for seed in range(count):
        ch = random_positivity_channel(seed)
        a = check_positive_capacity(ch)[0]
        b = full_csi_capacity(ch, tol).value_bits > 1e-6
        c = sbs_helper_capacity(ch, tol=tol).value_bits > 1e-6
        agree += a == b == c
    return [_close("C8.positivity.agreement_fraction", 1.0, agree / count, 0.0)]


def dominance_rows(count: int = 20) -> list[ReproRow]:
    ok = sum(bm_rate_dominated_by_mc_capacity(random_bm_spec(seed)) for seed in range(count))
    return [_close("C9.dominance.fraction", 1.0, ok / count, 0.0)]


def bm_sim_rows(seeds: int = BM_SEEDS, trials: int = BM_TRIALS) -> list[ReproRow]:
    spec = build_bungi_spec(Example2Params(BM_ETA))
    rates = bm_rate_feasible_region(spec, BM_MARGIN)
    better = 0
    for seed in range(seeds):
        err = {}
        for n in (8, 16):
            cfg = SimConfig(n=n, lam=BM_LAMBDA, eps=BM_EPS, seed=seed, search_cap=BM_SEARCH_CAP)
            err[n] = simulate_block_markov(spec, rates, cfg, trials).block_error_rate
        better += err[16] <= err[8]
    j = bm_joint(spec)
    markov = all(check_markov(j, *chain) for chain in (("V", "T", "Y"), ("U", "Z", "V"), ("V", "T", ("U", "Z", "Y"))))
    return [
        _check("C10.bm_sim.seeds_with_err16<=err8", f">= 3 of {seeds}", better, better >= 3),
        _check("C10.bm_joint.markov_chains", "true", float(markov), markov),
    ]


SECTIONS = (example1_rows, example3_rows, example2_sim_rows, bungi_rows, duality_rows_summary,
            positivity_rows_summary, dominance_rows, bm_sim_rows)


def repro_table() -> list[ReproRow]:
    rows: list[ReproRow] = []
    for section in SECTIONS:
        rows += section()
    return rows


def repro_csv(rows: list[ReproRow]) -> str:
    return to_csv([r.as_dict() for r in rows], FIELDS)
