"""Acceptance criteria 1-11, each at its stated tolerance.

Every test prints one ``criterion N: PASS|FAIL`` line (run with ``-s`` to
see them; ``pyproject.toml`` sets that by default).
"""
import math
import time


from helperdmc.blahut import blahut_arimoto
from helperdmc.blockmarkov import (
    SimConfig,
    bm_joint,
    bm_rate,
    bm_rate_feasible_region,
    random_bm_spec,
    rate_information,
    simulate_block_markov,
)
from helperdmc.channels import full_csi_capacity
from helperdmc.duality import DualityConfig, duality_rows, duality_upper_bound, optimized_duality_bound
from helperdmc.examples import (
    Example2Params,
    build_bungi_spec,
    build_example1,
    build_example3,
    ex3_helper,
    ex3_no_csi_channel,
    ex3_two_letter_rate,
    simulate_ex2_causal_scheme,
)
from helperdmc.helpercap import (
    check_positive_capacity,
    helper_to_both_capacity,
    message_cognizant_capacity,
    sbs_helper_capacity,
    sbs_helper_to_both_capacity,
)
from helperdmc.randgen import random_positivity_channel
from helperdmc.repro import repro_csv, repro_table

from bm_properties import causality_replay, encoder_trend, markov_checks


def report(n: int, checks: dict[str, bool], detail: str = ""):
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  {detail}"
    if failed:
        line += f"  failed: {failed}"
    print("\n" + line)
    assert ok, line


def test_criterion_01_example1_message_cognizant():
    ch, t = build_example1()
    start = time.perf_counter()
    rep = message_cognizant_capacity(ch, t)
    elapsed = time.perf_counter() - start
    report(1, {"value": abs(rep.value_bits - 2.0) <= 1e-6, "256 pairs": rep.details["pairs"] == 256,
               "runtime < 30 s": elapsed < 30},
           f"C={rep.value_bits:.9f} in {elapsed:.2f} s")


def test_criterion_02_example1_symbol_by_symbol():
    ch, t = build_example1()
    rep = sbs_helper_capacity(ch, t)
    report(2, {"value": abs(rep.value_bits - math.log2(3)) <= 1e-6,
               "16 helpers x 16 strategies": rep.details["helpers_evaluated"] == 16},
           f"C={rep.value_bits:.9f}")


def test_criterion_03_example3():
    ch, t = build_example3()
    sbs = sbs_helper_to_both_capacity(ch, t).value_bits
    single = helper_to_both_capacity(ch, ex3_helper("single")).value_bits
    two = ex3_two_letter_rate()
    report(3, {
        "symbol-by-symbol 0.5": abs(sbs - 0.5) <= 1e-6,
        "single-state helper": abs(single - (0.25 + 0.75 * (1.5 - 0.75 * math.log2(3)))) <= 1e-9,
        "two-letter": abs(two - (0.5 + 0.1875 * math.log2(1.5))) <= 1e-12,
    }, f"sbs={sbs:.9f} single={single:.9f} two-letter={two:.12f}")


def test_criterion_04_example3_no_csi():
    c = blahut_arimoto(ex3_no_csi_channel()).value_bits
    report(4, {"value": abs(c - 0.375 * math.log2(1.5)) <= 1e-6}, f"C={c:.9f}")


def test_criterion_05_example2_causal_scheme():
    n = 10_000
    checks = {}
    for eta in (2, 4, 8):
        results = [simulate_ex2_causal_scheme(Example2Params(eta), n, seed) for seed in range(10)]
        checks[f"eta={eta} errors"] = sum(e for e, _ in results) == 0
        checks[f"eta={eta} rate"] = all(r == (n - 1) * eta / n for _, r in results)
    report(5, checks, "n=10^4, 10 seeds")


def test_criterion_06_bungi():
    checks = {}
    for eta in (1, 2, 3):
        spec = build_bungi_spec(Example2Params(eta))
        start = time.perf_counter()
        bm_joint(spec)
        build = time.perf_counter() - start
        rate, (a, b, c) = bm_rate(spec)
        checks[f"eta={eta} components"] = max(abs(a - eta), abs(b - eta - 1), abs(c - 1)) <= 1e-9
        checks[f"eta={eta} rate"] = abs(rate - eta) <= 1e-9
        if eta == 3:
            checks["eta=3 joint build < 60 s"] = build < 60
            detail = f"eta=3 joint built in {build:.2f} s"
    report(6, checks, detail)


def test_criterion_07_duality():
    worst = -math.inf
    tight = 0.0
    for eta in range(2, 6):
        for delta in (0.1, 0.25, 0.4):
            rows = duality_rows(DualityConfig(eta, delta))
            assert len(rows) == 64
            for r in rows:
                worst = max(worst, r["exact_kl"] - r["class_bound"])
                if r["tight"]:
                    tight = max(tight, abs(r["exact_kl"] - r["class_bound"]))
    below = all(duality_upper_bound(DualityConfig(eta, 0.25)) < eta for eta in range(9, 21))
    best, delta = optimized_duality_bound(64)
    report(7, {"exact <= class bound": worst <= 1e-12, "tight class equality": tight <= 1e-9,
               "delta=1/4 bound < eta for eta 9..20": below, "eta=64 within 0.2 of 63": abs(best - 63) <= 0.2},
           f"max excess={worst:.2e} tight err={tight:.2e} optimized={best:.6f} at delta={delta:.3e}")


def test_criterion_08_positivity_equivalence():
    agree = 0
    positive = 0
    for seed in range(200):
        ch = random_positivity_channel(seed)
        assert max(ch.sizes()) <= 4 and len(ch.t_alphabet) == 2
        a = check_positive_capacity(ch)[0]
        b = full_csi_capacity(ch).value_bits > 1e-6
        c = sbs_helper_capacity(ch).value_bits > 1e-6
        agree += a == b == c
        positive += a
    report(8, {"100% agreement": agree == 200}, f"{agree}/200 agree ({positive} positive)")


def test_criterion_09_dominance():
    ok = 0
    for seed in range(20):
        spec = random_bm_spec(seed)
        assert max(spec.sizes().values()) <= 3
        rate, _ = bm_rate(spec)
        iuzy = rate_information(spec)["I(U,Z;Y)"]
        cap = message_cognizant_capacity(spec.channel, spec.t).value_bits
        ok += rate <= iuzy + 1e-9 and iuzy <= cap + 1e-6
    report(9, {"all 20 specs": ok == 20}, f"{ok}/20")


def test_criterion_10_block_markov_smoke():
    spec = build_bungi_spec(Example2Params(1))
    rates = bm_rate_feasible_region(spec, 0.4)
    start = time.perf_counter()
    better = 0
    errs = []
    for seed in range(5):
        err = {}
        for n in (8, 16):
            cfg = SimConfig(n=n, lam=4, eps=3.0, seed=seed, search_cap=1 << 30)
            err[n] = simulate_block_markov(spec, rates, cfg, 200).block_error_rate
        better += err[16] <= err[8]
        errs.append(f"{err[8]:.3f}->{err[16]:.3f}")
    elapsed = time.perf_counter() - start
    markov = markov_checks(spec)
    trend = encoder_trend()
    report(10, {
        "err16 <= err8 for >= 3 of 5 seeds": better >= 3,
        "runtime < 10 min": elapsed < 600,
        "Markov chains on the joint": all(markov.values()),
        "causality replay": causality_replay(spec, rates),
        "encoder success increases with n": trend[0] < trend[1] < trend[2],
    }, f"{better}/5 seeds [{', '.join(errs)}] in {elapsed:.1f} s; encoder success {trend}")


def test_criterion_11_repro():
    first = repro_table()
    second = repro_table()
    a, b = repro_csv(first), repro_csv(second)
    failing = [r.claim_id for r in first if r.status != "pass"]
    report(11, {"all rows pass": not failing, "byte-identical": a == b},
           f"{len(first)} rows" + (f"; failing {failing}" if failing else ""))
