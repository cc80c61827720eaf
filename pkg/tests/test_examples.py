import math

import numpy as np
import pytest

from helperdmc.blahut import blahut_arimoto
from helperdmc.blockmarkov import bm_rate
from helperdmc.examples import (
    BUNGI_ETA_MAX,
    Example2Params,
    build_bungi_spec,
    build_example2,
    build_example3,
    ex2_helper,
    ex2_sbs_bounds,
    ex3_branch_channel,
    ex3_helper,
    ex3_odd_slot_errors,
    ex3_values,
    simulate_ex2_causal_scheme,
)
from helperdmc.helpercap import helper_to_both_capacity, sbs_helper_capacity, sbs_helper_to_both_capacity


def test_example2_is_a_channel_and_helpers_are_distinct():
    ch, t = build_example2(Example2Params(2))
    assert ch.sizes() == (16, 32, 4)
    tables = {ex2_helper(ch, w).table for w in ("s0", "and", "xor")}
    assert len(tables) == 3
    with pytest.raises(ValueError):
        Example2Params(0)


@pytest.mark.parametrize("eta", [1, 2, 4, 8])
def test_causal_scheme_is_error_free(eta):
    for seed in range(3):
        errors, rate = simulate_ex2_causal_scheme(Example2Params(eta), 2000, seed)
        assert errors == 0
        assert rate == 1999 * eta / 2000


def test_example2_bounds_closed_forms():
    b = {x.helper_id: x.bound_bits for x in ex2_sbs_bounds(Example2Params(12))}
    assert b["xor"] == pytest.approx(8.0)
    assert b["and"] == pytest.approx(11.25)
    assert b["s0"] == pytest.approx(12 + 2 ** -12 - 1 + math.log2(4 / 3))
    assert max(b.values()) < 12


def test_example2_helper_values_below_bounds():
    p = Example2Params(2)
    ch, _ = build_example2(p)
    bounds = {x.helper_id: x.bound_bits for x in ex2_sbs_bounds(p)}
    for which in ("s0", "and", "xor"):
        # help at both ends upper-bounds help at the encoder only
        assert helper_to_both_capacity(ch, ex2_helper(ch, which)).value_bits <= bounds[which] + 1e-9


def test_example3_values():
    v = ex3_values()
    assert v["pairs_helper"] == pytest.approx(0.5, abs=1e-9)
    assert v["single_helper"] == pytest.approx(0.25 + 0.75 * (1.5 - 0.75 * math.log2(3)), abs=1e-9)
    assert v["no_csi"] == pytest.approx(0.375 * math.log2(1.5), abs=1e-9)
    assert v["two_letter"] == pytest.approx(0.5 + 0.1875 * math.log2(1.5), abs=1e-12)
    assert v["branch"] == pytest.approx(blahut_arimoto(ex3_branch_channel()).value_bits)


def test_example3_helper_settings():
    ch, t = build_example3()
    assert sbs_helper_to_both_capacity(ch, t).value_bits == pytest.approx(0.5, abs=1e-6)
    # help at the encoder alone does not beat the stateless channel here
    assert sbs_helper_capacity(ch, t).value_bits == pytest.approx(0.375 * math.log2(1.5), abs=1e-6)
    assert ex3_odd_slot_errors(ch, 5000, 1) == 0
    with pytest.raises(ValueError):
        ex3_helper("triples")


@pytest.mark.parametrize("eta", [1, 2, 3])
def test_bungi_components(eta):
    rate, (a, b, c) = bm_rate(build_bungi_spec(Example2Params(eta)))
    assert (a, b, c) == pytest.approx((eta, eta + 1, 1), abs=1e-9)
    assert rate == pytest.approx(eta, abs=1e-9)


def test_bungi_refuses_large_eta():
    with pytest.raises(ValueError):
        build_bungi_spec(Example2Params(BUNGI_ETA_MAX + 1))
