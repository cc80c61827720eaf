import math

import numpy as np
import pytest

from helperdmc.blahut import blahut_arimoto
from helperdmc.duality import (
    CLASS_BOUNDS,
    DualityConfig,
    canonical_strategies,
    class_bound,
    duality_rows,
    duality_upper_bound,
    exact_kl_for_strategy,
    generic_duality_bound,
    optimized_duality_bound,
    pattern_class,
    strategy_output_law,
    strategy_patterns,
)
from helperdmc.probcore import InfiniteDivergence

from conftest import bsc, h2

# pattern (a0, a1, b0, b1) -> class, derived by hand
EXPECTED_CLASSES = {
    (0, 0, 0, 0): "half", (0, 0, 0, 1): "tight", (0, 0, 1, 0): "always-bad", (0, 0, 1, 1): "half",
    (0, 1, 0, 0): "three-quarter", (0, 1, 0, 1): "three-quarter", (0, 1, 1, 0): "quarter",
    (0, 1, 1, 1): "quarter", (1, 0, 0, 0): "quarter", (1, 0, 0, 1): "three-quarter",
    (1, 0, 1, 0): "quarter", (1, 0, 1, 1): "three-quarter", (1, 1, 0, 0): "half",
    (1, 1, 0, 1): "half", (1, 1, 1, 0): "half", (1, 1, 1, 1): "half",
}


def test_pattern_table():
    assert strategy_patterns() == sorted(EXPECTED_CLASSES)
    for pattern, cls in EXPECTED_CLASSES.items():
        assert pattern_class(pattern) == cls


def test_output_laws_are_distributions():
    for u in canonical_strategies(3):
        p = strategy_output_law(u, 3)
        assert p.min() >= 0 and p.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("eta", [2, 3, 4, 5])
@pytest.mark.parametrize("delta", [0.1, 0.25, 0.4])
def test_exact_below_class_bound(eta, delta):
    rows = duality_rows(DualityConfig(eta, delta))
    assert len(rows) == 64
    for r in rows:
        assert r["exact_kl"] <= r["class_bound"] + 1e-12
        if r["tight"]:
            assert r["exact_kl"] == pytest.approx(r["class_bound"], abs=1e-9)


@pytest.mark.parametrize("eta", [2, 4])
def test_divergence_ignores_payload_for_most_patterns(eta):
    cfg = DualityConfig(eta, 0.25)
    by_pattern = {}
    for u in canonical_strategies(eta):
        by_pattern.setdefault(u.pattern, []).append(exact_kl_for_strategy(u, cfg))
    for pattern, kls in by_pattern.items():
        if pattern in ((1, 1, 0, 0), (1, 1, 1, 1)):
            continue  # both help values pick the same branch; equal payloads collide
        assert max(kls) - min(kls) <= 1e-12, pattern


def test_quarter_delta_bound_beats_eta():
    for eta in range(9, 21):
        assert duality_upper_bound(DualityConfig(eta, 0.25)) < eta


def test_optimized_bound():
    bound, delta = optimized_duality_bound(64)
    assert abs(bound - 63) <= 0.2
    assert 0 < delta < 0.5
    # no grid point does better
    grid = np.linspace(1e-6, 0.5 - 1e-6, 2001)
    assert bound <= min(duality_upper_bound(DualityConfig(64, d)) for d in grid) + 1e-9


def test_config_validation():
    with pytest.raises(ValueError):
        DualityConfig(4, 0.5)
    with pytest.raises(ValueError):
        DualityConfig(0, 0.25)
    assert class_bound((0, 0, 0, 1), DualityConfig(3, 0.25))[0] == "tight"
    assert set(CLASS_BOUNDS) == set(EXPECTED_CLASSES.values())


@pytest.mark.parametrize("seed", range(10))
def test_generic_bound_dominates_capacity(seed):
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(4), size=3)
    q = rng.dirichlet(np.ones(4))
    assert generic_duality_bound(w, q) >= blahut_arimoto(w).value_bits - 1e-9


def test_generic_bound_is_tight_at_optimal_output():
    # for the BSC the uniform output law is capacity-achieving
    assert generic_duality_bound(bsc(0.2), np.array([0.5, 0.5])) == pytest.approx(1 - h2(0.2))
    with pytest.raises(InfiniteDivergence):
        generic_duality_bound(bsc(0.2), np.array([1.0, 0.0]))
