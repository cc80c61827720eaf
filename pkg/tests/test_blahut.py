import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from helperdmc.blahut import NonConvergence, blahut_arimoto, capacity_bounds
from helperdmc.channels import DmcChannel

from conftest import bsc, h2


def _mi(p, w):
    r = np.array([p, 1 - p])
    return capacity_bounds(w, r)[0]


@pytest.mark.parametrize("p", [0.0, 0.05, 0.11, 0.3, 0.5])
def test_bsc(p):
    assert blahut_arimoto(bsc(p), 1e-12).value_bits == pytest.approx(1 - h2(p), abs=1e-11)


@pytest.mark.parametrize("e", [0.0, 0.2, 0.7])
def test_bec(e):
    w = np.array([[1 - e, e, 0], [0, e, 1 - e]])
    assert blahut_arimoto(w, 1e-12).value_bits == pytest.approx(1 - e, abs=1e-11)


def test_z_channel_closed_form():
    q = 0.5
    w = np.array([[1, 0], [q, 1 - q]])
    c = math.log2(1 + (1 - q) * q ** (q / (1 - q)))
    assert blahut_arimoto(w, 1e-12).value_bits == pytest.approx(c, abs=1e-11)


def test_identical_rows_and_duplicates():
    rep = blahut_arimoto(np.tile([0.2, 0.8], (3, 1)))
    assert rep.value_bits == 0.0 and rep.iterations == 0
    # duplicating a row changes nothing; the merged mass sits on the first copy
    w = np.vstack([bsc(0.1), bsc(0.1)[0]])
    rep = blahut_arimoto(DmcChannel(("a", "b", "c"), ("0", "1"), w), 1e-12)
    assert rep.value_bits == pytest.approx(1 - h2(0.1), abs=1e-11)
    assert rep.input_pmf["c"] == 0.0
    assert rep.details["distinct_rows"] == 2


def test_nonconvergence_is_raised():
    rng = np.random.default_rng(3)
    w = rng.dirichlet(np.ones(6), size=6)
    with pytest.raises(NonConvergence):
        blahut_arimoto(w, 1e-14, max_iter=2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_two_input_channels_match_scalar_search(seed):
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(3), size=2)
    oracle = -minimize_scalar(lambda p: -_mi(p, w), bounds=(0, 1), method="bounded",
                              options={"xatol": 1e-12}).fun
    rep = blahut_arimoto(w, 1e-10)
    assert rep.value_bits == pytest.approx(oracle, abs=1e-8)
    assert rep.final_gap <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 5), st.integers(2, 5))
def test_capacity_bracket(seed, nx, ny):
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(ny) * 0.7, size=nx)
    rep = blahut_arimoto(w, 1e-9)
    lo, up = capacity_bounds(w, rep.input_pmf.probs)
    assert lo <= rep.value_bits + 1e-12 <= up + 1e-9
    uniform = capacity_bounds(w, np.full(nx, 1 / nx))[0]
    assert uniform - 1e-12 <= rep.value_bits <= math.log2(min(nx, ny)) + 1e-12
