"""Property checks on the block-Markov scheme, shared by the unit tests and
the acceptance suite."""
import numpy as np

from helperdmc.blockmarkov import BlockMarkovSpec, RateTuple, bm_joint
from helperdmc.blockmarkov.sim import _tables, draw_states, encode_trial, encoder_success_rate, trial_books
from helperdmc.channels import Channel, HelpAlphabet
from helperdmc.probcore import CondPmf, Pmf, check_markov
from helperdmc.rng import derive

MARKOV_CHAINS = (("V", "T", "Y"), ("U", "Z", "V"), ("V", "T", ("U", "Z", "Y")),
                 (("U", "Z"), ("X", "S"), ("Y",)), ("S", "Z", "U"))


def markov_checks(spec) -> dict:
    j = bm_joint(spec)
    return {f"{a}-{b}-{c}": check_markov(j, a, b, c) for a, b, c in MARKOV_CHAINS}


def causality_replay(spec, rates, n=8, blocks=3, trials=5, eps=3.0) -> bool:
    """Changing states from some time on leaves all earlier help, inputs and
    outputs untouched."""
    tb = _tables(spec)
    n_s = len(spec.channel.s_alphabet)
    for trial in range(trials):
        key, books = trial_books(11, trial, n, rates)
        msgs = np.arange(blocks) % books.n_m
        states = draw_states(tb, derive(key, 5), blocks, n)
        base = encode_trial(spec, tb, books, msgs, states, derive(key, 6), eps)
        rng = np.random.default_rng(trial)
        for cut in rng.integers(1, blocks * n, size=4):
            alt = states.copy().ravel()
            alt[cut:] = (alt[cut:] + rng.integers(1, n_s, size=alt.size - cut)) % n_s
            other = encode_trial(spec, tb, books, msgs, alt.reshape(blocks, n), derive(key, 6), eps)
            for name in ("help", "inputs", "outputs"):
                if not np.array_equal(getattr(base, name).ravel()[:cut], getattr(other, name).ravel()[:cut]):
                    return False
            if base.bins[: cut // n + 1] != other.bins[: cut // n + 1]:
                return False
    return True


def trend_spec() -> BlockMarkovSpec:
    """Noiseless binary channel; T = S; V is T through a BSC(1/4)."""
    bit = ("0", "1")
    ch = Channel(bit, bit, ("a", "b"), Pmf.uniform(("a", "b")), np.stack([np.eye(2)] * 2), t_alphabet=bit)
    return BlockMarkovSpec(
        ("z",), bit, bit, Pmf(("z",), [1.0]), [["0"], ["1"]], CondPmf(("z",), bit, [[0.5, 0.5]]),
        [["0", "0"], ["1", "1"]], CondPmf(bit, bit, [[0.75, 0.25], [0.25, 0.75]]), ch, HelpAlphabet(bit))


TREND_RATES = RateTuple(0.1, 0.6, 0.0)
TREND_N = (8, 16, 32)


def encoder_trend(trials=200) -> list[float]:
    return [encoder_success_rate(trend_spec(), TREND_RATES, n, 0.3, trials) for n in TREND_N]
