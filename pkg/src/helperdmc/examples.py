"""The three counterexample channels and the numbers claimed about them.

Tuple-valued symbols are flattened to string labels such as ``"a=1,b=0"``;
the component order is recorded under ``metadata["components"]``.  Output
components are always ordered A' first, then D0, then D1 (Example 2) or
Y0..Y3 (Example 3).  Index arithmetic used throughout:

* Example 1: x = 2a + b, s = 2 s0 + s1, y = 2a' + b'.
* Example 2: x = (2a + b) 2^eta + c, s = 2 s0 + s1,
  y = (a' 2^eta + d0) 2^eta + d1.
* Example 3: y = sum_k y_k 2^(3-k).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .blahut import DEFAULT_TOL, blahut_arimoto
from .blockmarkov.spec import BlockMarkovSpec
from .channels import Channel, DmcChannel, HelpAlphabet
from .helpercap import helper_to_both_capacity
from .maps import HelperMap
from .probcore import JointTable, Pmf, CondPmf, mutual_information
from .rng import SplitMix64

DENSE_ETA_MAX = 6
BUNGI_ETA_MAX = 3
BIT = ("0", "1")


def _bits(v: int, width: int) -> str:
    return format(v, f"0{width}b") if width else ""


def _states() -> tuple[tuple[str, ...], Pmf]:
    s = tuple(f"s0={a},s1={b}" for a in (0, 1) for b in (0, 1))
    return s, Pmf.uniform(s)


# --------------------------------------------------------------------------
# Example 1
# --------------------------------------------------------------------------


def build_example1() -> tuple[Channel, HelpAlphabet]:
    """Inputs (A, B), states (S0, S1) uniform, output (A, B xor S^(A))."""
    x = tuple(f"a={a},b={b}" for a in (0, 1) for b in (0, 1))
    y = x
    s, p_s = _states()
    w = np.zeros((4, 4, 4))
    for si in range(4):
        st = (si >> 1, si & 1)
        for a in (0, 1):
            for b in (0, 1):
                w[si, 2 * a + b, 2 * a + (b ^ st[a])] = 1.0
    ch = Channel(x, y, s, p_s, w, t_alphabet=BIT,
                 metadata={"example": 1, "components": {"x": ["a", "b"], "s": ["s0", "s1"], "y": ["a", "b"]}})
    return ch, HelpAlphabet(BIT)


# --------------------------------------------------------------------------
# Example 2
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Example2Params:
    eta: int

    def __post_init__(self):
        if self.eta < 1:
            raise ValueError("eta must be at least 1")


@dataclass(frozen=True)
class Ex2BoundBreakdown:
    helper_id: str
    bound_bits: float
    terms: dict = field(default_factory=dict)


def _ex2_alphabets(eta: int):
    x = tuple(f"a={a},b={b},c={_bits(c, eta)}" for a in (0, 1) for b in (0, 1) for c in range(1 << eta))
    y = tuple(f"a={a},d0={_bits(d0, eta)},d1={_bits(d1, eta)}"
              for a in (0, 1) for d0 in range(1 << eta) for d1 in range(1 << eta))
    return x, y


def ex2_output_law(eta: int, a: int, b: int, c: int, s0: int, s1: int) -> np.ndarray:
    """Dense output PMF for one (x, s) pair."""
    k = 1 << eta
    out = np.zeros(2 * k * k)
    if b == (s0, s1)[a]:
        cube = out.reshape(2, k, k)
        if b == 0:
            cube[a, c, :] = 1.0 / k
        else:
            cube[a, :, c] = 1.0 / k
    else:
        out[:] = 1.0 / out.size
    return out


def build_example2(p: Example2Params) -> tuple[Channel, HelpAlphabet]:
    eta = p.eta
    if eta > DENSE_ETA_MAX:
        raise ValueError(f"dense Example 2 needs eta <= {DENSE_ETA_MAX} (|Y| = 2^(1+2 eta)); got {eta}")
    x, y = _ex2_alphabets(eta)
    s, p_s = _states()
    k = 1 << eta
    w = np.empty((4, 4 * k, 2 * k * k))
    for si in range(4):
        s0, s1 = si >> 1, si & 1
        for a in (0, 1):
            for b in (0, 1):
                for c in range(k):
                    w[si, (2 * a + b) * k + c] = ex2_output_law(eta, a, b, c, s0, s1)
    ch = Channel(x, y, s, p_s, w, t_alphabet=BIT,
                 metadata={"example": 2, "eta": eta,
                           "components": {"x": ["a", "b", "c"], "s": ["s0", "s1"], "y": ["a", "d0", "d1"]}})
    return ch, HelpAlphabet(BIT)


def ex2_helper(ch: Channel, which: str) -> HelperMap:
    """The three helpers left after symmetry reduction: s0, and, xor."""
    rules = {"s0": lambda s0, s1: s0, "and": lambda s0, s1: s0 & s1, "xor": lambda s0, s1: s0 ^ s1}
    rule = rules[which]
    return HelperMap(ch.s_alphabet if ch is not None else _states()[0], BIT,
                     tuple(str(rule(si >> 1, si & 1)) for si in range(4)))


def sample_ex2_outputs(eta: int, a, b, c, s0, s1, rng: SplitMix64):
    """Draw channel outputs (a', d0, d1) for vectors of inputs and states."""
    n = np.asarray(a).size
    k = 1 << eta
    good = np.asarray(b) == np.where(np.asarray(a) == 1, s1, s0)
    noise_a = rng.integers(2, n)
    noise_d0 = rng.integers(k, n)
    noise_d1 = rng.integers(k, n)
    a_out = np.where(good, a, noise_a)
    d0 = np.where(good & (np.asarray(b) == 0), c, noise_d0)
    d1 = np.where(good & (np.asarray(b) == 1), c, noise_d1)
    return a_out, d0, d1


def simulate_ex2_causal_scheme(p: Example2Params, n: int, seed: int) -> tuple[int, float]:
    """Run the causal (non symbol-by-symbol) helper scheme over ``n`` uses.

    Help ``T_i = S_i^(T_{i-1})`` with ``T_0 = 0``; input ``(A, B, C) =
    (T_{i-1}, T_i, alpha_i)`` with ``alpha_n = 0``.  The decoder reads
    ``B_i = A'_{i+1}`` and then ``alpha_i = D_i^(B_i)``.  Returns the number
    of wrongly decoded payload words and the rate ``(n - 1) eta / n``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    eta = p.eta
    rng = SplitMix64(seed)
    s0 = rng.split(1).integers(2, n)
    s1 = rng.split(2).integers(2, n)
    alpha = rng.split(3).integers(1 << eta, n)
    alpha[-1] = 0
    t = _kernels.ex2_help(s0, s1)
    a, b = t[:-1], t[1:]
    a_out, d0, d1 = sample_ex2_outputs(eta, a, b, alpha, s0, s1, rng.split(4))
    b_hat = a_out[1:]
    alpha_hat = np.where(b_hat == 0, d0[:-1], d1[:-1])
    errors = int(np.count_nonzero(alpha_hat != alpha[:-1]))
    return errors, (n - 1) * eta / n


def _state_table():
    return [(si >> 1, si & 1) for si in range(4)]


def _max_e_given_t(h: HelperMap, t: str) -> float:
    """``max_x P(E = 1 | T = t, X = x)`` with ``E = [B == S^(A)]``."""
    states = [st for st, tt in zip(_state_table(), h.table) if tt == t]
    best = 0.0
    for a in (0, 1):
        for b in (0, 1):
            best = max(best, sum(1 for st in states if st[a] == b) / len(states))
    return best


def ex2_sbs_bounds(p: Example2Params, delta: float = 0.25) -> list[Ex2BoundBreakdown]:
    """Closed-form upper bounds on the symbol-by-symbol capacity for the
    xor, and, s0 helpers.  The conditional probabilities of ``E`` are
    computed by enumerating the state law rather than typed in."""
    from .duality import DualityConfig, duality_upper_bound

    eta = p.eta
    log_x = eta + 2
    out = []
    h = ex2_helper(None, "xor")
    e = {t: _max_e_given_t(h, t) for t in BIT}
    p_t = {t: h.table.count(t) / 4 for t in BIT}
    bound = 1 + sum(p_t[t] * e[t] * log_x for t in BIT)
    out.append(Ex2BoundBreakdown("xor", bound, {"P(T=t)": p_t, "max P(E=1|T=t)": e, "log|X|": log_x}))

    h = ex2_helper(None, "and")
    e = {t: _max_e_given_t(h, t) for t in BIT}
    p_t = {t: h.table.count(t) / 4 for t in BIT}
    bound = p_t["1"] * log_x + p_t["0"] * (1 + e["0"] * log_x)
    out.append(Ex2BoundBreakdown("and", bound, {"P(T=t)": p_t, "max P(E=1|T=t)": e, "log|X|": log_x}))

    cfg = DualityConfig(eta, delta)
    out.append(Ex2BoundBreakdown("s0", duality_upper_bound(cfg), {"delta": delta}))
    return out


# --------------------------------------------------------------------------
# Example 3
# --------------------------------------------------------------------------


def build_example3() -> tuple[Channel, HelpAlphabet]:
    """Binary input, quaternary uniform state, output 4 bits with Y^(s) = x
    and the other three bits IID uniform."""
    x = BIT
    s = ("0", "1", "2", "3")
    y = tuple(_bits(v, 4) for v in range(16))
    w = np.zeros((4, 2, 16))
    for si in range(4):
        for xv in (0, 1):
            for yv in range(16):
                if (yv >> (3 - si)) & 1 == xv:
                    w[si, xv, yv] = 1.0 / 8
    ch = Channel(x, y, s, Pmf.uniform(s), w, t_alphabet=BIT,
                 metadata={"example": 3, "components": {"y": ["y0", "y1", "y2", "y3"]}})
    return ch, HelpAlphabet(BIT)


def ex3_helper(which: str) -> HelperMap:
    """``"pairs"``: T = 0 iff S in {0, 1}; ``"single"``: T = 0 iff S = 0."""
    s = ("0", "1", "2", "3")
    if which == "pairs":
        return HelperMap(s, BIT, ("0", "0", "1", "1"))
    if which == "single":
        return HelperMap(s, BIT, ("0", "1", "1", "1"))
    raise ValueError(which)


def ex3_no_csi_channel() -> DmcChannel:
    ch, _ = build_example3()
    return ch.averaged()


def ex3_branch_channel() -> DmcChannel:
    """Given S in {1, 2, 3}: binary input to (Y1, Y2, Y3)."""
    ch, _ = build_example3()
    avg = ch.w[1:].mean(axis=0)  # (x, 16)
    # Y0 is independent of x here; marginalize it out
    m = avg.reshape(2, 2, 8).sum(axis=1)
    return DmcChannel(ch.x_alphabet, tuple(_bits(v, 3) for v in range(8)), m)


def _uniform_input_information(m: np.ndarray) -> float:
    j = JointTable((("X", tuple(str(i) for i in range(m.shape[0]))), ("Y", tuple(str(i) for i in range(m.shape[1])))),
                   m / m.shape[0])
    return mutual_information(j, "X", "Y")


def ex3_two_letter_rate(trials: int = 1000, seed: int = 0) -> float:
    """Rate of the two-letter helper: one fully described use (1 bit) plus
    one use with no state information, averaged over the pair.

    The no-information channel commutes with flipping the input together
    with every output bit, so the uniform input is optimal and its mutual
    information is evaluated exactly.  The odd-slot recovery step is
    replayed ``trials`` times and must be error free.
    """
    ch, _ = build_example3()
    errors = ex3_odd_slot_errors(ch, trials, seed)
    if errors:
        raise AssertionError(f"odd-slot recovery failed {errors} times")
    return (1.0 + _uniform_input_information(ch.averaged().matrix)) / 2.0


def ex3_odd_slot_errors(ch: Channel, trials: int, seed: int) -> int:
    rng = SplitMix64(seed)
    s = rng.split(1).integers(4, trials)
    x = rng.split(2).integers(2, trials)
    f = rng.split(3).random(trials)
    cdf = np.cumsum(ch.w[s, x], axis=1)
    cdf /= cdf[:, -1:]
    y = (f[:, None] >= cdf).sum(axis=1)
    x_hat = (y >> (3 - s)) & 1
    return int(np.count_nonzero(x_hat != x))


def ex3_values(tol: float = DEFAULT_TOL) -> dict:
    ch, _ = build_example3()
    return {
        "pairs_helper": helper_to_both_capacity(ch, ex3_helper("pairs"), tol).value_bits,
        "single_helper": helper_to_both_capacity(ch, ex3_helper("single"), tol).value_bits,
        "no_csi": blahut_arimoto(ex3_no_csi_channel(), tol).value_bits,
        "branch": blahut_arimoto(ex3_branch_channel(), tol).value_bits,
        "two_letter": ex3_two_letter_rate(),
    }


# --------------------------------------------------------------------------
# block-Markov instantiation for Example 2
# --------------------------------------------------------------------------


def build_bungi_spec(p: Example2Params) -> BlockMarkovSpec:
    """Z uniform bit, T = S^(Z), U = (Z, C) with C uniform, X = (Z, T, C), V = T."""
    eta = p.eta
    if eta > BUNGI_ETA_MAX:
        raise ValueError(f"the dense joint needs eta <= {BUNGI_ETA_MAX}; got {eta}")
    ch, ta = build_example2(p)
    k = 1 << eta
    z = BIT
    u = tuple(f"z={zz},c={_bits(c, eta)}" for zz in (0, 1) for c in range(k))
    v = BIT
    h = {}
    for si, s in enumerate(ch.s_alphabet):
        st = (si >> 1, si & 1)
        for zz in (0, 1):
            h[(s, z[zz])] = BIT[st[zz]]
    p_u_given_z = np.zeros((2, 2 * k))
    for zz in (0, 1):
        p_u_given_z[zz, zz * k:(zz + 1) * k] = 1.0 / k
    f = {}
    for ui, ul in enumerate(u):
        zz, c = divmod(ui, k)
        for tt in (0, 1):
            f[(ul, BIT[tt])] = ch.x_alphabet[(2 * zz + tt) * k + c]
    return BlockMarkovSpec(
        z_alphabet=z, u_alphabet=u, v_alphabet=v,
        p_z=Pmf.uniform(z), h=h,
        p_u_given_z=CondPmf(z, u, p_u_given_z),
        f=f,
        p_v_given_t=CondPmf.from_map(BIT, v, {"0": "0", "1": "1"}),
        channel=ch, t=ta,
    )
