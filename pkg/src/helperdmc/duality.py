"""Duality upper bound for Example 2 with the helper ``T = S^(0)``.

Any output law ``Q`` gives ``C <= max_u D(P_{Y|U}(.|u) || Q)``.  Here ``Q``
makes ``A'`` a Bernoulli(delta) bit and ``D0``, ``D1`` independent uniform
``eta``-bit words.  A Shannon strategy ``u = (a0, b0, c0, a1, b1, c1)``
sends ``(a_t, b_t, c_t)`` when the help is ``t``.  The divergence depends on
``u`` mainly through its pattern ``(a0, a1, b0, b1)``; each of the 16
patterns has a closed-form bound, and the capacity bound is their maximum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .examples import DENSE_ETA_MAX, ex2_output_law
from .probcore import kl_array
from .tables import to_csv

DELTA_GRID_MIN = 1e-15


@dataclass(frozen=True)
class DualityConfig:
    eta: int
    delta: float = 0.25

    def __post_init__(self):
        if self.eta < 1:
            raise ValueError("eta must be at least 1")
        if not 0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")


@dataclass(frozen=True)
class ShannonStrategyEx2:
    a0: int
    b0: int
    c0: int
    a1: int
    b1: int
    c1: int

    @property
    def pattern(self) -> tuple[int, int, int, int]:
        return (self.a0, self.a1, self.b0, self.b1)

    def describe(self) -> str:
        return f"a0={self.a0} b0={self.b0} c0={self.c0} a1={self.a1} b1={self.b1} c1={self.c1}"


def strategy_patterns() -> list[tuple[int, int, int, int]]:
    """All ``(a0, a1, b0, b1)`` in lexicographic order."""
    return list(itertools.product((0, 1), repeat=4))


def canonical_strategies(eta: int) -> list[ShannonStrategyEx2]:
    """16 patterns times 4 payload pairs ``(c0, c1)`` drawn from ``{0, 2^eta - 1}``,
    covering equal and distinct payloads."""
    top = (1 << eta) - 1
    out = []
    for a0, a1, b0, b1 in strategy_patterns():
        for c0, c1 in itertools.product((0, top), repeat=2):
            out.append(ShannonStrategyEx2(a0, b0, c0, a1, b1, c1))
    return out


CLASS_BOUNDS = {
    "tight": lambda eta, d: eta + 2.0 ** -eta - 1 + math.log2(1 / (1 - d)),
    "always-bad": lambda eta, d: math.log2(1 / d),
    "half": lambda eta, d: eta / 2 + math.log2(1 / d),
    "three-quarter": lambda eta, d: 3 * eta / 4 + math.log2(1 / d),
    "quarter": lambda eta, d: eta / 4 + math.log2(1 / d),
}


def pattern_class(pattern) -> str:
    """Case of the ``(a0, a1, b0, b1)`` pattern; total over all 16 patterns."""
    a0, a1, b0, b1 = (int(v) for v in pattern)
    if (a0, a1) == (0, 0):
        return {(0, 1): "tight", (1, 0): "always-bad"}.get((b0, b1), "half")
    if (a0, a1) == (1, 1):
        return "half"
    # mixed: one help value reads S^(0) (known), the other S^(1) (unknown)
    known_b = b0 if a0 == 0 else b1
    wanted = 0 if a0 == 0 else 1
    return "three-quarter" if known_b == wanted else "quarter"


def class_bound(u, cfg: DualityConfig) -> tuple[str, float]:
    """``(class id, bound)`` for a strategy or a bare ``(a0, a1, b0, b1)``
    pattern; the bound holds for every strategy in the class."""
    pattern = u.pattern if isinstance(u, ShannonStrategyEx2) else tuple(u)
    cls = pattern_class(pattern)
    return cls, CLASS_BOUNDS[cls](cfg.eta, cfg.delta)


def tight_pattern(pattern) -> bool:
    """Whether the class bound is the exact divergence (not a convexity bound)."""
    return pattern_class(pattern) == "tight"


def q_output_law(cfg: DualityConfig) -> np.ndarray:
    """``Q`` on the dense Example 2 output alphabet (index ``(a' 2^eta + d0) 2^eta + d1``)."""
    k = 1 << cfg.eta
    q = np.empty(2 * k * k)
    q[: k * k] = (1 - cfg.delta) / (k * k)
    q[k * k:] = cfg.delta / (k * k)
    return q


def strategy_output_law(u: ShannonStrategyEx2, eta: int) -> np.ndarray:
    """``P_{Y|U}(.|u)`` with ``S^(0)`` and ``S^(1)`` independent fair bits."""
    out = 0.0
    for s0 in (0, 1):
        a, b, c = (u.a0, u.b0, u.c0) if s0 == 0 else (u.a1, u.b1, u.c1)
        for s1 in (0, 1):
            out = out + 0.25 * ex2_output_law(eta, a, b, c, s0, s1)
    return out


def exact_kl_for_strategy(u: ShannonStrategyEx2, cfg: DualityConfig) -> float:
    if cfg.eta > DENSE_ETA_MAX:
        raise ValueError(f"exact divergences need eta <= {DENSE_ETA_MAX}")
    return kl_array(strategy_output_law(u, cfg.eta), q_output_law(cfg))


def duality_upper_bound(cfg: DualityConfig) -> float:
    """``max`` of the 16 class bounds."""
    return max(class_bound(p, cfg)[1] for p in strategy_patterns())


def optimized_duality_bound(eta: int) -> tuple[float, float]:
    """``min_delta`` of :func:`duality_upper_bound` and the minimizing delta.

    The bound is the larger of an increasing and a decreasing function of
    delta, so the optimum is at their crossing when one exists."""
    first = lambda d: CLASS_BOUNDS["tight"](eta, d)
    rest = lambda d: max(CLASS_BOUNDS[c](eta, d) for c in CLASS_BOUNDS if c != "tight")
    lo, hi = DELTA_GRID_MIN, 0.5 - 1e-12
    g = lambda d: first(d) - rest(d)
    if g(lo) >= 0:
        d = lo
    elif g(hi) <= 0:
        d = hi
    else:
        d = brentq(g, lo, hi, xtol=1e-15, rtol=1e-14)
    return duality_upper_bound(DualityConfig(eta, d)), d


def generic_duality_bound(ch, q) -> float:
    """``max_u D(W(.|u) || q)`` for any DMC (``DmcChannel`` or row matrix) and
    output law (``Pmf`` or array).  Raises ``InfiniteDivergence`` when ``q``
    misses part of some row's support."""
    rows = np.asarray(getattr(ch, "matrix", ch), dtype=np.float64)
    q = np.asarray(getattr(q, "probs", q), dtype=np.float64)
    return max(kl_array(r, q) for r in rows)


def duality_rows(cfg: DualityConfig) -> list[dict]:
    """Per-strategy table: pattern, exact divergence, class bound."""
    out = []
    for u in canonical_strategies(cfg.eta):
        kl = exact_kl_for_strategy(u, cfg)
        cls, cb = class_bound(u, cfg)
        out.append({"eta": cfg.eta, "delta": cfg.delta, "a0": u.a0, "a1": u.a1, "b0": u.b0, "b1": u.b1,
                    "c0": u.c0, "c1": u.c1, "class": cls, "exact_kl": kl, "class_bound": cb,
                    "tight": tight_pattern(u.pattern)})
    return out


def duality_csv(rows: list[dict]) -> str:
    return to_csv(rows)
