"""Blahut-Arimoto with a certified capacity gap."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import _kernels
from .probcore import Pmf

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 100_000
_DEDUP_DECIMALS = 14


class NonConvergence(RuntimeError):
    def __init__(self, gap: float, iterations: int, tol: float):
        super().__init__(f"Blahut-Arimoto stopped after {iterations} iterations with gap {gap:.3e} > {tol:.1e}")
        self.gap = gap
        self.iterations = iterations


@dataclass(frozen=True, eq=False)
class CapacityReport:
    value_bits: float
    argmax_object: Any
    input_pmf: Pmf | None
    iterations: int
    final_gap: float
    tolerance: float
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.value_bits < 0:
            raise ValueError("capacity cannot be negative")
        if self.final_gap > self.tolerance:
            raise ValueError("report gap exceeds its tolerance")

    def __float__(self):
        return float(self.value_bits)


def _matrix_and_labels(ch):
    if hasattr(ch, "matrix"):
        return np.asarray(ch.matrix, dtype=np.float64), tuple(ch.in_alphabet)
    w = np.asarray(ch, dtype=np.float64)
    return w, tuple(str(i) for i in range(w.shape[0]))


def capacity_bounds(w: np.ndarray, r: np.ndarray) -> tuple[float, float]:
    """Lower ``I(r, w)`` and upper ``max_x D(w_x || r w)`` for an input law ``r``."""
    q = r @ w
    pos = w > 0
    ratio = np.where(pos, w, 1.0) / np.where(q > 0, q, 1.0)[None, :]
    d = np.where(pos, w * np.log2(ratio), 0.0).sum(axis=1)
    return float(r @ d), float(d.max())


def blahut_arimoto(ch, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> CapacityReport:
    """Capacity of a DMC (a :class:`~helperdmc.channels.DmcChannel` or a
    row-stochastic matrix).

    Identical rows are merged before iterating; the returned input law puts
    each merged group's mass on its first member.  The value reported is
    the lower bound ``I(r; w)`` of the final iterate ``r``; the upper bound
    ``max_x D(w_x || q)`` is within ``tol`` of it.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w, labels = _matrix_and_labels(ch)
    _, first = np.unique(np.round(w, _DEDUP_DECIMALS), axis=0, return_index=True)
    if first.size == 1:
        r_full = np.zeros(w.shape[0])
        r_full[0] = 1.0
        return CapacityReport(0.0, None, Pmf(labels, r_full), 0, 0.0, tol)
    order = np.argsort(first)
    reps = first[order]
    w_red = np.ascontiguousarray(w[reps])
    r, lower, upper, it = _kernels.ba(w_red, float(tol), int(max_iter))
    gap = upper - lower
    if gap > tol:
        raise NonConvergence(gap, it, tol)
    r_full = np.zeros(w.shape[0])
    r_full[reps] = r
    r_full /= r_full.sum()
    return CapacityReport(lower, None, Pmf(labels, r_full), it, max(gap, 0.0), tol,
                          {"upper_bits": upper, "distinct_rows": int(reps.size)})
