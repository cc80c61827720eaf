"""Seeded random channels for property tests and the repro table."""
from __future__ import annotations

import numpy as np

from .channels import Channel
from .probcore import Pmf


def _labels(prefix: str, k: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(k))


def random_channel(rng: np.random.Generator, max_size: int = 3, n_t: int = 2) -> Channel:
    """Dirichlet(1) rows and state law; each alphabet has 2..max_size symbols."""
    nx, ny, ns = (int(v) for v in rng.integers(2, max_size + 1, size=3))
    w = rng.dirichlet(np.ones(ny), size=(ns, nx))
    s = _labels("s", ns)
    return Channel(_labels("x", nx), _labels("y", ny), s, Pmf(s, rng.dirichlet(np.ones(ns))), w,
                   t_alphabet=_labels("t", n_t))


def random_positivity_channel(seed: int, max_size: int = 4) -> Channel:
    """A channel drawn so that zero and positive capacity both occur often.

    Kinds, chosen uniformly: generic rows; every state's rows identical
    (capacity 0 however the state is used); identical rows except in one
    state; identical rows except in a state of probability zero (capacity 0).
    """
    rng = np.random.default_rng(seed)
    nx, ny, ns = (int(v) for v in rng.integers(2, max_size + 1, size=3))
    kind = int(rng.integers(0, 4))
    p_s = 0.5 * rng.dirichlet(np.ones(ns)) + 0.5 / ns
    w = rng.dirichlet(np.ones(ny), size=(ns, nx))
    if kind > 0:
        w[:] = w[:, :1, :]
    special = int(rng.integers(0, ns))
    if kind >= 2:
        w[special] = rng.dirichlet(np.ones(ny), size=nx)
    if kind == 3:
        p_s[special] = 0.0
    p_s /= p_s.sum()
    s = _labels("s", ns)
    return Channel(_labels("x", nx), _labels("y", ny), s, Pmf(s, p_s), w, t_alphabet=("0", "1"),
                   metadata={"kind": ("generic", "flat", "one-state", "unreachable-state")[kind]})
