"""State-dependent DMCs: data model, JSON spec files, and channel constructions.

A channel spec is a JSON object::

    {"x": [...], "y": [...], "s": [...], "t": [...],      # "t" optional
     "p_s": [...], "w": [[[...]]], "metadata": {...}}      # "metadata" optional

with ``w[s][x][y] = W(y | x, s)`` (state-major), each ``w[s][x]`` summing
to one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .blahut import DEFAULT_TOL, CapacityReport, blahut_arimoto
from .maps import HelperMap, McStrategy
from .probcore import INPUT_TOL, CondPmf, Pmf, _labels


class ChannelSpecError(ValueError):
    """A channel spec document or object violates the channel invariants."""


class RowSumError(ChannelSpecError):
    def __init__(self, s: int, x: int, total: float):
        super().__init__(f"row w[{s}][{x}] sums to {total!r}, not 1 (state index {s}, input index {x})")
        self.index = (s, x)


@dataclass(frozen=True, eq=False)
class HelpAlphabet:
    t_alphabet: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "t_alphabet", _labels(self.t_alphabet))
        if len(self.t_alphabet) < 2:
            raise ChannelSpecError("a help alphabet needs at least two symbols")

    @classmethod
    def of_size(cls, k: int) -> "HelpAlphabet":
        return cls(tuple(str(i) for i in range(k)))

    def __len__(self):
        return len(self.t_alphabet)

    @property
    def rate_bits(self) -> float:
        return float(np.log2(len(self.t_alphabet)))


@dataclass(frozen=True, eq=False)
class Channel:
    """SD-DMC with ``w[s, x, y] = W(y | x, s)``.

    ``unreachable`` lists state labels of zero probability whose rows are
    placeholders (set by :func:`reduce_to_meta_state_channel`).
    """

    x_alphabet: tuple[str, ...]
    y_alphabet: tuple[str, ...]
    s_alphabet: tuple[str, ...]
    p_s: Pmf
    w: np.ndarray
    t_alphabet: tuple[str, ...] | None = None
    metadata: dict = field(default_factory=dict)
    unreachable: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("x_alphabet", "y_alphabet", "s_alphabet"):
            try:
                object.__setattr__(self, name, _labels(getattr(self, name)))
            except ValueError as exc:
                raise ChannelSpecError(f"{name}: {exc}") from None
        if self.p_s.alphabet != self.s_alphabet:
            raise ChannelSpecError("p_s alphabet differs from the state alphabet")
        w = np.array(self.w, dtype=np.float64)
        shape = (len(self.s_alphabet), len(self.x_alphabet), len(self.y_alphabet))
        if w.shape != shape:
            raise ChannelSpecError(f"w has shape {w.shape}, expected (|S|, |X|, |Y|) = {shape}")
        if np.any(w < 0):
            s, x, y = np.argwhere(w < 0)[0]
            raise ChannelSpecError(f"negative entry w[{s}][{x}][{y}]")
        sums = w.sum(axis=2)
        bad = np.argwhere(np.abs(sums - 1.0) > INPUT_TOL)
        if bad.size:
            s, x = bad[0]
            raise RowSumError(int(s), int(x), float(sums[s, x]))
        w.flags.writeable = False
        object.__setattr__(self, "w", w)
        if self.t_alphabet is not None:
            object.__setattr__(self, "t_alphabet", HelpAlphabet(self.t_alphabet).t_alphabet)

    @property
    def help_alphabet(self) -> HelpAlphabet | None:
        return HelpAlphabet(self.t_alphabet) if self.t_alphabet is not None else None

    def sizes(self) -> tuple[int, int, int]:
        return len(self.x_alphabet), len(self.y_alphabet), len(self.s_alphabet)

    def averaged(self) -> "DmcChannel":
        """The channel seen with no state information anywhere."""
        return DmcChannel(self.x_alphabet, self.y_alphabet, np.einsum("s,sxy->xy", self.p_s.probs, self.w))


@dataclass(frozen=True, eq=False)
class DmcChannel:
    in_alphabet: tuple[str, ...]
    out_alphabet: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        rows = CondPmf(self.in_alphabet, self.out_alphabet, self.matrix, tol=1e-10)
        object.__setattr__(self, "in_alphabet", rows.from_alphabet)
        object.__setattr__(self, "out_alphabet", rows.to_alphabet)
        object.__setattr__(self, "matrix", rows.rows)

    @property
    def rows(self) -> CondPmf:
        return CondPmf(self.in_alphabet, self.out_alphabet, self.matrix, tol=1e-10)


# --------------------------------------------------------------------------
# JSON spec documents
# --------------------------------------------------------------------------


def channel_from_dict(doc: dict) -> Channel:
    if not isinstance(doc, dict):
        raise ChannelSpecError("a channel spec must be a JSON object")
    missing = [k for k in ("x", "y", "s", "p_s", "w") if k not in doc]
    if missing:
        raise ChannelSpecError(f"channel spec is missing keys {missing}")
    s = doc["s"]
    p_s = np.asarray(doc["p_s"], dtype=np.float64)
    if p_s.shape != (len(s),):
        raise ChannelSpecError(f"p_s has {p_s.size} entries for {len(s)} states")
    if np.any(p_s < 0):
        raise ChannelSpecError(f"negative entry p_s[{int(np.argmin(p_s))}]")
    if abs(p_s.sum() - 1.0) > INPUT_TOL:
        raise ChannelSpecError(f"p_s sums to {p_s.sum()!r}")
    try:
        w = np.asarray(doc["w"], dtype=np.float64)
    except ValueError:
        raise ChannelSpecError("w is not a rectangular [s][x][y] array") from None
    return Channel(doc["x"], doc["y"], s, Pmf(s, p_s), w, doc.get("t"), dict(doc.get("metadata", {})))


def validate_and_load(spec_text: str) -> Channel:
    """Parse and validate a channel spec document given as JSON text."""
    try:
        doc = json.loads(spec_text)
    except json.JSONDecodeError as exc:
        raise ChannelSpecError(f"not valid JSON: {exc}") from None
    return channel_from_dict(doc)


def load_channel(path) -> Channel:
    return validate_and_load(Path(path).read_text(encoding="utf-8"))


def channel_to_dict(ch: Channel) -> dict:
    doc = {
        "x": list(ch.x_alphabet),
        "y": list(ch.y_alphabet),
        "s": list(ch.s_alphabet),
        "p_s": ch.p_s.probs.tolist(),
        "w": ch.w.tolist(),
    }
    if ch.t_alphabet is not None:
        doc["t"] = list(ch.t_alphabet)
    if ch.metadata:
        doc["metadata"] = ch.metadata
    return doc


def dump_channel(ch: Channel, path) -> None:
    Path(path).write_text(json.dumps(channel_to_dict(ch)) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# constructions
# --------------------------------------------------------------------------


def meta_state_law(ch: Channel, h: HelperMap) -> tuple[np.ndarray, np.ndarray]:
    """``(P_T, P_{S|T})`` for ``T = h(S)``; rows of unreachable ``t`` are zero."""
    h_idx = h.indices
    n_t = len(h.t_alphabet)
    joint = np.zeros((n_t, len(ch.s_alphabet)))
    joint[h_idx, np.arange(len(ch.s_alphabet))] = ch.p_s.probs
    p_t = joint.sum(axis=1)
    p_s_given_t = np.divide(joint, p_t[:, None], out=np.zeros_like(joint), where=p_t[:, None] > 0)
    return p_t, p_s_given_t


def reduce_to_meta_state_channel(ch: Channel, h: HelperMap) -> Channel:
    """Treat ``T = h(S)`` as the state: ``W~(y|x,t) = sum_s P(s|t) W(y|x,s)``."""
    if h.s_alphabet != ch.s_alphabet:
        raise ChannelSpecError("helper domain differs from the channel's state alphabet")
    p_t, p_s_given_t = meta_state_law(ch, h)
    w = np.einsum("ts,sxy->txy", p_s_given_t, ch.w)
    dead = p_t == 0
    w[dead] = 1.0 / len(ch.y_alphabet)
    # exact pushforward sums can drift by an ulp
    p_t = p_t / p_t.sum()
    unreachable = tuple(t for t, d in zip(h.t_alphabet, dead) if d)
    return Channel(ch.x_alphabet, ch.y_alphabet, h.t_alphabet, Pmf(h.t_alphabet, p_t), w,
                   metadata={"meta_state_of": h.describe()}, unreachable=unreachable)


def super_channel_matrix(ch: Channel, composites: np.ndarray) -> np.ndarray:
    """Rows ``sum_s P_S(s) W(y | g(s), s)`` for each row ``g`` of ``composites``
    (input index per state)."""
    n_s = len(ch.s_alphabet)
    picked = ch.w[np.arange(n_s)[None, :], composites]  # (u, s, y)
    return np.einsum("s,usy->uy", ch.p_s.probs, picked)


def super_channel(ch: Channel, strategy_family: Sequence[McStrategy]) -> DmcChannel:
    """The state-free channel from message-cognizant strategies to outputs."""
    composites = np.array([u.composite() for u in strategy_family], dtype=np.int64)
    labels = tuple(u.describe() for u in strategy_family)
    return DmcChannel(labels, ch.y_alphabet, super_channel_matrix(ch, composites))


def sum_channel_capacity(caps: Sequence[float]) -> float:
    caps = np.asarray(list(caps), dtype=np.float64)
    if caps.size == 0:
        raise ValueError("a sum channel needs at least one sub-channel")
    if np.any(caps < 0):
        raise ValueError("sub-channel capacities must be nonnegative")
    top = caps.max()
    return float(top + np.log2(np.exp2(caps - top).sum()))


def full_csi_capacity(ch: Channel, tol: float = DEFAULT_TOL) -> CapacityReport:
    """``max_{P_{X|S}} I(X;Y|S)``: state known at encoder and decoder."""
    per_state = {}
    laws = np.zeros((len(ch.s_alphabet), len(ch.x_alphabet)))
    value = gap = 0.0
    iters = 0
    for i, s in enumerate(ch.s_alphabet):
        rep = blahut_arimoto(DmcChannel(ch.x_alphabet, ch.y_alphabet, ch.w[i]), tol=tol)
        per_state[s] = rep.value_bits
        laws[i] = rep.input_pmf.probs
        value += ch.p_s.probs[i] * rep.value_bits
        gap += ch.p_s.probs[i] * rep.final_gap
        iters = max(iters, rep.iterations)
    p_x = ch.p_s.probs @ laws
    return CapacityReport(value, "P_{X|S} per state", Pmf(ch.x_alphabet, p_x / p_x.sum()), iters,
                          gap, tol, {"per_state": per_state, "p_x_given_s": laws})
