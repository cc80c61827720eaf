"""Finite-alphabet probability tables and the information measures on them.

All logarithms are base 2.  ``0 log 0`` is taken as 0; a KL divergence with
``p(a) > 0 = q(a)`` raises :class:`InfiniteDivergence` instead of returning
``inf``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels

INPUT_TOL = 1e-12
DERIVED_TOL = 1e-10
MI_CLAMP = 1e-10
MARKOV_TOL = 1e-9
DEFAULT_EPS = 0.1


class ProbabilityError(ValueError):
    """A table violates a probability invariant."""


class InfiniteDivergence(ArithmeticError):
    """``D(p||q)`` is infinite because ``p`` is not absolutely continuous w.r.t. ``q``."""

    def __init__(self, symbol):
        super().__init__(f"p({symbol!r}) > 0 but q({symbol!r}) = 0")
        self.symbol = symbol


def _labels(alphabet: Iterable) -> tuple[str, ...]:
    labels = tuple(str(a) for a in alphabet)
    if len(set(labels)) != len(labels):
        raise ProbabilityError(f"alphabet labels are not unique: {labels}")
    return labels


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.flags.writeable = False
    return arr


def _xlogx_sum(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


@dataclass(frozen=True, eq=False)
class Pmf:
    alphabet: tuple[str, ...]
    probs: np.ndarray
    tol: float = field(default=INPUT_TOL, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _labels(self.alphabet))
        probs = _frozen(self.probs)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size != len(self.alphabet):
            raise ProbabilityError("probs must be a vector matching the alphabet")
        if np.any(probs < 0):
            raise ProbabilityError(f"negative probability at index {int(np.argmin(probs))}")
        if abs(probs.sum() - 1.0) > self.tol:
            raise ProbabilityError(f"probabilities sum to {probs.sum()!r}, not 1")

    @classmethod
    def uniform(cls, alphabet: Sequence) -> "Pmf":
        return cls(tuple(alphabet), np.full(len(alphabet), 1.0 / len(alphabet)))

    @classmethod
    def point(cls, alphabet: Sequence, symbol) -> "Pmf":
        labels = _labels(alphabet)
        p = np.zeros(len(labels))
        p[labels.index(str(symbol))] = 1.0
        return cls(labels, p)

    @classmethod
    def bernoulli(cls, p1: float) -> "Pmf":
        return cls(("0", "1"), [1.0 - p1, p1])

    def __len__(self):
        return len(self.alphabet)

    def index(self, symbol) -> int:
        return self.alphabet.index(str(symbol))

    def __getitem__(self, symbol) -> float:
        return float(self.probs[self.index(symbol)])


@dataclass(frozen=True, eq=False)
class CondPmf:
    """Rows ``P(to | from)``; one row per ``from`` symbol."""

    from_alphabet: tuple[str, ...]
    to_alphabet: tuple[str, ...]
    rows: np.ndarray
    deterministic: bool = False
    tol: float = field(default=INPUT_TOL, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "from_alphabet", _labels(self.from_alphabet))
        object.__setattr__(self, "to_alphabet", _labels(self.to_alphabet))
        rows = _frozen(self.rows)
        object.__setattr__(self, "rows", rows)
        if rows.shape != (len(self.from_alphabet), len(self.to_alphabet)):
            raise ProbabilityError(f"rows have shape {rows.shape}, expected "
                                   f"{(len(self.from_alphabet), len(self.to_alphabet))}")
        if np.any(rows < 0):
            i, j = np.argwhere(rows < 0)[0]
            raise ProbabilityError(f"negative entry in row {i}, column {j}")
        bad = np.flatnonzero(np.abs(rows.sum(axis=1) - 1.0) > self.tol)
        if bad.size:
            raise ProbabilityError(f"row {int(bad[0])} sums to {rows[bad[0]].sum()!r}")
        if self.deterministic and not np.all((rows == 0) | (rows == 1)):
            raise ProbabilityError("deterministic flag set but a row is not a point mass")

    @classmethod
    def from_map(cls, from_alphabet: Sequence, to_alphabet: Sequence, mapping) -> "CondPmf":
        """Deterministic kernel from a callable or a mapping ``from -> to``."""
        fa, ta = _labels(from_alphabet), _labels(to_alphabet)
        rows = np.zeros((len(fa), len(ta)))
        for i, a in enumerate(fa):
            b = mapping(a) if callable(mapping) else mapping[a]
            rows[i, ta.index(str(b))] = 1.0
        return cls(fa, ta, rows, deterministic=True)

    def row(self, symbol) -> Pmf:
        return Pmf(self.to_alphabet, self.rows[self.from_alphabet.index(str(symbol))])

    @property
    def is_point_mass(self) -> bool:
        return bool(np.all((self.rows == 0) | (self.rows == 1)))


@dataclass(frozen=True, eq=False)
class JointTable:
    """Dense joint PMF; ``axes`` is a tuple of ``(name, alphabet)`` pairs."""

    axes: tuple[tuple[str, tuple[str, ...]], ...]
    probs: np.ndarray
    tol: float = field(default=DERIVED_TOL, repr=False, compare=False)

    def __post_init__(self):
        axes = tuple((str(name), _labels(alph)) for name, alph in self.axes)
        object.__setattr__(self, "axes", axes)
        names = [a[0] for a in axes]
        if len(set(names)) != len(names):
            raise ProbabilityError(f"axis names are not unique: {names}")
        probs = _frozen(self.probs)
        object.__setattr__(self, "probs", probs)
        if probs.shape != tuple(len(a[1]) for a in axes):
            raise ProbabilityError(f"table shape {probs.shape} does not match axes")
        if np.any(probs < 0):
            raise ProbabilityError("negative entry in joint table")
        if abs(probs.sum() - 1.0) > self.tol:
            raise ProbabilityError(f"joint table mass is {probs.sum()!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a[0] for a in self.axes)

    def alphabet(self, name: str) -> tuple[str, ...]:
        return self.axes[self._axis(name)][1]

    def _axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown axis {name!r}; axes are {self.names}") from None

    def marginal(self, names: Sequence[str]) -> "JointTable":
        """Marginal over ``names``, with axes in the order given."""
        idx = [self._axis(n) for n in names]
        if len(set(idx)) != len(idx):
            raise ProbabilityError(f"repeated axis in {list(names)}")
        drop = tuple(i for i in range(len(self.axes)) if i not in idx)
        p = self.probs.sum(axis=drop) if drop else self.probs
        kept = sorted(idx)
        p = np.transpose(p, [kept.index(i) for i in idx])
        return JointTable(tuple(self.axes[i] for i in idx), p, tol=self.tol)

    def entropy(self, names: Sequence[str] = ()) -> float:
        names = tuple(names) or self.names
        return _xlogx_sum(self.marginal(names).probs)


def entropy(p: Pmf) -> float:
    """Shannon entropy in bits."""
    return _xlogx_sum(p.probs)


def _check_groups(j: JointTable, *groups) -> list[tuple[str, ...]]:
    out = []
    seen: set[str] = set()
    for g in groups:
        g = (g,) if isinstance(g, str) else tuple(g)
        for name in g:
            j._axis(name)
            if name in seen:
                raise ProbabilityError(f"axis {name!r} appears in more than one group")
            seen.add(name)
        out.append(g)
    return out


def _clamp(value: float) -> float:
    if value < 0:
        if value < -MI_CLAMP:
            raise ArithmeticError(f"mutual information {value} is materially negative")
        return 0.0
    return value


def mutual_information(j: JointTable, group_a, group_b) -> float:
    a, b = _check_groups(j, group_a, group_b)
    if not a or not b:
        raise ProbabilityError("mutual information needs two nonempty groups")
    return _clamp(j.entropy(a) + j.entropy(b) - j.entropy(a + b))


def conditional_mutual_information(j: JointTable, group_a, group_b, group_c) -> float:
    """``I(A;B|C)``; an empty ``C`` reduces to plain mutual information."""
    a, b, c = _check_groups(j, group_a, group_b, group_c)
    if not a or not b:
        raise ProbabilityError("mutual information needs two nonempty groups")
    if not c:
        return mutual_information(j, a, b)
    value = j.entropy(a + c) + j.entropy(b + c) - j.entropy(a + b + c) - j.entropy(c)
    return _clamp(value)


def conditional_entropy(j: JointTable, group_a, group_c) -> float:
    a, c = _check_groups(j, group_a, group_c)
    if not c:
        return j.entropy(a)
    return max(j.entropy(a + c) - j.entropy(c), 0.0)


def kl_divergence(p: Pmf, q: Pmf) -> float:
    if p.alphabet != q.alphabet:
        raise ProbabilityError("KL divergence needs a common alphabet")
    return kl_array(p.probs, q.probs, p.alphabet)


def kl_array(p: np.ndarray, q: np.ndarray, alphabet: Sequence | None = None) -> float:
    """``D(p||q)`` in bits on raw vectors."""
    pos = p > 0
    bad = pos & (q <= 0)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise InfiniteDivergence(alphabet[i] if alphabet is not None else i)
    return max(float((p[pos] * np.log2(p[pos] / q[pos])).sum()), 0.0)


def check_markov(j: JointTable, group_a, group_b, group_c, tol: float = MARKOV_TOL) -> bool:
    """True iff ``A - B - C`` forms a Markov chain, i.e. ``I(A;C|B) <= tol``."""
    return conditional_mutual_information(j, group_a, group_c, group_b) <= tol


# --------------------------------------------------------------------------
# typicality
# --------------------------------------------------------------------------


def _codes(seq, alphabet: tuple[str, ...]) -> np.ndarray:
    arr = np.asarray(seq)
    if arr.size == 0:
        raise ValueError("typicality of an empty sequence is undefined")
    if np.issubdtype(arr.dtype, np.integer):
        if arr.min() < 0 or arr.max() >= len(alphabet):
            raise ValueError("symbol index out of range")
        return arr.astype(np.int64).ravel()
    lookup = {a: i for i, a in enumerate(alphabet)}
    try:
        return np.array([lookup[str(s)] for s in arr.ravel()], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"symbol {exc.args[0]!r} is not in the alphabet") from None


def is_typical(seq, p: Pmf, eps: float = DEFAULT_EPS) -> bool:
    """Robust typicality: ``|freq(a)/n - p(a)| <= eps p(a)`` for every symbol.

    ``seq`` may hold labels or integer indices into ``p.alphabet``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    return bool(_kernels.typical_counts(_codes(seq, p.alphabet), np.ascontiguousarray(p.probs), eps))


def is_jointly_typical(seqs: Mapping[str, object], j: JointTable, eps: float = DEFAULT_EPS) -> bool:
    """Robust joint typicality of equal-length sequences, one per axis name,
    with respect to the marginal of ``j`` on those axes."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    names = tuple(seqs)
    marg = j.marginal(names)
    cols = [_codes(seqs[name], marg.alphabet(name)) for name in names]
    n = cols[0].size
    if any(c.size != n for c in cols):
        raise ValueError("sequences must share one length")
    flat = np.ravel_multi_index(cols, marg.probs.shape)
    return bool(_kernels.typical_counts(flat, np.ascontiguousarray(marg.probs.ravel()), eps))
