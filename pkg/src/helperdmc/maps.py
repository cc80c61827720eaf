"""Deterministic helper maps and Shannon strategies, plus their enumerations."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


class EnumerationCapExceeded(RuntimeError):
    def __init__(self, what: str, count: int, cap: int):
        super().__init__(
            f"{what}: {count} objects to enumerate exceeds the cap of {cap}; "
            "restrict the alphabets, enable symmetry reduction, or use a structured evaluator"
        )
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class HelperMap:
    """Symbol-by-symbol help ``h: S -> T``; ``table[i]`` is ``h(s_alphabet[i])``."""

    s_alphabet: tuple[str, ...]
    t_alphabet: tuple[str, ...]
    table: tuple[str, ...]
    time_invariant: bool = True

    def __post_init__(self):
        if len(self.table) != len(self.s_alphabet):
            raise ValueError("helper table must be total on the state alphabet")
        for t in self.table:
            if t not in self.t_alphabet:
                raise ValueError(f"help symbol {t!r} is not in {self.t_alphabet}")

    @classmethod
    def from_indices(cls, s_alphabet, t_alphabet, idx: Sequence[int]) -> "HelperMap":
        return cls(tuple(s_alphabet), tuple(t_alphabet), tuple(t_alphabet[i] for i in idx))

    @property
    def indices(self) -> np.ndarray:
        return np.array([self.t_alphabet.index(t) for t in self.table], dtype=np.int64)

    def __call__(self, s: str) -> str:
        return self.table[self.s_alphabet.index(s)]

    def describe(self) -> str:
        return ",".join(f"{s}->{t}" for s, t in zip(self.s_alphabet, self.table))


@dataclass(frozen=True)
class Strategy:
    """Shannon strategy over help ``u: T -> X``."""

    t_alphabet: tuple[str, ...]
    x_alphabet: tuple[str, ...]
    table: tuple[str, ...]

    def __post_init__(self):
        if len(self.table) != len(self.t_alphabet):
            raise ValueError("strategy table must be total on the help alphabet")
        for x in self.table:
            if x not in self.x_alphabet:
                raise ValueError(f"input symbol {x!r} is not in {self.x_alphabet}")

    @classmethod
    def from_indices(cls, t_alphabet, x_alphabet, idx: Sequence[int]) -> "Strategy":
        return cls(tuple(t_alphabet), tuple(x_alphabet), tuple(x_alphabet[i] for i in idx))

    @property
    def indices(self) -> np.ndarray:
        return np.array([self.x_alphabet.index(x) for x in self.table], dtype=np.int64)

    def __call__(self, t: str) -> str:
        return self.table[self.t_alphabet.index(t)]

    def describe(self) -> str:
        return ",".join(f"{t}->{x}" for t, x in zip(self.t_alphabet, self.table))


@dataclass(frozen=True)
class McStrategy:
    """A message-cognizant pair: help rule ``S -> T`` and input rule ``T -> X``."""

    help_rule: HelperMap
    input_rule: Strategy

    def composite(self) -> np.ndarray:
        """Input index chosen in each state."""
        return self.input_rule.indices[self.help_rule.indices]

    def describe(self) -> str:
        return f"[{self.help_rule.describe()}|{self.input_rule.describe()}]"


def count_maps(domain: int, codomain: int) -> int:
    return codomain ** domain


def map_tables(domain: int, codomain: int) -> np.ndarray:
    """All maps ``range(domain) -> range(codomain)`` as rows, lexicographic."""
    return np.array(list(itertools.product(range(codomain), repeat=domain)), dtype=np.int64).reshape(
        -1, domain
    )


def iter_helpers(s_alphabet, t_alphabet) -> Iterator[HelperMap]:
    for idx in itertools.product(range(len(t_alphabet)), repeat=len(s_alphabet)):
        yield HelperMap.from_indices(s_alphabet, t_alphabet, idx)


def iter_strategies(t_alphabet, x_alphabet) -> Iterator[Strategy]:
    for idx in itertools.product(range(len(x_alphabet)), repeat=len(t_alphabet)):
        yield Strategy.from_indices(t_alphabet, x_alphabet, idx)


def canonical_helper(idx: Sequence[int]) -> tuple[int, ...]:
    """Representative of a helper table under relabelling of the help alphabet:
    help symbols renumbered in order of first appearance."""
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(i, len(seen)) for i in idx)
