import numpy as np
import pytest

from helperdmc.channels import Channel
from helperdmc.examples import Example2Params, build_bungi_spec, build_example1
from helperdmc.probcore import Pmf


@pytest.fixture(scope="session")
def ex1():
    return build_example1()


@pytest.fixture(scope="session")
def bungi1():
    return build_bungi_spec(Example2Params(1))


def make_channel(w, p_s=None, t=None) -> Channel:
    """Channel from a ``w[s][x][y]`` array with default labels."""
    w = np.asarray(w, dtype=float)
    ns, nx, ny = w.shape
    s = tuple(f"s{i}" for i in range(ns))
    p = Pmf.uniform(s) if p_s is None else Pmf(s, p_s)
    return Channel(tuple(f"x{i}" for i in range(nx)), tuple(f"y{i}" for i in range(ny)), s, p, w, t_alphabet=t)


def bsc(p: float) -> np.ndarray:
    return np.array([[1 - p, p], [p, 1 - p]])


def h2(p: float) -> float:
    return 0.0 if p in (0.0, 1.0) else float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))
