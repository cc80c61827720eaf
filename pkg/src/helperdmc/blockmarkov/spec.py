"""Joint law of the block-Markov scheme and its achievable rate.

The scheme fixes auxiliaries ``Z`` (cloud centre), ``U`` (satellite) and
``V`` (Wyner-Ziv description of the help) with joint law

    P_S(s) P_Z(z) 1{t = h(s, z)} P_{U|Z}(u|z) 1{x = f(u, t)} P_{V|T}(v|t) W(y|x, s)

and achieves any rate below ``min{I(U;Y|V,Z), I(U,Z;V,Y) - I(V;T|Y)}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..channels import Channel, HelpAlphabet, load_channel
from ..randgen import random_channel
from ..probcore import (
    CondPmf,
    JointTable,
    Pmf,
    conditional_mutual_information,
    mutual_information,
)

AXES = ("S", "Z", "T", "U", "X", "V", "Y")
JOINT_CAP = 50_000_000  # dense entries
DOMINANCE_SLACK = 1e-6


class JointTooLarge(MemoryError):
    def __init__(self, entries: int, cap: int):
        super().__init__(f"dense joint needs {entries} entries; the cap is {cap}")
        self.entries = entries
        self.cap = cap


class EmptyRateRegion(ValueError):
    """No rate tuple satisfies the scheme's constraints."""


def _table(mapping, rows, cols, values, what) -> np.ndarray:
    """Index table ``out[i, j]`` for a total map given as a dict keyed by
    label pairs or as a nested list of labels."""
    out = np.empty((len(rows), len(cols)), dtype=np.int64)
    for i, r in enumerate(rows):
        for j, c in enumerate(cols):
            try:
                v = mapping[(r, c)] if isinstance(mapping, dict) else mapping[i][j]
            except (KeyError, IndexError):
                raise ValueError(f"{what} is not defined at ({r!r}, {c!r})") from None
            v = str(v)
            if v not in values:
                raise ValueError(f"{what}({r!r}, {c!r}) = {v!r} is not in {values}")
            out[i, j] = values.index(v)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class BlockMarkovSpec:
    """Auxiliary alphabets and kernels of the scheme.

    ``h`` maps ``(s, z)`` label pairs to help labels and ``f`` maps
    ``(u, t)`` pairs to input labels; either may instead be a nested list
    ``h[s_index][z_index]``.  Index tables are kept in ``h_idx``/``f_idx``.
    """

    z_alphabet: tuple[str, ...]
    u_alphabet: tuple[str, ...]
    v_alphabet: tuple[str, ...]
    p_z: Pmf
    h: object
    p_u_given_z: CondPmf
    f: object
    p_v_given_t: CondPmf
    channel: Channel
    t: HelpAlphabet

    def __post_init__(self):
        for name in ("z_alphabet", "u_alphabet", "v_alphabet"):
            object.__setattr__(self, name, tuple(str(a) for a in getattr(self, name)))
        ch, ta = self.channel, self.t.t_alphabet
        if self.p_z.alphabet != self.z_alphabet:
            raise ValueError("p_z alphabet differs from z_alphabet")
        if (self.p_u_given_z.from_alphabet, self.p_u_given_z.to_alphabet) != (self.z_alphabet, self.u_alphabet):
            raise ValueError("p_u_given_z must map z_alphabet to u_alphabet")
        if (self.p_v_given_t.from_alphabet, self.p_v_given_t.to_alphabet) != (ta, self.v_alphabet):
            raise ValueError("p_v_given_t must map the help alphabet to v_alphabet")
        object.__setattr__(self, "h_idx", _table(self.h, ch.s_alphabet, self.z_alphabet, ta, "h"))
        object.__setattr__(self, "f_idx", _table(self.f, self.u_alphabet, ta, ch.x_alphabet, "f"))

    def sizes(self) -> dict[str, int]:
        nx, ny, ns = self.channel.sizes()
        return {"S": ns, "Z": len(self.z_alphabet), "T": len(self.t), "U": len(self.u_alphabet),
                "X": nx, "V": len(self.v_alphabet), "Y": ny}


@dataclass(frozen=True)
class RateTuple:
    r: float
    r_v: float
    r_tilde: float

    def __post_init__(self):
        if min(self.r, self.r_v, self.r_tilde) < 0:
            raise ValueError("rates must be nonnegative")


# --------------------------------------------------------------------------
# joint law and rate
# --------------------------------------------------------------------------


def bm_joint(spec: BlockMarkovSpec, cap: int = JOINT_CAP) -> JointTable:
    """Dense joint over ``(S, Z, T, U, X, V, Y)``."""
    sz = spec.sizes()
    entries = int(np.prod([sz[a] for a in AXES], dtype=np.int64))
    if entries > cap:
        raise JointTooLarge(entries, cap)
    ch = spec.channel
    ns, nz, nt, nu, nx = sz["S"], sz["Z"], sz["T"], sz["U"], sz["X"]
    hmat = np.zeros((ns, nz, nt))
    hmat[np.arange(ns)[:, None], np.arange(nz)[None, :], spec.h_idx] = 1.0
    fmat = np.zeros((nu, nt, nx))
    fmat[np.arange(nu)[:, None], np.arange(nt)[None, :], spec.f_idx] = 1.0
    # build up factor by factor; each step is one broadcast product
    p = ch.p_s.probs[:, None] * spec.p_z.probs[None, :]                    # s z
    p = p[:, :, None] * hmat                                               # s z t
    p = p[:, :, :, None] * spec.p_u_given_z.rows[None, :, None, :]         # s z t u
    p = p[..., None] * fmat.transpose(1, 0, 2)[None, None, :, :, :]        # s z t u x
    p = p[..., None] * spec.p_v_given_t.rows[None, None, :, None, None, :]  # s z t u x v
    p = p[..., None] * ch.w[:, None, None, None, :, None, :]               # s z t u x v y
    alph = (ch.s_alphabet, spec.z_alphabet, spec.t.t_alphabet, spec.u_alphabet, ch.x_alphabet,
            spec.v_alphabet, ch.y_alphabet)
    return JointTable(tuple(zip(AXES, alph)), p)


def rate_information(spec_or_joint) -> dict[str, float]:
    """Every information quantity the rate constraints refer to."""
    j = spec_or_joint if isinstance(spec_or_joint, JointTable) else bm_joint(spec_or_joint)
    return {
        "I(U;Y|V,Z)": conditional_mutual_information(j, "U", "Y", ("V", "Z")),
        "I(U,Z;V,Y)": mutual_information(j, ("U", "Z"), ("V", "Y")),
        "I(V;T|Y)": conditional_mutual_information(j, "V", "T", "Y"),
        "I(V;T)": mutual_information(j, "V", "T"),
        "I(V;Y)": mutual_information(j, "V", "Y"),
        "I(U,Z;Y)": mutual_information(j, ("U", "Z"), "Y"),
    }


def bm_rate(spec: BlockMarkovSpec) -> tuple[float, tuple[float, float, float]]:
    """``(rate, (I(U;Y|V,Z), I(U,Z;V,Y), I(V;T|Y)))``."""
    info = rate_information(spec)
    a, b, c = info["I(U;Y|V,Z)"], info["I(U,Z;V,Y)"], info["I(V;T|Y)"]
    return max(0.0, min(a, b - c)), (a, b, c)


def check_rate_constraints(rates: RateTuple, info: dict[str, float]) -> dict[str, bool]:
    """The five strict inequalities.  A constraint whose codebook dimension
    collapses to a single index (rate 0 against an information of 0) holds
    vacuously: with one column there is no competing index."""
    r, rv, rt = rates.r, rates.r_v, rates.r_tilde
    return {
        "R_v+R~>I(V;T)": rv + rt > info["I(V;T)"] or (rv + rt == 0 and info["I(V;T)"] == 0),
        "R~<I(V;Y)": rt < info["I(V;Y)"] or rt == 0,
        "R_v>I(V;T|Y)": rv > info["I(V;T|Y)"] or (rv == 0 and info["I(V;T|Y)"] == 0),
        "R<I(U;Y|V,Z)": r < info["I(U;Y|V,Z)"],
        "R+R_v<I(U,Z;V,Y)": r + rv < info["I(U,Z;V,Y)"],
    }


def bm_rate_feasible_region(spec, margin: float) -> RateTuple:
    """A rate tuple strictly inside the region, with slack set by ``margin``.

    ``R~ = (1 - margin) I(V;Y)``, ``R_v = I(V;T|Y) + margin * gap`` and
    ``R = (1 - margin) min{I(U;Y|V,Z), I(U,Z;V,Y) - I(V;T|Y)}``, where
    ``gap`` is the midpoint of ``(I(V;Y), I(U,Z;V,Y) - I(V;T|Y))``; any
    gap in that interval satisfies both ``R_v + R~ > I(V;T)`` and
    ``R + R_v < I(U,Z;V,Y)``.
    """
    if not 0 < margin < 1:
        raise ValueError("margin must lie in (0, 1)")
    info = rate_information(spec)
    a, b, c, ivy = info["I(U;Y|V,Z)"], info["I(U,Z;V,Y)"], info["I(V;T|Y)"], info["I(V;Y)"]
    best = min(a, b - c)
    if best <= 1e-12:
        raise EmptyRateRegion(f"the rate bound min{{{a:.6g}, {b:.6g} - {c:.6g}}} is not positive")
    if b - c <= ivy:
        raise EmptyRateRegion(f"I(U,Z;V,Y) - I(V;T|Y) = {b - c:.6g} does not exceed I(V;Y) = {ivy:.6g}")
    gap = 0.5 * (ivy + (b - c))
    rates = RateTuple((1 - margin) * best, c + margin * gap, (1 - margin) * ivy)
    bad = [k for k, ok in check_rate_constraints(rates, info).items() if not ok]
    if bad:
        raise EmptyRateRegion(f"constraints {bad} fail at margin {margin}")
    return rates


def induced_mc_joint(spec: BlockMarkovSpec) -> JointTable:
    """Joint of ``(U' = (U, Z), S, T, X, Y)`` with ``U'`` flattened."""
    j = bm_joint(spec).marginal(("Z", "U", "S", "T", "X", "Y"))
    p = j.probs.reshape((-1,) + j.probs.shape[2:])
    uz = tuple(f"{z}|{u}" for z in spec.z_alphabet for u in spec.u_alphabet)
    return JointTable((("UZ", uz),) + j.axes[2:], p)


def bm_rate_dominated_by_mc_capacity(spec: BlockMarkovSpec, tol: float = 1e-9) -> bool:
    """Whether ``bm_rate <= I(U,Z;Y) <= message-cognizant capacity`` (slack 1e-6)."""
    from ..helpercap import message_cognizant_capacity

    rate, _ = bm_rate(spec)
    iuzy = rate_information(spec)["I(U,Z;Y)"]
    cap = message_cognizant_capacity(spec.channel, spec.t, tol=tol).value_bits
    return rate <= iuzy + DOMINANCE_SLACK and iuzy <= cap + DOMINANCE_SLACK


# --------------------------------------------------------------------------
# random specs and JSON files
# --------------------------------------------------------------------------


def _dirichlet(rng: np.random.Generator, k: int, size=None) -> np.ndarray:
    return rng.dirichlet(np.ones(k), size=size)


def random_bm_spec(seed: int, max_size: int = 3) -> BlockMarkovSpec:
    """A random spec with every alphabet of size at most ``max_size``."""
    rng = np.random.default_rng(seed)
    ch = random_channel(rng, max_size)
    ta = ch.help_alphabet
    nz, nu, nv = (int(v) for v in rng.integers(1, max_size + 1, size=3))
    z = tuple(f"z{i}" for i in range(nz))
    u = tuple(f"u{i}" for i in range(nu))
    v = tuple(f"v{i}" for i in range(nv))
    h = rng.integers(0, len(ta), size=(len(ch.s_alphabet), nz))
    f = rng.integers(0, len(ch.x_alphabet), size=(nu, len(ta)))
    return BlockMarkovSpec(
        z, u, v, Pmf(z, _dirichlet(rng, nz)),
        [[ta.t_alphabet[i] for i in row] for row in h],
        CondPmf(z, u, _dirichlet(rng, nu, size=nz)),
        [[ch.x_alphabet[i] for i in row] for row in f],
        CondPmf(ta.t_alphabet, v, _dirichlet(rng, nv, size=len(ta))),
        ch, ta,
    )


def bm_spec_from_dict(doc: dict, base_dir=".") -> BlockMarkovSpec:
    """Spec document: ``channel`` (path, relative to ``base_dir``), ``z``,
    ``u``, ``v``, ``p_z``, ``h[s][z]``, ``p_u_given_z[z][u]``, ``f[u][t]``,
    ``p_v_given_t[t][v]`` and optionally ``t``."""
    ch = load_channel(Path(base_dir) / doc["channel"])
    t = doc.get("t", ch.t_alphabet)
    if t is None:
        raise ValueError("no help alphabet is given and the channel carries none")
    ta = HelpAlphabet(tuple(t))
    z, u, v = (tuple(doc[k]) for k in ("z", "u", "v"))
    return BlockMarkovSpec(z, u, v, Pmf(z, doc["p_z"]), doc["h"], CondPmf(z, u, doc["p_u_given_z"]),
                           doc["f"], CondPmf(ta.t_alphabet, v, doc["p_v_given_t"]), ch, ta)


def load_bm_spec(path) -> BlockMarkovSpec:
    path = Path(path)
    return bm_spec_from_dict(json.loads(path.read_text(encoding="utf-8")), path.parent)


def bm_spec_to_dict(spec: BlockMarkovSpec, channel_path: str) -> dict:
    ta = spec.t.t_alphabet
    ch = spec.channel
    return {
        "channel": channel_path,
        "t": list(ta),
        "z": list(spec.z_alphabet),
        "u": list(spec.u_alphabet),
        "v": list(spec.v_alphabet),
        "p_z": spec.p_z.probs.tolist(),
        "h": [[ta[i] for i in row] for row in spec.h_idx],
        "p_u_given_z": spec.p_u_given_z.rows.tolist(),
        "f": [[ch.x_alphabet[i] for i in row] for row in spec.f_idx],
        "p_v_given_t": spec.p_v_given_t.rows.tolist(),
    }
