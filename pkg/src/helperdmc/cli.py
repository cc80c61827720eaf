"""``helperdmc`` command line.

Tunable defaults come from, in order: command-line flags, the JSON document
named by ``HELPERDMC_CONFIG``, built-in values.  Exit status: 0 success,
1 invalid input, 2 an enumeration/search/memory cap was hit, 3 ``repro``
found a failing row.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .blahut import DEFAULT_TOL, NonConvergence
from .blockmarkov import (
    EmptyRateRegion,
    JointTooLarge,
    SearchCapExceeded,
    SimConfig,
    bm_rate,
    bm_rate_feasible_region,
    load_bm_spec,
    rate_information,
    simulate_block_markov,
)
from .blockmarkov.sim import reports_to_csv
from .blockmarkov.spec import bm_spec_to_dict
from .channels import ChannelSpecError, channel_to_dict, full_csi_capacity, load_channel
from .duality import DualityConfig, duality_csv, duality_rows, duality_upper_bound
from .examples import (
    Example2Params,
    build_bungi_spec,
    build_example1,
    build_example2,
    build_example3,
    simulate_ex2_causal_scheme,
)
from .helpercap import (
    decoder_csi_capacity,
    helper_to_both_capacity,
    message_cognizant_capacity,
    no_csi_capacity,
    sbs_helper_capacity,
    sbs_helper_to_both_capacity,
    shannon_causal_capacity,
)
from .maps import EnumerationCapExceeded, HelperMap
from .probcore import ProbabilityError
from .tables import fmt_num, to_csv

EXIT_OK, EXIT_INVALID, EXIT_CAP, EXIT_REPRO = 0, 1, 2, 3

BUILTIN = {
    "tol": DEFAULT_TOL,
    "threads": os.cpu_count() or 1,
    "eps": 0.1,
    "lam": 4,
    "trials": 100,
    "margin": 0.4,
    "delta": 0.25,
    "search_cap": 10_000_000,
    "last_block": "genie",
}


def load_config(env=os.environ) -> dict:
    path = env.get("HELPERDMC_CONFIG")
    if not path:
        return {}
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValueError("HELPERDMC_CONFIG must name a JSON object")
    unknown = set(doc) - set(BUILTIN)
    if unknown:
        raise ValueError(f"unknown keys in HELPERDMC_CONFIG: {sorted(unknown)}")
    return doc


def _resolve(args, cfg: dict) -> None:
    for key, value in BUILTIN.items():
        if getattr(args, key, "absent") is None:
            setattr(args, key, cfg.get(key, value))


def _emit(args, rows: list[dict], text: str | None = None) -> None:
    """Print ``text`` (or the rows as CSV) and mirror the rows to ``--out``."""
    csv_text = to_csv(rows)
    sys.stdout.write(text if text is not None else csv_text)
    if getattr(args, "out", None):
        Path(args.out).write_text(csv_text, encoding="utf-8", newline="\n")


def _parse_helper(text: str, ch) -> HelperMap:
    """``"0,0,1,1"`` (help per state, in state order) or ``"s0->0,s1->1,..."``."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != len(ch.s_alphabet):
        raise ValueError(f"helper lists {len(parts)} entries for {len(ch.s_alphabet)} states")
    if all("->" in p for p in parts):
        table = dict(p.split("->", 1) for p in parts)
        missing = [s for s in ch.s_alphabet if s not in table]
        if missing:
            raise ValueError(f"helper does not map states {missing}")
        parts = [table[s] for s in ch.s_alphabet]
    t = ch.t_alphabet or tuple(sorted(set(parts)))
    return HelperMap(ch.s_alphabet, tuple(t), tuple(parts))


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_validate(args) -> int:
    ch = load_channel(args.spec)
    nx, ny, ns = ch.sizes()
    print(f"ok |X|={nx} |Y|={ny} |S|={ns}" + (f" |T|={len(ch.t_alphabet)}" if ch.t_alphabet else ""))
    return EXIT_OK


MODES = {
    "no-csi": lambda ch, a: no_csi_capacity(ch, a.tol),
    "shannon": lambda ch, a: shannon_causal_capacity(ch, a.tol),
    "sbs": lambda ch, a: sbs_helper_capacity(ch, a.t_size, a.tol, threads=a.threads),
    "sbs-both": lambda ch, a: sbs_helper_to_both_capacity(ch, a.t_size, a.tol, threads=a.threads),
    "mc": lambda ch, a: message_cognizant_capacity(ch, a.t_size, a.tol),
    "decoder-csi": lambda ch, a: decoder_csi_capacity(ch, a.t_size, a.tol, threads=a.threads),
    "full-csi": lambda ch, a: full_csi_capacity(ch, a.tol),
}


def cmd_capacity(args) -> int:
    ch = load_channel(args.spec)
    rep = MODES[args.mode](ch, args)
    print(fmt_num(float(rep.value_bits)))
    if args.out:
        _write(args.out, [{"mode": args.mode, "capacity_bits": float(rep.value_bits),
                           "final_gap": float(rep.final_gap), "iterations": rep.iterations}])
    return EXIT_OK


def _write(path, rows):
    Path(path).write_text(to_csv(rows), encoding="utf-8", newline="\n")


def cmd_help_to_both(args) -> int:
    ch = load_channel(args.spec)
    h = _parse_helper(args.helper, ch)
    rep = helper_to_both_capacity(ch, h, args.tol)
    print(fmt_num(float(rep.value_bits)))
    if args.out:
        _write(args.out, [{"helper": h.describe(), "capacity_bits": float(rep.value_bits)}])
    return EXIT_OK


def cmd_bm_rate(args) -> int:
    spec = load_bm_spec(args.bmspec)
    rate, (a, b, c) = bm_rate(spec)
    rows = [{"quantity": k, "bits": v} for k, v in rate_information(spec).items()]
    rows.append({"quantity": "rate", "bits": rate})
    for r in rows:
        print(f"{r['quantity']} {fmt_num(r['bits'])}")
    if args.out:
        _write(args.out, rows)
    return EXIT_OK


def cmd_bm_sim(args) -> int:
    spec = load_bm_spec(args.bmspec)
    rates = bm_rate_feasible_region(spec, args.margin)
    reports = []
    for n in args.n:
        for seed in args.seed:
            cfg = SimConfig(n=n, lam=args.lam, eps=args.eps, seed=seed, last_block_mode=args.last_block,
                            search_cap=args.search_cap)
            reports.append(simulate_block_markov(spec, rates, cfg, args.trials, threads=args.threads))
    text = reports_to_csv(reports)
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    return EXIT_OK


def cmd_ex2_sim(args) -> int:
    rows = []
    for seed in args.seed:
        errors, rate = simulate_ex2_causal_scheme(Example2Params(args.eta), args.n, seed)
        rows.append({"eta": args.eta, "n": args.n, "seed": seed, "errors": errors, "rate": float(rate)})
    _emit(args, rows)
    return EXIT_OK


def cmd_duality(args) -> int:
    cfg = DualityConfig(args.eta, args.delta)
    if args.exact:
        text = duality_csv(duality_rows(cfg))
        sys.stdout.write(text)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        bound = duality_upper_bound(cfg)
        print(fmt_num(bound))
        if args.out:
            _write(args.out, [{"eta": args.eta, "delta": float(args.delta), "bound_bits": bound}])
    return EXIT_OK


def cmd_examples_export(args) -> int:
    if args.which == "bungi":
        if not args.out:
            raise ValueError("exporting a block-Markov spec needs --out DIR")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        spec = build_bungi_spec(Example2Params(args.eta))
        (out / "channel.json").write_text(json.dumps(channel_to_dict(spec.channel)) + "\n", encoding="utf-8")
        (out / "bmspec.json").write_text(json.dumps(bm_spec_to_dict(spec, "channel.json")) + "\n",
                                         encoding="utf-8")
        print(out / "bmspec.json")
        return EXIT_OK
    builders = {"1": build_example1, "2": lambda: build_example2(Example2Params(args.eta)), "3": build_example3}
    ch, _ = builders[args.which]()
    text = json.dumps(channel_to_dict(ch)) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_repro(args) -> int:
    from .repro import repro_csv, repro_table

    rows = repro_table()
    text = repro_csv(rows)
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    return EXIT_OK if all(r.status == "pass" for r in rows) else EXIT_REPRO


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="Blahut-Arimoto gap (default 1e-9)")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    common.add_argument("--out", default=None, help="also write the result as CSV to this path")

    p = argparse.ArgumentParser(prog="helperdmc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a channel spec file")
    s.add_argument("spec")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("capacity", parents=[common], help="capacity under one information pattern")
    s.add_argument("spec")
    s.add_argument("--mode", choices=sorted(MODES), required=True)
    s.add_argument("--t-size", type=int, default=None, help="help alphabet size (default: the one in the file)")
    s.set_defaults(func=cmd_capacity)

    s = sub.add_parser("help-to-both", parents=[common], help="capacity when a given helper informs both ends")
    s.add_argument("spec")
    s.add_argument("--helper", required=True, help='help per state, e.g. "0,0,1,1" or "s0->0,s1->1,..."')
    s.set_defaults(func=cmd_help_to_both)

    s = sub.add_parser("bm-rate", parents=[common], help="block-Markov achievable rate")
    s.add_argument("bmspec")
    s.set_defaults(func=cmd_bm_rate)

    s = sub.add_parser("bm-sim", parents=[common], help="Monte Carlo run of the block-Markov scheme")
    s.add_argument("bmspec")
    s.add_argument("--n", type=int, nargs="+", required=True, help="block length(s)")
    s.add_argument("--lambda", dest="lam", type=int, default=None, help="number of blocks (default 4)")
    s.add_argument("--eps", type=float, default=None, help="typicality parameter (default 0.1)")
    s.add_argument("--seed", type=int, nargs="+", default=[0])
    s.add_argument("--trials", type=int, default=None)
    s.add_argument("--margin", type=float, default=None, help="rate slack in (0, 1) (default 0.4)")
    s.add_argument("--last-block", dest="last_block", choices=("genie", "coded"), default=None)
    s.add_argument("--search-cap", dest="search_cap", type=int, default=None)
    s.set_defaults(func=cmd_bm_sim)

    s = sub.add_parser("ex2-sim", parents=[common], help="simulate the causal helper scheme of Example 2")
    s.add_argument("--eta", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, nargs="+", default=[0])
    s.set_defaults(func=cmd_ex2_sim)

    s = sub.add_parser("duality", parents=[common], help="duality upper bound for Example 2, helper S^(0)")
    s.add_argument("--eta", type=int, required=True)
    s.add_argument("--delta", type=float, default=None)
    s.add_argument("--exact", action="store_true", help="per-strategy table with exact divergences")
    s.set_defaults(func=cmd_duality)

    s = sub.add_parser("examples", help="example channels")
    esub = s.add_subparsers(dest="action", required=True)
    e = esub.add_parser("export", parents=[common], help="write an example as a spec file")
    e.add_argument("--which", choices=("1", "2", "3", "bungi"), required=True)
    e.add_argument("--eta", type=int, default=2)
    e.set_defaults(func=cmd_examples_export)

    s = sub.add_parser("repro", parents=[common], help="recompute the claim table")
    s.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _resolve(args, load_config())
        return args.func(args)
    except (EnumerationCapExceeded, SearchCapExceeded, JointTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ChannelSpecError, ProbabilityError, EmptyRateRegion, NonConvergence, ValueError, KeyError,
            FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
