"""Command line front end: ``python -m pacstack <command> [flags]``.

Commands: ``profile``, ``construct``, ``decode``, ``simulate``. Any flag can
also be given in a key-value file passed with ``--config``; one ``key = value``
per line, keys spelled like the flags without the leading dashes, ``#`` starts
a comment. Flags on the command line override the file. Repeatable flags
(``pth``) take a comma-separated list in the file.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys

import numpy as np

from .code import (DEFAULT_CONN_POLY, NodeType, PacCodeSpec, format_profile, parse_poly,
                   parse_profile, rm_rate_profile)
from .construction import CSV_HEADER as TABLE_HEADER
from .construction import build_tables
from .decoders import DecodeOptions, fast_stack_decode, stack_decode
from .simulate import SweepConfig, ebn0_to_sigma, run_point, write_csv

_TYPE_NAMES = {"rate0": NodeType.RATE0, "rep": NodeType.REP, "type4": NodeType.TYPE_IV,
               "rate1": NodeType.RATE1}


def read_config(path) -> dict:
    """Parse a key-value config file into argparse destination names."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, value = line.split("=", 1)
            else:
                parts = line.split(None, 1)
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value'")
                key, value = parts
            key = key.strip().lstrip("-").replace("-", "_")
            value = value.strip()
            if key == "pth":
                out[key] = [float(v) for v in value.split(",") if v.strip()]
            else:
                out[key] = value
    return out


def _allowed_types(text):
    names = [t.strip().lower() for t in text.split(",") if t.strip()]
    bad = set(names) - set(_TYPE_NAMES)
    if bad:
        raise argparse.ArgumentTypeError(f"unknown node types {sorted(bad)}; "
                                         f"choose from {sorted(_TYPE_NAMES)}")
    return frozenset(_TYPE_NAMES[t] for t in names)


def _add_code_args(p):
    p.add_argument("--n", type=int, help="log2 of the code length")
    p.add_argument("--k", type=int, help="number of data bits (Reed-Muller profile)")
    p.add_argument("--profile-file", help="rate profile as one line of 0/1 characters")
    p.add_argument("--poly", default=None,
                   help="connection polynomial, binary c_0..c_m or 0x-hex (default 0x689)")


def _add_decoder_args(p):
    p.add_argument("--decoder", choices=("stack", "pstackd_var", "fast"), default="fast")
    p.add_argument("--stack-size", type=int, default=64)
    p.add_argument("--max-cycles", type=int, default=1024)
    p.add_argument("--allowed-types", type=_allowed_types, default=None,
                   help="comma list of rate0,rep,type4,rate1 (default: all)")
    p.add_argument("--max-chunk", type=int, default=None)
    p.add_argument("--threshold-combine", choices=("min", "max"), default="min")
    p.add_argument("--pth", type=float, action="append",
                   help="pruning probability; repeat once per Eb/N0 point")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pacstack", description=__doc__.split("\n")[0])
    parser.add_argument("--config", help="key-value file with default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="print a Reed-Muller rate profile")
    _add_code_args(p)
    p.add_argument("--out")

    p = sub.add_parser("construct", help="write the construction table CSV")
    _add_code_args(p)
    p.add_argument("--ebn0", type=float, default=None)
    p.add_argument("--ebn0-start", type=float, default=None)
    p.add_argument("--pth", type=float, action="append")
    p.add_argument("--threshold-combine", choices=("min", "max"), default="min")
    p.add_argument("--out")

    p = sub.add_parser("decode", help="decode one frame of channel LLRs")
    _add_code_args(p)
    _add_decoder_args(p)
    p.add_argument("--llr-file", default="-", help="one LLR per line ('-' for stdin)")
    p.add_argument("--ebn0", type=float, default=None)
    p.add_argument("--ebn0-start", type=float, default=None)
    p.add_argument("--out")

    p = sub.add_parser("simulate", help="Monte-Carlo FER sweep")
    _add_code_args(p)
    _add_decoder_args(p)
    p.add_argument("--ebn0-start", type=float, default=None)
    p.add_argument("--ebn0-stop", type=float, default=None)
    p.add_argument("--ebn0-step", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-frames", type=int, default=1)
    p.add_argument("--min-errors", type=int, default=400)
    p.add_argument("--max-frames", type=int, default=1_000_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--engine", choices=("compiled", "python"), default="compiled")
    p.add_argument("--all-zero", action="store_true")
    p.add_argument("--out")
    return parser


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, value in cfg.items():
            if key not in known:
                parser.error(f"unknown key {key!r} in {args.config}")
            action = known[key]
            if isinstance(action, argparse._StoreTrueAction):
                defaults[key] = value.lower() in ("1", "true", "yes", "on")
            elif isinstance(value, list) or action.type is None:
                defaults[key] = value
            else:
                defaults[key] = action.type(value)
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _code_spec(args) -> PacCodeSpec:
    poly = parse_poly(args.poly) if args.poly else DEFAULT_CONN_POLY
    if args.profile_file:
        with open(args.profile_file) as fh:
            profile = parse_profile(fh.read())
        n = int(np.log2(profile.size))
        if args.n is not None and args.n != n:
            raise SystemExit(f"profile length {profile.size} does not match --n {args.n}")
        return PacCodeSpec(n, profile, poly)
    if args.n is None or args.k is None:
        raise SystemExit("need --n and --k, or --profile-file")
    return PacCodeSpec(args.n, rm_rate_profile(args.n, args.k), poly)


def _options(args, thresholds) -> DecodeOptions:
    kw = {}
    if args.allowed_types is not None:
        kw["allowed_types"] = args.allowed_types
    return DecodeOptions(stack_capacity=args.stack_size, max_cycles=args.max_cycles,
                         thresholds=thresholds, max_special_chunk_size=args.max_chunk, **kw)


def _single_snr(args):
    ebn0 = args.ebn0 if args.ebn0 is not None else args.ebn0_start
    if ebn0 is None:
        raise SystemExit("need --ebn0")
    pth = args.pth[0] if args.pth else 1e-3
    return ebn0, pth


def _open_out(path):
    if path in (None, "-"):
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w")


def cmd_profile(args):
    spec = _code_spec(args)
    with _open_out(args.out) as fh:
        fh.write(format_profile(spec.rate_profile) + "\n")


def cmd_construct(args):
    spec = _code_spec(args)
    ebn0, pth = _single_snr(args)
    sigma = ebn0_to_sigma(ebn0, spec.rate if spec.K else 1.0)
    tables = build_tables(sigma, spec.n, pth, args.threshold_combine)
    with _open_out(args.out) as fh:
        fh.write(",".join(TABLE_HEADER) + "\n")
        for i, mu, s, e0, info, var, gam in tables.rows():
            fh.write(f"{i},{mu:.10e},{s:.10e},{e0:.10e},{info:.10e},{var:.10e},{gam}\n")


def cmd_decode(args):
    spec = _code_spec(args)
    ebn0, pth = _single_snr(args)
    sigma = ebn0_to_sigma(ebn0, spec.rate if spec.K else 1.0)
    tables = build_tables(sigma, spec.n, pth, args.threshold_combine)
    src = contextlib.nullcontext(sys.stdin) if args.llr_file == "-" else open(args.llr_file)
    with src as fh:
        llrs = np.array([float(line) for line in fh if line.strip()])
    options = _options(args, None if args.decoder == "stack" else tables.gamma_T)
    fn = fast_stack_decode if args.decoder == "fast" else stack_decode
    result = fn(spec, tables, llrs, options)
    with _open_out(args.out) as out:
        out.write(json.dumps(result.as_dict()) + "\n")


def cmd_simulate(args):
    spec = _code_spec(args)
    if args.ebn0_start is None:
        raise SystemExit("need --ebn0-start")
    stop = args.ebn0_start if args.ebn0_stop is None else args.ebn0_stop
    grid = np.round(np.arange(args.ebn0_start, stop + 1e-9, args.ebn0_step), 10)
    config = SweepConfig(
        spec=spec, ebn0_db=grid, variant=args.decoder, options=_options(args, None),
        p_th=args.pth or [1e-3], threshold_combine=args.threshold_combine,
        min_frames=args.min_frames, min_errors=args.min_errors, max_frames=args.max_frames,
        seed=args.seed, workers=args.workers, all_zero=args.all_zero, engine=args.engine)
    with _open_out(args.out) as fh:
        fh.write(write_csv([]))
        fh.flush()
        for k in range(len(config.ebn0_db)):
            fh.write(run_point(config, k).csv_row() + "\n")
            fh.flush()


_COMMANDS = {"profile": cmd_profile, "construct": cmd_construct, "decode": cmd_decode,
             "simulate": cmd_simulate}


def main(argv=None):
    args = parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except ValueError as exc:
        raise SystemExit(f"error: {exc}") from exc


if __name__ == "__main__":
    main()
