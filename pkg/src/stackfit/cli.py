"""Command-line front end.

    stackfit generate  --pattern cyclic --lines 1024 --accesses 1000000 --out t.bin
    stackfit distances t.bin --interval 50000 --out s.csv
    stackfit fit s.csv --min-cache 4K --out m.json
    stackfit predict m.json --cache-size 32K
    stackfit predict m.json --sweep 4K:8M
    stackfit simulate t.bin --cache-size 32K
    stackfit outline s.csv --model m.json
    stackfit compare a.json b.json --sweep 4K:8M
"""

from __future__ import annotations

import argparse
import io
import os
import sys

import numpy as np

from . import cachesim, predict, stackdist, trace
from .characterize import AUTO, AnalysisConfig, Characterization, characterize
from .errors import StackfitError

_SUFFIX = {"K": 1 << 10, "M": 1 << 20, "G": 1 << 30}


def parse_size(text: str) -> int:
    """``"32K"`` -> 32768. Suffixes K/M/G are powers of 1024."""
    t = text.strip().upper().removesuffix("B")
    mult = 1
    if t and t[-1] in _SUFFIX:
        mult = _SUFFIX[t[-1]]
        t = t[:-1]
    try:
        value = int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"bad size {text!r}")
    return value * mult


def parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    return parse_size(lo), parse_size(hi)


class _Fail(Exception):
    pass


def _open_out(path, force, binary=False):
    if path is None or path == "-":
        return sys.stdout.buffer if binary else sys.stdout
    if os.path.exists(path) and not force:
        raise _Fail(f"{path} exists; pass --force to overwrite")
    return open(path, "wb" if binary else "w")


def _write(path, force, payload, binary=False):
    fh = _open_out(path, force, binary)
    try:
        fh.write(payload)
    finally:
        if fh not in (sys.stdout, sys.stdout.buffer):
            fh.close()


def _note(msg):
    print(msg, file=sys.stderr)


def _load_model(path) -> Characterization:
    with open(path) as fh:
        return Characterization.from_json(fh.read())


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_generate(args):
    kind = args.kind
    if args.pattern == "cyclic":
        seq = trace.gen_cyclic(args.lines, args.accesses, args.line_size, kind=kind)
    elif args.pattern == "uniform":
        seq = trace.gen_random_uniform(args.lines, args.accesses, args.line_size,
                                       seed=args.seed, kind=kind)
    else:
        if not args.model:
            raise _Fail("--pattern from-model needs --model")
        seq = trace.gen_from_distance_model(_load_model(args.model), args.accesses,
                                            seed=args.seed, line_size=args.line_size, kind=kind)
    _write(args.out, args.force, trace.write_trace(seq, fmt=args.format), binary=True)
    _note(f"wrote {len(seq)} {seq.kind} accesses")


def cmd_distances(args):
    seq = trace.read_trace(args.trace, fmt=args.format)
    d = stackdist.compute_distances(stackdist.to_line_addresses(seq, args.line_size), kind=seq.kind)
    s = stackdist.sample_distances(d, args.interval, args.offset, args.line_size)
    cold = stackdist.cold_stats(d)
    _write(args.out, args.force, stackdist.write_samples_csv(s, cold=cold))
    _note(f"samples={len(s)} cold={cold[0]} total={cold[1]}")


def _families(text):
    if text == AUTO:
        return AUTO
    return tuple(f.strip() for f in text.split(",") if f.strip())


def cmd_fit(args):
    s, cold = stackdist.read_samples_csv(args.samples)
    if len(s) == 0:
        raise _Fail(f"{args.samples} holds no samples; lower --interval when extracting distances")
    if args.cold_fraction is not None:
        cold_fraction = args.cold_fraction
    else:
        cold_fraction = cold[0] / cold[1] if cold and cold[1] else 0.0
    config = AnalysisConfig(
        min_cache_size=args.min_cache or s.line_size, line_size=s.line_size,
        refinement_rounds=args.refinements, atom_threshold=args.atom_threshold,
        families=_families(args.families), seed=args.seed)
    c, diag = characterize(s, cold_fraction, config, return_diagnostics=True)
    _write(args.out, args.force, c.to_json() + "\n")
    if c.continuous is None:
        _note(f"pure discrete: {len(c.discrete)} atoms")
    else:
        _note(f"{c.continuous!r} weight={c.continuous_weight:.4g} atoms={len(c.discrete)}")
        _note(diag.summary())


def cmd_predict(args):
    c = _load_model(args.model)
    if args.line_size is not None and args.line_size != c.line_size:
        raise _Fail(f"model line size is {c.line_size}, asked for {args.line_size}")
    if args.sweep:
        rows = predict.sweep(c, *args.sweep)
        _write(args.out, args.force, predict.sweep_csv(rows))
        return
    if args.cache_size is None:
        raise _Fail("give --cache-size or --sweep")
    r = predict.miss_ratio(c, predict.CacheConfig(args.cache_size, c.line_size))
    if r.below_threshold:
        _note(f"warning: {r.capacity_lines} lines is below the fitted floor of "
              f"{c.threshold_lines} lines")
    _write(args.out, args.force, f"{r.capacity_miss_ratio!r}\n")


def cmd_simulate(args):
    seq = trace.read_trace(args.trace, fmt=args.format)
    r = cachesim.simulate_lru(seq, predict.CacheConfig(args.cache_size, args.line_size))
    text = (f"accesses={r.accesses} hits={r.hits} compulsory_misses={r.compulsory_misses} "
            f"capacity_misses={r.capacity_misses} capacity_miss_ratio={r.capacity_miss_ratio!r}\n")
    _write(args.out, args.force, text)


def cmd_outline(args):
    s, _ = stackdist.read_samples_csv(args.samples)
    emp = stackdist.outline(s)
    model = None
    if args.model:
        model = predict.monte_carlo_outline(_load_model(args.model), len(emp), seed=args.seed)
    _write(args.out, args.force, predict.outline_csv(emp, model))


def cmd_compare(args):
    a, b = _load_model(args.model_a), _load_model(args.model_b)
    rows = predict.compare_sweeps(a, b, *args.sweep)
    div = max(abs(ra - rb) for _, ra, rb in rows)
    if args.out:
        buf = io.StringIO()
        buf.write("cache_size,miss_ratio_a,miss_ratio_b,abs_diff\n")
        for cs, ra, rb in rows:
            buf.write(f"{cs},{ra!r},{rb!r},{abs(ra - rb)!r}\n")
        _write(args.out, args.force, buf.getvalue())
    print(repr(div))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="stackfit", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def out_flags(sp):
        sp.add_argument("--out", "-o", help="output path (default: standard output)")
        sp.add_argument("--force", action="store_true", help="overwrite an existing --out")

    g = sub.add_parser("generate", help="write a synthetic trace")
    g.add_argument("--pattern", choices=("cyclic", "uniform", "from-model"), required=True)
    g.add_argument("--lines", type=int, default=1024)
    g.add_argument("--accesses", type=int, default=100_000)
    g.add_argument("--line-size", type=parse_size, default=64)
    g.add_argument("--model", help="characterization JSON for --pattern from-model")
    g.add_argument("--kind", choices=trace.KINDS, default=trace.DATA)
    g.add_argument("--format", choices=("binary", "text"), default="binary")
    g.add_argument("--seed", type=int, default=0)
    out_flags(g)
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("distances", help="extract sampled stack distances from a trace")
    d.add_argument("trace")
    d.add_argument("--format", choices=("binary", "text"), default="binary")
    d.add_argument("--line-size", type=parse_size, default=64)
    d.add_argument("--interval", type=int, default=1)
    d.add_argument("--offset", type=int, default=0)
    out_flags(d)
    d.set_defaults(func=cmd_distances)

    f = sub.add_parser("fit", help="fit a characterization to a sample CSV")
    f.add_argument("samples")
    f.add_argument("--min-cache", type=parse_size, default=None,
                   help="smallest cache size of interest (default: one line)")
    f.add_argument("--refinements", type=int, default=3)
    f.add_argument("--families", default=AUTO, help="'auto' or a comma list")
    f.add_argument("--atom-threshold", type=float, default=0.01)
    f.add_argument("--cold-fraction", type=float, default=None)
    f.add_argument("--seed", type=int, default=0)
    out_flags(f)
    f.set_defaults(func=cmd_fit)

    pr = sub.add_parser("predict", help="predict capacity miss ratios")
    pr.add_argument("model")
    pr.add_argument("--cache-size", type=parse_size)
    pr.add_argument("--sweep", type=parse_range, help="LO:HI, every power of two between")
    pr.add_argument("--line-size", type=parse_size, default=None)
    out_flags(pr)
    pr.set_defaults(func=cmd_predict)

    s = sub.add_parser("simulate", help="run the LRU reference simulator")
    s.add_argument("trace")
    s.add_argument("--format", choices=("binary", "text"), default="binary")
    s.add_argument("--cache-size", type=parse_size, required=True)
    s.add_argument("--line-size", type=parse_size, default=64)
    out_flags(s)
    s.set_defaults(func=cmd_simulate)

    o = sub.add_parser("outline", help="descending-order outline, optionally with a model")
    o.add_argument("samples")
    o.add_argument("--model")
    o.add_argument("--seed", type=int, default=0)
    out_flags(o)
    o.set_defaults(func=cmd_outline)

    c = sub.add_parser("compare", help="miss-ratio divergence between two characterizations")
    c.add_argument("model_a")
    c.add_argument("model_b")
    c.add_argument("--sweep", type=parse_range, required=True)
    out_flags(c)
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (_Fail, StackfitError, ValueError, OSError) as exc:
        print(f"stackfit {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
