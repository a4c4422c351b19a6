"""Command line front end.

Subcommands: simulate, compare, gen-trace, reorder, opt, stats.
A flat JSON config file can pre-set any flag of a subcommand
(--config file.json); explicit flags win.  Wider program counters can
be folded to the 14-bit signature space by xoring 14-bit slices.
"""

import argparse
import json
import math
import sys

from cachelab import graphs as graphmod
from cachelab import metrics
from cachelab.engine import CacheGeometry, filter_trace, simulate
from cachelab.grasp import RegionMap
from cachelab.opt import opt_oracle
from cachelab.policies import POLICY_NAMES, make_policy
from cachelab.trace import PatternSpec, generate_pattern, read_trace, write_trace


class CliError(ValueError):
    pass


def parse_pattern(text):
    """'thrash:k=32,n=64[,base=0,stride=64,pc=0]' -> PatternSpec."""
    kind, _, rest = text.partition(":")
    fields = {"k": None, "n": 1, "base": 0, "stride": 64, "pc": 0}
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            if key not in fields or not value:
                raise CliError("bad pattern field %r" % item)
            try:
                fields[key] = int(value, 0)
            except ValueError:
                raise CliError("bad pattern value %r" % item) from None
    if fields["k"] is None:
        raise CliError("pattern needs k=<count>")
    return PatternSpec(
        kind=kind,
        k=fields["k"],
        n=fields["n"],
        base_address=fields["base"],
        stride=fields["stride"],
        pc_signature=fields["pc"],
    )


def parse_abr(text):
    start, sep, end = text.partition(":")
    if not sep:
        raise CliError("region must be start:end")
    try:
        return (int(start, 0), int(end, 0))
    except ValueError:
        raise CliError("region bounds must be integers") from None


def _add_geometry(p):
    p.add_argument("--sets", type=int, default=64, help="number of sets (power of two)")
    p.add_argument("--ways", type=int, default=16, help="associativity")
    p.add_argument("--block", type=int, default=64, help="block size in bytes")


def _add_source(p):
    p.add_argument("--trace", help="binary trace file")
    p.add_argument("--gen", help="synthetic pattern, e.g. thrash:k=32,n=64")
    p.add_argument(
        "--filter",
        metavar="SETS:WAYS",
        help="drop accesses hitting a small LRU front cache first",
    )


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write output here instead of stdout")


def _load_source(args):
    if bool(args.trace) == bool(args.gen):
        raise CliError("need exactly one of --trace or --gen")
    trace = read_trace(args.trace) if args.trace else generate_pattern(parse_pattern(args.gen))
    if args.filter:
        fsets, _, fways = args.filter.partition(":")
        try:
            trace = filter_trace(trace, int(fsets), int(fways), args.block)
        except ValueError:
            raise CliError("--filter must be SETS:WAYS") from None
    return trace


def _geometry(args):
    return CacheGeometry(args.sets, args.ways, args.block)


def _emit(text, args):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        print(text)


def _run_policy(name, trace, geometry, args, abrs):
    if name == "opt":
        return opt_oracle(trace, geometry, allow_bypass=getattr(args, "bypass", False),
                          seed=args.seed)
    policy = make_policy(name, abrs=abrs)
    classify = RegionMap(abrs, geometry.capacity_bytes).classify if abrs else None
    return simulate(
        trace,
        geometry,
        policy,
        seed=args.seed,
        classify=classify,
        interval=args.interval,
    )


def cmd_simulate(args):
    if not args.policy:
        raise CliError("--policy is required (flag or config)")
    trace = _load_source(args)
    geometry = _geometry(args)
    abrs = [parse_abr(a) for a in args.abr or []]
    report = _run_policy(args.policy, trace, geometry, args, abrs)
    if args.format == "json":
        _emit(json.dumps(report.to_dict(), sort_keys=True, indent=2), args)
    else:
        _emit(report.CSV_HEADER + "\n" + report.csv_row(), args)
    return 0


def cmd_compare(args):
    if not args.policies:
        raise CliError("--policies is required (flag or config)")
    trace = _load_source(args)
    geometry = _geometry(args)
    abrs = [parse_abr(a) for a in args.abr or []]
    names = [n.strip() for n in args.policies.split(",") if n.strip()]
    if not names:
        raise CliError("--policies needs at least one name")
    if args.baseline not in names:
        names.insert(0, args.baseline)
    reports = [_run_policy(n, trace, geometry, args, abrs) for n in names]
    rows = metrics.compare_reports(reports, baseline=args.baseline)
    if args.format == "json":
        _emit(json.dumps(rows, sort_keys=True, indent=2), args)
    else:
        _emit("\n".join([metrics.COMPARE_HEADER] + metrics.compare_csv_rows(rows)), args)
    return 0


def cmd_gen_trace(args):
    if not args.out:
        raise CliError("--out is required (flag or config)")
    if bool(args.pattern) == bool(args.graph):
        raise CliError("need exactly one of --pattern or --graph")
    if args.pattern:
        trace = generate_pattern(parse_pattern(args.pattern))
        write_trace(trace, args.out)
        return 0
    graph = graphmod.read_csr(args.graph)
    trace, abrs = graphmod.gen_graph_trace(
        graph,
        prop_bytes=args.prop_bytes,
        block_bytes=args.block,
        prop_base=args.prop_base,
        bake_hints=args.bake_hints,
        llc_capacity=args.llc_capacity,
    )
    write_trace(trace, args.out)
    lines = ["%d:%d" % bounds for bounds in abrs]
    if args.abr_out:
        with open(args.abr_out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        for line in lines:
            print("abr %s" % line)
    return 0


def _load_graph(path, direction):
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == graphmod.CSR_MAGIC:
        return graphmod.read_csr(path, direction)
    return graphmod.load_edge_list(path, direction)


def cmd_reorder(args):
    if not args.kind or not args.out:
        raise CliError("--kind and --out are required (flag or config)")
    graph = _load_graph(args.input, args.direction)
    kind = args.kind
    if kind in ("dbg", "sort", "hubsort", "hubcluster"):
        remap = graphmod.family_reorder(graph, kind)
    elif kind == "rv":
        remap = graphmod.random_reorder(graph, 0, seed=args.seed)
    elif kind.startswith("rcb"):
        try:
            blocks = int(kind[3:])
        except ValueError:
            raise CliError("rcb kind needs a block count, e.g. rcb4") from None
        remap = graphmod.random_reorder(
            graph, blocks, seed=args.seed, prop_bytes=args.prop_bytes, block_bytes=args.block
        )
    else:
        raise CliError("unknown reorder kind %r" % kind)
    reordered = graphmod.apply_remap(graph, remap)
    graphmod.write_csr(reordered, args.out)
    if args.map:
        graphmod.write_remap(remap, args.map)
    return 0


def cmd_opt(args):
    trace = _load_source(args)
    geometry = _geometry(args)
    report = opt_oracle(trace, geometry, allow_bypass=args.bypass, seed=args.seed)
    if args.format == "json":
        _emit(json.dumps(report.to_dict(), sort_keys=True, indent=2), args)
    else:
        _emit(report.CSV_HEADER + "\n" + report.csv_row(), args)
    return 0


def cmd_stats(args):
    if bool(args.graph) == bool(args.trace or args.gen):
        raise CliError("need --graph or a trace source")
    if args.graph:
        graph = _load_graph(args.graph, args.direction)
        m = graphmod.skew_metrics(graph, prop_bytes=args.prop_bytes, block_bytes=args.block)
        if args.format == "json":
            _emit(json.dumps(m, sort_keys=True, indent=2), args)
        else:
            keys = sorted(m)
            _emit(",".join(keys) + "\n" + ",".join("%.6g" % m[k] for k in keys), args)
        return 0
    trace = _load_source(args)
    hist = metrics.reuse_distance_distribution(trace, _geometry(args))
    rows = metrics.histogram_rows(hist, cumulative=args.cumulative)
    header = "distance,fraction" if args.cumulative else "distance,count"
    body = [
        "%s,%s"
        % (
            "inf" if d == math.inf else "%d" % d,
            ("%.6f" % v) if args.cumulative else "%d" % v,
        )
        for d, v in rows
    ]
    _emit("\n".join([header] + body), args)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cachelab", description="trace-driven cache replacement laboratory"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    registry = {}

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--config", help="flat JSON file pre-setting these flags")
        registry[name] = p
        return p

    p = add("simulate", cmd_simulate, help="run one policy over a trace")
    _add_source(p)
    _add_geometry(p)
    _add_output(p)
    p.add_argument("--policy", help=", ".join(POLICY_NAMES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--abr", action="append", help="hinted region start:end (repeatable)")
    p.add_argument("--interval", type=int, default=None,
                   help="accesses between policy interval callbacks")

    p = add("compare", cmd_compare, help="miss table for several policies")
    _add_source(p)
    _add_geometry(p)
    _add_output(p)
    p.add_argument("--policies", help="comma-separated policy names")
    p.add_argument("--baseline", default="lru")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--abr", action="append")
    p.add_argument("--interval", type=int, default=None)

    p = add("gen-trace", cmd_gen_trace, help="write a synthetic or graph trace")
    p.add_argument("--pattern", help="e.g. recency:k=8,n=4")
    p.add_argument("--graph", help="CSR graph to expand into a pull-iteration trace")
    p.add_argument("--out")
    p.add_argument("--prop-bytes", type=int, default=8)
    p.add_argument("--prop-base", type=int, default=0)
    p.add_argument("--block", type=int, default=64)
    p.add_argument("--bake-hints", action="store_true")
    p.add_argument("--llc-capacity", type=int, help="capacity used to bake hints")
    p.add_argument("--abr-out", help="write hinted region bounds here")

    p = add("reorder", cmd_reorder, help="relabel a graph by degree grouping")
    p.add_argument("input", help="edge list or CSR file")
    p.add_argument("--kind",
                   help="dbg, sort, hubsort, hubcluster, rv, or rcb<N>")
    p.add_argument("--out", help="reordered CSR file")
    p.add_argument("--map", help="write the remap array here")
    p.add_argument("--direction", choices=("in", "out"), default="in")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prop-bytes", type=int, default=8)
    p.add_argument("--block", type=int, default=64)

    p = add("opt", cmd_opt, help="optimal replacement lower bound")
    _add_source(p)
    _add_geometry(p)
    _add_output(p)
    p.add_argument("--bypass", action="store_true", help="let the oracle bypass fills")
    p.add_argument("--seed", type=int, default=0)

    p = add("stats", cmd_stats, help="graph skew metrics or reuse-distance histogram")
    p.add_argument("--graph")
    _add_source(p)
    _add_geometry(p)
    _add_output(p)
    p.add_argument("--direction", choices=("in", "out"), default="in")
    p.add_argument("--prop-bytes", type=int, default=8)
    p.add_argument("--cumulative", action="store_true")

    return parser, registry


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                defaults = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            print("error: cannot read config: %s" % e, file=sys.stderr)
            return 2
        if not isinstance(defaults, dict):
            print("error: config must be a flat JSON object", file=sys.stderr)
            return 2
        registry[args.command].set_defaults(
            **{k.replace("-", "_"): v for k, v in defaults.items()}
        )
        args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except Exception as e:  # one-line diagnostics, nonzero exit
        print("error: %s" % e, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
