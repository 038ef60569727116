#!/usr/bin/env python3

import os
import sys
import argparse
import BootAgg
from BootAgg import Bootplot, RunConfig, RenderSpec, PlotFrame, Raster, Harness, ScalarDistribution

# Exit codes
EXIT_OK       = 0
EXIT_CONFIG   = 1     # Invalid configuration, usage or numeric domain
EXIT_RENDERER = 2     # External renderer failed or broke the protocol
EXIT_IO       = 3     # Files could not be read, written or decoded

class ArgumentParser(argparse.ArgumentParser):
    """
    Reports usage errors with the configuration exit code, leaving
    status 2 to renderer failures.
    """
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, self.prog+": error: "+message+"\n")


def exit_code(e):
    if isinstance(e, BootAgg.RendererError):
        return EXIT_RENDERER
    if isinstance(e, (BootAgg.DecodeError, BootAgg.ParseError, OSError)):
        return EXIT_IO
    return EXIT_CONFIG

def print_lines(lines):
    for line in lines:
        print(line)

def parse_pair(text, name, cast=float):
    try:
        parts = text.replace("x", ",").split(",") if name == "size" else text.split(",")
        if len(parts) != 2:
            raise ValueError()
        return (cast(parts[0]), cast(parts[1]))
    except ValueError:
        raise BootAgg.ConfigError("Cannot parse --"+name+" \""+text+"\"")

def parse_distribution(text):
    """
    Parses ``normal[:mu,sigma]``, ``uniform[:a,b]``, ``exponential[:rate]``,
    ``discrete:v1,v2,...:p1,p2,...`` and ``point:value``.
    """
    parts = text.split(":")
    family = parts[0]
    try:
        arguments = [[float(v) for v in part.split(",")] for part in parts[1:]]
        if family == "normal":
            return ScalarDistribution.normal(*(arguments[0] if arguments else []))
        if family == "uniform":
            return ScalarDistribution.uniform(*(arguments[0] if arguments else []))
        if family == "exponential":
            return ScalarDistribution.exponential(*(arguments[0] if arguments else []))
        if family == "discrete" and len(arguments) == 2:
            return ScalarDistribution.discrete(arguments[0], arguments[1])
        if family == "point" and len(arguments) == 1:
            return ScalarDistribution.point(arguments[0][0])
    except (ValueError, TypeError):
        pass
    raise BootAgg.ConfigError("Cannot parse distribution \""+text+"\"")

def configure_logging(args):
    if args.verbose > 0 or args.quiet > 0:
        BootAgg.set_loglevel(BootAgg.loglevel + args.verbose - args.quiet)

def build_spec(args):
    categories = args.categories.split(",") if args.categories else None
    colors = [Raster.parse_color(c) for c in args.colors.split(";")] if args.colors else None
    try:
        return RenderSpec(
            args.builtin,
            column=args.x,
            y_column=args.y,
            statistic=args.statistic,
            degree=args.degree,
            category_column=args.category,
            categories=categories,
            color=Raster.parse_color(args.color),
            colors=colors,
            mark_size=args.mark_size,
            background_points=not args.no_background_points,
            overlay=args.overlay,
        )
    except BootAgg.DomainError as e:
        raise BootAgg.ConfigError(str(e))

def cmd_run(args, bootplot):
    if args.data == None or args.out == None:
        raise BootAgg.ConfigError("run needs --data and --out")

    width, height = parse_pair(args.size, "size", int) if args.size else (bootplot.width, bootplot.height)
    seed = args.seed if args.seed != None else bootplot.seed
    if seed == None:
        seed = Bootplot.default_seed()

    spec = build_spec(args) if args.builtin else None
    frame = None
    if args.xlim or args.ylim:
        if not (args.xlim and args.ylim):
            raise BootAgg.ConfigError("--xlim and --ylim must be given together")
        x_min, x_max = parse_pair(args.xlim, "xlim")
        y_min, y_max = parse_pair(args.ylim, "ylim")
        frame = PlotFrame(x_min, x_max, y_min, y_max, width, height)

    keep_stack = args.keep_stack
    if keep_stack == "":
        keep_stack = os.path.splitext(args.out)[0]+"_stack"

    config = RunConfig(
        dataset=args.data,
        output=args.out,
        renderer_command=args.renderer_cmd,
        render_spec=spec,
        n=args.n,
        coverage=args.coverage,
        seed=seed,
        width=width,
        height=height,
        transform=bootplot.transform_params(seed=seed, k=args.k, tau=args.tau, enabled=False if args.no_transform else None, tie_break=args.tie_break),
        parallelism=args.parallelism if args.parallelism != None else bootplot.parallelism,
        memory_cap=args.memory_cap if args.memory_cap != None else bootplot.memory_cap,
        keep_stack=keep_stack,
        frame=frame,
        timeout=args.timeout if args.timeout != None else bootplot.timeout,
    )

    result = bootplot.run(config)
    print_lines(result.as_lines())
    print_lines(config.echo())
    return EXIT_OK

def cmd_aggregate(args, bootplot):
    if args.input == None or args.out == None:
        raise BootAgg.ConfigError("aggregate needs --input and --out")
    transform = bootplot.transform_params(k=args.k, tau=args.tau, enabled=False if args.no_transform else None, tie_break=args.tie_break)
    parallelism = args.parallelism if args.parallelism != None else bootplot.parallelism
    memory_cap = args.memory_cap if args.memory_cap != None else bootplot.memory_cap

    result = bootplot.aggregate_directory(args.input, args.out, transform, memory_cap, parallelism)
    print_lines(result.as_lines())
    print_lines([
        "input="+str(args.input),
        "output="+str(args.out),
        "transform="+("on" if transform.enabled else "off"),
        "k="+repr(transform.k),
        "tau="+repr(transform.tau),
        "tie_break="+transform.tie_break,
        "parallelism="+str(parallelism),
        "memory_cap="+str(memory_cap),
    ])
    return EXIT_OK

def cmd_coverage(args, bootplot):
    if (args.n == None) == (args.coverage == None):
        raise BootAgg.ConfigError("coverage needs exactly one of --n and --coverage")

    rows = []
    for n in (args.n or []):
        rows.extend(bootplot.coverage_rows(n=n, alpha=args.alpha))
    for c in (args.coverage or []):
        rows.extend(bootplot.coverage_rows(coverage=c, alpha=args.alpha))

    if args.table:
        header = ["n", "coverage", "jeffreys_mean", "jeffreys_lower"]
        values = [[
            str(row["n"]),
            BootAgg.prettyfraction(row["implied_coverage"]),
            BootAgg.prettyfraction(row["jeffreys_mean"]),
            BootAgg.prettyfraction(row["jeffreys_lower"]),
        ] for row in rows]
        print(Harness.format_table(header, values))
    else:
        for row in rows:
            print_lines([
                "n="+str(row["n"]),
                "implied_coverage="+BootAgg.prettyfraction(row["implied_coverage"]),
                "jeffreys_mean="+BootAgg.prettyfraction(row["jeffreys_mean"]),
                "jeffreys_lower="+BootAgg.prettyfraction(row["jeffreys_lower"]),
                "alpha="+repr(row["alpha"]),
            ])
    return EXIT_OK

def cmd_simulate(args, bootplot):
    seed = args.seed if args.seed != None else Bootplot.DEFAULT_SIMULATION_SEED
    distribution = parse_distribution(args.distribution)
    workers = args.parallelism if args.parallelism != None else bootplot.parallelism

    frame = None
    if args.scenario == Harness.PIPELINE:
        width, height = parse_pair(args.size, "size", int) if args.size else (bootplot.width, bootplot.height)
        x_min, x_max = parse_pair(args.xlim, "xlim") if args.xlim else (-1.0, 1.0)
        frame = PlotFrame(x_min, x_max, -1.0, 1.0, width, height)

    report = bootplot.simulate(
        args.scenario, args.n, args.trials, seed=seed, distribution=distribution, frame=frame,
        threshold=args.threshold, alpha=args.alpha, sample_size=args.sample_size, workers=workers
    )

    if args.table:
        print(report.as_table())
    else:
        print_lines(report.as_lines())
    print_lines(["seed="+str(seed), "distribution="+args.distribution])
    return EXIT_OK

def build_parser():
    parser = ArgumentParser(prog="bootagg", description="Bootstrap uncertainty visualization by image aggregation")
    parser.add_argument("--config", action="store", default=None, help="path to alternative BootAgg config directory", type=str)
    parser.add_argument("-v", "--verbose", action="count", default=0, help="increase log verbosity")
    parser.add_argument("-q", "--quiet", action="count", default=0, help="decrease log verbosity")
    parser.add_argument("--version", action="version", version="bootagg "+BootAgg.__version__)

    subparsers = parser.add_subparsers(dest="command", metavar="command", parser_class=ArgumentParser)

    def transform_arguments(sub):
        sub.add_argument("--k", action="store", metavar="FLOAT", default=None, help="slope of the intensity transform", type=float)
        sub.add_argument("--tau", action="store", metavar="FLOAT", default=None, help="threshold of the intensity transform", type=float)
        sub.add_argument("--no-transform", action="store_true", help="aggregate by plain pixel-wise averaging")
        sub.add_argument("--tie-break", action="store", choices=BootAgg.TransformParams.TIE_BREAKS, default=None, help="resolution of ties for the most frequent pixel value")
        sub.add_argument("--parallelism", action="store", metavar="INT", default=None, help="number of concurrent workers", type=int)
        sub.add_argument("--memory-cap", action="store", metavar="BYTES", default=None, help="working set limit of the aggregation in bytes, 0 for no limit", type=int)

    run = subparsers.add_parser("run", help="resample, render and aggregate a dataset")
    run.add_argument("--data", action="store", metavar="PATH", default=None, help="comma-separated dataset with header row")
    renderer = run.add_mutually_exclusive_group()
    renderer.add_argument("--renderer-cmd", action="store", metavar="TEMPLATE", default=None, help="external renderer command with {resample} and {out} placeholders")
    renderer.add_argument("--builtin", action="store", choices=RenderSpec.kinds, default=None, help="built-in renderer")
    count = run.add_mutually_exclusive_group()
    count.add_argument("--n", action="store", metavar="INT", default=None, help="number of bootstrap images", type=int)
    count.add_argument("--coverage", action="store", metavar="FLOAT", default=None, help="target coverage of the observed range", type=float)
    run.add_argument("--seed", action="store", metavar="INT", default=None, help="bootstrap seed", type=int)
    run.add_argument("--out", action="store", metavar="PATH", default=None, help="output PNG")
    run.add_argument("--size", action="store", metavar="WxH", default=None, help="image size in pixels")
    run.add_argument("--keep-stack", action="store", metavar="DIR", nargs="?", const="", default=None, help="also write every rendered image")
    run.add_argument("--timeout", action="store", metavar="SECONDS", default=None, help="external renderer timeout per image", type=float)
    run.add_argument("--xlim", action="store", metavar="MIN,MAX", default=None, help="fixed x range of built-in renderers")
    run.add_argument("--ylim", action="store", metavar="MIN,MAX", default=None, help="fixed y range of built-in renderers")
    run.add_argument("--x", action="store", metavar="COLUMN", default=None, help="statistic or x column")
    run.add_argument("--y", action="store", metavar="COLUMN", default=None, help="y column")
    run.add_argument("--statistic", action="store", choices=RenderSpec.statistics, default=RenderSpec.MEAN, help="statistic of point estimates")
    run.add_argument("--degree", action="store", metavar="INT", default=1, help="degree of regression polynomials", type=int)
    run.add_argument("--category", action="store", metavar="COLUMN", default=None, help="category column of bar and pie charts")
    run.add_argument("--categories", action="store", metavar="A,B,...", default=None, help="category order of bar and pie charts")
    run.add_argument("--color", action="store", metavar="COLOR", default="black", help="mark color")
    run.add_argument("--colors", action="store", metavar="C1;C2;...", default=None, help="segment colors of stacked bars and wedge colors of pie charts")
    run.add_argument("--mark-size", action="store", metavar="PX", default=1, help="mark size in pixels", type=int)
    run.add_argument("--no-background-points", action="store_true", help="do not draw the full dataset behind regression lines")
    run.add_argument("--overlay", action="store", metavar="FRACTION", default=0.0, help="radius of a constant full-data pie over pie charts, as a fraction of the pie", type=float)
    transform_arguments(run)

    aggregate = subparsers.add_parser("aggregate", help="aggregate a directory of PNG images")
    aggregate.add_argument("--input", action="store", metavar="DIR", default=None, help="directory of equally sized PNGs")
    aggregate.add_argument("--out", action="store", metavar="PATH", default=None, help="output PNG")
    transform_arguments(aggregate)

    coverage = subparsers.add_parser("coverage", help="print sample sizes, implied coverage and Jeffreys bounds")
    coverage.add_argument("--n", action="store", metavar="INT", nargs="+", default=None, help="number of images", type=int)
    coverage.add_argument("--coverage", action="store", metavar="FLOAT", nargs="+", default=None, help="target coverage", type=str)
    coverage.add_argument("--alpha", action="store", metavar="FLOAT", default=None, help="significance level", type=float)
    coverage.add_argument("--table", action="store_true", help="print a text table")

    simulate = subparsers.add_parser("simulate", help="validate coverage by simulation")
    simulate.add_argument("scenario", choices=Harness.SCENARIOS, help="simulation scenario")
    simulate.add_argument("--n", action="store", metavar="INT", default=39, help="number of images", type=int)
    simulate.add_argument("--trials", action="store", metavar="INT", default=1000, help="number of trials", type=int)
    simulate.add_argument("--seed", action="store", metavar="INT", default=None, help="simulation seed, "+str(Bootplot.DEFAULT_SIMULATION_SEED)+" if omitted", type=int)
    simulate.add_argument("--distribution", action="store", metavar="LAW", default="normal", help="law of the statistic, like normal:0,1 or discrete:1,2,3:0.2,0.5,0.3")
    simulate.add_argument("--threshold", action="store", metavar="FLOAT", default=None, help="region boundary of the region scenario", type=float)
    simulate.add_argument("--alpha", action="store", metavar="FLOAT", default=None, help="significance level", type=float)
    simulate.add_argument("--sample-size", action="store", metavar="INT", default=Harness.DEFAULT_SAMPLE_SIZE, help="rows per synthesized dataset", type=int)
    simulate.add_argument("--size", action="store", metavar="WxH", default=None, help="image size of the pipeline scenario")
    simulate.add_argument("--xlim", action="store", metavar="MIN,MAX", default=None, help="x range of the pipeline scenario")
    simulate.add_argument("--parallelism", action="store", metavar="INT", default=None, help="number of concurrent trials", type=int)
    simulate.add_argument("--table", action="store_true", help="print a text table")

    return parser

def main(argv=None):
    commands = {
        "run": cmd_run,
        "aggregate": cmd_aggregate,
        "coverage": cmd_coverage,
        "simulate": cmd_simulate,
    }

    try:
        parser = build_parser()
        args = parser.parse_args(argv)

        if args.command == None:
            print("")
            parser.print_help()
            print("")
            return EXIT_CONFIG

        try:
            bootplot = Bootplot(args.config)
            configure_logging(args)
            return commands[args.command](args, bootplot)
        except (BootAgg.BootAggError, OSError, ValueError, ArithmeticError) as e:
            BootAgg.log("The "+args.command+" command failed: "+str(e), BootAgg.LOG_DEBUG)
            print("Error: "+str(e), file=sys.stderr)
            diagnostics = getattr(e, "diagnostics", None)
            if diagnostics:
                print(diagnostics, file=sys.stderr)
            return exit_code(e)

    except KeyboardInterrupt:
        print("")
        return EXIT_CONFIG

if __name__ == "__main__":
    sys.exit(main())
