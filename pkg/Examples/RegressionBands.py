##########################################################
# This BootAgg example draws confidence bands around a   #
# fitted polynomial. Every resample gets its own fit,    #
# and the aggregated curves form the band. It also reads #
# the pointwise envelope of the curves off the stack.    #
##########################################################

import argparse
import numpy as np
import BootAgg

def program_setup(configpath, n, degree, seed):
    bootplot = BootAgg.Bootplot(configpath)

    # A noisy quadratic, with fewer points towards the right
    # so the band visibly widens there.
    generator = np.random.default_rng(seed)
    x = np.sort(generator.beta(1.5, 2.5, 60))
    y = 0.5 + 0.8*x - 0.9*x*x + generator.normal(0.0, 0.05, len(x))
    dataset = BootAgg.Dataset.from_columns({"x": x.tolist(), "y": y.tolist()})

    # The frame is fixed for the whole run, and derived from
    # the full dataset only.
    spec = BootAgg.RenderSpec(BootAgg.RenderSpec.REGRESSION_LINE, column="x", y_column="y", degree=degree)
    frame = BootAgg.Bootplot.default_frame(dataset, spec, 640, 400)
    renderer = BootAgg.Renderer.for_spec(frame, spec)

    # Working with the library directly instead of through a
    # run config gives access to the stack.
    resamples = BootAgg.Resampling.resample_stream(dataset, n, BootAgg.SeededRng(seed))
    stack = renderer.render_stack(resamples, dataset, bootplot.parallelism)

    aggregate = BootAgg.Aggregation.transform_aggregate(stack, bootplot.transform_params(seed=seed))
    BootAgg.Bootplot.write_png(BootAgg.Aggregation.quantize(aggregate), "regression_bands.png")

    # The envelope is the topmost and bottommost curve row in
    # every column. Background points would count as deviation
    # too, so we measure it on a stack rendered without them.
    plain = BootAgg.RenderSpec(BootAgg.RenderSpec.REGRESSION_LINE, column="x", y_column="y", degree=degree, background_points=False)
    curves = BootAgg.Renderer.for_spec(frame, plain).render_stack(resamples, dataset, bootplot.parallelism)
    top, bottom = BootAgg.Aggregation.observed_envelope(curves)

    widths = bottom - top
    BootAgg.log("Band width in pixels: "+str(int(widths.min()))+" at the narrowest, "+str(int(widths.max()))+" at the widest")
    BootAgg.log("Aggregate of "+str(n)+" curves written to regression_bands.png")


##########################################################
#### Program Startup #####################################
##########################################################

if __name__ == "__main__":
    try:
        parser = argparse.ArgumentParser(description="Confidence bands for a polynomial fit")
        parser.add_argument("--config", action="store", default=None, help="path to alternative BootAgg config directory", type=str)
        parser.add_argument("--n", action="store", default=99, help="number of bootstrap images", type=int)
        parser.add_argument("--degree", action="store", default=2, help="polynomial degree", type=int)
        parser.add_argument("--seed", action="store", default=7, help="seed of the data and the bootstrap", type=int)

        args = parser.parse_args()
        program_setup(args.config, args.n, args.degree, args.seed)

    except KeyboardInterrupt:
        print("")
        exit()
