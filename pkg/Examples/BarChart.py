##########################################################
# This BootAgg example renders an ambiguated bar chart   #
# of category frequencies, and uses a predetermined      #
# region to bound how likely a bar stays below a given   #
# height.                                                #
##########################################################

import argparse
import numpy as np
import BootAgg

CATEGORIES = ["walk", "bike", "bus", "car"]

def program_setup(configpath, n, seed):
    bootplot = BootAgg.Bootplot(configpath)

    generator = np.random.default_rng(seed)
    dataset = BootAgg.Dataset.from_columns({
        "mode": generator.choice(CATEGORIES, 80, p=[0.15, 0.25, 0.2, 0.4]).tolist(),
    })

    spec = BootAgg.RenderSpec(BootAgg.RenderSpec.BAR_CHART, category_column="mode", categories=CATEGORIES)
    frame = BootAgg.PlotFrame(0.0, 1.0, 0.0, 1.0, 400, 300)
    renderer = BootAgg.Renderer.for_spec(frame, spec)

    resamples = BootAgg.Resampling.resample_stream(dataset, n, BootAgg.SeededRng(seed))
    stack = renderer.render_stack(resamples, dataset, bootplot.parallelism)
    aggregate = BootAgg.Aggregation.transform_aggregate(stack, bootplot.transform_params(seed=seed))
    BootAgg.Bootplot.write_png(BootAgg.Aggregation.quantize(aggregate), "bar_chart.png")

    # The region is chosen before looking at any image: the
    # part of the "car" slot above half of the frame height.
    # Z counts the images in which the bar stays below it.
    left, right = renderer.slots(len(CATEGORIES))[3]
    region = BootAgg.RegionMask.from_rect(frame.width, frame.height, left, 0, right, frame.height//2 - 1)
    z = BootAgg.Aggregation.region_occupancy(stack, region)

    result = BootAgg.Coverage.jeffreys_interval(z, BootAgg.CoverageSpec(n, bootplot.alpha))
    BootAgg.log(
        "The car bar stays below half height in "+str(z)+" of "+str(n)+" images, "+
        "probability at least "+BootAgg.prettyfraction(result.jeffreys_lower)+
        " at level "+str(1.0 - bootplot.alpha)
    )


##########################################################
#### Program Startup #####################################
##########################################################

if __name__ == "__main__":
    try:
        parser = argparse.ArgumentParser(description="Ambiguated bar chart with region inference")
        parser.add_argument("--config", action="store", default=None, help="path to alternative BootAgg config directory", type=str)
        parser.add_argument("--n", action="store", default=39, help="number of bootstrap images", type=int)
        parser.add_argument("--seed", action="store", default=3, help="seed of the data and the bootstrap", type=int)

        args = parser.parse_args()
        program_setup(args.config, args.n, args.seed)

    except KeyboardInterrupt:
        print("")
        exit()
