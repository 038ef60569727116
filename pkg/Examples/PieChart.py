##########################################################
# This BootAgg example renders an ambiguated pie chart   #
# of category shares, once plain and once with a smaller #
# constant pie of the full data drawn over its centre.   #
# The overlay stays sharp in the aggregate and makes the #
# blurred wedge boundaries around it stand out.          #
##########################################################

import argparse
import numpy as np
import BootAgg

SPECIES = ["adelie", "chinstrap", "gentoo"]
COLORS  = [(230, 120, 20), (160, 60, 200), (20, 140, 140)]

def program_setup(configpath, n, overlay, seed):
    bootplot = BootAgg.Bootplot(configpath)

    generator = np.random.default_rng(seed)
    dataset = BootAgg.Dataset.from_columns({
        "species": generator.choice(SPECIES, 120, p=[0.45, 0.2, 0.35]).tolist(),
    })

    # The first wedge always starts at the top and the wedges
    # always follow the same order. Only their sizes depend on
    # the resample.
    frame = BootAgg.PlotFrame(0.0, 1.0, 0.0, 1.0, 300, 300)
    resamples = BootAgg.Resampling.resample_stream(dataset, n, BootAgg.SeededRng(seed))
    params = bootplot.transform_params(seed=seed)

    for name, fraction in [("pie_chart.png", 0.0), ("pie_chart_overlay.png", overlay)]:
        spec = BootAgg.RenderSpec(
            BootAgg.RenderSpec.PIE_CHART,
            category_column="species",
            categories=SPECIES,
            colors=COLORS,
            overlay=fraction,
        )
        renderer = BootAgg.Renderer.for_spec(frame, spec)
        stack = renderer.render_stack(resamples, dataset, bootplot.parallelism)
        aggregate = BootAgg.Aggregation.transform_aggregate(stack, params)
        BootAgg.Bootplot.write_png(BootAgg.Aggregation.quantize(aggregate), name)
        BootAgg.log("Aggregate of "+str(n)+" pie charts written to "+name)


##########################################################
#### Program Startup #####################################
##########################################################

if __name__ == "__main__":
    try:
        parser = argparse.ArgumentParser(description="Ambiguated pie chart with a constant overlay")
        parser.add_argument("--config", action="store", default=None, help="path to alternative BootAgg config directory", type=str)
        parser.add_argument("--n", action="store", default=39, help="number of bootstrap images", type=int)
        parser.add_argument("--overlay", action="store", default=0.5, help="radius of the constant pie as a fraction", type=float)
        parser.add_argument("--seed", action="store", default=5, help="seed of the data and the bootstrap", type=int)

        args = parser.parse_args()
        program_setup(args.config, args.n, args.overlay, args.seed)

    except KeyboardInterrupt:
        print("")
        exit()
