##########################################################
# This BootAgg example demonstrates the simplest use of  #
# the library. It synthesizes a small dataset, renders   #
# the mean of one column once per bootstrap resample,    #
# and aggregates the images into a point estimate with   #
# its confidence interval.                               #
##########################################################

import os
import argparse
import numpy as np
import BootAgg

# This initialisation is executed when the program is started
def program_setup(configpath, coverage, output, seed):
    # We must first create a Bootplot instance. It loads the
    # configuration file, or creates a default one if none
    # exists yet.
    bootplot = BootAgg.Bootplot(configpath)

    # Let's make up some measurements. In real use, this would
    # be the dataset you already have.
    generator = np.random.default_rng(seed)
    dataset = BootAgg.Dataset.from_columns({
        "value": generator.normal(2.0, 1.5, 40).tolist(),
    })
    datapath = os.path.splitext(output)[0]+".csv"
    with open(datapath, "wb") as file:
        file.write(dataset.to_csv())

    # The render spec tells the built-in renderer what to draw.
    # A point estimate is a single disc at the mean of a column.
    spec = BootAgg.RenderSpec(
        BootAgg.RenderSpec.POINT_ESTIMATE,
        column="value",
        mark_size=3,
    )

    # Instead of choosing the number of images, we ask for a
    # coverage. BootAgg finds the smallest sufficient n.
    config = BootAgg.RunConfig(
        dataset=datapath,
        output=output,
        render_spec=spec,
        coverage=coverage,
        seed=seed,
        width=600,
        height=60,
        transform=bootplot.transform_params(seed=seed),
    )

    result = bootplot.run(config)

    # The observed interval of the stack is the range of marks,
    # which covers a fresh bootstrap estimate with probability
    # (n-1)/(n+1).
    BootAgg.log(
        "Aggregated "+str(result.n)+" images into "+output+
        ", implied coverage "+BootAgg.prettyfraction(result.implied_coverage)
    )


##########################################################
#### Program Startup #####################################
##########################################################

# This part of the program gets run at startup,
# and parses input from the user, and then starts
# the program.
if __name__ == "__main__":
    try:
        parser = argparse.ArgumentParser(
            description="Visualize the uncertainty of a mean"
        )

        parser.add_argument(
            "--config",
            action="store",
            default=None,
            help="path to alternative BootAgg config directory",
            type=str
        )

        parser.add_argument(
            "--coverage",
            action="store",
            default=0.95,
            help="target coverage of the interval",
            type=float
        )

        parser.add_argument(
            "--seed",
            action="store",
            default=1,
            help="seed of the data and the bootstrap",
            type=int
        )

        parser.add_argument(
            "output",
            nargs="?",
            default="point_estimate.png",
            help="output PNG",
            type=str
        )

        args = parser.parse_args()
        program_setup(args.config, args.coverage, args.output, args.seed)

    except KeyboardInterrupt:
        print("")
        exit()
