##########################################################
# This BootAgg example is an external renderer. Point    #
# bootagg at it with                                     #
#                                                        #
#   bootagg run --data values.csv --out out.png --n 39   #
#     --renderer-cmd "python3 ExternalRenderer.py        #
#       {resample} {full} {out} {width} {height}"        #
#                                                        #
# It draws the mean of the first numeric column as a     #
# disc above a fixed axis with tick marks. The axis and  #
# the raw data strip are the same in every image, so     #
# they stay crisp in the aggregate. Any plotting program #
# that writes a PNG can take its place.                  #
##########################################################

import sys
import argparse
import numpy as np
import BootAgg

def render(resample_path, full_path, out_path, width, height):
    full = BootAgg.Resampling.load_dataset(full_path)
    resample = BootAgg.Resampling.load_dataset(resample_path)

    numeric = [name for name in full.column_names if full.is_numeric(name)]
    if len(numeric) == 0:
        # Diagnostics on stderr are reported by bootagg
        # when the renderer fails.
        print("No numeric column in "+full_path, file=sys.stderr)
        sys.exit(1)
    column = numeric[0]

    # Axis limits come from the full data only, never from
    # the resample.
    values = full.numeric_column(column)
    margin = 0.1 * (values.max() - values.min()) or 1.0
    frame = BootAgg.PlotFrame(values.min() - margin, values.max() + margin, -1.0, 1.0, width, height)
    canvas = BootAgg.Canvas(width, height)

    axis = height - 4
    canvas.draw_line(0, axis, width - 1, axis, (0, 0, 0))
    for tick in np.linspace(frame.x_min, frame.x_max, 11):
        col, row = BootAgg.Raster.data_to_pixel(frame, tick, 0.0)
        canvas.vertical_span(col, axis, axis + 3, (0, 0, 0))

    # Raw data strip
    for value in values:
        col, row = BootAgg.Raster.data_to_pixel(frame, value, -0.8)
        canvas.plot(col, row, (128, 128, 128))

    mean = float(np.mean(resample.numeric_column(column)))
    col, row = BootAgg.Raster.data_to_pixel(frame, mean, 0.0)
    canvas.fill_disc(col, row, 2, (200, 30, 30))

    with open(out_path, "wb") as file:
        file.write(BootAgg.Raster.encode_png(canvas.to_image()))


if __name__ == "__main__":
    try:
        parser = argparse.ArgumentParser(description="Example external renderer for bootagg")
        parser.add_argument("resample", help="resampled dataset")
        parser.add_argument("full", help="full dataset")
        parser.add_argument("out", help="output PNG")
        parser.add_argument("width", type=int)
        parser.add_argument("height", type=int)

        args = parser.parse_args()
        render(args.resample, args.full, args.out, args.width, args.height)

    except KeyboardInterrupt:
        print("")
        exit()
