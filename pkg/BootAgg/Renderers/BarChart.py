import numpy as np
import BootAgg
from .Renderer import Renderer
from ..Raster import Raster, RenderSpec
from ..Exceptions import RenderError

class BarChartRenderer(Renderer):
    """
    Draws one bar per category, with height proportional to the relative
    frequency of the category in the resample. The order and position of
    the bars come from the render spec and are the same for every resample.
    Aggregated, the bar tops blur into an ambiguated bar chart.
    """
    kind = RenderSpec.BAR_CHART

    # Fraction of each category slot covered by its bar.
    BAR_FILL = 0.8

    def category_keys(self, full):
        """
        :returns: The render spec categories converted to the cell type of the category column.
        :raises: ``BootAgg.RenderError`` if a category never occurs in the full dataset.
        """
        column = full.column(self.spec.category_column)
        if column.dtype == np.float64:
            try:
                keys = [float(c) for c in self.spec.categories]
            except ValueError:
                raise RenderError("Categories "+str(self.spec.categories)+" are not numbers, but column \""+self.spec.category_column+"\" is numeric")
        else:
            keys = [str(c) for c in self.spec.categories]

        domain = set(column.tolist())
        for key in keys:
            if not key in domain:
                raise RenderError("Category \""+str(key)+"\" does not occur in column \""+self.spec.category_column+"\" of the full dataset")
        return keys

    def frequencies(self, resample, keys):
        column = resample.column(self.spec.category_column)
        if resample.row_count == 0:
            return [0.0 for key in keys]
        values = column.tolist()
        return [values.count(key) / float(resample.row_count) for key in keys]

    def slots(self, count):
        """
        :returns: A list of (first column, last column) of each bar.
        """
        width = self.frame.width
        slots = []
        for j in range(count):
            start = (j * width) // count
            stop = ((j + 1) * width) // count
            slot = max(1, stop - start)
            bar = max(1, Raster.round_half_away(slot * BarChartRenderer.BAR_FILL))
            left = start + (slot - bar) // 2
            slots.append((left, left + bar - 1))
        return slots

    def bar_height(self, frequency):
        return Raster.round_half_away(frequency * self.frame.height)

    def render(self, resample, full):
        keys = self.category_keys(full)
        frequencies = self.frequencies(resample, keys)
        canvas = self.canvas()
        bottom = self.frame.height - 1

        for (left, right), frequency in zip(self.slots(len(keys)), frequencies):
            height = self.bar_height(frequency)
            if height > 0:
                canvas.fill_rect(left, bottom - height + 1, right, bottom, self.spec.color)

        return canvas.to_image()


class StackedBarRenderer(BarChartRenderer):
    """
    Draws the category frequencies as adjacent segments of one
    horizontal bar spanning the frame, each category in its own color.
    Aggregated, the segment boundaries blur into an ambiguated stacked
    bar chart.
    """
    kind = RenderSpec.STACKED_BAR

    def boundaries(self, frequencies):
        cumulative = np.concatenate([[0.0], np.cumsum(frequencies)])
        return [Raster.round_half_away(value * self.frame.width) for value in cumulative]

    def render(self, resample, full):
        keys = self.category_keys(full)
        frequencies = self.frequencies(resample, keys)
        canvas = self.canvas()

        top = self.frame.height // 4
        bottom = self.frame.height - 1 - self.frame.height // 4
        edges = self.boundaries(frequencies)
        for j, color in enumerate(self.spec.colors):
            if edges[j+1] > edges[j]:
                canvas.fill_rect(edges[j], top, edges[j+1] - 1, bottom, color)

        return canvas.to_image()
