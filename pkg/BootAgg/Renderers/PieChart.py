import numpy as np
from .BarChart import BarChartRenderer
from ..Raster import RenderSpec

class PieChartRenderer(BarChartRenderer):
    """
    Draws the category frequencies as wedges of a pie centred in the
    frame. The first wedge starts straight up and the wedges follow
    clockwise in category order, so only the wedge boundaries move
    between resamples. Aggregated, they blur into an ambiguated pie
    chart.

    With a non-zero ``overlay`` in the render spec, a smaller pie of the
    full dataset is drawn over the centre of every image. It is the same
    in every image and stays crisp in the aggregate.
    """
    kind = RenderSpec.PIE_CHART

    def geometry(self):
        """
        :returns: The centre column, centre row and radius of the pie in pixels.
        """
        width, height = self.frame.size
        return (width - 1) // 2, (height - 1) // 2, (min(width, height) - 1) // 2

    def boundaries(self, dataset, keys):
        """
        :returns: Wedge boundaries in turns, one more than there are categories.
        """
        if dataset.row_count == 0:
            return np.zeros(len(keys) + 1)
        values = dataset.column(self.spec.category_column).tolist()
        counts = np.array([values.count(key) for key in keys])
        # Cumulative counts keep the last boundary at exactly one turn
        # when the categories cover every row.
        return np.concatenate([[0.0], np.cumsum(counts) / float(dataset.row_count)])

    def draw_pie(self, canvas, radius, edges):
        col, row, _ = self.geometry()
        for j, color in enumerate(self.spec.colors):
            canvas.fill_sector(col, row, radius, edges[j], edges[j+1], color)

    def render(self, resample, full):
        keys = self.category_keys(full)
        canvas = self.canvas()
        radius = self.geometry()[2]

        self.draw_pie(canvas, radius, self.boundaries(resample, keys))
        if self.spec.overlay > 0:
            inner = int(np.floor(self.spec.overlay * radius))
            self.draw_pie(canvas, inner, self.boundaries(full, keys))

        return canvas.to_image()
