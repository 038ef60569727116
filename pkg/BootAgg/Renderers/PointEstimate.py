import BootAgg
from .Renderer import Renderer
from ..Raster import Raster, RenderSpec

class PointEstimateRenderer(Renderer):
    """
    Draws the statistic of one numeric column as a single filled disc at
    height 0, the graphic behind a point estimate with its confidence
    interval.
    """
    kind = RenderSpec.POINT_ESTIMATE

    def mark_position(self, resample):
        """
        :returns: The (col, row) pixel centre of the mark for *resample*.
        """
        values = resample.numeric_column(self.spec.column)
        estimate = Renderer.statistic(values, self.spec.statistic)
        return Raster.data_to_pixel(self.frame, estimate, 0.0)

    def render(self, resample, full):
        canvas = self.canvas()
        col, row = self.mark_position(resample)
        canvas.fill_disc(col, row, self.spec.mark_size - 1, self.spec.color)
        return canvas.to_image()


class BivariatePointRenderer(PointEstimateRenderer):
    """
    Draws the statistic of two numeric columns as one disc at (x, y).
    Aggregated, the discs form a confidence region for the bivariate
    estimate.
    """
    kind = RenderSpec.BIVARIATE_POINT

    def mark_position(self, resample):
        x = Renderer.statistic(resample.numeric_column(self.spec.column), self.spec.statistic)
        y = Renderer.statistic(resample.numeric_column(self.spec.y_column), self.spec.statistic)
        return Raster.data_to_pixel(self.frame, x, y)
