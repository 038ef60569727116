import numpy as np
import BootAgg
from .Renderer import Renderer
from ..Raster import Raster, RenderSpec
from ..Exceptions import RenderError

class RegressionLineRenderer(Renderer):
    """
    Fits a least-squares polynomial to the resample and draws it one
    pixel thick across the whole frame. Aggregating the curves of many
    resamples gives pointwise confidence bands.

    When ``spec.background_points`` is set, the full dataset is drawn
    first as single-pixel marks. Those marks are the same in every image
    and stay sharp in the aggregate.
    """
    kind = RenderSpec.REGRESSION_LINE

    # Curve rows beyond this distance from the frame are clamped before
    # integer conversion.
    ROW_LIMIT = 2**40

    @staticmethod
    def fit(x, y, degree):
        """
        Least-squares polynomial fit.

        :param x: Numeric x values.
        :param y: Numeric y values.
        :param degree: Polynomial degree.
        :returns: Coefficients as a numpy array, lowest order first.
        :raises: ``BootAgg.RenderError`` when there are no more distinct x values than the degree.
        """
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        distinct = len(np.unique(x))
        if distinct < degree + 1:
            raise RenderError(
                "Cannot fit a polynomial of degree "+str(degree)+" to "+str(distinct)+" distinct x values"
            )

        vandermonde = np.vander(x, degree + 1, increasing=True)
        coefficients, residuals, rank, singular = np.linalg.lstsq(vandermonde, y, rcond=None)
        if rank < degree + 1:
            raise RenderError(
                "Singular fit of degree "+str(degree)+" with "+str(distinct)+" distinct x values"
            )
        return coefficients

    def curve_rows(self, coefficients):
        """
        :returns: The row of the fitted curve in every pixel column.
        """
        xs = Raster.column_centres(self.frame)
        ys = np.polynomial.polynomial.polyval(xs, coefficients)
        rows = (self.frame.y_max - ys) / (self.frame.y_max - self.frame.y_min) * (self.frame.height - 1)
        rows = np.clip(rows, -RegressionLineRenderer.ROW_LIMIT, RegressionLineRenderer.ROW_LIMIT)
        return Raster.round_half_away_array(rows)

    def render(self, resample, full):
        canvas = self.canvas()

        if self.spec.background_points:
            fx = full.numeric_column(self.spec.column)
            fy = full.numeric_column(self.spec.y_column)
            for x, y in zip(fx, fy):
                col, row = Raster.data_to_pixel(self.frame, x, y)
                canvas.plot(col, row, self.spec.point_color)

        x = resample.numeric_column(self.spec.column)
        y = resample.numeric_column(self.spec.y_column)
        coefficients = RegressionLineRenderer.fit(x, y, self.spec.degree)
        canvas.column_polyline(self.curve_rows(coefficients), self.spec.color)

        return canvas.to_image()
