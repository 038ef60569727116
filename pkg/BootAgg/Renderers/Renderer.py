import numpy as np
import BootAgg
from concurrent.futures import ThreadPoolExecutor
from ..Raster import RenderSpec
from ..Rasterizer import Canvas

class Renderer:
    """
    Base class of everything that maps one resample to one image. A
    renderer sees the resample and the full dataset, and must draw every
    element that does not depend on the resample identically on every
    call, so constant elements stay crisp in the aggregate.

    Built-in renderers are constructed with a
    :ref:`BootAgg.PlotFrame<api-plotframe>` and a
    :ref:`BootAgg.RenderSpec<api-renderspec>`.
    """
    kind = None

    def __init__(self, frame, spec):
        self.frame = frame
        self.spec = spec

    @staticmethod
    def for_spec(frame, spec):
        """
        :returns: The built-in renderer instance for ``spec.kind``.
        """
        from .PointEstimate import PointEstimateRenderer, BivariatePointRenderer
        from .RegressionLine import RegressionLineRenderer
        from .BarChart import BarChartRenderer, StackedBarRenderer
        from .PieChart import PieChartRenderer

        renderers = {
            RenderSpec.POINT_ESTIMATE:  PointEstimateRenderer,
            RenderSpec.BIVARIATE_POINT: BivariatePointRenderer,
            RenderSpec.REGRESSION_LINE: RegressionLineRenderer,
            RenderSpec.BAR_CHART:       BarChartRenderer,
            RenderSpec.STACKED_BAR:     StackedBarRenderer,
            RenderSpec.PIE_CHART:       PieChartRenderer,
        }
        return renderers[spec.kind](frame, spec)

    @property
    def size(self):
        return self.frame.size

    def canvas(self):
        return Canvas(self.frame.width, self.frame.height, self.frame.background)

    def render(self, resample, full):
        raise NotImplementedError()

    def render_stack(self, resamples, full, parallelism=1):
        """
        Renders every resample, keeping resample order.

        :param parallelism: Number of threads rendering concurrently.
        :returns: A :ref:`BootAgg.ImageStack<api-imagestack>`.
        """
        self.spec.validate(full)
        if parallelism > 1 and len(resamples) > 1:
            with ThreadPoolExecutor(max_workers=parallelism) as executor:
                images = list(executor.map(lambda resample: self.render(resample, full), resamples))
        else:
            images = [self.render(resample, full) for resample in resamples]

        BootAgg.log("Rendered "+str(len(images))+" images with "+str(self), BootAgg.LOG_DEBUG)
        return BootAgg.ImageStack(images)

    @staticmethod
    def statistic(values, statistic):
        if len(values) == 0:
            raise BootAgg.RenderError("Cannot compute a statistic of an empty column")
        if statistic == RenderSpec.MEDIAN:
            return float(np.median(values))
        return float(np.mean(values))

    def __str__(self):
        return self.__class__.__name__+"["+str(self.frame.width)+"x"+str(self.frame.height)+"]"
