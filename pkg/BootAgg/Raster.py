import io
import math
import zlib
import struct
import numbers
import png
import numpy as np
import BootAgg
from .Exceptions import DomainError, DecodeError, DimensionError, RenderError

class RasterImage:
    """
    A fixed-size RGB raster with 8-bit channels, stored row-major as a
    read-only numpy array of shape (height, width, 3).

    :param width: Width in pixels.
    :param height: Height in pixels.
    :param pixels: Optional array-like of shape (height, width, 3). Defaults to black.
    """
    def __init__(self, width, height, pixels=None):
        RasterImage.check_size(width, height)
        self.width = int(width)
        self.height = int(height)

        if pixels is None:
            array = np.zeros((self.height, self.width, 3), dtype=np.uint8)
        else:
            array = np.asarray(pixels)
            if array.shape != (self.height, self.width, 3):
                raise DimensionError(
                    "Pixel array of shape "+str(array.shape)+" does not match "+str(self.width)+"x"+str(self.height),
                    expected=(self.width, self.height), actual=array.shape
                )
            if array.dtype != np.uint8:
                if array.size > 0 and (array.min() < 0 or array.max() > 255):
                    raise DomainError("Channel values must lie in [0, 255]")
            array = np.array(array, dtype=np.uint8, copy=True)

        array.flags.writeable = False
        self.pixels = array

    @staticmethod
    def check_size(width, height):
        for value, name in ((width, "width"), (height, "height")):
            if isinstance(value, bool) or not isinstance(value, numbers.Integral):
                raise DimensionError("Image "+name+" must be an integer, got "+repr(value))
            if value < 1:
                raise DimensionError("Image "+name+" must be at least 1 pixel, got "+str(value))

    @staticmethod
    def filled(width, height, color):
        array = np.empty((height, width, 3), dtype=np.uint8)
        array[:, :] = Raster.check_color(color)
        return RasterImage(width, height, array)

    @property
    def size(self):
        return (self.width, self.height)

    def pixel(self, col, row):
        return tuple(int(v) for v in self.pixels[row, col])

    def __eq__(self, other):
        return isinstance(other, RasterImage) and self.size == other.size and np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.width, self.height, self.pixels.tobytes()))

    def __repr__(self):
        return "<RasterImage "+str(self.width)+"x"+str(self.height)+">"


class PlotFrame:
    """
    The fixed coordinate frame shared by every image of a run. Bounds are
    set once and never derived from a resample, so axes do not wander
    between images.

    :param x_min: Data coordinate mapped to the leftmost pixel column.
    :param x_max: Data coordinate mapped to the rightmost pixel column.
    :param y_min: Data coordinate mapped to the bottom pixel row.
    :param y_max: Data coordinate mapped to the top pixel row.
    :param width: Width in pixels.
    :param height: Height in pixels.
    :param background: Background RGB color, white by default.
    """
    WHITE = (255, 255, 255)

    def __init__(self, x_min, x_max, y_min, y_max, width, height, background=WHITE):
        x_min, x_max, y_min, y_max = (float(v) for v in (x_min, x_max, y_min, y_max))
        if not all(math.isfinite(v) for v in (x_min, x_max, y_min, y_max)):
            raise DomainError("Frame bounds must be finite")
        if not x_min < x_max:
            raise DomainError("Frame requires x_min < x_max, got "+repr(x_min)+" and "+repr(x_max))
        if not y_min < y_max:
            raise DomainError("Frame requires y_min < y_max, got "+repr(y_min)+" and "+repr(y_max))
        RasterImage.check_size(width, height)

        self.x_min = x_min
        self.x_max = x_max
        self.y_min = y_min
        self.y_max = y_max
        self.width = int(width)
        self.height = int(height)
        self.background = Raster.check_color(background)

    @property
    def size(self):
        return (self.width, self.height)

    def __repr__(self):
        return "<PlotFrame x=["+repr(self.x_min)+", "+repr(self.x_max)+"] y=["+repr(self.y_min)+", "+repr(self.y_max)+"] "+str(self.width)+"x"+str(self.height)+">"


class RenderSpec:
    """
    Describes what a built-in renderer draws.

    :param kind: One of ``RenderSpec.kinds``.
    :param column: Column holding the statistic, or the x values for a regression line.
    :param y_column: Column holding y values, for regression lines and bivariate points.
    :param statistic: ``"mean"`` or ``"median"``, the statistic of point estimates.
    :param degree: Polynomial degree of regression lines.
    :param category_column: Column holding categories, for bar charts.
    :param categories: Category order. Fixed for the whole run.
    :param color: RGB mark color.
    :param colors: One RGB color per category, for stacked bars and pie charts.
    :param mark_size: Mark size in pixels. Discs have radius ``mark_size - 1``.
    :param background_points: Whether regression lines draw the full dataset as constant background marks.
    :param point_color: RGB color of the background marks.
    :param overlay: Radius of a constant pie of the full dataset drawn over every pie chart, as a fraction of the pie radius. 0 draws none.
    """
    POINT_ESTIMATE   = "point_estimate"
    REGRESSION_LINE  = "regression_line"
    BAR_CHART        = "bar_chart"
    BIVARIATE_POINT  = "bivariate_point"
    STACKED_BAR      = "stacked_bar"
    PIE_CHART        = "pie_chart"
    kinds            = [POINT_ESTIMATE, REGRESSION_LINE, BAR_CHART, BIVARIATE_POINT, STACKED_BAR, PIE_CHART]

    MEAN             = "mean"
    MEDIAN           = "median"
    statistics       = [MEAN, MEDIAN]

    BLACK            = (0, 0, 0)
    GREY             = (128, 128, 128)

    def __init__(self, kind, column=None, y_column=None, statistic=MEAN, degree=1, category_column=None,
                 categories=None, color=BLACK, colors=None, mark_size=1, background_points=True, point_color=GREY, overlay=0.0):
        if not kind in RenderSpec.kinds:
            raise DomainError("Unknown render kind \""+str(kind)+"\", valid kinds are "+", ".join(RenderSpec.kinds))
        if not statistic in RenderSpec.statistics:
            raise DomainError("Unknown statistic \""+str(statistic)+"\"")
        if isinstance(mark_size, bool) or not isinstance(mark_size, numbers.Integral) or mark_size < 1:
            raise DomainError("Mark size must be a positive integer, got "+repr(mark_size))
        if isinstance(degree, bool) or not isinstance(degree, numbers.Integral) or degree < 0:
            raise DomainError("Polynomial degree must be a non-negative integer, got "+repr(degree))
        if isinstance(overlay, bool) or not isinstance(overlay, numbers.Real) or not 0.0 <= overlay < 1.0:
            raise DomainError("Pie overlay must lie in [0, 1), got "+repr(overlay))

        self.kind              = kind
        self.column            = column
        self.y_column          = y_column
        self.statistic         = statistic
        self.degree            = int(degree)
        self.category_column   = category_column
        self.categories        = list(categories) if categories != None else None
        self.color             = Raster.check_color(color)
        self.colors            = [Raster.check_color(c) for c in colors] if colors != None else None
        self.mark_size         = int(mark_size)
        self.background_points = bool(background_points)
        self.point_color       = Raster.check_color(point_color)
        self.overlay           = float(overlay)

        if kind in (RenderSpec.POINT_ESTIMATE, RenderSpec.REGRESSION_LINE, RenderSpec.BIVARIATE_POINT) and column == None:
            raise DomainError("A "+kind+" needs a column")
        if kind in (RenderSpec.REGRESSION_LINE, RenderSpec.BIVARIATE_POINT) and y_column == None:
            raise DomainError("A "+kind+" needs a y column")
        if kind in (RenderSpec.BAR_CHART, RenderSpec.STACKED_BAR, RenderSpec.PIE_CHART):
            if category_column == None or not self.categories:
                raise DomainError("A "+kind+" needs a category column and a category order")
            if len(set(self.categories)) != len(self.categories):
                raise DomainError("Category order contains duplicates: "+str(self.categories))
        if kind in (RenderSpec.STACKED_BAR, RenderSpec.PIE_CHART):
            if self.colors == None or len(self.colors) != len(self.categories):
                raise DomainError("A "+kind+" needs exactly one color per category")

    def referenced_columns(self):
        return [c for c in (self.column, self.y_column, self.category_column) if c != None]

    def validate(self, dataset):
        """
        Checks that every column the render spec references exists in *dataset*.
        """
        for name in self.referenced_columns():
            if not dataset.has_column(name):
                raise RenderError("The dataset has no column \""+str(name)+"\" required by the "+self.kind+" renderer")

    def __repr__(self):
        return "<RenderSpec "+self.kind+">"


class Raster:
    """
    PNG encoding and decoding, and the affine map from data coordinates
    to pixel indices.
    """

    COMPRESSION = 6

    NAMED_COLORS = {
        "black": (0, 0, 0),
        "white": (255, 255, 255),
        "red":   (255, 0, 0),
        "green": (0, 128, 0),
        "blue":  (0, 0, 255),
        "grey":  (128, 128, 128),
        "gray":  (128, 128, 128),
    }

    @staticmethod
    def check_color(color):
        try:
            values = tuple(int(c) for c in color)
        except (TypeError, ValueError):
            raise DomainError("A color must be three integers, got "+repr(color))
        if len(values) != 3 or any(c < 0 or c > 255 for c in values):
            raise DomainError("A color must be three channel values in [0, 255], got "+repr(color))
        return values

    @staticmethod
    def parse_color(text):
        """
        Parses ``#rrggbb``, ``r,g,b`` or a basic color name.
        """
        text = text.strip().lower()
        if text in Raster.NAMED_COLORS:
            return Raster.NAMED_COLORS[text]
        if text.startswith("#") and len(text) == 7:
            try:
                return (int(text[1:3], 16), int(text[3:5], 16), int(text[5:7], 16))
            except ValueError:
                pass
        if "," in text:
            try:
                return Raster.check_color([int(part) for part in text.split(",")])
            except ValueError:
                pass
        raise DomainError("Cannot parse color \""+text+"\"")

    @staticmethod
    def encode_png(image):
        """
        :param image: A :ref:`BootAgg.RasterImage<api-rasterimage>` instance.
        :returns: The image as lossless 8-bit RGB PNG *bytes*. Identical images always encode to identical bytes.
        """
        writer = png.Writer(image.width, image.height, greyscale=False, alpha=False, bitdepth=8, compression=Raster.COMPRESSION)
        rows = image.pixels.reshape(image.height, image.width * 3)
        buffer = io.BytesIO()
        writer.write(buffer, (row.tolist() for row in rows))
        return buffer.getvalue()

    @staticmethod
    def decode_png(data):
        """
        Decodes a PNG. Greyscale, palette and 16-bit images are converted
        to 8-bit RGB, and any alpha channel is composited over white.

        :param data: PNG *bytes*.
        :returns: A :ref:`BootAgg.RasterImage<api-rasterimage>` instance.
        :raises: ``BootAgg.DecodeError`` if the stream is malformed or truncated.
        """
        width, height, rows = Raster.__rgba_rows(data)
        try:
            rgba = np.vstack([np.asarray(row, dtype=np.uint16) for row in rows]).reshape(height, width, 4)
        except (png.Error, EOFError, zlib.error, ValueError, struct.error) as e:
            raise DecodeError("Malformed PNG stream: "+str(e))

        return RasterImage(width, height, Raster.composite_over_white(rgba))

    @staticmethod
    def decode_png_rows(data, start, stop):
        """
        Decodes only the pixel rows in [start, stop) of a PNG, without
        holding the other rows in memory.

        :returns: A (stop-start, width, 3) uint8 array.
        """
        width, height, rows = Raster.__rgba_rows(data)
        stop = min(stop, height)
        collected = []
        try:
            for index, row in enumerate(rows):
                if index >= stop:
                    break
                if index >= start:
                    collected.append(np.asarray(row, dtype=np.uint16))
        except (png.Error, EOFError, zlib.error, ValueError, struct.error) as e:
            raise DecodeError("Malformed PNG stream: "+str(e))

        if len(collected) != stop - start:
            raise DecodeError("PNG stream ended after "+str(start+len(collected))+" rows")

        rgba = np.vstack(collected).reshape(stop - start, width, 4)
        return Raster.composite_over_white(rgba)

    @staticmethod
    def png_size(data):
        width, height, rows = Raster.__rgba_rows(data)
        return (width, height)

    @staticmethod
    def __rgba_rows(data):
        if not isinstance(data, (bytes, bytearray)):
            raise DecodeError("PNG data must be bytes, got "+str(type(data)))
        try:
            reader = png.Reader(bytes=bytes(data))
            width, height, rows, info = reader.asRGBA8()
        except (png.Error, EOFError, zlib.error, ValueError, struct.error) as e:
            raise DecodeError("Malformed PNG stream: "+str(e))
        if width < 1 or height < 1:
            raise DecodeError("PNG has zero dimension "+str(width)+"x"+str(height))
        return width, height, rows

    @staticmethod
    def composite_over_white(rgba):
        rgba = rgba.astype(np.uint32)
        alpha = rgba[..., 3:4]
        # Integer compositing with rounding, exact for opaque pixels.
        blended = (rgba[..., :3] * alpha + 255 * (255 - alpha) + 127) // 255
        return blended.astype(np.uint8)

    @staticmethod
    def round_half_away(value):
        """
        Rounds half away from zero. This is the one rounding rule used for
        every data-to-pixel conversion.
        """
        return int(math.copysign(math.floor(abs(value) + 0.5), value))

    @staticmethod
    def round_half_away_array(values):
        values = np.asarray(values, dtype=np.float64)
        return (np.sign(values) * np.floor(np.abs(values) + 0.5)).astype(np.int64)

    @staticmethod
    def data_to_pixel(frame, x, y):
        """
        Maps data coordinates to pixel indices. x_min maps to column 0,
        x_max to column width-1, y_max to row 0 and y_min to row
        height-1. Points outside the frame give out-of-range indices for
        the caller to clip.

        :returns: A (col, row) tuple of *int*.
        """
        x = float(x)
        y = float(y)
        if not math.isfinite(x) or not math.isfinite(y):
            raise RenderError("Cannot map non-finite coordinates ("+repr(x)+", "+repr(y)+") to pixels")

        col = Raster.round_half_away((x - frame.x_min) / (frame.x_max - frame.x_min) * (frame.width - 1))
        row = Raster.round_half_away((frame.y_max - y) / (frame.y_max - frame.y_min) * (frame.height - 1))
        return (col, row)

    @staticmethod
    def y_to_row_array(frame, ys):
        ys = np.asarray(ys, dtype=np.float64)
        return Raster.round_half_away_array((frame.y_max - ys) / (frame.y_max - frame.y_min) * (frame.height - 1))

    @staticmethod
    def column_centres(frame):
        """
        :returns: The data x coordinate of every pixel column, the inverse of the column map.
        """
        if frame.width == 1:
            return np.array([frame.x_min])
        return frame.x_min + np.arange(frame.width, dtype=np.float64) * ((frame.x_max - frame.x_min) / (frame.width - 1))
