import os
import math
import numbers
import numpy as np
import BootAgg
from concurrent.futures import ThreadPoolExecutor
from .SpecialFunctions import SpecialFunctions, BetaParams
from .Raster import Raster, RasterImage
from .Resampling import SeededRng
from .Exceptions import DomainError, DimensionError

class ImageStack:
    """
    An ordered, non-empty sequence of equally sized images. A stack is
    either held in memory, or backed by PNG files whose pixel rows are
    decoded tile by tile when aggregating.

    :param images: A list of :ref:`BootAgg.RasterImage<api-rasterimage>` instances.
    :raises: ``BootAgg.DimensionError`` naming the first image whose size differs from the first one.
    """
    def __init__(self, images):
        images = list(images)
        if len(images) == 0:
            raise DomainError("An image stack needs at least one image")
        for index, image in enumerate(images):
            if not isinstance(image, RasterImage):
                raise TypeError("Stack entry "+str(index)+" is not a RasterImage but "+str(type(image)))

        width, height = images[0].size
        for index, image in enumerate(images):
            if image.size != (width, height):
                raise DimensionError(
                    "Image "+str(index)+" is "+str(image.width)+"x"+str(image.height)+
                    ", expected "+str(width)+"x"+str(height),
                    expected=(width, height), actual=image.size, index=index
                )

        self.__images = images
        self.paths    = None
        self.n        = len(images)
        self.width    = width
        self.height   = height

    @staticmethod
    def from_files(paths):
        """
        Creates a file-backed stack. Only the PNG headers are read here.

        :param paths: PNG file paths, in stack order.
        :raises: ``BootAgg.DimensionError`` naming both the first file and the offending one.
        """
        paths = list(paths)
        if len(paths) == 0:
            raise DomainError("An image stack needs at least one image")

        sizes = []
        for path in paths:
            with open(path, "rb") as file:
                sizes.append(Raster.png_size(file.read()))

        for index, size in enumerate(sizes):
            if size != sizes[0]:
                raise DimensionError(
                    "Image \""+os.path.basename(paths[index])+"\" is "+str(size[0])+"x"+str(size[1])+
                    " but \""+os.path.basename(paths[0])+"\" is "+str(sizes[0][0])+"x"+str(sizes[0][1]),
                    expected=sizes[0], actual=size, index=index
                )

        stack = ImageStack.__new__(ImageStack)
        stack.__images = None
        stack.paths  = paths
        stack.n      = len(paths)
        stack.width  = sizes[0][0]
        stack.height = sizes[0][1]
        return stack

    @property
    def file_backed(self):
        return self.paths != None

    @property
    def size(self):
        return (self.width, self.height)

    @property
    def images(self):
        return [self[i] for i in range(self.n)]

    def rows(self, start, stop):
        """
        :returns: Pixel rows [start, stop) of every image as a uint8 array of shape (n, stop-start, width, 3).
        """
        if self.file_backed:
            tile = np.empty((self.n, stop - start, self.width, 3), dtype=np.uint8)
            for index, path in enumerate(self.paths):
                with open(path, "rb") as file:
                    tile[index] = Raster.decode_png_rows(file.read(), start, stop)
            return tile
        else:
            return np.stack([image.pixels[start:stop] for image in self.__images])

    def __getitem__(self, index):
        if self.file_backed:
            with open(self.paths[index], "rb") as file:
                return Raster.decode_png(file.read())
        return self.__images[index]

    def __len__(self):
        return self.n

    def __iter__(self):
        for index in range(self.n):
            yield self[index]

    def __repr__(self):
        return "<ImageStack n="+str(self.n)+" "+str(self.width)+"x"+str(self.height)+(" file-backed" if self.file_backed else "")+">"


class TransformParams:
    """
    Parameters of the intensity transform applied to per-pixel value
    frequencies.

    :param k: Slope of the transform, any positive number.
    :param tau: Threshold in (0, 0.5). Transformed frequencies lie in [tau, 1-tau].
    :param enabled: When false, aggregation is the plain pixel-wise mean.
    :param tie_break: How a tie for the most frequent value is resolved. ``smallest`` picks the smallest channel value, ``random`` picks one using *seed*.
    :param seed: Seed of the random tie break.
    """
    SMALLEST   = "smallest"
    RANDOM     = "random"
    TIE_BREAKS = [SMALLEST, RANDOM]

    DEFAULT_K   = 2.5
    DEFAULT_TAU = 0.3

    def __init__(self, k=DEFAULT_K, tau=DEFAULT_TAU, enabled=True, tie_break=SMALLEST, seed=0):
        k = float(k)
        tau = float(tau)
        if not (math.isfinite(k) and k > 0):
            raise DomainError("Transform slope k must be positive, got "+repr(k))
        if not (tau > 0 and tau < 0.5):
            raise DomainError("Transform threshold tau must lie in (0, 0.5), got "+repr(tau))
        if not tie_break in TransformParams.TIE_BREAKS:
            raise DomainError("Unknown tie break \""+str(tie_break)+"\", valid are "+", ".join(TransformParams.TIE_BREAKS))

        self.k         = k
        self.tau       = tau
        self.enabled   = bool(enabled)
        self.tie_break = tie_break
        self.seed      = int(seed)

    def __repr__(self):
        return "<TransformParams k="+str(self.k)+" tau="+str(self.tau)+" enabled="+str(self.enabled)+" tie_break="+self.tie_break+">"


class ChannelFrequencyTable:
    """
    The distinct values one channel of one pixel takes across a stack,
    with the number of images showing each value. Entries are kept in
    ascending value order.
    """
    def __init__(self, entries):
        entries = sorted((int(v), int(c)) for v, c in entries)
        if len(entries) == 0:
            raise DomainError("A frequency table needs at least one entry")
        values = [v for v, c in entries]
        if len(set(values)) != len(values):
            raise DomainError("Frequency table values must be distinct, got "+str(values))
        for value, count in entries:
            if value < 0 or value > 255:
                raise DomainError("Channel value "+str(value)+" outside [0, 255]")
            if count < 1:
                raise DomainError("Count of channel value "+str(value)+" must be positive, got "+str(count))

        self.entries = entries
        self.total   = sum(c for v, c in entries)

    @staticmethod
    def from_values(values):
        values, counts = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
        return ChannelFrequencyTable(zip(values.tolist(), counts.tolist()))

    @property
    def values(self):
        return np.array([v for v, c in self.entries], dtype=np.float64)

    @property
    def frequencies(self):
        return np.array([c for v, c in self.entries], dtype=np.float64) / self.total

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return "<ChannelFrequencyTable "+str(self.entries)+">"


class RegionMask:
    """
    A predetermined set of pixels. The region must be chosen before the
    images are looked at for the resulting inference to be valid.

    :param mask: Boolean array-like of shape (height, width).
    """
    def __init__(self, width, height, mask=None):
        RasterImage.check_size(width, height)
        self.width = int(width)
        self.height = int(height)
        if mask is None:
            mask = np.zeros((self.height, self.width), dtype=bool)
        mask = np.array(mask, dtype=bool, copy=True)
        if mask.shape != (self.height, self.width):
            raise DimensionError(
                "Mask of shape "+str(mask.shape)+" does not match "+str(self.width)+"x"+str(self.height),
                expected=(self.width, self.height), actual=mask.shape
            )
        mask.flags.writeable = False
        self.mask = mask

    @staticmethod
    def from_rect(width, height, col0, row0, col1, row1):
        """
        :returns: A mask covering the inclusive pixel rectangle, clipped to the image.
        """
        mask = np.zeros((height, width), dtype=bool)
        mask[max(0, row0):max(0, row1+1), max(0, col0):max(0, col1+1)] = True
        return RegionMask(width, height, mask)

    @staticmethod
    def from_columns(width, height, col0, col1):
        return RegionMask.from_rect(width, height, col0, 0, col1, height-1)

    @property
    def size(self):
        return (self.width, self.height)

    @property
    def count(self):
        return int(self.mask.sum())

    def __repr__(self):
        return "<RegionMask "+str(self.width)+"x"+str(self.height)+" pixels="+str(self.count)+">"


class AggregateImage:
    """
    The aggregated image with 64-bit channel values in [0, 1], stored
    read-only with shape (height, width, 3).
    """
    def __init__(self, width, height, channels):
        RasterImage.check_size(width, height)
        channels = np.array(channels, dtype=np.float64, copy=True)
        if channels.shape != (height, width, 3):
            raise DimensionError(
                "Channel array of shape "+str(channels.shape)+" does not match "+str(width)+"x"+str(height),
                expected=(width, height), actual=channels.shape
            )
        if channels.size > 0 and (not np.all(np.isfinite(channels)) or channels.min() < 0.0 or channels.max() > 1.0):
            raise DomainError("Aggregate channel values must lie in [0, 1]")

        channels.flags.writeable = False
        self.width    = int(width)
        self.height   = int(height)
        self.channels = channels

    @property
    def size(self):
        return (self.width, self.height)

    def __repr__(self):
        return "<AggregateImage "+str(self.width)+"x"+str(self.height)+">"


class Aggregation:
    """
    Pixel-wise aggregation of image stacks, and the read-outs used for
    inference: region occupancy, observed intervals and envelopes.

    All operations walk the stack in tiles of whole pixel rows. Tile
    height follows from the memory cap, and results are identical for
    any tile height and worker count.
    """
    WHITE = (255, 255, 255)

    # Working set used to size tiles when no cap is given. A cap of
    # 0 removes the bound.
    DEFAULT_MEMORY_CAP = 256*1024*1024

    LEVELS = 256

    # Stream id of the random tie break, "tiebreak" in ASCII. Replicate
    # indices never come near it.
    TIE_BREAK_STREAM = 0x746965627265616B

    @staticmethod
    def tile_rows(stack, memory_cap=None, histogram=False):
        """
        :returns: The number of pixel rows processed at once under *memory_cap* bytes.
        """
        if memory_cap == None:
            memory_cap = Aggregation.DEFAULT_MEMORY_CAP
        if memory_cap <= 0:
            # No bound, the whole image is one tile
            return stack.height
        row_values = stack.n * stack.width * 3
        # uint8 tile plus float64 accumulation per row
        per_row = row_values + stack.width * 3 * 8
        if histogram:
            # int64 bin indices, the 256-bin counts and tie priorities
            per_row += row_values * 8 + stack.width * 3 * Aggregation.LEVELS * 8 * 3
        return max(1, min(stack.height, int(memory_cap // per_row)))

    @staticmethod
    def __run_tiles(stack, job, memory_cap, workers, histogram=False):
        tile = Aggregation.tile_rows(stack, memory_cap, histogram)
        bounds = [(start, min(start + tile, stack.height)) for start in range(0, stack.height, tile)]
        BootAgg.log("Aggregating "+str(stack)+" in "+str(len(bounds))+" tiles of "+str(tile)+" rows", BootAgg.LOG_DEBUG)

        if workers > 1 and len(bounds) > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                return list(executor.map(lambda b: job(b[0], b[1]), bounds))
        else:
            return [job(start, stop) for start, stop in bounds]

    @staticmethod
    def mean_aggregate(stack, memory_cap=None, workers=1):
        """
        Averages the stack pixel by pixel.

        :param stack: An :ref:`BootAgg.ImageStack<api-imagestack>`.
        :returns: An :ref:`BootAgg.AggregateImage<api-aggregateimage>` holding the per-channel mean scaled to [0, 1].
        """
        def job(start, stop):
            total = stack.rows(start, stop).sum(axis=0, dtype=np.uint64).astype(np.float64)
            return total / stack.n / 255.0

        channels = np.concatenate(Aggregation.__run_tiles(stack, job, memory_cap, workers), axis=0)
        return AggregateImage(stack.width, stack.height, channels)

    @staticmethod
    def transform_scalar(x, params):
        """
        The frequency transform f(x) = (1-2*tau) * I_x(k, k) + tau. It is
        monotone, maps [0, 1] onto [tau, 1-tau], and f(x) + f(1-x) = 1.
        """
        return (1.0 - 2.0*params.tau) * SpecialFunctions.reg_inc_beta(x, BetaParams(params.k, params.k)) + params.tau

    @staticmethod
    def transform_frequencies(table, params, rng=None):
        """
        Moves frequency mass between the most frequent value of a pixel
        channel and all other values, so that rare values become visible
        and dominant values do not wash them out.

        :param table: A :ref:`BootAgg.ChannelFrequencyTable<api-channelfrequencytable>`.
        :param params: :ref:`BootAgg.TransformParams<api-transformparams>`.
        :param rng: Optional numpy Generator used by the random tie break.
        :returns: The transformed frequencies as a numpy array, aligned with ``table.entries``.
        """
        frequencies = table.frequencies
        if len(frequencies) == 1:
            return np.array([1.0])

        counts = np.array([c for v, c in table.entries])
        candidates = np.flatnonzero(counts == counts.max())
        if len(candidates) > 1 and params.tie_break == TransformParams.RANDOM:
            if rng == None:
                rng = SeededRng(params.seed).derive(Aggregation.TIE_BREAK_STREAM)
            c = int(rng.choice(candidates))
        else:
            c = int(candidates[0])

        x_c = frequencies[c]
        rest = Aggregation.transform_scalar(1.0 - x_c, params)
        transformed = rest * frequencies / (1.0 - x_c)
        transformed[c] = Aggregation.transform_scalar(x_c, params)
        return transformed

    @staticmethod
    def transform_table(n, params):
        """
        :returns: f(j/n) for j = 0..n. Every frequency in a stack of n images is one of these.
        """
        return np.array([Aggregation.transform_scalar(j / n, params) for j in range(n + 1)])

    @staticmethod
    def transform_aggregate(stack, params, memory_cap=None, workers=1):
        """
        Aggregates with transformed frequencies: every channel of every
        pixel becomes the mean of its distinct values weighted by their
        transformed frequencies. A stack of identical images aggregates to
        itself.

        :param stack: An :ref:`BootAgg.ImageStack<api-imagestack>`.
        :param params: :ref:`BootAgg.TransformParams<api-transformparams>`. When ``enabled`` is false this is :func:`mean_aggregate`.
        :param memory_cap: Optional working-set limit in bytes, which sets the tile height. 0 processes the whole image in one tile.
        :param workers: Number of threads processing tiles.
        :returns: An :ref:`BootAgg.AggregateImage<api-aggregateimage>`.
        """
        if not params.enabled:
            return Aggregation.mean_aggregate(stack, memory_cap, workers)

        n = stack.n
        table = Aggregation.transform_table(n, params)
        levels = np.arange(Aggregation.LEVELS, dtype=np.float64)
        random_ties = params.tie_break == TransformParams.RANDOM
        priorities = SeededRng(params.seed) if random_ties else None

        def job(start, stop):
            tile = stack.rows(start, stop)
            channels = tile.shape[1] * tile.shape[2] * 3
            values = tile.reshape(n, channels)

            bins = values.astype(np.int64) + (np.arange(channels, dtype=np.int64) * Aggregation.LEVELS)[np.newaxis, :]
            counts = np.bincount(bins.ravel(), minlength=channels * Aggregation.LEVELS).reshape(channels, Aggregation.LEVELS)

            if random_ties:
                # One priority per (row, column, channel, value), so a tie
                # resolves the same way whatever the tile boundaries.
                keys = np.concatenate([
                    priorities.derive(Aggregation.TIE_BREAK_STREAM, row).random((stack.width * 3, Aggregation.LEVELS))
                    for row in range(start, stop)
                ])
                top = counts == counts.max(axis=1, keepdims=True)
                dominant = np.argmax(np.where(top, keys, -1.0), axis=1)
            else:
                # argmax returns the first maximum, the smallest value
                dominant = np.argmax(counts, axis=1)

            c_count = counts[np.arange(channels), dominant]
            total = counts.astype(np.float64) @ levels
            others = total - c_count * dominant.astype(np.float64)

            rest = n - c_count
            with np.errstate(divide="ignore", invalid="ignore"):
                weight = np.where(rest > 0, table[rest] / np.maximum(rest, 1), 0.0)
            mixed = table[c_count] * dominant + weight * others
            mixed = np.where(rest > 0, mixed, dominant.astype(np.float64))

            result = np.clip(mixed / 255.0, 0.0, 1.0)
            return result.reshape(stop - start, stack.width, 3)

        channels = np.concatenate(Aggregation.__run_tiles(stack, job, memory_cap, workers, histogram=True), axis=0)
        return AggregateImage(stack.width, stack.height, channels)

    @staticmethod
    def quantize(aggregate):
        """
        :returns: The :ref:`BootAgg.RasterImage<api-rasterimage>` with channels round(value * 255), ties to even.
        """
        pixels = np.clip(np.rint(aggregate.channels * 255.0), 0, 255).astype(np.uint8)
        return RasterImage(aggregate.width, aggregate.height, pixels)

    @staticmethod
    def check_background(background, tolerance):
        background = Raster.check_color(background)
        if isinstance(tolerance, bool) or not isinstance(tolerance, numbers.Integral) or tolerance < 0 or tolerance > 255:
            raise DomainError("Tolerance must be an integer in [0, 255], got "+repr(tolerance))
        return np.array(background, dtype=np.int16), int(tolerance)

    @staticmethod
    def deviation(tile, background, tolerance):
        """
        :returns: A boolean array of shape (n, rows, width), true where a pixel is not within tolerance of the background.
        """
        difference = np.abs(tile.astype(np.int16) - background)
        return np.any(difference > tolerance, axis=-1)

    @staticmethod
    def region_occupancy(stack, region, background=WHITE, tolerance=0, memory_cap=None):
        """
        Counts the images that show nothing but background inside a
        predetermined region.

        :param region: A :ref:`BootAgg.RegionMask<api-regionmask>` of the stack's size.
        :param background: The background color.
        :param tolerance: Largest per-channel difference still counted as background.
        :returns: The count Z as *int*.
        """
        if region.size != stack.size:
            raise DimensionError(
                "Region of "+str(region.width)+"x"+str(region.height)+" does not match stack of "+str(stack.width)+"x"+str(stack.height),
                expected=stack.size, actual=region.size
            )
        background, tolerance = Aggregation.check_background(background, tolerance)

        rows = np.flatnonzero(region.mask.any(axis=1))
        if len(rows) == 0:
            return stack.n

        occupied = np.zeros(stack.n, dtype=bool)
        first, last = int(rows[0]), int(rows[-1]) + 1
        tile = Aggregation.tile_rows(stack, memory_cap)
        for start in range(first, last, tile):
            stop = min(start + tile, last)
            deviating = Aggregation.deviation(stack.rows(start, stop), background, tolerance)
            occupied |= np.any(deviating & region.mask[start:stop][np.newaxis], axis=(1, 2))

        z = int(stack.n - occupied.sum())
        BootAgg.log("Region of "+str(region.count)+" pixels is empty in "+str(z)+" of "+str(stack.n)+" images", BootAgg.LOG_DEBUG)
        return z

    @staticmethod
    def __deviation_map(stack, background, tolerance, memory_cap):
        background, tolerance = Aggregation.check_background(background, tolerance)
        tile = Aggregation.tile_rows(stack, memory_cap)
        parts = []
        for start in range(0, stack.height, tile):
            stop = min(start + tile, stack.height)
            parts.append(np.any(Aggregation.deviation(stack.rows(start, stop), background, tolerance), axis=0))
        return np.concatenate(parts, axis=0)

    HORIZONTAL = "horizontal"
    VERTICAL   = "vertical"

    @staticmethod
    def observed_interval(stack, axis=HORIZONTAL, background=WHITE, tolerance=0, memory_cap=None):
        """
        The extreme pixel positions at which any image of the stack
        deviates from the background. For single-mark graphics this is
        the range of the marks, and for n images it covers a fresh
        estimate with probability (n-1)/(n+1).

        :param axis: ``horizontal`` for columns, ``vertical`` for rows.
        :returns: A (lo, hi) tuple of pixel indices.
        :raises: ``BootAgg.DomainError`` if the stack is entirely background.
        """
        if not axis in (Aggregation.HORIZONTAL, Aggregation.VERTICAL):
            raise DomainError("Unknown axis \""+str(axis)+"\", valid are horizontal, vertical")

        deviating = Aggregation.__deviation_map(stack, background, tolerance, memory_cap)
        positions = np.flatnonzero(deviating.any(axis=0 if axis == Aggregation.HORIZONTAL else 1))
        if len(positions) == 0:
            raise DomainError("The stack contains nothing but background")
        return (int(positions[0]), int(positions[-1]))

    @staticmethod
    def observed_envelope(stack, background=WHITE, tolerance=0, memory_cap=None):
        """
        The pointwise band of a stack of curves: in every column, the
        topmost and bottommost row at which any image deviates from the
        background.

        :returns: A (top, bottom) tuple of int64 arrays of length width, -1 where a column never deviates.
        """
        deviating = Aggregation.__deviation_map(stack, background, tolerance, memory_cap)
        present = deviating.any(axis=0)
        top = np.where(present, np.argmax(deviating, axis=0), -1)
        bottom = np.where(present, stack.height - 1 - np.argmax(deviating[::-1], axis=0), -1)
        return (top.astype(np.int64), bottom.astype(np.int64))
