import numpy as np
import BootAgg
from .Raster import Raster, RasterImage

class Canvas:
    """
    A minimal software rasterizer that draws hard-edged primitives into
    an RGB buffer. Nothing is anti-aliased: every pixel written gets the
    full mark color. All primitives clip silently to the canvas.

    :param width: Width in pixels.
    :param height: Height in pixels.
    :param background: RGB color the canvas is filled with.
    """
    def __init__(self, width, height, background=(255, 255, 255)):
        RasterImage.check_size(width, height)
        self.width = width
        self.height = height
        self.buffer = np.empty((height, width, 3), dtype=np.uint8)
        self.buffer[:, :] = Raster.check_color(background)

    def inside(self, col, row):
        return 0 <= col < self.width and 0 <= row < self.height

    def plot(self, col, row, color):
        if self.inside(col, row):
            self.buffer[row, col] = color

    def fill_rect(self, col0, row0, col1, row1, color):
        """
        Fills the rectangle spanning columns col0..col1 and rows
        row0..row1, both ends included.
        """
        c0 = max(0, min(col0, col1))
        c1 = min(self.width - 1, max(col0, col1))
        r0 = max(0, min(row0, row1))
        r1 = min(self.height - 1, max(row0, row1))
        if c0 > c1 or r0 > r1:
            return
        self.buffer[r0:r1+1, c0:c1+1] = color

    def fill_disc(self, col, row, radius, color):
        """
        Fills every pixel whose offset (dx, dy) from the centre satisfies
        dx*dx + dy*dy <= radius*radius, one scanline at a time. A radius
        of 0 fills the centre pixel only.
        """
        r2 = radius * radius
        for dy in range(-radius, radius + 1):
            y = row + dy
            if y < 0 or y >= self.height:
                continue
            # Widest dx on this scanline.
            half = int(np.floor(np.sqrt(r2 - dy * dy)))
            while (half + 1) * (half + 1) + dy * dy <= r2:
                half += 1
            while half * half + dy * dy > r2:
                half -= 1
            x0 = max(0, col - half)
            x1 = min(self.width - 1, col + half)
            if x0 <= x1:
                self.buffer[y, x0:x1+1] = color

    def fill_sector(self, col, row, radius, start, stop, color):
        """
        Fills the pixels of the disc around (col, row) whose direction
        from the centre lies in [start, stop), measured in turns
        clockwise from straight up. The centre pixel has direction 0.
        """
        if stop <= start:
            return
        r0 = max(0, row - radius)
        r1 = min(self.height - 1, row + radius)
        c0 = max(0, col - radius)
        c1 = min(self.width - 1, col + radius)
        if r0 > r1 or c0 > c1:
            return

        dy, dx = np.mgrid[r0 - row:r1 - row + 1, c0 - col:c1 - col + 1]
        turns = np.mod(np.arctan2(dx, -dy) / (2.0 * np.pi), 1.0)
        inside = (dx * dx + dy * dy <= radius * radius) & (turns >= start) & (turns < stop)
        self.buffer[r0:r1+1, c0:c1+1][inside] = color

    def vertical_span(self, col, row0, row1, color):
        if col < 0 or col >= self.width:
            return
        r0 = max(0, min(row0, row1))
        r1 = min(self.height - 1, max(row0, row1))
        if r0 <= r1:
            self.buffer[r0:r1+1, col] = color

    def draw_line(self, col0, row0, col1, row1, color):
        """
        Bresenham line between two pixel positions, endpoints included.
        """
        dx = abs(col1 - col0)
        dy = -abs(row1 - row0)
        sx = 1 if col0 < col1 else -1
        sy = 1 if row0 < row1 else -1
        error = dx + dy
        col, row = col0, row0

        while True:
            self.plot(col, row, color)
            if col == col1 and row == row1:
                break
            e2 = 2 * error
            if e2 >= dy:
                error += dy
                col += sx
            if e2 <= dx:
                error += dx
                row += sy

    def column_polyline(self, rows, color):
        """
        Draws a curve given as one row index per pixel column. Each column
        gets its own point, and successive columns are joined by a
        vertical run so the curve has no gaps. The run between columns c
        and c+1 covers the rows from the point in c up to just before the
        point in c+1, split evenly between the two columns.

        :param rows: Integer row index for every column, possibly out of range.
        """
        rows = np.asarray(rows, dtype=np.int64)
        for col in range(len(rows)):
            here = int(rows[col])
            low = here
            high = here
            if col > 0:
                previous = int(rows[col - 1])
                midpoint = (previous + here) / 2.0
                if previous < here:
                    low = min(low, int(np.floor(midpoint)) + 1)
                elif previous > here:
                    high = max(high, int(np.ceil(midpoint)) - 1)
            if col + 1 < len(rows):
                following = int(rows[col + 1])
                midpoint = (here + following) / 2.0
                if following > here:
                    high = max(high, int(np.floor(midpoint)))
                elif following < here:
                    low = min(low, int(np.ceil(midpoint)))
            self.vertical_span(col, low, high, color)

    def to_image(self):
        return RasterImage(self.width, self.height, self.buffer)
