import io
import os
import re
import csv
import math
import struct
import numbers
import numpy as np
import BootAgg
from concurrent.futures import ThreadPoolExecutor
from cryptography.hazmat.backends import default_backend
from cryptography.hazmat.primitives import hashes
from .Exceptions import DomainError, ParseError, RenderError

class Dataset:
    """
    An immutable table of rows with named columns. Cells are either
    numbers or text; a column is numeric only if every one of its cells
    is a finite number, otherwise all its cells are text.

    :param column_names: Ordered list of column labels.
    :param rows: Ordered list of records, each with one cell per column.
    """
    CSV = "csv"
    formats = [CSV]

    DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

    def __init__(self, column_names, rows):
        names = tuple(str(name) for name in column_names)
        if len(set(names)) != len(names):
            raise ParseError("Duplicate column names in "+str(list(names)), row=None)

        rows = [tuple(row) for row in rows]
        for index, row in enumerate(rows):
            if len(row) != len(names):
                raise ParseError("Row "+str(index)+" has "+str(len(row))+" cells, expected "+str(len(names)), row=index)

        columns = []
        for j in range(len(names)):
            cells = [row[j] for row in rows]
            columns.append(Dataset.__column_array(cells))

        self.__assign(names, columns)

    @staticmethod
    def from_columns(columns):
        """
        Creates a dataset from a mapping of column name to a sequence of
        cells. All sequences must have the same length.
        """
        names = list(columns.keys())
        lengths = set(len(columns[name]) for name in names)
        if len(lengths) > 1:
            raise ParseError("Columns have differing lengths "+str(sorted(lengths)))
        row_count = lengths.pop() if lengths else 0
        arrays = [Dataset.__column_array(list(columns[name])) for name in names]
        dataset = Dataset.__new__(Dataset)
        dataset.__assign(tuple(str(name) for name in names), arrays, row_count)
        return dataset

    @staticmethod
    def __column_array(cells):
        numeric = all(
            isinstance(cell, numbers.Real) and not isinstance(cell, bool) and math.isfinite(cell)
            for cell in cells
        )
        if numeric:
            array = np.array(cells, dtype=np.float64)
        else:
            array = np.empty(len(cells), dtype=object)
            array[:] = [cell if isinstance(cell, str) else Dataset.__format_cell(cell) for cell in cells]
        array.flags.writeable = False
        return array

    @staticmethod
    def __format_cell(cell):
        if isinstance(cell, float):
            return repr(cell)
        return str(cell)

    def __assign(self, names, columns, row_count=None):
        self.column_names = names
        self.__columns    = columns
        self.__index      = {name: j for j, name in enumerate(names)}
        if row_count == None:
            row_count = len(columns[0]) if columns else 0
        self.row_count    = row_count
        self.__rows       = None

    @property
    def rows(self):
        if self.__rows == None:
            lists = [column.tolist() for column in self.__columns]
            self.__rows = tuple(zip(*lists)) if lists else tuple(() for i in range(self.row_count))
        return self.__rows

    def has_column(self, name):
        return name in self.__index

    def is_numeric(self, name):
        return self.column(name).dtype == np.float64

    def column(self, name):
        """
        :param name: Column label.
        :returns: A read-only numpy array with the cells of the column.
        """
        if not name in self.__index:
            raise RenderError("The dataset has no column \""+str(name)+"\", available columns are "+str(list(self.column_names)))
        return self.__columns[self.__index[name]]

    def numeric_column(self, name):
        column = self.column(name)
        if column.dtype != np.float64:
            raise RenderError("The column \""+str(name)+"\" is not numeric")
        return column

    def take(self, indices):
        """
        :param indices: Row indices, repetitions allowed.
        :returns: A new dataset with the selected rows, in the given order.
        """
        indices = np.asarray(indices, dtype=np.intp)
        dataset = Dataset.__new__(Dataset)
        dataset.__assign(self.column_names, [Dataset.__frozen(column[indices]) for column in self.__columns], len(indices))
        return dataset

    @staticmethod
    def __frozen(array):
        array.flags.writeable = False
        return array

    def to_csv(self):
        """
        :returns: The dataset as UTF-8 encoded comma-separated text with a header row.
        """
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.column_names)
        for row in self.rows:
            writer.writerow([repr(cell) if isinstance(cell, float) else cell for cell in row])
        return buffer.getvalue().encode("utf-8")

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return False
        if self.column_names != other.column_names or self.row_count != other.row_count:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.__columns, other.__columns))

    def __hash__(self):
        return hash((self.column_names, self.row_count))

    def __len__(self):
        return self.row_count

    def __repr__(self):
        return "<Dataset "+str(self.row_count)+" rows, columns "+str(list(self.column_names))+">"


class SeededRng:
    """
    A reproducible source of randomness. Streams are derived per
    replicate from a SHA-256 hash of the seed and the replicate index
    and drive a counter-based Philox generator, so the stream for
    replicate *i* never depends on which other replicates were drawn or
    in which order.

    :param seed: Unsigned 64-bit integer seed.
    """
    ALGORITHM_ID = "philox-sha256-v1"
    MAX_SEED     = 2**64 - 1

    def __init__(self, seed):
        if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
            raise DomainError("Seed must be an integer, got "+repr(seed))
        seed = int(seed)
        if seed < 0 or seed > SeededRng.MAX_SEED:
            raise DomainError("Seed must be an unsigned 64-bit integer, got "+str(seed))
        self.seed = seed
        self.algorithm_id = SeededRng.ALGORITHM_ID

    @staticmethod
    def full_hash(data):
        digest = hashes.Hash(hashes.SHA256(), backend=default_backend())
        digest.update(data)
        return digest.finalize()

    def key(self, *path):
        """
        :param path: Non-negative integers identifying the stream, for example a replicate index.
        :returns: The 128-bit Philox key for the stream as an *int*.
        """
        material = self.algorithm_id.encode("utf-8") + struct.pack("!Q", self.seed)
        for element in path:
            if isinstance(element, bool) or not isinstance(element, numbers.Integral) or element < 0 or element > SeededRng.MAX_SEED:
                raise DomainError("Stream path elements must be unsigned 64-bit integers, got "+repr(element))
            element = int(element)
            material += struct.pack("!Q", element)

        return int.from_bytes(SeededRng.full_hash(material)[:16], "big")

    def derive(self, *path):
        """
        :returns: A ``numpy.random.Generator`` for the stream identified by *path*.
        """
        return np.random.Generator(np.random.Philox(key=self.key(*path)))

    def spawn(self, *path):
        """
        :returns: An independent :ref:`BootAgg.SeededRng<api-seededrng>` for a sub-task such as a simulation trial.
        """
        digest = SeededRng.full_hash(b"spawn" + self.key(*path).to_bytes(16, "big"))
        return SeededRng(int.from_bytes(digest[:8], "big"))

    def __repr__(self):
        return "<SeededRng "+self.algorithm_id+" seed="+str(self.seed)+">"


class Resampling:
    """
    Loading of tabular data and the nonparametric bootstrap over its
    rows. Resample *i* is a pure function of the source dataset, the
    seed and *i*.
    """

    @staticmethod
    def load_dataset(source, format=Dataset.CSV):
        """
        Loads delimited text with a header row. Cells that parse as
        finite decimals become numbers when their whole column does.

        :param source: *bytes*, a path, or an open binary or text stream.
        :param format: Input format, currently only ``"csv"``.
        :returns: A :ref:`BootAgg.Dataset<api-dataset>` instance.
        :raises: ``BootAgg.ParseError`` on malformed input, ``IOError`` if a path cannot be read.
        """
        if not format in Dataset.formats:
            raise DomainError("Unsupported dataset format \""+str(format)+"\"")

        if isinstance(source, (bytes, bytearray)):
            raw = bytes(source)
        elif isinstance(source, (str, os.PathLike)):
            with open(source, "rb") as file:
                raw = file.read()
        elif hasattr(source, "read"):
            raw = source.read()
        else:
            raise DomainError("Cannot load a dataset from "+str(type(source)))

        if isinstance(raw, bytes):
            try:
                text = raw.decode("utf-8-sig")
            except UnicodeDecodeError as e:
                raise ParseError("Input is not valid UTF-8 at byte "+str(e.start))
        else:
            text = raw

        reader = csv.reader(io.StringIO(text, newline=""), strict=True)
        try:
            records = [record for record in reader]
        except csv.Error as e:
            raise ParseError("Malformed delimited text on line "+str(reader.line_num)+": "+str(e), row=max(0, reader.line_num-2))

        while records and records[-1] == []:
            records.pop()

        if len(records) == 0 or records[0] == []:
            raise ParseError("missing header")

        header = records[0]
        body = records[1:]
        if len(set(header)) != len(header):
            raise ParseError("Duplicate column names in header "+str(header), row=None)

        for index, record in enumerate(body):
            if len(record) != len(header):
                raise ParseError("Row "+str(index)+" has "+str(len(record))+" cells, expected "+str(len(header)), row=index)

        columns = {}
        for j, name in enumerate(header):
            cells = [record[j] for record in body]
            values = Resampling.__decimals(cells)
            # Text columns keep the source text of every cell
            columns[name] = values if values != None else cells

        dataset = Dataset.from_columns(columns)
        BootAgg.log("Loaded dataset with "+str(dataset.row_count)+" rows and columns "+str(list(dataset.column_names)), BootAgg.LOG_VERBOSE)
        return dataset

    @staticmethod
    def __decimals(cells):
        """
        :returns: The cells as floats if every one is a finite decimal, otherwise *None*.
        """
        if len(cells) == 0:
            return None
        values = []
        for cell in cells:
            if not Dataset.DECIMAL.match(cell.strip()):
                return None
            value = float(cell)
            if not math.isfinite(value):
                return None
            values.append(value)
        return values

    @staticmethod
    def resample_indices(row_count, rng, index=0):
        """
        :returns: The *row_count* row indices drawn uniformly with replacement for replicate *index*.
        """
        if row_count < 1:
            raise DomainError("Cannot resample an empty dataset")
        generator = rng.derive(index)
        return generator.integers(0, row_count, size=row_count)

    @staticmethod
    def bootstrap_resample(data, rng, index=0):
        """
        Draws one bootstrap resample: as many rows as the source, drawn
        uniformly with replacement.

        :param data: The source :ref:`BootAgg.Dataset<api-dataset>`.
        :param rng: A :ref:`BootAgg.SeededRng<api-seededrng>` instance.
        :param index: Replicate index selecting the random stream.
        :returns: A new :ref:`BootAgg.Dataset<api-dataset>`.
        """
        if data.row_count < 1:
            raise DomainError("Cannot resample an empty dataset")
        return data.take(Resampling.resample_indices(data.row_count, rng, index))

    @staticmethod
    def resample_stream(data, n, rng, workers=1):
        """
        :param n: Number of resamples.
        :param workers: Number of threads drawing resamples. The result does not depend on it.
        :returns: A *list* of *n* resampled datasets, replicate 0 first.
        """
        if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < 1:
            raise DomainError("The number of resamples must be a positive integer, got "+repr(n))
        if data.row_count < 1:
            raise DomainError("Cannot resample an empty dataset")

        if workers > 1 and n > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                resamples = list(executor.map(lambda i: Resampling.bootstrap_resample(data, rng, i), range(n)))
        else:
            resamples = [Resampling.bootstrap_resample(data, rng, i) for i in range(n)]

        BootAgg.log("Drew "+str(n)+" bootstrap resamples of "+str(data.row_count)+" rows", BootAgg.LOG_DEBUG)
        return resamples
