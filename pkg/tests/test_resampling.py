import io

import numpy as np
import pytest

from BootAgg import Resampling, Dataset, SeededRng, DomainError, ParseError, RenderError


class TestLoadDataset:
    def test_numeric_and_text_columns(self):
        data = Resampling.load_dataset(b"x,label,mixed\n1.5,a,1\n-2e3,\"b, c\",two\n.25,d,3\n")
        assert data.column_names == ("x", "label", "mixed")
        assert data.row_count == 3
        assert data.is_numeric("x")
        np.testing.assert_array_equal(data.numeric_column("x"), [1.5, -2000.0, 0.25])
        assert data.column("label").tolist() == ["a", "b, c", "d"]
        assert not data.is_numeric("mixed")
        assert data.column("mixed").tolist() == ["1", "two", "3"]
        assert data.rows[1] == (-2000.0, "b, c", "two")

    def test_accepts_paths_and_streams(self, tmp_path):
        content = "\ufeffa,b\n1,2\n3,4\n"
        path = tmp_path / "data.csv"
        path.write_bytes(content.encode("utf-8"))
        from_path = Resampling.load_dataset(str(path))
        from_binary = Resampling.load_dataset(io.BytesIO(content.encode("utf-8")))
        from_text = Resampling.load_dataset(io.StringIO("a,b\n1,2\n3,4\n"))
        assert from_path == from_binary == from_text
        assert from_path.column_names == ("a", "b")

    def test_missing_header(self):
        with pytest.raises(ParseError, match="missing header"):
            Resampling.load_dataset(b"")

    def test_wrong_arity_names_row(self):
        with pytest.raises(ParseError) as error:
            Resampling.load_dataset(b"a,b\n1,2\n3\n")
        assert error.value.row == 1
        assert "Row 1" in str(error.value)

    def test_invalid_utf8(self):
        with pytest.raises(ParseError):
            Resampling.load_dataset(b"a,b\n\xff\xfe,1\n")

    def test_non_finite_cells_stay_text(self):
        data = Resampling.load_dataset(b"a\n1\nnan\n")
        assert not data.is_numeric("a")

    def test_overflowing_decimal_keeps_source_text(self):
        data = Resampling.load_dataset(b"v,w\n1e400,2\n2,3\n")
        assert not data.is_numeric("v")
        assert data.rows == (("1e400", 2.0), ("2", 3.0))
        resample = Resampling.bootstrap_resample(data, SeededRng(3), 0)
        assert set(resample.column("v").tolist()) <= {"1e400", "2"}

    def test_columns_are_read_only(self, normal_dataset):
        with pytest.raises(ValueError):
            normal_dataset.column("value")[0] = 99.0

    def test_csv_writer_reloads(self, normal_dataset):
        assert Resampling.load_dataset(normal_dataset.to_csv()) == normal_dataset

    def test_numeric_column_of_text(self, normal_dataset):
        with pytest.raises(RenderError):
            normal_dataset.numeric_column("group")
        with pytest.raises(RenderError):
            normal_dataset.column("missing")


class TestSeededRng:
    def test_streams_are_reproducible(self):
        first = SeededRng(42).derive(3).random(5)
        second = SeededRng(42).derive(3).random(5)
        np.testing.assert_array_equal(first, second)

    def test_streams_differ_by_path_and_seed(self):
        base = SeededRng(42).derive(3).random(5)
        assert not np.array_equal(base, SeededRng(42).derive(4).random(5))
        assert not np.array_equal(base, SeededRng(43).derive(3).random(5))

    def test_rejects_invalid_seeds(self):
        for seed in [-1, 2**64, 1.5, "7", True]:
            with pytest.raises(DomainError):
                SeededRng(seed)

    def test_rejects_invalid_path_elements(self):
        for element in ["tie-break", -1, 2**64, 0.5, True]:
            with pytest.raises(DomainError):
                SeededRng(1).derive(element)
        assert SeededRng(1).key(np.int64(3)) == SeededRng(1).key(3)

    def test_spawned_generators_are_independent(self):
        rng = SeededRng(1)
        assert rng.spawn(0).seed != rng.spawn(1).seed
        assert rng.spawn(0).seed == SeededRng(1).spawn(0).seed


class TestBootstrap:
    def test_preserves_shape_and_draws_existing_rows(self, normal_dataset):
        resample = Resampling.bootstrap_resample(normal_dataset, SeededRng(5), 0)
        assert resample.column_names == normal_dataset.column_names
        assert resample.row_count == normal_dataset.row_count
        originals = set(normal_dataset.rows)
        assert all(row in originals for row in resample.rows)

    def test_deterministic_per_index(self, normal_dataset):
        rng = SeededRng(5)
        assert Resampling.bootstrap_resample(normal_dataset, rng, 7) == Resampling.bootstrap_resample(normal_dataset, SeededRng(5), 7)
        assert Resampling.bootstrap_resample(normal_dataset, rng, 7) != Resampling.bootstrap_resample(normal_dataset, rng, 8)

    def test_matches_index_draw(self, normal_dataset):
        rng = SeededRng(99)
        indices = Resampling.resample_indices(normal_dataset.row_count, rng, 4)
        assert Resampling.bootstrap_resample(normal_dataset, rng, 4) == normal_dataset.take(indices)

    def test_empty_dataset(self):
        empty = Dataset.from_columns({"a": []})
        with pytest.raises(DomainError):
            Resampling.bootstrap_resample(empty, SeededRng(1))

    def test_stream_is_independent_of_workers(self, normal_dataset):
        rng = SeededRng(2024)
        serial = Resampling.resample_stream(normal_dataset, 20, rng, workers=1)
        threaded = Resampling.resample_stream(normal_dataset, 20, rng, workers=4)
        assert serial == threaded
        assert serial[13] == Resampling.bootstrap_resample(normal_dataset, rng, 13)

    def test_stream_rejects_invalid_counts(self, normal_dataset):
        for n in [0, -1, 2.0]:
            with pytest.raises(DomainError):
                Resampling.resample_stream(normal_dataset, n, SeededRng(1))

    def test_resamples_are_uniform(self):
        counts = np.zeros(10)
        rng = SeededRng(3)
        for index in range(2000):
            counts += np.bincount(Resampling.resample_indices(10, rng, index), minlength=10)
        frequencies = counts / counts.sum()
        np.testing.assert_allclose(frequencies, 0.1, atol=0.01)

    def test_fraction_of_excluded_rows(self):
        rows = 1000
        rng = SeededRng(20240917)
        excluded = 0
        for index in range(10000):
            excluded += rows - len(np.unique(Resampling.resample_indices(rows, rng, index)))
        fraction = excluded / (10000.0 * rows)
        assert fraction == pytest.approx((1.0 - 1.0 / rows) ** rows, abs=0.01)
        assert fraction == pytest.approx(0.3677, abs=0.01)
