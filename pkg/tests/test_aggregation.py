import os

import numpy as np
import pytest
from scipy import stats

from BootAgg import (Aggregation, ImageStack, TransformParams, ChannelFrequencyTable, RegionMask, AggregateImage,
                     RasterImage, Raster, PlotFrame, RenderSpec, Canvas, Coverage, CoverageSpec,
                     DomainError, DimensionError)
from BootAgg.Renderers import RegressionLineRenderer

WHITE = (255, 255, 255)
BLACK = (0, 0, 0)


def stack_of(arrays):
    return ImageStack([RasterImage(a.shape[1], a.shape[0], a) for a in arrays])


def random_stack(generator, n, width, height, levels=None):
    if levels == None:
        arrays = generator.integers(0, 256, (n, height, width, 3), dtype=np.uint8)
    else:
        arrays = generator.choice(np.array(levels, dtype=np.uint8), (n, height, width, 3))
    return stack_of(arrays)


def marked_stack(width, height, marks, radius=0):
    images = []
    for col, row in marks:
        canvas = Canvas(width, height)
        canvas.fill_disc(col, row, radius, BLACK)
        images.append(canvas.to_image())
    return ImageStack(images)


def blank(width, height):
    return RasterImage.filled(width, height, WHITE)


class TestImageStack:
    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            ImageStack([])

    def test_size_mismatch_names_index(self):
        with pytest.raises(DimensionError) as error:
            ImageStack([blank(4, 4), blank(4, 4), blank(5, 4)])
        assert error.value.index == 2
        assert error.value.expected == (4, 4)

    def test_rejects_non_images(self):
        with pytest.raises(TypeError):
            ImageStack([blank(2, 2), np.zeros((2, 2, 3))])

    def test_rows(self):
        generator = np.random.default_rng(1)
        stack = random_stack(generator, 3, 4, 5)
        tile = stack.rows(1, 3)
        assert tile.shape == (3, 2, 4, 3)
        np.testing.assert_array_equal(tile[2], stack[2].pixels[1:3])

    def test_file_backed_stack_matches_memory(self, tmp_path):
        generator = np.random.default_rng(2)
        stack = random_stack(generator, 5, 7, 6, levels=[0, 128, 255])
        paths = []
        for index, image in enumerate(stack):
            path = tmp_path / ("stack_%04d.png" % index)
            path.write_bytes(Raster.encode_png(image))
            paths.append(str(path))

        files = ImageStack.from_files(paths)
        assert files.file_backed and not stack.file_backed
        assert files.images == stack.images
        params = TransformParams()
        np.testing.assert_array_equal(
            Aggregation.transform_aggregate(files, params, memory_cap=1).channels,
            Aggregation.transform_aggregate(stack, params).channels,
        )
        np.testing.assert_array_equal(Aggregation.mean_aggregate(files).channels, Aggregation.mean_aggregate(stack).channels)

    def test_file_size_mismatch_names_both_files(self, tmp_path):
        first = tmp_path / "a.png"
        second = tmp_path / "b.png"
        first.write_bytes(Raster.encode_png(blank(4, 4)))
        second.write_bytes(Raster.encode_png(blank(4, 5)))
        with pytest.raises(DimensionError) as error:
            ImageStack.from_files([str(first), str(second)])
        assert "a.png" in str(error.value) and "b.png" in str(error.value)


class TestMeanAggregate:
    def test_identical_images(self):
        generator = np.random.default_rng(3)
        image = RasterImage(6, 4, generator.integers(0, 256, (4, 6, 3), dtype=np.uint8))
        aggregate = Aggregation.mean_aggregate(ImageStack([image] * 7))
        np.testing.assert_allclose(aggregate.channels, image.pixels / 255.0, rtol=0, atol=1e-15)
        assert Aggregation.quantize(aggregate) == image

    def test_black_and_white_give_half(self):
        aggregate = Aggregation.mean_aggregate(ImageStack([RasterImage.filled(2, 2, BLACK), blank(2, 2)]))
        assert np.all(aggregate.channels == 0.5)
        assert Aggregation.quantize(aggregate) == RasterImage.filled(2, 2, (128, 128, 128))

    def test_ink_is_conserved(self):
        generator = np.random.default_rng(4)
        for n in range(2, 201):
            marks = generator.integers(0, 3, n)
            stack = marked_stack(3, 1, [(int(col), 0) for col in marks])
            aggregate = Aggregation.mean_aggregate(stack)
            assert (1.0 - aggregate.channels[0, :, 0]).sum() == pytest.approx(1.0, abs=1e-12)
            expected = np.bincount(marks, minlength=3) / n
            np.testing.assert_allclose(1.0 - aggregate.channels[0, :, 0], expected, atol=1e-12)

    def test_linear_in_stack_composition(self):
        generator = np.random.default_rng(5)
        first = random_stack(generator, 4, 5, 3)
        second = random_stack(generator, 9, 5, 3)
        joined = ImageStack(first.images + second.images)
        expected = (4 * Aggregation.mean_aggregate(first).channels + 9 * Aggregation.mean_aggregate(second).channels) / 13
        np.testing.assert_allclose(Aggregation.mean_aggregate(joined).channels, expected, atol=1e-12)

    def test_order_does_not_matter(self):
        generator = np.random.default_rng(6)
        stack = random_stack(generator, 12, 5, 5)
        shuffled = ImageStack([stack[i] for i in generator.permutation(12)])
        np.testing.assert_array_equal(Aggregation.mean_aggregate(stack).channels, Aggregation.mean_aggregate(shuffled).channels)

    def test_tiles_and_workers(self):
        generator = np.random.default_rng(7)
        stack = random_stack(generator, 6, 9, 11)
        reference = Aggregation.mean_aggregate(stack).channels
        np.testing.assert_array_equal(Aggregation.mean_aggregate(stack, memory_cap=1, workers=4).channels, reference)

    def test_zero_cap_is_a_single_tile(self, monkeypatch):
        generator = np.random.default_rng(7)
        stack = random_stack(generator, 6, 9, 11)
        monkeypatch.setattr(Aggregation, "DEFAULT_MEMORY_CAP", 1)
        assert Aggregation.tile_rows(stack, None) == 1
        assert Aggregation.tile_rows(stack, 0) == stack.height
        assert Aggregation.tile_rows(stack, 0, histogram=True) == stack.height
        np.testing.assert_array_equal(
            Aggregation.transform_aggregate(stack, TransformParams(), memory_cap=0).channels,
            Aggregation.transform_aggregate(stack, TransformParams(), memory_cap=1).channels,
        )


class TestTransformParams:
    def test_defaults(self):
        params = TransformParams()
        assert (params.k, params.tau, params.enabled, params.tie_break) == (2.5, 0.3, True, "smallest")

    @pytest.mark.parametrize("options", [dict(k=0), dict(k=-1), dict(tau=0.0), dict(tau=0.5), dict(tie_break="largest")])
    def test_rejects_invalid(self, options):
        with pytest.raises(DomainError):
            TransformParams(**options)


class TestTransformScalar:
    def test_fixed_points(self):
        params = TransformParams()
        assert Aggregation.transform_scalar(0.5, params) == pytest.approx(0.5, abs=1e-14)
        assert Aggregation.transform_scalar(0.0, params) == pytest.approx(0.3, abs=1e-15)
        assert Aggregation.transform_scalar(1.0, params) == pytest.approx(0.7, abs=1e-15)

    def test_matches_beta_distribution(self):
        params = TransformParams()
        expected = 0.4 * stats.beta.cdf(0.25, 2.5, 2.5) + 0.3
        assert Aggregation.transform_scalar(0.25, params) == pytest.approx(expected, abs=1e-12)

    def test_symmetric_monotone_and_bounded(self):
        generator = np.random.default_rng(8)
        for case in range(10000):
            params = TransformParams(k=generator.uniform(0.1, 20.0), tau=generator.uniform(0.01, 0.49))
            x, y = np.sort(generator.uniform(0.0, 1.0, 2))
            fx = Aggregation.transform_scalar(x, params)
            assert fx + Aggregation.transform_scalar(1.0 - x, params) == pytest.approx(1.0, abs=1e-12)
            assert fx <= Aggregation.transform_scalar(y, params) + 1e-15
            assert params.tau - 1e-15 <= fx <= 1.0 - params.tau + 1e-15


class TestTransformFrequencies:
    def test_single_value(self):
        table = ChannelFrequencyTable([(40, 9)])
        assert Aggregation.transform_frequencies(table, TransformParams()).tolist() == [1.0]

    def test_two_values(self):
        params = TransformParams()
        table = ChannelFrequencyTable.from_values([255, 0, 255, 255])
        assert table.entries == [(0, 1), (255, 3)]
        result = Aggregation.transform_frequencies(table, params)
        assert result[1] == pytest.approx(Aggregation.transform_scalar(0.75, params))
        assert result[0] == pytest.approx(Aggregation.transform_scalar(0.25, params))

    def test_sums_to_one(self):
        generator = np.random.default_rng(9)
        params = TransformParams()
        for case in range(500):
            values = generator.integers(0, 256, generator.integers(1, 12))
            counts = generator.integers(1, 50, len(values))
            table = ChannelFrequencyTable.from_values(np.repeat(values, counts))
            result = Aggregation.transform_frequencies(table, params)
            assert result.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(result >= 0.0)

    def test_majority_value_keeps_largest_share(self):
        generator = np.random.default_rng(10)
        params = TransformParams(k=6.0, tau=0.2)
        for case in range(300):
            others = generator.integers(1, 10, generator.integers(1, 6))
            majority = int(others.sum()) + int(generator.integers(0, 10))
            table = ChannelFrequencyTable(list(zip(range(len(others) + 1), [majority] + others.tolist())))
            result = Aggregation.transform_frequencies(table, params)
            assert int(np.argmax(result)) == 0

    def test_tie_picks_smallest_value(self):
        params = TransformParams()
        table = ChannelFrequencyTable([(10, 2), (20, 2), (30, 1)])
        result = Aggregation.transform_frequencies(table, params)
        assert result[0] == pytest.approx(Aggregation.transform_scalar(0.4, params))
        assert result[1] == pytest.approx(Aggregation.transform_scalar(0.6, params) * 2.0 / 3.0)

    def test_random_tie_break_uses_both_candidates(self):
        table = ChannelFrequencyTable([(10, 2), (20, 2), (30, 1)])
        dominant = set()
        for seed in range(40):
            params = TransformParams(tie_break=TransformParams.RANDOM, seed=seed)
            result = Aggregation.transform_frequencies(table, params)
            dominant.add(int(np.argmax(result[:2])) if result[0] != result[1] else -1)
        assert dominant == {0, 1}

    def test_table_validation(self):
        for entries in [[], [(1, 1), (1, 2)], [(300, 1)], [(4, 0)]]:
            with pytest.raises(DomainError):
                ChannelFrequencyTable(entries)


class TestTransformAggregate:
    def test_identical_images_aggregate_to_themselves(self):
        generator = np.random.default_rng(11)
        image = RasterImage(5, 5, generator.integers(0, 256, (5, 5, 3), dtype=np.uint8))
        aggregate = Aggregation.transform_aggregate(ImageStack([image] * 13), TransformParams())
        assert Aggregation.quantize(aggregate) == image

    def test_rare_mark_is_amplified(self):
        params = TransformParams()
        stack = marked_stack(1, 1, [(0, 0)] + [(5, 5)] * 38)
        value = Aggregation.transform_aggregate(stack, params).channels[0, 0, 0]
        assert value == pytest.approx(Aggregation.transform_scalar(38.0 / 39.0, params), abs=1e-12)
        darkness = 1.0 - value
        assert darkness == pytest.approx(Aggregation.transform_scalar(1.0 / 39.0, params), abs=1e-12)
        assert darkness > 1.0 / 39.0

    def test_disabled_is_mean(self):
        generator = np.random.default_rng(12)
        params = TransformParams(enabled=False)
        for case in range(20):
            stack = random_stack(generator, int(generator.integers(1, 15)), 4, 3)
            np.testing.assert_array_equal(
                Aggregation.transform_aggregate(stack, params).channels,
                Aggregation.mean_aggregate(stack).channels,
            )

    @pytest.mark.parametrize("tie_break", [TransformParams.SMALLEST, TransformParams.RANDOM])
    def test_tiles_and_workers(self, tie_break):
        generator = np.random.default_rng(13)
        stack = random_stack(generator, 8, 10, 9, levels=[0, 60, 200, 255])
        params = TransformParams(tie_break=tie_break, seed=5)
        reference = Aggregation.transform_aggregate(stack, params).channels
        tiled = Aggregation.transform_aggregate(stack, params, memory_cap=1, workers=4).channels
        np.testing.assert_array_equal(tiled, reference)

    def test_random_tie_break_resolves_both_ways(self):
        # Two black, two white and one grey image tie black with white
        # in every channel, and the two resolutions give different values.
        levels = [0, 0, 255, 255, 128]
        stack = stack_of([np.full((8, 8, 3), level, dtype=np.uint8) for level in levels])
        params = TransformParams(tie_break=TransformParams.RANDOM, seed=5)
        black_wins = Aggregation.transform_scalar(0.6, params) / 3.0 * (255 + 255 + 128) / 255.0
        white_wins = (Aggregation.transform_scalar(0.4, params) * 255 + Aggregation.transform_scalar(0.6, params) / 3.0 * 128) / 255.0

        channels = Aggregation.transform_aggregate(stack, params).channels
        black = np.isclose(channels, black_wins, rtol=0, atol=1e-12)
        white = np.isclose(channels, white_wins, rtol=0, atol=1e-12)
        assert np.all(black | white)
        assert black.any() and white.any()

        smallest = Aggregation.transform_aggregate(stack, TransformParams()).channels
        np.testing.assert_allclose(smallest, black_wins, rtol=0, atol=1e-12)

        again = Aggregation.transform_aggregate(stack, params, memory_cap=1, workers=3).channels
        np.testing.assert_array_equal(again, channels)
        other_seed = TransformParams(tie_break=TransformParams.RANDOM, seed=6)
        assert not np.array_equal(Aggregation.transform_aggregate(stack, other_seed).channels, channels)

    def test_matches_per_channel_tables(self):
        generator = np.random.default_rng(14)
        params = TransformParams(k=4.0, tau=0.25)
        stack = random_stack(generator, 7, 4, 3, levels=[0, 30, 31, 255])
        aggregate = Aggregation.transform_aggregate(stack, params).channels
        values = np.stack([image.pixels for image in stack])
        for row in range(3):
            for col in range(4):
                for channel in range(3):
                    table = ChannelFrequencyTable.from_values(values[:, row, col, channel])
                    weights = Aggregation.transform_frequencies(table, params)
                    expected = float(np.dot(table.values, weights)) / 255.0
                    assert aggregate[row, col, channel] == pytest.approx(expected, abs=1e-12)

    def test_values_stay_in_unit_interval(self):
        generator = np.random.default_rng(15)
        stack = random_stack(generator, 5, 6, 6, levels=[0, 255])
        channels = Aggregation.transform_aggregate(stack, TransformParams(k=0.2, tau=0.01)).channels
        assert channels.min() >= 0.0 and channels.max() <= 1.0


class TestQuantize:
    def test_rounding(self):
        channels = np.zeros((1, 3, 3))
        channels[0, 1] = 1.0
        channels[0, 2] = 0.5
        image = Aggregation.quantize(AggregateImage(3, 1, channels))
        assert image.pixel(0, 0) == (0, 0, 0)
        assert image.pixel(1, 0) == (255, 255, 255)
        assert image.pixel(2, 0) == (128, 128, 128)

    def test_aggregate_range(self):
        with pytest.raises(DomainError):
            AggregateImage(1, 1, np.full((1, 1, 3), 1.5))


class TestRegionOccupancy:
    def test_counts_empty_images(self):
        images = [blank(20, 10)] * 9
        canvas = Canvas(20, 10)
        canvas.plot(5, 5, BLACK)
        stack = ImageStack(images[:3] + [canvas.to_image()] + images[3:])
        assert Aggregation.region_occupancy(stack, RegionMask.from_rect(20, 10, 4, 4, 6, 6)) == 9
        assert Aggregation.region_occupancy(stack, RegionMask.from_rect(20, 10, 10, 0, 19, 9)) == 10
        assert Aggregation.region_occupancy(stack, RegionMask.from_rect(20, 10, 4, 4, 6, 6), tolerance=255) == 10

    def test_tolerance(self):
        stack = ImageStack([RasterImage.filled(3, 3, (250, 252, 255)), blank(3, 3)])
        region = RegionMask.from_columns(3, 3, 0, 2)
        assert Aggregation.region_occupancy(stack, region, tolerance=5) == 2
        assert Aggregation.region_occupancy(stack, region, tolerance=4) == 1

    def test_empty_region(self):
        stack = marked_stack(5, 5, [(2, 2)] * 4)
        assert Aggregation.region_occupancy(stack, RegionMask(5, 5)) == 4

    def test_size_mismatch(self):
        stack = marked_stack(5, 5, [(2, 2)])
        with pytest.raises(DimensionError):
            Aggregation.region_occupancy(stack, RegionMask(6, 5))

    def test_rect_is_clipped(self):
        mask = RegionMask.from_rect(4, 3, -2, 1, 10, 1)
        assert mask.count == 4
        assert mask.mask[1].all() and not mask.mask[0].any()

    def test_full_occupancy_feeds_jeffreys(self):
        stack = marked_stack(40, 5, [(col, 2) for col in range(30, 39)] * 4 + [(30, 2)] * 3)
        assert stack.n == 39
        z = Aggregation.region_occupancy(stack, RegionMask.from_columns(40, 5, 0, 20), memory_cap=1)
        assert z == 39
        lower = Coverage.jeffreys_interval(z, CoverageSpec(39)).jeffreys_lower
        assert lower == pytest.approx(0.9522, abs=5e-4)


class TestObservedInterval:
    def test_single_position(self):
        assert Aggregation.observed_interval(marked_stack(30, 5, [(17, 2)] * 6)) == (17, 17)

    def test_disc_extent(self):
        stack = marked_stack(100, 11, [(10, 5), (50, 5), (90, 5)], radius=2)
        assert Aggregation.observed_interval(stack) == (8, 92)
        assert Aggregation.observed_interval(stack, axis=Aggregation.VERTICAL) == (3, 7)

    def test_background_only(self):
        with pytest.raises(DomainError):
            Aggregation.observed_interval(ImageStack([blank(5, 5)] * 3))

    def test_unknown_axis(self):
        with pytest.raises(DomainError):
            Aggregation.observed_interval(marked_stack(5, 5, [(1, 1)]), axis="diagonal")


class TestObservedEnvelope:
    def test_matches_curve_rows(self):
        frame = PlotFrame(0.0, 1.0, 0.0, 1.0, 60, 40)
        renderer = RegressionLineRenderer(frame, RenderSpec(RenderSpec.REGRESSION_LINE, column="x", y_column="y"))
        generator = np.random.default_rng(16)
        curves = []
        images = []
        for case in range(12):
            coefficients = [generator.uniform(0.3, 0.7), generator.uniform(-0.3, 0.3)]
            rows = renderer.curve_rows(coefficients)
            assert np.all(np.abs(np.diff(rows)) <= 1)
            canvas = Canvas(60, 40)
            canvas.column_polyline(rows, BLACK)
            curves.append(rows)
            images.append(canvas.to_image())

        top, bottom = Aggregation.observed_envelope(ImageStack(images), memory_cap=1)
        np.testing.assert_array_equal(top, np.min(curves, axis=0))
        np.testing.assert_array_equal(bottom, np.max(curves, axis=0))

    def test_empty_columns(self):
        top, bottom = Aggregation.observed_envelope(marked_stack(4, 6, [(1, 2), (1, 4)]))
        assert top.tolist() == [-1, 2, -1, -1]
        assert bottom.tolist() == [-1, 4, -1, -1]
