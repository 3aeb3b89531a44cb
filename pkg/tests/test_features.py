import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from zocr.features import (AveragingMode, FeatureVector, Orientation, extract_features, sub_features, zone_feature,
                           zone_features, zone_partition, write_feature_table)

ALL = AveragingMode.ALL_LINES
NONEMPTY = AveragingMode.NON_EMPTY
zones = arrays(np.uint8, (10, 10), elements=st.integers(0, 1))


class TestZonePartition:
    def test_tiles_glyph(self, rng):
        g = (rng.random((90, 60)) < 0.4).astype(np.uint8)
        z = zone_partition(g)
        assert z.shape == (9, 6, 10, 10)
        assert z.sum() == g.sum()
        np.testing.assert_array_equal(z[3, 4], g[30:40, 40:50])

    def test_single_pixel_zone(self):
        g = np.zeros((90, 60), dtype=np.uint8)
        g[57, 23] = 1
        counts = zone_partition(g).sum(axis=(2, 3))
        assert np.argwhere(counts).tolist() == [[5, 2]]

    def test_wrong_size(self):
        with pytest.raises(ValueError, match="glyph not 90×60"):
            zone_partition(np.zeros((80, 60), dtype=np.uint8))


class TestZoneFeature:
    @pytest.mark.parametrize("orientation", list(Orientation))
    @pytest.mark.parametrize("mode", list(AveragingMode))
    def test_empty_zone_is_zero(self, orientation, mode):
        assert zone_feature(np.zeros((10, 10)), orientation, mode) == 0.0

    def test_full_zone_diagonal(self):
        s = sub_features(np.ones((10, 10)), "diagonal")
        assert s.tolist() == [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1]
        assert zone_feature(np.ones((10, 10)), "diagonal") == pytest.approx(100 / 19, abs=1e-12)

    def test_single_corner_pixel(self):
        z = np.zeros((10, 10))
        z[0, 0] = 1
        assert np.flatnonzero(sub_features(z, "diagonal")).tolist() == [9]
        assert zone_feature(z, "diagonal") == pytest.approx(1 / 19, abs=1e-15)

    def test_full_zone_horizontal(self):
        assert zone_feature(np.ones((10, 10)), "horizontal") == 10.0

    @pytest.mark.parametrize("orientation", list(Orientation))
    def test_single_pixel_nonempty_mode(self, orientation, rng):
        z = np.zeros((10, 10))
        z[tuple(rng.integers(0, 10, size=2))] = 1
        assert zone_feature(z, orientation, NONEMPTY) == 1.0

    def test_diagonal_direction(self):
        # top-left to bottom-right: the main diagonal is a single line
        z = np.eye(10)
        s = sub_features(z, "diagonal")
        assert s[9] == 10 and s.sum() == 10
        assert zone_feature(z, "diagonal", NONEMPTY) == 10.0
        assert zone_feature(np.fliplr(z), "diagonal", NONEMPTY) == 1.0

    def test_wrong_zone_size(self):
        with pytest.raises(ValueError):
            zone_feature(np.zeros((9, 10)), "diagonal")

    @settings(max_examples=200, deadline=None)
    @given(zones)
    def test_sub_features_match_brute_force(self, z):
        for o in Orientation:
            assert sub_features(z, o).tolist() == oracles.line_counts(z, o.value)

    @settings(max_examples=200, deadline=None)
    @given(zones)
    def test_partition_identity(self, z):
        count = int(z.sum())
        for o, lines in ((Orientation.DIAGONAL, 19), (Orientation.HORIZONTAL, 10), (Orientation.VERTICAL, 10)):
            assert int(sub_features(z, o).sum()) == count
            assert abs(zone_feature(z, o) - count / lines) <= 1e-12

    @settings(max_examples=100, deadline=None)
    @given(zones)
    def test_transpose(self, z):
        s, st_ = sub_features(z, "diagonal"), sub_features(z.T, "diagonal")
        assert s.tolist() == st_[::-1].tolist()
        assert zone_feature(z, "diagonal") == zone_feature(z.T, "diagonal")

    @settings(max_examples=100, deadline=None)
    @given(zones)
    def test_nonempty_mode_against_brute_force(self, z):
        for o in Orientation:
            counts = oracles.line_counts(z, o.value)
            nz = [c for c in counts if c]
            expected = sum(nz) / len(nz) if nz else 0.0
            assert zone_feature(z, o, NONEMPTY) == pytest.approx(expected, abs=1e-12)


class TestExtract:
    def test_empty_glyph(self):
        for agg, n in ((False, 54), (True, 69)):
            fv = extract_features(np.zeros((90, 60)), "vertical", agg)
            assert len(fv.values) == n and not fv.values.any()

    def test_full_glyph(self):
        fv = extract_features(np.ones((90, 60)), "diagonal", True)
        np.testing.assert_allclose(fv.values, 100 / 19, atol=1e-12, rtol=0)

    def test_single_full_zone_layout(self):
        g = np.zeros((90, 60), dtype=np.uint8)
        g[:10, :10] = 1
        v = extract_features(g, "diagonal", True).values
        expected = np.zeros(69)
        expected[0] = 100 / 19
        expected[54] = 100 / 19 / 6
        expected[63] = 100 / 19 / 9
        np.testing.assert_allclose(v, expected, atol=1e-12, rtol=0)

    def test_layout_is_zone_row_major(self):
        g = np.zeros((90, 60), dtype=np.uint8)
        g[20:30, 50:60] = 1  # zone (2, 5)
        v = extract_features(g, "horizontal", False).values
        assert np.flatnonzero(v).tolist() == [6 * 2 + 5]

    def test_matches_brute_force_per_zone(self, backend, rng):
        g = (rng.random((90, 60)) < 0.3).astype(np.uint8)
        for o in Orientation:
            for mode in AveragingMode:
                grid = zone_features(g, o, mode)
                for zr in range(9):
                    for zc in range(6):
                        zone = g[10 * zr:10 * zr + 10, 10 * zc:10 * zc + 10]
                        assert grid[zr, zc] == pytest.approx(zone_feature(zone, o, mode), abs=1e-12)

    def test_bounds(self, rng):
        for _ in range(20):
            g = (rng.random((90, 60)) < rng.random()).astype(np.uint8)
            d = extract_features(g, "diagonal", True).values
            h = extract_features(g, "horizontal", True).values
            assert (d >= 0).all() and (d <= 100 / 19 + 1e-12).all()
            assert (h >= 0).all() and (h <= 10).all()

    def test_vector_length_checked(self):
        with pytest.raises(ValueError):
            FeatureVector(Orientation.DIAGONAL, True, np.zeros(54))

    def test_accepts_glyph_box(self):
        from zocr.segment import GlyphBox
        box = GlyphBox(1, 0, 0, 59, 89, np.ones((90, 60), dtype=np.uint8))
        assert extract_features(box, "vertical", False).values[0] == 10.0


def test_feature_table(tmp_path, rng):
    rows = rng.random((2, 69))
    path = tmp_path / "f.csv"
    write_feature_table(path, rows, ["A", "B"], "diagonal", True, ALL)
    lines = path.read_text().splitlines()
    assert lines[0] == "# orientation=diagonal aggregates=1 mode=all-lines dim=69"
    assert lines[1].startswith("# layout:")
    name, *vals = lines[3].split(",")
    assert name == "B" and np.array(vals, dtype=float).tolist() == rows[1].tolist()
