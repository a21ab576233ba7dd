"""
Unit tests for the block runner.
"""

import pytest

from weylwalk_core.errors import ArgumentError
from weylwalk_walks import RngStream, block_ranges, compensated_sum, map_blocks
from weylwalk_walks.runner import auxiliary_stream, block_stream


def _square(x: int) -> int:
    return x * x


class TestBlockRanges:
    """Tests for cutting work into blocks."""

    def test_covers_every_index_once(self):
        ranges = block_ranges(10, 4)
        assert ranges == [(0, 4), (4, 8), (8, 10)]

    def test_exact_multiple(self):
        assert block_ranges(8, 4) == [(0, 4), (4, 8)]

    def test_empty(self):
        assert block_ranges(0, 4) == []

    def test_rejects_non_positive_block_size(self):
        with pytest.raises(ArgumentError):
            block_ranges(10, 0)


class TestStreams:
    """Tests for per-block stream addressing."""

    def test_block_stream_address(self):
        cell = RngStream(5).substream(2)
        assert block_stream(cell, 3) == RngStream(5, path=(2, 0, 3))

    def test_auxiliary_stream_is_separate(self):
        cell = RngStream(5)
        assert auxiliary_stream(cell) != block_stream(cell, 0)


class TestMapBlocks:
    """Tests for ordered fan-out."""

    def test_serial_preserves_order(self):
        assert map_blocks(_square, [3, 1, 2]) == [9, 1, 4]

    def test_worker_count_does_not_change_result(self):
        payloads = list(range(12))
        assert map_blocks(_square, payloads, workers=2) == map_blocks(_square, payloads, workers=1)

    def test_empty_payloads(self):
        assert map_blocks(_square, [], workers=4) == []


class TestCompensatedSum:
    """Tests for the order-independent reduction."""

    def test_order_independent(self):
        values = [1e16, 1.0, -1e16, 1.0]
        assert compensated_sum(values) == compensated_sum(reversed(values)) == 2.0

    def test_matches_plain_sum_on_small_values(self):
        assert compensated_sum([0.1, 0.2, 0.3]) == pytest.approx(0.6)
