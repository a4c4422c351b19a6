"""Stack-distance accounting and cross-policy comparison tables."""

import math
import random

import pytest

from cachelab.engine import CacheGeometry, simulate
from cachelab.metrics import (
    COMPARE_HEADER,
    ReportMismatchError,
    compare_csv_rows,
    compare_reports,
    histogram_rows,
    reuse_distance_distribution,
    reuse_distances,
)
from cachelab.opt import opt_oracle
from cachelab.policies import make_policy
from cachelab.trace import MemoryAccess, PatternSpec, Trace, generate_pattern


def block_trace(ids, block=64):
    return Trace([MemoryAccess(b * block) for b in ids])


def reference_distances(trace, geometry):
    """Plain list-walking stack simulator, one stack per set."""
    stacks = [[] for _ in range(geometry.num_sets)]
    out = []
    for r in trace:
        blk = r.address // geometry.block_bytes
        st = stacks[blk % geometry.num_sets]
        if blk in st:
            i = st.index(blk)
            out.append(i + 1)
            st.pop(i)
        else:
            out.append(math.inf)
        st.insert(0, blk)
    return out


def test_immediate_rereference_has_distance_one():
    g = CacheGeometry(1, 4, 64)
    assert reuse_distances(block_trace([0, 0]), g) == [math.inf, 1]


def test_distance_counts_the_distinct_blocks_inclusive_of_the_reuse():
    g = CacheGeometry(1, 4, 64)
    # one distinct block in between, plus the re-referenced block itself
    assert reuse_distances(block_trace([0, 1, 0]), g) == [math.inf, math.inf, 2]


def test_cyclic_pattern_distance_equals_the_working_set_size():
    g = CacheGeometry(1, 4, 64)
    t = generate_pattern(PatternSpec("thrash", k=5, n=3))
    d = reuse_distances(t, g)
    assert d[:5] == [math.inf] * 5
    assert d[5:] == [5] * 10
    # a distance one past the associativity is exactly what defeats LRU
    assert all(x > g.ways for x in d[5:])
    assert simulate(t, g, make_policy("lru")).hits == 0


def test_distance_at_or_below_ways_means_an_lru_hit():
    g = CacheGeometry(1, 4, 64)
    t = generate_pattern(PatternSpec("thrash", k=4, n=3))
    d = reuse_distances(t, g)
    assert d[4:] == [4] * 8
    assert simulate(t, g, make_policy("lru")).hits == 8


def test_repeated_touches_do_not_inflate_the_distance():
    g = CacheGeometry(1, 8, 64)
    # block 1 is touched twice in between, but counts once
    assert reuse_distances(block_trace([0, 1, 1, 0]), g) == [math.inf, math.inf, 1, 2]


def test_distances_match_the_list_stack_reference():
    for sets in (1, 4):
        g = CacheGeometry(sets, 4, 64)
        for seed in range(20):
            rng = random.Random(seed)
            t = block_trace([rng.randrange(30) for _ in range(400)])
            assert reuse_distances(t, g) == reference_distances(t, g)


def test_distances_are_computed_per_set():
    g = CacheGeometry(2, 4, 64)
    # blocks 0 and 2 land in set 0, block 1 in set 1: the set-1 access
    # does not separate the two set-0 touches of block 0
    assert reuse_distances(block_trace([0, 1, 0]), g) == [math.inf, math.inf, 1]


def test_distribution_buckets_sum_to_the_trace_length():
    g = CacheGeometry(2, 4, 64)
    rng = random.Random(5)
    t = block_trace([rng.randrange(20) for _ in range(300)])
    hist = reuse_distance_distribution(t, g)
    assert sum(hist.values()) == 300
    assert hist[math.inf] == 20  # one first touch per distinct block


def test_histogram_rows_order_and_cumulative_fractions():
    hist = {2: 10, 1: 30, math.inf: 10, 5: 50}
    rows = histogram_rows(hist)
    assert rows == [(1, 30), (2, 10), (5, 50), (math.inf, 10)]
    cum = histogram_rows(hist, cumulative=True)
    assert [k for k, _ in cum] == [1, 2, 5, math.inf]
    assert cum[0][1] == pytest.approx(0.3)
    assert cum[1][1] == pytest.approx(0.4)
    assert cum[2][1] == pytest.approx(0.9)  # first touches never covered
    assert cum[3][1] == 1.0


def test_compare_reports_elimination_percentages():
    g = CacheGeometry(2, 4, 64)
    rng = random.Random(1)
    t = block_trace([rng.randrange(24) for _ in range(500)])
    lru = simulate(t, g, make_policy("lru"))
    opt = opt_oracle(t, g)
    rows = compare_reports([lru, opt], baseline="lru")
    assert rows[0]["policy"] == "lru"
    assert rows[0]["eliminated_pct"] == 0.0
    expected = 100.0 * (lru.misses - opt.misses) / lru.misses
    assert rows[1]["eliminated_pct"] == pytest.approx(expected)
    assert rows[1]["misses"] == opt.misses


def test_compare_reports_requires_the_baseline_and_matching_runs():
    g = CacheGeometry(2, 4, 64)
    t1 = block_trace(list(range(20)))
    t2 = block_trace(list(range(21)))
    r1 = simulate(t1, g, make_policy("lru"))
    r2 = simulate(t2, g, make_policy("lip"))
    with pytest.raises(ReportMismatchError):
        compare_reports([r1], baseline="opt")
    with pytest.raises(ReportMismatchError):
        compare_reports([r1, r2], baseline="lru")
    r3 = simulate(t1, CacheGeometry(4, 2, 64), make_policy("lip"))
    with pytest.raises(ReportMismatchError):
        compare_reports([r1, r3], baseline="lru")
    with pytest.raises(ReportMismatchError):
        compare_reports([], baseline="lru")


def test_compare_csv_rows_shape():
    g = CacheGeometry(2, 4, 64)
    t = block_trace(list(range(20)) * 2)
    reports = [simulate(t, g, make_policy(n)) for n in ("lru", "lip")]
    rows = compare_csv_rows(compare_reports(reports))
    assert len(rows) == 2
    assert all(len(r.split(",")) == len(COMPARE_HEADER.split(",")) for r in rows)
    assert rows[0].startswith("lru,")
