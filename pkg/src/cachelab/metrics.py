"""Reuse-distance analysis and cross-policy comparison tables.

Reuse distance here is the per-set stack distance: the number of
distinct cache blocks touched in a block's set since its previous
access, counting the block itself (a back-to-back re-reference has
distance 1).  A first touch has infinite distance.  Under true LRU an
access hits exactly when its distance is at most the associativity.
"""

import math


class _Fenwick:
    def __init__(self, n):
        self.n = n
        self.a = [0] * (n + 1)

    def add(self, i, delta):
        i += 1
        while i <= self.n:
            self.a[i] += delta
            i += i & (-i)

    def prefix(self, i):
        # sum of [0, i]
        i += 1
        total = 0
        while i > 0:
            total += self.a[i]
            i -= i & (-i)
        return total


def reuse_distances(trace, geometry):
    """Per-access stack distances (math.inf for first touches)."""
    num_sets = geometry.num_sets
    block = geometry.block_bytes
    # pre-count per-set stream lengths so each set gets a snug Fenwick tree
    set_of = []
    counts = [0] * num_sets
    for access in trace:
        si = (access.address // block) % num_sets
        set_of.append(si)
        counts[si] += 1
    trees = [_Fenwick(c) for c in counts]
    last_pos = [dict() for _ in range(num_sets)]
    cursor = [0] * num_sets
    out = []
    for i, access in enumerate(trace):
        si = set_of[i]
        blk = access.address // block
        tree = trees[si]
        pos = cursor[si]
        cursor[si] += 1
        prev = last_pos[si].get(blk)
        if prev is None:
            out.append(math.inf)
        else:
            # distinct blocks strictly between prev and here, plus this one
            out.append(tree.prefix(pos - 1) - tree.prefix(prev) + 1)
            tree.add(prev, -1)
        tree.add(pos, 1)
        last_pos[si][blk] = pos
    return out


def reuse_distance_distribution(trace, geometry):
    """Histogram {distance: count}; key math.inf buckets first touches."""
    hist = {}
    for d in reuse_distances(trace, geometry):
        hist[d] = hist.get(d, 0) + 1
    return hist


def histogram_rows(hist, cumulative=False):
    """(distance, value) rows, finite ascending then inf.

    cumulative=True yields the running fraction of all accesses with
    distance <= d (first touches never count as covered)."""
    total = sum(hist.values())
    keys = sorted(k for k in hist if k != math.inf)
    rows = []
    running = 0
    for k in keys:
        running += hist[k]
        rows.append((k, running / total if cumulative else hist[k]))
    if math.inf in hist:
        value = 1.0 if cumulative else hist[math.inf]
        rows.append((math.inf, value))
    return rows


class ReportMismatchError(ValueError):
    pass


def compare_reports(reports, baseline="lru"):
    """Miss-elimination table against a named baseline report.

    All reports must come from the same trace and geometry.  Returns a
    list of dicts with policy, misses, eliminated_pct, coverage,
    accuracy, ordered as given.
    """
    if not reports:
        raise ReportMismatchError("no reports to compare")
    ident = (reports[0].trace_fingerprint, reports[0].num_sets, reports[0].ways,
             reports[0].block_bytes)
    for r in reports:
        if (r.trace_fingerprint, r.num_sets, r.ways, r.block_bytes) != ident:
            raise ReportMismatchError(
                "report %s is from a different trace or geometry" % r.policy
            )
    base = next((r for r in reports if r.policy == baseline), None)
    if base is None:
        raise ReportMismatchError("baseline %r not among reports" % baseline)
    rows = []
    for r in reports:
        if base.misses:
            eliminated = 100.0 * (base.misses - r.misses) / base.misses
        else:
            eliminated = 0.0
        rows.append(
            {
                "policy": r.policy,
                "misses": r.misses,
                "eliminated_pct": eliminated,
                "coverage": r.coverage,
                "accuracy": r.accuracy,
            }
        )
    return rows


COMPARE_HEADER = "policy,misses,eliminated_pct,coverage,accuracy"


def compare_csv_rows(rows):
    return [
        "%s,%d,%.4f,%.6f,%.6f"
        % (r["policy"], r["misses"], r["eliminated_pct"], r["coverage"], r["accuracy"])
        for r in rows
    ]
