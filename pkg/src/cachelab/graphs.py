"""Graph structures, degree-based reordering, and graph access traces.

Graphs are compressed sparse row; `direction` says whether neighbor
lists hold in-edges (pull-style processing) or out-edges (push).  The
degree that matters for cache behavior is how often a vertex appears in
other vertices' neighbor lists, since each appearance is one access to
its property element; `reuse_degrees` computes exactly that and is the
default ranking for every reordering here.

Reorderings are expressed as a remap array M where M[old_id] = new_id.
Degree-based grouping walks vertices once, appending each to the group
whose half-open degree range contains it, then assigns new ids group by
group from hottest to coldest; within a group original order is kept.
"""

import random
import struct

import numpy as np

from cachelab.trace import MemoryAccess, Trace

CSR_MAGIC = b"CSR1"

# pc signatures for the four access streams of a graph iteration
PC_VERTEX = 0x011
PC_EDGE = 0x022
PC_GATHER = 0x033
PC_APPLY = 0x044


class GraphError(Exception):
    pass


class EdgeListError(GraphError):
    pass


class CsrMagicError(GraphError):
    pass


class CsrTruncatedError(GraphError):
    pass


class CsrGraph:
    """Compressed sparse row adjacency."""

    def __init__(self, offsets, edges, direction="in"):
        if direction not in ("in", "out"):
            raise GraphError("direction must be 'in' or 'out'")
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.edges = np.asarray(edges, dtype=np.int64)
        self.direction = direction
        if len(self.offsets) < 1 or self.offsets[0] != 0:
            raise GraphError("offsets must start at 0")
        if np.any(np.diff(self.offsets) < 0):
            raise GraphError("offsets must be non-decreasing")
        if self.offsets[-1] != len(self.edges):
            raise GraphError("offsets[-1] must equal edge count")
        if len(self.edges) and (
            self.edges.min() < 0 or self.edges.max() >= self.vertex_count
        ):
            raise GraphError("edge endpoint out of range")

    @property
    def vertex_count(self):
        return len(self.offsets) - 1

    @property
    def edge_count(self):
        return len(self.edges)

    def neighbors(self, v):
        return self.edges[self.offsets[v] : self.offsets[v + 1]]

    def degree_array(self):
        """Neighbor-list lengths in the stored direction."""
        return np.diff(self.offsets)

    def reuse_degrees(self):
        """How often each vertex appears in neighbor lists (= accesses to
        its property element per iteration, beyond its own update)."""
        return np.bincount(self.edges, minlength=self.vertex_count).astype(np.int64)


def load_edge_list(path, direction="in"):
    """Parse 'src dst' lines ('#' starts a comment) into a CsrGraph."""
    srcs = []
    dsts = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise EdgeListError("line %d: expected 'src dst'" % lineno)
            try:
                s, d = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListError("line %d: non-integer vertex id" % lineno) from None
            if s < 0 or d < 0:
                raise EdgeListError("line %d: negative vertex id" % lineno)
            if s >= 1 << 64 or d >= 1 << 64:
                raise EdgeListError("line %d: vertex id overflows u64" % lineno)
            srcs.append(s)
            dsts.append(d)
    if not srcs:
        return CsrGraph([0], [], direction)
    src = np.array(srcs, dtype=np.int64)
    dst = np.array(dsts, dtype=np.int64)
    top = int(max(src.max(), dst.max()))
    distinct = len(np.unique(np.concatenate([src, dst])))
    if top + 1 > 10 * distinct:
        # sparse id space: compact ids to 0..V-1 in sorted order
        ids = np.unique(np.concatenate([src, dst]))
        src = np.searchsorted(ids, src)
        dst = np.searchsorted(ids, dst)
        top = len(ids) - 1
    return _csr_from_pairs(src, dst, top + 1, direction)


def _csr_from_pairs(src, dst, v_count, direction):
    rows, vals = (dst, src) if direction == "in" else (src, dst)
    order = np.argsort(rows, kind="stable")
    counts = np.bincount(rows, minlength=v_count)
    offsets = np.zeros(v_count + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return CsrGraph(offsets, vals[order], direction)


def write_csr(graph, path):
    with open(path, "wb") as fh:
        fh.write(CSR_MAGIC)
        fh.write(struct.pack("<QQ", graph.vertex_count, graph.edge_count))
        fh.write(graph.offsets.astype("<u8").tobytes())
        fh.write(graph.edges.astype("<u8").tobytes())


def read_csr(path, direction="in"):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 20:
        raise CsrTruncatedError("file shorter than CSR header")
    if data[:4] != CSR_MAGIC:
        raise CsrMagicError("bad magic %r" % (data[:4],))
    v_count, e_count = struct.unpack_from("<QQ", data, 4)
    expected = 20 + 8 * (v_count + 1 + e_count)
    if len(data) != expected:
        raise CsrTruncatedError("CSR holds %d bytes, header promises %d" % (len(data), expected))
    body = np.frombuffer(data, dtype="<u8", offset=20)
    offsets = body[: v_count + 1].astype(np.int64)
    edges = body[v_count + 1 :].astype(np.int64)
    return CsrGraph(offsets, edges, direction)


def write_remap(remap, path):
    remap = np.asarray(remap, dtype=np.int64)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", len(remap)))
        fh.write(remap.astype("<u8").tobytes())


def read_remap(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 8:
        raise CsrTruncatedError("file shorter than remap header")
    (v_count,) = struct.unpack_from("<Q", data, 0)
    if len(data) != 8 + 8 * v_count:
        raise CsrTruncatedError("remap length does not match header")
    return np.frombuffer(data, dtype="<u8", offset=8).astype(np.int64)


class GroupingSpec:
    """Ordered degree ranges [lo, hi), hottest first, covering [0, inf)."""

    def __init__(self, ranges):
        if not ranges:
            raise GraphError("grouping spec needs at least one range")
        for (lo, hi) in ranges:
            if not lo < hi:
                raise GraphError("empty degree range [%r, %r)" % (lo, hi))
        for (lo1, _), (_, hi2) in zip(ranges, ranges[1:]):
            if lo1 != hi2:
                raise GraphError("degree ranges must be contiguous and descending")
        if ranges[-1][0] != 0:
            raise GraphError("coldest range must start at degree 0")
        self.ranges = list(ranges)

    def group_of(self, degree):
        for k, (lo, hi) in enumerate(self.ranges):
            if lo <= degree < hi:
                return k
        raise GraphError("degree %r not covered" % (degree,))

    def group_array(self, degrees):
        """Vectorized group_of: lowest group index = hottest."""
        lows = np.array([lo for lo, _ in self.ranges], dtype=float)
        top = self.ranges[0][1]
        if top != np.inf and len(degrees) and degrees.max() >= top:
            raise GraphError("degree %d above hottest range" % int(degrees.max()))
        # lows are descending; a degree's group is the count of lows above it
        return np.searchsorted(-lows, -np.asarray(degrees, dtype=float), side="left")


def default_grouping(avg_degree):
    """Eight geometric ranges around the average degree."""
    a = float(avg_degree)
    if a <= 0:
        return GroupingSpec([(0, np.inf)])
    return GroupingSpec(
        [
            (32 * a, np.inf),
            (16 * a, 32 * a),
            (8 * a, 16 * a),
            (4 * a, 8 * a),
            (2 * a, 4 * a),
            (a, 2 * a),
            (a / 2, a),
            (0, a / 2),
        ]
    )


def _remap_from_groups(group_index):
    order = np.argsort(group_index, kind="stable")
    remap = np.empty(len(order), dtype=np.int64)
    remap[order] = np.arange(len(order))
    return remap


def dbg_reorder(graph, spec=None, degrees=None):
    """Degree-based grouping under the given (or default) spec."""
    if degrees is None:
        degrees = graph.reuse_degrees()
    degrees = np.asarray(degrees)
    if spec is None:
        avg = degrees.mean() if len(degrees) else 0.0
        spec = default_grouping(avg)
    return _remap_from_groups(spec.group_array(degrees))


def _per_degree_ranges(distinct_desc, floor):
    """Contiguous per-degree ranges for the given distinct degrees
    (descending), bottoming out at `floor`."""
    ranges = []
    hi = np.inf
    for d in distinct_desc:
        ranges.append((float(d), hi))
        hi = float(d)
    if hi > floor:
        ranges.append((floor, hi))
    return ranges


def family_reorder(graph, kind, degrees=None):
    """Reorderings expressed through the same grouping machinery.

    sort        one group per distinct degree, descending (stable full sort)
    hubsort     per-degree groups for hot degrees, one cold group
    hubcluster  two groups: hot then cold, both in original order
    dbg         eight geometric ranges around the average degree
    """
    if degrees is None:
        degrees = graph.reuse_degrees()
    degrees = np.asarray(degrees)
    avg = degrees.mean() if len(degrees) else 0.0
    if kind == "dbg":
        return dbg_reorder(graph, degrees=degrees)
    if kind == "sort":
        distinct = np.unique(degrees)[::-1]
        spec = GroupingSpec(_per_degree_ranges(distinct, 0))
    elif kind == "hubsort":
        if avg <= 0:
            spec = GroupingSpec([(0, np.inf)])
        else:
            hot = np.unique(degrees[degrees >= avg])[::-1]
            ranges = _per_degree_ranges(hot, 0) if len(hot) else [(0, np.inf)]
            spec = GroupingSpec(ranges)
    elif kind == "hubcluster":
        if avg <= 0:
            spec = GroupingSpec([(0, np.inf)])
        else:
            spec = GroupingSpec([(avg, np.inf), (0, avg)])
    else:
        raise GraphError("unknown reorder kind: %r" % (kind,))
    return _remap_from_groups(spec.group_array(degrees))


def random_reorder(graph, granularity_blocks=0, seed=0, prop_bytes=8, block_bytes=64):
    """granularity 0: uniform random permutation of all vertices.
    granularity n>=1: shuffle runs of n cache blocks' worth of vertices,
    keeping order inside each run."""
    v_count = graph.vertex_count
    rng = random.Random(seed)
    if granularity_blocks == 0:
        order = list(range(v_count))
        rng.shuffle(order)
    else:
        run = granularity_blocks * (block_bytes // prop_bytes)
        if run < 1:
            raise GraphError("block_bytes must hold at least one property element")
        runs = [list(range(i, min(i + run, v_count))) for i in range(0, v_count, run)]
        rng.shuffle(runs)
        order = [v for chunk in runs for v in chunk]
    remap = np.empty(v_count, dtype=np.int64)
    remap[np.array(order, dtype=np.int64)] = np.arange(v_count)
    return remap


def apply_remap(graph, remap):
    """Relabel vertices; neighbor lists come out sorted (canonical)."""
    remap = np.asarray(remap, dtype=np.int64)
    v_count = graph.vertex_count
    if len(remap) != v_count:
        raise GraphError("remap length != vertex count")
    check = np.zeros(v_count, dtype=bool)
    check[remap] = True
    if not check.all():
        raise GraphError("remap is not a permutation")
    old_rows = np.repeat(np.arange(v_count), np.diff(graph.offsets))
    new_rows = remap[old_rows]
    new_vals = remap[graph.edges]
    order = np.lexsort((new_vals, new_rows))
    counts = np.bincount(new_rows, minlength=v_count)
    offsets = np.zeros(v_count + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return CsrGraph(offsets, new_vals[order], graph.direction)


def skew_metrics(graph, prop_bytes=8, block_bytes=64, degrees=None):
    """Hot-vertex statistics under the graph's current vertex order.

    A vertex is hot when its degree is at least the average.  The
    per-block average counts hot vertices only over property-array
    cache blocks that contain at least one.
    """
    if degrees is None:
        degrees = graph.reuse_degrees()
    degrees = np.asarray(degrees)
    v_count = graph.vertex_count
    total = int(degrees.sum())
    avg = degrees.mean() if v_count else 0.0
    hot = degrees >= avg if v_count else np.zeros(0, dtype=bool)
    hot_count = int(hot.sum())
    per_block = max(1, block_bytes // prop_bytes)
    n_blocks = (v_count + per_block - 1) // per_block
    hot_per_block = np.zeros(n_blocks, dtype=np.int64)
    if v_count:
        np.add.at(hot_per_block, np.arange(v_count) // per_block, hot.astype(np.int64))
    occupied = hot_per_block[hot_per_block > 0]
    return {
        "hot_fraction": hot_count / v_count if v_count else 0.0,
        "hot_edge_coverage": float(degrees[hot].sum()) / total if total else 0.0,
        "avg_hot_per_block": float(occupied.mean()) if len(occupied) else 0.0,
        "hot_footprint_bytes": hot_count * prop_bytes,
    }


def synth_powerlaw(v_count, avg_degree, skew_alpha=2.1, seed=0, direction="in"):
    """Directed graph with rank-based power-law endpoint weights.

    Both endpoints of each edge are drawn in proportion to a
    (rank+1)^(-1/(alpha-1)) weight, giving a degree distribution with
    power-law exponent about alpha; self-loops are dropped.  Weights are
    shuffled over vertex ids so hot vertices land anywhere in the id
    space.  Larger alpha flattens the weights toward uniform.
    """
    if v_count < 2 or avg_degree <= 0:
        raise GraphError("need at least two vertices and positive average degree")
    rng = np.random.default_rng(seed)
    target_edges = int(round(avg_degree * v_count))
    beta = 1.0 / (skew_alpha - 1.0)
    weights = np.arange(1, v_count + 1, dtype=float) ** (-beta)
    rng.shuffle(weights)
    p = weights / weights.sum()
    src = rng.choice(v_count, size=target_edges, p=p)
    dst = rng.choice(v_count, size=target_edges, p=p)
    keep = src != dst
    return _csr_from_pairs(
        src[keep].astype(np.int64), dst[keep].astype(np.int64), v_count, direction
    )


def synth_uniform(v_count, degree, seed=0, direction="in"):
    """Exactly `degree`-regular directed graph with no self-loops:
    vertex v's in-neighbors are v minus `degree` distinct random offsets."""
    if not 0 < degree < v_count:
        raise GraphError("degree must be in (0, vertex_count)")
    rng = np.random.default_rng(seed)
    offs = rng.choice(np.arange(1, v_count), size=degree, replace=False)
    base = np.arange(v_count, dtype=np.int64)
    dst = np.repeat(base, degree)
    src = (dst - np.tile(offs, v_count)) % v_count
    return _csr_from_pairs(src, dst, v_count, direction)


def gen_graph_trace(
    graph,
    prop_bytes=8,
    block_bytes=64,
    prop_base=0,
    bake_hints=False,
    llc_capacity=None,
):
    """One full iteration of neighbor-gather processing as an LLC trace.

    Per vertex v (in id order): one access to its vertex-array entry,
    one access per edge-array cache block its neighbor range touches,
    one property read per neighbor, then one write to v's slot in a
    separate output array.  A property element is therefore touched
    exactly as many times per iteration as its vertex appears in
    neighbor lists.  Returns (trace, region_bounds) where region_bounds
    is the property array's [start, end) for use as a replacement hint
    region; the vertex, edge and output arrays sit above it in address
    space and are plain streaming traffic.

    With bake_hints the records carry the region classification that a
    cache of llc_capacity bytes would compute at run time.
    """
    v_count = graph.vertex_count
    prop_end = prop_base + v_count * prop_bytes
    abrs = [(prop_base, prop_end)]
    classify = None
    if bake_hints:
        from cachelab.grasp import RegionMap

        if llc_capacity is None:
            raise GraphError("bake_hints needs llc_capacity")
        classify = RegionMap(abrs, llc_capacity).classify

    def align_up(x):
        return (x + block_bytes - 1) // block_bytes * block_bytes

    vertex_base = align_up(prop_end)
    edge_base = align_up(vertex_base + 8 * v_count)
    out_base = align_up(edge_base + 8 * graph.edge_count)

    offsets = graph.offsets
    edges = graph.edges
    records = []
    append = records.append

    def rec(address, pc, write=False):
        if classify is None:
            append(MemoryAccess(address, pc_signature=pc, is_write=write))
        else:
            append(
                MemoryAccess(
                    address,
                    pc_signature=pc,
                    is_write=write,
                    reuse_hint=classify(address),
                    hint_valid=True,
                )
            )

    last_edge_block = -1
    for v in range(v_count):
        rec(vertex_base + 8 * v, PC_VERTEX)
        lo, hi = offsets[v], offsets[v + 1]
        if hi > lo:
            first_block = (edge_base + 8 * lo) // block_bytes
            last_block = (edge_base + 8 * hi - 8) // block_bytes
            for blk in range(first_block, last_block + 1):
                if blk != last_edge_block:
                    rec(blk * block_bytes, PC_EDGE)
                    last_edge_block = blk
            for u in edges[lo:hi]:
                rec(prop_base + prop_bytes * int(u), PC_GATHER)
        rec(out_base + prop_bytes * v, PC_APPLY, write=True)
    return Trace(records, name="graph-pull"), abrs
