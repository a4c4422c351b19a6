"""Memory access traces: record model, synthetic patterns, binary file format.

A trace is an ordered list of byte-addressed accesses as seen by the
last-level cache.  Each record optionally carries a 14-bit program
counter signature and a 2-bit reuse hint.
"""

import struct
from dataclasses import dataclass, field
from enum import IntEnum

PC_SIGNATURE_BITS = 14
PC_SIGNATURE_MAX = (1 << PC_SIGNATURE_BITS) - 1

TRACE_MAGIC = b"CTR1"
TRACE_VERSION = 1

_HEADER = struct.Struct("<4sB3sQ")
_RECORD = struct.Struct("<QHBBI")


class TraceError(Exception):
    """Base for trace file format problems."""


class BadMagicError(TraceError):
    pass


class BadVersionError(TraceError):
    pass


class TruncatedTraceError(TraceError):
    pass


class ReuseHint(IntEnum):
    DEFAULT = 0
    HIGH = 1
    MODERATE = 2
    LOW = 3


@dataclass(slots=True)
class MemoryAccess:
    """One byte-addressed access.

    address       byte address, u64
    pc_signature  14-bit PC signature (fold wider PCs with fold_pc)
    is_write      stores are recorded but fetched like loads
    reuse_hint    software reuse class, meaningful only if hint_valid
    inst_delta    instructions retired since the previous record
    """

    address: int
    pc_signature: int = 0
    is_write: bool = False
    reuse_hint: ReuseHint = ReuseHint.DEFAULT
    hint_valid: bool = False
    inst_delta: int = 1

    def __post_init__(self):
        if not 0 <= self.address < 1 << 64:
            raise ValueError("address out of u64 range: %r" % (self.address,))
        if not 0 <= self.pc_signature <= PC_SIGNATURE_MAX:
            raise ValueError("pc_signature must fit in 14 bits")
        if not self.hint_valid and self.reuse_hint != ReuseHint.DEFAULT:
            raise ValueError("reuse_hint set without hint_valid")
        if self.inst_delta < 0:
            raise ValueError("inst_delta must be non-negative")


@dataclass
class Trace:
    """Ordered access sequence plus bookkeeping metadata."""

    records: list = field(default_factory=list)
    name: str = ""

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def append(self, record):
        self.records.append(record)

    def total_instructions(self):
        return sum(r.inst_delta for r in self.records)


def fold_pc(pc):
    """Fold an arbitrary-width PC into a 14-bit signature (xor of 14-bit slices)."""
    sig = 0
    pc = int(pc)
    while pc:
        sig ^= pc & PC_SIGNATURE_MAX
        pc >>= PC_SIGNATURE_BITS
    return sig


@dataclass(slots=True)
class PatternSpec:
    """Synthetic access pattern over k addresses a_i = base + i*stride.

    kind "recency":  (a1..ak, ak..a1) repeated n times; friendly to LRU
    kind "stream":   a1..ak once, no reuse
    kind "thrash":   (a1..ak) repeated n times; zero LRU hits when k > ways
    """

    kind: str
    k: int
    n: int = 1
    base_address: int = 0
    stride: int = 64
    pc_signature: int = 0

    def __post_init__(self):
        if self.kind not in ("recency", "stream", "thrash"):
            raise ValueError("unknown pattern kind: %r" % (self.kind,))
        if self.k < 1 or self.n < 1:
            raise ValueError("pattern requires k >= 1 and n >= 1")
        if self.stride < 1:
            raise ValueError("pattern stride must be >= 1")


def generate_pattern(spec):
    """Expand a PatternSpec into a Trace."""
    addrs = [spec.base_address + i * spec.stride for i in range(spec.k)]
    seq = []
    if spec.kind == "recency":
        cycle = addrs + addrs[::-1]
        for _ in range(spec.n):
            seq.extend(cycle)
    elif spec.kind == "stream":
        seq.extend(addrs)
    else:  # thrash
        for _ in range(spec.n):
            seq.extend(addrs)
    records = [MemoryAccess(a, pc_signature=spec.pc_signature) for a in seq]
    return Trace(records, name="%s(k=%d,n=%d)" % (spec.kind, spec.k, spec.n))


def _pack_flags(record):
    flags = 0
    if record.is_write:
        flags |= 1
    if record.hint_valid:
        flags |= 2
    flags |= (int(record.reuse_hint) & 3) << 2
    return flags


def write_trace(trace, path):
    """Serialize a trace to the 16-byte-record binary format."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(TRACE_MAGIC, TRACE_VERSION, b"\0\0\0", len(trace)))
        pack = _RECORD.pack
        for r in trace:
            fh.write(pack(r.address, r.pc_signature, _pack_flags(r), 0, r.inst_delta))


def read_trace(path):
    """Load a binary trace, rejecting malformed headers and short files."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise TruncatedTraceError("file shorter than trace header")
    magic, version, _reserved, count = _HEADER.unpack_from(data)
    if magic != TRACE_MAGIC:
        raise BadMagicError("bad magic %r" % (magic,))
    if version != TRACE_VERSION:
        raise BadVersionError("unsupported trace version %d" % version)
    expected = _HEADER.size + _RECORD.size * count
    if len(data) < expected:
        raise TruncatedTraceError(
            "trace holds %d bytes, header promises %d" % (len(data), expected)
        )
    if len(data) > expected:
        raise TruncatedTraceError("%d trailing bytes after last record" % (len(data) - expected))
    records = []
    append = records.append
    for address, pc, flags, _res, inst_delta in _RECORD.iter_unpack(data[_HEADER.size :]):
        hint_valid = bool(flags & 2)
        hint = ReuseHint((flags >> 2) & 3) if hint_valid else ReuseHint.DEFAULT
        append(
            MemoryAccess(
                address,
                pc_signature=pc,
                is_write=bool(flags & 1),
                reuse_hint=hint,
                hint_valid=hint_valid,
                inst_delta=inst_delta,
            )
        )
    return Trace(records)
