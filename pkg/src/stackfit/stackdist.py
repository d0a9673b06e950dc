"""Stack (reuse) distances at cache-line granularity.

A distance is the number of distinct lines touched strictly between two
accesses to the same line. First touches are cold and carry no distance;
they are encoded as ``COLD`` (-1) in :class:`DistanceSequence`.
"""

from __future__ import annotations

import io
import math
import os
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import TraceFormatError
from .trace import DATA, INSTRUCTION, KINDS, AccessSequence

COLD = -1


def _check_line_size(line_size):
    if line_size < 1 or line_size & (line_size - 1):
        raise ValueError(f"line size must be a power of two, got {line_size}")


def to_line_addresses(seq, line_size: int) -> np.ndarray:
    """Fold byte addresses to line addresses (``address // line_size``)."""
    _check_line_size(line_size)
    addrs = seq.addresses if isinstance(seq, AccessSequence) else np.asarray(seq, dtype=np.uint64)
    shift = np.uint64(line_size.bit_length() - 1)
    return np.right_shift(addrs.astype(np.uint64, copy=False), shift)


@dataclass(frozen=True, eq=False)
class DistanceSequence:
    """One distance per access; ``COLD`` marks first touches."""

    distances: np.ndarray = field(repr=False)
    kind: str = DATA

    def __post_init__(self):
        d = np.ascontiguousarray(self.distances, dtype=np.int64).reshape(-1)
        d.flags.writeable = False
        object.__setattr__(self, "distances", d)

    def __len__(self):
        return self.distances.size

    def __eq__(self, other):
        if not isinstance(other, DistanceSequence):
            return NotImplemented
        return np.array_equal(self.distances, other.distances)

    @property
    def cold(self) -> np.ndarray:
        return self.distances == COLD

    @property
    def finite(self) -> np.ndarray:
        """Finite distances in trace order."""
        return self.distances[self.distances != COLD]

    def tolist(self):
        return [None if d == COLD else d for d in self.distances.tolist()]


def _as_line_list(lines):
    if isinstance(lines, np.ndarray):
        return lines.tolist()
    return list(lines)


def compute_distances(lines, kind: str = DATA) -> DistanceSequence:
    """Exact stack distances in O(N log N).

    A Fenwick tree indexed by access time holds a 1 at the latest access of
    every live line. The distance of a reuse whose previous access was at
    time ``p`` is the number of marks after ``p``.
    """
    seq = _as_line_list(lines)
    n = len(seq)
    tree = [0] * (n + 1)
    last = {}
    out = [COLD] * n
    live = 0
    for i, line in enumerate(seq):
        p = last.get(line)
        if p is None:
            live += 1
        else:
            j = p + 1
            before = 0
            while j > 0:
                before += tree[j]
                j &= j - 1
            out[i] = live - before
            j = p + 1
            while j <= n:
                tree[j] -= 1
                j += j & -j
        j = i + 1
        while j <= n:
            tree[j] += 1
            j += j & -j
        last[line] = i
    return DistanceSequence(np.array(out, dtype=np.int64), kind)


def compute_distances_bruteforce(lines, kind: str = DATA) -> DistanceSequence:
    """Quadratic reference: literally count distinct lines between reuses."""
    seq = _as_line_list(lines)
    last = {}
    out = []
    for i, line in enumerate(seq):
        p = last.get(line)
        out.append(COLD if p is None else len(set(seq[p + 1:i])))
        last[line] = i
    return DistanceSequence(np.array(out, dtype=np.int64), kind)


def cold_stats(d: DistanceSequence) -> tuple[int, int]:
    """(cold accesses, total accesses). Cold count equals distinct lines."""
    return int(np.count_nonzero(d.cold)), len(d)


# ---------------------------------------------------------------------------
# samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SampleSet:
    """Finite stack-distance samples, in line units, plus where they came from.

    Samples are normally integers; synthetic sets may hold real values.
    """

    samples: np.ndarray = field(repr=False)
    line_size: int = 1
    sampling_interval: int = 1
    source_kind: str = DATA
    origin_window: tuple[int, int] = (0, 0)

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.dtype.kind not in "iuf":
            s = s.astype(float)
        s = np.ascontiguousarray(s).reshape(-1)
        if s.size and (not np.all(np.isfinite(s)) or s.min() < 0):
            raise ValueError("samples must be finite and non-negative")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)
        if self.sampling_interval < 1:
            raise ValueError("sampling_interval must be >= 1")
        if self.source_kind not in KINDS:
            raise ValueError(f"bad kind {self.source_kind!r}")

    def __len__(self):
        return self.samples.size

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        return (np.array_equal(self.samples, other.samples)
                and self.line_size == other.line_size
                and self.sampling_interval == other.sampling_interval
                and self.source_kind == other.source_kind
                and tuple(self.origin_window) == tuple(other.origin_window))

    @classmethod
    def synthetic(cls, values, line_size=1, kind=DATA):
        """Wrap generated values as an exhaustive sample set."""
        values = np.asarray(values)
        return cls(values, line_size, 1, kind, (0, values.size))


def sample_distances(d: DistanceSequence, interval: int = 1, offset: int = 0,
                     line_size: int = 1, window: tuple[int, int] | None = None) -> SampleSet:
    """Keep finite distances at ordinals ``offset, offset+interval, ...``.

    ``window`` restricts selection to ordinals in ``[start, end)``; ordinals
    are counted from the start of the window. Cold accesses at selected
    positions yield no sample.
    """
    if interval < 1:
        raise ValueError("interval must be >= 1")
    if not 0 <= offset < interval:
        raise ValueError("offset must satisfy 0 <= offset < interval")
    start, end = (0, len(d)) if window is None else window
    if not 0 <= start <= end <= len(d):
        raise ValueError(f"window {window} outside 0..{len(d)}")
    picked = d.distances[start + offset:end:interval]
    samples = picked[picked != COLD]
    return SampleSet(samples, line_size, interval, d.kind, (start, end))


def outline(s) -> np.ndarray:
    """Samples sorted in descending order."""
    values = s.samples if isinstance(s, SampleSet) else np.asarray(s)
    return np.sort(values, kind="stable")[::-1].copy()


# ---------------------------------------------------------------------------
# sample CSV
# ---------------------------------------------------------------------------

_HEADER_RE = re.compile(
    r"#\s*line_size=(\d+)\s+interval=(\d+)\s+kind=([id])\s+window=(\d+):(\d+)")
_COLD_RE = re.compile(r"#\s*cold=(\d+)\s+total=(\d+)")


def _fmt(v):
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def write_samples_csv(s: SampleSet, sink=None, cold: tuple[int, int] | None = None):
    """Serialize ``s``; ``cold`` adds a ``# cold=<c> total=<t>`` line."""
    kind = "i" if s.source_kind == INSTRUCTION else "d"
    a, b = s.origin_window
    lines = [f"# line_size={s.line_size} interval={s.sampling_interval} kind={kind} window={a}:{b}"]
    if cold is not None:
        lines.append(f"# cold={cold[0]} total={cold[1]}")
    lines.extend(_fmt(v) for v in s.samples.tolist())
    text = "\n".join(lines) + "\n"
    if sink is None:
        return text
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w") as fh:
            fh.write(text)
    else:
        sink.write(text)
    return None


def read_samples_csv(source) -> tuple[SampleSet, tuple[int, int] | None]:
    """Parse a sample CSV from a path or text file object.

    Returns ``(samples, cold)`` where ``cold`` is ``(cold_count, total)`` if
    the file records it.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source) as fh:
            text = fh.read()
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode()

    header = None
    cold = None
    values = []
    any_float = False
    for lineno, line in enumerate(io.StringIO(text), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER_RE.match(line)
            if m and header is None:
                header = m
            m = _COLD_RE.match(line)
            if m:
                cold = (int(m.group(1)), int(m.group(2)))
            continue
        try:
            v = float(line)
        except ValueError:
            raise TraceFormatError(f"not a distance: {line!r}", position=lineno) from None
        if not math.isfinite(v) or v < 0:
            raise TraceFormatError(f"distance must be finite and >= 0: {line!r}", position=lineno)
        any_float |= not v.is_integer()
        values.append(v)
    if header is None:
        raise TraceFormatError("missing '# line_size=... interval=... kind=... window=a:b' header",
                               position=1)
    arr = np.array(values, dtype=float if any_float else np.int64)
    kind = INSTRUCTION if header.group(3) == "i" else DATA
    s = SampleSet(arr, int(header.group(1)), int(header.group(2)), kind,
                  (int(header.group(4)), int(header.group(5))))
    return s, cold
