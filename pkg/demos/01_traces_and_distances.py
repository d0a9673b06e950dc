"""Traces, line addresses and stack distances."""
import io

import numpy as np

from stackfit import (COLD, compute_distances, compute_distances_bruteforce, gen_cyclic,
                      read_trace, sample_distances, to_line_addresses, write_trace)

# a tiny hand written trace: three lines, then the first one again
text = "0x0\n0x40\n0x80\n0x0\n"
seq = read_trace(io.StringIO(text), fmt="text")
lines = to_line_addresses(seq, 64)
print("lines:", lines.tolist())

d = compute_distances(lines)
print("distances:", d.tolist())          # None marks a cold access
print("cold code:", COLD)

# a cyclic walk over 8 lines: every warm access has distance 7
cyc = gen_cyclic(8, 40, line_size=64)
d = compute_distances(to_line_addresses(cyc, 64))
print("cyclic finite distances:", np.unique(d.finite))

# the fast engine agrees with the quadratic oracle
rng = np.random.default_rng(0)
r = rng.integers(0, 50, 2000)
assert compute_distances(r) == compute_distances_bruteforce(r)

# binary round trip
blob = write_trace(cyc)
print("binary size:", len(blob), "bytes for", len(cyc), "accesses")
assert read_trace(blob) == cyc

# keep one distance every 5 accesses
s = sample_distances(d, interval=5, offset=0, line_size=64)
print("sampled:", s.samples.tolist())
