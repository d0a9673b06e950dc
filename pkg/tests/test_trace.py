import io
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stackfit import (
    AccessSequence,
    Characterization,
    ContinuousModel,
    DiscreteComponent,
    TraceFormatError,
    compute_distances,
    gen_cyclic,
    gen_from_distance_model,
    gen_random_uniform,
    read_trace,
    to_line_addresses,
    write_trace,
)
from stackfit.trace import HEADER_SIZE, MAGIC


def _binary(addrs, kind=1, count=None):
    count = len(addrs) if count is None else count
    head = MAGIC + bytes([kind]) + bytes(7) + struct.pack("<Q", count)
    return head + b"".join(struct.pack("<Q", a) for a in addrs)


def test_read_binary_records():
    seq = read_trace(_binary([0x10, 0x20, 0x10]))
    assert seq.kind == "data"
    assert seq.addresses.tolist() == [16, 32, 16]


def test_binary_layout_is_bit_exact():
    raw = write_trace(AccessSequence("instruction", [1, 2**64 - 1]))
    assert raw[:8] == b"STKTRC01"
    assert raw[8] == 0 and raw[9:16] == bytes(7)
    assert struct.unpack_from("<Q", raw, 16)[0] == 2
    assert raw[HEADER_SIZE:] == struct.pack("<QQ", 1, 2**64 - 1)


def test_empty_text_file():
    assert len(read_trace(b"", fmt="text")) == 0


def test_text_comments_and_hex():
    seq = read_trace(b"0x40\n# comment\n0x80\n", fmt="text")
    assert seq.addresses.tolist() == [64, 128]


def test_text_decimal_and_blank_lines():
    assert read_trace(b"12\n\n  0X1f \n", fmt="text").addresses.tolist() == [12, 31]


@pytest.mark.parametrize("raw, pos", [
    (b"STKTRC0", 7),                              # short header
    (b"XXXXXXXX" + bytes(16), 0),                 # bad magic
    (_binary([1, 2], count=3), HEADER_SIZE + 16),  # count larger than body
    (_binary([1, 2])[:-3], HEADER_SIZE + 8),      # truncated record
    (_binary([1], kind=7), 8),
])
def test_binary_errors_carry_position(raw, pos):
    with pytest.raises(TraceFormatError) as err:
        read_trace(raw)
    assert err.value.position == pos


def test_text_error_reports_line():
    with pytest.raises(TraceFormatError) as err:
        read_trace(b"0x10\n# ok\nzz\n", fmt="text")
    assert err.value.position == 3


def test_round_trip_small_and_empty(tmp_path):
    for seq in (AccessSequence("data", [16, 32, 16]), AccessSequence("instruction", [])):
        for fmt in ("binary", "text"):
            path = tmp_path / f"t.{fmt}"
            write_trace(seq, path, fmt=fmt)
            assert read_trace(path, fmt=fmt) == seq
    assert len(write_trace(AccessSequence("data", []))) == HEADER_SIZE


def test_round_trip_large_random():
    addrs = np.random.default_rng(3).integers(0, 2**64, size=100_000, dtype=np.uint64)
    seq = AccessSequence("data", addrs)
    assert read_trace(write_trace(seq)) == seq
    assert read_trace(io.BytesIO(write_trace(seq, fmt="text")), fmt="text") == seq


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 2**64 - 1), max_size=200), st.sampled_from(["instruction", "data"]),
       st.sampled_from(["binary", "text"]))
def test_round_trip_property(addrs, kind, fmt):
    seq = AccessSequence(kind, np.array(addrs, dtype=np.uint64))
    assert read_trace(write_trace(seq, fmt=fmt), fmt=fmt) == seq


def test_gen_cyclic():
    seq = gen_cyclic(3, 7, 64)
    assert seq.addresses.tolist() == [0, 64, 128, 0, 64, 128, 0]
    d = compute_distances(to_line_addresses(seq, 64)).tolist()
    assert d[3:] == [2, 2, 2, 2]
    assert compute_distances(to_line_addresses(gen_cyclic(1, 5), 64)).tolist()[1:] == [0] * 4


def test_gen_cyclic_large_is_single_atom():
    d = compute_distances(to_line_addresses(gen_cyclic(1024, 200_000), 64))
    assert set(d.finite.tolist()) == {1023}


def test_gen_random_uniform():
    assert gen_random_uniform(1, 10, seed=5) == gen_cyclic(1, 10)
    assert gen_random_uniform(50, 1000, seed=9) == gen_random_uniform(50, 1000, seed=9)
    assert gen_random_uniform(50, 1000, seed=9) != gen_random_uniform(50, 1000, seed=10)


def test_gen_random_uniform_two_lines():
    d = compute_distances(to_line_addresses(gen_random_uniform(2, 100_000, seed=1), 64)).finite
    assert set(d.tolist()) == {0, 1}
    assert abs(np.mean(d == 0) - 0.5) < 0.01


def _atoms(values, probs):
    return Characterization(DiscreteComponent(tuple(values), tuple(probs), 1.0), None, 0.0, 1, 64)


def test_from_model_single_atom_is_cyclic():
    seq = gen_from_distance_model(_atoms([2], [1.0]), 1000, seed=0)
    lines = to_line_addresses(seq, 64)
    assert len(set(lines.tolist())) == 3
    assert set(compute_distances(lines).finite.tolist()) == {2}


def test_from_model_discrete_probabilities():
    n = 100_000
    seq = gen_from_distance_model(_atoms([0, 1], [0.5, 0.5]), n, seed=4)
    d = compute_distances(to_line_addresses(seq, 64)).finite
    assert set(d.tolist()) == {0, 1}
    # three-sigma binomial bound
    assert abs(np.mean(d == 0) - 0.5) < 3 * np.sqrt(0.25 / d.size)
    assert abs(np.mean(d == 0) - 0.5) < 0.02


def test_from_model_gamma_mean():
    c = Characterization(DiscreteComponent(), ContinuousModel("gamma", {"shape": 5, "scale": 2}),
                         1.0, 1, 64)
    seq = gen_from_distance_model(c, 1_000_000, seed=2)
    d = compute_distances(to_line_addresses(seq, 64)).finite
    assert abs(d.mean() / 10 - 1) < 0.02


def test_from_model_is_seeded():
    c = _atoms([0, 3, 7], [0.2, 0.3, 0.5])
    assert gen_from_distance_model(c, 500, seed=1) == gen_from_distance_model(c, 500, seed=1)


def test_access_sequence_rejects_negative_and_bad_kind():
    with pytest.raises(ValueError):
        AccessSequence("data", [-1])
    with pytest.raises(ValueError):
        AccessSequence("heap", [1])


def test_read_text_from_str_stream():
    seq = read_trace(io.StringIO("0x0\n64\n"), fmt="text")
    assert seq.addresses.tolist() == [0, 64]
