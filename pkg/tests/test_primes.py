import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetabound.errors import ResourceError
from thetabound.primes import (
    PrimeTable,
    SieveConfig,
    estimate_memory,
    iter_prime_segments,
    limit_for_index,
    load_or_build,
    sieve_build,
)

from oracles import is_prime_td, primes_plain_sieve, primes_td

LIMIT = 100_000


@pytest.fixture(scope="module")
def small():
    return sieve_build(SieveConfig(target_value=LIMIT))


def test_matches_trial_division(small):
    assert small.primes.tolist() == primes_td(LIMIT)


def test_bitmap_agrees_with_trial_division(small):
    flags = [small.is_prime(k) for k in range(LIMIT + 1)]
    assert flags == [is_prime_td(k) for k in range(LIMIT + 1)]


@pytest.mark.parametrize("segment_size", [4096, 8192, 65536, 1 << 20])
def test_segment_size_does_not_change_result(small, segment_size):
    t = sieve_build(SieveConfig(target_value=LIMIT, segment_size=segment_size))
    assert np.array_equal(t.primes, small.primes)
    assert np.array_equal(t.bitmap, small.bitmap)


def test_parallel_matches_serial():
    cfg = SieveConfig(target_value=3_000_000, segment_size=65536)
    assert np.array_equal(sieve_build(cfg, jobs=1).primes, sieve_build(cfg, jobs=4).primes)


def test_streamed_segments_match(small):
    streamed = np.concatenate(list(iter_prime_segments(LIMIT, 4096)))
    assert np.array_equal(streamed, small.primes)


def test_known_values(table_1e6):
    assert table_1e6.prime_count(10**6) == 78498
    assert table_1e6.nth_prime(8602) == 88811
    assert table_1e6.nth_prime(227) == 1433
    assert table_1e6.prime_count(599) == 109
    assert [table_1e6.nth_prime(k) for k in range(1, 6)] == [2, 3, 5, 7, 11]


def test_larger_range_matches_plain_sieve(table_1e6):
    assert table_1e6.primes.tolist() == primes_plain_sieve(2_000_000)


@pytest.mark.parametrize("limit", [0, 1, 2, 3, 4, 10, 11, 97])
def test_tiny_limits(limit):
    t = sieve_build(SieveConfig(target_value=limit))
    assert t.primes.tolist() == primes_td(limit)
    assert t.prime_count(limit) == len(primes_td(limit))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 9592))
def test_index_count_duality(small, n):
    p = small.nth_prime(n)
    assert small.prime_count(p) == n
    assert small.prime_count(p - 1) == n - 1


@settings(max_examples=200, deadline=None)
@given(st.integers(0, LIMIT))
def test_count_is_monotone_step(small, x):
    here = small.prime_count(x)
    assert here - (small.prime_count(x - 1) if x else 0) == int(small.is_prime(x))


def test_vector_queries(small):
    n = np.array([1, 2, 3, 100])
    assert small.nth_prime(n).tolist() == [2, 3, 5, 541]
    assert small.prime_count(np.array([0, 1, 2, 541])).tolist() == [0, 0, 1, 100]


def test_out_of_range_queries(small):
    with pytest.raises(IndexError):
        small.nth_prime(0)
    with pytest.raises(IndexError):
        small.nth_prime(small.count + 1)
    with pytest.raises(ValueError):
        small.prime_count(LIMIT + 1)
    with pytest.raises(ValueError):
        small.is_prime(-1)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 20_000))
def test_index_limit_covers_prime(n):
    t = sieve_build(SieveConfig(target_index=n))
    assert t.count >= n
    assert t.nth_prime(n) == primes_plain_sieve(limit_for_index(n))[n - 1]


def test_memory_budget_refusal():
    cfg = SieveConfig(target_value=10**9)
    with pytest.raises(ResourceError) as info:
        sieve_build(cfg, memory_budget=1000)
    assert info.value.required == estimate_memory(10**9)
    assert info.value.required > 1000


def test_config_validation():
    with pytest.raises(ValueError):
        SieveConfig()
    with pytest.raises(ValueError):
        SieveConfig(target_index=5, target_value=5)
    with pytest.raises(ValueError):
        SieveConfig(target_value=10, segment_size=5000)


def test_cache_round_trip(tmp_path, small):
    path = tmp_path / "primes.bin"
    small.save(path)
    back = PrimeTable.load(path)
    assert back.limit == small.limit
    assert np.array_equal(back.primes, small.primes)
    assert path.read_bytes()[:4] == b"THBD"


def test_cache_reused_when_sufficient(tmp_path, small):
    path = tmp_path / "primes.bin"
    small.save(path)
    before = path.stat().st_mtime_ns
    t = load_or_build(SieveConfig(target_value=1000), path)
    assert t.limit == LIMIT
    assert path.stat().st_mtime_ns == before


def test_cache_rebuilt_when_too_small(tmp_path):
    path = tmp_path / "primes.bin"
    sieve_build(SieveConfig(target_value=100)).save(path)
    t = load_or_build(SieveConfig(target_value=5000), path)
    assert t.limit >= 5000
    assert PrimeTable.load(path).limit >= 5000


@pytest.mark.parametrize("damage", ["magic", "truncate", "count"])
def test_corrupt_cache_detected_and_rebuilt(tmp_path, small, damage):
    path = tmp_path / "primes.bin"
    small.save(path)
    data = bytearray(path.read_bytes())
    if damage == "magic":
        data[:4] = b"XXXX"
    elif damage == "truncate":
        data = data[:-10]
    else:
        data[-1] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(ValueError):
        PrimeTable.load(path)
    t = load_or_build(SieveConfig(target_value=LIMIT), path)
    assert np.array_equal(t.primes, small.primes)


def test_iterate_primes(small):
    it = small.iterate_primes(4)
    assert [next(it) for _ in range(3)] == [(4, 7), (5, 11), (6, 13)]
