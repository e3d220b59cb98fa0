"""Named substream derivation."""

import numpy as np

from qaoabench.seeding import STREAM_VERSION, derive_seed, seed_sequence, stream_rng


def test_same_path_same_stream():
    a = stream_rng(7, "episode", 3).random(5)
    b = stream_rng(7, "episode", 3).random(5)
    np.testing.assert_array_equal(a, b)


def test_distinct_paths_distinct_streams():
    draws = {
        "base": tuple(stream_rng(7, "episode", 3).random(3)),
        "other-label": tuple(stream_rng(7, "episodes", 3).random(3)),
        "other-index": tuple(stream_rng(7, "episode", 4).random(3)),
        "other-root": tuple(stream_rng(8, "episode", 3).random(3)),
        "nested": tuple(stream_rng(7, "episode", 3, 0).random(3)),
    }
    assert len(set(draws.values())) == len(draws)


def test_path_elements_do_not_collide_when_joined():
    # ("ab", "c") and ("a", "bc") must not map to the same stream
    a = stream_rng(1, "ab", "c").random(3)
    b = stream_rng(1, "a", "bc").random(3)
    assert not np.array_equal(a, b)


def test_derive_seed_stable_and_nonnegative():
    s = derive_seed(42, "bench")
    assert s == derive_seed(42, "bench")
    assert 0 <= s < 2**63
    assert s != derive_seed(42, "bench", 0)


def test_seed_sequence_spawns_generator():
    seq = seed_sequence(0, "x")
    rng = np.random.default_rng(seq)
    assert rng.random() == np.random.default_rng(seed_sequence(0, "x")).random()


def test_stream_version_pinned():
    # changing the derivation scheme must be an explicit, versioned decision
    assert STREAM_VERSION == "qaoabench.philox.sha256.v1"
