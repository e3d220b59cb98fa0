"""Deterministic RNG stream derivation.

Every random draw in the package comes from a named Philox substream derived
from one root seed.  A stream is addressed by a path of labels, e.g.
``("bench", "L-n4", 1, "nm", 3)``; the path is hashed with SHA-256 into the
SeedSequence entropy, so the same (root, path) yields the same stream on any
platform and any run.  Philox is counter-based, which keeps independent
streams independent regardless of how much each one is consumed.
"""

import hashlib

import numpy as np

# Bump if the derivation scheme ever changes; recorded in run manifests.
STREAM_VERSION = "qaoabench.philox.sha256.v1"

_SEP = "\x1f"


def seed_sequence(root: int, *path) -> np.random.SeedSequence:
    """SeedSequence for the substream addressed by (root, *path)."""
    text = _SEP.join([str(int(root))] + [str(p) for p in path])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    words = np.frombuffer(digest, dtype="<u4")
    return np.random.SeedSequence(entropy=[int(w) for w in words])


def stream_rng(root: int, *path) -> np.random.Generator:
    """Philox generator for the substream addressed by (root, *path)."""
    return np.random.Generator(np.random.Philox(seed_sequence(root, *path)))


def derive_seed(root: int, *path) -> int:
    """Collapse a substream address into a plain 63-bit integer seed."""
    text = _SEP.join([str(int(root))] + [str(p) for p in path])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") >> 1
