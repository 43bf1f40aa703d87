"""Named seed substreams.

Every consumer of randomness derives its own 63-bit seed from a parent seed
and a label: ``derive_seed(seed, "gmm", "layer2-edges")``.  The derivation is
SHA-256 over the decimal seed and the labels, so it is stable across
platforms and Python versions.
"""

import hashlib

import numpy as np


def derive_seed(seed: int, *labels) -> int:
    h = hashlib.sha256(str(int(seed)).encode())
    for label in labels:
        h.update(b"\x00")
        h.update(str(label).encode())
    return int.from_bytes(h.digest()[:8], "little") >> 1


def rng(seed: int, *labels) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *labels))
