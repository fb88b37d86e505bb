"""Deterministic random-stream derivation.

Every sampling entry point takes either a seed or a ``numpy.random.Generator``.
Independent stages (angle draws, Born sampling, bootstrap, ...) derive child
generators from ``(seed, *labels)`` so that adding a stage or reordering
batches never perturbs the streams of the others.
"""
from __future__ import annotations

import hashlib

import numpy as np


def derive_rng(seed: int, *labels: object) -> np.random.Generator:
    """Child generator keyed on the seed and a tuple of stage labels."""
    text = "|".join([str(int(seed))] + [str(lab) for lab in labels])
    digest = hashlib.sha256(text.encode()).digest()
    words = [int.from_bytes(digest[i : i + 8], "little") for i in range(0, 32, 8)]
    return np.random.default_rng(np.random.SeedSequence([int(seed) % 2**64] + words))


def as_rng(seed_or_rng: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(int(seed_or_rng))
