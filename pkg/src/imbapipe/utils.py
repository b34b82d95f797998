"""Shared helpers: deterministic seed derivation and a simple worker pool.

Every random decision in the package flows through a ``numpy`` Generator
seeded by :func:`derive_seed`.  Seeds are content-addressed: the same
(base seed, tag sequence) always yields the same child seed, no matter in
which order or on which thread the work runs.  That is what makes outputs
byte-identical across ``--jobs`` settings.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def derive_seed(base: int, *parts: object) -> int:
    """Derive a stable 63-bit child seed from a base seed and a tag path.

    Parts are stringified, so tuples of ints and short labels like
    ``("cv", fold, spec_key)`` are fine.  Hashing is used instead of
    arithmetic so unrelated tag paths never collide by accident.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(base)).encode())
    for part in parts:
        h.update(b"\x1f")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(), "little") & 0x7FFFFFFFFFFFFFFF


def rng_for(base: int, *parts: object) -> np.random.Generator:
    """A fresh Generator for the given tag path."""
    return np.random.default_rng(derive_seed(base, *parts))


def parallel_map(fn: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> list[R]:
    """Map ``fn`` over ``items``, optionally on a thread pool.

    Results come back in input order regardless of scheduling, so callers
    stay deterministic as long as each call is internally deterministic.
    """
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def stratified_assignment(y: np.ndarray, n_groups: int, rng: np.random.Generator) -> np.ndarray:
    """Deal rows into ``n_groups`` so per-class counts differ by at most 1.

    Rows of each class are shuffled, then split into contiguous blocks;
    the first ``count % n_groups`` groups take the one-larger blocks.
    """
    assign = np.empty(len(y), dtype=np.int64)
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(len(idx))]
        base, rem = divmod(len(idx), n_groups)
        start = 0
        for g in range(n_groups):
            size = base + (1 if g < rem else 0)
            assign[idx[start : start + size]] = g
            start += size
    return assign


def as_float_matrix(X: object, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting anything else."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    return arr


def as_label_vector(y: object, n: int | None = None, name: str = "y") -> np.ndarray:
    """Coerce to a 1-D int64 vector of {0, 1} labels."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    arr = arr.astype(np.int64)
    values = np.unique(arr)
    if not np.all(np.isin(values, (0, 1))):
        raise ValueError(f"{name} must contain only 0/1 labels, got {values}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"{name} has {arr.shape[0]} entries, expected {n}")
    return arr
