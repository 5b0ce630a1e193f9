"""Quasi-random candidate sets and space-filling initial designs."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

SOBOL_MAX_DIM = 21201
MAX_CANDIDATES = 5000


@dataclass(frozen=True)
class CandidateSet:
    points: np.ndarray
    perturb_mask: np.ndarray

    @property
    def r(self) -> int:
        return self.points.shape[0]


def default_size(d: int) -> int:
    return min(100 * d, MAX_CANDIDATES)


def perturb_probability(d: int) -> float:
    return min(1.0, 20.0 / d)


def sobol(r: int, d: int, seed=None, scramble: bool = True) -> np.ndarray:
    """First ``r`` points of a (scrambled) Sobol sequence in ``[0, 1)^d``.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if d < 1 or d > SOBOL_MAX_DIM:
        raise ValueError(f"Sobol dimension must be in [1, {SOBOL_MAX_DIM}], got {d}")
    if r < 1:
        raise ValueError("r must be positive")
    engine = qmc.Sobol(d, scramble=scramble, seed=seed)
    with warnings.catch_warnings():
        # balance warning for non powers of two
        warnings.simplefilter("ignore", UserWarning)
        return engine.random(r)


def latin_hypercube(n: int, d: int, rng) -> np.ndarray:
    """One point per equal-width bin in every dimension, uniformly jittered."""
    if n < 1:
        raise ValueError("n must be positive")
    perms = np.argsort(rng.random((d, n)), axis=1).T
    return (perms + rng.random((n, d))) / n


def generate(lower, upper, center, r: int, rng) -> CandidateSet:
    """Candidate set inside the box ``[lower, upper]``.

    Each coordinate takes the mapped Sobol value with probability
    ``min(1, 20/d)`` and the center's value otherwise; rows left without any
    perturbed coordinate get one, chosen uniformly.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    center = np.asarray(center, dtype=float)
    d = center.shape[0]
    seed = int(rng.integers(2**63))
    pts = lower + (upper - lower) * sobol(r, d, seed)
    p = perturb_probability(d)
    if p >= 1.0:
        mask = np.ones((r, d), dtype=bool)
    else:
        mask = rng.random((r, d)) < p
        empty = np.flatnonzero(~mask.any(axis=1))
        if empty.size:
            mask[empty, rng.integers(0, d, size=empty.size)] = True
    pts = np.where(mask, pts, center)
    np.clip(pts, lower, upper, out=pts)
    return CandidateSet(pts, mask)
