"""Batch Thompson sampling across trust regions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NoActiveRegionError
from .gp import posterior, posterior_factor


@dataclass(frozen=True)
class BatchSelection:
    """Selected batch.

    Attributes
    ----------
    points : ndarray, shape (q, d)
    tr_assignment : ndarray of int, shape (q,)
        Region id each point was drawn from.
    candidate_index : ndarray of int, shape (q,)
        Row of the winning candidate within that region's candidate set.
    sampled_values : ndarray, shape (q,)
        Winning sample values in the owning region's standardized units.
    raw_values : ndarray, shape (q,)
        The same values in raw objective units (what was compared).
    """

    points: np.ndarray
    tr_assignment: np.ndarray
    candidate_index: np.ndarray
    sampled_values: np.ndarray
    raw_values: np.ndarray


def draw_normals(base_seed: int, draw: int, region: int, size: int) -> np.ndarray:
    """Standard normals for one (draw, region) pair.

    Each pair owns an independent stream so results do not depend on the
    order in which regions are processed.
    """
    return np.random.default_rng([base_seed, draw, region]).standard_normal(size)


def thompson_samples(post, q: int, base_seed: int, region: int) -> np.ndarray:
    """``q`` joint posterior samples on the candidate set, shape (r, q)."""
    L = posterior_factor(post)
    r = post.mean.shape[0]
    Z = np.empty((r, q))
    for i in range(q):
        Z[:, i] = draw_normals(base_seed, i, region, r)
    return post.mean[:, None] + L @ Z


def select_from_posteriors(posteriors, stats, candidate_points, q: int, rng, region_ids=None) -> BatchSelection:
    """Thompson selection given per-region posteriors on their candidates.

    ``stats`` holds each region's standardization so that samples are
    compared in raw units. Ties go to the lowest region position, then the
    lowest candidate index.
    """
    m = len(posteriors)
    if m == 0:
        raise NoActiveRegionError("no active trust region to select from")
    if q < 1:
        raise ValueError("q must be positive")
    region_ids = list(range(m)) if region_ids is None else list(region_ids)
    base_seed = int(rng.integers(2**63))

    std_samples = [thompson_samples(p, q, base_seed, rid) for p, rid in zip(posteriors, region_ids)]
    raw_samples = [s.unstandardize(z) for s, z in zip(stats, std_samples)]
    # per region: best candidate and its value for every draw
    best_idx = np.array([np.argmin(raw, axis=0) for raw in raw_samples])  # (m, q)
    best_val = np.array([raw[idx, np.arange(q)] for raw, idx in zip(raw_samples, best_idx)])

    winner = np.argmin(best_val, axis=0)  # first minimum = lowest region position
    draws = np.arange(q)
    cand = best_idx[winner, draws]
    points = np.array([candidate_points[w][c] for w, c in zip(winner, cand)])
    return BatchSelection(
        points=points,
        tr_assignment=np.array(region_ids)[winner],
        candidate_index=cand,
        sampled_values=np.array([std_samples[w][c, i] for w, c, i in zip(winner, cand, draws)]),
        raw_values=best_val[winner, draws],
    )


def select_batch(models, candidate_sets, q: int, rng, region_ids=None) -> BatchSelection:
    """Pick ``q`` points by independent Thompson draws over all regions.

    Parameters
    ----------
    models : list of GPModel
        One fitted model per active region.
    candidate_sets : list of CandidateSet
        Matching candidate sets.
    q : int
    rng : numpy.random.Generator
    region_ids : list of int, optional
        Ids reported in ``tr_assignment``; defaults to list positions.
    """
    if len(models) != len(candidate_sets):
        raise ValueError("need one candidate set per model")
    if not models:
        raise NoActiveRegionError("no active trust region to select from")
    posts = [posterior(m, cs.points) for m, cs in zip(models, candidate_sets)]
    return select_from_posteriors(
        posts,
        [m.stats for m in models],
        [cs.points for cs in candidate_sets],
        q,
        rng,
        region_ids,
    )
