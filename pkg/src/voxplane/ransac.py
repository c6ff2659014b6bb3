"""Voxelized RANSAC plane extraction, the comparison baseline.

Within each root voxel, planes are pulled out one at a time: sample three
points, score the implied plane by its inlier count at a fixed distance
threshold, keep the best, refit it by PCA over the inliers, remove them,
repeat. The per-voxel random stream is derived from (seed, voxel key) so
results do not depend on processing order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ExtractionConfig
from .errors import ConfigError
from .geometry import _accumulate_checked, as_points, covariance, eigen_symmetric3
from .octree import PlanePatch, VoxelKey, build_root_map

__all__ = ["RansacParams", "RansacPlane", "point_plane_distances",
           "ransac_plane", "ransac_extract_all"]

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class RansacParams:
    """dist_threshold is the inlier band (meters). min_inliers of None
    means "use the pipeline's min_points" when running under a config, or
    3 when calling ransac_plane standalone."""

    dist_threshold: float = 0.03
    max_iterations: int = 500
    min_inliers: int | None = None
    success_probability: float = 0.99
    seed: int = 0

    def __post_init__(self):
        if not self.dist_threshold > 0:
            raise ConfigError("dist_threshold must be positive")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be positive")
        if not 0 < self.success_probability < 1:
            raise ConfigError("success_probability must be in (0, 1)")


@dataclass(frozen=True)
class RansacPlane:
    normal: np.ndarray   # (3,), unit
    offset: float        # plane is {p : normal . p = offset}
    inliers: np.ndarray  # indices into the input points


def point_plane_distances(points: np.ndarray, normal: np.ndarray,
                          offset: float) -> np.ndarray:
    """|n.p - d| for unit n, elementwise without BLAS reductions so the
    result is bitwise reproducible."""
    d = (points[:, 0] * normal[0] + points[:, 1] * normal[1]
         + points[:, 2] * normal[2] - offset)
    return np.abs(d)


def _adaptive_iteration_limit(inlier_ratio: float, success_probability: float) -> float:
    """Iterations needed so a clean 3-point sample occurs with the wanted
    probability, given the best inlier ratio seen so far."""
    w3 = inlier_ratio ** 3
    if w3 <= 0.0:
        return math.inf
    if w3 >= 1.0:
        return 0.0
    return math.log(1.0 - success_probability) / math.log(1.0 - w3)


def ransac_plane(points, params: RansacParams,
                 rng: np.random.Generator | None = None) -> RansacPlane | None:
    """Best consensus plane of a point set, or None.

    Samples of three (nearly) collinear points are degenerate and skipped.
    The final plane is refit by PCA over the consensus set and its inliers
    recomputed, so every reported inlier is within dist_threshold of the
    reported plane. Deterministic for a fixed seed/generator.
    """
    pts = as_points(points)
    n = pts.shape[0]
    if n < 3:
        return None
    if rng is None:
        rng = np.random.default_rng(params.seed % (_U64 + 1))
    min_inliers = params.min_inliers if params.min_inliers is not None else 3

    best_count = 0
    best_inliers: np.ndarray | None = None
    for iteration in range(1, params.max_iterations + 1):
        sample = rng.choice(n, size=3, replace=False)
        p0, p1, p2 = pts[sample]
        cross = np.cross(p1 - p0, p2 - p0)
        norm = float(np.linalg.norm(cross))
        if norm < 1e-12:
            continue  # degenerate sample; draw again
        normal = cross / norm
        offset = float(np.dot(normal, p0))
        dist = point_plane_distances(pts, normal, offset)
        inliers = np.flatnonzero(dist <= params.dist_threshold)
        if inliers.shape[0] > best_count:
            best_count = inliers.shape[0]
            best_inliers = inliers
        if iteration >= _adaptive_iteration_limit(best_count / n,
                                                  params.success_probability):
            break

    if best_inliers is None or best_count < max(min_inliers, 3):
        return None

    # PCA refit over the consensus set, then re-apply the inlier band
    # against the refit plane.
    cov, centroid = covariance(_accumulate_checked(pts[best_inliers]))
    eig = eigen_symmetric3(cov)
    normal = eig.eigenvectors[:, 2].copy()
    offset = float(np.dot(normal, centroid))
    dist = point_plane_distances(pts, normal, offset)
    inliers = np.flatnonzero(dist <= params.dist_threshold)
    if inliers.shape[0] < min_inliers:
        return None
    return RansacPlane(normal=normal, offset=offset, inliers=inliers)


def _voxel_rng(seed: int, key: VoxelKey) -> np.random.Generator:
    # Map signed ints to uint64 words; the stream depends only on
    # (seed, key), never on voxel processing order.
    entropy = [seed & _U64, key.ix & _U64, key.iy & _U64, key.iz & _U64]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def ransac_extract_all(points, config: ExtractionConfig | None = None,
                       params: RansacParams | None = None) -> list[PlanePatch]:
    """Per-root-voxel iterative RANSAC extraction.

    In each voxel, planes are extracted and their inliers removed until no
    plane reaches min_inliers. Patch statistics come from the inlier
    clusters; inlier sets of successive planes in a voxel are disjoint.
    """
    if config is None:
        config = ExtractionConfig()
    if params is None:
        params = RansacParams()
    min_inliers = params.min_inliers if params.min_inliers is not None else config.min_points
    eff = RansacParams(dist_threshold=params.dist_threshold,
                       max_iterations=params.max_iterations,
                       min_inliers=min_inliers,
                       success_probability=params.success_probability,
                       seed=params.seed)

    pts = as_points(points)
    patches: list[PlanePatch] = []
    for key, idx in build_root_map(pts, config.root_size).items():
        rng = _voxel_rng(params.seed, key)
        remaining = idx
        while remaining.shape[0] >= max(3, min_inliers):
            result = ransac_plane(pts[remaining], eff, rng)
            if result is None:
                break
            member_idx = remaining[result.inliers]
            cluster = _accumulate_checked(pts[member_idx])
            cov, centroid = covariance(cluster)
            eig = eigen_symmetric3(cov)
            patches.append(PlanePatch(
                cluster=cluster,
                centroid=centroid,
                normal=eig.eigenvectors[:, 2].copy(),
                eigenvalues=eig.eigenvalues.copy(),
                point_indices=member_idx,
                root_key=key,
                depth=0,
            ))
            keep = np.ones(remaining.shape[0], dtype=bool)
            keep[result.inliers] = False
            remaining = remaining[keep]
    return patches
