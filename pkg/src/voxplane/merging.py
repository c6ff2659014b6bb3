"""Merging of coplanar leaf planes within a root voxel.

Octree partition is irreversible and tends to shatter one physical plane
into many small leaves. Greedy first-fit grouping repairs that: each patch
joins the first existing group whose merged representative it is coplanar
with, otherwise it starts a new group. Groups never span root voxels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .geometry import covariance, eigen_symmetric3, merge
from .octree import PlanePatch

__all__ = ["MergeParams", "PlaneGroup", "coplanar_test", "merge_patches", "greedy_merge"]


@dataclass(frozen=True)
class MergeParams:
    """Coplanarity thresholds.

    normal_angle_max_deg: max angle between the two normals.
    separation_angle_tol_deg: the centroid-difference vector must be within
        this many degrees of perpendicular to both normals.
    min_separation: centroid distance (meters) below which the direction of
        the difference vector is meaningless and the second test is skipped.
    """

    normal_angle_max_deg: float = 8.0
    separation_angle_tol_deg: float = 10.0
    min_separation: float = 1e-6

    def __post_init__(self):
        if not 0 < self.normal_angle_max_deg < 90:
            raise ConfigError("normal_angle_max_deg must be in (0, 90)")
        if not 0 < self.separation_angle_tol_deg < 90:
            raise ConfigError("separation_angle_tol_deg must be in (0, 90)")
        if self.min_separation < 0:
            raise ConfigError("min_separation must be non-negative")


@dataclass
class PlaneGroup:
    """A set of merged patches plus their combined representative, whose
    statistics are recomputed from the merged moment sums."""

    members: list[PlanePatch]
    merged: PlanePatch


def _angle_deg(cos_abs: float) -> float:
    return math.degrees(math.acos(min(1.0, max(0.0, cos_abs))))


def coplanar_test(pi: PlanePatch, pj: PlanePatch, params: MergeParams) -> bool:
    """True when two patches lie on one plane.

    Two conditions: near-parallel normals, and a centroid-difference vector
    close to perpendicular to both normals (i.e. the offset between the
    patches is an in-plane offset, not a gap along the normal). Absolute
    dot products make the test independent of normal sign conventions and
    hence symmetric in its arguments.
    """
    normal_angle = _angle_deg(abs(float(np.dot(pi.normal, pj.normal))))
    if normal_angle >= params.normal_angle_max_deg:
        return False
    d = pi.centroid - pj.centroid
    dist = float(np.linalg.norm(d))
    if dist < params.min_separation:
        # Coincident centroids with parallel normals: same plane.
        return True
    for u in (pi.normal, pj.normal):
        ang = _angle_deg(abs(float(np.dot(d, u))) / dist)
        if abs(ang - 90.0) >= params.separation_angle_tol_deg:
            return False
    return True


def merge_patches(members: list[PlanePatch]) -> PlanePatch:
    """Combine patches into one, recomputing centroid/normal/eigenvalues
    from the merged moment sums (O(1) in the number of points)."""
    cluster = members[0].cluster
    for m in members[1:]:
        cluster = merge(cluster, m.cluster)
    cov, centroid = covariance(cluster)
    eig = eigen_symmetric3(cov)
    return PlanePatch(
        cluster=cluster,
        centroid=centroid,
        normal=eig.eigenvectors[:, 2].copy(),
        eigenvalues=eig.eigenvalues.copy(),
        point_indices=np.concatenate([m.point_indices for m in members]),
        root_key=members[0].root_key,
        depth=min(m.depth for m in members),
    )


def greedy_merge(patches: list[PlanePatch], params: MergeParams) -> list[PlaneGroup]:
    """First-fit grouping of patches from one root voxel.

    Patches are taken in the order given (octree traversal order); each is
    tested against every existing group's merged representative in group
    creation order and joins the first match, after which that group's
    representative is recomputed. The result is a partition of the input.
    """
    if len({p.root_key for p in patches}) > 1:
        raise ValueError("greedy_merge requires patches from a single root voxel")
    groups: list[PlaneGroup] = []
    for patch in patches:
        for group in groups:
            if coplanar_test(group.merged, patch, params):
                group.members.append(patch)
                group.merged = merge_patches(group.members)
                break
        else:
            groups.append(PlaneGroup(members=[patch], merged=patch))
    return groups
