"""End-to-end extraction pipeline: root voxelization, per-voxel octree
subdivision, and per-voxel plane merging.

Root voxels are independent once the root map is built, so the subdivision
stage can fan out across a thread pool; results are keyed by voxel and
emitted in sorted lattice order, which keeps the output identical whatever
the completion order.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ExtractionConfig
from .merging import PlaneGroup, greedy_merge
from .octree import (
    NodeState,
    OctreeNode,
    PlanePatch,
    VoxelKey,
    build_root_map,
    iter_leaves,
    make_root_node,
    subdivide,
)
from .geometry import as_points

__all__ = [
    "StageTimings",
    "ExtractionResult",
    "build_voxel_forest",
    "collect_patches",
    "extract_plane_groups",
    "extract_planes",
]


@dataclass
class StageTimings:
    """Wall-clock seconds per pipeline stage (monotonic clock)."""

    voxelize: float = 0.0
    subdivide: float = 0.0
    merge: float = 0.0
    total: float = 0.0

    def as_dict(self) -> dict[str, float]:
        return {"voxelize": self.voxelize, "subdivide": self.subdivide,
                "merge": self.merge, "total": self.total}


@dataclass
class ExtractionResult:
    groups: list[PlaneGroup]
    timings: StageTimings


def build_voxel_forest(points, config: ExtractionConfig,
                       threads: int = 1) -> dict[VoxelKey, OctreeNode]:
    """Voxelize and subdivide, returning the resolved octree per root voxel
    in sorted lattice-key order."""
    pts = as_points(points)
    root_map = build_root_map(pts, config.root_size)
    items = list(root_map.items())

    def resolve(item):
        key, idx = item
        return subdivide(make_root_node(key, config.root_size, idx), pts, config, key)

    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            roots = list(pool.map(resolve, items))
    else:
        roots = [resolve(item) for item in items]
    return {item[0]: root for item, root in zip(items, roots)}


def collect_patches(forest: dict[VoxelKey, OctreeNode]) -> dict[VoxelKey, list[PlanePatch]]:
    """Plane-leaf patches per root voxel, in octree traversal order."""
    out: dict[VoxelKey, list[PlanePatch]] = {}
    for key, root in forest.items():
        patches = [leaf.patch for leaf in iter_leaves(root)
                   if leaf.state is NodeState.PLANE_LEAF]
        out[key] = [p for p in patches if p is not None]
    return out


def extract_plane_groups(points, config: ExtractionConfig | None = None,
                         threads: int = 1) -> ExtractionResult:
    """Full pipeline with per-stage timings.

    With merging enabled the groups are the per-voxel merge results;
    otherwise every leaf patch becomes its own singleton group. Output is
    deterministic for identical input and config.
    """
    if config is None:
        config = ExtractionConfig()
    timings = StageTimings()
    t_start = time.perf_counter()

    pts = as_points(points)
    t0 = time.perf_counter()
    root_map = build_root_map(pts, config.root_size)
    timings.voxelize = time.perf_counter() - t0

    items = list(root_map.items())

    def resolve(item):
        key, idx = item
        return subdivide(make_root_node(key, config.root_size, idx), pts, config, key)

    t0 = time.perf_counter()
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            roots = list(pool.map(resolve, items))
    else:
        roots = [resolve(item) for item in items]
    timings.subdivide = time.perf_counter() - t0

    t0 = time.perf_counter()
    groups: list[PlaneGroup] = []
    for (key, _), root in zip(items, roots):
        patches = [leaf.patch for leaf in iter_leaves(root)
                   if leaf.state is NodeState.PLANE_LEAF and leaf.patch is not None]
        if config.merging_enabled:
            groups.extend(greedy_merge(patches, config.merge_params))
        else:
            groups.extend(PlaneGroup(members=[p], merged=p) for p in patches)
    timings.merge = time.perf_counter() - t0

    timings.total = time.perf_counter() - t_start
    return ExtractionResult(groups=groups, timings=timings)


def extract_planes(points, config: ExtractionConfig | None = None,
                   threads: int = 1) -> list[PlanePatch]:
    """Extracted planes, one representative patch per group, grouped by
    root voxel in sorted lattice order."""
    return [g.merged for g in extract_plane_groups(points, config, threads).groups]
