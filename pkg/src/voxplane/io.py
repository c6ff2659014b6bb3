"""File formats: point clouds (binary labeled, xyz, ascii ply), plane-set
documents, colored clouds, and evaluation reports.

All writers are deterministic byte for byte for identical input: floats
are serialized with shortest round-trip repr, field order is fixed, and
nothing timing-dependent is written except the explicit timing section of
reports.
"""

from __future__ import annotations

import colorsys
import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CloudFormatError, InputValidationError
from .evaluation import EvalReport
from .geometry import _accumulate_checked
from .merging import PlaneGroup
from .octree import PlanePatch, VoxelKey

logger = logging.getLogger(__name__)

__all__ = [
    "read_cloud",
    "write_cloud",
    "PlaneRecord",
    "group_records",
    "records_to_groups",
    "write_planes",
    "read_planes",
    "write_colored_cloud",
    "group_color",
    "report_to_dict",
    "write_report",
]

_MAGIC = b"VXPC"
_VERSION = 1
_HEADER = struct.Struct("<4sIQB")  # magic, version, point count, has_labels

_FORMATS = ("auto", "labeled", "xyz", "ply_ascii")


# ---------------------------------------------------------------------------
# point clouds


def read_cloud(path, fmt: str = "auto") -> tuple[np.ndarray, np.ndarray | None]:
    """Read a point cloud, returning (points, labels-or-None).

    Malformed content is a hard error carrying the line number where one
    applies; nothing is silently skipped. Non-finite coordinates are
    rejected.
    """
    if fmt not in _FORMATS:
        raise CloudFormatError(f"unknown format {fmt!r}; expected one of {_FORMATS}", path)
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CloudFormatError(f"cannot read file: {exc}", path) from exc
    if fmt == "auto":
        fmt = _sniff_format(raw, path)
    if fmt == "labeled":
        return _read_labeled(raw, path)
    text = _decode_text(raw, path)
    if fmt == "ply_ascii":
        return _read_ply(text, path)
    return _read_xyz(text, path)


def _sniff_format(raw: bytes, path) -> str:
    if raw.startswith(_MAGIC):
        return "labeled"
    if raw[:3] == b"ply":
        return "ply_ascii"
    return "xyz"


def _decode_text(raw: bytes, path) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CloudFormatError(f"not a recognized cloud file (binary content, "
                               f"bad magic): {exc}", path) from exc


def _check_finite(pts: np.ndarray, path) -> np.ndarray:
    if pts.size and not np.isfinite(pts).all():
        raise InputValidationError(f"{path}: cloud contains non-finite coordinates")
    return pts


def _read_labeled(raw: bytes, path) -> tuple[np.ndarray, np.ndarray | None]:
    if len(raw) < _HEADER.size:
        raise CloudFormatError("truncated header", path)
    magic, version, count, has_labels = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise CloudFormatError("bad magic; not a labeled-cloud file", path)
    if version != _VERSION:
        raise CloudFormatError(f"unsupported labeled-cloud version {version}", path)
    need = _HEADER.size + count * 24 + (count * 4 if has_labels else 0)
    if len(raw) != need:
        raise CloudFormatError(f"size mismatch: header promises {count} points "
                               f"({need} bytes), file has {len(raw)}", path)
    pts = np.frombuffer(raw, dtype="<f8", count=count * 3,
                        offset=_HEADER.size).reshape(count, 3).astype(np.float64)
    labels = None
    if has_labels:
        labels = np.frombuffer(raw, dtype="<i4", count=count,
                               offset=_HEADER.size + count * 24).astype(np.int32)
    if count == 0:
        logger.warning("%s: empty cloud", path)
        pts = pts.reshape(0, 3)
    return _check_finite(pts, path), labels


def _read_xyz(text: str, path) -> tuple[np.ndarray, None]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) != 3:
            raise CloudFormatError(f"expected 3 fields, got {len(fields)}",
                                   path, lineno)
        try:
            rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise CloudFormatError(f"bad number: {exc}", path, lineno) from exc
    if not rows:
        logger.warning("%s: empty cloud", path)
        return np.zeros((0, 3)), None
    return _check_finite(np.array(rows, dtype=np.float64), path), None


_PLY_XYZ_TYPES = {"float", "float32", "double", "float64"}


def _read_ply(text: str, path) -> tuple[np.ndarray, np.ndarray | None]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "ply":
        raise CloudFormatError("missing 'ply' magic line", path, 1)
    vertex_count = None
    properties: list[str] = []
    in_vertex = False
    data_start = None
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.strip().split()
        if not tokens or tokens[0] == "comment":
            continue
        if tokens[0] == "format":
            if tokens[1:2] != ["ascii"]:
                raise CloudFormatError(f"unsupported ply format {' '.join(tokens[1:])!r}; "
                                       "only ascii is handled", path, lineno)
        elif tokens[0] == "element":
            if tokens[1] == "vertex":
                vertex_count = int(tokens[2])
                in_vertex = True
            else:
                if int(tokens[2]) != 0:
                    raise CloudFormatError(f"unsupported non-empty element "
                                           f"{tokens[1]!r}", path, lineno)
                in_vertex = False
        elif tokens[0] == "property":
            if in_vertex:
                if tokens[1] == "list":
                    raise CloudFormatError("list properties are not supported",
                                           path, lineno)
                properties.append(tokens[2])
        elif tokens[0] == "end_header":
            data_start = lineno
            break
        else:
            raise CloudFormatError(f"unrecognized header line {line.strip()!r}",
                                   path, lineno)
    if data_start is None or vertex_count is None:
        raise CloudFormatError("header ended without element vertex / end_header", path)
    for axis in ("x", "y", "z"):
        if axis not in properties:
            raise CloudFormatError(f"vertex element lacks property {axis!r}", path)
    col = {name: i for i, name in enumerate(properties)}
    has_label = "label" in col

    data_lines = lines[data_start:]
    rows = np.zeros((vertex_count, 3))
    labels = np.zeros(vertex_count, dtype=np.int32) if has_label else None
    seen = 0
    for offset, line in enumerate(data_lines):
        lineno = data_start + 1 + offset
        stripped = line.strip()
        if not stripped:
            if seen < vertex_count:
                raise CloudFormatError("blank line inside vertex data", path, lineno)
            continue
        if seen >= vertex_count:
            raise CloudFormatError("more data rows than declared vertices", path, lineno)
        fields = stripped.split()
        if len(fields) != len(properties):
            raise CloudFormatError(f"expected {len(properties)} fields, got "
                                   f"{len(fields)}", path, lineno)
        try:
            rows[seen, 0] = float(fields[col["x"]])
            rows[seen, 1] = float(fields[col["y"]])
            rows[seen, 2] = float(fields[col["z"]])
            if has_label:
                labels[seen] = int(fields[col["label"]])
        except ValueError as exc:
            raise CloudFormatError(f"bad number: {exc}", path, lineno) from exc
        seen += 1
    if seen != vertex_count:
        raise CloudFormatError(f"truncated: {seen} of {vertex_count} vertices", path)
    if vertex_count == 0:
        logger.warning("%s: empty cloud", path)
    return _check_finite(rows, path), labels


def write_cloud(path, points, labels=None, fmt: str = "labeled") -> None:
    """Write a cloud. The labeled binary format round-trips coordinates
    bit-exactly; xyz and ply_ascii use shortest round-trip decimal."""
    pts = np.ascontiguousarray(np.asarray(points, dtype=np.float64).reshape(-1, 3))
    if labels is not None and len(labels) != pts.shape[0]:
        raise InputValidationError(
            f"labels length {len(labels)} does not match {pts.shape[0]} points")
    path = Path(path)
    if fmt == "labeled":
        has = labels is not None
        blob = _HEADER.pack(_MAGIC, _VERSION, pts.shape[0], int(has))
        blob += pts.astype("<f8").tobytes()
        if has:
            blob += np.asarray(labels, dtype="<i4").tobytes()
        path.write_bytes(blob)
        return
    if fmt == "xyz":
        out = [" ".join(repr(float(v)) for v in row) for row in pts]
        path.write_text("\n".join(out) + ("\n" if out else ""), encoding="utf-8")
        return
    if fmt == "ply_ascii":
        header = ["ply", "format ascii 1.0", f"element vertex {pts.shape[0]}",
                  "property double x", "property double y", "property double z"]
        if labels is not None:
            header.append("property int label")
        header.append("end_header")
        body = []
        for i, row in enumerate(pts):
            fields = [repr(float(v)) for v in row]
            if labels is not None:
                fields.append(str(int(labels[i])))
            body.append(" ".join(fields))
        path.write_text("\n".join(header + body) + "\n", encoding="utf-8")
        return
    raise CloudFormatError(f"unknown format {fmt!r}", path)


# ---------------------------------------------------------------------------
# plane-set documents


@dataclass(frozen=True)
class PlaneRecord:
    """Serialized form of one plane group: plain tuples so equality is
    structural and round-trips through text exactly."""

    root_key: tuple[int, int, int]
    count: int
    centroid: tuple[float, float, float]
    normal: tuple[float, float, float]
    eigenvalues: tuple[float, float, float]
    depth_histogram: tuple[tuple[int, int], ...]  # (depth, member count), depth ascending
    indices: tuple[int, ...] | None = None


def group_records(groups: list[PlaneGroup],
                  include_indices: bool = True) -> list[PlaneRecord]:
    records = []
    for g in groups:
        hist: dict[int, int] = {}
        for m in g.members:
            hist[m.depth] = hist.get(m.depth, 0) + 1
        records.append(PlaneRecord(
            root_key=tuple(int(v) for v in g.merged.root_key),
            count=int(g.merged.cluster.n),
            centroid=tuple(float(v) for v in g.merged.centroid),
            normal=tuple(float(v) for v in g.merged.normal),
            eigenvalues=tuple(float(v) for v in g.merged.eigenvalues),
            depth_histogram=tuple(sorted(hist.items())),
            indices=(tuple(int(i) for i in g.merged.point_indices)
                     if include_indices else None),
        ))
    return records


def records_to_groups(records: list[PlaneRecord], points: np.ndarray) -> list[PlaneGroup]:
    """Rebuild evaluable groups from records plus the original points.

    Every record must carry member indices; the cluster is re-accumulated
    from them while centroid/normal/eigenvalues keep the stored values.
    """
    groups = []
    for rec in records:
        if rec.indices is None:
            raise InputValidationError(
                "plane record lacks member indices; re-export the plane set "
                "with indices enabled")
        idx = np.asarray(rec.indices, dtype=np.int64)
        patch = PlanePatch(
            cluster=_accumulate_checked(points[idx]),
            centroid=np.array(rec.centroid),
            normal=np.array(rec.normal),
            eigenvalues=np.array(rec.eigenvalues),
            point_indices=idx,
            root_key=VoxelKey(*rec.root_key),
            depth=rec.depth_histogram[0][0] if rec.depth_histogram else 0,
        )
        groups.append(PlaneGroup(members=[patch], merged=patch))
    return groups


def _fmt_floats(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def write_planes(groups_or_records, path, include_indices: bool = True) -> None:
    """Write a plane-set document; field order is fixed and floats use
    shortest round-trip repr, so output is byte-stable across runs."""
    if groups_or_records and isinstance(groups_or_records[0], PlaneGroup):
        records = group_records(groups_or_records, include_indices)
    else:
        records = list(groups_or_records)
    lines = [f"voxplane-planeset {_VERSION}", f"groups {len(records)}"]
    for i, rec in enumerate(records):
        lines.append(f"group {i}")
        lines.append("root " + " ".join(str(v) for v in rec.root_key))
        lines.append(f"count {rec.count}")
        lines.append("centroid " + _fmt_floats(rec.centroid))
        lines.append("normal " + _fmt_floats(rec.normal))
        lines.append("eigenvalues " + _fmt_floats(rec.eigenvalues))
        lines.append("depths " + " ".join(f"{d}:{c}" for d, c in rec.depth_histogram))
        if rec.indices is not None:
            lines.append("indices " + " ".join(str(v) for v in rec.indices))
        lines.append("end")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_planes(path) -> list[PlaneRecord]:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CloudFormatError(f"cannot read file: {exc}", path) from exc

    def fail(msg, lineno=None):
        raise CloudFormatError(msg, path, lineno)

    if not lines or not lines[0].startswith("voxplane-planeset "):
        fail("not a plane-set document", 1)
    if int(lines[0].split()[1]) != _VERSION:
        fail(f"unsupported version {lines[0].split()[1]}", 1)
    if len(lines) < 2 or not lines[1].startswith("groups "):
        fail("missing group count", 2)
    expected = int(lines[1].split()[1])

    records = []
    i = 2
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        if not lines[i].startswith("group "):
            fail(f"expected 'group', got {lines[i]!r}", i + 1)
        fields: dict[str, str] = {}
        i += 1
        while i < len(lines) and lines[i] != "end":
            key, _, rest = lines[i].partition(" ")
            fields[key] = rest
            i += 1
        if i >= len(lines):
            fail("group without 'end'")
        i += 1
        try:
            depths = tuple(
                (int(d), int(c))
                for d, c in (pair.split(":") for pair in fields["depths"].split()))
            indices = None
            if "indices" in fields:
                indices = tuple(int(v) for v in fields["indices"].split())
            records.append(PlaneRecord(
                root_key=tuple(int(v) for v in fields["root"].split()),
                count=int(fields["count"]),
                centroid=tuple(float(v) for v in fields["centroid"].split()),
                normal=tuple(float(v) for v in fields["normal"].split()),
                eigenvalues=tuple(float(v) for v in fields["eigenvalues"].split()),
                depth_histogram=depths,
                indices=indices,
            ))
        except (KeyError, ValueError) as exc:
            fail(f"bad group block: {exc}")
    if len(records) != expected:
        fail(f"document promises {expected} groups, found {len(records)}")
    return records


# ---------------------------------------------------------------------------
# colored clouds and reports


def group_color(index: int) -> tuple[int, int, int]:
    """Deterministic palette: golden-ratio hue stepping, full saturation.
    Distinct for all practical group counts."""
    hue = (index * 0.6180339887498949) % 1.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.85, 0.95)
    return int(r * 255), int(g * 255), int(b * 255)


def write_colored_cloud(points, assignment, path) -> None:
    """ASCII ply of the points assigned to groups, one distinct color per
    group (palette indexed by group number). Points with assignment < 0
    are not part of any plane and are omitted."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    assign = np.asarray(assignment, dtype=np.int64).reshape(-1)
    keep = np.flatnonzero(assign >= 0)
    header = ["ply", "format ascii 1.0", f"element vertex {keep.shape[0]}",
              "property double x", "property double y", "property double z",
              "property uchar red", "property uchar green", "property uchar blue",
              "end_header"]
    body = []
    for i in keep:
        r, g, b = group_color(int(assign[i]))
        body.append(" ".join(repr(float(v)) for v in pts[i]) + f" {r} {g} {b}")
    Path(path).write_text("\n".join(header + body) + "\n", encoding="utf-8")


def report_to_dict(report: EvalReport) -> dict:
    return {
        "precision": report.precision,
        "recall": report.recall,
        "extracted_count": report.extracted_count,
        "ground_truth_count": report.ground_truth_count,
        "matched_planes": [
            {"group": m.group_index, "truth_plane": m.plane_id,
             "normal_error_deg": m.normal_error_deg,
             "offset_error_m": m.offset_error_m}
            for m in report.matched_planes
        ],
        "wall_time_s": report.wall_time.as_dict() if report.wall_time else None,
    }


def write_report(report: EvalReport, path) -> None:
    Path(path).write_text(json.dumps(report_to_dict(report), indent=2) + "\n",
                          encoding="utf-8")
